#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace dfn {

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

double distance(Point2 a, Point2 b);

enum class BranchEnd { Start, End };

const char* to_string(BranchEnd end);

/// A straight fracture branch. PDE quantities live on the arc coordinate s in [0, length].
struct Branch {
  std::string id;
  Point2 start;
  Point2 end;

  double length() const;
  /// Unit tangent pointing from start to end.
  Point2 tangent() const;
};

struct BranchEndRef {
  std::string branch;
  BranchEnd end = BranchEnd::Start;
};

struct Intersection {
  std::string id;
  Point2 point;
  std::vector<BranchEndRef> incident;
};

/// Outward flux u.n prescribed at a free branch end.
struct VelocityBC {
  double outward_flux = 0.0;
};

struct PressureBC {
  double pressure = 0.0;
};

using EndCondition = std::variant<VelocityBC, PressureBC>;

struct BoundaryCondition {
  BranchEndRef where;
  EndCondition condition;
};

struct BoundarySpec {
  std::vector<BoundaryCondition> conditions;
  /// Required when no PressureBC exists anywhere.
  std::optional<double> mean_pressure;

  bool has_pressure_condition() const;
};

/// Scalar source q along one branch, a function of the arc coordinate.
///
/// Piecewise-constant by default: `values` has breakpoints.size() + 1 entries,
/// value i applying on (breakpoint[i-1], breakpoint[i]). A smooth `profile` may
/// be given instead; it is integrated with a 3-point Gauss rule per element.
struct BranchSource {
  std::vector<double> breakpoints;
  std::vector<double> values;
  std::function<double(double)> profile;

  double value_at(double s) const;
  /// Integral of q over [a, b]; exact for piecewise-constant data that has
  /// its breakpoints at mesh nodes.
  double integral(double a, double b) const;
};

struct SourceSpec {
  /// Per-branch scalar sources keyed by branch id; missing branches have q = 0.
  std::vector<std::pair<std::string, BranchSource>> scalar;
  /// Ambient body force; only its tangential component acts on a branch.
  Point2 force;

  const BranchSource* find(const std::string& branch) const;
};

struct FractureNetwork {
  std::vector<Branch> branches;
  std::vector<Intersection> intersections;
  BoundarySpec boundary;
  SourceSpec sources;

  std::optional<std::size_t> branch_index(const std::string& id) const;
  double total_length() const;
  /// Tangential body force f.t on branch b.
  double tangential_force(std::size_t b) const;
  /// Boundary condition at a branch end, or nullptr for junction / unclosed ends.
  const EndCondition* condition_at(std::size_t b, BranchEnd end) const;
  /// Intersection index the branch end belongs to, if any.
  std::optional<std::size_t> junction_at(std::size_t b, BranchEnd end) const;
};

struct ValidationReport {
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
};

ValidationReport validate_network(const FractureNetwork& network);

/// Throws ConfigError listing every violation when the network is not well formed.
void require_valid(const FractureNetwork& network);

struct BranchMesh {
  std::size_t branch = 0;
  double length = 0.0;
  /// Strictly increasing arc coordinates, first 0 and last `length`.
  std::vector<double> nodes;

  std::size_t element_count() const { return nodes.empty() ? 0 : nodes.size() - 1; }
  double element_length(std::size_t e) const { return nodes[e + 1] - nodes[e]; }
  double midpoint(std::size_t e) const { return 0.5 * (nodes[e] + nodes[e + 1]); }
  /// Element containing s (the left one at interior nodes).
  std::size_t locate(double s) const;
};

struct ElementRef {
  std::size_t branch = 0;
  std::size_t local = 0;
};

class Mesh {
public:
  Mesh() = default;
  explicit Mesh(std::vector<BranchMesh> branches);

  const std::vector<BranchMesh>& branches() const { return branches_; }
  const BranchMesh& branch(std::size_t b) const { return branches_[b]; }
  std::size_t branch_count() const { return branches_.size(); }

  std::size_t element_count() const { return element_offsets_.back(); }
  std::size_t node_count() const { return node_offsets_.back(); }
  std::size_t element_offset(std::size_t b) const { return element_offsets_[b]; }
  std::size_t node_offset(std::size_t b) const { return node_offsets_[b]; }
  ElementRef element(std::size_t global) const;

  /// Global mesh size h = max h_E.
  double h() const;

private:
  std::vector<BranchMesh> branches_;
  std::vector<std::size_t> element_offsets_{0};
  std::vector<std::size_t> node_offsets_{0};
};

/// Uniform-as-possible partition with h_E <= target_h. Branch ends and source
/// breakpoints are always nodes, so junctions are respected on every branch.
Mesh build_mesh(const FractureNetwork& network, double target_h);

struct ArcPoint {
  std::size_t branch = 0;
  double arc = 0.0;
};

/// Inserts the given points as nodes. Points within 1e-12 of an existing node
/// are ignored.
Mesh split_mesh_at(const Mesh& mesh, const std::vector<ArcPoint>& points);

inline constexpr double kNodeTolerance = 1e-12;

}  // namespace dfn
