#pragma once

#include "dfn/picard.hpp"

#include <limits>
#include <optional>
#include <string>

namespace dfn {

struct InterfacePoint {
  std::size_t branch = 0;
  double arc = 0.0;
};

/// Regimes at the two ends of a base element. They differ exactly when an
/// interface splits the element at `split`.
struct ElementLabel {
  Regime left = Regime::Low;
  Regime right = Regime::Low;
  std::optional<double> split;

  bool pure() const { return left == right; }
  bool operator==(const ElementLabel& o) const { return left == o.left && right == o.right; }
};

struct Configuration {
  int iteration = 0;
  /// Base mesh plus the current interface nodes.
  Mesh mesh;
  /// Labels on the working mesh elements.
  RegimeField regimes;
  std::vector<InterfacePoint> interfaces;
  /// Labels on the base mesh elements.
  std::vector<ElementLabel> base_labels;
};

struct TrackerSettings {
  double eps_gamma = 1e-10;
  /// Defaults to the base mesh size.
  std::optional<double> eps_omega;
  int max_outer = 50;
  int oscillation_window = 6;
  Regime initial = Regime::Low;
  /// Per base element initial labels; overrides `initial` when set.
  std::optional<RegimeField> initial_labels;
};

enum class TrackerStatus { Converged, Oscillating, MaxIterationsReached };

const char* to_string(TrackerStatus status);

struct IterationRecord {
  Configuration configuration;
  /// Solution computed on the previous configuration that produced this one.
  Solution solution;
  double distance = 0.0;
  int inner_iterations = 0;
  bool picard_converged = true;
  double junction_pressure_jump = 0.0;
};

struct TrackerReport {
  TrackerStatus status = TrackerStatus::MaxIterationsReached;
  int period = 0;
  int outer_iterations = 0;
  Configuration initial;
  std::vector<IterationRecord> history;
  Solution final_solution;
  std::vector<int> inner_iteration_counts;

  const Configuration& final_configuration() const {
    return history.empty() ? initial : history.back().configuration;
  }
};

/// (|u(e1)| < threshold, |u(e2)| < threshold) from the nodal fluxes.
std::pair<bool, bool> classify_endpoints(const Solution& solution, std::size_t branch, double e1, double e2,
                                         double threshold);

/// Point in (e1, e2) where |u_h| crosses the threshold, to within eps_gamma.
/// Throws std::runtime_error when the end classifications agree.
double locate_interface(const Solution& solution, std::size_t branch, double e1, double e2, double threshold,
                        double eps_gamma);

/// Symmetric Hausdorff distance in arc length; points on different branches
/// are infinitely far apart, and an empty set is infinitely far from a
/// non-empty one.
double configuration_distance(const std::vector<InterfacePoint>& a, const std::vector<InterfacePoint>& b);

inline constexpr double kInfiniteDistance = std::numeric_limits<double>::infinity();

/// Per-element classification of the base mesh from a solution on any refinement
/// of it. Elements are independent, so the parallel pass gives the same labels.
std::vector<ElementLabel> classify_base_elements(const Solution& solution, const Mesh& base, double threshold,
                                                 double eps_gamma, Execution exec = Execution::Parallel);

/// Splits the base mesh at the labelled interfaces and builds the working
/// configuration. Interfaces are the interior nodes whose neighbours differ.
Configuration build_configuration(const Mesh& base, const std::vector<ElementLabel>& labels, int iteration);

/// Configuration with every base element labelled from `labels`.
Configuration uniform_configuration(const Mesh& base, const RegimeField& labels);

TrackerReport track(const FractureNetwork& network, const AdaptiveLaw& law, double h,
                    const PicardSettings& picard, const TrackerSettings& settings,
                    Execution exec = Execution::Parallel);

}  // namespace dfn
