#include "dfn/geometry.hpp"

#include "dfn/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

namespace dfn {

double distance(Point2 a, Point2 b) { return std::hypot(b.x - a.x, b.y - a.y); }

const char* to_string(BranchEnd end) { return end == BranchEnd::Start ? "start" : "end"; }

double Branch::length() const { return distance(start, end); }

Point2 Branch::tangent() const {
  const double len = length();
  return {(end.x - start.x) / len, (end.y - start.y) / len};
}

bool BoundarySpec::has_pressure_condition() const {
  return std::any_of(conditions.begin(), conditions.end(), [](const BoundaryCondition& bc) {
    return std::holds_alternative<PressureBC>(bc.condition);
  });
}

double BranchSource::value_at(double s) const {
  if (profile) return profile(s);
  if (values.empty()) return 0.0;
  const auto it = std::upper_bound(breakpoints.begin(), breakpoints.end(), s);
  return values[static_cast<std::size_t>(it - breakpoints.begin())];
}

double BranchSource::integral(double a, double b) const {
  if (profile) {
    // 3-point Gauss-Legendre on [a, b].
    static constexpr std::array<double, 3> xi{-0.7745966692414834, 0.0, 0.7745966692414834};
    static constexpr std::array<double, 3> wi{5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    double sum = 0.0;
    for (std::size_t k = 0; k < 3; ++k) sum += wi[k] * profile(mid + half * xi[k]);
    return half * sum;
  }
  if (values.empty()) return 0.0;
  // Sum over the constant pieces overlapping [a, b].
  double total = 0.0;
  double left = a;
  for (std::size_t piece = 0; piece < values.size() && left < b; ++piece) {
    const double piece_end = piece < breakpoints.size() ? breakpoints[piece] : b;
    const double right = std::min(piece_end, b);
    if (right > left) {
      total += values[piece] * (right - left);
      left = right;
    }
  }
  return total;
}

const BranchSource* SourceSpec::find(const std::string& branch) const {
  for (const auto& [id, source] : scalar)
    if (id == branch) return &source;
  return nullptr;
}

std::optional<std::size_t> FractureNetwork::branch_index(const std::string& id) const {
  for (std::size_t b = 0; b < branches.size(); ++b)
    if (branches[b].id == id) return b;
  return std::nullopt;
}

double FractureNetwork::total_length() const {
  return std::accumulate(branches.begin(), branches.end(), 0.0,
                         [](double acc, const Branch& br) { return acc + br.length(); });
}

double FractureNetwork::tangential_force(std::size_t b) const {
  const Point2 t = branches[b].tangent();
  return sources.force.x * t.x + sources.force.y * t.y;
}

const EndCondition* FractureNetwork::condition_at(std::size_t b, BranchEnd end) const {
  for (const auto& bc : boundary.conditions)
    if (bc.where.end == end && bc.where.branch == branches[b].id) return &bc.condition;
  return nullptr;
}

std::optional<std::size_t> FractureNetwork::junction_at(std::size_t b, BranchEnd end) const {
  for (std::size_t j = 0; j < intersections.size(); ++j)
    for (const auto& ref : intersections[j].incident)
      if (ref.end == end && ref.branch == branches[b].id) return j;
  return std::nullopt;
}

ValidationReport validate_network(const FractureNetwork& network) {
  ValidationReport report;
  auto violation = [&report](const std::string& msg) { report.violations.push_back(msg); };

  if (network.branches.empty()) violation("network has no branches");

  std::set<std::string> ids;
  for (const auto& br : network.branches) {
    if (!ids.insert(br.id).second) violation("duplicate branch id '" + br.id + "'");
    if (!(br.length() > 0.0)) violation("branch '" + br.id + "' has zero length");
  }

  // Each branch end is claimed by at most one junction or boundary condition.
  std::vector<std::array<int, 2>> claims(network.branches.size(), {0, 0});
  auto claim = [&](const BranchEndRef& ref, const std::string& by) -> std::optional<std::size_t> {
    const auto b = network.branch_index(ref.branch);
    if (!b) {
      violation(by + " references unknown branch '" + ref.branch + "'");
      return std::nullopt;
    }
    ++claims[*b][ref.end == BranchEnd::Start ? 0 : 1];
    return b;
  };

  for (const auto& inter : network.intersections) {
    if (inter.incident.size() < 2)
      violation("intersection '" + inter.id + "' has fewer than 2 incident branch ends");
    for (const auto& ref : inter.incident) {
      const auto b = claim(ref, "intersection '" + inter.id + "'");
      if (!b) continue;
      const auto& br = network.branches[*b];
      const Point2 p = ref.end == BranchEnd::Start ? br.start : br.end;
      if (distance(p, inter.point) > kNodeTolerance)
        violation("intersection '" + inter.id + "': " + to_string(ref.end) + " of branch '" +
                  br.id + "' does not coincide with the intersection point");
    }
  }

  for (const auto& bc : network.boundary.conditions) claim(bc.where, "boundary condition");

  for (std::size_t b = 0; b < network.branches.size(); ++b) {
    for (int side = 0; side < 2; ++side) {
      const char* end_name = side == 0 ? "start" : "end";
      if (claims[b][side] == 0)
        violation("unclosed boundary: " + std::string(end_name) + " of branch '" +
                  network.branches[b].id + "' has neither a boundary condition nor an intersection");
      else if (claims[b][side] > 1)
        violation(std::string(end_name) + " of branch '" + network.branches[b].id +
                  "' is claimed more than once");
    }
  }

  if (!network.boundary.has_pressure_condition() && !network.boundary.mean_pressure)
    violation("pressure level undetermined: no pressure condition and no mean pressure");

  for (const auto& [id, source] : network.sources.scalar) {
    const auto b = network.branch_index(id);
    if (!b) {
      violation("source references unknown branch '" + id + "'");
      continue;
    }
    if (source.profile) continue;
    if (!source.values.empty() && source.values.size() != source.breakpoints.size() + 1)
      violation("source on branch '" + id + "' needs breakpoints.size() + 1 values");
    const double len = network.branches[*b].length();
    for (std::size_t k = 0; k < source.breakpoints.size(); ++k) {
      const double s = source.breakpoints[k];
      if (!(s > 0.0 && s < len))
        violation("source breakpoint outside branch '" + id + "' interior");
      if (k > 0 && !(s > source.breakpoints[k - 1]))
        violation("source breakpoints on branch '" + id + "' are not increasing");
    }
  }

  // Connectivity through intersections.
  if (!network.branches.empty() && report.ok()) {
    std::vector<std::size_t> parent(network.branches.size());
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&parent](std::size_t i) {
      while (parent[i] != i) i = parent[i] = parent[parent[i]];
      return i;
    };
    for (const auto& inter : network.intersections) {
      const auto first = *network.branch_index(inter.incident.front().branch);
      for (const auto& ref : inter.incident) parent[find(*network.branch_index(ref.branch))] = find(first);
    }
    const auto root = find(0);
    for (std::size_t b = 1; b < network.branches.size(); ++b)
      if (find(b) != root) {
        violation("network is not connected");
        break;
      }
  }
  return report;
}

void require_valid(const FractureNetwork& network) {
  const auto report = validate_network(network);
  if (report.ok()) return;
  std::ostringstream msg;
  msg << "invalid network:";
  for (const auto& v : report.violations) msg << "\n  " << v;
  throw ConfigError(msg.str());
}

std::size_t BranchMesh::locate(double s) const {
  const auto it = std::upper_bound(nodes.begin() + 1, nodes.end() - 1, s);
  auto e = static_cast<std::size_t>(it - nodes.begin()) - 1;
  if (e > 0 && s == nodes[e]) --e;
  return e;
}

Mesh::Mesh(std::vector<BranchMesh> branches) : branches_(std::move(branches)) {
  for (const auto& bm : branches_) {
    element_offsets_.push_back(element_offsets_.back() + bm.element_count());
    node_offsets_.push_back(node_offsets_.back() + bm.nodes.size());
  }
}

ElementRef Mesh::element(std::size_t global) const {
  const auto it = std::upper_bound(element_offsets_.begin(), element_offsets_.end(), global);
  const auto b = static_cast<std::size_t>(it - element_offsets_.begin()) - 1;
  return {b, global - element_offsets_[b]};
}

double Mesh::h() const {
  double h = 0.0;
  for (const auto& bm : branches_)
    for (std::size_t e = 0; e < bm.element_count(); ++e) h = std::max(h, bm.element_length(e));
  return h;
}

Mesh build_mesh(const FractureNetwork& network, double target_h) {
  if (!(target_h > 0.0)) throw std::invalid_argument("build_mesh: target h must be positive");
  require_valid(network);

  std::vector<BranchMesh> out;
  out.reserve(network.branches.size());
  for (std::size_t b = 0; b < network.branches.size(); ++b) {
    const double len = network.branches[b].length();
    std::vector<double> required{0.0};
    if (const auto* src = network.sources.find(network.branches[b].id); src && !src->profile)
      required.insert(required.end(), src->breakpoints.begin(), src->breakpoints.end());
    required.push_back(len);

    BranchMesh bm{b, len, {0.0}};
    for (std::size_t k = 0; k + 1 < required.size(); ++k) {
      const double a = required[k];
      const double span = required[k + 1] - a;
      // Guard against 1/0.05 rounding up to 21 pieces.
      const auto pieces = static_cast<std::size_t>(std::max(1.0, std::ceil(span / target_h - 1e-9)));
      for (std::size_t i = 1; i < pieces; ++i)
        bm.nodes.push_back(a + span * static_cast<double>(i) / static_cast<double>(pieces));
      bm.nodes.push_back(required[k + 1]);
    }
    out.push_back(std::move(bm));
  }
  return Mesh(std::move(out));
}

Mesh split_mesh_at(const Mesh& mesh, const std::vector<ArcPoint>& points) {
  std::vector<BranchMesh> branches = mesh.branches();
  for (const auto& p : points) {
    if (p.branch >= branches.size()) throw std::out_of_range("split_mesh_at: unknown branch");
    auto& nodes = branches[p.branch].nodes;
    if (!(p.arc > nodes.front() && p.arc < nodes.back()))
      throw std::invalid_argument("split_mesh_at: point outside the branch interior");
    const auto it = std::lower_bound(nodes.begin(), nodes.end(), p.arc);
    if (std::abs(*it - p.arc) <= kNodeTolerance || std::abs(*(it - 1) - p.arc) <= kNodeTolerance)
      continue;
    nodes.insert(it, p.arc);
  }
  return Mesh(std::move(branches));
}

}  // namespace dfn
