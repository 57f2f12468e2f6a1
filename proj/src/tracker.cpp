#include "dfn/tracker.hpp"

#include "dfn/error.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dfn {

const char* to_string(TrackerStatus status) {
  switch (status) {
    case TrackerStatus::Converged: return "converged";
    case TrackerStatus::Oscillating: return "oscillating";
    case TrackerStatus::MaxIterationsReached: return "max-iterations";
  }
  return "?";
}

std::pair<bool, bool> classify_endpoints(const Solution& solution, std::size_t branch, double e1, double e2,
                                         double threshold) {
  return {std::abs(solution.flux_at(branch, e1)) < threshold, std::abs(solution.flux_at(branch, e2)) < threshold};
}

double locate_interface(const Solution& solution, std::size_t branch, double e1, double e2, double threshold,
                        double eps_gamma) {
  const auto [c1, c2] = classify_endpoints(solution, branch, e1, e2, threshold);
  if (c1 == c2) throw std::runtime_error("locate_interface: no threshold crossing in the element");

  const auto& nodes = solution.mesh.branch(branch).nodes;
  const bool interior_node =
      std::upper_bound(nodes.begin(), nodes.end(), e1) != std::lower_bound(nodes.begin(), nodes.end(), e2);
  const double u1 = solution.flux_at(branch, e1);
  const double u2 = solution.flux_at(branch, e2);
  if (!interior_node && u1 * u2 > 0.0) {
    const double a1 = std::abs(u1);
    const double a2 = std::abs(u2);
    return e1 + (threshold - a1) / (a2 - a1) * (e2 - e1);
  }

  double lo = e1;
  double hi = e2;
  while (hi - lo > eps_gamma) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if ((std::abs(solution.flux_at(branch, mid)) < threshold) == c1) lo = mid;
    else hi = mid;
  }
  return 0.5 * (lo + hi);
}

double configuration_distance(const std::vector<InterfacePoint>& a, const std::vector<InterfacePoint>& b) {
  if (a.empty() && b.empty()) return 0.0;
  if (a.empty() || b.empty()) return kInfiniteDistance;
  auto directed = [](const std::vector<InterfacePoint>& from, const std::vector<InterfacePoint>& to) {
    double worst = 0.0;
    for (const auto& p : from) {
      double nearest = kInfiniteDistance;
      for (const auto& q : to)
        if (q.branch == p.branch) nearest = std::min(nearest, std::abs(q.arc - p.arc));
      worst = std::max(worst, nearest);
    }
    return worst;
  };
  return std::max(directed(a, b), directed(b, a));
}

namespace {

Regime regime_of(bool below) { return below ? Regime::Low : Regime::High; }

ElementLabel classify_one(const Solution& solution, const Mesh& base, std::size_t global, double threshold,
                          double eps_gamma) {
  const auto ref = base.element(global);
  const auto& nodes = base.branch(ref.branch).nodes;
  const double e1 = nodes[ref.local];
  const double e2 = nodes[ref.local + 1];
  const auto [c1, c2] = classify_endpoints(solution, ref.branch, e1, e2, threshold);
  ElementLabel label{regime_of(c1), regime_of(c2), std::nullopt};
  if (c1 == c2) return label;

  const double x = locate_interface(solution, ref.branch, e1, e2, threshold, eps_gamma);
  const double snap = std::max(eps_gamma, kNodeTolerance);
  if (x - e1 <= snap) {
    label.left = label.right;
  } else if (e2 - x <= snap) {
    label.right = label.left;
  } else {
    label.split = x;
  }
  return label;
}

}  // namespace

std::vector<ElementLabel> classify_base_elements(const Solution& solution, const Mesh& base, double threshold,
                                                 double eps_gamma, Execution exec) {
  const std::size_t n = base.element_count();
  std::vector<ElementLabel> labels(n);
  if (exec == Execution::Parallel) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t e = 0; e < static_cast<std::ptrdiff_t>(n); ++e)
      labels[static_cast<std::size_t>(e)] =
          classify_one(solution, base, static_cast<std::size_t>(e), threshold, eps_gamma);
  } else {
    for (std::size_t e = 0; e < n; ++e) labels[e] = classify_one(solution, base, e, threshold, eps_gamma);
  }
  return labels;
}

Configuration build_configuration(const Mesh& base, const std::vector<ElementLabel>& labels, int iteration) {
  std::vector<ArcPoint> splits;
  Configuration cfg;
  cfg.iteration = iteration;
  cfg.base_labels = labels;
  for (std::size_t g = 0; g < labels.size(); ++g) {
    if (labels[g].split) splits.push_back({base.element(g).branch, *labels[g].split});
    cfg.regimes.push_back(labels[g].left);
    if (labels[g].split) cfg.regimes.push_back(labels[g].right);
  }
  cfg.mesh = split_mesh_at(base, splits);
  for (std::size_t br = 0; br < cfg.mesh.branch_count(); ++br) {
    const auto& bm = cfg.mesh.branch(br);
    const std::size_t off = cfg.mesh.element_offset(br);
    for (std::size_t e = 1; e < bm.element_count(); ++e)
      if (cfg.regimes[off + e - 1] != cfg.regimes[off + e]) cfg.interfaces.push_back({br, bm.nodes[e]});
  }
  return cfg;
}

Configuration uniform_configuration(const Mesh& base, const RegimeField& labels) {
  if (labels.size() != base.element_count())
    throw std::invalid_argument("initial labels do not match the base mesh");
  std::vector<ElementLabel> el;
  el.reserve(labels.size());
  for (Regime r : labels) el.push_back({r, r, std::nullopt});
  return build_configuration(base, el, 0);
}

TrackerReport track(const FractureNetwork& network, const AdaptiveLaw& law, double h, const PicardSettings& picard,
                    const TrackerSettings& settings, Execution exec) {
  validate_law(law);
  if (!(settings.eps_gamma > 0.0)) throw std::invalid_argument("tracker: eps_gamma must be positive");
  if (settings.max_outer < 1) throw std::invalid_argument("tracker: max outer iterations must be >= 1");
  const Mesh base = build_mesh(network, h);
  const double eps_omega = settings.eps_omega.value_or(base.h());
  if (!(eps_omega > 0.0)) throw std::invalid_argument("tracker: eps_omega must be positive");

  TrackerReport report;
  report.initial = uniform_configuration(
      base, settings.initial_labels.value_or(RegimeField(base.element_count(), settings.initial)));

  std::vector<std::vector<ElementLabel>> label_history{report.initial.base_labels};
  for (int i = 1; i <= settings.max_outer; ++i) {
    const Configuration& current = report.final_configuration();
    PicardResult pr;
    try {
      pr = picard_solve(current.mesh, current.regimes, law, network, picard, exec);
    } catch (const SingularSystemError& e) {
      throw SingularSystemError("outer iteration " + std::to_string(i) + ": " + e.what());
    } catch (const std::exception& e) {
      throw Error("outer iteration " + std::to_string(i) + ": " + e.what());
    }

    IterationRecord rec;
    rec.configuration = build_configuration(
        base, classify_base_elements(pr.solution, base, law.threshold, settings.eps_gamma, exec), i);
    rec.distance = configuration_distance(rec.configuration.interfaces, current.interfaces);
    rec.inner_iterations = pr.iterations;
    rec.picard_converged = pr.converged;
    rec.junction_pressure_jump = junction_pressure_jump(pr.solution, network);
    rec.solution = pr.solution;

    // Empty interface sets are at distance 0 even when whole elements change
    // regime, so a pure-label flip also blocks convergence.
    const std::vector<ElementLabel> labels = rec.configuration.base_labels;
    const auto& prev = label_history.back();
    bool flipped = false;
    for (std::size_t g = 0; g < labels.size(); ++g)
      if (labels[g].pure() && prev[g].pure() && labels[g].left != prev[g].left) flipped = true;

    report.inner_iteration_counts.push_back(pr.iterations);
    report.final_solution = std::move(pr.solution);
    report.outer_iterations = i;
    const double distance = rec.distance;
    report.history.push_back(std::move(rec));

    if (distance <= eps_omega && !flipped) {
      report.status = TrackerStatus::Converged;
      return report;
    }
    // label_history ends with the labels of the previous configuration (lag 1).
    if (labels != prev) {
      const auto lags = std::min<std::size_t>(static_cast<std::size_t>(settings.oscillation_window),
                                              label_history.size());
      for (std::size_t k = 2; k <= lags; ++k) {
        if (labels == label_history[label_history.size() - k]) {
          report.status = TrackerStatus::Oscillating;
          report.period = static_cast<int>(k);
          return report;
        }
      }
    }
    label_history.push_back(labels);
  }
  report.status = TrackerStatus::MaxIterationsReached;
  return report;
}

}  // namespace dfn
