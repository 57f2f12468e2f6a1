#include "dfn/presets.hpp"

#include "dfn/energy.hpp"
#include "dfn/error.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <deque>
#include <sstream>

namespace dfn {

namespace {

constexpr double kThreshold = 0.15;

AdaptiveLaw linear_law(double k1, double k2) {
  return {LawBranch::constant(1.0 / k1), LawBranch::constant(1.0 / k2), kThreshold};
}

AdaptiveLaw forchheimer_law(double beta1) {
  return {LawBranch::constant(1.0), LawBranch::affine(0.01, beta1), kThreshold};
}

BranchSource case1_source(double offset, double length) {
  // q = 1 on x <= 0.3, -1 on (0.3, 0.7), 1 on x >= 0.7, restricted to [offset, offset + length].
  BranchSource src;
  const double cuts[] = {0.3, 0.7};
  const double vals[] = {1.0, -1.0, 1.0};
  std::size_t piece = 0;
  while (piece < 2 && cuts[piece] <= offset) ++piece;
  src.values.push_back(vals[piece]);
  for (std::size_t k = piece; k < 2 && cuts[k] < offset + length; ++k) {
    src.breakpoints.push_back(cuts[k] - offset);
    src.values.push_back(vals[k + 1]);
  }
  return src;
}

ProblemSpec base_spec(std::string name) {
  ProblemSpec spec;
  spec.name = std::move(name);
  return spec;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt_param(double v) {
  std::ostringstream s;
  s.precision(6);
  s << v;
  return s.str();
}

bool both_ends_pressure(const FractureNetwork& network) {
  if (network.branches.size() != 1) return false;
  for (BranchEnd end : {BranchEnd::Start, BranchEnd::End}) {
    const auto* c = network.condition_at(0, end);
    if (!c || !std::holds_alternative<PressureBC>(*c)) return false;
  }
  return true;
}

}  // namespace

ProblemSpec case1_spec(bool nonlinear) {
  ProblemSpec spec = base_spec(nonlinear ? "case1-nonlinear" : "case1-linear");
  auto& net = spec.network;
  net.branches = {{"fracture", {0.0, 0.5}, {1.0, 0.5}}};
  net.boundary.conditions = {{{"fracture", BranchEnd::Start}, PressureBC{0.0}},
                             {{"fracture", BranchEnd::End}, PressureBC{0.0}}};
  net.sources.scalar = {{"fracture", case1_source(0.0, 1.0)}};
  net.sources.force = {0.05, 0.0};
  spec.law = nonlinear ? forchheimer_law(3.0) : linear_law(1.0, 10.0);
  return spec;
}

ProblemSpec k2_variant_spec(double k2) {
  ProblemSpec spec = case1_spec(false);
  spec.name = "k2-variant";
  spec.network.sources.force = {0.0, 0.0};
  spec.network.boundary.conditions[1].condition = PressureBC{0.2};
  spec.law = linear_law(1.0, k2);
  return spec;
}

ProblemSpec case2_spec(bool nonlinear) {
  ProblemSpec spec = base_spec(nonlinear ? "case2-nonlinear" : "case2-linear");
  auto& net = spec.network;
  net.branches = {{"h-left", {0.0, 0.5}, {0.5, 0.5}},
                  {"h-right", {0.5, 0.5}, {1.0, 0.5}},
                  {"v-bottom", {0.5, 0.0}, {0.5, 0.5}},
                  {"v-top", {0.5, 0.5}, {0.5, 1.0}}};
  net.intersections = {{"center",
                        {0.5, 0.5},
                        {{"h-left", BranchEnd::End},
                         {"h-right", BranchEnd::Start},
                         {"v-bottom", BranchEnd::End},
                         {"v-top", BranchEnd::Start}}}};
  net.boundary.conditions = {{{"h-left", BranchEnd::Start}, PressureBC{0.0}},
                             {{"h-right", BranchEnd::End}, PressureBC{0.1}},
                             {{"v-bottom", BranchEnd::Start}, PressureBC{0.1}},
                             {{"v-top", BranchEnd::End}, PressureBC{0.1}}};
  net.sources.scalar = {{"h-left", case1_source(0.0, 0.5)},
                        {"h-right", case1_source(0.5, 0.5)},
                        {"v-bottom", case1_source(0.0, 0.5)},
                        {"v-top", case1_source(0.5, 0.5)}};
  spec.law = nonlinear ? forchheimer_law(3.0) : linear_law(1.0, 10.0);
  return spec;
}

std::filesystem::path data_dir() {
  if (const char* env = std::getenv("DFN_DATA_DIR")) return env;
  return DFN_DATA_DIR;
}

ProblemSpec case3_spec(bool nonlinear) {
  nlohmann::json doc = {{"name", nonlinear ? "case3-nonlinear" : "case3-linear"},
                        {"networkFile", "case3_network.json"},
                        {"law", serialize_law(nonlinear ? forchheimer_law(0.25) : linear_law(1.0, 10.0))}};
  return parse_config(doc, data_dir());
}

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names{"case1-linear", "case1-nonlinear", "case2-linear",
                                              "case2-nonlinear", "case3-linear", "case3-nonlinear",
                                              "k2-sweep", "nl-tolerance-table"};
  return names;
}

std::vector<double> default_k2_grid() {
  std::vector<double> grid;
  for (int j = 0; j <= 12; ++j) grid.push_back(0.25 * std::pow(2.0, 0.5 * j));
  grid.push_back(0.5625);
  grid.push_back(10.0);
  std::sort(grid.begin(), grid.end());
  return grid;
}

std::vector<double> nl_tolerances() { return {1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-8, 1e-12}; }

TrackerSettings tracker_settings(const ProblemSpec& spec) {
  TrackerSettings ts;
  ts.eps_gamma = spec.solver.eps_gamma;
  ts.eps_omega = spec.solver.eps_omega;
  ts.max_outer = spec.solver.max_outer;
  ts.initial = spec.solver.initial == InitialConfiguration::AllHigh ? Regime::High : Regime::Low;
  if (spec.solver.initial == InitialConfiguration::FromFile) ts.initial_labels = spec.solver.initial_labels;
  return ts;
}

PicardSettings picard_settings(const ProblemSpec& spec) {
  PicardSettings ps;
  ps.tolerance = spec.solver.eps_nl;
  ps.max_iterations = spec.solver.max_nonlinear;
  return ps;
}

TrackerReport solve(const ProblemSpec& spec, Execution exec) {
  return track(spec.network, spec.law, spec.solver.h, picard_settings(spec), tracker_settings(spec), exec);
}

RunRecord run_problem(const ProblemSpec& spec, const std::string& label, bool trace, TrackerReport* report_out) {
  const auto t0 = std::chrono::steady_clock::now();
  RunRecord run;
  try {
    TrackerReport report = solve(spec);
    run = make_run_record(label, report, spec.network, trace);
    if (report_out) *report_out = std::move(report);
  } catch (const std::exception& e) {
    run.label = label;
    run.status = "error";
    run.error = e.what();
  }
  run.seconds = seconds_since(t0);
  return run;
}

EnergyRecord energy_summary(const ProblemSpec& spec, const Solution& solution, const std::string& label) {
  const PsiPotential psi = build_psi(spec.law);
  const EnergyReport rep = energy_of(solution.flux[0], solution.mesh, spec.network, psi);
  const MinimizeResult min = reduce_and_minimize(spec.network, solution.mesh, psi);
  const LiftedField lifted = lift_field(spec.network, solution.mesh);
  double mean = 0.0;
  for (std::size_t i = 0; i < lifted.values.size(); ++i) mean += solution.flux[0][i] - lifted.values[i];
  mean /= static_cast<double>(lifted.values.size());
  return {label, rep.dissipation, rep.energy, rep.f0, rep.quadrature, min.alpha_star, min.energy, mean};
}

ResultBundle run_spec(const ProblemSpec& spec) {
  const auto t0 = std::chrono::steady_clock::now();
  ResultBundle bundle;
  bundle.preset = spec.name;
  TrackerReport report;
  bundle.runs.push_back(run_problem(spec, spec.name, spec.output.trace, &report));
  if (both_ends_pressure(spec.network) && bundle.runs.back().status != "error")
    bundle.energy.push_back(energy_summary(spec, report.final_solution, spec.name));
  bundle.seconds = seconds_since(t0);
  return bundle;
}

ResultBundle sweep_k2(const ProblemSpec& base, const std::vector<double>& k2_values, const SpecAdjust& adjust) {
  const auto t0 = std::chrono::steady_clock::now();
  ResultBundle bundle;
  bundle.preset = "k2-sweep";
  for (double k2 : k2_values) {
    ProblemSpec spec = base;
    spec.law.high = LawBranch::constant(1.0 / k2);
    if (adjust) adjust(spec);
    RunRecord run = run_problem(spec, "k2=" + fmt_param(k2), spec.output.trace);
    run.parameters["k2"] = k2;
    bundle.runs.push_back(std::move(run));
  }
  bundle.seconds = seconds_since(t0);
  return bundle;
}

BaseSamples sample_on_base(const Solution& solution, const Mesh& base) {
  BaseSamples out;
  for (std::size_t br = 0; br < base.branch_count(); ++br) {
    const auto& bm = base.branch(br);
    const auto& wm = solution.mesh.branch(br);
    for (double s : bm.nodes) out.flux.push_back(solution.flux_at(br, s));
    for (std::size_t e = 0; e < bm.element_count(); ++e)
      out.pressure.push_back(solution.pressure[solution.mesh.element_offset(br) + wm.locate(bm.midpoint(e))]);
  }
  return out;
}

ResultBundle nl_tolerance_table(const SpecAdjust& adjust) {
  const auto t0 = std::chrono::steady_clock::now();
  ResultBundle bundle;
  bundle.preset = "nl-tolerance-table";
  const auto tolerances = nl_tolerances();

  std::vector<TrackerReport> reports;
  std::vector<ProblemSpec> specs;
  for (double tol : tolerances) {
    ProblemSpec spec = case1_spec(true);
    if (adjust) adjust(spec);
    spec.solver.eps_nl = tol;
    const auto t_run = std::chrono::steady_clock::now();
    RunRecord run;
    try {
      reports.push_back(solve(spec));
      run = make_run_record("eps_nl=" + fmt_param(tol), reports.back(), spec.network, spec.output.trace);
    } catch (const std::exception& e) {
      run.label = "eps_nl=" + fmt_param(tol);
      run.status = "error";
      run.error = e.what();
    }
    run.parameters["eps_nl"] = tol;
    run.seconds = seconds_since(t_run);
    bundle.runs.push_back(std::move(run));
    specs.push_back(std::move(spec));
  }
  if (reports.size() != tolerances.size()) {
    bundle.seconds = seconds_since(t0);
    return bundle;
  }

  const Mesh base = build_mesh(specs.back().network, specs.back().solver.h);
  const BaseSamples ref = sample_on_base(reports.back().final_solution, base);
  auto rel = [](const std::vector<double>& x, const std::vector<double>& r) {
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      num += (x[i] - r[i]) * (x[i] - r[i]);
      den += r[i] * r[i];
    }
    return std::sqrt(num) / std::sqrt(den);
  };
  for (std::size_t k = 0; k < tolerances.size(); ++k) {
    const BaseSamples s = sample_on_base(reports[k].final_solution, base);
    bundle.table.push_back({tolerances[k], reports[k].outer_iterations, reports[k].inner_iteration_counts.back(),
                            rel(s.pressure, ref.pressure), rel(s.flux, ref.flux)});
  }
  bundle.seconds = seconds_since(t0);
  return bundle;
}

ResultBundle run_preset(const std::string& name, const SpecAdjust& adjust) {
  auto build = [&adjust](ProblemSpec spec) {
    if (adjust) adjust(spec);
    return spec;
  };
  if (name == "case1-linear" || name == "case1-nonlinear") {
    const bool nonlinear = name == "case1-nonlinear";
    ResultBundle bundle = run_spec(build(case1_spec(nonlinear)));
    bundle.preset = name;
    return bundle;
  }
  if (name == "case2-linear" || name == "case2-nonlinear") {
    ResultBundle bundle = run_spec(build(case2_spec(name == "case2-nonlinear")));
    bundle.preset = name;
    return bundle;
  }
  if (name == "case3-linear" || name == "case3-nonlinear") {
    ResultBundle bundle = run_spec(build(case3_spec(name == "case3-nonlinear")));
    bundle.preset = name;
    return bundle;
  }
  if (name == "k2-sweep") return sweep_k2(k2_variant_spec(1.0), default_k2_grid(), adjust);
  if (name == "nl-tolerance-table") return nl_tolerance_table(adjust);
  throw ConfigError("unknown preset '" + name + "'");
}

bool high_path_exists(const Configuration& configuration, const FractureNetwork& network, const BranchEndRef& from,
                      const std::vector<BranchEndRef>& to) {
  const Mesh& mesh = configuration.mesh;
  auto end_element = [&](const BranchEndRef& ref) {
    const std::size_t br = *network.branch_index(ref.branch);
    return mesh.element_offset(br) + (ref.end == BranchEnd::Start ? 0 : mesh.branch(br).element_count() - 1);
  };
  const std::size_t n = mesh.element_count();
  std::vector<std::vector<std::size_t>> adj(n);
  for (std::size_t br = 0; br < mesh.branch_count(); ++br) {
    const std::size_t off = mesh.element_offset(br);
    for (std::size_t e = 1; e < mesh.branch(br).element_count(); ++e) {
      adj[off + e - 1].push_back(off + e);
      adj[off + e].push_back(off + e - 1);
    }
  }
  for (const auto& inter : network.intersections)
    for (const auto& a : inter.incident)
      for (const auto& b : inter.incident)
        if (&a != &b) adj[end_element(a)].push_back(end_element(b));

  const auto high = [&](std::size_t g) { return configuration.regimes[g] == Regime::High; };
  const std::size_t start = end_element(from);
  if (!high(start)) return false;
  std::vector<bool> seen(n, false);
  std::deque<std::size_t> queue{start};
  seen[start] = true;
  while (!queue.empty()) {
    const std::size_t g = queue.front();
    queue.pop_front();
    for (const auto& target : to)
      if (end_element(target) == g) return true;
    for (std::size_t nb : adj[g])
      if (!seen[nb] && high(nb)) {
        seen[nb] = true;
        queue.push_back(nb);
      }
  }
  return false;
}

}  // namespace dfn
