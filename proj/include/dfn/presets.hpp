#pragma once

#include "dfn/bundle.hpp"
#include "dfn/config.hpp"
#include "dfn/tracker.hpp"

#include <functional>
#include <string>
#include <vector>

namespace dfn {

/// Case 1: one fracture (0,0.5)-(1,0.5), piecewise q, tangential force 0.05,
/// zero pressure at both ends.
ProblemSpec case1_spec(bool nonlinear);

/// Case 1 variant used for the k2 sweep: f = 0, p(0) = 0, p(1) = 0.2,
/// low law lambda = 1, high law lambda = 1 / k2.
ProblemSpec k2_variant_spec(double k2);

/// Case 2: two crossing fractures meeting at (0.5, 0.5).
ProblemSpec case2_spec(bool nonlinear);

/// Case 3: six-fracture network from data/case3_network.json (approximate geometry).
ProblemSpec case3_spec(bool nonlinear);

std::filesystem::path data_dir();

const std::vector<std::string>& preset_names();

/// k2 in 0.25 * sqrt(2)^j for j = 0..12, plus 0.5625 and 10.
std::vector<double> default_k2_grid();

/// Tolerances of the nonlinear table, loosest first; the last one is the reference.
std::vector<double> nl_tolerances();

TrackerSettings tracker_settings(const ProblemSpec& spec);
PicardSettings picard_settings(const ProblemSpec& spec);

TrackerReport solve(const ProblemSpec& spec, Execution exec = Execution::Parallel);

/// Runs one problem; engine errors are recorded in the run instead of thrown.
/// The full report is copied to `report_out` when the run succeeds.
RunRecord run_problem(const ProblemSpec& spec, const std::string& label, bool trace,
                      TrackerReport* report_out = nullptr);

/// Energy summary of a single-branch problem with pressure data at both ends.
EnergyRecord energy_summary(const ProblemSpec& spec, const Solution& solution, const std::string& label);

/// Problem hook applied to every spec a preset builds (CLI overrides).
using SpecAdjust = std::function<void(ProblemSpec&)>;

ResultBundle run_spec(const ProblemSpec& spec);
ResultBundle sweep_k2(const ProblemSpec& base, const std::vector<double>& k2_values, const SpecAdjust& adjust = {});
ResultBundle nl_tolerance_table(const SpecAdjust& adjust = {});
ResultBundle run_preset(const std::string& name, const SpecAdjust& adjust = {});

/// Base-mesh samples used by the tolerance table: u at base nodes, p at base
/// element midpoints. Working meshes differ between runs, the base mesh does not.
struct BaseSamples {
  std::vector<double> flux;
  std::vector<double> pressure;
};
BaseSamples sample_on_base(const Solution& solution, const Mesh& base);

/// True when High-labelled elements of the configuration connect the element
/// touching `from` with the element touching any end in `to`.
bool high_path_exists(const Configuration& configuration, const FractureNetwork& network, const BranchEndRef& from,
                      const std::vector<BranchEndRef>& to);

}  // namespace dfn
