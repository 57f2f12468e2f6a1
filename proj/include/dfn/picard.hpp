#pragma once

#include "dfn/mixed_fem.hpp"

namespace dfn {

struct PicardSettings {
  double tolerance = 1e-4;
  int max_iterations = 50;
  /// Per-element speed for the first linearization; empty means zero.
  std::vector<double> initial_speed;
};

struct PicardResult {
  Solution solution;
  int iterations = 0;
  std::vector<double> update_history;
  bool converged = false;
};

/// Fixed-regime nonlinear solve. One iteration is one assemble + solve; the
/// update is ||x_k - x_{k-1}|| / ||x_k|| on the stacked solution with x_0 = 0.
/// When every element's law branch is Constant the first solve is exact and the
/// loop stops there with update 0.
PicardResult picard_solve(const Mesh& mesh, const RegimeField& regimes, const AdaptiveLaw& law,
                          const FractureNetwork& network, const PicardSettings& settings,
                          Execution exec = Execution::Parallel);

/// |u| at the element midpoints of a solution.
std::vector<double> midpoint_speeds(const Solution& solution);

}  // namespace dfn
