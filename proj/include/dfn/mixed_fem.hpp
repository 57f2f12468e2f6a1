#pragma once

#include "dfn/execution.hpp"
#include "dfn/geometry.hpp"
#include "dfn/laws.hpp"

#include <Eigen/Dense>

#include <array>
#include <vector>

namespace dfn {

/// One regime label per global mesh element.
using RegimeField = std::vector<Regime>;

/// Local contribution of one element: 2x2 flux mass block, nodal force load
/// and source integral.
struct ElementBlock {
  double coefficient = 0.0;
  std::array<double, 3> mass{};  // (0,0), (0,1) = (1,0), (1,1)
  std::array<double, 2> load{};
  double source = 0.0;
};

/// Unknown layout: node fluxes (per branch, node_offset order), element
/// pressures, junction pressures, then the mean-pressure multiplier if active.
struct SaddleSystem {
  Mesh mesh;
  Eigen::MatrixXd matrix;
  Eigen::VectorXd rhs;
  std::vector<double> coefficients;
  std::size_t flux_count = 0;
  std::size_t pressure_count = 0;
  std::size_t junction_count = 0;
  bool mean_constraint = false;
  double mean_target = 0.0;

  std::size_t pressure_index(std::size_t element) const { return flux_count + element; }
  std::size_t junction_index(std::size_t j) const { return flux_count + pressure_count + j; }
};

struct Solution {
  Mesh mesh;
  /// Nodal flux per branch, signed along the branch tangent.
  std::vector<std::vector<double>> flux;
  /// One value per global element.
  std::vector<double> pressure;
  std::vector<double> junction_pressure;
  /// Frozen law coefficient per element used for this solve.
  std::vector<double> coefficients;
  /// ||A x - b||_inf / ||b||_inf.
  double residual = 0.0;

  /// Linear interpolant of the nodal flux; exact nodal values at nodes.
  double flux_at(std::size_t branch, double s) const;
  /// Fluxes then pressures then junction pressures.
  Eigen::VectorXd stacked() const;
};

std::vector<ElementBlock> element_blocks(const Mesh& mesh, const RegimeField& regimes, const AdaptiveLaw& law,
                                         const std::vector<double>& frozen_speed, const FractureNetwork& network,
                                         Execution exec = Execution::Parallel);

/// Throws SingularSystemError on a non-positive frozen coefficient.
SaddleSystem assemble(const Mesh& mesh, const RegimeField& regimes, const AdaptiveLaw& law,
                      const std::vector<double>& frozen_speed, const FractureNetwork& network,
                      Execution exec = Execution::Parallel);

/// Dense partial-pivot LU. Throws SingularSystemError when the reciprocal
/// condition estimate is below 1e-14 or the residual exceeds 1e-10.
Solution solve_saddle(const SaddleSystem& system);

/// Constant tangential gradient of the linear extension of the pressure data on
/// branch b: (p(L) - p(0)) / L when both ends carry pressure data, 0 otherwise.
double lift_pressure_data(const FractureNetwork& network, std::size_t branch);

/// Element mass defect u(e2) - u(e1) - int_E q, maximum absolute value.
double mass_balance_defect(const Solution& solution, const FractureNetwork& network);

/// Junction outward-flux sums, one per intersection.
std::vector<double> junction_flux_sums(const Solution& solution, const FractureNetwork& network);

/// Pressure at each incident branch end of each junction, recovered from that
/// branch's own flux equation. Continuity means these agree within a junction.
std::vector<std::vector<double>> junction_end_pressures(const Solution& solution, const FractureNetwork& network);

/// Largest spread of junction_end_pressures over all junctions.
double junction_pressure_jump(const Solution& solution, const FractureNetwork& network);

}  // namespace dfn
