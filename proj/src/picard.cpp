#include "dfn/picard.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dfn {

std::vector<double> midpoint_speeds(const Solution& solution) {
  std::vector<double> speeds;
  speeds.reserve(solution.mesh.element_count());
  for (const auto& u : solution.flux)
    for (std::size_t e = 0; e + 1 < u.size(); ++e) speeds.push_back(std::abs(0.5 * (u[e] + u[e + 1])));
  return speeds;
}

PicardResult picard_solve(const Mesh& mesh, const RegimeField& regimes, const AdaptiveLaw& law,
                          const FractureNetwork& network, const PicardSettings& settings, Execution exec) {
  if (!(settings.tolerance > 0.0)) throw std::invalid_argument("picard: tolerance must be positive");
  if (settings.max_iterations < 1) throw std::invalid_argument("picard: max iterations must be >= 1");

  std::vector<double> speed = settings.initial_speed;
  if (speed.empty()) speed.assign(mesh.element_count(), 0.0);

  const bool linear = std::all_of(regimes.begin(), regimes.end(),
                                  [&law](Regime r) { return law.branch(r).is_constant(); });

  PicardResult result;
  Eigen::VectorXd previous;
  for (int k = 1; k <= settings.max_iterations; ++k) {
    result.solution = solve_saddle(assemble(mesh, regimes, law, speed, network, exec));
    result.iterations = k;
    if (linear) {
      result.update_history.push_back(0.0);
      result.converged = true;
      return result;
    }
    const Eigen::VectorXd x = result.solution.stacked();
    const double norm = x.norm();
    const double diff = previous.size() == 0 ? norm : (x - previous).norm();
    const double update = norm > 0.0 ? diff / norm : 0.0;
    result.update_history.push_back(update);
    if (update <= settings.tolerance) {
      result.converged = true;
      return result;
    }
    previous = x;
    speed = midpoint_speeds(result.solution);
  }
  return result;
}

}  // namespace dfn
