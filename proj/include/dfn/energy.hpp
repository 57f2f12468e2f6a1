#pragma once

#include "dfn/mixed_fem.hpp"

#include <cstdint>
#include <string>

namespace dfn {

/// A particular flux carrying the source and boundary-flux data on a single
/// branch: u_hat(x) = int_0^x q, shifted to match a velocity condition when
/// one exists (the start end takes precedence).
struct LiftedField {
  Mesh mesh;
  std::vector<double> values;

  double at(double s) const;
};

/// Throws ScopeError for multi-branch networks.
LiftedField lift_field(const FractureNetwork& network, const Mesh& mesh);

struct EnergyReport {
  double dissipation = 0.0;
  double energy = 0.0;
  double f0 = 0.0;
  std::string quadrature = "gauss3-kinksplit";
};

/// int_E threshold^2 Psi(u^2 / threshold^2) for u linear from u1 to u2 over
/// length h, split where u crosses -threshold, 0 and threshold.
double segment_dissipation(const PsiPotential& psi, double u1, double u2, double h);

/// D and E = D - int f0 u for a nodal flux on a single-branch mesh, with
/// f0 = f.t - grad(E p0) from the linear pressure extension.
EnergyReport energy_of(const std::vector<double>& field, const Mesh& mesh, const FractureNetwork& network,
                       const PsiPotential& psi);

struct GridSpec {
  double alpha_max = 10.0;
  int points = 100000;
  double tolerance = 1e-10;
};

struct MinimizeResult {
  double alpha_star = 0.0;
  double energy = 0.0;
  /// Refined local minima of the grid profile, ascending in alpha.
  std::vector<double> local_minima;
  /// Local minima within 1e-8 of the global value.
  std::vector<double> near_global;
  std::vector<double> profile_alpha;
  std::vector<double> profile_energy;
  /// True when a velocity condition leaves only the zero perturbation.
  bool trivial_space = false;
};

/// E(alpha) = D(alpha + u_hat) - int f0 (alpha + u_hat) evaluated at each alpha.
std::vector<double> energy_profile(const LiftedField& lifted, double f0, const PsiPotential& psi,
                                   const std::vector<double>& alphas, Execution exec = Execution::Parallel);

/// Grid search over [-alpha_max, alpha_max] then golden-section refinement of
/// every grid-local minimum.
MinimizeResult reduce_and_minimize(const FractureNetwork& network, const Mesh& mesh, const PsiPotential& psi,
                                   const GridSpec& grid = {}, Execution exec = Execution::Parallel);

/// Energy of a nodal flux on a whole network, with the pressure data entering
/// as the boundary functional sum p0 u.n. On a single branch it differs from
/// energy_of by a constant on each affine family alpha + u_hat.
double network_energy(const Mesh& mesh, const std::vector<std::vector<double>>& flux,
                      const FractureNetwork& network, const PsiPotential& psi);

struct ProbeReport {
  int directions = 0;
  int decreasing = 0;
  double fraction = 0.0;
  /// Dimension of the discrete space of admissible perturbations.
  int space_dimension = 0;
  double most_negative_change = 0.0;
};

/// Perturbs by per-branch constants that keep junction balance and vanish on
/// branches touching a velocity condition. A direction counts as decreasing
/// when any step in {scale, scale/2, scale/4} lowers E by more than 1e-10.
ProbeReport local_minimality_probe(const Solution& solution, const FractureNetwork& network,
                                   const PsiPotential& psi, int perturbations, double scale, std::uint64_t seed);

}  // namespace dfn
