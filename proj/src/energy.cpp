#include "dfn/energy.hpp"

#include "dfn/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <random>

namespace dfn {

double LiftedField::at(double s) const {
  const auto& bm = mesh.branch(0);
  const std::size_t e = bm.locate(s);
  const double t = (s - bm.nodes[e]) / bm.element_length(e);
  return (1.0 - t) * values[e] + t * values[e + 1];
}

LiftedField lift_field(const FractureNetwork& network, const Mesh& mesh) {
  if (network.branches.size() != 1 || mesh.branch_count() != 1)
    throw ScopeError("energy analysis supports single-branch networks only");
  const auto& bm = mesh.branch(0);
  const auto* src = network.sources.find(network.branches[0].id);

  LiftedField out{mesh, std::vector<double>(bm.nodes.size(), 0.0)};
  for (std::size_t i = 1; i < bm.nodes.size(); ++i)
    out.values[i] = out.values[i - 1] + (src ? src->integral(bm.nodes[i - 1], bm.nodes[i]) : 0.0);

  double shift = 0.0;
  const auto* start = network.condition_at(0, BranchEnd::Start);
  const auto* end = network.condition_at(0, BranchEnd::End);
  if (const auto* v = start ? std::get_if<VelocityBC>(start) : nullptr)
    shift = -v->outward_flux;
  else if (const auto* w = end ? std::get_if<VelocityBC>(end) : nullptr)
    shift = w->outward_flux - out.values.back();
  for (double& v : out.values) v += shift;
  return out;
}

double segment_dissipation(const PsiPotential& psi, double u1, double u2, double h) {
  static constexpr std::array<double, 3> xi{-0.7745966692414834, 0.0, 0.7745966692414834};
  static constexpr std::array<double, 3> wi{5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
  const double t = psi.threshold();

  std::array<double, 5> cuts{0.0, 1.0, 1.0, 1.0, 1.0};
  std::size_t n = 1;
  if (u1 != u2) {
    for (double level : {-t, 0.0, t}) {
      const double s = (level - u1) / (u2 - u1);
      if (s > 0.0 && s < 1.0) cuts[n++] = s;
    }
  }
  cuts[n] = 1.0;
  std::sort(cuts.begin(), cuts.begin() + static_cast<std::ptrdiff_t>(n));

  double total = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double a = cuts[k];
    const double b = cuts[k + 1];
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    double sum = 0.0;
    for (std::size_t g = 0; g < 3; ++g) {
      const double s = mid + half * xi[g];
      sum += wi[g] * psi.density((1.0 - s) * u1 + s * u2);
    }
    total += half * sum;
  }
  return total * h;
}

namespace {

double branch_force(const FractureNetwork& network) {
  return network.tangential_force(0) - lift_pressure_data(network, 0);
}

double profile_point(const LiftedField& lifted, double f0, const PsiPotential& psi, double alpha) {
  const auto& bm = lifted.mesh.branch(0);
  double d = 0.0;
  double load = 0.0;
  for (std::size_t e = 0; e < bm.element_count(); ++e) {
    const double h = bm.element_length(e);
    const double u1 = alpha + lifted.values[e];
    const double u2 = alpha + lifted.values[e + 1];
    d += segment_dissipation(psi, u1, u2, h);
    load += 0.5 * h * (u1 + u2);
  }
  return d - f0 * load;
}

double golden_section(const std::function<double(double)>& f, double lo, double hi, double tol) {
  const double inv_phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = hi - inv_phi * (hi - lo);
  double d = lo + inv_phi * (hi - lo);
  double fc = f(c);
  double fd = f(d);
  while (hi - lo > tol) {
    if (fc <= fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - inv_phi * (hi - lo);
      fc = f(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + inv_phi * (hi - lo);
      fd = f(d);
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

EnergyReport energy_of(const std::vector<double>& field, const Mesh& mesh, const FractureNetwork& network,
                       const PsiPotential& psi) {
  if (network.branches.size() != 1 || mesh.branch_count() != 1)
    throw ScopeError("energy analysis supports single-branch networks only");
  const auto& bm = mesh.branch(0);
  if (field.size() != bm.nodes.size()) throw std::invalid_argument("energy_of: field does not match the mesh");
  EnergyReport rep;
  rep.f0 = branch_force(network);
  double load = 0.0;
  for (std::size_t e = 0; e < bm.element_count(); ++e) {
    const double h = bm.element_length(e);
    rep.dissipation += segment_dissipation(psi, field[e], field[e + 1], h);
    load += 0.5 * h * (field[e] + field[e + 1]);
  }
  rep.energy = rep.dissipation - rep.f0 * load;
  return rep;
}

std::vector<double> energy_profile(const LiftedField& lifted, double f0, const PsiPotential& psi,
                                   const std::vector<double>& alphas, Execution exec) {
  std::vector<double> out(alphas.size());
  if (exec == Execution::Parallel) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(alphas.size()); ++i)
      out[static_cast<std::size_t>(i)] = profile_point(lifted, f0, psi, alphas[static_cast<std::size_t>(i)]);
  } else {
    for (std::size_t i = 0; i < alphas.size(); ++i) out[i] = profile_point(lifted, f0, psi, alphas[i]);
  }
  return out;
}

MinimizeResult reduce_and_minimize(const FractureNetwork& network, const Mesh& mesh, const PsiPotential& psi,
                                   const GridSpec& grid, Execution exec) {
  if (grid.points < 3 || !(grid.alpha_max > 0.0) || !(grid.tolerance > 0.0))
    throw std::invalid_argument("reduce_and_minimize: bad grid specification");
  const LiftedField lifted = lift_field(network, mesh);
  const double f0 = branch_force(network);

  MinimizeResult res;
  bool velocity_bc = false;
  for (const auto& bc : network.boundary.conditions)
    if (std::holds_alternative<VelocityBC>(bc.condition)) velocity_bc = true;
  if (velocity_bc) {
    res.trivial_space = true;
    res.energy = profile_point(lifted, f0, psi, 0.0);
    res.local_minima = res.near_global = {0.0};
    return res;
  }

  const auto n = static_cast<std::size_t>(grid.points);
  res.profile_alpha.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    res.profile_alpha[i] = -grid.alpha_max + 2.0 * grid.alpha_max * static_cast<double>(i) / static_cast<double>(n - 1);
  res.profile_energy = energy_profile(lifted, f0, psi, res.profile_alpha, exec);
  const auto& a = res.profile_alpha;
  const auto& E = res.profile_energy;

  auto f = [&](double alpha) { return profile_point(lifted, f0, psi, alpha); };
  std::vector<std::pair<double, double>> minima;
  for (std::size_t i = 0; i < n; ++i) {
    const bool left_ok = i == 0 || E[i] < E[i - 1];
    const bool right_ok = i + 1 == n || E[i] <= E[i + 1];
    if (!left_ok || !right_ok) continue;
    const double lo = a[i == 0 ? 0 : i - 1];
    const double hi = a[i + 1 == n ? n - 1 : i + 1];
    const double x = golden_section(f, lo, hi, grid.tolerance);
    minima.emplace_back(x, f(x));
  }
  res.energy = std::numeric_limits<double>::infinity();
  for (const auto& [x, e] : minima) {
    res.local_minima.push_back(x);
    if (e < res.energy) {
      res.energy = e;
      res.alpha_star = x;
    }
  }
  for (const auto& [x, e] : minima)
    if (e - res.energy <= 1e-8) res.near_global.push_back(x);
  return res;
}

double network_energy(const Mesh& mesh, const std::vector<std::vector<double>>& flux,
                      const FractureNetwork& network, const PsiPotential& psi) {
  double total = 0.0;
  for (std::size_t br = 0; br < mesh.branch_count(); ++br) {
    const auto& bm = mesh.branch(br);
    const auto& u = flux[br];
    const double f = network.tangential_force(br);
    for (std::size_t e = 0; e < bm.element_count(); ++e) {
      const double h = bm.element_length(e);
      total += segment_dissipation(psi, u[e], u[e + 1], h) - f * 0.5 * h * (u[e] + u[e + 1]);
    }
    for (BranchEnd end : {BranchEnd::Start, BranchEnd::End}) {
      const auto* cond = network.condition_at(br, end);
      const auto* p = cond ? std::get_if<PressureBC>(cond) : nullptr;
      if (!p) continue;
      const double un = end == BranchEnd::Start ? -u.front() : u.back();
      total += p->pressure * un;
    }
  }
  return total;
}

ProbeReport local_minimality_probe(const Solution& solution, const FractureNetwork& network,
                                   const PsiPotential& psi, int perturbations, double scale, std::uint64_t seed) {
  if (!(scale > 0.0)) throw std::invalid_argument("local_minimality_probe: scale must be positive");
  const auto nb = static_cast<Eigen::Index>(network.branches.size());

  std::vector<Eigen::RowVectorXd> rows;
  for (const auto& inter : network.intersections) {
    Eigen::RowVectorXd r = Eigen::RowVectorXd::Zero(nb);
    for (const auto& ref : inter.incident)
      r[static_cast<Eigen::Index>(*network.branch_index(ref.branch))] += ref.end == BranchEnd::End ? 1.0 : -1.0;
    rows.push_back(r);
  }
  for (const auto& bc : network.boundary.conditions) {
    if (!std::holds_alternative<VelocityBC>(bc.condition)) continue;
    Eigen::RowVectorXd r = Eigen::RowVectorXd::Zero(nb);
    r[static_cast<Eigen::Index>(*network.branch_index(bc.where.branch))] = 1.0;
    rows.push_back(r);
  }
  Eigen::MatrixXd basis;
  if (rows.empty()) {
    basis = Eigen::MatrixXd::Identity(nb, nb);
  } else {
    Eigen::MatrixXd C(static_cast<Eigen::Index>(rows.size()), nb);
    for (std::size_t i = 0; i < rows.size(); ++i) C.row(static_cast<Eigen::Index>(i)) = rows[i];
    Eigen::FullPivLU<Eigen::MatrixXd> lu(C);
    basis = lu.rank() == nb ? Eigen::MatrixXd(nb, 0) : Eigen::MatrixXd(lu.kernel());
  }

  ProbeReport rep;
  rep.space_dimension = static_cast<int>(basis.cols());
  if (basis.cols() == 0 || perturbations <= 0) return rep;

  const double base_energy = network_energy(solution.mesh, solution.flux, network, psi);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int k = 0; k < perturbations; ++k) {
    Eigen::VectorXd w(basis.cols());
    for (Eigen::Index i = 0; i < w.size(); ++i) w[i] = normal(rng);
    Eigen::VectorXd dir = basis * w;
    const double m = dir.lpNorm<Eigen::Infinity>();
    if (!(m > 0.0)) continue;
    dir /= m;
    ++rep.directions;
    bool decreases = false;
    for (double delta : {scale, 0.5 * scale, 0.25 * scale}) {
      auto flux = solution.flux;
      for (std::size_t br = 0; br < flux.size(); ++br)
        for (double& v : flux[br]) v += delta * dir[static_cast<Eigen::Index>(br)];
      const double change = network_energy(solution.mesh, flux, network, psi) - base_energy;
      rep.most_negative_change = std::min(rep.most_negative_change, change);
      if (change < -1e-10) decreases = true;
    }
    if (decreases) ++rep.decreasing;
  }
  rep.fraction = rep.directions > 0 ? static_cast<double>(rep.decreasing) / rep.directions : 0.0;
  return rep;
}

}  // namespace dfn
