#include "dfn/mixed_fem.hpp"

#include "dfn/error.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace dfn {

double Solution::flux_at(std::size_t branch, double s) const {
  const auto& bm = mesh.branch(branch);
  const auto& u = flux[branch];
  const std::size_t e = bm.locate(s);
  if (s == bm.nodes[e]) return u[e];
  if (s == bm.nodes[e + 1]) return u[e + 1];
  const double t = (s - bm.nodes[e]) / bm.element_length(e);
  return (1.0 - t) * u[e] + t * u[e + 1];
}

Eigen::VectorXd Solution::stacked() const {
  std::size_t n = pressure.size() + junction_pressure.size();
  for (const auto& f : flux) n += f.size();
  Eigen::VectorXd x(static_cast<Eigen::Index>(n));
  Eigen::Index k = 0;
  for (const auto& f : flux)
    for (double v : f) x[k++] = v;
  for (double v : pressure) x[k++] = v;
  for (double v : junction_pressure) x[k++] = v;
  return x;
}

namespace {

ElementBlock make_block(const Mesh& mesh, std::size_t global, const RegimeField& regimes, const AdaptiveLaw& law,
                        const std::vector<double>& frozen_speed, const FractureNetwork& network) {
  const auto ref = mesh.element(global);
  const auto& bm = mesh.branch(ref.branch);
  const double h = bm.element_length(ref.local);
  const double c = eval_lambda_coefficient(law, frozen_speed[global], regimes[global]);
  const double f = network.tangential_force(ref.branch);

  ElementBlock blk;
  blk.coefficient = c;
  blk.mass = {c * h / 3.0, c * h / 6.0, c * h / 3.0};
  blk.load = {0.5 * f * h, 0.5 * f * h};
  if (const auto* src = network.sources.find(network.branches[ref.branch].id))
    blk.source = src->integral(bm.nodes[ref.local], bm.nodes[ref.local + 1]);
  return blk;
}

}  // namespace

std::vector<ElementBlock> element_blocks(const Mesh& mesh, const RegimeField& regimes, const AdaptiveLaw& law,
                                         const std::vector<double>& frozen_speed, const FractureNetwork& network,
                                         Execution exec) {
  const std::size_t n = mesh.element_count();
  if (regimes.size() != n || frozen_speed.size() != n)
    throw std::invalid_argument("element_blocks: regimes / frozen speeds do not match the mesh");
  std::vector<ElementBlock> blocks(n);
  if (exec == Execution::Parallel) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t e = 0; e < static_cast<std::ptrdiff_t>(n); ++e)
      blocks[static_cast<std::size_t>(e)] =
          make_block(mesh, static_cast<std::size_t>(e), regimes, law, frozen_speed, network);
  } else {
    for (std::size_t e = 0; e < n; ++e) blocks[e] = make_block(mesh, e, regimes, law, frozen_speed, network);
  }
  return blocks;
}

SaddleSystem assemble(const Mesh& mesh, const RegimeField& regimes, const AdaptiveLaw& law,
                      const std::vector<double>& frozen_speed, const FractureNetwork& network, Execution exec) {
  const auto blocks = element_blocks(mesh, regimes, law, frozen_speed, network, exec);

  SaddleSystem sys;
  sys.mesh = mesh;
  sys.flux_count = mesh.node_count();
  sys.pressure_count = mesh.element_count();
  sys.junction_count = network.intersections.size();
  sys.mean_constraint = !network.boundary.has_pressure_condition();
  sys.mean_target = network.boundary.mean_pressure.value_or(0.0);
  const std::size_t n =
      sys.flux_count + sys.pressure_count + sys.junction_count + (sys.mean_constraint ? 1 : 0);
  sys.matrix = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  sys.rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  sys.coefficients.resize(blocks.size());
  auto& A = sys.matrix;
  auto& b = sys.rhs;

  const double total_length = network.total_length();
  for (std::size_t br = 0; br < mesh.branch_count(); ++br) {
    const auto& bm = mesh.branch(br);
    for (std::size_t e = 0; e < bm.element_count(); ++e) {
      const std::size_t g = mesh.element_offset(br) + e;
      const auto& blk = blocks[g];
      if (!(blk.coefficient > 0.0) || !std::isfinite(blk.coefficient)) {
        std::ostringstream msg;
        msg << "degenerate law coefficient " << blk.coefficient << " on element " << g << " of branch '"
            << network.branches[br].id << "'";
        throw SingularSystemError(msg.str());
      }
      sys.coefficients[g] = blk.coefficient;
      const auto i0 = static_cast<Eigen::Index>(mesh.node_offset(br) + e);
      const auto i1 = i0 + 1;
      const auto ip = static_cast<Eigen::Index>(sys.pressure_index(g));
      A(i0, i0) += blk.mass[0];
      A(i0, i1) += blk.mass[1];
      A(i1, i0) += blk.mass[1];
      A(i1, i1) += blk.mass[2];
      b[i0] += blk.load[0];
      b[i1] += blk.load[1];
      // -int p phi' couples the pressure with +1 on the left node and -1 on the right.
      A(i0, ip) += 1.0;
      A(i1, ip) -= 1.0;
      A(ip, i0) += 1.0;
      A(ip, i1) -= 1.0;
      b[ip] = -blk.source;
      if (sys.mean_constraint) {
        const auto im = static_cast<Eigen::Index>(n - 1);
        const double w = bm.element_length(e) / total_length;
        A(im, ip) += w;
        A(ip, im) += w;
      }
    }
  }
  if (sys.mean_constraint) b[static_cast<Eigen::Index>(n - 1)] = sys.mean_target;

  for (std::size_t br = 0; br < mesh.branch_count(); ++br) {
    for (BranchEnd end : {BranchEnd::Start, BranchEnd::End}) {
      const bool at_start = end == BranchEnd::Start;
      const auto node = static_cast<Eigen::Index>(mesh.node_offset(br) +
                                                  (at_start ? 0 : mesh.branch(br).nodes.size() - 1));
      // Boundary term of the flux row: -p(0) at the start, +p(L) at the end.
      const double side = at_start ? -1.0 : 1.0;
      if (const auto j = network.junction_at(br, end)) {
        const auto ij = static_cast<Eigen::Index>(sys.junction_index(*j));
        A(node, ij) += side;
        A(ij, node) += side;
      } else if (const auto* cond = network.condition_at(br, end)) {
        if (const auto* p = std::get_if<PressureBC>(cond)) {
          b[node] -= side * p->pressure;
        } else {
          const double u0 = std::get<VelocityBC>(*cond).outward_flux;
          A.row(node).setZero();
          A(node, node) = 1.0;
          b[node] = at_start ? -u0 : u0;
        }
      }
    }
  }
  return sys;
}

Solution solve_saddle(const SaddleSystem& system) {
  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(system.matrix);
  const double rcond = lu.rcond();
  if (!(rcond >= 1e-14)) {
    std::ostringstream msg;
    msg << "singular saddle system (reciprocal condition estimate " << rcond << ")";
    if (!system.mean_constraint && system.junction_count == 0) msg << "; check the pressure anchor";
    else msg << "; check pressure anchoring and law coefficients";
    throw SingularSystemError(msg.str());
  }
  const Eigen::VectorXd x = lu.solve(system.rhs);
  const double rhs_norm = system.rhs.lpNorm<Eigen::Infinity>();
  const double res = (system.matrix * x - system.rhs).lpNorm<Eigen::Infinity>() / (rhs_norm > 0.0 ? rhs_norm : 1.0);
  if (!(res <= 1e-10)) {
    std::ostringstream msg;
    msg << "saddle solve residual " << res << " exceeds 1e-10";
    throw SingularSystemError(msg.str());
  }

  const Mesh& mesh = system.mesh;
  Solution sol;
  sol.mesh = mesh;
  sol.residual = res;
  sol.coefficients = system.coefficients;
  sol.flux.resize(mesh.branch_count());
  for (std::size_t br = 0; br < mesh.branch_count(); ++br) {
    const std::size_t off = mesh.node_offset(br);
    sol.flux[br].assign(x.data() + off, x.data() + off + mesh.branch(br).nodes.size());
  }
  const auto* base = x.data() + system.flux_count;
  sol.pressure.assign(base, base + system.pressure_count);
  sol.junction_pressure.assign(base + system.pressure_count, base + system.pressure_count + system.junction_count);

  if (system.mean_constraint) {
    double mean = 0.0;
    double total = 0.0;
    for (std::size_t g = 0; g < mesh.element_count(); ++g) {
      const auto ref = mesh.element(g);
      const double h = mesh.branch(ref.branch).element_length(ref.local);
      mean += h * sol.pressure[g];
      total += h;
    }
    const double shift = system.mean_target - mean / total;
    for (double& p : sol.pressure) p += shift;
    for (double& p : sol.junction_pressure) p += shift;
  }
  return sol;
}

double lift_pressure_data(const FractureNetwork& network, std::size_t branch) {
  const auto* c0 = network.condition_at(branch, BranchEnd::Start);
  const auto* c1 = network.condition_at(branch, BranchEnd::End);
  const auto* p0 = c0 ? std::get_if<PressureBC>(c0) : nullptr;
  const auto* p1 = c1 ? std::get_if<PressureBC>(c1) : nullptr;
  if (!p0 || !p1) return 0.0;
  return (p1->pressure - p0->pressure) / network.branches[branch].length();
}

double mass_balance_defect(const Solution& solution, const FractureNetwork& network) {
  double worst = 0.0;
  const Mesh& mesh = solution.mesh;
  for (std::size_t br = 0; br < mesh.branch_count(); ++br) {
    const auto& bm = mesh.branch(br);
    const auto* src = network.sources.find(network.branches[br].id);
    for (std::size_t e = 0; e < bm.element_count(); ++e) {
      const double q = src ? src->integral(bm.nodes[e], bm.nodes[e + 1]) : 0.0;
      worst = std::max(worst, std::abs(solution.flux[br][e + 1] - solution.flux[br][e] - q));
    }
  }
  return worst;
}

std::vector<double> junction_flux_sums(const Solution& solution, const FractureNetwork& network) {
  std::vector<double> sums;
  for (const auto& inter : network.intersections) {
    double s = 0.0;
    for (const auto& ref : inter.incident) {
      const auto& u = solution.flux[*network.branch_index(ref.branch)];
      s += ref.end == BranchEnd::End ? u.back() : -u.front();
    }
    sums.push_back(s);
  }
  return sums;
}

std::vector<std::vector<double>> junction_end_pressures(const Solution& solution, const FractureNetwork& network) {
  const Mesh& mesh = solution.mesh;
  std::vector<std::vector<double>> out;
  for (const auto& inter : network.intersections) {
    std::vector<double> traces;
    for (const auto& ref : inter.incident) {
      const std::size_t br = *network.branch_index(ref.branch);
      const auto& bm = mesh.branch(br);
      const auto& u = solution.flux[br];
      const double f = network.tangential_force(br);
      if (ref.end == BranchEnd::Start) {
        const double h = bm.element_length(0);
        const double c = solution.coefficients[mesh.element_offset(br)];
        const double mu = c * h / 3.0 * u[0] + c * h / 6.0 * u[1];
        traces.push_back(mu + solution.pressure[mesh.element_offset(br)] - 0.5 * f * h);
      } else {
        const std::size_t e = bm.element_count() - 1;
        const std::size_t g = mesh.element_offset(br) + e;
        const double h = bm.element_length(e);
        const double c = solution.coefficients[g];
        const double mu = c * h / 6.0 * u[e] + c * h / 3.0 * u[e + 1];
        traces.push_back(0.5 * f * h - mu + solution.pressure[g]);
      }
    }
    out.push_back(std::move(traces));
  }
  return out;
}

double junction_pressure_jump(const Solution& solution, const FractureNetwork& network) {
  double worst = 0.0;
  for (const auto& traces : junction_end_pressures(solution, network)) {
    const auto [lo, hi] = std::minmax_element(traces.begin(), traces.end());
    worst = std::max(worst, *hi - *lo);
  }
  return worst;
}

}  // namespace dfn
