#include "dfn/error.hpp"
#include "dfn/mixed_fem.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace dfn;
using test::pressure_at;
using test::velocity_at;

namespace {

const double pi = std::numbers::pi;

// Three branches meeting at (1, 0): inflow branch "a" of length 1, outlets "b"
// (length 1) and "c" (length 2) held at zero pressure.
FractureNetwork tee() {
  FractureNetwork net;
  net.branches = {{"a", {0, 0}, {1, 0}}, {"b", {1, 0}, {1, 1}}, {"c", {1, 0}, {3, 0}}};
  net.intersections = {{"j", {1, 0}, {{"a", BranchEnd::End}, {"b", BranchEnd::Start}, {"c", BranchEnd::Start}}}};
  net.boundary.conditions = {velocity_at("a", BranchEnd::Start, -1.0), pressure_at("b", BranchEnd::End, 0.0),
                             pressure_at("c", BranchEnd::End, 0.0)};
  return net;
}

FractureNetwork case1_data(double force) {
  auto net = test::single_branch(1.0, 0.0, 0.0);
  test::set_source(net, "b", {0.3, 0.7}, {1.0, -1.0, 1.0});
  net.sources.force = {force, 0.0};
  return net;
}

struct Errors {
  double p = 0.0;
  double u = 0.0;
};

// L2 errors against p = sin(pi x), u = -pi cos(pi x), using a 5-point Gauss rule per element.
Errors manufactured_errors(int n) {
  auto net = test::single_branch(1.0, 0.0, 0.0);
  BranchSource src;
  src.profile = [](double x) { return pi * pi * std::sin(pi * x); };
  net.sources.scalar.emplace_back("b", src);
  const Mesh mesh = build_mesh(net, 1.0 / n);
  const auto law = test::linear_law(1.0, 1.0, 1e3);
  const auto sol = test::solve_linear(net, mesh, law, test::all(mesh, Regime::Low));

  static const double xg[5] = {-0.9061798459386640, -0.5384693101056831, 0.0, 0.5384693101056831,
                               0.9061798459386640};
  static const double wg[5] = {0.2369268850561891, 0.4786286704993665, 0.5688888888888889, 0.4786286704993665,
                               0.2369268850561891};
  Errors err;
  const auto& bm = mesh.branch(0);
  for (std::size_t e = 0; e < bm.element_count(); ++e) {
    const double h = bm.element_length(e);
    for (int g = 0; g < 5; ++g) {
      const double x = bm.midpoint(e) + 0.5 * h * xg[g];
      const double dp = sol.pressure[e] - std::sin(pi * x);
      const double du = sol.flux_at(0, x) + pi * std::cos(pi * x);
      err.p += 0.5 * h * wg[g] * dp * dp;
      err.u += 0.5 * h * wg[g] * du * du;
    }
  }
  return {std::sqrt(err.p), std::sqrt(err.u)};
}

}  // namespace

TEST(Assemble, SingleElementHandSolved) {
  const auto net = test::single_branch(1.0, 1.0, 0.0);
  const Mesh mesh = build_mesh(net, 1.0);
  const auto sys = assemble(mesh, test::all(mesh, Regime::Low), test::linear_law(1, 1, 1), {0.0}, net);
  // Unknowns (u0, u1, p): mass block 1/3, 1/6; pressure coupling +1, -1.
  ASSERT_EQ(sys.matrix.rows(), 3);
  EXPECT_NEAR(sys.matrix(0, 0), 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(sys.matrix(0, 1), 1.0 / 6.0, 1e-15);
  EXPECT_DOUBLE_EQ(sys.matrix(0, 2), 1.0);
  EXPECT_DOUBLE_EQ(sys.matrix(1, 2), -1.0);
  const auto sol = solve_saddle(sys);
  EXPECT_NEAR(sol.flux[0][0], 1.0, 1e-13);
  EXPECT_NEAR(sol.flux[0][1], 1.0, 1e-13);
  EXPECT_NEAR(sol.pressure[0], 0.5, 1e-13);
}

TEST(Assemble, ClosedBranchAtRestWithMeanPressure) {
  for (double mean : {0.0, 0.7}) {
    auto net = test::single_branch(1.0, 0.0, 0.0);
    net.boundary.conditions = {velocity_at("b", BranchEnd::Start, 0.0), velocity_at("b", BranchEnd::End, 0.0)};
    net.boundary.mean_pressure = mean;
    const Mesh mesh = build_mesh(net, 0.25);
    const auto sol = test::solve_linear(net, mesh, test::linear_law(1, 1, 1), test::all(mesh, Regime::Low));
    for (double u : sol.flux[0]) EXPECT_NEAR(u, 0.0, 1e-13);
    for (double p : sol.pressure) EXPECT_NEAR(p, mean, 1e-13);
  }
}

TEST(Assemble, JunctionMatchesKirchhoff) {
  const auto net = tee();
  const Mesh mesh = build_mesh(net, 0.1);
  const auto sol = test::solve_linear(net, mesh, test::linear_law(1, 1, 10), test::all(mesh, Regime::Low));
  // Equal pressure drop on b and c: u_b L_b = u_c L_c, u_b + u_c = 1.
  for (double u : sol.flux[0]) EXPECT_NEAR(u, 1.0, 1e-12);
  for (double u : sol.flux[1]) EXPECT_NEAR(u, 2.0 / 3.0, 1e-12);
  for (double u : sol.flux[2]) EXPECT_NEAR(u, 1.0 / 3.0, 1e-12);
  ASSERT_EQ(sol.junction_pressure.size(), 1u);
  EXPECT_NEAR(sol.junction_pressure[0], 2.0 / 3.0, 1e-12);
  for (double s : junction_flux_sums(sol, net)) EXPECT_NEAR(s, 0.0, 1e-12);
  EXPECT_LE(junction_pressure_jump(sol, net), 1e-12);
  EXPECT_LE(sol.residual, 1e-12);
}

TEST(Assemble, JunctionSystemResidual) {
  const auto net = tee();
  const Mesh mesh = build_mesh(net, 0.1);
  const auto law = test::linear_law(1, 0.1, 0.5);
  RegimeField regimes(mesh.element_count(), Regime::Low);
  for (std::size_t g = 0; g < regimes.size(); g += 3) regimes[g] = Regime::High;
  const auto sys = assemble(mesh, regimes, law, std::vector<double>(mesh.element_count(), 0.0), net);
  const auto sol = solve_saddle(sys);
  const Eigen::VectorXd x = sol.stacked();
  EXPECT_LE((sys.matrix * x - sys.rhs).lpNorm<Eigen::Infinity>(), 1e-12);
  EXPECT_LE(mass_balance_defect(sol, net), 1e-12);
  EXPECT_LE(junction_pressure_jump(sol, net), 1e-12);
}

TEST(Solve, CaseOneMassBalance) {
  const auto net = case1_data(0.05);
  const Mesh mesh = build_mesh(net, 0.05);
  const auto sol = test::solve_linear(net, mesh, test::linear_law(1, 0.1, 0.15), test::all(mesh, Regime::Low));
  EXPECT_NEAR(sol.flux[0].back() - sol.flux[0].front(), 0.2, 1e-12);
  EXPECT_LE(mass_balance_defect(sol, net), 1e-12);
}

TEST(Solve, MatchesClosedFormDarcy) {
  // lambda u + p' = f, u' = q, p = 0 at both ends: u = u_hat + f - mean(u_hat),
  // with u_hat piecewise linear and exactly represented at the nodes.
  const auto net = case1_data(0.05);
  const Mesh mesh = build_mesh(net, 0.05);
  const auto sol = test::solve_linear(net, mesh, test::linear_law(1, 0.1, 0.15), test::all(mesh, Regime::Low));
  const double alpha = 0.05 - 0.1;
  const auto& bm = mesh.branch(0);
  for (std::size_t i = 0; i < bm.nodes.size(); ++i) {
    const double x = bm.nodes[i];
    const double uhat = x <= 0.3 ? x : (x <= 0.7 ? 0.6 - x : x - 1.4 + 0.6);
    EXPECT_NEAR(sol.flux[0][i], uhat + alpha, 1e-12) << "x = " << x;
  }
}

TEST(Solve, ManufacturedSolutionConverges) {
  std::vector<Errors> errs;
  for (int n : {8, 16, 32, 64}) errs.push_back(manufactured_errors(n));
  for (std::size_t k = 1; k < errs.size(); ++k) {
    EXPECT_GE(std::log2(errs[k - 1].p / errs[k].p), 0.9);
    EXPECT_GE(std::log2(errs[k - 1].u / errs[k].u), 0.9);
  }
}

TEST(Solve, ReversedBranchFlipsFlux) {
  auto fwd = case1_data(0.0);
  fwd.boundary.conditions = {pressure_at("b", BranchEnd::Start, 0.3), pressure_at("b", BranchEnd::End, -0.1)};
  FractureNetwork rev = fwd;
  rev.branches[0] = {"b", {1, 0.5}, {0, 0.5}};
  rev.boundary.conditions = {pressure_at("b", BranchEnd::Start, -0.1), pressure_at("b", BranchEnd::End, 0.3)};
  rev.sources.scalar[0].second = BranchSource{{0.3, 0.7}, {1.0, -1.0, 1.0}, {}};

  const auto law = test::linear_law(1, 1, 1);
  const Mesh mf = build_mesh(fwd, 0.1);
  const Mesh mr = build_mesh(rev, 0.1);
  const auto sf = test::solve_linear(fwd, mf, law, test::all(mf, Regime::Low));
  const auto sr = test::solve_linear(rev, mr, law, test::all(mr, Regime::Low));
  const std::size_t n = sf.flux[0].size();
  ASSERT_EQ(sr.flux[0].size(), n);
  for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(sf.flux[0][i], -sr.flux[0][n - 1 - i], 1e-12);
  const std::size_t m = sf.pressure.size();
  for (std::size_t e = 0; e < m; ++e) EXPECT_NEAR(sf.pressure[e], sr.pressure[m - 1 - e], 1e-12);
}

TEST(Solve, VelocityConditionIsImposed) {
  auto net = test::single_branch(1.0, 0.0, 0.0);
  net.boundary.conditions = {velocity_at("b", BranchEnd::Start, -0.4), pressure_at("b", BranchEnd::End, 0.0)};
  const Mesh mesh = build_mesh(net, 0.2);
  const auto sol = test::solve_linear(net, mesh, test::linear_law(2, 2, 1), test::all(mesh, Regime::Low));
  for (double u : sol.flux[0]) EXPECT_NEAR(u, 0.4, 1e-13);
  // p(x) = 2 * 0.4 * (1 - x) sampled at midpoints.
  const auto& bm = mesh.branch(0);
  for (std::size_t e = 0; e < bm.element_count(); ++e) EXPECT_NEAR(sol.pressure[e], 0.8 * (1 - bm.midpoint(e)), 1e-13);
}

TEST(Solve, DegenerateCoefficientIsSingular) {
  const auto net = test::single_branch(1.0, 1.0, 0.0);
  const Mesh mesh = build_mesh(net, 0.5);
  AdaptiveLaw law{LawBranch::constant(1.0), LawBranch::custom([](double a) { return a > 2.0 ? 0.0 : 1.0; }), 1.0, 2.0};
  EXPECT_THROW(assemble(mesh, test::all(mesh, Regime::High), law, {2.0, 2.0}, net), SingularSystemError);
}

TEST(Lift, PressureDataGradient) {
  EXPECT_DOUBLE_EQ(lift_pressure_data(test::single_branch(1.0, 0.0, 0.0), 0), 0.0);
  EXPECT_NEAR(lift_pressure_data(test::single_branch(1.0, 0.0, 0.2), 0), 0.2, 1e-15);
  EXPECT_DOUBLE_EQ(lift_pressure_data(test::single_branch(1.0, 0.1, 0.1), 0), 0.0);
  auto net = test::single_branch(1.0, 0.0, 0.0);
  net.boundary.conditions[0] = velocity_at("b", BranchEnd::Start, 0.0);
  EXPECT_DOUBLE_EQ(lift_pressure_data(net, 0), 0.0);
}

TEST(Kernels, SerialAndParallelBlocksAgree) {
  const auto net = tee();
  const Mesh mesh = build_mesh(net, 0.001);
  AdaptiveLaw law{LawBranch::constant(1.0), LawBranch::affine(0.01, 3.0), 0.15, 0.0};
  RegimeField regimes(mesh.element_count());
  std::vector<double> speed(mesh.element_count());
  for (std::size_t g = 0; g < regimes.size(); ++g) {
    regimes[g] = g % 3 ? Regime::High : Regime::Low;
    speed[g] = 0.001 * static_cast<double>(g % 97);
  }
  const auto a = element_blocks(mesh, regimes, law, speed, net, Execution::Serial);
  const auto b = element_blocks(mesh, regimes, law, speed, net, Execution::Parallel);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t g = 0; g < a.size(); ++g) {
    EXPECT_EQ(a[g].coefficient, b[g].coefficient);
    EXPECT_EQ(a[g].mass, b[g].mass);
    EXPECT_EQ(a[g].load, b[g].load);
    EXPECT_EQ(a[g].source, b[g].source);
  }
}
