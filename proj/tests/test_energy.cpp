#include "dfn/energy.hpp"
#include "dfn/error.hpp"
#include "dfn/presets.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

using namespace dfn;

namespace {

FractureNetwork case1_data() {
  auto net = test::single_branch(1.0, 0.0, 0.0);
  test::set_source(net, "b", {0.3, 0.7}, {1.0, -1.0, 1.0});
  return net;
}

// Midpoint rule with many subintervals; no kink handling.
double fine_dissipation(const PsiPotential& psi, double u1, double u2, double h, int n = 10000) {
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    const double s = (i + 0.5) / n;
    sum += psi.density((1 - s) * u1 + s * u2);
  }
  return sum * h / n;
}

struct Converged {
  ProblemSpec spec;
  TrackerReport report;
};

// Tight eps_omega: the final labels agree with the solution they produce.
Converged self_consistent(ProblemSpec spec) {
  spec.solver.eps_omega = 1e-10;
  return {spec, solve(spec)};
}

// Spread and mean of u_h - u_hat over the final mesh nodes.
std::pair<double, double> offset(const Converged& c) {
  const auto lifted = lift_field(c.spec.network, c.report.final_solution.mesh);
  const auto& u = c.report.final_solution.flux[0];
  double lo = 1e300;
  double hi = -1e300;
  double sum = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double d = u[i] - lifted.values[i];
    lo = std::min(lo, d);
    hi = std::max(hi, d);
    sum += d;
  }
  return {hi - lo, sum / static_cast<double>(u.size())};
}

}  // namespace

TEST(Lift, ZeroSource) {
  const auto net = test::single_branch(1.0, 0.0, 0.0);
  const auto lifted = lift_field(net, build_mesh(net, 0.1));
  for (double v : lifted.values) EXPECT_EQ(v, 0.0);
}

TEST(Lift, PiecewiseSource) {
  const auto net = case1_data();
  const auto lifted = lift_field(net, build_mesh(net, 0.05));
  EXPECT_NEAR(lifted.at(0.3), 0.3, 1e-14);
  EXPECT_NEAR(lifted.at(0.7), -0.1, 1e-14);
  EXPECT_NEAR(lifted.at(1.0), 0.2, 1e-14);
}

TEST(Lift, VelocityConditionFixesTheConstant) {
  auto net = test::single_branch(1.0, 0.0, 0.0);
  test::set_source(net, "b", {}, {1.0});
  net.boundary.conditions[0] = test::velocity_at("b", BranchEnd::Start, 0.0);
  const auto lifted = lift_field(net, build_mesh(net, 0.1));
  for (double x : {0.0, 0.25, 0.5, 1.0}) EXPECT_NEAR(lifted.at(x), x, 1e-14);

  net.boundary.conditions[0] = test::pressure_at("b", BranchEnd::Start, 0.0);
  net.boundary.conditions[1] = test::velocity_at("b", BranchEnd::End, 0.5);
  const auto shifted = lift_field(net, build_mesh(net, 0.1));
  EXPECT_NEAR(shifted.at(1.0), 0.5, 1e-14);
  EXPECT_NEAR(shifted.at(0.0), -0.5, 1e-14);
}

TEST(Lift, MultiBranchIsOutOfScope) {
  FractureNetwork net;
  net.branches = {{"a", {0, 0}, {1, 0}}, {"b", {1, 0}, {2, 0}}};
  EXPECT_THROW(lift_field(net, Mesh({BranchMesh{0, 1, {0, 1}}, BranchMesh{1, 1, {0, 1}}})), ScopeError);
}

TEST(EnergyOf, ZeroField) {
  const auto net = test::single_branch(1.0, 0.0, 0.0);
  const Mesh mesh = build_mesh(net, 0.25);
  const auto rep = energy_of(std::vector<double>(5, 0.0), mesh, net, build_psi(test::linear_law(1, 1, 1)));
  EXPECT_NEAR(rep.dissipation, -0.5, 1e-15);
  EXPECT_NEAR(rep.energy, -0.5, 1e-15);
  EXPECT_EQ(rep.quadrature, "gauss3-kinksplit");
}

TEST(EnergyOf, ConstantHighField) {
  const auto net = test::single_branch(1.0, 0.0, 0.0);
  const Mesh mesh = build_mesh(net, 0.5);
  const auto rep = energy_of({2.0, 2.0, 2.0}, mesh, net, build_psi(test::linear_law(1, 0.1, 1)));
  EXPECT_NEAR(rep.dissipation, 0.15, 1e-14);
}

TEST(EnergyOf, ClosedFormBelowThreshold) {
  // D = int (u^2 - 1) / 2 for u = x on [0, 1] with threshold 2: (1/3 - 4) / 2.
  const auto net = test::single_branch(1.0, 0.0, 0.0);
  const Mesh mesh = build_mesh(net, 0.25);
  const auto& nodes = mesh.branch(0).nodes;
  const auto rep = energy_of(nodes, mesh, net, build_psi(test::linear_law(1, 0.1, 2.0)));
  EXPECT_NEAR(rep.dissipation, (1.0 / 3.0 - 4.0) / 2.0, 1e-12);
}

TEST(EnergyOf, ForceAndPressureDataEnterF0) {
  auto net = test::single_branch(1.0, 0.0, 0.2);
  net.sources.force = {0.05, 0.0};
  const Mesh mesh = build_mesh(net, 0.5);
  const auto rep = energy_of({1.0, 1.0, 1.0}, mesh, net, build_psi(test::linear_law(1, 1, 10)));
  EXPECT_NEAR(rep.f0, 0.05 - 0.2, 1e-15);
  EXPECT_NEAR(rep.energy, rep.dissipation - rep.f0, 1e-15);
}

TEST(Quadrature, KinkSplitMatchesFineMidpoint) {
  for (const auto& law : {test::linear_law(1, 0.1, 0.15), AdaptiveLaw{LawBranch::constant(1.0),
                                                                      LawBranch::affine(0.01, 3.0), 0.15, 0.0}}) {
    const auto psi = build_psi(law);
    for (auto [u1, u2] : {std::pair{0.05, 0.3}, {-0.4, 0.2}, {0.3, -0.1}, {0.16, 0.149}}) {
      EXPECT_NEAR(segment_dissipation(psi, u1, u2, 0.05), fine_dissipation(psi, u1, u2, 0.05), 1e-9)
          << u1 << " " << u2;
    }
  }
}

TEST(Minimize, NoDataMeansZeroFlow) {
  const auto net = test::single_branch(1.0, 0.0, 0.0);
  const auto res = reduce_and_minimize(net, build_mesh(net, 0.1), build_psi(test::linear_law(1, 2, 0.15)));
  EXPECT_NEAR(res.alpha_star, 0.0, 1e-8);
  EXPECT_FALSE(res.trivial_space);
}

TEST(Minimize, VelocityConditionLeavesNoFreedom) {
  auto net = case1_data();
  net.boundary.conditions[0] = test::velocity_at("b", BranchEnd::Start, -0.1);
  const auto res = reduce_and_minimize(net, build_mesh(net, 0.1), build_psi(test::linear_law(1, 0.1, 0.15)));
  EXPECT_TRUE(res.trivial_space);
  EXPECT_EQ(res.alpha_star, 0.0);
  EXPECT_TRUE(res.profile_alpha.empty());
}

TEST(Minimize, ConvexProfileHasNonNegativeCurvature) {
  auto net = case1_data();
  net.sources.force = {0.05, 0.0};
  GridSpec grid{1.0, 2001, 1e-10};
  const auto res = reduce_and_minimize(net, build_mesh(net, 0.05), build_psi(test::linear_law(1, 2, 0.15)), grid);
  const auto& E = res.profile_energy;
  for (std::size_t i = 1; i + 1 < E.size(); ++i) EXPECT_GE(E[i - 1] - 2 * E[i] + E[i + 1], -1e-9) << i;
  EXPECT_EQ(res.local_minima.size(), 1u);
}

TEST(Minimize, NonConvexProfileHasConcaveRegion) {
  // Second differences scale with the grid step squared; a 0.02 step resolves the concave region.
  auto net = case1_data();
  net.sources.force = {0.05, 0.0};
  GridSpec grid{1.0, 101, 1e-10};
  const auto res = reduce_and_minimize(net, build_mesh(net, 0.05), build_psi(test::linear_law(1, 0.1, 0.15)), grid);
  const auto& E = res.profile_energy;
  double worst = 0.0;
  for (std::size_t i = 1; i + 1 < E.size(); ++i) worst = std::min(worst, E[i - 1] - 2 * E[i] + E[i + 1]);
  EXPECT_LT(worst, -1e-6);
}

TEST(Minimize, ConvexFemMatchesOracle) {
  const auto c = self_consistent(k2_variant_spec(0.5));
  ASSERT_EQ(c.report.status, TrackerStatus::Converged);
  const auto [spread, alpha_fem] = offset(c);
  EXPECT_LE(spread, 1e-8);
  const auto res = reduce_and_minimize(c.spec.network, c.report.final_solution.mesh, build_psi(c.spec.law));
  EXPECT_NEAR(res.alpha_star, alpha_fem, 1e-6);
}

TEST(Minimize, NonConvexFemMatchesOracle) {
  auto spec = case1_spec(false);
  const auto c = self_consistent(spec);
  ASSERT_EQ(c.report.status, TrackerStatus::Converged);
  const auto [spread, alpha_fem] = offset(c);
  EXPECT_LE(spread, 1e-8);
  const auto res = reduce_and_minimize(c.spec.network, c.report.final_solution.mesh, build_psi(c.spec.law));
  EXPECT_NEAR(res.alpha_star, alpha_fem, 1e-6);
}

TEST(Minimize, SerialAndParallelProfilesAgree) {
  const auto net = case1_data();
  const Mesh mesh = build_mesh(net, 0.01);
  const auto lifted = lift_field(net, mesh);
  const auto psi = build_psi(AdaptiveLaw{LawBranch::constant(1.0), LawBranch::affine(0.01, 3.0), 0.15, 0.0});
  std::vector<double> alphas(5000);
  for (std::size_t i = 0; i < alphas.size(); ++i) alphas[i] = -1.0 + 2.0 * static_cast<double>(i) / 4999.0;
  EXPECT_EQ(energy_profile(lifted, 0.05, psi, alphas, Execution::Serial),
            energy_profile(lifted, 0.05, psi, alphas, Execution::Parallel));
}

TEST(NetworkEnergy, DiffersFromEnergyOfByAConstant) {
  auto net = test::single_branch(1.0, 0.1, 0.3);
  test::set_source(net, "b", {0.3, 0.7}, {1.0, -1.0, 1.0});
  net.sources.force = {0.05, 0.0};
  const Mesh mesh = build_mesh(net, 0.05);
  const auto psi = build_psi(test::linear_law(1, 0.1, 0.15));
  const auto lifted = lift_field(net, mesh);
  auto shifted = [&](double a) {
    auto v = lifted.values;
    for (double& x : v) x += a;
    return v;
  };
  const double d_of = energy_of(shifted(0.3), mesh, net, psi).energy - energy_of(shifted(-0.2), mesh, net, psi).energy;
  const double d_net = network_energy(mesh, {shifted(0.3)}, net, psi) - network_energy(mesh, {shifted(-0.2)}, net, psi);
  EXPECT_NEAR(d_of, d_net, 1e-13);
}

TEST(Probe, SingleLawDarcyIsAMinimizer) {
  auto spec = case1_spec(false);
  spec.law = test::linear_law(1, 1, 0.15);
  const auto rep = solve(spec);
  const auto probe = local_minimality_probe(rep.final_solution, spec.network, build_psi(spec.law), 100, 1e-3, 11);
  EXPECT_EQ(probe.space_dimension, 1);
  EXPECT_EQ(probe.directions, 100);
  EXPECT_EQ(probe.fraction, 0.0);
}

TEST(Probe, ConvexConvergedStateIsAMinimizer) {
  const auto c = self_consistent(k2_variant_spec(0.5));
  const auto probe = local_minimality_probe(c.report.final_solution, c.spec.network, build_psi(c.spec.law), 100,
                                            1e-3, 12);
  EXPECT_EQ(probe.fraction, 0.0);
}

TEST(Probe, PerturbedFieldHasDescent) {
  auto spec = case1_spec(false);
  spec.law = test::linear_law(1, 1, 0.15);
  auto sol = solve(spec).final_solution;
  for (double& u : sol.flux[0]) u += 0.05;
  const auto probe = local_minimality_probe(sol, spec.network, build_psi(spec.law), 100, 1e-3, 13);
  EXPECT_GT(probe.fraction, 0.0);
}

TEST(Probe, JunctionBalanceConstrainsDirections) {
  const auto spec = case2_spec(false);
  const auto rep = solve(spec);
  const auto probe = local_minimality_probe(rep.final_solution, spec.network, build_psi(spec.law), 10, 1e-3, 14);
  // Four branch constants, one balance row at the center.
  EXPECT_EQ(probe.space_dimension, 3);
}
