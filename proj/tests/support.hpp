#pragma once

#include "dfn/geometry.hpp"
#include "dfn/laws.hpp"
#include "dfn/mixed_fem.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace dfn::test {

inline Branch horizontal(const std::string& id, double x0, double x1, double y = 0.5) {
  return {id, {x0, y}, {x1, y}};
}

inline BoundaryCondition pressure_at(const std::string& branch, BranchEnd end, double p) {
  return {{branch, end}, PressureBC{p}};
}

inline BoundaryCondition velocity_at(const std::string& branch, BranchEnd end, double outward) {
  return {{branch, end}, VelocityBC{outward}};
}

/// Single branch (0, 0.5)-(L, 0.5) with pressure data at both ends.
inline FractureNetwork single_branch(double length, double p0, double p1) {
  FractureNetwork net;
  net.branches.push_back(horizontal("b", 0.0, length));
  net.boundary.conditions = {pressure_at("b", BranchEnd::Start, p0), pressure_at("b", BranchEnd::End, p1)};
  return net;
}

inline void set_source(FractureNetwork& net, const std::string& branch, std::vector<double> breakpoints,
                       std::vector<double> values) {
  BranchSource src;
  src.breakpoints = std::move(breakpoints);
  src.values = std::move(values);
  net.sources.scalar.emplace_back(branch, std::move(src));
}

inline AdaptiveLaw linear_law(double lambda1, double lambda2, double threshold) {
  return {LawBranch::constant(lambda1), LawBranch::constant(lambda2), threshold, 0.0};
}

inline RegimeField all(const Mesh& mesh, Regime r) { return RegimeField(mesh.element_count(), r); }

inline Solution solve_linear(const FractureNetwork& net, const Mesh& mesh, const AdaptiveLaw& law,
                             const RegimeField& regimes) {
  const std::vector<double> frozen(mesh.element_count(), 0.0);
  return solve_saddle(assemble(mesh, regimes, law, frozen, net));
}

/// Nodal flux on a one-element mesh [0, length], for classifier tests.
inline Solution flux_solution(double length, double u1, double u2) {
  Solution s;
  s.mesh = Mesh({BranchMesh{0, length, {0.0, length}}});
  s.flux = {{u1, u2}};
  s.pressure = {0.0};
  s.coefficients = {1.0};
  return s;
}

}  // namespace dfn::test
