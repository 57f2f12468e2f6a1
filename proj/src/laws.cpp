#include "dfn/laws.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <vector>

namespace dfn {

const char* to_string(Regime regime) { return regime == Regime::Low ? "low" : "high"; }

const char* to_string(JumpSign sign) {
  switch (sign) {
    case JumpSign::Negative: return "negative";
    case JumpSign::Zero: return "zero";
    case JumpSign::Positive: return "positive";
  }
  return "?";
}

LawBranch LawBranch::constant(double lambda) {
  LawBranch b;
  b.kind = Kind::Constant;
  b.beta0 = lambda;
  b.beta1 = 0.0;
  return b;
}

LawBranch LawBranch::affine(double beta0, double beta1) {
  LawBranch b;
  b.kind = Kind::Affine;
  b.beta0 = beta0;
  b.beta1 = beta1;
  return b;
}

LawBranch LawBranch::custom(std::function<double(double)> phi, std::function<double(double)> primitive) {
  LawBranch b;
  b.kind = Kind::Custom;
  b.custom_phi = std::move(phi);
  b.custom_primitive = std::move(primitive);
  return b;
}

double LawBranch::coefficient(double speed) const {
  switch (kind) {
    case Kind::Constant: return beta0;
    case Kind::Affine: return beta0 + beta1 * speed;
    case Kind::Custom: return custom_phi(speed * speed);
  }
  return 0.0;
}

double AdaptiveLaw::growth_exponent() const {
  if (growth_override > 0.0) return growth_override;
  return high.kind == LawBranch::Kind::Affine ? 3.0 : 2.0;
}

double AdaptiveLaw::conjugate_exponent() const {
  const double r = growth_exponent();
  return r / (r - 1.0);
}

void validate_law(const AdaptiveLaw& law) {
  if (!(law.threshold > 0.0) || !std::isfinite(law.threshold))
    throw std::invalid_argument("law threshold must be positive");
  for (const LawBranch* b : {&law.low, &law.high}) {
    const char* side = b == &law.low ? "low" : "high";
    switch (b->kind) {
      case LawBranch::Kind::Constant:
        if (!(b->beta0 > 0.0)) throw std::invalid_argument(std::string(side) + " law: lambda must be positive");
        break;
      case LawBranch::Kind::Affine:
        if (b->beta0 < 0.0 || b->beta1 < 0.0 || !(b->beta0 + b->beta1 > 0.0))
          throw std::invalid_argument(std::string(side) +
                                      " law: need beta0 >= 0, beta1 >= 0, beta0 + beta1 > 0");
        break;
      case LawBranch::Kind::Custom:
        if (!b->custom_phi) throw std::invalid_argument(std::string(side) + " law: custom phi missing");
        break;
    }
  }
  if (!(law.lambda1() > 0.0) || !(law.lambda2() > 0.0))
    throw std::invalid_argument("law: lambda1 and lambda2 must be positive");
}

double eval_lambda_coefficient(const AdaptiveLaw& law, double speed, Regime regime) {
  if (speed < 0.0) throw std::invalid_argument("eval_lambda_coefficient: negative speed");
  return law.branch(regime).coefficient(speed);
}

PsiPotential::PsiPotential(LawBranch low, LawBranch high, double threshold)
    : low_(std::move(low)), high_(std::move(high)), threshold_(threshold) {}

double PsiPotential::phi1(double a) const { return low_.coefficient(threshold_ * std::sqrt(a)); }
double PsiPotential::phi2(double a) const { return high_.coefficient(threshold_ * std::sqrt(a)); }

double PsiPotential::primitive(const LawBranch& branch, double a) const {
  switch (branch.kind) {
    case LawBranch::Kind::Constant: return 0.5 * branch.beta0 * (a - 1.0);
    case LawBranch::Kind::Affine:
      // Normalized phi(a) = beta0 + beta1 * threshold * sqrt(a).
      return 0.5 * branch.beta0 * (a - 1.0) + branch.beta1 * threshold_ * (a * std::sqrt(a) - 1.0) / 3.0;
    case LawBranch::Kind::Custom: return branch.custom_primitive(a);
  }
  return 0.0;
}

double PsiPotential::Phi1(double a) const { return primitive(low_, a); }
double PsiPotential::Phi2(double a) const { return primitive(high_, a); }

double PsiPotential::density(double u) const {
  const double t2 = threshold_ * threshold_;
  return t2 * (*this)(u * u / t2);
}

PsiPotential build_psi(const AdaptiveLaw& law) {
  validate_law(law);
  for (const LawBranch* b : {&law.low, &law.high})
    if (b->kind == LawBranch::Kind::Custom && !b->custom_primitive)
      throw std::invalid_argument("build_psi: custom law branch needs its own primitive");
  return PsiPotential(law.low, law.high, law.threshold);
}

JumpSign jump_sign(const AdaptiveLaw& law) {
  const double l1 = law.lambda1();
  const double l2 = law.lambda2();
  if (l1 == l2) return JumpSign::Zero;
  return l2 > l1 ? JumpSign::Positive : JumpSign::Negative;
}

GrowthReport check_growth_bound(const AdaptiveLaw& law, int sample_count) {
  if (sample_count < 2) throw std::invalid_argument("check_growth_bound: need at least 2 samples");
  const double r = law.growth_exponent();
  const double expo = 0.5 * (r - 2.0);
  auto phi2 = [&law](double a) { return law.high.coefficient(law.threshold * std::sqrt(a)); };

  GrowthReport rep;
  rep.c = std::numeric_limits<double>::infinity();
  rep.C = 0.0;
  const double log_hi = 6.0;
  for (int i = 0; i < sample_count; ++i) {
    const double a = std::pow(10.0, log_hi * i / (sample_count - 1));
    const double p = phi2(a);
    const double growth = std::pow(a, expo);
    rep.c = std::min(rep.c, p / growth);
    rep.C = std::max(rep.C, p / (1.0 + growth));
  }
  rep.tail_slope = std::log10(phi2(1e6) / phi2(1e5));
  rep.satisfied = std::isfinite(rep.c) && std::isfinite(rep.C) && rep.c > 0.0 && rep.C > 0.0 &&
                  std::abs(rep.tail_slope - expo) <= 0.05;
  return rep;
}

ConvexityReport convexity_probe(const PsiPotential& psi, int trials, std::uint64_t seed) {
  if (trials < 1) throw std::invalid_argument("convexity_probe: trials must be >= 1");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> any(0.0, 25.0);
  std::uniform_real_distribution<double> below(0.0, 1.0);
  std::uniform_real_distribution<double> above(1.0, 25.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  ConvexityReport rep;
  rep.trials = trials;
  rep.worst_gap = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < trials; ++k) {
    double a;
    double b;
    if (k % 2 == 0) {
      a = below(rng);
      b = above(rng);
    } else {
      a = any(rng);
      b = any(rng);
    }
    const double t = unit(rng);
    const double gap = psi((1.0 - t) * a + t * b) - ((1.0 - t) * psi(a) + t * psi(b));
    rep.worst_gap = std::max(rep.worst_gap, gap);
    if (gap > 1e-12) ++rep.violations;
  }
  return rep;
}

}  // namespace dfn
