#pragma once

#include <cstdint>
#include <functional>
#include <string>

namespace dfn {

enum class Regime : std::uint8_t { Low, High };

const char* to_string(Regime regime);

/// One side of the adaptive law: Lambda(u) = phi(|u|^2) u.
///
/// Parameters are physical: phi(A) = beta0 + beta1 * sqrt(A) with A the squared
/// physical speed. A Constant branch is the special case beta1 = 0.
struct LawBranch {
  enum class Kind { Constant, Affine, Custom };

  Kind kind = Kind::Constant;
  double beta0 = 1.0;
  double beta1 = 0.0;
  /// Custom only: phi of the squared physical speed.
  std::function<double(double)> custom_phi;
  /// Custom only: primitive of phi/2 in the normalized variable a = A / threshold^2,
  /// vanishing at a = 1. Required by build_psi.
  std::function<double(double)> custom_primitive;

  static LawBranch constant(double lambda);
  static LawBranch affine(double beta0, double beta1);
  static LawBranch custom(std::function<double(double)> phi,
                          std::function<double(double)> primitive = {});

  /// Coefficient multiplying u at the given physical speed.
  double coefficient(double speed) const;
  bool is_constant() const { return kind == Kind::Constant; }
};

struct AdaptiveLaw {
  LawBranch low;
  LawBranch high;
  double threshold = 1.0;
  /// Growth exponent override for Custom high branches (0 means derive it).
  double growth_override = 0.0;

  /// phi_1 at normalized squared speed 1.
  double lambda1() const { return low.coefficient(threshold); }
  double lambda2() const { return high.coefficient(threshold); }
  /// r = 2 for a Constant high branch, 3 for Affine-in-speed.
  double growth_exponent() const;
  double conjugate_exponent() const;
  const LawBranch& branch(Regime regime) const { return regime == Regime::Low ? low : high; }
  bool is_linear() const { return low.is_constant() && high.is_constant(); }
};

/// Throws std::invalid_argument when the law breaks its invariants.
void validate_law(const AdaptiveLaw& law);

/// phi_regime(speed^2); the caller owns the regime decision.
double eval_lambda_coefficient(const AdaptiveLaw& law, double speed, Regime regime);

/// Psi in the normalized squared speed a = |u|^2 / threshold^2.
class PsiPotential {
public:
  PsiPotential() = default;
  PsiPotential(LawBranch low, LawBranch high, double threshold);

  double phi1(double a) const;
  double phi2(double a) const;
  /// Primitives of phi/2 with Phi(1) = 0.
  double Phi1(double a) const;
  double Phi2(double a) const;
  double operator()(double a) const { return a <= 1.0 ? Phi1(a) : Phi2(a); }
  double derivative(double a) const { return 0.5 * (a <= 1.0 ? phi1(a) : phi2(a)); }

  /// Dissipation density in physical units, threshold^2 * Psi(u^2 / threshold^2);
  /// its derivative in u is phi(u^2) u.
  double density(double u) const;
  double threshold() const { return threshold_; }

private:
  double primitive(const LawBranch& branch, double a) const;

  LawBranch low_;
  LawBranch high_;
  double threshold_ = 1.0;
};

PsiPotential build_psi(const AdaptiveLaw& law);

enum class JumpSign { Negative, Zero, Positive };

const char* to_string(JumpSign sign);

/// Sign of lambda2 - lambda1.
JumpSign jump_sign(const AdaptiveLaw& law);

struct GrowthReport {
  double c = 0.0;
  double C = 0.0;
  /// Log-log slope of phi_2 over the last sampled decade.
  double tail_slope = 0.0;
  bool satisfied = false;
};

/// Samples the normalized phi_2 on a geometric grid over [1, 1e6]. Satisfied when
/// c and C are finite and positive and the tail slope is within 0.05 of (r - 2) / 2,
/// which is what separates a genuine a^{(r-2)/2} growth from a bounded phi_2.
GrowthReport check_growth_bound(const AdaptiveLaw& law, int sample_count);

struct ConvexityReport {
  int trials = 0;
  int violations = 0;
  /// Largest Psi(mix) - chord seen; positive means a violation.
  double worst_gap = 0.0;
};

/// Random (a, b, t) with a, b in [0, 25]; every other trial straddles a < 1 < b.
ConvexityReport convexity_probe(const PsiPotential& psi, int trials, std::uint64_t seed);

}  // namespace dfn
