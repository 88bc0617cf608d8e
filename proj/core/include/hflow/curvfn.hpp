#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace hflow {

enum class Family { MeanH, NormA, CompletelySymmetric, ElemSymmetricQuotient, PowerMean };
enum class Classification { Convex, ConcaveInverseConcave };

std::string to_string(Family family);
Family family_from_string(const std::string& name);
std::string to_string(Classification c);

// A normalized curvature function F = c_F * raw(kappa - alpha e) with
// F(e (1 + alpha)) = 1. Immutable once built; use the named constructors.
class CurvatureSpec {
 public:
  static CurvatureSpec mean(int n, double alpha = 0.0);
  static CurvatureSpec norm(int n, double alpha = 0.0);
  // gamma_k = (complete homogeneous polynomial h_k)^{1/k}, 1 <= k <= n
  static CurvatureSpec completely_symmetric(int n, int k, double alpha = 0.0);
  // (H_k / H_l)^{1/(k-l)}, n >= k > l >= 0
  static CurvatureSpec elem_quotient(int n, int k, int l, double alpha = 0.0);
  // (sum kappa_i^r)^{1/r} for |r| <= 1; r = 0 is the geometric mean
  static CurvatureSpec power_mean(int n, double r, double alpha = 0.0);

  // Dispatch on family with the config-file parameter convention
  // (param1 = k or r, param2 = l).
  static CurvatureSpec make(Family family, int n, double param1, double param2, double alpha);

  Family family() const noexcept { return family_; }
  Classification classification() const noexcept { return classification_; }
  int n() const noexcept { return n_; }
  double alpha() const noexcept { return alpha_; }
  double normalization() const noexcept { return c_; }
  int k() const noexcept { return k_; }
  int l() const noexcept { return l_; }
  double r() const noexcept { return r_; }
  std::string describe() const;

  // Unnormalized family value on the positive cone (no shift).
  double raw(std::span<const double> shifted) const;
  void raw_gradient(std::span<const double> shifted, std::span<double> out) const;

 private:
  CurvatureSpec(Family f, int n, double alpha, int k, int l, double r);

  Family family_;
  Classification classification_;
  int n_;
  double alpha_;
  int k_ = 0;
  int l_ = 0;
  double r_ = 1.0;
  double c_ = 1.0;
};

// (H_0, ..., H_n) by the one-pass recurrence.
std::vector<double> elementary_symmetric_all(std::span<const double> kappa);

// dH_k/dkappa_i = H_{k-1} of the remaining n-1 entries; 1 <= k <= n.
std::vector<double> elementary_symmetric_gradient(int k, std::span<const double> kappa);

// (h_0, ..., h_m), complete homogeneous symmetric polynomials.
std::vector<double> complete_homogeneous_all(std::span<const double> kappa, int m);

double eval_F(const CurvatureSpec& spec, std::span<const double> kappa);
std::vector<double> grad_F(const CurvatureSpec& spec, std::span<const double> kappa);
// Both at once, writing the gradient into out; used on the hot path.
double eval_F_and_grad(const CurvatureSpec& spec, std::span<const double> kappa,
                       std::span<double> grad_out);

struct Cone {
  enum class Kind { GammaPlus, GammaAlpha, GammaK };
  Kind kind = Kind::GammaPlus;
  double alpha = 0.0;
  int k = 1;

  static Cone plus() { return {Kind::GammaPlus, 0.0, 1}; }
  static Cone shifted(double alpha) { return {Kind::GammaAlpha, alpha, 1}; }
  static Cone garding(int k) { return {Kind::GammaK, 0.0, k}; }
};

struct ConeMembership {
  bool inside;
  double margin;  // min over the defining strict inequalities
  int worst;      // component (GammaPlus/GammaAlpha) or 1-based H index (GammaK)
};

ConeMembership cone_membership(std::span<const double> kappa, const Cone& cone);

struct HypothesisCheck {
  std::string name;
  bool required;  // part of the hypotheses for this spec's classification
  bool passed;
  std::size_t failures = 0;
  double worst = 0.0;               // largest violation seen
  std::vector<double> witness;      // kappa at the worst violation
  std::vector<double> witness_pair; // second point for midpoint checks
  std::string note;
};

struct AssumptionReport {
  std::string spec;
  std::size_t samples = 0;
  std::uint64_t seed = 0;
  std::vector<HypothesisCheck> checks;

  bool all_required_pass() const;
  const HypothesisCheck* find(const std::string& name) const;
  std::string format() const;
};

AssumptionReport verify_assumptions(const CurvatureSpec& spec, std::size_t samples,
                                    std::uint64_t seed);

}  // namespace hflow
