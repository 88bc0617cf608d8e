#include "hflow/curvfn.hpp"

#include <algorithm>
#include <array>
#include <cassert>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

#include "hflow/ambient.hpp"
#include "hflow/errors.hpp"

namespace hflow {

std::string to_string(Family family) {
  switch (family) {
    case Family::MeanH: return "MeanH";
    case Family::NormA: return "NormA";
    case Family::CompletelySymmetric: return "CompletelySymmetric";
    case Family::ElemSymmetricQuotient: return "ElemSymmetricQuotient";
    case Family::PowerMean: return "PowerMean";
  }
  return "?";
}

Family family_from_string(const std::string& name) {
  for (auto f : {Family::MeanH, Family::NormA, Family::CompletelySymmetric,
                 Family::ElemSymmetricQuotient, Family::PowerMean}) {
    if (to_string(f) == name) return f;
  }
  throw DomainError("unknown curvature family '" + name + "'");
}

std::string to_string(Classification c) {
  return c == Classification::Convex ? "Convex" : "ConcaveInverseConcave";
}

// ---------------------------------------------------------------------------
// symmetric polynomials

std::vector<double> elementary_symmetric_all(std::span<const double> kappa) {
  const std::size_t n = kappa.size();
  std::vector<double> e(n + 1, 0.0);
  e[0] = 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = i + 1; k >= 1; --k) e[k] += kappa[i] * e[k - 1];
  }
  return e;
}

std::vector<double> elementary_symmetric_gradient(int k, std::span<const double> kappa) {
  const int n = static_cast<int>(kappa.size());
  if (k < 1 || k > n) {
    throw DomainError("elementary_symmetric_gradient: k=" + std::to_string(k) +
                      " outside {1..n}");
  }
  std::vector<double> grad(kappa.size());
  std::vector<double> e(static_cast<std::size_t>(k), 0.0);
  for (int i = 0; i < n; ++i) {
    std::fill(e.begin(), e.end(), 0.0);
    e[0] = 1.0;
    int used = 0;
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      ++used;
      for (int m = std::min(used, k - 1); m >= 1; --m) e[m] += kappa[j] * e[m - 1];
    }
    grad[i] = e[k - 1];
  }
  return grad;
}

std::vector<double> complete_homogeneous_all(std::span<const double> kappa, int m) {
  // h_j(x_1..x_i) = h_j(x_1..x_{i-1}) + x_i h_{j-1}(x_1..x_i)
  std::vector<double> h(static_cast<std::size_t>(m) + 1, 0.0);
  h[0] = 1.0;
  for (double x : kappa) {
    for (int j = 1; j <= m; ++j) h[j] += x * h[j - 1];
  }
  return h;
}

// ---------------------------------------------------------------------------
// CurvatureSpec

CurvatureSpec::CurvatureSpec(Family f, int n, double alpha, int k, int l, double r)
    : family_(f), n_(n), alpha_(alpha), k_(k), l_(l), r_(r) {
  if (n < 1) throw DomainError("CurvatureSpec: n must be >= 1");
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) {
    throw DomainError("CurvatureSpec: shift alpha must be a nonnegative real");
  }
  switch (f) {
    case Family::CompletelySymmetric:
      if (k < 1 || k > n) throw DomainError("CompletelySymmetric: need 1 <= k <= n");
      break;
    case Family::ElemSymmetricQuotient:
      if (!(n >= k && k > l && l >= 0)) {
        throw DomainError("ElemSymmetricQuotient: need n >= k > l >= 0");
      }
      break;
    case Family::PowerMean:
      if (!(std::abs(r) <= 1.0)) throw DomainError("PowerMean: need |r| <= 1");
      break;
    default:
      break;
  }
  classification_ = (f == Family::MeanH || f == Family::NormA ||
                     f == Family::CompletelySymmetric)
                        ? Classification::Convex
                        : Classification::ConcaveInverseConcave;
  const std::vector<double> e(static_cast<std::size_t>(n), 1.0);
  c_ = 1.0 / raw(e);
}

CurvatureSpec CurvatureSpec::mean(int n, double alpha) {
  return {Family::MeanH, n, alpha, 0, 0, 1.0};
}
CurvatureSpec CurvatureSpec::norm(int n, double alpha) {
  return {Family::NormA, n, alpha, 0, 0, 1.0};
}
CurvatureSpec CurvatureSpec::completely_symmetric(int n, int k, double alpha) {
  return {Family::CompletelySymmetric, n, alpha, k, 0, 1.0};
}
CurvatureSpec CurvatureSpec::elem_quotient(int n, int k, int l, double alpha) {
  return {Family::ElemSymmetricQuotient, n, alpha, k, l, 1.0};
}
CurvatureSpec CurvatureSpec::power_mean(int n, double r, double alpha) {
  return {Family::PowerMean, n, alpha, 0, 0, r};
}

CurvatureSpec CurvatureSpec::make(Family family, int n, double param1, double param2,
                                  double alpha) {
  auto as_index = [](double v, const char* what) {
    if (v != std::floor(v)) throw DomainError(std::string(what) + " must be an integer");
    return static_cast<int>(v);
  };
  switch (family) {
    case Family::MeanH: return mean(n, alpha);
    case Family::NormA: return norm(n, alpha);
    case Family::CompletelySymmetric:
      return completely_symmetric(n, as_index(param1, "curvature.param1"), alpha);
    case Family::ElemSymmetricQuotient:
      return elem_quotient(n, as_index(param1, "curvature.param1"),
                           as_index(param2, "curvature.param2"), alpha);
    case Family::PowerMean: return power_mean(n, param1, alpha);
  }
  throw DomainError("CurvatureSpec::make: bad family");
}

std::string CurvatureSpec::describe() const {
  std::ostringstream os;
  os << to_string(family_);
  switch (family_) {
    case Family::CompletelySymmetric: os << "(k=" << k_ << ")"; break;
    case Family::ElemSymmetricQuotient: os << "(k=" << k_ << ",l=" << l_ << ")"; break;
    case Family::PowerMean: os << "(r=" << r_ << ")"; break;
    default: break;
  }
  os << " n=" << n_ << " alpha=" << alpha_;
  return os.str();
}

double CurvatureSpec::raw(std::span<const double> x) const {
  switch (family_) {
    case Family::MeanH:
      return std::accumulate(x.begin(), x.end(), 0.0);
    case Family::NormA:
      return std::sqrt(std::inner_product(x.begin(), x.end(), x.begin(), 0.0));
    case Family::CompletelySymmetric: {
      const auto h = complete_homogeneous_all(x, k_);
      return std::pow(h[k_], 1.0 / k_);
    }
    case Family::ElemSymmetricQuotient: {
      const auto e = elementary_symmetric_all(x);
      return std::pow(e[k_] / e[l_], 1.0 / (k_ - l_));
    }
    case Family::PowerMean: {
      if (r_ == 0.0) {
        double logsum = 0.0;
        for (double v : x) logsum += std::log(v);
        return std::exp(logsum / static_cast<double>(x.size()));
      }
      double s = 0.0;
      for (double v : x) s += std::pow(v, r_);
      return std::pow(s, 1.0 / r_);
    }
  }
  return 0.0;
}

void CurvatureSpec::raw_gradient(std::span<const double> x, std::span<double> out) const {
  const std::size_t n = x.size();
  switch (family_) {
    case Family::MeanH:
      std::fill(out.begin(), out.end(), 1.0);
      return;
    case Family::NormA: {
      const double norm = raw(x);
      for (std::size_t i = 0; i < n; ++i) out[i] = x[i] / norm;
      return;
    }
    case Family::CompletelySymmetric: {
      // dh_k/dx_i = h_{k-1}(x_1, ..., x_n, x_i)
      const auto h = complete_homogeneous_all(x, k_);
      const auto hk1 = complete_homogeneous_all(x, k_ - 1);
      const double outer = std::pow(h[k_], 1.0 / k_ - 1.0) / k_;
      for (std::size_t i = 0; i < n; ++i) {
        double acc = 0.0, pw = 1.0;
        // h_{k-1}(x, x_i) = sum_j x_i^j h_{k-1-j}(x)
        for (int j = 0; j <= k_ - 1; ++j) {
          acc += pw * hk1[k_ - 1 - j];
          pw *= x[i];
        }
        out[i] = outer * acc;
      }
      return;
    }
    case Family::ElemSymmetricQuotient: {
      const auto e = elementary_symmetric_all(x);
      const auto gk = elementary_symmetric_gradient(k_, x);
      const double q = e[k_] / e[l_];
      const double p = 1.0 / (k_ - l_);
      const double outer = p * std::pow(q, p - 1.0);
      if (l_ == 0) {
        for (std::size_t i = 0; i < n; ++i) out[i] = outer * gk[i];
        return;
      }
      const auto gl = elementary_symmetric_gradient(l_, x);
      for (std::size_t i = 0; i < n; ++i) {
        out[i] = outer * (gk[i] * e[l_] - e[k_] * gl[i]) / (e[l_] * e[l_]);
      }
      return;
    }
    case Family::PowerMean: {
      const double m = raw(x);
      if (r_ == 0.0) {
        for (std::size_t i = 0; i < n; ++i) out[i] = m / (static_cast<double>(n) * x[i]);
        return;
      }
      double s = 0.0;
      for (double v : x) s += std::pow(v, r_);
      for (std::size_t i = 0; i < n; ++i) out[i] = std::pow(x[i], r_ - 1.0) * m / s;
      return;
    }
  }
}

// ---------------------------------------------------------------------------
// evaluation

namespace {

constexpr std::size_t kInlineMax = 16;

struct Shifted {
  std::array<double, kInlineMax> buf{};
  std::vector<double> heap;
  std::span<double> view;

  explicit Shifted(std::size_t n) {
    if (n <= kInlineMax) {
      view = std::span<double>(buf.data(), n);
    } else {
      heap.resize(n);
      view = heap;
    }
  }
};

void shift_into_positive_cone(const CurvatureSpec& spec, std::span<const double> kappa,
                              std::span<double> out) {
  if (static_cast<int>(kappa.size()) != spec.n()) {
    throw DomainError("curvature vector has " + std::to_string(kappa.size()) +
                      " entries, spec expects n=" + std::to_string(spec.n()));
  }
  for (std::size_t i = 0; i < kappa.size(); ++i) {
    out[i] = kappa[i] - spec.alpha();
    if (!(out[i] > 0.0)) {
      std::ostringstream os;
      os << "kappa[" << i << "] = " << kappa[i] << " is not above alpha = " << spec.alpha();
      throw AdmissibilityError(os.str(), -1, static_cast<std::ptrdiff_t>(i));
    }
  }
  if (spec.family() == Family::ElemSymmetricQuotient && spec.l() >= 1) {
    const auto m = cone_membership(out, Cone::garding(spec.l()));
    if (!m.inside) {
      throw AdmissibilityError("shifted curvatures outside Gamma_l of the denominator", -1,
                               m.worst);
    }
  }
}

}  // namespace

double eval_F(const CurvatureSpec& spec, std::span<const double> kappa) {
  Shifted s(kappa.size());
  shift_into_positive_cone(spec, kappa, s.view);
  return spec.normalization() * spec.raw(s.view);
}

double eval_F_and_grad(const CurvatureSpec& spec, std::span<const double> kappa,
                       std::span<double> grad_out) {
  Shifted s(kappa.size());
  shift_into_positive_cone(spec, kappa, s.view);
  const double value = spec.normalization() * spec.raw(s.view);
  spec.raw_gradient(s.view, grad_out);
  for (double& g : grad_out) g *= spec.normalization();
#ifndef NDEBUG
  double euler = 0.0;
  for (std::size_t i = 0; i < kappa.size(); ++i) euler += grad_out[i] * s.view[i];
  assert(std::abs(euler - value) <= 1e-9 * std::max(1.0, std::abs(value)));
#endif
  return value;
}

std::vector<double> grad_F(const CurvatureSpec& spec, std::span<const double> kappa) {
  std::vector<double> g(kappa.size());
  eval_F_and_grad(spec, kappa, g);
  return g;
}

ConeMembership cone_membership(std::span<const double> kappa, const Cone& cone) {
  ConeMembership m{true, std::numeric_limits<double>::infinity(), -1};
  switch (cone.kind) {
    case Cone::Kind::GammaPlus:
    case Cone::Kind::GammaAlpha: {
      const double shift = cone.kind == Cone::Kind::GammaAlpha ? cone.alpha : 0.0;
      for (std::size_t i = 0; i < kappa.size(); ++i) {
        const double slack = kappa[i] - shift;
        if (slack < m.margin) {
          m.margin = slack;
          m.worst = static_cast<int>(i);
        }
      }
      break;
    }
    case Cone::Kind::GammaK: {
      if (cone.k < 1 || cone.k > static_cast<int>(kappa.size())) {
        throw DomainError("cone_membership: Gamma_k needs 1 <= k <= n");
      }
      const auto e = elementary_symmetric_all(kappa);
      for (int j = 1; j <= cone.k; ++j) {
        if (e[j] < m.margin) {
          m.margin = e[j];
          m.worst = j;
        }
      }
      break;
    }
  }
  m.inside = m.margin > 0.0;
  return m;
}

// ---------------------------------------------------------------------------
// randomized certification

bool AssumptionReport::all_required_pass() const {
  return std::all_of(checks.begin(), checks.end(),
                     [](const HypothesisCheck& c) { return !c.required || c.passed; });
}

const HypothesisCheck* AssumptionReport::find(const std::string& name) const {
  for (const auto& c : checks) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

std::string AssumptionReport::format() const {
  std::ostringstream os;
  os.precision(6);
  os << "curvature function: " << spec << "\n";
  os << "samples: " << samples << "  seed: " << seed << "\n";
  for (const auto& c : checks) {
    os << (c.passed ? "  [ok]   " : (c.required ? "  [FAIL] " : "  [no]   ")) << c.name
       << (c.required ? "" : " (informational)");
    if (!c.passed) {
      os << "  failures=" << c.failures << " worst=" << c.worst;
      if (!c.witness.empty()) {
        os << " witness=(";
        for (std::size_t i = 0; i < c.witness.size(); ++i) os << (i ? "," : "") << c.witness[i];
        os << ")";
      }
      if (!c.witness_pair.empty()) {
        os << " with (";
        for (std::size_t i = 0; i < c.witness_pair.size(); ++i) {
          os << (i ? "," : "") << c.witness_pair[i];
        }
        os << ")";
      }
    }
    if (!c.note.empty()) os << "  -- " << c.note;
    os << "\n";
  }
  os << (all_required_pass() ? "all required hypotheses hold\n"
                             : "some required hypotheses are violated\n");
  return os.str();
}

namespace {

class CheckAccumulator {
 public:
  CheckAccumulator(std::string name, bool required) {
    check_.name = std::move(name);
    check_.required = required;
    check_.passed = true;
  }

  void record(double violation, std::span<const double> at,
              std::span<const double> pair = {}) {
    if (!(violation > 0.0) && !std::isnan(violation)) return;
    if (std::isnan(violation)) violation = std::numeric_limits<double>::infinity();
    check_.passed = false;
    ++check_.failures;
    if (violation > check_.worst || check_.failures == 1) {
      check_.worst = violation;
      check_.witness.assign(at.begin(), at.end());
      check_.witness_pair.assign(pair.begin(), pair.end());
    }
  }

  HypothesisCheck take(std::string note = {}) {
    check_.note = std::move(note);
    return std::move(check_);
  }

 private:
  HypothesisCheck check_;
};

}  // namespace

AssumptionReport verify_assumptions(const CurvatureSpec& spec, std::size_t samples,
                                    std::uint64_t seed) {
  if (samples < 1) throw DomainError("verify_assumptions: need at least one sample");
  const int n = spec.n();
  const double alpha = spec.alpha();
  const bool convex = spec.classification() == Classification::Convex;

  AssumptionReport report;
  report.spec = spec.describe();
  report.samples = samples;
  report.seed = seed;

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> log_entry(std::log(0.05), std::log(5.0));
  std::uniform_real_distribution<double> log_scale(std::log(0.1), std::log(10.0));
  auto sample_positive = [&](std::vector<double>& v) {
    for (auto& x : v) x = std::exp(log_entry(rng));
  };

  // F tilde on the positive cone (normalized, unshifted)
  auto ftilde = [&](std::span<const double> x) { return spec.normalization() * spec.raw(x); };

  CheckAccumulator normalized("normalization", true);
  CheckAccumulator homogeneity("homogeneity", true);
  CheckAccumulator positivity("gradient_positivity", true);
  CheckAccumulator fd("gradient_vs_finite_difference", true);
  CheckAccumulator euler("euler_identity", true);
  CheckAccumulator der_identity("elementary_derivative_identity", true);
  CheckAccumulator convexity("convexity", convex);
  CheckAccumulator concavity("concavity", !convex);
  CheckAccumulator inv_concavity("inverse_concavity", !convex);
  CheckAccumulator inv_literal("negated_reciprocal_concavity", false);
  CheckAccumulator fh("F_vs_mean_inequality", true);
  CheckAccumulator fg("gradient_sum_inequality", true);

  {
    const std::vector<double> e(static_cast<std::size_t>(n), 1.0);
    normalized.record(std::abs(ftilde(e) - 1.0) - 1e-14, e);
  }

  std::vector<double> x(n), y(n), mid(n), kappa(n), scaled(n), grad(n), tmp(n), inv(n);
  for (std::size_t s = 0; s < samples; ++s) {
    sample_positive(x);
    sample_positive(y);
    for (int i = 0; i < n; ++i) kappa[i] = x[i] + alpha;

    const double value = eval_F_and_grad(spec, kappa, grad);
    const double scale = std::max(1.0, std::abs(value));

    // F(alpha e + lambda (kappa - alpha e)) = lambda F(kappa)
    const double lambda = std::exp(log_scale(rng));
    for (int i = 0; i < n; ++i) scaled[i] = alpha + lambda * x[i];
    homogeneity.record(std::abs(eval_F(spec, scaled) - lambda * value) -
                           1e-10 * std::max(1.0, lambda * std::abs(value)),
                       kappa);

    double gmax = 0.0;
    for (int i = 0; i < n; ++i) {
      positivity.record(grad[i] > 0.0 ? 0.0 : 1.0 - grad[i], kappa);
      gmax = std::max(gmax, std::abs(grad[i]));
    }

    constexpr double kStep = 1e-6;
    for (int i = 0; i < n; ++i) {
      tmp = kappa;
      tmp[i] = kappa[i] + kStep;
      const double up = eval_F(spec, tmp);
      tmp[i] = kappa[i] - kStep;
      const double down = eval_F(spec, tmp);
      const double approx = (up - down) / (2.0 * kStep);
      fd.record(std::abs(approx - grad[i]) - 1e-6 * gmax, kappa);
    }

    double sum = 0.0, gsum = 0.0, hsum = 0.0;
    for (int i = 0; i < n; ++i) {
      sum += grad[i] * x[i];
      gsum += grad[i];
      hsum += x[i];
    }
    euler.record(std::abs(sum - value) - 1e-10 * scale, kappa);

    // H_k = dH_{k+1}/dk_i + k_i dH_k/dk_i for k = 1..n (dH_{n+1} = 0)
    {
      const auto e = elementary_symmetric_all(x);
      std::vector<double> next;
      for (int k = 1; k <= n; ++k) {
        const auto gk = elementary_symmetric_gradient(k, x);
        if (k < n) next = elementary_symmetric_gradient(k + 1, x);
        for (int i = 0; i < n; ++i) {
          const double rhs = (k < n ? next[i] : 0.0) + x[i] * gk[i];
          der_identity.record(std::abs(e[k] - rhs) - 1e-12 * std::max(1.0, std::abs(e[k])),
                              x);
        }
      }
    }

    // F <= H/n (concave) or >= (convex), normalized at e
    const double fx = ftilde(x);
    const double hmean = hsum / n;
    const double fh_tol = 1e-12 * std::max(1.0, hmean);
    fh.record(convex ? (hmean - fx) - fh_tol : (fx - hmean) - fh_tol, x);
    // sum F_i >= 1 (concave) or <= 1 (convex)
    fg.record(convex ? (gsum - 1.0) - 1e-12 : (1.0 - gsum) - 1e-12, x);

    // midpoint tests along the segment [x, y] in Gamma_+
    for (int i = 0; i < n; ++i) mid[i] = 0.5 * (x[i] + y[i]);
    const double fy = ftilde(y);
    const double fm = ftilde(mid);
    const double avg = 0.5 * (fx + fy);
    const double mtol = 1e-12 * std::max(1.0, std::abs(avg));
    convexity.record((fm - avg) - mtol, x, y);
    concavity.record((avg - fm) - mtol, x, y);

    // F_*(k) = 1 / F(1/k)
    auto dual = [&](std::span<const double> v) {
      for (int i = 0; i < n; ++i) inv[i] = 1.0 / v[i];
      return 1.0 / ftilde(inv);
    };
    const double dx = dual(x), dy = dual(y), dm = dual(mid);
    const double davg = 0.5 * (dx + dy);
    inv_concavity.record((davg - dm) - 1e-12 * std::max(1.0, std::abs(davg)), x, y);

    auto negated = [&](std::span<const double> v) {
      for (int i = 0; i < n; ++i) inv[i] = 1.0 / v[i];
      return -ftilde(inv);
    };
    const double nx = negated(x), ny = negated(y), nm = negated(mid);
    const double navg = 0.5 * (nx + ny);
    inv_literal.record((navg - nm) - 1e-12 * std::max(1.0, std::abs(navg)), x, y);
  }

  report.checks.push_back(normalized.take());
  report.checks.push_back(homogeneity.take());
  report.checks.push_back(positivity.take());
  report.checks.push_back(fd.take());
  report.checks.push_back(euler.take());
  report.checks.push_back(der_identity.take());
  report.checks.push_back(convexity.take());
  report.checks.push_back(concavity.take());
  report.checks.push_back(inv_concavity.take("dual 1/F(1/kappa) concave"));
  report.checks.push_back(inv_literal.take(
      "alternative reading: -F(1/kappa) concave; differs from the dual form in general"));
  report.checks.push_back(fh.take(convex ? "F >= H/n" : "F <= H/n"));
  report.checks.push_back(fg.take(convex ? "sum F_i <= 1" : "sum F_i >= 1"));
  return report;
}

}  // namespace hflow
