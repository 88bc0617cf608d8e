#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "hflow/curvfn.hpp"
#include "hflow/errors.hpp"

using namespace hflow;

namespace {

// sum over all k-subsets of the product of the chosen entries
double brute_elementary(const std::vector<double>& x, int k) {
  const int n = static_cast<int>(x.size());
  double total = 0.0;
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    if (__builtin_popcount(mask) != k) continue;
    double p = 1.0;
    for (int i = 0; i < n; ++i) {
      if (mask & (1u << i)) p *= x[i];
    }
    total += p;
  }
  return total;
}

// sum over all multisets of size k
double brute_complete(const std::vector<double>& x, int k, std::size_t start = 0) {
  if (k == 0) return 1.0;
  double total = 0.0;
  for (std::size_t i = start; i < x.size(); ++i) total += x[i] * brute_complete(x, k - 1, i);
  return total;
}

std::vector<CurvatureSpec> all_specs(int n, double alpha) {
  std::vector<CurvatureSpec> out{CurvatureSpec::mean(n, alpha), CurvatureSpec::norm(n, alpha)};
  for (int k = 1; k <= n; ++k) out.push_back(CurvatureSpec::completely_symmetric(n, k, alpha));
  for (int k = 1; k <= n; ++k) {
    for (int l = 0; l < k; ++l) out.push_back(CurvatureSpec::elem_quotient(n, k, l, alpha));
  }
  for (double r : {-1.0, -0.5, 0.0, 0.5, 1.0}) out.push_back(CurvatureSpec::power_mean(n, r, alpha));
  return out;
}

std::vector<double> random_kappa(std::mt19937_64& rng, int n, double alpha) {
  std::uniform_real_distribution<double> d(0.05, 3.0);
  std::vector<double> k(n);
  for (auto& x : k) x = alpha + d(rng);
  return k;
}

}  // namespace

TEST(ElementarySymmetric, HandExpansion) {
  const std::vector<double> k{1.0, 2.0, 3.0};
  EXPECT_EQ(elementary_symmetric_all(k), (std::vector<double>{1.0, 6.0, 11.0, 6.0}));
}

TEST(ElementarySymmetric, ConstantVector) {
  for (int n = 1; n <= 7; ++n) {
    const std::vector<double> k(n, 1.7);
    const auto e = elementary_symmetric_all(k);
    for (int j = 0; j <= n; ++j) {
      double binom = 1.0;
      for (int i = 1; i <= j; ++i) binom = binom * (n - j + i) / i;
      EXPECT_NEAR(e[j], binom * std::pow(1.7, j), 1e-12 * e[j]);
    }
  }
}

TEST(ElementarySymmetric, MatchesSubsetEnumeration) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> d(0.0, 2.0);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 1 + trial % 6;
    std::vector<double> x(n);
    for (auto& v : x) v = d(rng);
    const auto e = elementary_symmetric_all(x);
    for (int k = 0; k <= n; ++k) {
      EXPECT_NEAR(e[k], brute_elementary(x, k), 1e-12 * std::max(1.0, e[k]));
    }
  }
}

TEST(ElementarySymmetric, GradientExamples) {
  const std::vector<double> k{1.0, 2.0, 3.0};
  EXPECT_EQ(elementary_symmetric_gradient(1, k), (std::vector<double>{1.0, 1.0, 1.0}));
  EXPECT_EQ(elementary_symmetric_gradient(2, k), (std::vector<double>{5.0, 4.0, 3.0}));
  EXPECT_EQ(elementary_symmetric_gradient(3, k), (std::vector<double>{6.0, 3.0, 2.0}));
  EXPECT_THROW(elementary_symmetric_gradient(0, k), DomainError);
  EXPECT_THROW(elementary_symmetric_gradient(4, k), DomainError);
}

TEST(ElementarySymmetric, DerivativeIdentity) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> d(-1.0, 2.0);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + trial % 7;
    std::vector<double> x(n);
    for (auto& v : x) v = d(rng);
    const auto e = elementary_symmetric_all(x);
    for (int k = 1; k <= n; ++k) {
      const auto gk = elementary_symmetric_gradient(k, x);
      const auto gk1 = k < n ? elementary_symmetric_gradient(k + 1, x) : std::vector<double>(n);
      for (int i = 0; i < n; ++i) {
        EXPECT_NEAR(e[k], gk1[i] + x[i] * gk[i], 1e-12 * std::max(1.0, std::abs(e[k])));
      }
    }
  }
}

TEST(CompleteHomogeneous, MatchesMultisetEnumeration) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> d(0.1, 2.0);
  for (int n = 1; n <= 5; ++n) {
    std::vector<double> x(n);
    for (auto& v : x) v = d(rng);
    const auto h = complete_homogeneous_all(x, 4);
    for (int k = 0; k <= 4; ++k) EXPECT_NEAR(h[k], brute_complete(x, k), 1e-12 * h[k]);
  }
}

TEST(CurvatureSpec, ParameterRanges) {
  EXPECT_THROW(CurvatureSpec::completely_symmetric(3, 0), DomainError);
  EXPECT_THROW(CurvatureSpec::completely_symmetric(3, 4), DomainError);
  EXPECT_THROW(CurvatureSpec::elem_quotient(3, 2, 2), DomainError);
  EXPECT_THROW(CurvatureSpec::elem_quotient(3, 4, 1), DomainError);
  EXPECT_THROW(CurvatureSpec::elem_quotient(3, 2, -1), DomainError);
  EXPECT_THROW(CurvatureSpec::power_mean(3, 1.5), DomainError);
  EXPECT_THROW(CurvatureSpec::power_mean(3, -2.0), DomainError);
  EXPECT_THROW(CurvatureSpec::mean(2, -0.1), DomainError);
  EXPECT_THROW(CurvatureSpec::make(Family::CompletelySymmetric, 3, 1.5, 0.0, 0.0), DomainError);
  EXPECT_THROW(family_from_string("Gauss"), DomainError);
}

TEST(CurvatureSpec, Classification) {
  EXPECT_EQ(CurvatureSpec::mean(3).classification(), Classification::Convex);
  EXPECT_EQ(CurvatureSpec::norm(3).classification(), Classification::Convex);
  EXPECT_EQ(CurvatureSpec::completely_symmetric(3, 2).classification(), Classification::Convex);
  EXPECT_EQ(CurvatureSpec::elem_quotient(3, 2, 1).classification(),
            Classification::ConcaveInverseConcave);
  EXPECT_EQ(CurvatureSpec::power_mean(3, -0.5).classification(),
            Classification::ConcaveInverseConcave);
  for (auto f : {Family::MeanH, Family::NormA, Family::CompletelySymmetric,
                 Family::ElemSymmetricQuotient, Family::PowerMean}) {
    EXPECT_EQ(family_from_string(to_string(f)), f);
  }
}

TEST(EvalF, NormalizedAtUnitVector) {
  for (int n = 1; n <= 5; ++n) {
    for (double alpha : {0.0, 0.4, 1.0}) {
      const std::vector<double> e(n, 1.0 + alpha);
      for (const auto& spec : all_specs(n, alpha)) {
        EXPECT_NEAR(eval_F(spec, e), 1.0, 1e-15) << spec.describe();
      }
    }
  }
}

TEST(EvalF, Examples) {
  const std::vector<double> k{1.0, 2.0, 3.0};
  EXPECT_NEAR(eval_F(CurvatureSpec::mean(3), k), 2.0, 1e-15);
  EXPECT_NEAR(eval_F(CurvatureSpec::power_mean(3, 1.0), k), 2.0, 1e-15);
  EXPECT_NEAR(eval_F(CurvatureSpec::elem_quotient(3, 2, 1), k), 11.0 / 6.0, 1e-15);
  EXPECT_NEAR(eval_F(CurvatureSpec::norm(3), k), std::sqrt(14.0 / 3.0), 1e-15);
  EXPECT_NEAR(eval_F(CurvatureSpec::power_mean(3, 0.0), k), std::cbrt(6.0), 1e-15);
  EXPECT_NEAR(eval_F(CurvatureSpec::power_mean(3, -1.0), k), 3.0 / (1.0 + 0.5 + 1.0 / 3.0), 1e-15);
  // gamma_2 = sqrt(h_2 / h_2(e)), h_2(1,2,3) = 25, h_2(e) = 6
  EXPECT_NEAR(eval_F(CurvatureSpec::completely_symmetric(3, 2), k), std::sqrt(25.0 / 6.0), 1e-14);
  // shift: F(kappa) = F~(kappa - alpha)
  const std::vector<double> shifted{1.5, 2.5, 3.5};
  EXPECT_NEAR(eval_F(CurvatureSpec::elem_quotient(3, 2, 1, 0.5), shifted), 11.0 / 6.0, 1e-14);
}

TEST(EvalF, PowerMeanOneIsMean) {
  std::mt19937_64 rng(2);
  for (int i = 0; i < 100; ++i) {
    const auto k = random_kappa(rng, 4, 0.0);
    EXPECT_NEAR(eval_F(CurvatureSpec::power_mean(4, 1.0), k), eval_F(CurvatureSpec::mean(4), k),
                1e-14);
  }
}

TEST(EvalF, AdmissibilityErrorNamesComponent) {
  const auto spec = CurvatureSpec::mean(3, 1.0);
  try {
    eval_F(spec, std::vector<double>{2.0, 0.9, 3.0});
    FAIL() << "expected AdmissibilityError";
  } catch (const AdmissibilityError& e) {
    EXPECT_EQ(e.component(), 1);
  }
  EXPECT_THROW(eval_F(spec, std::vector<double>{1.0, 2.0, 3.0}), AdmissibilityError);
  EXPECT_THROW(grad_F(spec, std::vector<double>{2.0, 2.0, 1.0}), AdmissibilityError);
}

TEST(GradF, MeanIsConstant) {
  const auto g = grad_F(CurvatureSpec::mean(4), std::vector<double>{0.3, 1.0, 2.0, 7.0});
  for (double x : g) EXPECT_NEAR(x, 0.25, 1e-16);
}

TEST(GradF, FiniteDifferenceEulerAndPositivity) {
  std::mt19937_64 rng(17);
  for (int n = 1; n <= 4; ++n) {
    for (double alpha : {0.0, 1.0}) {
      for (const auto& spec : all_specs(n, alpha)) {
        for (int trial = 0; trial < 20; ++trial) {
          const auto k = random_kappa(rng, n, alpha);
          const auto g = grad_F(spec, k);
          const double F = eval_F(spec, k);
          double euler = 0.0, gmax = 0.0;
          for (int i = 0; i < n; ++i) {
            EXPECT_GT(g[i], 0.0) << spec.describe();
            euler += g[i] * (k[i] - alpha);
            gmax = std::max(gmax, g[i]);
          }
          EXPECT_NEAR(euler, F, 1e-10 * std::max(1.0, F)) << spec.describe();
          for (int i = 0; i < n; ++i) {
            auto up = k, down = k;
            up[i] += 1e-6;
            down[i] -= 1e-6;
            const double fd = (eval_F(spec, up) - eval_F(spec, down)) / 2e-6;
            EXPECT_NEAR(fd, g[i], 1e-6 * gmax) << spec.describe();
          }
        }
      }
    }
  }
}

TEST(Cone, Examples) {
  auto m = cone_membership(std::vector<double>{1.0, 1.0, 1.0}, Cone::plus());
  EXPECT_TRUE(m.inside);
  EXPECT_DOUBLE_EQ(m.margin, 1.0);
  m = cone_membership(std::vector<double>{2.0, 2.0}, Cone::shifted(1.0));
  EXPECT_TRUE(m.inside);
  EXPECT_DOUBLE_EQ(m.margin, 1.0);
  m = cone_membership(std::vector<double>{3.0, -1.0}, Cone::garding(2));
  EXPECT_FALSE(m.inside);
  EXPECT_DOUBLE_EQ(m.margin, -3.0);
  EXPECT_EQ(m.worst, 2);
  EXPECT_THROW(cone_membership(std::vector<double>{1.0}, Cone::garding(2)), DomainError);
}

TEST(Cone, PositiveConeInsideEveryGardingCone) {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> d(1e-3, 4.0);
  for (int trial = 0; trial < 10000; ++trial) {
    const int n = 1 + trial % 6;
    std::vector<double> x(n);
    for (auto& v : x) v = d(rng);
    ASSERT_TRUE(cone_membership(x, Cone::plus()).inside);
    for (int k = 1; k <= n; ++k) ASSERT_TRUE(cone_membership(x, Cone::garding(k)).inside);
  }
}

TEST(VerifyAssumptions, MeanPassesEverything) {
  const auto rep = verify_assumptions(CurvatureSpec::mean(3), 2000, 1);
  for (const auto& c : rep.checks) {
    if (c.name == "negated_reciprocal_concavity") continue;
    EXPECT_TRUE(c.passed) << c.name;
  }
  EXPECT_TRUE(rep.all_required_pass());
}

TEST(VerifyAssumptions, NormConvexWithGradientSumAtMostOne) {
  const auto rep = verify_assumptions(CurvatureSpec::norm(3), 10000, 2);
  EXPECT_TRUE(rep.find("convexity")->passed);
  EXPECT_TRUE(rep.find("gradient_sum_inequality")->passed);
  EXPECT_TRUE(rep.find("F_vs_mean_inequality")->passed);
  EXPECT_TRUE(rep.all_required_pass());
}

TEST(VerifyAssumptions, QuotientConcaveNotConvex) {
  const auto rep = verify_assumptions(CurvatureSpec::elem_quotient(3, 2, 1), 10000, 3);
  EXPECT_TRUE(rep.find("concavity")->passed);
  EXPECT_TRUE(rep.find("inverse_concavity")->passed);
  const auto* conv = rep.find("convexity");
  EXPECT_FALSE(conv->passed);
  EXPECT_FALSE(conv->required);
  ASSERT_EQ(conv->witness.size(), 3u);
  ASSERT_EQ(conv->witness_pair.size(), 3u);
  // the witness really violates midpoint convexity
  const auto spec = CurvatureSpec::elem_quotient(3, 2, 1);
  std::vector<double> mid(3);
  for (int i = 0; i < 3; ++i) mid[i] = 0.5 * (conv->witness[i] + conv->witness_pair[i]);
  EXPECT_GT(eval_F(spec, mid),
            0.5 * (eval_F(spec, conv->witness) + eval_F(spec, conv->witness_pair)));
  EXPECT_TRUE(rep.all_required_pass());
}

TEST(VerifyAssumptions, AllFamiliesPassTheirClass) {
  for (int n : {2, 3}) {
    for (const auto& spec : all_specs(n, 1.0)) {
      const auto rep = verify_assumptions(spec, 1000, 9);
      EXPECT_TRUE(rep.all_required_pass()) << rep.format();
    }
  }
}

TEST(VerifyAssumptions, DeterministicForSeed) {
  const auto spec = CurvatureSpec::power_mean(3, -0.5, 0.2);
  EXPECT_EQ(verify_assumptions(spec, 500, 42).format(), verify_assumptions(spec, 500, 42).format());
  EXPECT_THROW(verify_assumptions(spec, 0, 1), DomainError);
}
