#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "hflow/errors.hpp"
#include "hflow/flow.hpp"

using namespace hflow;
using std::numbers::pi;

namespace {

std::vector<CurvatureSpec> specs_for(int n, double alpha) {
  std::vector<CurvatureSpec> out{CurvatureSpec::mean(n, alpha), CurvatureSpec::norm(n, alpha)};
  for (int k = 1; k <= n; ++k) out.push_back(CurvatureSpec::completely_symmetric(n, k, alpha));
  for (int k = 1; k <= n; ++k) {
    for (int l = 0; l < k; ++l) out.push_back(CurvatureSpec::elem_quotient(n, k, l, alpha));
  }
  for (double r : {-1.0, 0.0, 0.5, 1.0}) out.push_back(CurvatureSpec::power_mean(n, r, alpha));
  return out;
}

GraphPatch cosine_circle(std::size_t N, double amp = 0.1) {
  return GraphPatch::sample(Backend::FullCircle, AmbientParams(1.0, 1), N,
                            [&](double t) { return 1.0 + amp * std::cos(t); });
}

FlowConfig circle_config(int k) {
  FlowConfig c;
  c.ambient = AmbientParams(1.0, 1);
  c.curvature = CurvatureSpec::mean(1, 1.0);
  c.k = k;
  c.initial.backend = Backend::FullCircle;
  c.initial.N = 256;
  c.initial.kind = InitialShape::Cosine;
  c.initial.radius = 1.0;
  c.initial.amp = 0.1;
  c.initial.mode = 1;
  return c;
}

}  // namespace

TEST(GlobalTerm, SphereEqualsF) {
  for (int n = 1; n <= 3; ++n) {
    const AmbientParams p(1.0, n);
    const Backend b = n == 1 ? Backend::FullCircle : Backend::Axisymmetric;
    const auto patch = GraphPatch::sphere(b, p, 32, 0.8);
    for (const auto& spec : specs_for(n, 1.0)) {
      const std::vector<double> kap(n, 1.0 / std::tanh(0.8));
      const double F = eval_F(spec, kap);
      for (int k = 0; k <= n; ++k) {
        const auto s = make_state(patch, spec, k);
        EXPECT_NEAR(s.f, F, 1e-13 * std::max(1.0, F)) << spec.describe() << " k=" << k;
      }
    }
  }
}

TEST(GlobalTerm, AreaAverageOracle) {
  const auto patch = cosine_circle(256);
  const auto spec = CurvatureSpec::mean(1, 0.0);
  const auto s = make_state(patch, spec, 0);
  // independent: curvature from the plane-curve formula, rectangle rule in theta
  double num = 0.0, den = 0.0;
  for (std::size_t j = 0; j < 256; ++j) {
    const double g = std::sqrt(s.geometry.g_tt[j]);
    num += s.geometry.kappa_t[j] * g;
    den += g;
  }
  EXPECT_NEAR(s.f, num / den, 1e-10);
  EXPECT_NEAR(global_term(s, 0), s.f, 1e-15);
}

TEST(GlobalTerm, WeightForKEqualTwoInDimensionTwo) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> d(1.0, 3.0);
  GeometryFields g;
  g.n = 2;
  g.N = 50;
  for (std::size_t j = 0; j < g.N; ++j) {
    g.kappa_flat.push_back(d(rng));
    g.kappa_flat.push_back(d(rng));
  }
  for (double a : {0.5, 1.0, 2.0}) {
    const auto w = global_weight(g, a, 2);
    for (std::size_t j = 0; j < g.N; ++j) {
      const double k1 = g.kappa_flat[2 * j], k2 = g.kappa_flat[2 * j + 1];
      EXPECT_NEAR(w[j], 2.0 * k1 * k2 + a * a * 2.0, 1e-12 * w[j]);
    }
  }
  EXPECT_THROW(global_weight(g, 1.0, 3), DomainError);
}

TEST(FlowRhs, VanishesOnSpheres) {
  for (int n = 1; n <= 3; ++n) {
    const Backend b = n == 1 ? Backend::FullCircle : Backend::Axisymmetric;
    const auto patch = GraphPatch::sphere(b, AmbientParams(1.0, n), 64, 1.3);
    for (const auto& spec : specs_for(n, 1.0)) {
      for (int k = 0; k <= n; ++k) {
        const auto rhs = flow_rhs(make_state(patch, spec, k));
        for (double x : rhs) EXPECT_LE(std::abs(x), 1e-10);
      }
    }
  }
}

TEST(FlowRhs, WeightedMeanOfFMinusFVanishes) {
  const auto patch = GraphPatch::sample(Backend::Axisymmetric, AmbientParams(1.0, 3), 64,
                                        [](double t) { return 1.0 + 0.1 * std::cos(t) + 0.05 * std::cos(2 * t); });
  for (const auto& spec : specs_for(3, 1.0)) {
    for (int k = 0; k <= 3; ++k) {
      const auto s = make_state(patch, spec, k);
      const auto w = global_weight(s.geometry, 1.0, k);
      std::vector<double> field(w.size());
      double scale = 0.0;
      for (std::size_t j = 0; j < w.size(); ++j) {
        field[j] = w[j] * (s.F[j] - s.f);
        scale += std::abs(w[j] * s.F[j]);
      }
      EXPECT_NEAR(surface_integral(patch, s.geometry, field), 0.0, 1e-12 * scale);
    }
  }
}

TEST(FlowRhs, SignFollowsFMinusF) {
  const auto s = make_state(cosine_circle(128), CurvatureSpec::mean(1, 1.0), 0);
  const auto rhs = flow_rhs(s);
  for (std::size_t j = 0; j < rhs.size(); ++j) {
    if (s.F[j] > s.f + 1e-12) EXPECT_LT(rhs[j], 0.0);
    if (s.F[j] < s.f - 1e-12) EXPECT_GT(rhs[j], 0.0);
  }
}

TEST(FlowState, InadmissibleNodeIsNamed) {
  // circle larger than the shift allows: kappa = coth(3) < alpha = 1.1
  const auto patch = GraphPatch::sphere(Backend::FullCircle, AmbientParams(1.0, 1), 16, 3.0);
  try {
    make_state(patch, CurvatureSpec::mean(1, 1.1), 0);
    FAIL();
  } catch (const AdmissibilityError& e) {
    EXPECT_GE(e.node(), 0);
  }
}

TEST(Advance, SphereIsStationary) {
  FlowConfig c = circle_config(0);
  c.initial.kind = InitialShape::Sphere;
  auto s = make_state(make_initial_patch(c.ambient, c.initial), c.curvature, 0);
  const auto u0 = std::vector<double>(s.patch.u().begin(), s.patch.u().end());
  for (int i = 0; i < 20; ++i) {
    const auto next = advance(s, c);
    for (std::size_t j = 0; j < u0.size(); ++j) {
      EXPECT_LE(std::abs(next.patch.u(j) - s.patch.u(j)), 1e-12);
    }
    EXPECT_GT(next.t, s.t);
    s = next;
  }
}

TEST(Advance, TimeStepQuartersWhenGridDoubles) {
  const auto spec = CurvatureSpec::mean(1, 1.0);
  for (double amp : {0.0, 0.1}) {
    const double dt1 = stable_time_step(make_state(cosine_circle(128, amp), spec, 0), 0.3);
    const double dt2 = stable_time_step(make_state(cosine_circle(256, amp), spec, 0), 0.3);
    EXPECT_NEAR(dt1 / dt2, 4.0, 1e-3);
  }
}

TEST(Advance, OneStepPreservesLength) {
  FlowConfig c = circle_config(1);
  const auto s = make_state(make_initial_patch(c.ambient, c.initial), c.curvature, 1);
  const auto next = advance(s, c);
  const double a0 = area(s.patch, s.geometry);
  EXPECT_LE(std::abs(area(next.patch, next.geometry) - a0) / a0, 1e-8);
  EXPECT_EQ(next.step, 1u);
}

TEST(Advance, VolumeCorrectionHoldsTarget) {
  FlowConfig c = circle_config(1);
  c.volume_correction = true;
  c.fixed_dt = 1e-2;
  auto s = make_state(make_initial_patch(c.ambient, c.initial), c.curvature, 1);
  for (int i = 0; i < 5; ++i) s = advance(s, c);
  EXPECT_NEAR(mixed_volume(s.patch, s.geometry, 1), s.preserved_target, 1e-13 * s.preserved_target);
}

TEST(Advance, RecenterWhenGraphDrifts) {
  FlowConfig c = circle_config(0);
  c.initial.kind = InitialShape::DisplacedSphere;
  c.initial.amp = 0.6;
  auto s = make_state(make_initial_patch(c.ambient, c.initial), c.curvature, 0);
  c.min_u_before_recenter = 0.5;
  EXPECT_TRUE(needs_recenter(s, c));
  const auto next = advance(s, c);
  EXPECT_EQ(next.recenter_count, 1u);
  for (double u : next.patch.u()) EXPECT_NEAR(u, 1.0, 1e-6);
}

TEST(Advance, StepRejectedAfterRepeatedAdmissibilityLoss) {
  // barely admissible curve with an absurd fixed step
  FlowConfig c = circle_config(0);
  c.curvature = CurvatureSpec::mean(1, 1.0);
  c.initial.radius = 4.0;
  c.initial.amp = 0.0;
  c.initial.kind = InitialShape::Cosine;
  c.initial.mode = 3;
  c.initial.amp = 0.02;
  c.fixed_dt = 1e9;
  const auto patch = make_initial_patch(c.ambient, c.initial);
  const auto s = make_state(patch, c.curvature, 0);
  EXPECT_THROW(
      {
        auto t = s;
        for (int i = 0; i < 3; ++i) t = advance(t, c);
      },
      StepRejected);
}

TEST(Config, Validate) {
  FlowConfig c = circle_config(0);
  EXPECT_NO_THROW(validate(c));
  c.k = 2;
  EXPECT_THROW(validate(c), DomainError);
  c = circle_config(0);
  c.cfl_safety = 1.0;
  EXPECT_THROW(validate(c), DomainError);
  c = circle_config(0);
  c.curvature = CurvatureSpec::mean(2, 1.0);
  EXPECT_THROW(validate(c), DomainError);
}

TEST(InitialPatch, ShapesAndNames) {
  const AmbientParams p(1.0, 2);
  InitialPatch init;
  init.backend = Backend::Axisymmetric;
  init.N = 64;
  init.kind = InitialShape::DisplacedSphere;
  init.radius = 1.0;
  init.amp = 0.3;
  const auto patch = make_initial_patch(p, init);
  const auto g = build_geometry(patch);
  for (std::size_t j = 0; j < g.N; ++j) {
    for (double k : g.kappa(j)) EXPECT_NEAR(k, 1.0 / std::tanh(1.0), 1e-5);
  }
  init.kind = InitialShape::Random;
  init.amp = 0.05;
  init.mode = 4;
  init.seed = 9;
  const auto r1 = make_initial_patch(p, init), r2 = make_initial_patch(p, init);
  for (std::size_t j = 0; j < 64; ++j) EXPECT_EQ(r1.u(j), r2.u(j));
  for (auto s : {InitialShape::Sphere, InitialShape::Cosine, InitialShape::DisplacedSphere,
                 InitialShape::Random}) {
    EXPECT_EQ(initial_shape_from_string(to_string(s)), s);
  }
  EXPECT_THROW(initial_shape_from_string("blob"), DomainError);
}
