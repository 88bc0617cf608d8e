#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "hflow/diagnostics.hpp"
#include "hflow/errors.hpp"
#include "hflow/run.hpp"

using namespace hflow;

namespace {

GraphPatch cosine_circle(std::size_t N, double amp) {
  return GraphPatch::sample(Backend::FullCircle, AmbientParams(1.0, 1), N,
                            [&](double t) { return 1.0 + amp * std::cos(t); });
}

std::vector<std::pair<double, double>> synthetic(double C, double rate, double wobble) {
  std::vector<std::pair<double, double>> s;
  for (int i = 0; i <= 200; ++i) {
    const double t = 0.05 * i;
    s.emplace_back(t, C * std::exp(-rate * t) * (1.0 + wobble * std::sin(t)));
  }
  return s;
}

}  // namespace

TEST(Snapshot, SphereRecord) {
  for (int n = 1; n <= 3; ++n) {
    const Backend b = n == 1 ? Backend::FullCircle : Backend::Axisymmetric;
    const auto patch = GraphPatch::sphere(b, AmbientParams(1.0, n), 32, 0.9);
    const auto spec = CurvatureSpec::mean(n, 1.0);
    const auto s = make_state(patch, spec, 0);
    const auto r = snapshot(s, spec);
    EXPECT_NEAR(r.hconv_margin, 1.0 / std::tanh(0.9) - 1.0, 1e-12);
    EXPECT_NEAR(r.pinch_ratio, 1.0 / n, 1e-12);
    EXPECT_LE(r.sup_abs_F_minus_f, 1e-13);
    EXPECT_NEAR(r.umbilic_max, 0.0, 1e-20);
    EXPECT_DOUBLE_EQ(r.parabolicity_cond, 1.0);
    EXPECT_EQ(r.all_mixed_volumes.size(), static_cast<std::size_t>(n + 1));
    EXPECT_DOUBLE_EQ(r.V_k_tracked, r.all_mixed_volumes[0]);
    EXPECT_NEAR(r.inf_F_minus, r.sup_F, 1e-13);
  }
}

TEST(Snapshot, CosineCurve) {
  const auto patch = cosine_circle(256, 0.1);
  const auto spec = CurvatureSpec::mean(1, 1.0);
  const auto s = make_state(patch, spec, 0);
  const auto r = snapshot(s, spec);
  EXPECT_NEAR(r.min_u, 0.9, 1e-15);
  EXPECT_NEAR(r.max_u, 1.1, 1e-15);
  double chi = 0.0;
  for (std::size_t j = 0; j < 256; ++j) chi = std::max(chi, s.geometry.v[j] / std::sinh(patch.u(j)));
  EXPECT_DOUBLE_EQ(r.chi_max, chi);
  EXPECT_DOUBLE_EQ(r.pinch_ratio, 1.0);
  EXPECT_DOUBLE_EQ(r.area, area(patch, s.geometry));
}

TEST(Snapshot, ParabolicityCondition) {
  const auto patch = GraphPatch::sample(Backend::Axisymmetric, AmbientParams(1.0, 3), 64,
                                        [](double t) { return 1.0 + 0.1 * std::cos(2 * t); });
  const auto mean = CurvatureSpec::mean(3, 1.0);
  EXPECT_DOUBLE_EQ(snapshot(make_state(patch, mean, 1), mean).parabolicity_cond, 1.0);
  for (const auto& spec : {CurvatureSpec::norm(3, 1.0), CurvatureSpec::elem_quotient(3, 3, 1, 1.0),
                           CurvatureSpec::power_mean(3, -1.0, 1.0)}) {
    EXPECT_GE(snapshot(make_state(patch, spec, 1), spec).parabolicity_cond, 1.0);
  }
}

TEST(Csv, HeaderNamesEveryField) {
  const std::string h = csv_header(2);
  for (const char* f : {"t", "step", "V_k_tracked", "mixed_volume_k0", "mixed_volume_k2", "area",
                        "hconv_margin", "pinch_ratio", "umbilic_max", "sup_F", "inf_F_minus", "f",
                        "sup_abs_F_minus_f", "min_u", "max_u", "chi_max", "parabolicity_cond",
                        "recenter_count"}) {
    EXPECT_NE(h.find(f), std::string::npos) << f;
  }
  const auto spec = CurvatureSpec::mean(1, 1.0);
  const auto rec = snapshot(make_state(cosine_circle(64, 0.1), spec, 0), spec);
  const std::string row = csv_row(rec);
  const std::string h1 = csv_header(1);
  EXPECT_EQ(std::count(row.begin(), row.end(), ','), std::count(h1.begin(), h1.end(), ','));
  // shortest round-trip formatting
  EXPECT_EQ(row.substr(0, row.find(',')), "0");
}

TEST(FitDecay, ExactExponential) {
  const auto s = synthetic(3.0, 0.7, 0.0);
  const auto fit = fit_decay(s, 0.5);
  EXPECT_NEAR(fit.amplitude, 3.0, 1e-10);
  EXPECT_NEAR(fit.rate, 0.7, 1e-10);
  EXPECT_NEAR(fit.r_squared, 1.0, 1e-12);
  EXPECT_TRUE(fit.decaying());
  EXPECT_EQ(fit.points, 101u);
}

TEST(FitDecay, PerturbedExponential) {
  const auto fit = fit_decay(synthetic(3.0, 0.7, 0.01), 0.5);
  EXPECT_NEAR(fit.rate, 0.7, 0.01);
  EXPECT_GE(fit.r_squared, 0.999);
}

TEST(FitDecay, ConstantSeriesIsFlagged) {
  std::vector<std::pair<double, double>> s;
  for (int i = 0; i < 40; ++i) s.emplace_back(i * 0.1, 2.5);
  const auto fit = fit_decay(s, 0.5);
  EXPECT_NEAR(fit.rate, 0.0, 1e-12);
  EXPECT_FALSE(fit.decaying());
}

TEST(FitDecay, Errors) {
  auto s = synthetic(1.0, 1.0, 0.0);
  s.back().second = 0.0;
  EXPECT_THROW(fit_decay(s, 0.5), FitError);
  EXPECT_THROW(fit_decay(synthetic(1.0, 1.0, 0.0), 0.04), FitError);
  EXPECT_THROW(fit_decay(synthetic(1.0, 1.0, 0.0), 0.0), FitError);
}

TEST(RadiusGap, SphereAndCosine) {
  const auto sphere = GraphPatch::sphere(Backend::FullCircle, AmbientParams(1.0, 1), 64, 1.0);
  const auto g0 = check_radius_gap(sphere);
  EXPECT_LE(g0.gap, 1e-12);
  EXPECT_TRUE(g0.pass);
  EXPECT_DOUBLE_EQ(g0.bound, std::log(2.0));
  const auto g1 = check_radius_gap(cosine_circle(256, 0.2));
  EXPECT_TRUE(g1.pass);
  EXPECT_LT(g1.gap, std::log(2.0));
  EXPECT_GT(g1.tau, 0.0);
  EXPECT_LT(g1.tau, 1.0);
}

TEST(RadiusGap, DisplacedSphereNeedsRecentering) {
  // law of cosines: distance from a point d away from the center of a circle of radius R
  const double R = 1.0, d = 0.7;
  const auto patch = GraphPatch::sample(Backend::FullCircle, AmbientParams(1.0, 1), 256, [&](double t) {
    const double A = std::cosh(d), B = std::sinh(d) * std::cos(t);
    return std::atanh(B / A) + std::acosh(std::cosh(R) / std::sqrt(A * A - B * B));
  });
  const auto [lo, hi] = std::minmax_element(patch.u().begin(), patch.u().end());
  EXPECT_GT(*hi - *lo, std::log(2.0));  // raw gap violates the bound
  const auto g = check_radius_gap(patch);
  EXPECT_TRUE(g.pass);
  EXPECT_LT(g.gap, 1e-6);
  EXPECT_NEAR(g.center.distance, d, 1e-6);
}

TEST(Isoperimetric, RejectsOtherFlows) {
  const auto patch = cosine_circle(64, 0.1);
  const auto s = make_state(patch, CurvatureSpec::mean(1, 1.0), 1);
  std::vector<FlowState> traj{s};
  EXPECT_THROW(isoperimetric_report(traj, CurvatureSpec::mean(1, 1.0)), DomainError);
  const auto s0 = make_state(patch, CurvatureSpec::norm(1, 1.0), 0);
  std::vector<FlowState> traj0{s0};
  EXPECT_THROW(isoperimetric_report(traj0, CurvatureSpec::norm(1, 1.0)), DomainError);
  EXPECT_THROW(isoperimetric_report(std::vector<FlowState>{}, CurvatureSpec::mean(1, 1.0)),
               DomainError);
}

TEST(Isoperimetric, SphereIsExtremal) {
  FlowConfig c;
  c.initial.kind = InitialShape::Sphere;
  c.initial.N = 64;
  c.t_max = 0.05;
  const auto res = run_flow(c);
  const auto rep = isoperimetric_report(res.trajectory.states, c.curvature);
  EXPECT_TRUE(rep.area_monotone);
  EXPECT_TRUE(rep.inequality_holds);
  EXPECT_FALSE(rep.strict);
  EXPECT_NEAR(rep.initial_ratio, rep.ball_ratio, 1e-12);
  EXPECT_NEAR(rep.final_ratio_error, 0.0, 1e-12);
}

TEST(Isoperimetric, EllipseLikeCurveIsStrict) {
  const auto patch = GraphPatch::sample(Backend::FullCircle, AmbientParams(1.0, 1), 256,
                                        [](double t) { return 1.0 + 0.08 * std::cos(2 * t); });
  const auto s = make_state(patch, CurvatureSpec::mean(1, 1.0), 0);
  std::vector<FlowState> traj{s};
  const auto rep = isoperimetric_report(traj, CurvatureSpec::mean(1, 1.0));
  EXPECT_TRUE(rep.strict);
  EXPECT_TRUE(rep.inequality_holds);
  // independent check: V/|M| of the curve against the disk with the same area
  double V = 0.0, L = 0.0;
  const double h = 2.0 * std::numbers::pi / 256;
  for (std::size_t j = 0; j < 256; ++j) {
    V += (std::cosh(patch.u(j)) - 1.0) * h;
    L += std::sqrt(s.geometry.g_tt[j]) * h;
  }
  const double R = std::acosh(1.0 + V / (2.0 * std::numbers::pi));
  EXPECT_LT(V / L, (std::cosh(R) - 1.0) / std::sinh(R));
  EXPECT_NEAR(rep.ball_ratio, (std::cosh(R) - 1.0) / std::sinh(R), 1e-12);
}

TEST(EvolutionIdentity, SphereResidualVanishes) {
  const auto spec = CurvatureSpec::mean(2, 1.0);
  const auto patch = GraphPatch::sphere(Backend::Axisymmetric, AmbientParams(1.0, 2), 32, 1.0);
  const auto s = make_state(patch, spec, 1);
  const auto next = advance_with_dt(s, spec, 1e-4);
  EXPECT_LE(check_evolution_identity(s, next, 1e-4), 1e-10);
}

TEST(EvolutionIdentity, FirstOrderInDt) {
  for (int n : {1, 2}) {
    const Backend b = n == 1 ? Backend::FullCircle : Backend::Axisymmetric;
    const auto spec = CurvatureSpec::mean(n, 1.0);
    const auto patch = GraphPatch::sample(b, AmbientParams(1.0, n), 128,
                                          [](double t) { return 1.0 + 0.05 * std::cos(2 * t); });
    const auto s = make_state(patch, spec, 0);
    const double r1 = check_evolution_identity(s, advance_with_dt(s, spec, 1e-4), 1e-4);
    const double r2 = check_evolution_identity(s, advance_with_dt(s, spec, 5e-5), 5e-5);
    EXPECT_LE(r1, 1e-3) << n;
    EXPECT_NEAR(r1 / r2, 2.0, 0.2) << n;
  }
}

TEST(EvolutionIdentity, MismatchedGrids) {
  const auto spec = CurvatureSpec::mean(1, 1.0);
  const auto a = make_state(cosine_circle(64, 0.1), spec, 0);
  const auto b = make_state(cosine_circle(128, 0.1), spec, 0);
  EXPECT_THROW(check_evolution_identity(a, b, 1e-3), DomainError);
  EXPECT_THROW(check_evolution_identity(a, a, 0.0), DomainError);
}

TEST(Run, StationarySphere) {
  FlowConfig c;
  c.initial.kind = InitialShape::Sphere;
  c.initial.N = 64;
  const auto res = run_flow(c);
  EXPECT_TRUE(res.summary.converged);
  for (const auto& r : res.trajectory.records) EXPECT_LE(r.sup_abs_F_minus_f, 1e-10);
}

TEST(Run, RejectsNonConvexStart) {
  FlowConfig c;
  c.initial.kind = InitialShape::Cosine;
  c.initial.N = 64;
  c.initial.radius = 1.0;
  c.initial.amp = 0.3;
  c.initial.mode = 4;
  EXPECT_THROW(run_flow(c), RunAborted);
}

TEST(Run, ObserverSeesEveryRecord) {
  FlowConfig c;
  c.initial.kind = InitialShape::Cosine;
  c.initial.N = 64;
  c.initial.amp = 0.05;
  c.initial.mode = 2;
  c.t_max = 0.2;
  c.output_every = 10;
  std::size_t seen = 0;
  RunOptions opts;
  opts.keep_states = false;
  opts.observer = [&](const FlowState&, const DiagnosticsRecord&) { ++seen; };
  const auto res = run_flow(c, opts);
  EXPECT_EQ(seen, res.trajectory.records.size());
  EXPECT_TRUE(res.trajectory.states.empty());
  EXPECT_EQ(res.summary.stop_reason, "t_max");
  EXPECT_GE(res.trajectory.records.back().t, 0.2);
}
