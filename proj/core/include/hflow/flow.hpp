#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "hflow/ambient.hpp"
#include "hflow/curvfn.hpp"
#include "hflow/hypersurface.hpp"

namespace hflow {

enum class InitialShape {
  Sphere,          // u = radius
  Cosine,          // u = radius + amp cos(mode theta)
  DisplacedSphere, // sphere of the given radius whose center sits amp away (toward theta = 0)
  Random,          // radius + amp * (random combination of cos/sin modes 2..mode), seeded
};

std::string to_string(InitialShape shape);
InitialShape initial_shape_from_string(const std::string& name);

struct InitialPatch {
  Backend backend = Backend::FullCircle;
  std::size_t N = 256;
  InitialShape kind = InitialShape::Sphere;
  double radius = 1.0;
  double amp = 0.0;
  int mode = 1;
  std::uint64_t seed = 0;
};

GraphPatch make_initial_patch(const AmbientParams& ambient, const InitialPatch& init);

struct FlowConfig {
  AmbientParams ambient{};
  CurvatureSpec curvature = CurvatureSpec::mean(1, 1.0);
  int k = 0;  // preserved mixed volume V_{n+1-k}
  InitialPatch initial{};
  double cfl_safety = 0.3;
  double max_gradient_before_recenter = 2.0;
  double min_u_before_recenter = 0.1;
  double t_max = 50.0;
  double tol_converged = 1e-8;
  std::size_t output_every = 100;
  std::size_t max_steps = 50'000'000;
  // > 0 replaces the parabolic step-size rule by a fixed step
  double fixed_dt = 0.0;
  // Off by default: conservation drift stays a measurable diagnostic.
  bool volume_correction = false;
};

// Throws DomainError on inconsistent fields.
void validate(const FlowConfig& config);

// Snapshot of the evolving hypersurface with everything the right-hand side needs.
struct FlowState {
  double t = 0.0;
  GraphPatch patch;
  GeometryFields geometry;
  std::vector<double> F;          // curvature function per node
  std::vector<double> dF_max;     // largest entry of grad F per node
  std::vector<double> dF_min;     // smallest entry of grad F per node
  double f = 0.0;                 // global term
  int k = 0;
  double preserved_target = 0.0;  // V_{n+1-k}(M_0)
  std::size_t step = 0;
  std::size_t recenter_count = 0;
  double last_dt = 0.0;
};

// Evaluates geometry, F and f for a patch; throws AdmissibilityError naming
// the node when some kappa leaves Gamma_alpha.
FlowState make_state(const GraphPatch& patch, const CurvatureSpec& spec, int k, double t = 0.0);

// Per-node weight of the nonlocal average: H_k for k <= 1,
// k H_k + a^2 (n-k+2) H_{k-2} otherwise.
std::vector<double> global_weight(const GeometryFields& geom, double a, int k);

double global_term(const GraphPatch& patch, const GeometryFields& geom,
                   std::span<const double> F, int k);
double global_term(const FlowState& state, int k);

// du/dt = -v (F - f)
std::vector<double> flow_rhs(const FlowState& state);

// cfl * (min induced spacing)^2 / (n * max eigenvalue of grad F)
double stable_time_step(const FlowState& state, double cfl_safety);

class StepRejected : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// One accepted RK4 step (halving dt up to 20 times on admissibility loss),
// followed by recentering when the graph gets steep or close to the center.
FlowState advance(const FlowState& state, const FlowConfig& config);

// One RK4 step of exactly dt; no retries and no recentering.
FlowState advance_with_dt(const FlowState& state, const CurvatureSpec& spec, double dt);

bool needs_recenter(const FlowState& state, const FlowConfig& config);
FlowState recenter_state(const FlowState& state, const CurvatureSpec& spec);

}  // namespace hflow
