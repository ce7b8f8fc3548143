#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ihse/core.hpp"
#include "ihse/rng.hpp"
#include "ihse/scattering.hpp"
#include "ihse/tct.hpp"

namespace ihse {

inline constexpr double kDefaultFdStep = 1e-6;

using VectorMap = std::function<Vec(const Vec&)>;
/// True when a stencil point lies on the same smooth branch as the centre.
using BranchCheck = std::function<bool(const Vec&)>;

/// Central differences (map(x + h e_k) - map(x - h e_k)) / 2h, one column per
/// coordinate. Throws Error(NonFinite) on a non-finite evaluation and
/// Error(BranchCrossing) when `on_branch` rejects a stencil point.
Mat fd_jacobian(const VectorMap& map, const Vec& point, double h, const BranchCheck& on_branch = {});

/// Determinants at steps h and h/2; their difference estimates the
/// truncation error of the h/2 value.
struct RichardsonDet {
  double det = 0.0;  // at h/2
  double error_estimate = 0.0;
};

RichardsonDet fd_determinant_richardson(const VectorMap& map, const Vec& point, double h,
                                        const BranchCheck& on_branch = {});

struct JacobianReport {
  std::optional<double> analytic_det;
  double fd_det = 0.0;
  std::optional<double> prefactor;
  std::optional<double> det_n_fd;
  /// |analytic - fd| / max(1, |fd|), present only with analytic_det.
  std::optional<double> residual;
  double step = kDefaultFdStep;
};

struct TensorLemmaCase {
  double lambda = 0.0;
  double mu = 0.0;
  double nu = 0.0;
  Vec u = Vec::Zero(2);
  Vec omega = Vec::Zero(2);
};

struct TensorLemmaResult {
  double formula = 0.0;
  double direct = 0.0;
  /// |formula - direct| with both sides evaluated in quadruple precision, so
  /// double rounding of the O(range^6) terms does not mask the identity.
  double abs_diff = 0.0;
};

/// Closed-form tensor-sum determinant next to the assembled 2x2 determinant.
TensorLemmaResult tensor_sum_det(const TensorLemmaCase& c);

/// Random lemma case with every scalar and vector entry uniform in [-range, range].
TensorLemmaCase random_tensor_lemma_case(CounterRng& rng, double range = 10.0);

enum class KindFilter { Any, Elastic, Inelastic };

struct ScatteringSampleOptions {
  KindFilter kind = KindFilter::Any;
  double speed_radius = 2.5;      // each velocity uniform in the ball of this radius
  double critical_margin = 0.2;   // reject |s^2 - 4 eps0| < margin * 4 eps0
  double grazing_margin = 0.05;   // reject |u . omega| < margin
  double h = kDefaultFdStep;
};

struct ScatteringInput {
  Vec v_i;
  Vec v_j;
  Vec omega;
};

/// Pre-collisional, non-grazing, non-critical collision input.
ScatteringInput sample_scattering_input(CounterRng& rng, const ModelParams& params,
                                        const ScatteringSampleOptions& opts = {});

/// Finite-difference Jacobian of (v_i, v_j) -> (v'_i, v'_j) at fixed omega,
/// on the law selected at the centre.
Mat fd_scattering_jacobian(const ScatteringInput& in, const ModelParams& params, double h);

struct ScatteringCheck {
  std::size_t index = 0;
  ScatteringInput input;
  CollisionKind kind = CollisionKind::Elastic;
  double pre_ke = 0.0;
  double post_ke = 0.0;
  double loss = 0.0;
  std::optional<JacobianReport> report;
  std::optional<std::string> error;
};

/// Per-sample finite-difference determinant of the velocity scattering map,
/// with the closed-form det(2A) (or -1 for elastic samples) as analytic value
/// in d = 2. Deterministic in `seed`; sample k is drawn from stream (seed, k).
std::vector<ScatteringCheck> verify_scattering_measure(std::size_t samples, const ModelParams& params,
                                                       std::uint64_t seed,
                                                       const ScatteringSampleOptions& opts = {});

/// Finite-difference determinant of the Cartesian form of the three-dimensional
/// radial emission map at w; analytic value -1 (orientation reversing).
JacobianReport verify_spherical_map(const Vec& w, double epsilon0, double h = kDefaultFdStep);

/// Full 2dN-dimensional flow Jacobian by central differences against the
/// analytic product. Throws Error(BranchCrossing) if the stencil leaves the
/// centre's branch; analytic fields stay empty where no closed form exists.
JacobianReport verify_flow_jacobian(const Configuration& cfg, double tau, const ModelParams& params,
                                    double h = kDefaultFdStep, const Tolerances& tol = {});

/// True when every point z +- radius e_k classifies on the centre's branch.
bool stencil_safe(const Configuration& cfg, double tau, const ModelParams& params, double radius,
                  const Tolerances& tol = {});

struct TctSampleOptions {
  std::size_t n_particles = 2;
  KindFilter kind = KindFilter::Any;
  double speed_radius = 2.0;
  double safety_radius = 10.0 * kDefaultFdStep;
  std::size_t max_attempts = 100000;
};

/// Random configuration in the single-collision domain of pair (0, 1),
/// spectators placed at random, accepted only when stencil_safe at
/// safety_radius. Throws Error(Usage) if no sample is found.
Configuration sample_tct_configuration(CounterRng& rng, double tau, const ModelParams& params,
                                       const TctSampleOptions& opts = {});

}  // namespace ihse
