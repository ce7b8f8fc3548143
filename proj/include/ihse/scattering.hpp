#pragma once

#include <optional>
#include <string_view>
#include <utility>

#include "ihse/collision.hpp"
#include "ihse/core.hpp"

namespace ihse {

/// Half-width of the excluded band around |v_i - v_j|^2 = 4 epsilon0.
inline constexpr double kDefaultCritTol = 1e-10;

enum class CollisionKind { Elastic, Inelastic };

std::string_view to_string(CollisionKind kind);

struct ScatteringTolerances {
  double crit_tol = kDefaultCritTol;
  /// Relative: |(v_j - v_i).omega| < grazing_tol |v_j - v_i| is grazing.
  double grazing_tol = kDefaultGrazingTol;
};

struct ScatteringOutcome {
  CollisionKind kind = CollisionKind::Elastic;
  Vec omega;
  std::optional<Vec> sigma;     // inelastic only
  std::optional<double> kappa;  // inelastic only
  Vec v_i_post;
  Vec v_j_post;
  double energy_loss = 0.0;
};

/// Law selected by the energy threshold: inelastic iff |v_i - v_j|^2 > 4 epsilon0.
CollisionKind collision_kind(const Vec& v_i, const Vec& v_j, const ModelParams& params);

/// Full collision law with its preconditions checked. Throws Error with code
/// Grazing, NotPreCollisional or CriticalEnergy (checked in that order).
ScatteringOutcome scatter(const Vec& v_i, const Vec& v_j, const Vec& omega,
                          const ModelParams& params, const ScatteringTolerances& tol = {});

/// Reflection of (v_j - v_i)/|v_j - v_i| through the hyperplane orthogonal to omega.
Vec sigma_direction(const Vec& v_i, const Vec& v_j, const Vec& omega);

// Unchecked laws, used where the caller has already classified the branch
// (finite-difference stencils, the flow).
std::pair<Vec, Vec> elastic_law(const Vec& v_i, const Vec& v_j, const Vec& omega);
std::pair<Vec, Vec> emission_law(const Vec& v_i, const Vec& v_j, const Vec& omega, double epsilon0);

/// Coefficients with 2A = scale * (I + lambda u u^T + mu omega u^T + nu omega omega^T),
/// where d v'_i / d v_i = I/2 + A and d v'_i / d v_j = I/2 - A for the
/// emission law. Transposing puts 2A in tensor-sum form, so
/// det(2A) = scale^d det(I + lambda u(x)u + mu u(x)omega + nu omega(x)omega).
struct EmissionJacobianCoefficients {
  double scale = 0.0;  // 2 kappa / |v_j - v_i|
  double lambda = 0.0;
  double mu = 0.0;
  double nu = 0.0;
  Vec u;  // (v_j - v_i)/|v_j - v_i|
};

EmissionJacobianCoefficients emission_jacobian_coefficients(const Vec& v_i, const Vec& v_j,
                                                            const Vec& omega, double epsilon0);

/// Closed-form 2d x 2d Jacobian of (v_i, v_j) -> (v'_i, v'_j) for the emission law.
Mat emission_velocity_jacobian(const Vec& v_i, const Vec& v_j, const Vec& omega, double epsilon0);

/// det(I_2 + lambda u(x)u + mu u(x)omega + nu omega(x)omega) in closed form
/// (two-dimensional vectors only).
double tensor_sum_det_formula(double lambda, double mu, double nu, const Vec& u, const Vec& omega);

/// Determinant of the velocity-block Jacobian of the collision law at fixed
/// omega: -1 for elastic collisions (a linear reflection), and for emission
/// collisions in d = 2 the tensor-sum expression of det(2A). Throws
/// Error(Unsupported) for emission collisions when d != 2.
double scattering_velocity_det(const Vec& v_i, const Vec& v_j, const Vec& omega,
                               const ModelParams& params);

// Centre-of-mass radial coordinates of the relative velocity w = v_j - v_i.
struct RadialCoordinates {
  int dimension = 2;
  double rho = 0.0;
  double theta = 0.0;  // d=2: angle from the axis orthogonal to omega; d=3: latitude
  double phi = 0.0;    // d=3 only, in [0, 2 pi)
};

/// d=2: (rho, theta) -> (sqrt(rho^2 - 4 eps0), -theta).
/// d=3: (rho, theta, phi) -> ((rho^3 - 4 eps0)^(1/3), -theta, phi).
/// Accepts epsilon0 = 0 (pure reflection). Throws Error(BelowThreshold) when
/// the new radius would not be positive.
RadialCoordinates radial_emission_map(const RadialCoordinates& coords, const ModelParams& params);

/// Polar coordinates of a planar w in the frame (e, omega), e = (omega_y, -omega_x).
RadialCoordinates relative_velocity_polar(const Vec& w, const Vec& omega);
Vec relative_velocity_from_polar(const RadialCoordinates& coords, const Vec& omega);

/// Standard spherical coordinates of w in R^3: x = rho cos(theta) cos(phi),
/// y = rho cos(theta) sin(phi), z = rho sin(theta).
RadialCoordinates to_spherical(const Vec& w);
Vec from_spherical(const RadialCoordinates& coords);

/// The three-dimensional radial emission map expressed on Cartesian R^3.
Vec spherical_emission_map_cartesian(const Vec& w, double epsilon0);

}  // namespace ihse
