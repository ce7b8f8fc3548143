#include "ihse/scattering.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "ihse/errors.hpp"

namespace ihse {
namespace {

constexpr double kMinRelativeSpeed = 1e-14;

void check_unit(const Vec& omega, int dimension) {
  if (omega.size() != dimension) throw Error(ErrorCode::Usage, "omega has the wrong dimension");
  if (std::abs(omega.norm() - 1.0) > 1e-12) throw Error(ErrorCode::Usage, "omega must be a unit vector");
}

double kinetic(const Vec& a, const Vec& b) { return 0.5 * (a.squaredNorm() + b.squaredNorm()); }

}  // namespace

std::string_view to_string(CollisionKind kind) {
  return kind == CollisionKind::Elastic ? "Elastic" : "Inelastic";
}

CollisionKind collision_kind(const Vec& v_i, const Vec& v_j, const ModelParams& params) {
  return (v_i - v_j).squaredNorm() > 4.0 * params.epsilon0 ? CollisionKind::Inelastic
                                                           : CollisionKind::Elastic;
}

Vec sigma_direction(const Vec& v_i, const Vec& v_j, const Vec& omega) {
  const Vec rel = v_j - v_i;
  const double speed = rel.norm();
  if (speed < kMinRelativeSpeed) {
    throw Error(ErrorCode::ZeroRelativeVelocity, "sigma is undefined for zero relative velocity");
  }
  const Vec u = rel / speed;
  return u - 2.0 * u.dot(omega) * omega;
}

std::pair<Vec, Vec> elastic_law(const Vec& v_i, const Vec& v_j, const Vec& omega) {
  const Vec exchange = (v_i - v_j).dot(omega) * omega;
  return {v_i - exchange, v_j + exchange};
}

std::pair<Vec, Vec> emission_law(const Vec& v_i, const Vec& v_j, const Vec& omega, double epsilon0) {
  const Vec mean = 0.5 * (v_i + v_j);
  const double kappa = std::sqrt(0.25 * (v_j - v_i).squaredNorm() - epsilon0);
  const Vec shift = kappa * sigma_direction(v_i, v_j, omega);
  return {mean - shift, mean + shift};
}

ScatteringOutcome scatter(const Vec& v_i, const Vec& v_j, const Vec& omega,
                          const ModelParams& params, const ScatteringTolerances& tol) {
  const int d = static_cast<int>(v_i.size());
  if (v_j.size() != d) throw Error(ErrorCode::Usage, "velocity dimensions differ");
  check_unit(omega, d);

  const Vec rel = v_j - v_i;
  const double normal = rel.dot(omega);
  if (std::abs(normal) < tol.grazing_tol * rel.norm()) {
    throw Error(ErrorCode::Grazing, "relative velocity is tangent to the contact plane");
  }
  if (normal >= 0.0) {
    throw Error(ErrorCode::NotPreCollisional, "pair is not approaching along omega");
  }
  const double rel2 = rel.squaredNorm();
  const double threshold = 4.0 * params.epsilon0;
  if (std::abs(rel2 - threshold) <= tol.crit_tol) {
    throw Error(ErrorCode::CriticalEnergy,
                "|v_i - v_j|^2 = " + std::to_string(rel2) + " is within crit_tol of 4 epsilon0");
  }

  ScatteringOutcome out;
  out.omega = omega;
  if (rel2 > threshold) {
    out.kind = CollisionKind::Inelastic;
    out.sigma = sigma_direction(v_i, v_j, omega);
    out.kappa = std::sqrt(0.25 * rel2 - params.epsilon0);
    const Vec mean = 0.5 * (v_i + v_j);
    out.v_i_post = mean - *out.kappa * *out.sigma;
    out.v_j_post = mean + *out.kappa * *out.sigma;
  } else {
    out.kind = CollisionKind::Elastic;
    std::tie(out.v_i_post, out.v_j_post) = elastic_law(v_i, v_j, omega);
  }
  out.energy_loss = kinetic(v_i, v_j) - kinetic(out.v_i_post, out.v_j_post);
  return out;
}

EmissionJacobianCoefficients emission_jacobian_coefficients(const Vec& v_i, const Vec& v_j,
                                                            const Vec& omega, double epsilon0) {
  const Vec rel = v_j - v_i;
  const double s = rel.norm();
  if (s < kMinRelativeSpeed) {
    throw Error(ErrorCode::ZeroRelativeVelocity, "emission Jacobian needs v_i != v_j");
  }
  const double kappa2 = 0.25 * s * s - epsilon0;
  if (!(kappa2 > 0.0)) throw Error(ErrorCode::BelowThreshold, "emission law needs |v_j - v_i|^2 > 4 eps0");

  EmissionJacobianCoefficients c;
  c.u = rel / s;
  const double ratio = s * s / (4.0 * kappa2);  // s^2 / (4 kappa^2)
  c.scale = 2.0 * std::sqrt(kappa2) / s;
  c.lambda = ratio - 1.0;
  c.mu = 2.0 * c.u.dot(omega) * (1.0 - ratio);
  c.nu = -2.0;
  return c;
}

Mat emission_velocity_jacobian(const Vec& v_i, const Vec& v_j, const Vec& omega, double epsilon0) {
  const auto c = emission_jacobian_coefficients(v_i, v_j, omega, epsilon0);
  const Eigen::Index d = v_i.size();
  const Mat id = Mat::Identity(d, d);
  // A as a matrix acting on column vectors: its u(x)omega term enters transposed.
  const Mat two_a = c.scale * (id + c.lambda * c.u * c.u.transpose() +
                               c.mu * omega * c.u.transpose() + c.nu * omega * omega.transpose());
  const Mat a = 0.5 * two_a;
  Mat j(2 * d, 2 * d);
  j.topLeftCorner(d, d) = 0.5 * id + a;
  j.topRightCorner(d, d) = 0.5 * id - a;
  j.bottomLeftCorner(d, d) = 0.5 * id - a;
  j.bottomRightCorner(d, d) = 0.5 * id + a;
  return j;
}

double tensor_sum_det_formula(double lambda, double mu, double nu, const Vec& u, const Vec& omega) {
  if (u.size() != 2 || omega.size() != 2) {
    throw Error(ErrorCode::Unsupported, "tensor-sum determinant formula is two-dimensional");
  }
  const double cross = u(0) * omega(1) - u(1) * omega(0);
  return 1.0 + lambda * u.squaredNorm() + mu * u.dot(omega) + nu * omega.squaredNorm() +
         lambda * nu * cross * cross;
}

double scattering_velocity_det(const Vec& v_i, const Vec& v_j, const Vec& omega,
                               const ModelParams& params) {
  if (collision_kind(v_i, v_j, params) == CollisionKind::Elastic) return -1.0;
  if (v_i.size() != 2) {
    throw Error(ErrorCode::Unsupported, "closed-form emission Jacobian is only available for d = 2");
  }
  const auto c = emission_jacobian_coefficients(v_i, v_j, omega, params.epsilon0);
  return c.scale * c.scale * tensor_sum_det_formula(c.lambda, c.mu, c.nu, c.u, omega);
}

RadialCoordinates radial_emission_map(const RadialCoordinates& coords, const ModelParams& params) {
  if (!(params.epsilon0 >= 0.0)) throw Error(ErrorCode::Usage, "epsilon0 must be >= 0");
  if (!(coords.rho > 0.0)) throw Error(ErrorCode::Usage, "rho must be positive");
  RadialCoordinates out = coords;
  if (coords.dimension == 2) {
    const double r2 = coords.rho * coords.rho - 4.0 * params.epsilon0;
    if (!(r2 > 0.0)) throw Error(ErrorCode::BelowThreshold, "rho^2 must exceed 4 epsilon0");
    out.rho = std::sqrt(r2);
    out.theta = -coords.theta;
  } else if (coords.dimension == 3) {
    const double r3 = coords.rho * coords.rho * coords.rho - 4.0 * params.epsilon0;
    if (!(r3 > 0.0)) throw Error(ErrorCode::BelowThreshold, "rho^3 must exceed 4 epsilon0");
    out.rho = std::cbrt(r3);
    out.theta = -coords.theta;
  } else {
    throw Error(ErrorCode::Unsupported, "radial emission map is defined for d = 2 and d = 3");
  }
  return out;
}

RadialCoordinates relative_velocity_polar(const Vec& w, const Vec& omega) {
  if (w.size() != 2 || omega.size() != 2) throw Error(ErrorCode::Usage, "polar frame needs d = 2");
  const Vec e{{omega(1), -omega(0)}};
  return {2, w.norm(), std::atan2(w.dot(omega), w.dot(e)), 0.0};
}

Vec relative_velocity_from_polar(const RadialCoordinates& coords, const Vec& omega) {
  const Vec e{{omega(1), -omega(0)}};
  return coords.rho * (std::cos(coords.theta) * e + std::sin(coords.theta) * omega);
}

RadialCoordinates to_spherical(const Vec& w) {
  if (w.size() != 3) throw Error(ErrorCode::Usage, "spherical coordinates need d = 3");
  const double rho = w.norm();
  double phi = std::atan2(w(1), w(0));
  if (phi < 0.0) phi += 2.0 * std::numbers::pi;
  return {3, rho, std::asin(w(2) / rho), phi};
}

Vec from_spherical(const RadialCoordinates& coords) {
  const double ct = std::cos(coords.theta);
  return coords.rho * Vec{{ct * std::cos(coords.phi), ct * std::sin(coords.phi), std::sin(coords.theta)}};
}

Vec spherical_emission_map_cartesian(const Vec& w, double epsilon0) {
  return from_spherical(radial_emission_map(to_spherical(w), ModelParams{epsilon0, 3}));
}

}  // namespace ihse
