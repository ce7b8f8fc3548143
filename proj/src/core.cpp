#include "ihse/core.hpp"

#include <cmath>
#include <string>

#include "ihse/errors.hpp"

namespace ihse {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::Usage: return "Usage";
    case ErrorCode::CriticalEnergy: return "CriticalEnergy";
    case ErrorCode::NotPreCollisional: return "NotPreCollisional";
    case ErrorCode::Grazing: return "Grazing";
    case ErrorCode::ZeroRelativeVelocity: return "ZeroRelativeVelocity";
    case ErrorCode::BelowThreshold: return "BelowThreshold";
    case ErrorCode::ExcludedConfiguration: return "ExcludedConfiguration";
    case ErrorCode::Unsupported: return "Unsupported";
    case ErrorCode::BranchCrossing: return "BranchCrossing";
    case ErrorCode::NonFinite: return "NonFinite";
  }
  return "Unknown";
}

void ModelParams::validate() const {
  if (!(epsilon0 > 0.0)) {
    throw Error(ErrorCode::Usage, "epsilon0 must be positive, got " + std::to_string(epsilon0));
  }
  if (dimension < 2) {
    throw Error(ErrorCode::Usage, "dimension must be >= 2, got " + std::to_string(dimension));
  }
}

Configuration::Configuration(Mat positions, Mat velocities)
    : positions_(std::move(positions)), velocities_(std::move(velocities)) {
  if (positions_.rows() == 0) {
    throw Error(ErrorCode::Usage, "configuration needs at least one particle");
  }
  if (positions_.rows() != velocities_.rows() || positions_.cols() != velocities_.cols()) {
    throw Error(ErrorCode::Usage, "positions and velocities have mismatched shapes");
  }
  if (positions_.cols() < 2) {
    throw Error(ErrorCode::Usage, "dimension must be >= 2");
  }
  if (!positions_.allFinite() || !velocities_.allFinite()) {
    throw Error(ErrorCode::NonFinite, "configuration has non-finite entries");
  }
}

Vec Configuration::state_vector() const {
  const auto n = static_cast<Eigen::Index>(size());
  const auto d = static_cast<Eigen::Index>(dimension());
  Vec z(2 * n * d);
  for (Eigen::Index k = 0; k < n; ++k) {
    z.segment(k * d, d) = positions_.row(k).transpose();
    z.segment(n * d + k * d, d) = velocities_.row(k).transpose();
  }
  return z;
}

Configuration Configuration::from_state_vector(int dimension, const Vec& z) {
  const Eigen::Index d = dimension;
  if (d < 2 || z.size() == 0 || z.size() % (2 * d) != 0) {
    throw Error(ErrorCode::Usage, "state vector length is not a multiple of 2d");
  }
  const Eigen::Index n = z.size() / (2 * d);
  Mat x(n, d);
  Mat v(n, d);
  for (Eigen::Index k = 0; k < n; ++k) {
    x.row(k) = z.segment(k * d, d).transpose();
    v.row(k) = z.segment(n * d + k * d, d).transpose();
  }
  return Configuration(std::move(x), std::move(v));
}

std::vector<PairIndex> all_pairs(std::size_t n_particles) {
  std::vector<PairIndex> pairs;
  if (n_particles > 1) pairs.reserve(n_particles * (n_particles - 1) / 2);
  for (std::size_t i = 0; i < n_particles; ++i) {
    for (std::size_t j = i + 1; j < n_particles; ++j) pairs.push_back({i, j});
  }
  return pairs;
}

DomainStatus validate_configuration(const Configuration& cfg, double tol) {
  if (!(tol >= 0.0)) throw Error(ErrorCode::Usage, "contact tolerance must be >= 0");
  DomainStatus status;
  std::vector<PairIndex> contact;
  std::vector<PairIndex> overlap;
  for (const auto& p : all_pairs(cfg.size())) {
    const double dist = (cfg.position(p.i) - cfg.position(p.j)).norm();
    status.min_distance = std::min(status.min_distance, dist);
    if (dist < 1.0 - tol) {
      overlap.push_back(p);
    } else if (std::abs(dist - 1.0) <= tol) {
      contact.push_back(p);
    }
  }
  if (!overlap.empty()) {
    status.kind = DomainStatus::Kind::Invalid;
    status.pairs = std::move(overlap);
  } else if (!contact.empty()) {
    status.kind = DomainStatus::Kind::Boundary;
    status.pairs = std::move(contact);
  }
  return status;
}

Configuration free_transport(const Configuration& cfg, double t) {
  if (!std::isfinite(t)) throw Error(ErrorCode::NonFinite, "transport time must be finite");
  return Configuration(cfg.positions() + t * cfg.velocities(), cfg.velocities());
}

ConservedQuantities conserved_quantities(const Configuration& cfg) {
  return {cfg.velocities().colwise().sum().transpose(), kinetic_energy(cfg)};
}

double kinetic_energy(const Configuration& cfg) {
  return 0.5 * cfg.velocities().squaredNorm();
}

double min_pair_distance(const Configuration& cfg) {
  double best = std::numeric_limits<double>::infinity();
  const auto n = static_cast<Eigen::Index>(cfg.size());
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      best = std::min(best, (cfg.positions().row(i) - cfg.positions().row(j)).norm());
    }
  }
  return best;
}

}  // namespace ihse
