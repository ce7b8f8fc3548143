#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace ihse {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Contact slack used by validate_configuration when none is given.
inline constexpr double kDefaultContactTol = 1e-9;

/// Model constants. Particle diameter is normalized to 1 and never stored.
///
/// `epsilon0 = +inf` is accepted as the elastic-only sentinel: no pair can
/// ever reach the inelastic threshold.
struct ModelParams {
  double epsilon0 = 1.0;
  int dimension = 2;

  static constexpr double diameter = 1.0;

  static ModelParams elastic_only(int dimension) {
    return {std::numeric_limits<double>::infinity(), dimension};
  }

  /// Throws Error(Usage) unless epsilon0 > 0 (or +inf) and dimension >= 2.
  void validate() const;
};

/// Unordered particle pair stored with i < j, 0-based. External reports
/// (JSON, CLI) print it 1-based.
struct PairIndex {
  std::size_t i = 0;
  std::size_t j = 0;

  friend bool operator==(const PairIndex&, const PairIndex&) = default;
  friend auto operator<=>(const PairIndex&, const PairIndex&) = default;
};

/// Positions and velocities of N unit spheres in R^d. Row k of each matrix
/// is particle k.
class Configuration {
 public:
  Configuration() = default;
  /// Throws Error(Usage) on N = 0, shape mismatch, d < 2 or non-finite entries.
  Configuration(Mat positions, Mat velocities);

  int dimension() const { return static_cast<int>(positions_.cols()); }
  std::size_t size() const { return static_cast<std::size_t>(positions_.rows()); }

  const Mat& positions() const { return positions_; }
  const Mat& velocities() const { return velocities_; }

  Vec position(std::size_t k) const { return positions_.row(static_cast<Eigen::Index>(k)).transpose(); }
  Vec velocity(std::size_t k) const { return velocities_.row(static_cast<Eigen::Index>(k)).transpose(); }

  void set_velocity(std::size_t k, const Vec& v) { velocities_.row(static_cast<Eigen::Index>(k)) = v.transpose(); }
  void set_position(std::size_t k, const Vec& x) { positions_.row(static_cast<Eigen::Index>(k)) = x.transpose(); }

  /// Flat phase-space point Z = (x_1, ..., x_N, v_1, ..., v_N), length 2dN.
  Vec state_vector() const;
  static Configuration from_state_vector(int dimension, const Vec& z);

  friend bool operator==(const Configuration& a, const Configuration& b) {
    return a.positions_ == b.positions_ && a.velocities_ == b.velocities_;
  }

 private:
  Mat positions_;
  Mat velocities_;
};

std::vector<PairIndex> all_pairs(std::size_t n_particles);

struct DomainStatus {
  enum class Kind { Interior, Boundary, Invalid };
  Kind kind = Kind::Interior;
  /// Pairs responsible for the status: contact pairs for Boundary, overlapping
  /// pairs for Invalid, empty for Interior.
  std::vector<PairIndex> pairs;
  double min_distance = std::numeric_limits<double>::infinity();
};

/// Membership of the configuration in the open phase space, its boundary, or
/// neither. Overlap takes precedence over contact.
DomainStatus validate_configuration(const Configuration& cfg, double tol = kDefaultContactTol);

/// Straight-line motion for time t (any sign); no collision check.
Configuration free_transport(const Configuration& cfg, double t);

struct ConservedQuantities {
  Vec momentum;
  double kinetic_energy = 0.0;
};

ConservedQuantities conserved_quantities(const Configuration& cfg);
double kinetic_energy(const Configuration& cfg);

/// Smallest centre distance over all pairs (+inf for N = 1).
double min_pair_distance(const Configuration& cfg);

}  // namespace ihse
