#pragma once

#include <optional>
#include <vector>

#include "ihse/core.hpp"

namespace ihse {

inline constexpr double kDefaultGrazingTol = 1e-12;
inline constexpr double kDefaultSimultaneityTol = 1e-10;
/// Roots at or below this time are ignored for a pair that has just scattered.
inline constexpr double kRecentPairMinTime = 1e-12;

/// Delta_ij = ((x_i-x_j).(v_i-v_j))^2 - |v_i-v_j|^2 (|x_i-x_j|^2 - 1).
/// Positive: the pair crosses the contact sphere transversally; zero: grazing;
/// negative: never touches.
double grazing_discriminant(const Configuration& cfg, PairIndex pair);

/// Smallest root tau > min_time of |(x_i-x_j) + tau (v_i-v_j)| = 1, or nullopt
/// when the pair is grazing (Delta <= grazing_tol), has zero relative
/// velocity, or never reaches contact in the future.
std::optional<double> pair_collision_time(const Configuration& cfg, PairIndex pair,
                                          double grazing_tol = kDefaultGrazingTol,
                                          double min_time = 0.0);

struct CollisionPrediction {
  PairIndex pair;
  double discriminant = 0.0;
  std::optional<double> time;
  bool grazing = false;
};

CollisionPrediction predict_pair(const Configuration& cfg, PairIndex pair,
                                 double grazing_tol = kDefaultGrazingTol);
std::vector<CollisionPrediction> predict_all(const Configuration& cfg,
                                             double grazing_tol = kDefaultGrazingTol);

/// Tangency time -b/|v_i-v_j|^2 of an approaching pair inside the grazing band.
std::optional<double> grazing_contact_time(const Configuration& cfg, PairIndex pair,
                                           double grazing_tol = kDefaultGrazingTol);

/// A future contact of one pair, transversal or grazing.
struct ContactEvent {
  double time = 0.0;
  PairIndex pair;
  bool grazing = false;
};

struct ContactScanOptions {
  double grazing_tol = kDefaultGrazingTol;
  /// Pair that scattered at the current instant; its roots <= recent_min_time
  /// are rounding artefacts of the contact and are skipped.
  std::optional<PairIndex> recent_pair;
  double recent_min_time = kRecentPairMinTime;
};

/// Every contact in (0, horizon], sorted by time then pair.
std::vector<ContactEvent> contact_events(const Configuration& cfg, double horizon,
                                         const ContactScanOptions& opts = {});

struct FirstCollision {
  double time = 0.0;
  PairIndex pair;
  /// False when another pair collides within simultaneity_tol of `time`.
  bool unique = true;
};

/// Earliest transversal collision over all pairs, or nullopt when none occurs
/// in (0, horizon]. Ties resolve to the lexicographically smallest pair and
/// are flagged non-unique.
std::optional<FirstCollision> first_collision(const Configuration& cfg, double horizon,
                                              double simultaneity_tol = kDefaultSimultaneityTol,
                                              double grazing_tol = kDefaultGrazingTol);

/// Unit line of centres (x_j - x_i)/|x_j - x_i| after transporting by `time`.
Vec contact_normal(const Configuration& cfg, PairIndex pair, double time);

struct CollisionTimeGradients {
  double time = 0.0;
  Vec omega;   // contact normal, (x_j - x_i)/|x_j - x_i| at contact
  Vec grad_x;  // d t_c / d X, length dN, particle-major
  Vec grad_v;  // d t_c / d V = time * grad_x
};

/// Analytic gradients of the pair collision time. Throws Error(Grazing) for a
/// grazing pair and Error(Usage) when the pair never collides.
CollisionTimeGradients collision_time_gradients(const Configuration& cfg, PairIndex pair,
                                                double grazing_tol = kDefaultGrazingTol);

}  // namespace ihse
