#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "ihse/core.hpp"
#include "ihse/simulator.hpp"

namespace ihse {

enum class PathologicalFamily { E, P };

/// P membership test: the relative-speed band 2 sqrt(eps0) <= |v_i - v_j| <=
/// 2 sqrt(eps0) (1 + (sqrt 2 - 1) mu), or the cut-off form
/// 4 eps0 <= |v_i - v_j|^2 < 4 eps0 / (1 - mu).
enum class PPredicate { Band, Cutoff };

std::string_view to_string(PathologicalFamily family);
std::string_view to_string(PPredicate predicate);

struct PathologicalSetSpec {
  PathologicalFamily family = PathologicalFamily::E;
  std::size_t n_particles = 3;
  int k = 0;
  double delta = 0.1;
  std::optional<double> mu;  // required for P
  double R1 = 2.5;
  double R2 = 1.0;
  ModelParams params;
  PPredicate predicate = PPredicate::Band;

  /// Throws Error(Usage) unless d = 2, delta in (0, 1], delta <= 2/(3 sqrt 2 R2)
  /// and, for P, mu in (0, 1/2].
  void validate() const;
  /// Positions are drawn from the ball of radius R1 + k delta R2.
  double position_radius() const { return R1 + k * delta * R2; }
};

struct MeasureEstimate {
  PathologicalSetSpec spec;
  std::size_t n_samples = 0;
  std::size_t hits = 0;
  std::size_t interior = 0;  // draws that were interior configurations
  double fraction = 0.0;
  double box_volume = 0.0;
  double volume = 0.0;
  double ci95 = 0.0;
};

/// Membership of an interior configuration in the pathological set.
bool in_pathological_set(const Configuration& cfg, const PathologicalSetSpec& spec);

/// Hit-or-miss estimate over the product of stacked-norm balls. Non-interior
/// draws count as misses. Sample k uses stream (seed, k), so the result does
/// not depend on the thread count.
MeasureEstimate estimate_pathological_measure(const PathologicalSetSpec& spec, std::size_t n_samples,
                                              std::uint64_t seed);

struct VolumeOptions {
  SimOptions sim;
  /// Random points of the ball checked for the centre's event sequence.
  std::size_t ball_samples = 32;
  std::uint64_t seed = 0;
};

struct VolumeEvolution {
  std::optional<double> predicted;  // absent for emission events in d != 2
  double measured = 0.0;
  std::vector<SimEvent> events;     // centre trajectory
  std::vector<double> factors;      // per-event analytic contraction factors
};

/// Predicted local volume factor (product over events of sqrt(1 - 4 eps0/s^2)
/// for emission collisions, 1 for elastic ones) against |det| of the
/// finite-difference Jacobian of the flow at `center` with step radius/10.
/// Throws Error(ExcludedConfiguration) if the centre run halts and
/// Error(BranchCrossing) if a stencil or ball point follows a different
/// event sequence.
VolumeEvolution ensemble_volume_evolution(const Configuration& center, double radius, double tau,
                                          const ModelParams& params, const VolumeOptions& opts = {});

}  // namespace ihse
