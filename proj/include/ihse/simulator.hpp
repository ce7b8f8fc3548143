#pragma once

#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

#include "ihse/core.hpp"
#include "ihse/rng.hpp"
#include "ihse/scattering.hpp"
#include "ihse/tct.hpp"

namespace ihse {

struct SimOptions {
  Tolerances tol;
  std::size_t max_events = 1000000;
  /// Uniform checkpoint times k T / checkpoints, k = 1..checkpoints, where
  /// the minimum pair gap is sampled in addition to every event.
  std::size_t checkpoints = 100;
};

struct SimEvent {
  double time = 0.0;
  PairIndex pair;
  CollisionKind kind = CollisionKind::Elastic;
  double relative_speed = 0.0;  // |v_i - v_j| before the collision
  double ke_before = 0.0;
  double ke_after = 0.0;
};

enum class PathologyReason { Grazing, Simultaneous, CriticalEnergy, EventOverflow };

std::string_view to_string(PathologyReason reason);

struct Pathology {
  PathologyReason reason = PathologyReason::Grazing;
  double time = 0.0;
  std::optional<PairIndex> pair;
};

struct SimReport {
  std::vector<SimEvent> events;
  Configuration final;
  double final_time = 0.0;  // T, or the halting time
  std::size_t n_elastic = 0;
  std::size_t n_inelastic = 0;
  double min_separation = 0.0;
  std::optional<Pathology> halted;
};

/// Event-driven dynamics on [0, T]: transport to the next contact, scatter,
/// repeat. Degenerate events stop the run and are reported in `halted`; the
/// state at the halting time is returned in `final`. Throws Error(Usage) for
/// T <= 0 or a non-interior start.
SimReport simulate(const Configuration& cfg, double T, const ModelParams& params, const SimOptions& opts = {});

struct BoundCheck {
  double initial_ke = 0.0;
  std::size_t inelastic_bound = 0;  // floor(KE_0 / eps0)
  bool inelastic_ok = true;
  long long inelastic_margin = 0;
  /// Largest integer strictly below |V_0|^2 / eps0.
  std::size_t velocity_bound = 0;
  bool velocity_ok = true;
  bool finite_ok = true;  // run did not hit max_events
  long long event_margin = 0;
  bool ok() const { return inelastic_ok && velocity_ok && finite_ok; }
};

BoundCheck check_collision_bounds(const SimReport& report, const ModelParams& params,
                                  const Configuration& initial, std::size_t max_events = SimOptions{}.max_events);

/// N particles in dimension d with the stacked position vector uniform in the
/// ball of radius R1 and the stacked velocity vector uniform in the ball of
/// radius R2; overlapping or touching draws are rejected.
Configuration sample_initial_configuration(CounterRng& rng, std::size_t n, int d, double R1, double R2,
                                           std::size_t max_attempts = 1000000);

}  // namespace ihse
