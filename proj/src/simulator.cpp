#include "ihse/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ihse/collision.hpp"
#include "ihse/errors.hpp"

namespace ihse {

std::string_view to_string(PathologyReason reason) {
  switch (reason) {
    case PathologyReason::Grazing: return "Grazing";
    case PathologyReason::Simultaneous: return "Simultaneous";
    case PathologyReason::CriticalEnergy: return "CriticalEnergy";
    case PathologyReason::EventOverflow: return "EventOverflow";
  }
  return "Unknown";
}

SimReport simulate(const Configuration& cfg, double T, const ModelParams& params, const SimOptions& opts) {
  params.validate();
  if (!(T > 0.0) || !std::isfinite(T)) throw Error(ErrorCode::Usage, "T must be positive and finite");
  if (cfg.dimension() != params.dimension) {
    throw Error(ErrorCode::Usage, "configuration dimension differs from model dimension");
  }
  if (validate_configuration(cfg, opts.tol.contact_tol).kind != DomainStatus::Kind::Interior) {
    throw Error(ErrorCode::Usage, "initial configuration must be interior");
  }

  SimReport report{.final = cfg};
  Configuration& cur = report.final;
  double now = 0.0;
  double min_sep = min_pair_distance(cfg);
  std::size_t next_checkpoint = 1;
  std::optional<PairIndex> recent;

  // Sample checkpoints in (now, until] from the current free segment.
  const auto checkpoints_until = [&](double until) {
    while (next_checkpoint <= opts.checkpoints) {
      const double tk = T * static_cast<double>(next_checkpoint) / static_cast<double>(opts.checkpoints);
      if (tk > until) break;
      min_sep = std::min(min_sep, min_pair_distance(free_transport(cur, tk - now)));
      ++next_checkpoint;
    }
  };
  const auto halt = [&](PathologyReason reason, double dt, std::optional<PairIndex> pair) {
    checkpoints_until(now + dt);
    cur = free_transport(cur, dt);
    now += dt;
    report.halted = Pathology{reason, now, pair};
  };

  const ContactScanOptions scan_base{.grazing_tol = opts.tol.grazing_tol};
  const ScatteringTolerances scat_tol{.crit_tol = opts.tol.crit_tol, .grazing_tol = opts.tol.grazing_tol};

  while (true) {
    ContactScanOptions scan = scan_base;
    scan.recent_pair = recent;
    const auto contacts = contact_events(cur, T - now, scan);
    if (contacts.empty()) {
      checkpoints_until(T);
      cur = free_transport(cur, T - now);
      now = T;
      break;
    }
    const ContactEvent& first = contacts.front();
    if (first.grazing) {
      halt(PathologyReason::Grazing, first.time, first.pair);
      break;
    }
    if (contacts.size() > 1 && contacts[1].time - first.time <= opts.tol.simultaneity_tol) {
      halt(PathologyReason::Simultaneous, first.time, contacts[1].pair);
      break;
    }
    if (report.events.size() >= opts.max_events) {
      halt(PathologyReason::EventOverflow, 0.0, first.pair);
      break;
    }

    const PairIndex pair = first.pair;
    const Vec v_i = cur.velocity(pair.i);
    const Vec v_j = cur.velocity(pair.j);
    if (std::abs((v_i - v_j).squaredNorm() - 4.0 * params.epsilon0) <= opts.tol.crit_tol) {
      halt(PathologyReason::CriticalEnergy, first.time, pair);
      break;
    }

    checkpoints_until(now + first.time);
    const Vec omega = contact_normal(cur, pair, first.time);
    ScatteringOutcome outcome;
    try {
      outcome = scatter(v_i, v_j, omega, params, scat_tol);
    } catch (const Error& e) {
      halt(e.code() == ErrorCode::CriticalEnergy ? PathologyReason::CriticalEnergy : PathologyReason::Grazing,
           first.time, pair);
      break;
    }

    cur = free_transport(cur, first.time);
    now += first.time;
    min_sep = std::min(min_sep, min_pair_distance(cur));
    const double ke_before = kinetic_energy(cur);
    cur.set_velocity(pair.i, outcome.v_i_post);
    cur.set_velocity(pair.j, outcome.v_j_post);
    report.events.push_back({now, pair, outcome.kind, (v_i - v_j).norm(), ke_before, kinetic_energy(cur)});
    if (outcome.kind == CollisionKind::Inelastic) {
      ++report.n_inelastic;
    } else {
      ++report.n_elastic;
    }
    recent = pair;
  }

  report.final_time = now;
  report.min_separation = min_sep;
  return report;
}

BoundCheck check_collision_bounds(const SimReport& report, const ModelParams& params,
                                  const Configuration& initial, std::size_t max_events) {
  BoundCheck out;
  out.initial_ke = kinetic_energy(initial);
  const double ratio = out.initial_ke / params.epsilon0;
  out.inelastic_bound = static_cast<std::size_t>(std::floor(ratio));
  out.inelastic_margin = static_cast<long long>(out.inelastic_bound) - static_cast<long long>(report.n_inelastic);
  out.inelastic_ok = out.inelastic_margin >= 0;

  const double v2 = initial.velocities().squaredNorm() / params.epsilon0;
  out.velocity_bound = v2 > 0.0 ? static_cast<std::size_t>(std::ceil(v2) - 1.0) : 0;
  out.velocity_ok = report.n_inelastic <= out.velocity_bound || report.n_inelastic == 0;

  out.event_margin = static_cast<long long>(max_events) - static_cast<long long>(report.events.size());
  out.finite_ok = out.event_margin > 0 &&
                  !(report.halted && report.halted->reason == PathologyReason::EventOverflow);
  return out;
}

Configuration sample_initial_configuration(CounterRng& rng, std::size_t n, int d, double R1, double R2,
                                           std::size_t max_attempts) {
  if (n == 0 || d < 2 || !(R1 > 0.0) || !(R2 >= 0.0)) {
    throw Error(ErrorCode::Usage, "invalid sampling parameters");
  }
  const auto rows = static_cast<Eigen::Index>(n);
  const auto len = rows * d;
  for (std::size_t attempt = 0; attempt < max_attempts; ++attempt) {
    const Vec x = random_in_ball(rng, len, R1);
    const Vec v = random_in_ball(rng, len, R2);
    // Flat vectors are particle-major, so the row-major views give one particle per row.
    Mat pos = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(x.data(), rows, d);
    Mat vel = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(v.data(), rows, d);
    Configuration cfg(std::move(pos), std::move(vel));
    if (validate_configuration(cfg).kind == DomainStatus::Kind::Interior) return cfg;
  }
  throw Error(ErrorCode::Usage, "no interior configuration found within the attempt budget");
}

}  // namespace ihse
