#include "ihse/measure_mc.hpp"

#include <atomic>
#include <cmath>
#include <string>

#include "ihse/errors.hpp"
#include "ihse/jacobian_lab.hpp"
#include "ihse/parallel.hpp"
#include "ihse/rng.hpp"

namespace ihse {
namespace {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct EventKey {
  PairIndex pair;
  CollisionKind kind;
  bool operator==(const EventKey&) const = default;
};

std::vector<EventKey> signature(const SimReport& r) {
  std::vector<EventKey> out;
  out.reserve(r.events.size());
  for (const auto& e : r.events) out.push_back({e.pair, e.kind});
  return out;
}

}  // namespace

std::string_view to_string(PathologicalFamily family) {
  return family == PathologicalFamily::E ? "E" : "P";
}

std::string_view to_string(PPredicate predicate) {
  return predicate == PPredicate::Band ? "band" : "cutoff";
}

void PathologicalSetSpec::validate() const {
  params.validate();
  if (params.dimension != 2) throw Error(ErrorCode::Usage, "pathological sets are sampled in d = 2");
  if (n_particles < 2) throw Error(ErrorCode::Usage, "need at least two particles");
  if (k < 0) throw Error(ErrorCode::Usage, "k must be non-negative");
  if (!(R1 > 0.0) || !(R2 > 0.0)) throw Error(ErrorCode::Usage, "R1 and R2 must be positive");
  if (!(delta > 0.0) || delta > 1.0) throw Error(ErrorCode::Usage, "delta must lie in (0, 1]");
  if (delta > 2.0 / (3.0 * std::sqrt(2.0) * R2)) {
    throw Error(ErrorCode::Usage, "delta must not exceed 2/(3 sqrt(2) R2)");
  }
  if (family == PathologicalFamily::P) {
    if (!mu) throw Error(ErrorCode::Usage, "family P requires mu");
    if (!(*mu > 0.0) || *mu > 0.5) throw Error(ErrorCode::Usage, "mu must lie in (0, 1/2]");
  }
}

bool in_pathological_set(const Configuration& cfg, const PathologicalSetSpec& spec) {
  const std::size_t n = cfg.size();
  const double sqrt2 = std::sqrt(2.0);
  if (spec.family == PathologicalFamily::E) {
    const double gap = 1.0 + 1.5 * sqrt2 * spec.delta * spec.R2;
    int close = 0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        if ((cfg.position(i) - cfg.position(j)).norm() <= gap && ++close >= 2) return true;
      }
    }
    return false;
  }

  const double gap = 1.0 + sqrt2 * spec.delta * spec.R2;
  const double eps0 = spec.params.epsilon0;
  const double mu = spec.mu.value_or(0.5);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if ((cfg.position(i) - cfg.position(j)).norm() > gap) continue;
      const double s = (cfg.velocity(i) - cfg.velocity(j)).norm();
      bool hit = false;
      if (spec.predicate == PPredicate::Band) {
        const double lo = 2.0 * std::sqrt(eps0);
        hit = s >= lo && s <= lo * (1.0 + (sqrt2 - 1.0) * mu);
      } else {
        hit = s * s >= 4.0 * eps0 && s * s < 4.0 * eps0 / (1.0 - mu);
      }
      if (hit) return true;
    }
  }
  return false;
}

MeasureEstimate estimate_pathological_measure(const PathologicalSetSpec& spec, std::size_t n_samples,
                                              std::uint64_t seed) {
  spec.validate();
  if (n_samples == 0) throw Error(ErrorCode::Usage, "samples must be positive");
  const auto rows = static_cast<Eigen::Index>(spec.n_particles);
  const int d = spec.params.dimension;
  const Eigen::Index len = rows * d;
  const double rx = spec.position_radius();

  const unsigned workers = std::max(1u, worker_count());
  const std::size_t chunks = std::min<std::size_t>(n_samples, 64 * workers);
  std::vector<std::size_t> hits(chunks, 0);
  std::vector<std::size_t> interior(chunks, 0);
  parallel_for(chunks, [&](std::size_t c) {
    const std::size_t begin = n_samples * c / chunks;
    const std::size_t end = n_samples * (c + 1) / chunks;
    for (std::size_t idx = begin; idx < end; ++idx) {
      CounterRng rng(seed, idx);
      const Vec x = random_in_ball(rng, len, rx);
      const Vec v = random_in_ball(rng, len, spec.R2);
      Configuration cfg(Mat(Eigen::Map<const RowMat>(x.data(), rows, d)),
                        Mat(Eigen::Map<const RowMat>(v.data(), rows, d)));
      if (validate_configuration(cfg, 0.0).kind != DomainStatus::Kind::Interior) continue;
      ++interior[c];
      if (in_pathological_set(cfg, spec)) ++hits[c];
    }
  });

  MeasureEstimate out;
  out.spec = spec;
  out.n_samples = n_samples;
  for (std::size_t c = 0; c < chunks; ++c) {
    out.hits += hits[c];
    out.interior += interior[c];
  }
  const double nd = static_cast<double>(n_samples);
  out.fraction = static_cast<double>(out.hits) / nd;
  out.box_volume = ball_volume(static_cast<int>(len), rx) * ball_volume(static_cast<int>(len), spec.R2);
  out.volume = out.fraction * out.box_volume;
  out.ci95 = 1.96 * std::sqrt(out.fraction * (1.0 - out.fraction) / nd) * out.box_volume;
  return out;
}

VolumeEvolution ensemble_volume_evolution(const Configuration& center, double radius, double tau,
                                          const ModelParams& params, const VolumeOptions& opts) {
  if (!(radius > 0.0)) throw Error(ErrorCode::Usage, "radius must be positive");
  const SimReport ref = simulate(center, tau, params, opts.sim);
  if (ref.halted) {
    throw Error(ErrorCode::ExcludedConfiguration,
                "centre trajectory halts: " + std::string(to_string(ref.halted->reason)));
  }
  const auto expected = signature(ref);
  const int d = center.dimension();

  VolumeEvolution out;
  out.events = ref.events;
  bool closed_form = true;
  double predicted = 1.0;
  for (const auto& e : ref.events) {
    double factor = 1.0;
    if (e.kind == CollisionKind::Inelastic) {
      if (d != 2) closed_form = false;
      factor = std::sqrt(1.0 - 4.0 * params.epsilon0 / (e.relative_speed * e.relative_speed));
    }
    out.factors.push_back(factor);
    predicted *= factor;
  }
  if (closed_form) out.predicted = predicted;

  const auto same_sequence = [&](const Vec& z) {
    try {
      const SimReport r = simulate(Configuration::from_state_vector(d, z), tau, params, opts.sim);
      return !r.halted && signature(r) == expected;
    } catch (const Error&) {
      return false;
    }
  };

  const Vec z0 = center.state_vector();
  for (std::size_t k = 0; k < opts.ball_samples; ++k) {
    CounterRng rng(opts.seed, k, 0x766f6c);
    if (!same_sequence(z0 + random_in_ball(rng, z0.size(), radius))) {
      throw Error(ErrorCode::BranchCrossing, "a point of the ball follows a different event sequence");
    }
  }

  const VectorMap flow = [&](const Vec& z) {
    return simulate(Configuration::from_state_vector(d, z), tau, params, opts.sim).final.state_vector();
  };
  const Mat jac = fd_jacobian(flow, z0, radius / 10.0, same_sequence);
  out.measured = std::abs(jac.partialPivLu().determinant());
  return out;
}

}  // namespace ihse
