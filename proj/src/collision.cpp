#include "ihse/collision.hpp"

#include <algorithm>
#include <cmath>

#include "ihse/errors.hpp"

namespace ihse {
namespace {

// |r + t w|^2 - 1 = a t^2 + 2 b t + c
struct PairQuadratic {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;

  double discriminant() const { return b * b - a * c; }
};

PairQuadratic pair_quadratic(const Configuration& cfg, PairIndex pair) {
  const Vec r = cfg.position(pair.i) - cfg.position(pair.j);
  const Vec w = cfg.velocity(pair.i) - cfg.velocity(pair.j);
  return {w.squaredNorm(), r.dot(w), r.squaredNorm() - 1.0};
}

void check_pair(const Configuration& cfg, PairIndex pair) {
  if (!(pair.i < pair.j) || pair.j >= cfg.size()) {
    throw Error(ErrorCode::Usage, "pair indices must satisfy i < j < N");
  }
}

}  // namespace

double grazing_discriminant(const Configuration& cfg, PairIndex pair) {
  check_pair(cfg, pair);
  return pair_quadratic(cfg, pair).discriminant();
}

std::optional<double> pair_collision_time(const Configuration& cfg, PairIndex pair,
                                          double grazing_tol, double min_time) {
  check_pair(cfg, pair);
  const PairQuadratic q = pair_quadratic(cfg, pair);
  const double disc = q.discriminant();
  if (q.a == 0.0 || disc <= grazing_tol) return std::nullopt;

  // Cancellation-free pair of roots: s = -(b + sgn(b) sqrt(disc)) has no
  // subtraction, roots are s/a and c/s.
  const double sq = std::sqrt(disc);
  const double s = -(q.b + std::copysign(sq, q.b));
  double lo = s / q.a;
  double hi = (s != 0.0) ? q.c / s : lo;
  if (lo > hi) std::swap(lo, hi);
  if (lo > min_time) return lo;
  if (hi > min_time) return hi;
  return std::nullopt;
}

CollisionPrediction predict_pair(const Configuration& cfg, PairIndex pair, double grazing_tol) {
  CollisionPrediction p;
  p.pair = pair;
  p.discriminant = grazing_discriminant(cfg, pair);
  p.grazing = std::abs(p.discriminant) <= grazing_tol;
  p.time = pair_collision_time(cfg, pair, grazing_tol);
  return p;
}

std::vector<CollisionPrediction> predict_all(const Configuration& cfg, double grazing_tol) {
  std::vector<CollisionPrediction> out;
  for (const auto& p : all_pairs(cfg.size())) out.push_back(predict_pair(cfg, p, grazing_tol));
  return out;
}

std::optional<double> grazing_contact_time(const Configuration& cfg, PairIndex pair,
                                           double grazing_tol) {
  check_pair(cfg, pair);
  const PairQuadratic q = pair_quadratic(cfg, pair);
  if (q.a == 0.0 || std::abs(q.discriminant()) > grazing_tol || q.b >= 0.0) return std::nullopt;
  return -q.b / q.a;
}

std::vector<ContactEvent> contact_events(const Configuration& cfg, double horizon,
                                         const ContactScanOptions& opts) {
  std::vector<ContactEvent> events;
  for (const auto& p : all_pairs(cfg.size())) {
    const bool recent = opts.recent_pair && *opts.recent_pair == p;
    const double min_time = recent ? opts.recent_min_time : 0.0;
    if (auto t = pair_collision_time(cfg, p, opts.grazing_tol, min_time); t && *t <= horizon) {
      events.push_back({*t, p, false});
    } else if (auto tg = grazing_contact_time(cfg, p, opts.grazing_tol);
               tg && *tg > min_time && *tg <= horizon) {
      events.push_back({*tg, p, true});
    }
  }
  std::sort(events.begin(), events.end(), [](const ContactEvent& a, const ContactEvent& b) {
    return a.time != b.time ? a.time < b.time : a.pair < b.pair;
  });
  return events;
}

std::optional<FirstCollision> first_collision(const Configuration& cfg, double horizon,
                                              double simultaneity_tol, double grazing_tol) {
  if (!(horizon > 0.0)) throw Error(ErrorCode::Usage, "horizon must be positive");
  std::optional<FirstCollision> best;
  std::vector<double> times;
  for (const auto& p : all_pairs(cfg.size())) {
    const auto t = pair_collision_time(cfg, p, grazing_tol);
    if (!t) continue;
    times.push_back(*t);
    // Strict '<' keeps the lexicographically first pair on exact ties.
    if (!best || *t < best->time) best = FirstCollision{*t, p, true};
  }
  if (!best || best->time > horizon) return std::nullopt;
  const auto close = std::count_if(times.begin(), times.end(), [&](double t) {
    return t - best->time <= simultaneity_tol;
  });
  best->unique = close == 1;
  return best;
}

Vec contact_normal(const Configuration& cfg, PairIndex pair, double time) {
  const Vec xi = cfg.position(pair.i) + time * cfg.velocity(pair.i);
  const Vec xj = cfg.position(pair.j) + time * cfg.velocity(pair.j);
  const Vec diff = xj - xi;
  return diff / diff.norm();
}

CollisionTimeGradients collision_time_gradients(const Configuration& cfg, PairIndex pair,
                                                double grazing_tol) {
  check_pair(cfg, pair);
  const double disc = grazing_discriminant(cfg, pair);
  if (std::abs(disc) <= grazing_tol) {
    throw Error(ErrorCode::Grazing, "collision-time gradient is undefined for a grazing pair");
  }
  const auto t = pair_collision_time(cfg, pair, grazing_tol);
  if (!t) throw Error(ErrorCode::Usage, "pair has no future collision");

  CollisionTimeGradients g;
  g.time = *t;
  g.omega = contact_normal(cfg, pair, *t);
  const double normal_speed = (cfg.velocity(pair.i) - cfg.velocity(pair.j)).dot(g.omega);
  const auto d = static_cast<Eigen::Index>(cfg.dimension());
  g.grad_x = Vec::Zero(d * static_cast<Eigen::Index>(cfg.size()));
  g.grad_x.segment(static_cast<Eigen::Index>(pair.i) * d, d) = -g.omega / normal_speed;
  g.grad_x.segment(static_cast<Eigen::Index>(pair.j) * d, d) = g.omega / normal_speed;
  g.grad_v = g.time * g.grad_x;
  return g;
}

}  // namespace ihse
