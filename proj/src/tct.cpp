#include "ihse/tct.hpp"

#include <cmath>
#include <string>

#include "ihse/errors.hpp"

namespace ihse {
namespace {

struct Classified {
  TctDomainClass cls;
  std::optional<CollisionRecord> record;
};

Classified excluded(ExclusionReason reason, std::optional<PairIndex> pair = {}, double time = 0.0) {
  return {Excluded{reason, pair, time}, std::nullopt};
}

Classified classify(const Configuration& cfg, double tau, const ModelParams& params,
                    const Tolerances& tol) {
  if (!(tau > 0.0)) throw Error(ErrorCode::Usage, "tau must be positive");
  if (cfg.dimension() != params.dimension) {
    throw Error(ErrorCode::Usage, "configuration dimension differs from model dimension");
  }
  if (validate_configuration(cfg, tol.contact_tol).kind != DomainStatus::Kind::Interior) {
    return excluded(ExclusionReason::BoundaryStart);
  }

  const auto events = contact_events(cfg, tau, {.grazing_tol = tol.grazing_tol});
  if (events.empty()) return {FreeFlight{}, std::nullopt};

  const ContactEvent& first = events.front();
  if (first.grazing) return excluded(ExclusionReason::Grazing, first.pair, first.time);
  // Any other pair touching before tau, simultaneous or not, violates the
  // single-pair condition on the pre-collisional trajectory.
  if (events.size() > 1) {
    const ContactEvent& second = events[1];
    if (second.grazing && second.time - first.time > tol.simultaneity_tol) {
      return excluded(ExclusionReason::Grazing, second.pair, second.time);
    }
    return excluded(ExclusionReason::Simultaneous, second.pair, second.time);
  }

  const PairIndex pair = first.pair;
  const double t_c = first.time;
  const Vec v_i = cfg.velocity(pair.i);
  const Vec v_j = cfg.velocity(pair.j);
  if (std::abs((v_i - v_j).squaredNorm() - 4.0 * params.epsilon0) <= tol.crit_tol) {
    return excluded(ExclusionReason::CriticalEnergy, pair, t_c);
  }

  const Vec omega = contact_normal(cfg, pair, t_c);
  ScatteringOutcome outcome;
  try {
    outcome = scatter(v_i, v_j, omega, params, {.crit_tol = tol.crit_tol, .grazing_tol = tol.grazing_tol});
  } catch (const Error& e) {
    if (e.code() == ErrorCode::CriticalEnergy) return excluded(ExclusionReason::CriticalEnergy, pair, t_c);
    return excluded(ExclusionReason::Grazing, pair, t_c);
  }

  // Post-collisional configuration at the contact instant; no pair may touch
  // again before tau.
  Configuration post = free_transport(cfg, t_c);
  post.set_velocity(pair.i, outcome.v_i_post);
  post.set_velocity(pair.j, outcome.v_j_post);
  const auto after = contact_events(post, tau - t_c,
                                    {.grazing_tol = tol.grazing_tol, .recent_pair = pair});
  if (!after.empty()) {
    const auto& e = after.front();
    return excluded(e.grazing ? ExclusionReason::Grazing : ExclusionReason::Recollision, e.pair,
                    t_c + e.time);
  }
  return {SingleCollision{pair, t_c, outcome.kind}, CollisionRecord{pair, t_c, std::move(outcome)}};
}

}  // namespace

std::string_view to_string(ExclusionReason reason) {
  switch (reason) {
    case ExclusionReason::Grazing: return "Grazing";
    case ExclusionReason::Simultaneous: return "Simultaneous";
    case ExclusionReason::CriticalEnergy: return "CriticalEnergy";
    case ExclusionReason::Recollision: return "Recollision";
    case ExclusionReason::BoundaryStart: return "BoundaryStart";
  }
  return "Unknown";
}

bool same_branch(const TctDomainClass& a, const TctDomainClass& b) {
  if (a.index() != b.index()) return false;
  if (const auto* ca = std::get_if<SingleCollision>(&a)) {
    const auto& cb = std::get<SingleCollision>(b);
    return ca->pair == cb.pair && ca->kind == cb.kind;
  }
  if (const auto* ea = std::get_if<Excluded>(&a)) return ea->reason == std::get<Excluded>(b).reason;
  return true;
}

TctDomainClass classify_tct_domain(const Configuration& cfg, double tau, const ModelParams& params,
                                   const Tolerances& tol) {
  return classify(cfg, tau, params, tol).cls;
}

TctResult tct_flow(const Configuration& cfg, double tau, const ModelParams& params,
                   const Tolerances& tol) {
  Classified c = classify(cfg, tau, params, tol);
  if (const auto* ex = std::get_if<Excluded>(&c.cls)) {
    throw Error(ErrorCode::ExcludedConfiguration,
                "configuration is excluded from the flow domain: " + std::string(to_string(ex->reason)));
  }
  if (!c.record) return {free_transport(cfg, tau), c.cls, std::nullopt};

  const CollisionRecord& rec = *c.record;
  // X + t_c V + (tau - t_c) V'
  Configuration out = free_transport(cfg, rec.t_c);
  out.set_velocity(rec.pair.i, rec.outcome.v_i_post);
  out.set_velocity(rec.pair.j, rec.outcome.v_j_post);
  out = free_transport(out, tau - rec.t_c);
  return {std::move(out), c.cls, std::move(c.record)};
}

FlowJacobianDet analytic_flow_jacobian_det(const Configuration& cfg, double tau,
                                           const ModelParams& params, const Tolerances& tol) {
  const TctResult flow = tct_flow(cfg, tau, params, tol);
  if (!flow.collision) return {};

  const CollisionRecord& rec = *flow.collision;
  const Vec v_i = cfg.velocity(rec.pair.i);
  const Vec v_j = cfg.velocity(rec.pair.j);
  if (rec.outcome.kind == CollisionKind::Inelastic && cfg.dimension() != 2) {
    throw Error(ErrorCode::Unsupported,
                "no closed-form flow determinant for emission collisions in d != 2");
  }
  const auto grad = collision_time_gradients(cfg, rec.pair, tol.grazing_tol);
  const auto d = static_cast<Eigen::Index>(cfg.dimension());
  const auto gi = grad.grad_x.segment(static_cast<Eigen::Index>(rec.pair.i) * d, d);
  const auto gj = grad.grad_x.segment(static_cast<Eigen::Index>(rec.pair.j) * d, d);

  FlowJacobianDet out;
  out.prefactor = 1.0 + gi.dot(v_i - rec.outcome.v_i_post) + gj.dot(v_j - rec.outcome.v_j_post);
  out.det_n = scattering_velocity_det(v_i, v_j, rec.outcome.omega, params);
  out.det = out.prefactor * out.det_n;
  return out;
}

}  // namespace ihse
