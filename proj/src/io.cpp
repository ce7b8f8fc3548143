#include "ihse/io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "ihse/errors.hpp"

namespace ihse {
namespace {

Json optional_number(const std::optional<double>& x) { return x ? number(*x) : Json(nullptr); }

}  // namespace

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return Json(x).dump();
}

Json number(double x) { return std::isfinite(x) ? Json(x) : Json(format_double(x)); }

double read_number(const Json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf" || s == "+inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  }
  throw Error(ErrorCode::Usage, "expected a number, got " + j.dump());
}

Json to_json(const Vec& v) {
  Json out = Json::array();
  for (Eigen::Index k = 0; k < v.size(); ++k) out.push_back(number(v(k)));
  return out;
}

Vec vec_from_json(const Json& j) {
  if (!j.is_array()) throw Error(ErrorCode::Usage, "expected an array of numbers");
  Vec v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t k = 0; k < j.size(); ++k) v(static_cast<Eigen::Index>(k)) = read_number(j[k]);
  return v;
}

Json to_json(PairIndex p) { return Json::array({p.i + 1, p.j + 1}); }

PairIndex pair_from_json(const Json& j) {
  if (!j.is_array() || j.size() != 2) throw Error(ErrorCode::Usage, "pair must be [i, j]");
  const auto i = j[0].get<long long>();
  const auto k = j[1].get<long long>();
  if (i < 1 || k <= i) throw Error(ErrorCode::Usage, "pair must satisfy 1 <= i < j");
  return {static_cast<std::size_t>(i - 1), static_cast<std::size_t>(k - 1)};
}

Json to_json(const Configuration& cfg) {
  Json particles = Json::array();
  for (std::size_t k = 0; k < cfg.size(); ++k) {
    particles.push_back({{"x", to_json(cfg.position(k))}, {"v", to_json(cfg.velocity(k))}});
  }
  return {{"d", cfg.dimension()}, {"particles", std::move(particles)}};
}

Configuration configuration_from_json(const Json& j) {
  try {
    const Json& particles = j.at("particles");
    if (!particles.is_array() || particles.empty()) {
      throw Error(ErrorCode::Usage, "configuration needs a non-empty particles array");
    }
    const auto d = static_cast<Eigen::Index>(
        j.contains("d") ? j.at("d").get<int>() : static_cast<int>(particles[0].at("x").size()));
    const auto n = static_cast<Eigen::Index>(particles.size());
    Mat x(n, d);
    Mat v(n, d);
    for (Eigen::Index k = 0; k < n; ++k) {
      const Vec xk = vec_from_json(particles[static_cast<std::size_t>(k)].at("x"));
      const Vec vk = vec_from_json(particles[static_cast<std::size_t>(k)].at("v"));
      if (xk.size() != d || vk.size() != d) {
        throw Error(ErrorCode::Usage, "particle " + std::to_string(k + 1) + " has the wrong dimension");
      }
      x.row(k) = xk.transpose();
      v.row(k) = vk.transpose();
    }
    return Configuration(std::move(x), std::move(v));
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::Usage, std::string("malformed configuration: ") + e.what());
  }
}

Configuration read_configuration(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Usage, "cannot open " + path);
  try {
    return configuration_from_json(Json::parse(in));
  } catch (const Json::parse_error& e) {
    throw Error(ErrorCode::Usage, path + ": " + e.what());
  }
}

Json to_json(const ModelParams& p) {
  return {{"epsilon0", number(p.epsilon0)}, {"dimension", p.dimension}, {"diameter", number(p.diameter)}};
}

Json to_json(const Tolerances& t) {
  return {{"contact_tol", number(t.contact_tol)},
          {"grazing_tol", number(t.grazing_tol)},
          {"simultaneity_tol", number(t.simultaneity_tol)},
          {"crit_tol", number(t.crit_tol)}};
}

Json to_json(const DomainStatus& s) {
  static constexpr const char* kinds[] = {"Interior", "Boundary", "Invalid"};
  Json pairs = Json::array();
  for (const auto& p : s.pairs) pairs.push_back(to_json(p));
  return {{"status", kinds[static_cast<int>(s.kind)]},
          {"pairs", std::move(pairs)},
          {"min_distance", number(s.min_distance)}};
}

Json to_json(const CollisionPrediction& p) {
  return {{"pair", to_json(p.pair)},
          {"delta", number(p.discriminant)},
          {"tau", optional_number(p.time)},
          {"grazing", p.grazing}};
}

Json to_json(const ScatteringOutcome& o) {
  Json out = {{"kind", to_string(o.kind)}, {"omega", to_json(o.omega)}};
  out["sigma"] = o.sigma ? to_json(*o.sigma) : Json(nullptr);
  out["kappa"] = optional_number(o.kappa);
  out["v_i_post"] = to_json(o.v_i_post);
  out["v_j_post"] = to_json(o.v_j_post);
  out["energy_loss"] = number(o.energy_loss);
  return out;
}

Json to_json(const TctDomainClass& c) {
  if (std::holds_alternative<FreeFlight>(c)) return {{"class", "FreeFlight"}};
  if (const auto* s = std::get_if<SingleCollision>(&c)) {
    return {{"class", "SingleCollision"}, {"pair", to_json(s->pair)}, {"t_c", number(s->t_c)},
            {"kind", to_string(s->kind)}};
  }
  const auto& e = std::get<Excluded>(c);
  return {{"class", "Excluded"},
          {"reason", to_string(e.reason)},
          {"pair", e.pair ? to_json(*e.pair) : Json(nullptr)},
          {"time", number(e.time)}};
}

Json to_json(const TctResult& r) {
  Json out = {{"classification", to_json(r.classification)}, {"final", to_json(r.final)}};
  if (r.collision) {
    out["collision"] = {{"pair", to_json(r.collision->pair)},
                        {"t_c", number(r.collision->t_c)},
                        {"outcome", to_json(r.collision->outcome)}};
  } else {
    out["collision"] = nullptr;
  }
  return out;
}

Json to_json(const FlowJacobianDet& f) {
  return {{"det", number(f.det)}, {"prefactor", number(f.prefactor)}, {"det_n", number(f.det_n)}};
}

Json to_json(const JacobianReport& r) {
  return {{"analytic_det", optional_number(r.analytic_det)},
          {"fd_det", number(r.fd_det)},
          {"prefactor", optional_number(r.prefactor)},
          {"det_n_fd", optional_number(r.det_n_fd)},
          {"residual", optional_number(r.residual)},
          {"step", number(r.step)}};
}

Json to_json(const ScatteringCheck& c) {
  Json out = {{"index", c.index},
              {"v_i", to_json(c.input.v_i)},
              {"v_j", to_json(c.input.v_j)},
              {"omega", to_json(c.input.omega)}};
  if (c.error) {
    out["error"] = *c.error;
    return out;
  }
  out["kind"] = to_string(c.kind);
  out["pre_ke"] = number(c.pre_ke);
  out["post_ke"] = number(c.post_ke);
  out["loss"] = number(c.loss);
  out["fd_det"] = c.report ? number(c.report->fd_det) : Json(nullptr);
  out["report"] = c.report ? to_json(*c.report) : Json(nullptr);
  return out;
}

Json to_json(const SimEvent& e) {
  return {{"time", number(e.time)},
          {"pair", to_json(e.pair)},
          {"kind", to_string(e.kind)},
          {"relative_speed", number(e.relative_speed)},
          {"ke_before", number(e.ke_before)},
          {"ke_after", number(e.ke_after)}};
}

Json to_json(const SimReport& r) {
  Json events = Json::array();
  for (const auto& e : r.events) events.push_back(to_json(e));
  Json halted = nullptr;
  if (r.halted) {
    halted = {{"reason", to_string(r.halted->reason)},
              {"time", number(r.halted->time)},
              {"pair", r.halted->pair ? to_json(*r.halted->pair) : Json(nullptr)}};
  }
  return {{"events", std::move(events)},
          {"final", to_json(r.final)},
          {"final_time", number(r.final_time)},
          {"n_elastic", r.n_elastic},
          {"n_inelastic", r.n_inelastic},
          {"min_separation", number(r.min_separation)},
          {"halted", std::move(halted)}};
}

Json to_json(const BoundCheck& b) {
  return {{"initial_ke", number(b.initial_ke)},
          {"inelastic_bound", b.inelastic_bound},
          {"inelastic_ok", b.inelastic_ok},
          {"inelastic_margin", b.inelastic_margin},
          {"velocity_bound", b.velocity_bound},
          {"velocity_ok", b.velocity_ok},
          {"finite_ok", b.finite_ok},
          {"event_margin", b.event_margin},
          {"ok", b.ok()}};
}

Json to_json(const PathologicalSetSpec& s) {
  return {{"family", to_string(s.family)},
          {"n_particles", s.n_particles},
          {"k", s.k},
          {"delta", number(s.delta)},
          {"mu", optional_number(s.mu)},
          {"R1", number(s.R1)},
          {"R2", number(s.R2)},
          {"params", to_json(s.params)},
          {"predicate", to_string(s.predicate)}};
}

Json to_json(const MeasureEstimate& m) {
  return {{"spec", to_json(m.spec)},
          {"n_samples", m.n_samples},
          {"hits", m.hits},
          {"interior", m.interior},
          {"fraction", number(m.fraction)},
          {"box_volume", number(m.box_volume)},
          {"volume", number(m.volume)},
          {"ci95", number(m.ci95)}};
}

Json to_json(const VolumeEvolution& v) {
  Json events = Json::array();
  for (const auto& e : v.events) events.push_back(to_json(e));
  Json factors = Json::array();
  for (double f : v.factors) factors.push_back(number(f));
  return {{"predicted", optional_number(v.predicted)},
          {"measured", number(v.measured)},
          {"factors", std::move(factors)},
          {"events", std::move(events)}};
}

}  // namespace ihse
