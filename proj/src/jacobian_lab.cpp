#include "ihse/jacobian_lab.hpp"

#include <cmath>

#include "ihse/errors.hpp"
#include "ihse/parallel.hpp"

namespace ihse {
namespace {

#ifdef __SIZEOF_FLOAT128__
using Wide = __float128;
#else
using Wide = long double;
#endif

double determinant(const Mat& m) { return m.partialPivLu().determinant(); }

JacobianReport make_report(std::optional<double> analytic, double fd, double h) {
  JacobianReport r;
  r.analytic_det = analytic;
  r.fd_det = fd;
  r.step = h;
  if (analytic) r.residual = std::abs(*analytic - fd) / std::max(1.0, std::abs(fd));
  return r;
}

bool accepts(KindFilter filter, CollisionKind kind) {
  return filter == KindFilter::Any ||
         (filter == KindFilter::Elastic) == (kind == CollisionKind::Elastic);
}

Vec stack(const Vec& a, const Vec& b) {
  Vec z(a.size() + b.size());
  z << a, b;
  return z;
}

VectorMap flow_map(const Configuration& cfg, double tau, const ModelParams& params, const Tolerances& tol) {
  const int d = cfg.dimension();
  return [=](const Vec& z) {
    return tct_flow(Configuration::from_state_vector(d, z), tau, params, tol).final.state_vector();
  };
}

BranchCheck flow_branch(const Configuration& cfg, double tau, const ModelParams& params,
                        const Tolerances& tol) {
  const TctDomainClass centre = classify_tct_domain(cfg, tau, params, tol);
  const int d = cfg.dimension();
  return [=](const Vec& z) {
    return same_branch(centre, classify_tct_domain(Configuration::from_state_vector(d, z), tau, params, tol));
  };
}

}  // namespace

Mat fd_jacobian(const VectorMap& map, const Vec& point, double h, const BranchCheck& on_branch) {
  if (!(h > 0.0)) throw Error(ErrorCode::Usage, "finite-difference step must be positive");
  const Eigen::Index n = point.size();
  Mat jac;
  Vec plus = point;
  Vec minus = point;
  for (Eigen::Index k = 0; k < n; ++k) {
    plus(k) = point(k) + h;
    minus(k) = point(k) - h;
    if (on_branch && (!on_branch(plus) || !on_branch(minus))) {
      throw Error(ErrorCode::BranchCrossing,
                  "finite-difference stencil crosses a branch boundary along coordinate " + std::to_string(k));
    }
    const Vec fp = map(plus);
    const Vec fm = map(minus);
    if (!fp.allFinite() || !fm.allFinite()) {
      throw Error(ErrorCode::NonFinite, "map returned a non-finite value on the stencil");
    }
    if (k == 0) jac.resize(fp.size(), n);
    jac.col(k) = (fp - fm) / (2.0 * h);
    plus(k) = point(k);
    minus(k) = point(k);
  }
  return jac;
}

RichardsonDet fd_determinant_richardson(const VectorMap& map, const Vec& point, double h,
                                        const BranchCheck& on_branch) {
  const double coarse = determinant(fd_jacobian(map, point, h, on_branch));
  const double fine = determinant(fd_jacobian(map, point, 0.5 * h, on_branch));
  return {fine, std::abs(coarse - fine)};
}

TensorLemmaResult tensor_sum_det(const TensorLemmaCase& c) {
  if (c.u.size() != 2 || c.omega.size() != 2) {
    throw Error(ErrorCode::Unsupported, "tensor-sum lemma is stated for d = 2");
  }
  // a (x) b acts as x -> (b . x) a, i.e. the matrix a b^T.
  const Mat m = Mat::Identity(2, 2) + c.lambda * c.u * c.u.transpose() +
                c.mu * c.u * c.omega.transpose() + c.nu * c.omega * c.omega.transpose();
  TensorLemmaResult out{tensor_sum_det_formula(c.lambda, c.mu, c.nu, c.u, c.omega),
                        m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0), 0.0};

  const Wide l = c.lambda, mu = c.mu, nu = c.nu;
  const Wide u0 = c.u(0), u1 = c.u(1), w0 = c.omega(0), w1 = c.omega(1);
  const Wide a = 1 + l * u0 * u0 + mu * u0 * w0 + nu * w0 * w0;
  const Wide b = l * u0 * u1 + mu * u0 * w1 + nu * w0 * w1;
  const Wide cc = l * u1 * u0 + mu * u1 * w0 + nu * w1 * w0;
  const Wide d = 1 + l * u1 * u1 + mu * u1 * w1 + nu * w1 * w1;
  const Wide cross = u0 * w1 - u1 * w0;
  const Wide formula = 1 + l * (u0 * u0 + u1 * u1) + mu * (u0 * w0 + u1 * w1) + nu * (w0 * w0 + w1 * w1) +
                       l * nu * cross * cross;
  const Wide diff = formula - (a * d - b * cc);
  out.abs_diff = static_cast<double>(diff < 0 ? -diff : diff);
  return out;
}

TensorLemmaCase random_tensor_lemma_case(CounterRng& rng, double range) {
  TensorLemmaCase c;
  c.lambda = rng.uniform(-range, range);
  c.mu = rng.uniform(-range, range);
  c.nu = rng.uniform(-range, range);
  c.u = Vec{{rng.uniform(-range, range), rng.uniform(-range, range)}};
  c.omega = Vec{{rng.uniform(-range, range), rng.uniform(-range, range)}};
  return c;
}

ScatteringInput sample_scattering_input(CounterRng& rng, const ModelParams& params,
                                        const ScatteringSampleOptions& opts) {
  const Eigen::Index d = params.dimension;
  const double threshold = 4.0 * params.epsilon0;
  for (int attempt = 0; attempt < 1000000; ++attempt) {
    ScatteringInput in{random_in_ball(rng, d, opts.speed_radius), random_in_ball(rng, d, opts.speed_radius),
                       random_unit_vector(rng, d)};
    const Vec rel = in.v_j - in.v_i;
    const double s = rel.norm();
    if (s < 1e-6) continue;
    double cosine = rel.dot(in.omega) / s;
    if (cosine > 0.0) {
      in.omega = -in.omega;
      cosine = -cosine;
    }
    if (-cosine < opts.grazing_margin) continue;
    if (std::isfinite(threshold) && std::abs(s * s - threshold) < opts.critical_margin * threshold) continue;
    if (!accepts(opts.kind, collision_kind(in.v_i, in.v_j, params))) continue;
    return in;
  }
  throw Error(ErrorCode::Usage, "could not sample a scattering input with the requested filters");
}

Mat fd_scattering_jacobian(const ScatteringInput& in, const ModelParams& params, double h) {
  const Eigen::Index d = in.v_i.size();
  const CollisionKind kind = collision_kind(in.v_i, in.v_j, params);
  const Vec omega = in.omega;
  const double eps0 = params.epsilon0;
  const VectorMap law = [=](const Vec& z) {
    const Vec vi = z.head(d);
    const Vec vj = z.tail(d);
    const auto post = kind == CollisionKind::Inelastic ? emission_law(vi, vj, omega, eps0)
                                                       : elastic_law(vi, vj, omega);
    return stack(post.first, post.second);
  };
  const BranchCheck branch = [=](const Vec& z) {
    const Vec vi = z.head(d);
    const Vec vj = z.tail(d);
    return collision_kind(vi, vj, params) == kind && (vj - vi).dot(omega) < 0.0;
  };
  return fd_jacobian(law, stack(in.v_i, in.v_j), h, branch);
}

std::vector<ScatteringCheck> verify_scattering_measure(std::size_t samples, const ModelParams& params,
                                                       std::uint64_t seed,
                                                       const ScatteringSampleOptions& opts) {
  if (samples == 0) throw Error(ErrorCode::Usage, "samples must be positive");
  std::vector<ScatteringCheck> out(samples);
  parallel_for(samples, [&](std::size_t k) {
    CounterRng rng(seed, k);
    ScatteringCheck& check = out[k];
    check.index = k;
    check.input = sample_scattering_input(rng, params, opts);
    const auto& in = check.input;
    try {
      const ScatteringOutcome res = scatter(in.v_i, in.v_j, in.omega, params);
      check.kind = res.kind;
      check.pre_ke = 0.5 * (in.v_i.squaredNorm() + in.v_j.squaredNorm());
      check.post_ke = 0.5 * (res.v_i_post.squaredNorm() + res.v_j_post.squaredNorm());
      check.loss = res.energy_loss;
      const double fd = determinant(fd_scattering_jacobian(in, params, opts.h));
      std::optional<double> analytic;
      if (params.dimension == 2 || res.kind == CollisionKind::Elastic) {
        analytic = scattering_velocity_det(in.v_i, in.v_j, in.omega, params);
      }
      check.report = make_report(analytic, fd, opts.h);
      check.report->det_n_fd = fd;
    } catch (const Error& e) {
      check.error = std::string(to_string(e.code())) + ": " + e.what();
    }
  });
  return out;
}

JacobianReport verify_spherical_map(const Vec& w, double epsilon0, double h) {
  const VectorMap map = [=](const Vec& x) { return spherical_emission_map_cartesian(x, epsilon0); };
  return make_report(-1.0, determinant(fd_jacobian(map, w, h)), h);
}

JacobianReport verify_flow_jacobian(const Configuration& cfg, double tau, const ModelParams& params,
                                    double h, const Tolerances& tol) {
  const TctResult centre = tct_flow(cfg, tau, params, tol);
  const Mat jac = fd_jacobian(flow_map(cfg, tau, params, tol), cfg.state_vector(), h,
                              flow_branch(cfg, tau, params, tol));

  std::optional<double> analytic;
  std::optional<double> prefactor;
  try {
    const FlowJacobianDet det = analytic_flow_jacobian_det(cfg, tau, params, tol);
    analytic = det.det;
    prefactor = det.prefactor;
  } catch (const Error& e) {
    if (e.code() != ErrorCode::Unsupported) throw;
  }
  JacobianReport report = make_report(analytic, determinant(jac), h);
  report.prefactor = prefactor;
  if (centre.collision) {
    const auto& rec = *centre.collision;
    const ScatteringInput in{cfg.velocity(rec.pair.i), cfg.velocity(rec.pair.j), rec.outcome.omega};
    report.det_n_fd = determinant(fd_scattering_jacobian(in, params, h));
  }
  return report;
}

bool stencil_safe(const Configuration& cfg, double tau, const ModelParams& params, double radius,
                  const Tolerances& tol) {
  const BranchCheck branch = flow_branch(cfg, tau, params, tol);
  Vec z = cfg.state_vector();
  for (Eigen::Index k = 0; k < z.size(); ++k) {
    const double centre = z(k);
    for (const double offset : {radius, -radius}) {
      z(k) = centre + offset;
      if (!branch(z)) return false;
    }
    z(k) = centre;
  }
  return true;
}

Configuration sample_tct_configuration(CounterRng& rng, double tau, const ModelParams& params,
                                       const TctSampleOptions& opts) {
  if (opts.n_particles < 2) throw Error(ErrorCode::Usage, "need at least two particles for a collision");
  const Eigen::Index d = params.dimension;
  const auto n = static_cast<Eigen::Index>(opts.n_particles);
  const double threshold = 4.0 * params.epsilon0;
  const double spread = 2.5 + 1.5 * static_cast<double>(n);

  for (std::size_t attempt = 0; attempt < opts.max_attempts; ++attempt) {
    const double t_c = rng.uniform(0.3, 0.7) * tau;
    Vec omega = random_unit_vector(rng, d);
    const Vec v_i = random_in_ball(rng, d, opts.speed_radius);
    const Vec v_j = random_in_ball(rng, d, opts.speed_radius);
    const Vec rel = v_j - v_i;
    const double s = rel.norm();
    if (s < 0.2) continue;
    if (rel.dot(omega) > 0.0) omega = -omega;
    if (-rel.dot(omega) < 0.2 * s) continue;
    if (std::isfinite(threshold) && std::abs(s * s - threshold) < 0.2 * threshold) continue;
    if (!accepts(opts.kind, collision_kind(v_i, v_j, params))) continue;

    Mat x(n, d);
    Mat v(n, d);
    const Vec contact_i = random_in_ball(rng, d, 1.0);
    x.row(0) = (contact_i - t_c * v_i).transpose();
    x.row(1) = (contact_i + omega - t_c * v_j).transpose();
    v.row(0) = v_i.transpose();
    v.row(1) = v_j.transpose();
    for (Eigen::Index k = 2; k < n; ++k) {
      x.row(k) = random_in_ball(rng, d, spread).transpose();
      v.row(k) = random_in_ball(rng, d, opts.speed_radius).transpose();
    }
    const Configuration cfg(std::move(x), std::move(v));
    const auto cls = classify_tct_domain(cfg, tau, params);
    const auto* single = std::get_if<SingleCollision>(&cls);
    if (single == nullptr || single->pair != PairIndex{0, 1}) continue;
    if (!stencil_safe(cfg, tau, params, opts.safety_radius)) continue;
    return cfg;
  }
  throw Error(ErrorCode::Usage, "could not sample a single-collision configuration");
}

}  // namespace ihse
