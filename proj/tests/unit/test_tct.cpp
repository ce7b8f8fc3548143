#include "doctest.h"

#include <cmath>

#include "helpers.hpp"
#include "ihse/errors.hpp"
#include "ihse/jacobian_lab.hpp"
#include "ihse/tct.hpp"

using namespace ihse;
using ihse::test::cfg;
using ihse::test::head_on;
using ihse::test::vec;

namespace {

Excluded excluded(const TctDomainClass& c) {
  REQUIRE(std::holds_alternative<Excluded>(c));
  return std::get<Excluded>(c);
}

Configuration reversed(const Configuration& c) { return Configuration(c.positions(), -c.velocities()); }

// 1 strikes 2 obliquely; 2 then runs into 3, which 1's straight path misses.
Configuration recollision_chain() {
  const double cx = 2.0 - std::sqrt(0.75);
  const Vec omega = vec({2.0 - cx, -0.5});
  const Vec x3 = vec({2, 0}) + 2.5 * omega;
  return cfg({{0, 0.5}, {2, 0}, {x3(0), x3(1)}}, {{3, 0}, {0, 0}, {0, 0}});
}

}  // namespace

TEST_CASE("classification examples") {
  const auto single = classify_tct_domain(head_on(), 3.0, {0.75, 2});
  REQUIRE(std::holds_alternative<SingleCollision>(single));
  CHECK(std::get<SingleCollision>(single).pair == PairIndex{0, 1});
  CHECK(std::get<SingleCollision>(single).t_c == doctest::Approx(2.0));
  CHECK(std::get<SingleCollision>(single).kind == CollisionKind::Elastic);  // |rel|^2 = 1 <= 3

  const auto inelastic = classify_tct_domain(head_on(), 3.0, {0.1875, 2});
  CHECK(std::get<SingleCollision>(inelastic).kind == CollisionKind::Inelastic);

  CHECK(std::holds_alternative<FreeFlight>(classify_tct_domain(head_on(), 1.0, {0.75, 2})));

  const auto grazing = excluded(classify_tct_domain(cfg({{0, 0}, {3, 1}}, {{1, 0}, {0, 0}}), 5.0, {0.75, 2}));
  CHECK(grazing.reason == ExclusionReason::Grazing);
  CHECK(grazing.time == doctest::Approx(3.0));
  // The tangency lies beyond the horizon: nothing happens on [0, 2].
  CHECK(std::holds_alternative<FreeFlight>(
      classify_tct_domain(cfg({{0, 0}, {3, 1}}, {{1, 0}, {0, 0}}), 2.0, {0.75, 2})));
}

TEST_CASE("exclusion reasons") {
  const ModelParams p{0.75, 2};
  CHECK(excluded(classify_tct_domain(cfg({{0, 0}, {1, 0}}, {{1, 0}, {0, 0}}), 1.0, p)).reason ==
        ExclusionReason::BoundaryStart);

  const auto twin = cfg({{0, 0}, {3, 0}, {0, 10}, {3, 10}}, {{1, 0}, {0, 0}, {1, 0}, {0, 0}});
  CHECK(excluded(classify_tct_domain(twin, 3.0, p)).reason == ExclusionReason::Simultaneous);

  // |rel|^2 = 1 = 4 eps0
  CHECK(excluded(classify_tct_domain(head_on(), 3.0, {0.25, 2})).reason == ExclusionReason::CriticalEnergy);

  const auto re = excluded(classify_tct_domain(recollision_chain(), 2.0, ModelParams::elastic_only(2)));
  CHECK(re.reason == ExclusionReason::Recollision);
  REQUIRE(re.pair);
  CHECK(*re.pair == PairIndex{1, 2});
  CHECK(std::holds_alternative<SingleCollision>(classify_tct_domain(recollision_chain(), 0.5, ModelParams::elastic_only(2))));

  CHECK_THROWS_AS(classify_tct_domain(head_on(), 0.0, p), Error);
  CHECK_THROWS_AS(classify_tct_domain(head_on(), 1.0, {0.75, 3}), Error);
}

TEST_CASE("flow examples") {
  auto r = tct_flow(head_on(), 3.0, {0.75, 2});
  REQUIRE(r.collision);
  CHECK(r.collision->outcome.kind == CollisionKind::Elastic);
  CHECK((r.collision->outcome.omega - vec({1, 0})).norm() < 1e-15);
  CHECK((r.final.velocity(0) - vec({0, 0})).norm() < 1e-15);
  CHECK((r.final.velocity(1) - vec({1, 0})).norm() < 1e-15);
  CHECK((r.final.position(0) - vec({2, 0})).norm() < 1e-12);
  CHECK((r.final.position(1) - vec({4, 0})).norm() < 1e-12);

  r = tct_flow(head_on(), 3.0, {0.1875, 2});
  CHECK(*r.collision->outcome.kappa == doctest::Approx(0.25));
  CHECK((*r.collision->outcome.sigma - vec({1, 0})).norm() < 1e-15);
  CHECK((r.final.velocity(0) - vec({0.25, 0})).norm() < 1e-15);
  CHECK((r.final.velocity(1) - vec({0.75, 0})).norm() < 1e-15);
  CHECK((r.final.position(0) - vec({2.25, 0})).norm() < 1e-12);
  CHECK((r.final.position(1) - vec({3.75, 0})).norm() < 1e-12);
  CHECK(kinetic_energy(head_on()) - kinetic_energy(r.final) == doctest::Approx(0.1875));

  r = tct_flow(head_on(), 1.0, {0.75, 2});
  CHECK_FALSE(r.collision);
  CHECK(r.final == free_transport(head_on(), 1.0));

  try {
    tct_flow(cfg({{0, 0}, {3, 1}}, {{1, 0}, {0, 0}}), 5.0, {0.75, 2});
    FAIL("expected ExcludedConfiguration");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ExcludedConfiguration);
  }
}

TEST_CASE("analytic determinant examples") {
  auto det = analytic_flow_jacobian_det(head_on(), 3.0, {0.75, 2});
  CHECK(det.prefactor == doctest::Approx(-1.0));
  CHECK(std::abs(det.det) == doctest::Approx(1.0));

  // |rel|^2 = 4, eps0 = 0.75
  const auto c = cfg({{0, 0}, {3, 0}}, {{2, 0}, {0, 0}});
  det = analytic_flow_jacobian_det(c, 3.0, {0.75, 2});
  CHECK(std::abs(det.det) == doctest::Approx(0.5));
  CHECK(det.prefactor == doctest::Approx(-0.5));
  CHECK(det.det_n == doctest::Approx(-1.0));

  // Small eps0 on the emission branch approaches the elastic value.
  det = analytic_flow_jacobian_det(c, 3.0, {1e-8, 2});
  CHECK(std::abs(det.det) == doctest::Approx(1.0).epsilon(1e-7));

  CHECK(analytic_flow_jacobian_det(head_on(), 1.0, {0.75, 2}).det == 1.0);

  const auto c3 = cfg({{0, 0, 0}, {3, 0, 0}}, {{2, 0, 0}, {0, 0, 0}});
  CHECK_THROWS_AS(analytic_flow_jacobian_det(c3, 3.0, {0.75, 3}), Error);
  CHECK(std::abs(analytic_flow_jacobian_det(c3, 3.0, {2.0, 3}).det) == doctest::Approx(1.0));
}

TEST_CASE("random single-collision flows: interiority, ledger, prefactors") {
  for (int d : {2, 3}) {
    const ModelParams p{0.75, d};
    for (std::uint64_t k = 0; k < 60; ++k) {
      CounterRng rng(31, k);
      TctSampleOptions opts;
      opts.n_particles = 2 + k % 3;
      const auto c = sample_tct_configuration(rng, 1.0, p, opts);
      const auto r = tct_flow(c, 1.0, p);
      REQUIRE(r.collision);
      CHECK(min_pair_distance(r.final) > 1.0 - 1e-9);
      const auto before = conserved_quantities(c);
      const auto after = conserved_quantities(r.final);
      CHECK((before.momentum - after.momentum).cwiseAbs().maxCoeff() <= 1e-12);
      const double loss = r.collision->outcome.kind == CollisionKind::Inelastic ? 0.75 : 0.0;
      CHECK(std::abs(before.kinetic_energy - after.kinetic_energy - loss) <= 1e-12);

      if (d == 2 || r.collision->outcome.kind == CollisionKind::Elastic) {
        const auto det = analytic_flow_jacobian_det(c, 1.0, p);
        if (r.collision->outcome.kind == CollisionKind::Elastic) {
          CHECK(std::abs(det.prefactor + 1.0) <= 1e-9);
        } else {
          const Vec rel = c.velocity(r.collision->pair.i) - c.velocity(r.collision->pair.j);
          CHECK(det.prefactor == doctest::Approx(-std::sqrt(1.0 - 3.0 / rel.squaredNorm())).epsilon(1e-9));
        }
      }
    }
  }
}

TEST_CASE("flow is deterministic and composes over sub-intervals") {
  const ModelParams p{0.1875, 2};
  CHECK(tct_flow(head_on(), 3.0, p).final == tct_flow(head_on(), 3.0, p).final);
  for (const auto& [a, b] : {std::pair{1.0, 2.0}, std::pair{2.5, 0.5}}) {
    const auto whole = tct_flow(head_on(), a + b, p).final;
    const auto split = tct_flow(tct_flow(head_on(), a, p).final, b, p).final;
    CHECK((whole.state_vector() - split.state_vector()).cwiseAbs().maxCoeff() <= 1e-10);
  }
}

TEST_CASE("elastic flow is time reversible") {
  const ModelParams p = ModelParams::elastic_only(2);
  for (std::uint64_t k = 0; k < 50; ++k) {
    CounterRng rng(32, k);
    TctSampleOptions opts;
    opts.n_particles = 3;
    const auto c = sample_tct_configuration(rng, 1.0, p, opts);
    const auto fwd = tct_flow(c, 1.0, p).final;
    const auto back = tct_flow(reversed(fwd), 1.0, p).final;
    CHECK((back.state_vector() - reversed(c).state_vector()).cwiseAbs().maxCoeff() <= 1e-9);
  }
}

TEST_CASE("same_branch compares variant, pair and kind") {
  CHECK(same_branch(FreeFlight{}, FreeFlight{}));
  CHECK_FALSE(same_branch(FreeFlight{}, SingleCollision{}));
  CHECK(same_branch(SingleCollision{{0, 1}, 1.0, CollisionKind::Elastic}, SingleCollision{{0, 1}, 1.1, CollisionKind::Elastic}));
  CHECK_FALSE(same_branch(SingleCollision{{0, 1}, 1.0, CollisionKind::Elastic}, SingleCollision{{0, 2}, 1.0, CollisionKind::Elastic}));
  CHECK_FALSE(same_branch(SingleCollision{{0, 1}, 1.0, CollisionKind::Elastic}, SingleCollision{{0, 1}, 1.0, CollisionKind::Inelastic}));
}
