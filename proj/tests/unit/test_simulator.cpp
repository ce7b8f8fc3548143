#include "doctest.h"

#include <cmath>

#include "helpers.hpp"
#include "ihse/errors.hpp"
#include "ihse/simulator.hpp"

using namespace ihse;
using ihse::test::cfg;
using ihse::test::head_on;
using ihse::test::vec;

TEST_CASE("two-particle inelastic example") {
  const auto r = simulate(head_on(), 3.0, {0.1875, 2});
  REQUIRE(r.events.size() == 1);
  CHECK(r.events[0].time == doctest::Approx(2.0));
  CHECK(r.events[0].kind == CollisionKind::Inelastic);
  CHECK(r.events[0].ke_before - r.events[0].ke_after == doctest::Approx(0.1875));
  CHECK((r.final.velocity(0) - vec({0.25, 0})).norm() < 1e-15);
  CHECK((r.final.velocity(1) - vec({0.75, 0})).norm() < 1e-15);
  CHECK(r.n_inelastic == 1);
  CHECK(r.n_elastic == 0);
  CHECK_FALSE(r.halted);
  CHECK(r.final_time == 3.0);
  CHECK(r.min_separation == doctest::Approx(1.0));
}

TEST_CASE("receding pair flies freely") {
  const auto c = cfg({{0, 0}, {3, 0}}, {{-1, 0}, {1, 0}});
  const auto r = simulate(c, 10.0, {0.5, 2});
  CHECK(r.events.empty());
  CHECK(r.final == free_transport(c, 10.0));
}

TEST_CASE("input validation") {
  CHECK_THROWS_AS(simulate(head_on(), 0.0, {0.5, 2}), Error);
  CHECK_THROWS_AS(simulate(cfg({{0, 0}, {0.5, 0}}, {{0, 0}, {0, 0}}), 1.0, {0.5, 2}), Error);
  CHECK_THROWS_AS(simulate(head_on(), 1.0, {0.5, 3}), Error);
}

TEST_CASE("pathologies halt the run in-band") {
  const auto twin = cfg({{0, 0}, {3, 0}, {0, 10}, {3, 10}}, {{1, 0}, {0, 0}, {1, 0}, {0, 0}});
  auto r = simulate(twin, 5.0, {0.75, 2});
  REQUIRE(r.halted);
  CHECK(r.halted->reason == PathologyReason::Simultaneous);
  CHECK(r.halted->time == doctest::Approx(2.0));

  r = simulate(cfg({{0, 0}, {3, 1}}, {{1, 0}, {0, 0}}), 5.0, {0.75, 2});
  REQUIRE(r.halted);
  CHECK(r.halted->reason == PathologyReason::Grazing);

  r = simulate(head_on(), 5.0, {0.25, 2});
  REQUIRE(r.halted);
  CHECK(r.halted->reason == PathologyReason::CriticalEnergy);

  // Newton's cradle: 1 -> 2 -> 3, two events; cap at one.
  const auto cradle = cfg({{0, 0}, {2, 0}, {3.5, 0}}, {{1, 0}, {0, 0}, {0, 0}});
  SimOptions opts;
  opts.max_events = 1;
  r = simulate(cradle, 5.0, ModelParams::elastic_only(2), opts);
  REQUIRE(r.halted);
  CHECK(r.halted->reason == PathologyReason::EventOverflow);
  CHECK(r.events.size() == 1);
  CHECK_FALSE(check_collision_bounds(r, ModelParams::elastic_only(2), cradle, 1).finite_ok);

  r = simulate(cradle, 5.0, ModelParams::elastic_only(2));
  CHECK_FALSE(r.halted);
  CHECK(r.events.size() == 2);
}

TEST_CASE("collision bound examples") {
  const auto c = cfg({{0, 0}, {3, 0}}, {{std::sqrt(2.0), 0}, {0, 0}});
  const ModelParams p{0.1875, 2};
  const auto r = simulate(c, 5.0, p);
  CHECK(r.n_inelastic == 1);
  const auto b = check_collision_bounds(r, p, c);
  CHECK(b.initial_ke == doctest::Approx(1.0));
  CHECK(b.inelastic_bound == 5);
  CHECK(b.inelastic_margin == 4);
  CHECK(b.ok());

  const auto e = simulate(c, 5.0, ModelParams::elastic_only(2));
  CHECK(e.n_inelastic == 0);
  CHECK(check_collision_bounds(e, ModelParams::elastic_only(2), c).ok());
}

TEST_CASE("random ensembles keep the invariants") {
  const ModelParams p{0.2, 2};
  for (std::uint64_t k = 0; k < 100; ++k) {
    CounterRng rng(51, k);
    const auto c = sample_initial_configuration(rng, 2 + k % 4, 2, 4.0, 3.0);
    const auto r = simulate(c, 4.0, p);
    if (r.halted) continue;
    CHECK(r.min_separation >= 1.0 - 1e-9);
    double ke = kinetic_energy(c);
    double last = 0.0;
    for (const auto& e : r.events) {
      CHECK(e.time > last);
      last = e.time;
      CHECK(std::abs(e.ke_before - ke) <= 1e-9);
      const double drop = e.ke_before - e.ke_after;
      CHECK(std::abs(drop - (e.kind == CollisionKind::Inelastic ? 0.2 : 0.0)) <= 1e-10);
      ke = e.ke_after;
    }
    CHECK(std::abs(kinetic_energy(r.final) - (kinetic_energy(c) - r.n_inelastic * 0.2)) <= 1e-9);
    CHECK((conserved_quantities(r.final).momentum - conserved_quantities(c).momentum).cwiseAbs().maxCoeff() <= 1e-9);
    CHECK(check_collision_bounds(r, p, c).ok());
    CHECK(simulate(c, 4.0, p).final == r.final);
  }
}

TEST_CASE("elastic-only runs conserve energy") {
  const ModelParams p = ModelParams::elastic_only(3);
  for (std::uint64_t k = 0; k < 30; ++k) {
    CounterRng rng(52, k);
    const auto c = sample_initial_configuration(rng, 4, 3, 3.0, 3.0);
    const auto r = simulate(c, 3.0, p);
    CHECK(r.n_inelastic == 0);
    CHECK(std::abs(kinetic_energy(r.final) - kinetic_energy(c)) <= 1e-10);
  }
}

TEST_CASE("low-energy regime allows at most one emission") {
  const ModelParams p{0.5, 2};
  for (std::uint64_t k = 0; k < 200; ++k) {
    CounterRng rng(53, k);
    // |V|^2 / 2 < 2 eps0  <=>  |V| < 2 sqrt(eps0)
    const auto c = sample_initial_configuration(rng, 3, 2, 2.5, 2.0 * std::sqrt(0.5) * 0.999);
    REQUIRE(kinetic_energy(c) < 2 * p.epsilon0);
    CHECK(simulate(c, 5.0, p).n_inelastic <= 1);
  }
}

TEST_CASE("initial-condition sampler honours the stacked balls") {
  CounterRng rng(54, 0);
  const auto c = sample_initial_configuration(rng, 4, 2, 3.0, 1.5);
  CHECK(c.positions().norm() <= 3.0);
  CHECK(c.velocities().norm() <= 1.5);
  CHECK(validate_configuration(c).kind == DomainStatus::Kind::Interior);
  CHECK_THROWS_AS(sample_initial_configuration(rng, 0, 2, 1.0, 1.0), Error);
}
