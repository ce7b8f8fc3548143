#include "doctest.h"

#include <cmath>

#include "helpers.hpp"
#include "ihse/core.hpp"
#include "ihse/errors.hpp"
#include "ihse/rng.hpp"

using namespace ihse;
using ihse::test::cfg;
using ihse::test::vec;

TEST_CASE("validate_configuration classifies interior, contact and overlap") {
  CHECK(validate_configuration(cfg({{0, 0}, {3, 0}}, {{0, 0}, {0, 0}}), 1e-9).kind == DomainStatus::Kind::Interior);

  const auto contact = validate_configuration(cfg({{0, 0}, {1, 0}}, {{0, 0}, {0, 0}}), 1e-9);
  CHECK(contact.kind == DomainStatus::Kind::Boundary);
  REQUIRE(contact.pairs.size() == 1);
  CHECK(contact.pairs[0] == PairIndex{0, 1});

  const auto overlap = validate_configuration(cfg({{0, 0}, {0.5, 0}}, {{0, 0}, {0, 0}}), 1e-9);
  CHECK(overlap.kind == DomainStatus::Kind::Invalid);
  REQUIRE(overlap.pairs.size() == 1);
  CHECK(overlap.min_distance == doctest::Approx(0.5));
}

TEST_CASE("overlap takes precedence over contact and every contact pair is listed") {
  const auto c = cfg({{0, 0}, {1, 0}, {0, 1}, {5, 5}, {5.5, 5}}, {{0, 0}, {0, 0}, {0, 0}, {0, 0}, {0, 0}});
  const auto s = validate_configuration(c);
  CHECK(s.kind == DomainStatus::Kind::Invalid);
  CHECK(s.pairs == std::vector<PairIndex>{{3, 4}});

  const auto b = validate_configuration(cfg({{0, 0}, {1, 0}, {0, 1}}, {{0, 0}, {0, 0}, {0, 0}}));
  CHECK(b.kind == DomainStatus::Kind::Boundary);
  CHECK(b.pairs == std::vector<PairIndex>{{0, 1}, {0, 2}});
}

TEST_CASE("validate_configuration is monotone in tol") {
  const auto c = cfg({{0, 0}, {1.0 + 1e-6, 0}}, {{0, 0}, {0, 0}});
  CHECK(validate_configuration(c, 1e-9).kind == DomainStatus::Kind::Interior);
  CHECK(validate_configuration(c, 1e-5).kind == DomainStatus::Kind::Boundary);
}

TEST_CASE("configuration construction rejects bad input") {
  CHECK_THROWS_AS(Configuration(Mat(0, 2), Mat(0, 2)), Error);
  CHECK_THROWS_AS(Configuration(Mat::Zero(2, 2), Mat::Zero(2, 3)), Error);
  CHECK_THROWS_AS(Configuration(Mat::Zero(2, 1), Mat::Zero(2, 1)), Error);
  Mat bad = Mat::Zero(2, 2);
  bad(1, 1) = std::nan("");
  try {
    Configuration c(bad, Mat::Zero(2, 2));
    FAIL("expected NonFinite");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NonFinite);
  }
}

TEST_CASE("model parameters are validated") {
  CHECK_NOTHROW(ModelParams{0.75, 2}.validate());
  CHECK_THROWS_AS(ModelParams({0.0, 2}).validate(), Error);
  CHECK_THROWS_AS(ModelParams({-1.0, 2}).validate(), Error);
  CHECK_THROWS_AS(ModelParams({1.0, 1}).validate(), Error);
  CHECK(std::isinf(ModelParams::elastic_only(3).epsilon0));
}

TEST_CASE("free_transport moves in straight lines and inverts exactly") {
  const auto c = cfg({{0, 0}}, {{1, 0}});
  CHECK(free_transport(c, 2.0).position(0) == vec({2, 0}));
  CHECK(free_transport(c, 0.0) == c);

  CounterRng rng(5, 0);
  for (int k = 0; k < 100; ++k) {
    Mat x = Mat::Random(4, 3);
    Mat v = Mat::Random(4, 3);
    const Configuration z(x, v);
    const double t = rng.uniform(-3, 3);
    const Configuration back = free_transport(free_transport(z, t), -t);
    CHECK((back.positions() - z.positions()).cwiseAbs().maxCoeff() <= 1e-12 * (1 + std::abs(t)));
    CHECK(back.velocities() == z.velocities());
  }
  CHECK_THROWS_AS(free_transport(c, std::numeric_limits<double>::infinity()), Error);
}

TEST_CASE("conserved quantities") {
  auto q = conserved_quantities(cfg({{0, 0}, {3, 0}}, {{1, 0}, {-1, 0}}));
  CHECK(q.momentum == vec({0, 0}));
  CHECK(q.kinetic_energy == 1.0);

  q = conserved_quantities(cfg({{0, 0}}, {{3, 4}}));
  CHECK(q.momentum == vec({3, 4}));
  CHECK(q.kinetic_energy == 12.5);

  q = conserved_quantities(cfg({{0, 0}, {2, 0}}, {{0, 0}, {0, 0}}));
  CHECK(q.kinetic_energy == 0.0);

  const auto c = cfg({{0, 0}, {3, 1}}, {{0.3, -2}, {1.5, 0.25}});
  const auto moved = conserved_quantities(free_transport(c, 1.7));
  CHECK(moved.momentum == conserved_quantities(c).momentum);
  CHECK(moved.kinetic_energy == conserved_quantities(c).kinetic_energy);
}

TEST_CASE("state vector layout round-trips") {
  const auto c = cfg({{0, 1}, {3, 4}}, {{5, 6}, {7, 8}});
  const Vec z = c.state_vector();
  CHECK(z == vec({0, 1, 3, 4, 5, 6, 7, 8}));
  CHECK(Configuration::from_state_vector(2, z) == c);
  CHECK_THROWS_AS(Configuration::from_state_vector(2, vec({1, 2, 3})), Error);
}

TEST_CASE("all_pairs enumerates i < j lexicographically") {
  const auto p = all_pairs(4);
  REQUIRE(p.size() == 6);
  CHECK(p.front() == PairIndex{0, 1});
  CHECK(p.back() == PairIndex{2, 3});
}

TEST_CASE("counter rng is a pure function of its key") {
  CounterRng a(42, 7);
  CounterRng b(42, 7);
  CounterRng c(42, 8);
  const auto x = a();
  CHECK(x == b());
  CHECK(x != c());
  for (int k = 0; k < 1000; ++k) {
    const double u = a.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
  const Vec w = random_unit_vector(a, 5);
  CHECK(w.norm() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(random_in_ball(a, 6, 2.0).norm() <= 2.0);
  CHECK(ball_volume(2, 1.0) == doctest::Approx(M_PI));
  CHECK(ball_volume(3, 2.0) == doctest::Approx(4.0 / 3.0 * M_PI * 8.0));
}
