#include <cmath>
#include <numbers>

#include "doctest.h"
#include "test_util.hpp"
#include "wnls/errors.hpp"
#include "wnls/grid_transform.hpp"
#include "wnls/spectral.hpp"

using namespace wnls;

TEST_CASE("lattice enumeration") {
  auto l1 = build_lattice(1, 4);
  REQUIRE(l1->size() == 4);
  CHECK(l1->mode(0) == Mode{-2, 0});
  CHECK(l1->mode(1) == Mode{-1, 0});
  CHECK(l1->mode(2) == Mode{1, 0});
  CHECK(l1->mode(3) == Mode{2, 0});

  auto l2 = build_lattice(2, 1);
  CHECK(l2->size() == 4);
  for (const Mode& k : {Mode{1, 0}, Mode{-1, 0}, Mode{0, 1}, Mode{0, -1}}) CHECK(l2->index_of(k).has_value());

  CHECK(build_lattice(2, 4)->size() == 12);
}

TEST_CASE("lattice matches brute-force enumeration and is closed under negation") {
  for (int d : {1, 2}) {
    for (int n : {1, 2, 5, 8, 13, 32}) {
      auto lat = build_lattice(d, n);
      std::size_t count = 0;
      for (int x = -10; x <= 10; ++x) {
        for (int y = (d == 2 ? -10 : 0); y <= (d == 2 ? 10 : 0); ++y) {
          const int r2 = x * x + y * y;
          if (r2 >= 1 && r2 <= n) {
            ++count;
            CHECK(lat->index_of({x, y}).has_value());
          }
        }
      }
      CHECK(lat->size() == count);
      CHECK(!lat->index_of({0, 0}).has_value());
      for (std::size_t i = 0; i < lat->size(); ++i) {
        const auto j = lat->negation(i);
        CHECK(lat->mode(j) == Mode{-lat->mode(i)[0], -lat->mode(i)[1]});
        CHECK(lat->negation(j) == i);
        if (i > 0) CHECK(lat->mode(i - 1) < lat->mode(i));
      }
    }
  }
}

TEST_CASE("invalid lattice parameters") {
  CHECK_THROWS_AS(build_lattice(3, 4), ConfigError);
  CHECK_THROWS_AS(build_lattice(1, 0), ConfigError);
}

TEST_CASE("H^beta norm") {
  auto lat = build_lattice(2, 8);
  CHECK(h_beta_norm_sq(SpectralField(lat), NormSpec(-0.5)) == 0.0);

  SpectralField one(lat);
  one[*lat->index_of({1, 0})] = 3.0;
  CHECK(h_beta_norm_sq(one, NormSpec(-0.5)) == doctest::Approx(9.0).epsilon(1e-15));

  const auto f = random_field(lat, 3);
  long double ref = 0.0L;
  for (std::size_t i = 0; i < f.size(); ++i) {
    ref += std::pow(static_cast<long double>(lat->norm_sq(i)), -0.7L) * std::norm(std::complex<long double>(f[i]));
  }
  CHECK(std::abs(h_beta_norm_sq(f, NormSpec(-0.7)) - static_cast<double>(ref)) <= 1e-12 * static_cast<double>(ref));

  CHECK_THROWS_AS(NormSpec(0.0), ConfigError);
  CHECK_THROWS_AS(NormSpec(0.1), ConfigError);
}

TEST_CASE("grid round trip and Parseval") {
  for (int d : {1, 2}) {
    auto lat = build_lattice(d, d == 1 ? 16 : 8);
    const int G = min_roundtrip_grid(*lat);

    const auto zero = to_grid(SpectralField(lat), G);
    for (const auto& v : zero.values) CHECK(v == cplx(0.0));

    SpectralField single(lat);
    single[lat->size() - 1] = 1.0;
    for (const auto& v : to_grid(single, G).values) CHECK(std::abs(v) == doctest::Approx(1.0).epsilon(1e-13));

    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      const auto f = random_field(lat, seed);
      for (int g : {G, G + 3, default_product_grid(*lat)}) {
        const auto grid = to_grid(f, g);
        double mean_sq = 0.0;
        for (const auto& v : grid.values) mean_sq += std::norm(v);
        mean_sq /= static_cast<double>(grid.values.size());
        CHECK(std::abs(mean_sq - f.mass()) <= 1e-10 * (1.0 + f.mass()));
        const auto back = from_grid(grid, lat);
        CHECK(max_abs_diff(back, f) <= 1e-10 * std::sqrt(f.mass()));
      }
    }
    CHECK_THROWS_AS(to_grid(SpectralField(lat), G - 1), AliasingError);
  }
}

TEST_CASE("grid synthesis uses exp(2 pi i k.x)") {
  auto lat = build_lattice(1, 4);
  SpectralField f(lat);
  f[*lat->index_of({2, 0})] = 1.0;
  const auto g = to_grid(f, 9);
  for (int j = 0; j < 9; ++j) {
    const cplx expect = std::polar(1.0, 2.0 * std::numbers::pi * 2.0 * j / 9.0);
    CHECK(std::abs(g.values[j] - expect) < 1e-14);
  }
}

TEST_CASE("linear propagator") {
  auto lat = build_lattice(2, 8);
  const auto f = random_field(lat, 5);
  CHECK(max_abs_diff(linear_phase(f, 0.0), f) == 0.0);

  SpectralField unit(lat);
  const auto i1 = *lat->index_of({1, 0});
  unit[i1] = cplx(0.3, -1.2);
  CHECK(std::abs(linear_phase(unit, std::numbers::pi)[i1] + unit[i1]) < 1e-15);

  for (double t : {0.1, 1.7, -3.3, 250.0}) {
    const auto g = linear_phase(f, t);
    CHECK(g.mass() == doctest::Approx(f.mass()).epsilon(1e-15));
    for (std::size_t i = 0; i < f.size(); ++i) CHECK(std::abs(g[i]) == doctest::Approx(std::abs(f[i])).epsilon(1e-15));
  }
  CHECK(max_abs_diff(linear_phase(linear_phase(f, 0.4), 1.3), linear_phase(f, 1.7)) < 1e-12);
}

TEST_CASE("field JSON record round trip") {
  auto lat = build_lattice(2, 5);
  const auto f = random_field(lat, 11);
  const auto j = field_to_json(f);
  CHECK(j["dim"] == 2);
  CHECK(j["n_cut"] == 5);
  CHECK(j["coeffs"].size() == lat->size());
  CHECK(j["coeffs"][0].size() == 4);
  const auto g = field_from_json(nlohmann::json::parse(j.dump()));
  CHECK(max_abs_diff(f, g) == 0.0);
}
