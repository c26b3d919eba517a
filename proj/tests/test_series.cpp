#include <cmath>
#include <vector>

#include "doctest.h"
#include "wnls/errors.hpp"
#include "wnls/series.hpp"

using namespace wnls;

namespace {

// Straight quadruple loop, used only for small radii.
double s1_naive(int K, double beta) {
  long double total = 0.0L;
  auto in = [K](int x, int y) { return x * x + y * y <= K * K; };
  for (int lx = -K; lx <= K; ++lx)
    for (int ly = -K; ly <= K; ++ly) {
      if (!in(lx, ly) || (lx == 0 && ly == 0)) continue;
      for (int mx = -K; mx <= K; ++mx)
        for (int my = -K; my <= K; ++my) {
          if (!in(mx, my) || (mx == 0 && my == 0)) continue;
          for (int kx = -K; kx <= K; ++kx)
            for (int ky = -K; ky <= K; ++ky) {
              if (!in(kx, ky) || (kx == 0 && ky == 0)) continue;
              const int qx = lx + mx - kx, qy = ly + my - ky;
              if (qx == 0 && qy == 0) continue;
              total += std::pow(static_cast<long double>(kx * kx + ky * ky), beta / 2) /
                       (static_cast<long double>(lx * lx + ly * ly) * (mx * mx + my * my) * (qx * qx + qy * qy));
            }
        }
    }
  return static_cast<double>(total);
}

}  // namespace

TEST_CASE("S1 agrees with the naive sum") {
  for (int K : {2, 3, 4}) CHECK(lattice_series_partial_sum(SeriesId::S1, K, -0.5) == doctest::Approx(s1_naive(K, -0.5)).epsilon(1e-12));
}

TEST_CASE("partial sums at beta = -1/2") {
  const std::vector<int> Ks{8, 16, 32, 64};
  std::vector<double> s2;
  for (int K : Ks) s2.push_back(lattice_series_partial_sum(SeriesId::S2, K, -0.5));
  for (std::size_t i = 1; i < s2.size(); ++i) CHECK(s2[i] > s2[i - 1]);
  for (std::size_t i = 2; i < s2.size(); ++i) CHECK(s2[i] - s2[i - 1] < s2[i - 1] - s2[i - 2]);
  CHECK(s2.front() == doctest::Approx(49.99104152666686).epsilon(1e-12));
  CHECK(lattice_series_partial_sum(SeriesId::S1, 8, -0.5) == doctest::Approx(1686.5685001331299).epsilon(1e-12));
}

TEST_CASE("smaller beta gives smaller sums") {
  for (SeriesId id : {SeriesId::S1, SeriesId::S2}) {
    CHECK(lattice_series_partial_sum(id, 8, -1.0) < lattice_series_partial_sum(id, 8, -0.1));
  }
}

TEST_CASE("series argument checks") {
  CHECK_THROWS_AS(lattice_series_partial_sum(SeriesId::S1, 8, 0.0), ConfigError);
  CHECK_THROWS_AS(lattice_series_partial_sum(SeriesId::S2, 1, -0.5), ConfigError);
  CHECK(series_from_string("S2") == SeriesId::S2);
  CHECK_THROWS_AS(series_from_string("S3"), ConfigError);
}
