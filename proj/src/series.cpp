#include "wnls/series.hpp"

#include <cmath>
#include <vector>

#include "wnls/errors.hpp"
#include "wnls/numerics.hpp"

namespace wnls {

namespace {

struct Point {
  int x, y;
  int r2() const { return x * x + y * y; }
};

std::vector<Point> ball(int K, bool with_origin) {
  std::vector<Point> pts;
  for (int x = -K; x <= K; ++x) {
    for (int y = -K; y <= K; ++y) {
      const int r2 = x * x + y * y;
      if (r2 <= K * K && (with_origin || r2 > 0)) pts.push_back({x, y});
    }
  }
  return pts;
}

// Dense table over [-R, R]^2.
class Table {
 public:
  explicit Table(int R) : R_(R), w_(2 * R + 1), data_(static_cast<std::size_t>(w_) * w_, 0.0) {}
  double& at(int x, int y) { return data_[static_cast<std::size_t>(x + R_) * w_ + (y + R_)]; }
  double at(int x, int y) const { return data_[static_cast<std::size_t>(x + R_) * w_ + (y + R_)]; }
  int R() const { return R_; }

 private:
  int R_, w_;
  std::vector<double> data_;
};

double s1(int K, double beta) {
  const auto nonzero = ball(K, false);
  // W(p) = sum_{l+m=p} |l|^-2 |m|^-2
  Table W(2 * K);
  for (const auto& l : nonzero) {
    const double wl = 1.0 / l.r2();
    for (const auto& m : nonzero) W.at(l.x + m.x, l.y + m.y) += wl / m.r2();
  }
  Table inv(3 * K);
  for (int x = -3 * K; x <= 3 * K; ++x) {
    for (int y = -3 * K; y <= 3 * K; ++y) {
      if (x != 0 || y != 0) inv.at(x, y) = 1.0 / (x * x + y * y);
    }
  }
  std::vector<double> kw(nonzero.size());
  for (std::size_t i = 0; i < nonzero.size(); ++i) kw[i] = std::pow(static_cast<double>(nonzero[i].r2()), 0.5 * beta);

  CompensatedSum total;
  for (int px = -2 * K; px <= 2 * K; ++px) {
    for (int py = -2 * K; py <= 2 * K; ++py) {
      const double wp = W.at(px, py);
      if (wp == 0.0) continue;
      double inner = 0.0;
      for (std::size_t i = 0; i < nonzero.size(); ++i) {
        inner += kw[i] * inv.at(px - nonzero[i].x, py - nonzero[i].y);
      }
      total += wp * inner;
    }
  }
  return total.value();
}

double s2(int K, double beta) {
  const auto ks = ball(K, false);
  const auto ms = ball(K, true);
  CompensatedSum total;
  for (const auto& k : ks) {
    const double kb = std::pow(static_cast<double>(k.r2()), 0.5 * beta);
    double inner = 0.0;
    for (const auto& m : ms) {
      const int dx = k.x - m.x, dy = k.y - m.y;
      const int ex = k.x - 2 * m.x, ey = k.y - 2 * m.y;
      const int d1 = dx * dx + dy * dy;
      const int d2 = ex * ex + ey * ey;
      if (d1 == 0 || d2 == 0) continue;
      inner += 1.0 / (static_cast<double>(d1) * d1 * d2);
    }
    total += kb * inner;
  }
  return total.value();
}

}  // namespace

SeriesId series_from_string(const std::string& s) {
  if (s == "S1") return SeriesId::S1;
  if (s == "S2") return SeriesId::S2;
  throw ConfigError("unknown series id: " + s);
}

std::string to_string(SeriesId id) { return id == SeriesId::S1 ? "S1" : "S2"; }

double lattice_series_partial_sum(SeriesId id, int K, double beta) {
  if (!(beta < 0.0)) throw ConfigError("series exponent beta must be negative");
  if (K < 2) throw ConfigError("series radius K must be >= 2");
  return id == SeriesId::S1 ? s1(K, beta) : s2(K, beta);
}

}  // namespace wnls
