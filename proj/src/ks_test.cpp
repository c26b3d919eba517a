#include "wnls/ks_test.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "wnls/errors.hpp"

namespace wnls {

double kolmogorov_q(double lambda) {
  if (lambda < 1e-3) return 1.0;
  double sum = 0.0;
  double sign = 1.0;
  for (int j = 1; j <= 200; ++j) {
    const double term = std::exp(-2.0 * j * j * lambda * lambda);
    sum += sign * term;
    if (term < 1e-18) break;
    sign = -sign;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

StatTestResult ks_two_sample(std::span<const double> xs, std::span<const double> ys, std::string label,
                             std::size_t min_size) {
  if (xs.size() < min_size || ys.size() < min_size) {
    throw StatTestError("two-sample KS test needs at least " + std::to_string(min_size) + " points per sample");
  }
  std::vector<double> a(xs.begin(), xs.end()), b(ys.begin(), ys.end());
  auto is_nan = [](double v) { return std::isnan(v); };
  if (std::any_of(a.begin(), a.end(), is_nan) || std::any_of(b.begin(), b.end(), is_nan)) {
    throw StatTestError("KS test sample contains NaN");
  }
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double n1 = static_cast<double>(a.size());
  const double n2 = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == x) ++i;
    while (j < b.size() && b[j] == x) ++j;
    d = std::max(d, std::abs(i / n1 - j / n2));
  }
  StatTestResult r;
  r.statistic = d;
  r.n1 = a.size();
  r.n2 = b.size();
  r.label = std::move(label);
  const double ne = std::sqrt(n1 * n2 / (n1 + n2));
  r.p_value = d == 0.0 ? 1.0 : kolmogorov_q((ne + 0.12 + 0.11 / ne) * d);
  return r;
}

}  // namespace wnls
