#include "wnls/surface.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "wnls/errors.hpp"
#include "wnls/numerics.hpp"

namespace wnls {

void LevelSetSpec::validate(const MassSpec& ms) const {
  if (!(delta > 0.0)) throw ConfigError("level-set delta must be positive");
  if (bandwidth < 0.0) throw ConfigError("bandwidth must be nonnegative");
  if (!(r + ms.total_Z() > 0.0)) throw ConfigError("level r is infeasible: r + total Z must be positive");
}

ConditionResult condition_on_level(const Ensemble& e, const LevelSetSpec& spec, const MassSpec& ms) {
  spec.validate(ms);
  ConditionResult out;
  out.ensemble.provenance = Provenance::conditional;
  double nearest = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < e.size(); ++i) {
    const double E = renormalized_mass(e.members[i], ms);
    const double gap = std::abs(E - spec.r);
    nearest = std::min(nearest, gap);
    if (!(gap < spec.delta)) continue;
    out.ensemble.members.push_back(spec.project ? project_to_level_set(e.members[i], spec.r, ms) : e.members[i]);
    out.ensemble.log_weights.push_back(e.log_weights[i]);
    out.ensemble.seeds.push_back(e.seeds[i]);
    out.source_index.push_back(i);
  }
  if (out.ensemble.size() == 0) {
    throw InfeasibleLevelError("no ensemble member inside the level-set shell", std::isfinite(nearest) ? 2.0 * nearest : spec.delta);
  }
  out.acceptance_fraction = static_cast<double>(out.ensemble.size()) / static_cast<double>(e.size());
  return out;
}

double silverman_bandwidth(std::span<const double> values) {
  if (values.size() < 2) throw ConfigError("bandwidth selection needs at least two samples");
  MeanAccumulator acc;
  for (double v : values) acc.add(v);
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  auto quantile = [&](double q) {
    const double pos = q * (sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (pos - lo) * (sorted[hi] - sorted[lo]);
  };
  const double iqr = quantile(0.75) - quantile(0.25);
  double spread = std::sqrt(acc.variance());
  if (iqr > 0.0) spread = std::min(spread, iqr / 1.34);
  return 0.9 * spread * std::pow(static_cast<double>(values.size()), -0.2);
}

namespace {

double kernel(double u) { return std::exp(-0.5 * u * u) / std::sqrt(2.0 * std::numbers::pi); }

double weight_at(std::span<const double> w, std::size_t i) { return w.empty() ? 1.0 : w[i]; }

}  // namespace

double density_rho(std::span<const double> values, std::span<const double> weights, double r, double bandwidth) {
  if (!(bandwidth > 0.0)) throw ConfigError("bandwidth must be positive");
  if (!weights.empty() && weights.size() != values.size()) throw ConfigError("weights and values differ in length");
  CompensatedSum num, den;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double w = weight_at(weights, i);
    num += w * kernel((r - values[i]) / bandwidth);
    den += w;
  }
  if (!(den.value() > 0.0)) return 0.0;
  return std::max(0.0, num.value() / (den.value() * bandwidth));
}

double density_mode(std::span<const double> values, double bandwidth, int grid_points) {
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  double best = *lo, best_rho = -1.0;
  for (int i = 0; i < grid_points; ++i) {
    const double r = *lo + (*hi - *lo) * i / (grid_points - 1);
    const double rho = density_rho(values, {}, r, bandwidth);
    if (rho > best_rho) {
      best_rho = rho;
      best = r;
    }
  }
  return best;
}

bool SurfaceEstimate::agree(double z) const {
  return std::abs(ratio - conditional) <= z * std::hypot(ratio_se, conditional_se);
}

SurfaceEstimate surface_expectation(std::span<const double> g, std::span<const double> E,
                                    std::span<const double> weights, const LevelSetSpec& spec) {
  if (g.size() != E.size() || (!weights.empty() && weights.size() != E.size())) {
    throw ConfigError("observable, level and weight samples differ in length");
  }
  if (!(spec.delta > 0.0)) throw ConfigError("level-set delta must be positive");
  SurfaceEstimate s;
  s.bandwidth = spec.bandwidth > 0.0 ? spec.bandwidth : silverman_bandwidth(E);

  CompensatedSum kw, kwg;
  std::vector<double> k(E.size());
  for (std::size_t i = 0; i < E.size(); ++i) {
    k[i] = weight_at(weights, i) * kernel((spec.r - E[i]) / s.bandwidth);
    kw += k[i];
    kwg += k[i] * g[i];
  }
  if (!(kw.value() > 1e-300)) throw UndefinedSurfaceError("density at the level is numerically zero");
  s.ratio = kwg.value() / kw.value();
  CompensatedSum var;
  for (std::size_t i = 0; i < E.size(); ++i) {
    const double d = g[i] - s.ratio;
    var += k[i] * k[i] * d * d;
  }
  s.ratio_se = std::sqrt(var.value()) / kw.value();

  CompensatedSum w_sum, wg_sum;
  std::vector<std::size_t> shell;
  for (std::size_t i = 0; i < E.size(); ++i) {
    if (std::abs(E[i] - spec.r) < spec.delta) {
      shell.push_back(i);
      w_sum += weight_at(weights, i);
      wg_sum += weight_at(weights, i) * g[i];
    }
  }
  s.shell_count = shell.size();
  if (shell.empty() || !(w_sum.value() > 0.0)) throw UndefinedSurfaceError("no samples inside the level-set shell");
  s.conditional = wg_sum.value() / w_sum.value();
  CompensatedSum cvar;
  for (std::size_t i : shell) {
    const double w = weight_at(weights, i);
    const double d = g[i] - s.conditional;
    cvar += w * w * d * d;
  }
  s.conditional_se = std::sqrt(cvar.value()) / w_sum.value();
  return s;
}

}  // namespace wnls
