#include "wnls/gibbs_sampler.hpp"

#include <cmath>
#include <random>

#include "wnls/errors.hpp"
#include "wnls/parallel.hpp"
#include "wnls/rng.hpp"

namespace wnls {

GibbsSampler::GibbsSampler(GaussianSpec reference, double aN, HmcOptions options)
    : reference_(std::move(reference)), aN_(aN), options_(options) {
  if (options_.leapfrog_steps < 1 || options_.burn_in < 0 || options_.sampling_iterations < 1 ||
      !(options_.initial_step > 0.0)) {
    throw ConfigError("invalid HMC options");
  }
  const auto& lat = *reference_.lattice();
  for (std::size_t i = 0; i < lat.size(); ++i) {
    stiffness_.push_back(std::pow(static_cast<double>(lat.norm_sq(i)), 0.5 * reference_.a()));
  }
}

double GibbsSampler::potential(const SpectralField& f, GridTransform& grid) const {
  double gauss = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) gauss += stiffness_[i] * std::norm(f[i]);
  return 0.5 * gauss - gibbs_log_weight(f, aN_, grid);
}

void GibbsSampler::gradient(const SpectralField& f, GridTransform& grid, std::span<cplx> out) const {
  grid.cubic(f.coeffs(), out);
  for (std::size_t i = 0; i < f.size(); ++i) {
    out[i] = stiffness_[i] * f[i] + 2.0 * out[i] - 4.0 * aN_ * f[i];
  }
}

SpectralField GibbsSampler::sample(std::uint64_t seed, HmcDiagnostics* diagnostics) const {
  GridTransform grid(reference_.lattice());
  auto rng = make_engine(seed, Stream::hmc);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);

  SpectralField x = sample_mu_a(reference_, seed);
  const std::size_t n = x.size();
  std::vector<cplx> p(n), g(n);
  gradient(x, grid, g);
  double u = potential(x, grid);

  double log_step = std::log(options_.initial_step);
  int accepted = 0;
  const int total = options_.burn_in + options_.sampling_iterations;
  for (int it = 0; it < total; ++it) {
    const bool adapting = it < options_.burn_in;
    const double step = std::exp(log_step) * (0.9 + 0.2 * uniform(rng));
    for (auto& pi : p) {
      const double re = normal(rng);
      const double im = normal(rng);
      pi = {re, im};
    }
    double kinetic0 = 0.0;
    for (const auto& pi : p) kinetic0 += 0.5 * std::norm(pi);

    SpectralField y = x;
    std::vector<cplx> gy = g;
    for (int s = 0; s < options_.leapfrog_steps; ++s) {
      for (std::size_t i = 0; i < n; ++i) p[i] -= 0.5 * step * gy[i];
      for (std::size_t i = 0; i < n; ++i) y[i] += step * p[i];
      gradient(y, grid, gy);
      for (std::size_t i = 0; i < n; ++i) p[i] -= 0.5 * step * gy[i];
    }
    double kinetic1 = 0.0;
    for (const auto& pi : p) kinetic1 += 0.5 * std::norm(pi);
    const double uy = y.all_finite() ? potential(y, grid) : std::numeric_limits<double>::infinity();
    const double log_ratio = (u + kinetic0) - (uy + kinetic1);
    const double accept_prob = std::isfinite(log_ratio) ? std::min(1.0, std::exp(log_ratio)) : 0.0;
    if (uniform(rng) < accept_prob) {
      x = std::move(y);
      g = std::move(gy);
      u = uy;
      if (!adapting) ++accepted;
    }
    if (adapting) {
      const double rate = 1.0 / std::pow(1.0 + it, 0.6);
      log_step += rate * (accept_prob - options_.target_acceptance);
    }
  }
  if (diagnostics) {
    diagnostics->acceptance_rate = static_cast<double>(accepted) / options_.sampling_iterations;
    diagnostics->step_size = std::exp(log_step);
  }
  return x;
}

Ensemble sample_gibbs_ensemble(const GibbsSampler& sampler, std::size_t count, std::uint64_t master_seed,
                               unsigned threads, double* mean_acceptance) {
  Ensemble e;
  e.provenance = Provenance::gibbs;
  e.members.assign(count, SpectralField(sampler.reference().lattice()));
  e.log_weights.assign(count, 0.0);
  e.seeds.resize(count);
  std::vector<double> acceptance(count, 0.0);
  parallel_for(count, threads, [&](std::size_t i) {
    e.seeds[i] = member_seed(master_seed, i);
    HmcDiagnostics diag;
    e.members[i] = sampler.sample(e.seeds[i], &diag);
    acceptance[i] = diag.acceptance_rate;
  });
  if (mean_acceptance) {
    double s = 0.0;
    for (double a : acceptance) s += a;
    *mean_acceptance = count ? s / static_cast<double>(count) : 0.0;
  }
  return e;
}

}  // namespace wnls
