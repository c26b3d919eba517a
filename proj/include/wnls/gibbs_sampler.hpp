#pragma once

#include <cstdint>

#include "wnls/measures.hpp"

namespace wnls {

struct HmcOptions {
  int burn_in = 200;               // iterations with step-size adaptation
  int sampling_iterations = 20;    // fixed-step iterations before the state is returned
  int leapfrog_steps = 10;
  double initial_step = 0.05;
  double target_acceptance = 0.75;
};

struct HmcDiagnostics {
  double acceptance_rate = 0.0;  // over the fixed-step iterations
  double step_size = 0.0;
};

/// Independent-chain Hamiltonian Monte Carlo for the truncated Gibbs measure
///
///   dmu(phi) ∝ exp(-1/2 int|u|^4 + 2 aN sum|phi_k|^2 - aN^2) dmu_a(phi),
///
/// i.e. the density exp(-U) with U = 1/2 sum |k|^a |phi_k|^2 - gibbs_log_weight(phi).
/// Every call to `sample` runs a fresh chain from a mu_a draw, so ensemble members
/// are independent and each is a pure function of its seed.
class GibbsSampler {
 public:
  GibbsSampler(GaussianSpec reference, double aN, HmcOptions options = {});

  const GaussianSpec& reference() const { return reference_; }
  double aN() const { return aN_; }
  const HmcOptions& options() const { return options_; }

  SpectralField sample(std::uint64_t seed, HmcDiagnostics* diagnostics = nullptr) const;

  /// U(phi), the negative log-density up to a constant.
  double potential(const SpectralField& f, GridTransform& grid) const;
  /// Packed gradient dU/dRe + i dU/dIm = |k|^a phi_k + 2 (B_k - 2 aN phi_k).
  void gradient(const SpectralField& f, GridTransform& grid, std::span<cplx> out) const;

 private:
  GaussianSpec reference_;
  double aN_;
  HmcOptions options_;
  std::vector<double> stiffness_;  // |k|^a
};

/// members[i] = sampler.sample(member_seed(master, i)); provenance gibbs, uniform weights.
Ensemble sample_gibbs_ensemble(const GibbsSampler& sampler, std::size_t count, std::uint64_t master_seed,
                               unsigned threads = 1, double* mean_acceptance = nullptr);

}  // namespace wnls
