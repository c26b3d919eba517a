#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "wnls/grid_transform.hpp"
#include "wnls/spectral.hpp"

namespace wnls {

/// Product Gaussian measure mu_a: Re phi_k, Im phi_k i.i.d. N(0, |k|^{-a}), so E|phi_k|^2 = 2/|k|^a.
class GaussianSpec {
 public:
  GaussianSpec(LatticePtr lattice, double a = 2.0);
  const LatticePtr& lattice() const { return lattice_; }
  double a() const { return a_; }
  /// E|phi_k|^2 for lattice mode i.
  double variance(std::size_t i) const { return variances_[i]; }
  std::span<const double> variances() const { return variances_; }

 private:
  LatticePtr lattice_;
  double a_;
  std::vector<double> variances_;
};

SpectralField sample_mu_a(const GaussianSpec& spec, std::uint64_t seed);

/// E_{mu_a}|phi_k|^{2p} = 2^p p! |k|^{-a p}.
double moment_oracle(const Mode& k, int p, double a);

/// 2 sum over the lattice modes admitted by `pred` of |k|^{-2}.
double a_N_constant(const FreqLattice& lattice, const CutoffPredicate& pred);

struct QuarticIntegral {
  double value = 0.0;
  bool exact = true;  // false when the grid is below 4 k_max + 1
};

/// Grid mean of |u|^4. Throws AliasingError below 2 k_max + 1.
QuarticIntegral quartic_integral(const SpectralField& f, int grid_size);

/// -1/2 int|u|^4 + 2 aN sum|phi_k|^2 - aN^2, quartic evaluated on an exact grid.
double gibbs_log_weight(const SpectralField& f, double aN);
double gibbs_log_weight(const SpectralField& f, double aN, GridTransform& grid);

enum class Provenance { mu_a, gibbs, conditional };
std::string to_string(Provenance p);
Provenance provenance_from_string(const std::string& s);

/// Weighted, seeded collection of fields sharing one lattice.
struct Ensemble {
  std::vector<SpectralField> members;
  std::vector<double> log_weights;
  std::vector<std::uint64_t> seeds;
  Provenance provenance = Provenance::mu_a;

  std::size_t size() const { return members.size(); }
  /// Throws ConfigError on mismatched lengths, mixed lattices or non-finite weights.
  void validate() const;
};

/// members[i] = sample_mu_a(spec, member_seed(master, i)), zero log-weights.
Ensemble sample_ensemble(const GaussianSpec& spec, std::size_t count, std::uint64_t master_seed,
                         unsigned threads = 1);

/// (sum w)^2 / sum w^2 for w = exp(log_weights); infinite log-weights count as zero weight.
double effective_sample_size(std::span<const double> log_weights);

struct ResampleResult {
  Ensemble ensemble;
  double ess = 0.0;
  bool ess_warning = false;  // ess < 0.1 * input size
};

/// Multinomial resampling proportional to exp(log_weights). Output weights are uniform.
/// Throws DegenerateEnsembleError if no weight is finite.
ResampleResult importance_resample(const Ensemble& e, std::size_t m, std::uint64_t seed);

/// One JSONL line per member: {"index", "seed", "log_weight", "provenance", "field"}.
void write_ensemble_jsonl(std::ostream& os, const Ensemble& e);
Ensemble read_ensemble_jsonl(std::istream& is);

}  // namespace wnls
