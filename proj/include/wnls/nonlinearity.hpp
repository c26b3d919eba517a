#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "wnls/measures.hpp"
#include "wnls/spectral.hpp"

namespace wnls {

/// Counterterm data for :B: = B - C phi.
///
/// D = sum over the modes admitted by `pred` of 2/|l|^a (= E|phi|^2 summed over those modes)
/// and C = 2 D. `plain()` gives C = D = 0.
class WickSpec {
 public:
  WickSpec(const FreqLattice& lattice, CutoffPredicate pred, double a = 2.0);
  static WickSpec lattice_default(const FreqLattice& lattice) {
    return WickSpec(lattice, CutoffPredicate::lattice(lattice));
  }
  static WickSpec plain();

  const CutoffPredicate& predicate() const { return pred_; }
  double a() const { return a_; }
  double C() const { return C_; }
  double D() const { return D_; }
  bool is_plain() const { return C_ == 0.0; }

 private:
  WickSpec() = default;
  CutoffPredicate pred_{};
  double a_ = 2.0;
  double C_ = 0.0;
  double D_ = 0.0;
};

/// Truncated cubic convolution B_k = sum_{a+b-c=k} phi_a phi_b conj(phi_c) by direct triple sum.
SpectralField B_direct(const SpectralField& f);
/// Same quantity via |u|^2 u on a grid; throws AliasingError if G < 4 k_max + 1.
SpectralField B_fft(const SpectralField& f, int grid_size);
SpectralField B_fft(const SpectralField& f);

SpectralField wick_B(const SpectralField& f, const WickSpec& w);
SpectralField wick_B(const SpectralField& f, const WickSpec& w, GridTransform& grid);

/// Pieces of E_{mu_a}|B_k - C phi_k|^2 under mu_a on the field's lattice.
///
/// `degenerate` collects the index triples (a, b, c), a+b-c=k, with a=k, b=k or a=b:
///   1/3 E|phi_k|^6 + 2 E|phi_k|^2 sum_{l!=k} E|phi_l|^4 + sum_{m!=0} E|phi_{k-m}|^4 E|phi_{k-2m}|^2.
/// `generic` is twice the sum over the remaining triples of s_a s_b s_c with s = E|phi|^2.
/// `mismatch` is s_k (2 D_lattice - C)^2 and vanishes when C is the lattice counterterm.
struct SecondMoment {
  double degenerate = 0.0;
  double generic = 0.0;
  double mismatch = 0.0;
  double total() const { return degenerate + generic + mismatch; }
};

SecondMoment second_moment_oracle(const FreqLattice& lattice, const Mode& k, const WickSpec& w);

/// E_{mu_a}|D_{e_j} :B:_k|^2 for the real direction e_j:
///   4 sum_{c, c+k-j} s_c s_{c+k-j} + 2 sum_{a+b=j+k} s_a s_b + [j=k] (2 D_lattice - C)^2.
double grad_moment_oracle(const FreqLattice& lattice, const Mode& j, const Mode& k, const WickSpec& w);

/// Exact E||B - C phi||^2_{H^beta} = sum_k |k|^{2 beta} (s_k (2 D_lattice - C)^2 + 2 S3(k)),
/// S3(k) = sum_{a+b-c=k} s_a s_b s_c evaluated by FFT.
double wick_norm_oracle(const FreqLattice& lattice, const NormSpec& ns, const WickSpec& w);

struct BoundRow {
  int N = 0;
  std::string estimator;  // wick_mc, plain_mc, wick_exact, plain_exact
  double value = 0.0;
  double stderr_ = 0.0;
  std::size_t samples = 0;
  double beta = 0.0;
  std::uint64_t seed = 0;
};

/// For each cutoff N (lattice n_cut = N): Monte Carlo and exact E||:B:^N||^2_{H^beta} and
/// E||B^N||^2_{H^beta} under mu_2.
std::vector<BoundRow> uniform_bound_experiment(int dim, const std::vector<int>& cutoffs, const NormSpec& ns,
                                               std::size_t samples, std::uint64_t seed, unsigned threads = 1);

void write_bound_csv(std::ostream& os, const std::vector<BoundRow>& rows);

}  // namespace wnls
