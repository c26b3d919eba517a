#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "json.hpp"

namespace wnls {

using cplx = std::complex<double>;

/// Integer wave vector. The second component is always zero on 1-d lattices.
using Mode = std::array<int, 2>;

/// Index set {k in Z^d : 1 <= |k|^2 <= n_cut}, lexicographically ordered.
///
/// The zero mode is never present and the set is closed under negation.
/// Lookups go through a dense table over the bounding box, so `index_of` is O(1).
class FreqLattice {
 public:
  FreqLattice(int dim, int n_cut);

  int dim() const { return dim_; }
  int n_cut() const { return n_cut_; }
  std::size_t size() const { return modes_.size(); }
  std::span<const Mode> modes() const { return modes_; }
  const Mode& mode(std::size_t i) const { return modes_[i]; }
  int norm_sq(std::size_t i) const { return norm_sq_[i]; }
  std::span<const int> norms_sq() const { return norm_sq_; }

  /// Largest |component| over all modes; sets the minimal alias-free grid sizes.
  int k_max() const { return k_max_; }

  std::optional<std::size_t> index_of(const Mode& k) const;
  std::size_t negation(std::size_t i) const { return negation_[i]; }

  bool operator==(const FreqLattice& other) const {
    return dim_ == other.dim_ && n_cut_ == other.n_cut_;
  }

 private:
  int dim_;
  int n_cut_;
  int k_max_ = 0;
  std::vector<Mode> modes_;
  std::vector<int> norm_sq_;
  std::vector<std::size_t> negation_;
  std::vector<std::ptrdiff_t> table_;  // dense (2*k_max+1)^dim lookup, -1 for absent
};

using LatticePtr = std::shared_ptr<const FreqLattice>;

/// Throws ConfigError unless dim is 1 or 2 and n_cut >= 1.
LatticePtr build_lattice(int dim, int n_cut);

/// Complex Fourier coefficients phi_k, one per lattice mode, under e_k(x) = exp(2 pi i k.x).
class SpectralField {
 public:
  explicit SpectralField(LatticePtr lattice);
  SpectralField(LatticePtr lattice, std::vector<cplx> coeffs);

  const FreqLattice& lattice() const { return *lattice_; }
  const LatticePtr& lattice_ptr() const { return lattice_; }
  std::size_t size() const { return coeffs_.size(); }

  std::span<const cplx> coeffs() const { return coeffs_; }
  std::span<cplx> coeffs() { return coeffs_; }
  cplx operator[](std::size_t i) const { return coeffs_[i]; }
  cplx& operator[](std::size_t i) { return coeffs_[i]; }

  /// Coefficient at wave vector k; zero if k is not on the lattice.
  cplx at(const Mode& k) const;

  bool all_finite() const;

  /// Plain mass sum_k |phi_k|^2 (equal to the L2 norm squared by Parseval).
  double mass() const;

  SpectralField& operator+=(const SpectralField& other);
  SpectralField& operator-=(const SpectralField& other);
  SpectralField& operator*=(cplx s);

 private:
  LatticePtr lattice_;
  std::vector<cplx> coeffs_;
};

SpectralField operator+(SpectralField a, const SpectralField& b);
SpectralField operator-(SpectralField a, const SpectralField& b);
SpectralField operator*(cplx s, SpectralField a);

/// Which lattice modes a cutoff-dependent constant sums over.
///
/// Three comparisons appear for the same truncation parameter: |k|^2 <= n (the
/// lattice itself), |k| <= N and |k| < N. All are evaluated over an existing lattice,
/// so a predicate can only select a subset of it.
struct CutoffPredicate {
  enum class Kind { norm_sq_le, norm_le, norm_lt };
  Kind kind = Kind::norm_sq_le;
  int value = 1;

  static CutoffPredicate lattice(const FreqLattice& lat) { return {Kind::norm_sq_le, lat.n_cut()}; }
  bool admits(int norm_sq) const;
};

/// Sobolev exponent of H^beta; only negative exponents are admitted.
class NormSpec {
 public:
  explicit NormSpec(double beta);
  double beta() const { return beta_; }

 private:
  double beta_;
};

/// sum_k |k|^{2 beta} |phi_k|^2
double h_beta_norm_sq(const SpectralField& f, const NormSpec& ns);

/// Samples u(x_j) on the uniform grid x_j = j / G (per axis), row-major in d = 2.
struct GridField {
  int dim = 1;
  int grid_size = 0;
  std::vector<cplx> values;
};

/// Smallest grid that represents the lattice without aliasing: 2 k_max + 1.
int min_roundtrip_grid(const FreqLattice& lattice);
/// Smallest grid for an alias-free cubic or quartic product: 4 k_max + 1.
int min_product_grid(const FreqLattice& lattice);
/// min_product_grid rounded up to a 2^a 3^b 5^c size.
int default_product_grid(const FreqLattice& lattice);

/// Discrete synthesis. Throws AliasingError when G < 2 k_max + 1.
GridField to_grid(const SpectralField& f, int grid_size);
/// Discrete analysis restricted to the lattice modes.
SpectralField from_grid(const GridField& g, const LatticePtr& lattice);

/// e^{itA}: phi_k -> exp(-i dispersion |k|^2 t) phi_k.
SpectralField linear_phase(const SpectralField& f, double t, double dispersion = 1.0);

/// JSONL record {dim, n_cut, coeffs: [[k..., re, im], ...]} in lattice order.
nlohmann::json field_to_json(const SpectralField& f);
SpectralField field_from_json(const nlohmann::json& j);

}  // namespace wnls
