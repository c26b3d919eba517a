#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "wnls/spectral.hpp"

namespace wnls {

/// FFT bridge between lattice coefficients and a uniform physical grid.
///
/// Plans are shared process-wide; each instance owns its scratch buffer, so one
/// instance must not be used from two threads at once. Copying is cheap.
class GridTransform {
 public:
  enum class Purpose {
    roundtrip,  // requires G >= 2 k_max + 1
    product,    // requires G >= 4 k_max + 1 (alias-free cubic / quartic products)
  };

  GridTransform(LatticePtr lattice, int grid_size, Purpose purpose);

  /// Uses default_product_grid(lattice).
  explicit GridTransform(LatticePtr lattice);

  int grid_size() const { return grid_size_; }
  std::size_t points() const { return points_; }
  const FreqLattice& lattice() const { return *lattice_; }

  /// grid <- sum_k phi_k exp(2 pi i k.x_j)
  void synthesize(std::span<const cplx> coeffs, std::span<cplx> grid) const;
  /// coeffs <- lattice part of the grid's discrete Fourier coefficients; grid is overwritten.
  void analyze(std::span<cplx> grid, std::span<cplx> coeffs) const;

  /// out_k <- Fourier coefficient of |u|^2 u at every lattice mode (the truncated cubic term).
  void cubic(std::span<const cplx> coeffs, std::span<cplx> out);
  /// Grid mean of |u|^4; exact for Purpose::product grids.
  double quartic_mean(std::span<const cplx> coeffs);

  /// Physical-space map: u <- op(u) pointwise, then re-truncation to the lattice.
  template <class PointOp>
  void pointwise(std::span<const cplx> coeffs, std::span<cplx> out, PointOp op) {
    synthesize(coeffs, scratch_);
    for (auto& u : scratch_) u = op(u);
    analyze(scratch_, out);
  }

 private:
  void execute(std::span<cplx> grid, int sign) const;

  LatticePtr lattice_;
  int grid_size_;
  std::size_t points_;
  std::vector<std::size_t> slots_;  // grid offset of every lattice mode
  void* forward_ = nullptr;         // fftw_plan, owned by the plan cache
  void* backward_ = nullptr;
  std::vector<cplx> scratch_;
};

}  // namespace wnls
