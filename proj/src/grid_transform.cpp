#include "wnls/grid_transform.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <string>
#include <tuple>

#include "wnls/errors.hpp"

namespace wnls {

namespace {

// FFTW planning is not thread-safe; execution on distinct arrays is.
class PlanCache {
 public:
  static PlanCache& instance() {
    static PlanCache cache;
    return cache;
  }

  fftw_plan get(int dim, int n, int sign) {
    std::lock_guard<std::mutex> lock(mutex_);
    const auto key = std::make_tuple(dim, n, sign);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;
    const std::size_t total = dim == 2 ? static_cast<std::size_t>(n) * n : static_cast<std::size_t>(n);
    auto* buf = fftw_alloc_complex(total);
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    fftw_plan p = dim == 2 ? fftw_plan_dft_2d(n, n, buf, buf, sign, flags)
                           : fftw_plan_dft_1d(n, buf, buf, sign, flags);
    fftw_free(buf);
    plans_.emplace(key, p);
    return p;
  }

 private:
  std::mutex mutex_;
  std::map<std::tuple<int, int, int>, fftw_plan> plans_;
};

}  // namespace

GridTransform::GridTransform(LatticePtr lattice, int grid_size, Purpose purpose)
    : lattice_(std::move(lattice)), grid_size_(grid_size) {
  const int needed = purpose == Purpose::product ? min_product_grid(*lattice_) : min_roundtrip_grid(*lattice_);
  if (grid_size < needed) {
    throw AliasingError("grid size " + std::to_string(grid_size) + " aliases lattice with k_max " +
                        std::to_string(lattice_->k_max()) + "; need at least " + std::to_string(needed));
  }
  const int dim = lattice_->dim();
  const auto g = static_cast<std::size_t>(grid_size);
  points_ = dim == 2 ? g * g : g;
  slots_.reserve(lattice_->size());
  auto wrap = [grid_size](int k) { return static_cast<std::size_t>(((k % grid_size) + grid_size) % grid_size); };
  for (const auto& k : lattice_->modes()) {
    slots_.push_back(dim == 2 ? wrap(k[0]) * g + wrap(k[1]) : wrap(k[0]));
  }
  forward_ = PlanCache::instance().get(dim, grid_size, FFTW_FORWARD);
  backward_ = PlanCache::instance().get(dim, grid_size, FFTW_BACKWARD);
  scratch_.resize(points_);
}

GridTransform::GridTransform(LatticePtr lattice)
    : GridTransform(lattice, default_product_grid(*lattice), Purpose::product) {}

void GridTransform::execute(std::span<cplx> grid, int sign) const {
  auto* data = reinterpret_cast<fftw_complex*>(grid.data());
  fftw_execute_dft(static_cast<fftw_plan>(sign == FFTW_FORWARD ? forward_ : backward_), data, data);
}

void GridTransform::synthesize(std::span<const cplx> coeffs, std::span<cplx> grid) const {
  std::fill(grid.begin(), grid.end(), cplx{0.0, 0.0});
  for (std::size_t i = 0; i < slots_.size(); ++i) grid[slots_[i]] = coeffs[i];
  execute(grid, FFTW_BACKWARD);
}

void GridTransform::analyze(std::span<cplx> grid, std::span<cplx> coeffs) const {
  execute(grid, FFTW_FORWARD);
  const double scale = 1.0 / static_cast<double>(points_);
  for (std::size_t i = 0; i < slots_.size(); ++i) coeffs[i] = grid[slots_[i]] * scale;
}

void GridTransform::cubic(std::span<const cplx> coeffs, std::span<cplx> out) {
  synthesize(coeffs, scratch_);
  for (auto& u : scratch_) u *= std::norm(u);
  analyze(scratch_, out);
}

double GridTransform::quartic_mean(std::span<const cplx> coeffs) {
  synthesize(coeffs, scratch_);
  double acc = 0.0;
  for (const auto& u : scratch_) {
    const double m = std::norm(u);
    acc += m * m;
  }
  return acc / static_cast<double>(points_);
}

}  // namespace wnls
