#pragma once

#include <span>
#include <vector>

#include "wnls/conserved.hpp"
#include "wnls/measures.hpp"

namespace wnls {

struct LevelSetSpec {
  double r = 0.0;
  double delta = 0.2;      // shell half-width
  double bandwidth = 0.0;  // kernel bandwidth; 0 selects Silverman's rule
  bool project = true;

  void validate(const MassSpec& ms) const;
};

struct ConditionResult {
  Ensemble ensemble;
  double acceptance_fraction = 0.0;
  std::vector<std::size_t> source_index;  // position of every retained member in the input
};

/// Keeps members with |E - r| < delta (optionally projected radially onto E = r).
/// Throws InfeasibleLevelError when nothing is retained.
ConditionResult condition_on_level(const Ensemble& e, const LevelSetSpec& spec, const MassSpec& ms);

/// 0.9 min(sd, IQR / 1.34) n^{-1/5}
double silverman_bandwidth(std::span<const double> values);

/// Weighted Gaussian-kernel density estimate at r; weights are normalized, empty weights mean uniform.
double density_rho(std::span<const double> values, std::span<const double> weights, double r, double bandwidth);

/// Grid argmax of the kernel density estimate over [min, max] of the values.
double density_mode(std::span<const double> values, double bandwidth, int grid_points = 2001);

struct SurfaceEstimate {
  double ratio = 0.0;  // rho_g(r) / rho(r)
  double ratio_se = 0.0;
  double conditional = 0.0;  // mean of g over the shell |E - r| < delta
  double conditional_se = 0.0;
  std::size_t shell_count = 0;
  double bandwidth = 0.0;

  /// |ratio - conditional| <= z * sqrt(ratio_se^2 + conditional_se^2)
  bool agree(double z = 4.0) const;
};

/// Surface expectation of an observable from samples (g_i, E_i) with weights w_i (empty = uniform).
/// Throws UndefinedSurfaceError when the density at r is numerically zero or the shell is empty.
SurfaceEstimate surface_expectation(std::span<const double> g, std::span<const double> E,
                                    std::span<const double> weights, const LevelSetSpec& spec);

}  // namespace wnls
