#pragma once

#include <string>
#include <vector>

#include "wnls/grid_transform.hpp"
#include "wnls/spectral.hpp"

namespace wnls {

/// Coefficient kappa of the linear part, omega_k = kappa |k|^2.
///
///   gibbs   = 1/2   exp(-H_N) dLeb coincides with the weighted mu_2 measure
///   unit    = 1     phi_k -> exp(-i |k|^2 t) phi_k
///   angular = 4 pi^2  physical wavenumber 2 pi k under e_k = exp(2 pi i k.x)
double dispersion_preset(const std::string& name);
std::string dispersion_name(double kappa);

/// Per-mode mass counterterm: Z_k = 2/|k|^2 in d = 2, zero in d = 1.
class MassSpec {
 public:
  explicit MassSpec(const FreqLattice& lattice);
  int dim() const { return dim_; }
  std::span<const double> Z() const { return Z_; }
  double total_Z() const { return total_Z_; }

 private:
  int dim_;
  std::vector<double> Z_;
  double total_Z_ = 0.0;
};

/// sum_k (|phi_k|^2 - Z_k)
double renormalized_mass(const SpectralField& f, const MassSpec& ms);

double plain_mass(const SpectralField& f);

/// kappa sum|k|^2|phi_k|^2 + 1/2 int|u|^4 - 2 aN sum|phi_k|^2 + aN^2.
double hamiltonian_HN(const SpectralField& f, double aN, GridTransform& grid, double kappa);
double hamiltonian_HN(const SpectralField& f, double aN, int grid_size, double kappa);

/// Squared H^1 norm of grad E: 4 sum |phi_k|^2 / |k|^2.
double grad_E_h1_norm_sq(const SpectralField& f);

/// lambda f with lambda = sqrt((r + total_Z) / sum|phi_k|^2). Throws ProjectionError
/// for a zero field or r + total_Z <= 0.
SpectralField project_to_level_set(const SpectralField& f, double r, const MassSpec& ms);

}  // namespace wnls
