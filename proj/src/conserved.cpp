#include "wnls/conserved.hpp"

#include <cmath>
#include <numbers>

#include "wnls/errors.hpp"
#include "wnls/numerics.hpp"

namespace wnls {

double dispersion_preset(const std::string& name) {
  if (name == "gibbs") return 0.5;
  if (name == "unit") return 1.0;
  if (name == "angular") return 4.0 * std::numbers::pi * std::numbers::pi;
  throw ConfigError("unknown dispersion preset: " + name);
}

std::string dispersion_name(double kappa) {
  for (const char* n : {"gibbs", "unit", "angular"}) {
    if (dispersion_preset(n) == kappa) return n;
  }
  return "custom";
}

MassSpec::MassSpec(const FreqLattice& lattice) : dim_(lattice.dim()), Z_(lattice.size(), 0.0) {
  if (dim_ != 2) return;
  CompensatedSum t;
  for (std::size_t i = 0; i < lattice.size(); ++i) {
    Z_[i] = 2.0 / lattice.norm_sq(i);
    t += Z_[i];
  }
  total_Z_ = t.value();
}

double renormalized_mass(const SpectralField& f, const MassSpec& ms) {
  CompensatedSum e;
  const auto Z = ms.Z();
  for (std::size_t i = 0; i < f.size(); ++i) e += std::norm(f[i]) - Z[i];
  return e.value();
}

double plain_mass(const SpectralField& f) { return f.mass(); }

double hamiltonian_HN(const SpectralField& f, double aN, GridTransform& grid, double kappa) {
  const auto& lat = f.lattice();
  CompensatedSum kinetic;
  for (std::size_t i = 0; i < f.size(); ++i) kinetic += lat.norm_sq(i) * std::norm(f[i]);
  return kappa * kinetic.value() + 0.5 * grid.quartic_mean(f.coeffs()) - 2.0 * aN * f.mass() + aN * aN;
}

double hamiltonian_HN(const SpectralField& f, double aN, int grid_size, double kappa) {
  GridTransform grid(f.lattice_ptr(), grid_size, GridTransform::Purpose::product);
  return hamiltonian_HN(f, aN, grid, kappa);
}

double grad_E_h1_norm_sq(const SpectralField& f) {
  const auto& lat = f.lattice();
  CompensatedSum s;
  for (std::size_t i = 0; i < f.size(); ++i) s += std::norm(f[i]) / lat.norm_sq(i);
  return 4.0 * s.value();
}

SpectralField project_to_level_set(const SpectralField& f, double r, const MassSpec& ms) {
  const double target = r + ms.total_Z();
  if (!(target > 0.0)) throw ProjectionError("level r is infeasible: r + total Z must be positive");
  const double m = f.mass();
  if (!(m > 0.0)) throw ProjectionError("cannot project the zero field onto a level set");
  return cplx(std::sqrt(target / m), 0.0) * f;
}

}  // namespace wnls
