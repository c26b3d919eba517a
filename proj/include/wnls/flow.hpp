#pragma once

#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "wnls/conserved.hpp"
#include "wnls/grid_transform.hpp"
#include "wnls/nonlinearity.hpp"

namespace wnls {

enum class Integrator { lawson_rk4, strang };
Integrator integrator_from_string(const std::string& s);
std::string to_string(Integrator i);

/// dphi_k/dt = -i kappa |k|^2 phi_k - i (B_k(phi) - C phi_k)
struct FlowConfig {
  double dt = 1e-3;
  double T = 1.0;
  Integrator integrator = Integrator::lawson_rk4;
  WickSpec wick = WickSpec::plain();
  double dispersion = 0.5;  // kappa
  double drift_tolerance = 1e-9;
  bool project_each_step = false;
  std::optional<double> level;  // target of the per-step projection; defaults to E(f0)
  int checkpoints = 10;
  int grid_size = 0;  // 0 = default product grid
  bool cubic = true;  // false drops B and keeps only the linear and counterterm parts

  void validate() const;
};

struct Checkpoint {
  double t = 0.0;
  double mass = 0.0;
  double renormalized_mass = 0.0;
  double hamiltonian = 0.0;
};

struct DriftReport {
  std::vector<Checkpoint> checkpoints;
  double max_mass_drift = 0.0;        // max |M - M0| / M0
  double max_renorm_mass_drift = 0.0;  // max |E - E0| / M0
  double max_hamiltonian_drift = 0.0;  // max |H - H0| / |H0|
  int steps = 0;
  bool partial_last_step = false;
  bool drift_exceeded = false;  // mass drift above tolerance without projection
};

/// Called at every checkpoint with (t, state).
using CheckpointSink = std::function<void(double, const SpectralField&)>;

class FlowStepper {
 public:
  FlowStepper(LatticePtr lattice, const FlowConfig& cfg);

  /// Right-hand side of the nonlinear part: -i (B(phi) - C phi).
  void nonlinear(std::span<const cplx> phi, std::span<cplx> out);

  SpectralField lawson_rk4_step(const SpectralField& f, double h);
  SpectralField strang_step(const SpectralField& f, double h);
  SpectralField step(const SpectralField& f, double h);

  GridTransform& grid() { return grid_; }

 private:
  void rotate(std::span<cplx> v, double h, bool include_counterterm) const;

  LatticePtr lattice_;
  FlowConfig cfg_;
  GridTransform grid_;
  std::vector<double> omega_;
  std::vector<cplx> k1_, k2_, k3_, k4_, tmp_;
};

std::pair<SpectralField, DriftReport> evolve(const SpectralField& f0, const FlowConfig& cfg,
                                             const CheckpointSink& sink = {});

void write_drift_csv(std::ostream& os, const DriftReport& r);

}  // namespace wnls
