#include "wnls/flow.hpp"

#include <algorithm>
#include <cmath>

#include "wnls/errors.hpp"
#include "wnls/numerics.hpp"

namespace wnls {

Integrator integrator_from_string(const std::string& s) {
  if (s == "lawson_rk4") return Integrator::lawson_rk4;
  if (s == "strang") return Integrator::strang;
  throw ConfigError("unknown integrator: " + s);
}

std::string to_string(Integrator i) { return i == Integrator::lawson_rk4 ? "lawson_rk4" : "strang"; }

void FlowConfig::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("flow dt must be positive");
  if (!std::isfinite(T)) throw ConfigError("flow T must be finite");
  if (!(dispersion > 0.0)) throw ConfigError("dispersion must be positive");
  if (checkpoints < 1) throw ConfigError("at least one checkpoint interval is required");
  if (!(drift_tolerance > 0.0)) throw ConfigError("drift tolerance must be positive");
}

FlowStepper::FlowStepper(LatticePtr lattice, const FlowConfig& cfg)
    : lattice_(lattice),
      cfg_(cfg),
      grid_(cfg.grid_size > 0 ? GridTransform(lattice, cfg.grid_size, GridTransform::Purpose::product)
                              : GridTransform(lattice)) {
  const std::size_t n = lattice_->size();
  omega_.resize(n);
  for (std::size_t i = 0; i < n; ++i) omega_[i] = cfg_.dispersion * lattice_->norm_sq(i);
  k1_.resize(n);
  k2_.resize(n);
  k3_.resize(n);
  k4_.resize(n);
  tmp_.resize(n);
}

void FlowStepper::nonlinear(std::span<const cplx> phi, std::span<cplx> out) {
  if (cfg_.cubic) {
    grid_.cubic(phi, out);
  } else {
    std::fill(out.begin(), out.end(), cplx(0.0));
  }
  const double C = cfg_.wick.C();
  const cplx minus_i(0.0, -1.0);
  for (std::size_t i = 0; i < phi.size(); ++i) out[i] = minus_i * (out[i] - C * phi[i]);
}

void FlowStepper::rotate(std::span<cplx> v, double h, bool include_counterterm) const {
  const double shift = include_counterterm ? cfg_.wick.C() : 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) v[i] *= std::polar(1.0, -(omega_[i] - shift) * h);
}

SpectralField FlowStepper::lawson_rk4_step(const SpectralField& f, double h) {
  const std::size_t n = f.size();
  const auto phi = f.coeffs();
  auto half = [&](std::size_t i) { return std::polar(1.0, -omega_[i] * 0.5 * h); };
  auto full = [&](std::size_t i) { return std::polar(1.0, -omega_[i] * h); };

  nonlinear(phi, k1_);
  for (std::size_t i = 0; i < n; ++i) tmp_[i] = half(i) * (phi[i] + 0.5 * h * k1_[i]);
  nonlinear(tmp_, k2_);
  for (std::size_t i = 0; i < n; ++i) tmp_[i] = half(i) * phi[i] + 0.5 * h * k2_[i];
  nonlinear(tmp_, k3_);
  for (std::size_t i = 0; i < n; ++i) tmp_[i] = full(i) * phi[i] + h * half(i) * k3_[i];
  nonlinear(tmp_, k4_);

  SpectralField out(f.lattice_ptr());
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = full(i) * phi[i] +
             h / 6.0 * (full(i) * k1_[i] + 2.0 * half(i) * (k2_[i] + k3_[i]) + k4_[i]);
  }
  return out;
}

SpectralField FlowStepper::strang_step(const SpectralField& f, double h) {
  const std::size_t n = f.size();
  SpectralField start = f;
  rotate(start.coeffs(), 0.5 * h, true);

  // implicit midpoint for dphi/dt = -i B(phi)
  std::vector<cplx> next(start.coeffs().begin(), start.coeffs().end());
  std::vector<cplx> mid(n), b(n);
  double scale = 0.0;
  for (const auto& c : start.coeffs()) scale = std::max(scale, std::abs(c));
  const cplx minus_i(0.0, -1.0);
  for (int it = 0; cfg_.cubic && it < 100; ++it) {
    for (std::size_t i = 0; i < n; ++i) mid[i] = 0.5 * (start[i] + next[i]);
    grid_.cubic(mid, b);
    double change = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const cplx updated = start[i] + minus_i * h * b[i];
      change = std::max(change, std::abs(updated - next[i]));
      next[i] = updated;
    }
    if (change <= 1e-15 * (1.0 + scale)) break;
  }
  SpectralField out(f.lattice_ptr(), std::move(next));
  rotate(out.coeffs(), 0.5 * h, true);
  return out;
}

SpectralField FlowStepper::step(const SpectralField& f, double h) {
  return cfg_.integrator == Integrator::lawson_rk4 ? lawson_rk4_step(f, h) : strang_step(f, h);
}

namespace {

SpectralField conjugated(const SpectralField& f) {
  SpectralField out = f;
  for (auto& c : out.coeffs()) c = std::conj(c);
  return out;
}

}  // namespace

std::pair<SpectralField, DriftReport> evolve(const SpectralField& f0, const FlowConfig& cfg,
                                             const CheckpointSink& sink) {
  cfg.validate();
  if (!f0.all_finite()) throw ConfigError("initial field has non-finite coefficients");
  const bool backward = cfg.T < 0.0;
  const double horizon = std::abs(cfg.T);
  const double sign = backward ? -1.0 : 1.0;

  FlowStepper stepper(f0.lattice_ptr(), cfg);
  const MassSpec ms(f0.lattice());
  const double aN = 0.5 * cfg.wick.C();

  DriftReport report;
  const double ratio = horizon / cfg.dt;
  const long full_steps = static_cast<long>(std::floor(ratio + 1e-9));
  const double remainder = horizon - full_steps * cfg.dt;
  report.partial_last_step = remainder > 1e-12 * std::max(1.0, horizon);
  const long steps = full_steps + (report.partial_last_step ? 1 : 0);
  report.steps = static_cast<int>(steps);

  SpectralField f = backward ? conjugated(f0) : f0;
  const double level = cfg.level.value_or(renormalized_mass(f0, ms));

  auto record = [&](double t) {
    Checkpoint c;
    c.t = sign * t;
    c.mass = f.mass();
    c.renormalized_mass = renormalized_mass(f, ms);
    c.hamiltonian = hamiltonian_HN(f, aN, stepper.grid(), cfg.dispersion);
    report.checkpoints.push_back(c);
    if (sink) sink(c.t, backward ? conjugated(f) : f);
  };

  record(0.0);
  const long every = std::max<long>(1, steps / cfg.checkpoints);
  double t = 0.0;
  for (long s = 0; s < steps; ++s) {
    const double h = (s == full_steps) ? remainder : cfg.dt;
    SpectralField next = stepper.step(f, h);
    if (!next.all_finite()) throw BlowUpError("non-finite state during integration", sign * t);
    if (cfg.project_each_step) next = project_to_level_set(next, level, ms);
    f = std::move(next);
    t = (s + 1 == full_steps && !report.partial_last_step) ? horizon : t + h;
    if ((s + 1) % every == 0 || s + 1 == steps) record(t);
  }

  const auto& c0 = report.checkpoints.front();
  const double mscale = c0.mass > 0.0 ? c0.mass : 1.0;
  const double hscale = std::abs(c0.hamiltonian) > 0.0 ? std::abs(c0.hamiltonian) : 1.0;
  for (const auto& c : report.checkpoints) {
    report.max_mass_drift = std::max(report.max_mass_drift, std::abs(c.mass - c0.mass) / mscale);
    report.max_renorm_mass_drift =
        std::max(report.max_renorm_mass_drift, std::abs(c.renormalized_mass - c0.renormalized_mass) / mscale);
    report.max_hamiltonian_drift =
        std::max(report.max_hamiltonian_drift, std::abs(c.hamiltonian - c0.hamiltonian) / hscale);
  }
  report.drift_exceeded = !cfg.project_each_step && report.max_mass_drift > cfg.drift_tolerance;
  if (backward) f = conjugated(f);
  return {std::move(f), std::move(report)};
}

void write_drift_csv(std::ostream& os, const DriftReport& r) {
  os << "t,mass,renormalized_mass,hamiltonian\n";
  for (const auto& c : r.checkpoints) {
    os << format_double(c.t) << ',' << format_double(c.mass) << ',' << format_double(c.renormalized_mass) << ','
       << format_double(c.hamiltonian) << '\n';
  }
  os << "# max_mass_drift," << format_double(r.max_mass_drift) << '\n';
  os << "# max_renormalized_mass_drift," << format_double(r.max_renorm_mass_drift) << '\n';
  os << "# max_hamiltonian_drift," << format_double(r.max_hamiltonian_drift) << '\n';
}

}  // namespace wnls
