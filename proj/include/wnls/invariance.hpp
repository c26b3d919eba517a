#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "wnls/flow.hpp"
#include "wnls/gibbs_sampler.hpp"
#include "wnls/ks_test.hpp"
#include "wnls/surface.hpp"

namespace wnls {

enum class BaseMeasure { gibbs, mu2 };
enum class GibbsSource { hmc, importance };
/// split: reference = first half untouched, test = second half evolved (independent samples).
/// paired: reference = all members, test = the same members evolved.
enum class Design { split, paired };

BaseMeasure base_measure_from_string(const std::string& s);
GibbsSource gibbs_source_from_string(const std::string& s);
Design design_from_string(const std::string& s);
std::string to_string(BaseMeasure b);
std::string to_string(GibbsSource g);
std::string to_string(Design d);

struct InvarianceConfig {
  int dim = 1;
  int n_cut = 8;
  bool wick = false;
  double dispersion = 0.5;
  Integrator integrator = Integrator::lawson_rk4;
  double dt = 5e-3;
  double T = 1.0;
  std::size_t members = 10000;
  std::uint64_t seed = 1;
  unsigned threads = 1;
  double beta = -0.5;
  double alpha = 0.01;
  BaseMeasure base = BaseMeasure::gibbs;
  GibbsSource source = GibbsSource::hmc;
  HmcOptions hmc;
  std::size_t importance_pool_factor = 20;
  Design design = Design::split;
  std::size_t panel_modes = 6;
};

/// Fixed observables: Re, Im, |phi_k|^2 for the lowest modes, the H^beta norm and the
/// Wick-ordered quartic int|u|^4 - 4 D sum|phi|^2 + 2 D^2.
class ObservablePanel {
 public:
  ObservablePanel(LatticePtr lattice, std::size_t modes, double beta, double D);
  const std::vector<std::string>& labels() const { return labels_; }
  std::size_t size() const { return labels_.size(); }
  std::vector<double> evaluate(const SpectralField& f, GridTransform& grid) const;

 private:
  LatticePtr lattice_;
  std::vector<std::size_t> modes_;
  NormSpec norm_;
  double D_;
  std::vector<std::string> labels_;
};

struct ObservableOutcome {
  StatTestResult test;
  bool rejected = false;
};

struct InvarianceReport {
  std::vector<ObservableOutcome> observables;
  double threshold = 0.0;  // alpha / panel size
  bool rejected = false;   // any corrected rejection
  std::size_t reference_size = 0;
  std::size_t test_size = 0;
  double ess = 0.0;
  bool ess_warning = false;
  double hmc_acceptance = 0.0;
  double max_mass_drift = 0.0;
  double max_hamiltonian_drift = 0.0;
  double max_level_error = 0.0;  // max |E(u_T) - r| when projecting
};

/// Base ensemble for the configuration (Gibbs via HMC or importance resampling, or plain mu_2).
Ensemble draw_base_ensemble(const InvarianceConfig& cfg, double* ess = nullptr, bool* ess_warning = nullptr,
                            double* hmc_acceptance = nullptr);

FlowConfig flow_config_for(const InvarianceConfig& cfg, const FreqLattice& lattice);

/// Evolves the test part of `e` and KS-compares every panel observable against the reference part.
InvarianceReport compare_under_flow(const Ensemble& e, const InvarianceConfig& cfg, const FlowConfig& flow,
                                    const std::function<double(const SpectralField&)>& level_error = {});

InvarianceReport gibbs_invariance(const InvarianceConfig& cfg);

struct SurfaceConfig {
  InvarianceConfig base;
  double delta = 0.2;
  std::optional<double> r;  // default: mode of the E density of the base ensemble
  double bandwidth = 0.0;   // 0 = Silverman
  std::vector<double> refinement{0.4, 0.2, 0.1};
};

struct SurfaceReport {
  InvarianceReport invariance;
  double r = 0.0;
  double delta = 0.0;
  double acceptance_fraction = 0.0;
  SurfaceEstimate unit;         // g = 1
  SurfaceEstimate level;        // g = E
  SurfaceEstimate lowest_mode;  // g = |phi_k|^2 at the first lattice mode
  std::vector<std::pair<double, SurfaceEstimate>> refinement;
  bool unit_exact = false;
  bool level_ok = false;
  bool cross_validation_ok = false;
  bool refinement_ok = false;
};

SurfaceReport surface_invariance(const SurfaceConfig& cfg);

nlohmann::json to_json(const InvarianceReport& r);
nlohmann::json to_json(const SurfaceReport& r);

}  // namespace wnls
