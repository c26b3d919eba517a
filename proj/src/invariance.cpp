#include "wnls/invariance.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "wnls/errors.hpp"
#include "wnls/parallel.hpp"
#include "wnls/rng.hpp"

namespace wnls {

BaseMeasure base_measure_from_string(const std::string& s) {
  if (s == "gibbs") return BaseMeasure::gibbs;
  if (s == "mu2") return BaseMeasure::mu2;
  throw ConfigError("unknown base measure: " + s);
}
GibbsSource gibbs_source_from_string(const std::string& s) {
  if (s == "hmc") return GibbsSource::hmc;
  if (s == "importance") return GibbsSource::importance;
  throw ConfigError("unknown Gibbs source: " + s);
}
Design design_from_string(const std::string& s) {
  if (s == "split") return Design::split;
  if (s == "paired") return Design::paired;
  throw ConfigError("unknown comparison design: " + s);
}
std::string to_string(BaseMeasure b) { return b == BaseMeasure::gibbs ? "gibbs" : "mu2"; }
std::string to_string(GibbsSource g) { return g == GibbsSource::hmc ? "hmc" : "importance"; }
std::string to_string(Design d) { return d == Design::split ? "split" : "paired"; }

namespace {

std::string mode_label(const Mode& k, int dim) {
  return dim == 1 ? "(" + std::to_string(k[0]) + ")"
                  : "(" + std::to_string(k[0]) + "," + std::to_string(k[1]) + ")";
}

}  // namespace

ObservablePanel::ObservablePanel(LatticePtr lattice, std::size_t modes, double beta, double D)
    : lattice_(std::move(lattice)), norm_(beta), D_(D) {
  std::vector<std::size_t> order(lattice_->size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return lattice_->norm_sq(a) < lattice_->norm_sq(b); });
  order.resize(std::min(modes, order.size()));
  modes_ = order;
  for (std::size_t i : modes_) {
    const auto label = mode_label(lattice_->mode(i), lattice_->dim());
    labels_.push_back("re" + label);
    labels_.push_back("im" + label);
    labels_.push_back("abs2" + label);
  }
  labels_.push_back("h_beta_norm");
  labels_.push_back("wick_quartic");
}

std::vector<double> ObservablePanel::evaluate(const SpectralField& f, GridTransform& grid) const {
  std::vector<double> v;
  v.reserve(size());
  for (std::size_t i : modes_) {
    v.push_back(f[i].real());
    v.push_back(f[i].imag());
    v.push_back(std::norm(f[i]));
  }
  v.push_back(h_beta_norm_sq(f, norm_));
  const double m = f.mass();
  v.push_back(grid.quartic_mean(f.coeffs()) - 4.0 * D_ * m + 2.0 * D_ * D_);
  return v;
}

Ensemble draw_base_ensemble(const InvarianceConfig& cfg, double* ess, bool* ess_warning, double* hmc_acceptance) {
  const auto lat = build_lattice(cfg.dim, cfg.n_cut);
  const GaussianSpec gauss(lat, 2.0);
  const double aN = a_N_constant(*lat, CutoffPredicate::lattice(*lat));
  if (ess) *ess = static_cast<double>(cfg.members);
  if (ess_warning) *ess_warning = false;
  if (cfg.base == BaseMeasure::mu2) return sample_ensemble(gauss, cfg.members, cfg.seed, cfg.threads);
  if (cfg.source == GibbsSource::hmc) {
    GibbsSampler sampler(gauss, aN, cfg.hmc);
    return sample_gibbs_ensemble(sampler, cfg.members, cfg.seed, cfg.threads, hmc_acceptance);
  }
  Ensemble pool = sample_ensemble(gauss, cfg.members * cfg.importance_pool_factor, cfg.seed, cfg.threads);
  GridTransform grid(lat);
  for (std::size_t i = 0; i < pool.size(); ++i) pool.log_weights[i] = gibbs_log_weight(pool.members[i], aN, grid);
  auto res = importance_resample(pool, cfg.members, splitmix64(cfg.seed));
  if (ess) *ess = res.ess;
  if (ess_warning) *ess_warning = res.ess_warning;
  res.ensemble.provenance = Provenance::gibbs;
  return std::move(res.ensemble);
}

FlowConfig flow_config_for(const InvarianceConfig& cfg, const FreqLattice& lattice) {
  FlowConfig f;
  f.dt = cfg.dt;
  f.T = cfg.T;
  f.integrator = cfg.integrator;
  f.wick = cfg.wick ? WickSpec::lattice_default(lattice) : WickSpec::plain();
  f.dispersion = cfg.dispersion;
  f.checkpoints = 10;
  return f;
}

InvarianceReport compare_under_flow(const Ensemble& e, const InvarianceConfig& cfg, const FlowConfig& flow,
                                    const std::function<double(const SpectralField&)>& level_error) {
  if (e.size() == 0) throw DegenerateEnsembleError("empty ensemble");
  const auto lat = e.members.front().lattice_ptr();
  const double D = a_N_constant(*lat, CutoffPredicate::lattice(*lat));
  const ObservablePanel panel(lat, cfg.panel_modes, cfg.beta, D);

  std::size_t ref_begin = 0, ref_end = e.size(), test_begin = 0;
  if (cfg.design == Design::split) {
    ref_end = e.size() / 2;
    test_begin = ref_end;
  }
  const std::size_t n_test = e.size() - test_begin;

  std::vector<std::vector<double>> ref(ref_end - ref_begin), post(n_test);
  std::vector<double> mass_drift(n_test), ham_drift(n_test), lvl(n_test, 0.0);
  const unsigned workers = std::max(1u, cfg.threads);
  std::vector<GridTransform> grids(workers, GridTransform(lat));
  parallel_for(workers, workers, [&](std::size_t t) {
    auto& grid = grids[t];
    for (std::size_t i = ref_begin + t; i < ref_end; i += workers) ref[i - ref_begin] = panel.evaluate(e.members[i], grid);
    for (std::size_t i = t; i < n_test; i += workers) {
      auto [f, rep] = evolve(e.members[test_begin + i], flow);
      mass_drift[i] = rep.max_mass_drift;
      ham_drift[i] = rep.max_hamiltonian_drift;
      if (level_error) lvl[i] = level_error(f);
      post[i] = panel.evaluate(f, grid);
    }
  });

  InvarianceReport r;
  r.reference_size = ref.size();
  r.test_size = post.size();
  r.threshold = cfg.alpha / static_cast<double>(panel.size());
  for (std::size_t o = 0; o < panel.size(); ++o) {
    std::vector<double> xs(ref.size()), ys(post.size());
    for (std::size_t i = 0; i < ref.size(); ++i) xs[i] = ref[i][o];
    for (std::size_t i = 0; i < post.size(); ++i) ys[i] = post[i][o];
    ObservableOutcome out{ks_two_sample(xs, ys, panel.labels()[o]), false};
    out.rejected = out.test.p_value < r.threshold;
    r.rejected = r.rejected || out.rejected;
    r.observables.push_back(std::move(out));
  }
  for (std::size_t i = 0; i < n_test; ++i) {
    r.max_mass_drift = std::max(r.max_mass_drift, mass_drift[i]);
    r.max_hamiltonian_drift = std::max(r.max_hamiltonian_drift, ham_drift[i]);
    r.max_level_error = std::max(r.max_level_error, lvl[i]);
  }
  return r;
}

InvarianceReport gibbs_invariance(const InvarianceConfig& cfg) {
  double ess = 0.0, acc = 0.0;
  bool warn = false;
  const Ensemble e = draw_base_ensemble(cfg, &ess, &warn, &acc);
  auto r = compare_under_flow(e, cfg, flow_config_for(cfg, e.members.front().lattice()));
  r.ess = ess;
  r.ess_warning = warn;
  r.hmc_acceptance = acc;
  return r;
}

SurfaceReport surface_invariance(const SurfaceConfig& cfg) {
  SurfaceReport out;
  double ess = 0.0, acc = 0.0;
  bool warn = false;
  const Ensemble pool = draw_base_ensemble(cfg.base, &ess, &warn, &acc);
  const auto& lat = pool.members.front().lattice();
  const MassSpec ms(lat);

  std::vector<double> E(pool.size()), g(pool.size()), ones(pool.size(), 1.0);
  const auto k1 = lat.index_of({1, 0});
  for (std::size_t i = 0; i < pool.size(); ++i) {
    E[i] = renormalized_mass(pool.members[i], ms);
    g[i] = std::norm(pool.members[i][*k1]);
  }
  const double bandwidth = cfg.bandwidth > 0.0 ? cfg.bandwidth : silverman_bandwidth(E);
  out.r = cfg.r.value_or(density_mode(E, bandwidth));
  out.delta = cfg.delta;

  LevelSetSpec spec{out.r, cfg.delta, bandwidth, true};
  out.unit = surface_expectation(ones, E, {}, spec);
  out.level = surface_expectation(E, E, {}, spec);
  out.lowest_mode = surface_expectation(g, E, {}, spec);
  out.unit_exact = out.unit.ratio == 1.0 && out.unit.conditional == 1.0;
  out.level_ok = std::abs(out.level.ratio - out.r) <= 4.0 * out.level.ratio_se + 1e-12;
  out.cross_validation_ok = out.lowest_mode.agree(4.0);

  out.refinement_ok = true;
  for (double d : cfg.refinement) {
    LevelSetSpec s = spec;
    s.delta = d;
    out.refinement.emplace_back(d, surface_expectation(g, E, {}, s));
  }
  for (std::size_t i = 1; i < out.refinement.size(); ++i) {
    const auto& a = out.refinement[i - 1].second;
    const auto& b = out.refinement[i].second;
    if (std::abs(a.conditional - b.conditional) > 4.0 * std::hypot(a.conditional_se, b.conditional_se)) {
      out.refinement_ok = false;
    }
  }

  const auto cond = condition_on_level(pool, spec, ms);
  out.acceptance_fraction = cond.acceptance_fraction;
  FlowConfig flow = flow_config_for(cfg.base, lat);
  flow.project_each_step = true;
  flow.level = out.r;
  const double r = out.r;
  out.invariance = compare_under_flow(cond.ensemble, cfg.base, flow,
                                      [&](const SpectralField& f) { return std::abs(renormalized_mass(f, ms) - r); });
  out.invariance.ess = ess;
  out.invariance.ess_warning = warn;
  out.invariance.hmc_acceptance = acc;
  return out;
}

nlohmann::json to_json(const InvarianceReport& r) {
  nlohmann::json obs = nlohmann::json::array();
  for (const auto& o : r.observables) {
    obs.push_back({{"observable", o.test.label},
                   {"statistic", o.test.statistic},
                   {"p", o.test.p_value},
                   {"n1", o.test.n1},
                   {"n2", o.test.n2},
                   {"pass", !o.rejected}});
  }
  return {{"observables", obs},
          {"threshold", r.threshold},
          {"rejected", r.rejected},
          {"reference_size", r.reference_size},
          {"test_size", r.test_size},
          {"ess", r.ess},
          {"ess_warning", r.ess_warning},
          {"hmc_acceptance", r.hmc_acceptance},
          {"max_mass_drift", r.max_mass_drift},
          {"max_hamiltonian_drift", r.max_hamiltonian_drift},
          {"max_level_error", r.max_level_error}};
}

namespace {

nlohmann::json to_json(const SurfaceEstimate& s) {
  return {{"ratio", s.ratio},
          {"ratio_se", s.ratio_se},
          {"conditional", s.conditional},
          {"conditional_se", s.conditional_se},
          {"shell_count", s.shell_count},
          {"bandwidth", s.bandwidth}};
}

}  // namespace

nlohmann::json to_json(const SurfaceReport& r) {
  nlohmann::json refinement = nlohmann::json::array();
  for (const auto& [d, s] : r.refinement) {
    auto j = to_json(s);
    j["delta"] = d;
    refinement.push_back(j);
  }
  return {{"invariance", to_json(r.invariance)},
          {"r", r.r},
          {"delta", r.delta},
          {"acceptance_fraction", r.acceptance_fraction},
          {"unit", to_json(r.unit)},
          {"level", to_json(r.level)},
          {"lowest_mode", to_json(r.lowest_mode)},
          {"refinement", refinement},
          {"unit_exact", r.unit_exact},
          {"level_ok", r.level_ok},
          {"cross_validation_ok", r.cross_validation_ok},
          {"refinement_ok", r.refinement_ok}};
}

}  // namespace wnls
