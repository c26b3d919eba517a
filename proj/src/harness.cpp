#include "wnls/harness.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "wnls/errors.hpp"
#include "wnls/gibbs_sampler.hpp"
#include "wnls/numerics.hpp"
#include "wnls/parallel.hpp"
#include "wnls/rng.hpp"
#include "wnls/series.hpp"

namespace fs = std::filesystem;

namespace wnls {

const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> names = {"sample",          "moments",          "wick-bound",
                                                 "second-moment",   "evolve",           "gibbs-invariance",
                                                 "surface-invariance", "series"};
  return names;
}

bool RunResult::pass() const {
  for (const auto& [name, ok] : criteria) {
    if (!ok) return false;
  }
  return true;
}

namespace {

std::string mode_string(const Mode& k, int dim) {
  return dim == 1 ? std::to_string(k[0]) : std::to_string(k[0]) + " " + std::to_string(k[1]);
}

std::string iso_now() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

class Artifacts {
 public:
  Artifacts(const ExperimentConfig& cfg) : dir_(cfg.output), hash_(config_hash(cfg)) {
    fs::create_directories(dir_);
  }
  std::ofstream open(const std::string& name) {
    std::ofstream os(dir_ / name);
    if (!os) throw Error("cannot write " + (dir_ / name).string());
    os << "# config_hash: " << hash_ << '\n';
    return os;
  }
  const std::string& hash() const { return hash_; }
  fs::path path(const std::string& name) const { return dir_ / name; }

 private:
  fs::path dir_;
  std::string hash_;
};

RunResult run_sample(const ExperimentConfig& cfg, Artifacts& out) {
  auto inv = invariance_config(cfg);
  double ess = 0.0, acc = 0.0;
  bool warn = false;
  const Ensemble e = draw_base_ensemble(inv, &ess, &warn, &acc);
  auto os = out.open("sample.jsonl");
  write_ensemble_jsonl(os, e);
  RunResult r;
  r.details = {{"members", e.size()}, {"provenance", to_string(e.provenance)}, {"ess", ess},
               {"ess_warning", warn}, {"hmc_acceptance", acc}};
  r.criteria["ess_adequate"] = !warn;
  return r;
}

RunResult run_moments(const ExperimentConfig& cfg, Artifacts& out) {
  const auto lat = build_lattice(cfg.dimension, cfg.moment_max_norm_sq);
  const GaussianSpec spec(lat, cfg.a);
  const std::size_t n = lat->size();
  const int P = cfg.moment_max_p;
  std::vector<MeanAccumulator> acc(n * P), re(n), im(n);
  for (std::size_t s = 0; s < cfg.moment_samples; ++s) {
    const auto f = sample_mu_a(spec, member_seed(cfg.seed, s));
    for (std::size_t i = 0; i < n; ++i) {
      const double m2 = std::norm(f[i]);
      double pw = 1.0;
      for (int p = 1; p <= P; ++p) {
        pw *= m2;
        acc[i * P + p - 1].add(pw);
      }
      re[i].add(f[i].real());
      im[i].add(f[i].imag());
    }
  }
  auto os = out.open("moments.csv");
  os << "mode,p,estimate,stderr,oracle,z\n";
  double max_z = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (int p = 1; p <= P; ++p) {
      const auto& a = acc[i * P + p - 1];
      const double oracle = moment_oracle(lat->mode(i), p, cfg.a);
      const double z = (a.mean() - oracle) / a.stderr_of_mean();
      max_z = std::max(max_z, std::abs(z));
      os << mode_string(lat->mode(i), lat->dim()) << ',' << p << ',' << format_double(a.mean()) << ','
         << format_double(a.stderr_of_mean()) << ',' << format_double(oracle) << ',' << format_double(z) << '\n';
    }
    max_z = std::max({max_z, std::abs(re[i].mean() / re[i].stderr_of_mean()),
                      std::abs(im[i].mean() / im[i].stderr_of_mean())});
  }
  RunResult r;
  r.details = {{"max_abs_z", max_z}, {"modes", n}, {"samples", cfg.moment_samples}};
  r.criteria["moments_within_4se"] = max_z < 4.0;
  return r;
}

RunResult run_wick_bound(const ExperimentConfig& cfg, Artifacts& out) {
  const auto cutoffs = parse_int_list(cfg.cutoffs);
  const auto rows = uniform_bound_experiment(cfg.dimension, cutoffs, NormSpec(cfg.beta), cfg.bound_samples, cfg.seed,
                                             cfg.threads);
  auto os = out.open("wick-bound.csv");
  write_bound_csv(os, rows);
  std::vector<double> wick, plain;
  for (const auto& row : rows) {
    if (row.estimator == "wick_mc") wick.push_back(row.value);
    if (row.estimator == "plain_mc") plain.push_back(row.value);
  }
  const auto [lo, hi] = std::minmax_element(wick.begin(), wick.end());
  bool increasing = true;
  for (std::size_t i = 1; i < plain.size(); ++i) increasing = increasing && plain[i] > plain[i - 1];
  RunResult r;
  r.details = {{"renormalized_ratio", *hi / *lo}, {"renormalized", wick}, {"unrenormalized", plain}};
  r.criteria["renormalized_ratio_below_1.25"] = *hi / *lo < 1.25;
  r.criteria["unrenormalized_increasing"] = increasing;
  return r;
}

RunResult run_second_moment(const ExperimentConfig& cfg, Artifacts& out) {
  const auto lat = build_lattice(cfg.dimension, cfg.n_cut);
  const GaussianSpec spec(lat, 2.0);
  const WickSpec w = WickSpec::lattice_default(*lat);
  const auto modes = second_moment_modes(cfg);
  const auto pairs = grad_pairs(cfg);
  std::vector<std::size_t> mi, ji, ki;
  for (const auto& k : modes) {
    const auto i = lat->index_of(k);
    if (!i) throw ConfigError("second_moment mode is not on the lattice");
    mi.push_back(*i);
  }
  for (const auto& [j, k] : pairs) {
    const auto a = lat->index_of(j);
    const auto b = lat->index_of(k);
    if (!a || !b) throw ConfigError("grad pair mode is not on the lattice");
    ji.push_back(*a);
    ki.push_back(*b);
  }
  GridTransform grid(lat);
  std::vector<MeanAccumulator> acc(modes.size()), gacc(pairs.size());
  const double h = 1e-3;
  for (std::size_t s = 0; s < cfg.second_moment_samples; ++s) {
    const auto f = sample_mu_a(spec, member_seed(cfg.seed, s));
    const auto b = wick_B(f, w, grid);
    for (std::size_t q = 0; q < mi.size(); ++q) acc[q].add(std::norm(b[mi[q]]));
    for (std::size_t q = 0; q < pairs.size(); ++q) {
      SpectralField plus = f, minus = f;
      plus[ji[q]] += h;
      minus[ji[q]] -= h;
      const cplx d = (wick_B(plus, w, grid)[ki[q]] - wick_B(minus, w, grid)[ki[q]]) / (2.0 * h);
      gacc[q].add(std::norm(d));
    }
  }
  auto os = out.open("second-moment.csv");
  os << "kind,j,k,estimate,stderr,oracle,z\n";
  double max_z = 0.0;
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t q = 0; q < modes.size(); ++q) {
    const double oracle = second_moment_oracle(*lat, modes[q], w).total();
    const double z = (acc[q].mean() - oracle) / acc[q].stderr_of_mean();
    max_z = std::max(max_z, std::abs(z));
    os << "second_moment,," << mode_string(modes[q], cfg.dimension) << ',' << format_double(acc[q].mean()) << ','
       << format_double(acc[q].stderr_of_mean()) << ',' << format_double(oracle) << ',' << format_double(z) << '\n';
  }
  double max_gz = 0.0;
  for (std::size_t q = 0; q < pairs.size(); ++q) {
    const double oracle = grad_moment_oracle(*lat, pairs[q].first, pairs[q].second, w);
    const double z = (gacc[q].mean() - oracle) / gacc[q].stderr_of_mean();
    max_gz = std::max(max_gz, std::abs(z));
    os << "gradient," << mode_string(pairs[q].first, cfg.dimension) << ','
       << mode_string(pairs[q].second, cfg.dimension) << ',' << format_double(gacc[q].mean()) << ','
       << format_double(gacc[q].stderr_of_mean()) << ',' << format_double(oracle) << ',' << format_double(z) << '\n';
  }
  RunResult r;
  r.details = {{"max_abs_z_second_moment", max_z}, {"max_abs_z_gradient", max_gz}};
  r.criteria["second_moment_within_4se"] = max_z < 4.0;
  if (!pairs.empty()) r.criteria["gradient_moment_within_4se"] = max_gz < 4.0;
  return r;
}

RunResult run_evolve(const ExperimentConfig& cfg, Artifacts& out) {
  const auto lat = build_lattice(cfg.dimension, cfg.n_cut);
  const GaussianSpec spec(lat, cfg.a);
  SpectralField f0(lat);
  if (cfg.base == "mu2") {
    f0 = sample_mu_a(spec, cfg.seed);
  } else {
    const auto inv = invariance_config(cfg);
    GibbsSampler sampler(spec, a_N_constant(*lat, CutoffPredicate::lattice(*lat)), inv.hmc);
    f0 = sampler.sample(cfg.seed);
  }
  const FlowConfig flow = flow_config(cfg, *lat);
  auto traj = out.open("evolve.jsonl");
  auto [f, report] = evolve(f0, flow, [&](double t, const SpectralField& s) {
    nlohmann::json j{{"t", t}, {"field", field_to_json(s)}};
    traj << j.dump() << '\n';
  });
  auto drift = out.open("evolve-drift.csv");
  write_drift_csv(drift, report);
  RunResult r;
  r.details = {{"max_mass_drift", report.max_mass_drift},
               {"max_renormalized_mass_drift", report.max_renorm_mass_drift},
               {"max_hamiltonian_drift", report.max_hamiltonian_drift},
               {"steps", report.steps},
               {"partial_last_step", report.partial_last_step},
               {"drift_exceeded", report.drift_exceeded}};
  r.criteria["mass_drift_below_1e-8"] = report.max_mass_drift <= 1e-8;
  r.criteria["hamiltonian_drift_below_1e-6"] = report.max_hamiltonian_drift <= 1e-6;
  return r;
}

RunResult run_gibbs_invariance(const ExperimentConfig& cfg, Artifacts& out) {
  const auto inv = invariance_config(cfg);
  const auto report = gibbs_invariance(inv);
  RunResult r;
  r.details["gibbs"] = to_json(report);
  r.criteria["no_corrected_rejection"] = !report.rejected;
  if (cfg.negative_control) {
    auto control = inv;
    control.base = BaseMeasure::mu2;
    const auto c = gibbs_invariance(control);
    r.details["negative_control"] = to_json(c);
    r.criteria["negative_control_rejects"] = c.rejected;
  }
  auto os = out.open("gibbs-invariance.jsonl");
  os << r.details.dump() << '\n';
  return r;
}

RunResult run_surface_invariance(const ExperimentConfig& cfg, Artifacts& out) {
  const auto report = surface_invariance(surface_config(cfg));
  RunResult r;
  r.details = to_json(report);
  r.criteria["no_corrected_rejection"] = !report.invariance.rejected;
  r.criteria["unit_expectation_exact"] = report.unit_exact;
  r.criteria["level_expectation_matches_r"] = report.level_ok;
  r.criteria["estimators_agree"] = report.cross_validation_ok;
  r.criteria["delta_refinement_cauchy"] = report.refinement_ok;
  r.criteria["level_preserved"] = report.invariance.max_level_error <= 1e-9;
  auto os = out.open("surface-invariance.jsonl");
  os << r.details.dump() << '\n';
  return r;
}

RunResult run_series(const ExperimentConfig& cfg, Artifacts& out) {
  const auto Ks = parse_int_list(cfg.series_K);
  auto os = out.open("series.csv");
  os << "series,K,beta,value,increment\n";
  RunResult r;
  for (SeriesId id : {SeriesId::S1, SeriesId::S2}) {
    std::vector<double> v;
    for (int K : Ks) v.push_back(lattice_series_partial_sum(id, K, cfg.series_beta));
    std::vector<double> inc;
    for (std::size_t i = 0; i < v.size(); ++i) {
      os << to_string(id) << ',' << Ks[i] << ',' << format_double(cfg.series_beta) << ',' << format_double(v[i]) << ',';
      if (i > 0) {
        inc.push_back(v[i] - v[i - 1]);
        os << format_double(inc.back());
      }
      os << '\n';
    }
    bool decreasing = true;
    for (std::size_t i = 1; i < inc.size(); ++i) decreasing = decreasing && inc[i] < inc[i - 1];
    const double final_fraction = inc.empty() ? 0.0 : inc.back() / v.back();
    r.details[to_string(id)] = {{"values", v}, {"increments", inc}, {"final_fraction", final_fraction}};
    r.criteria[to_string(id) + "_increments_decreasing"] = decreasing;
    r.criteria[to_string(id) + "_final_increment_below_10pct"] = final_fraction < 0.1;
  }
  return r;
}

}  // namespace

RunResult run_experiment(const std::string& subcommand, const ExperimentConfig& cfg, std::ostream& log, bool verbose) {
  cfg.validate();
  if (std::find(subcommands().begin(), subcommands().end(), subcommand) == subcommands().end()) {
    throw ConfigError("unknown subcommand: " + subcommand);
  }
  const std::string started = iso_now();
  Artifacts out(cfg);
  {
    std::ofstream eff(out.path("effective_config.ini"));
    eff << serialize_config(cfg);
  }
  if (verbose) log << "running " << subcommand << " (config " << out.hash() << ")\n";

  RunResult r;
  if (subcommand == "sample") r = run_sample(cfg, out);
  if (subcommand == "moments") r = run_moments(cfg, out);
  if (subcommand == "wick-bound") r = run_wick_bound(cfg, out);
  if (subcommand == "second-moment") r = run_second_moment(cfg, out);
  if (subcommand == "evolve") r = run_evolve(cfg, out);
  if (subcommand == "gibbs-invariance") r = run_gibbs_invariance(cfg, out);
  if (subcommand == "surface-invariance") r = run_surface_invariance(cfg, out);
  if (subcommand == "series") r = run_series(cfg, out);

  nlohmann::json summary{{"config_hash", out.hash()},
                         {"subcommand", subcommand},
                         {"criteria", r.criteria},
                         {"pass", r.pass()},
                         {"details", r.details}};
  {
    std::ofstream s(out.path("summary.json"));
    s << summary.dump(2) << '\n';
  }
  {
    std::ofstream m(out.path("metadata.json"));
    m << nlohmann::json{{"config_hash", out.hash()}, {"started", started}, {"finished", iso_now()}}.dump(2) << '\n';
  }
  for (const auto& [name, ok] : r.criteria) log << (ok ? "PASS " : "FAIL ") << name << '\n';
  return r;
}

int run_guarded(const std::string& subcommand, const ExperimentConfig& cfg, std::ostream& log, bool verbose) {
  try {
    return run_experiment(subcommand, cfg, log, verbose).pass() ? exit_pass : exit_acceptance_failure;
  } catch (const ConfigError& e) {
    log << "config error: " << e.what() << '\n';
    return exit_config_error;
  } catch (const InfeasibleLevelError& e) {
    log << "infeasible level set: " << e.what() << " (try delta >= " << e.suggested_delta() << ")\n";
    return exit_runtime_error;
  } catch (const std::exception& e) {
    log << "runtime error: " << e.what() << '\n';
    return exit_runtime_error;
  }
}

std::string read_config_hash(const std::string& path) {
  std::ifstream in(path);
  std::string line;
  const std::string prefix = "# config_hash: ";
  if (in && std::getline(in, line) && line.rfind(prefix, 0) == 0) return line.substr(prefix.size());
  return {};
}

std::string require_matching_hashes(const std::vector<std::string>& paths) {
  std::string hash;
  for (const auto& p : paths) {
    const auto h = read_config_hash(p);
    if (h.empty()) throw ConfigError("no config hash in " + p);
    if (!hash.empty() && h != hash) throw ConfigError("config hash mismatch in " + p);
    hash = h;
  }
  return hash;
}

}  // namespace wnls
