#include "wnls/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "wnls/errors.hpp"
#include "wnls/numerics.hpp"

namespace wnls {

namespace {

template <class T>
T parse_number(const std::string& key, const std::string& text) {
  T value{};
  const char* first = text.data();
  const char* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) throw ConfigError("invalid value for " + key + ": '" + text + "'");
  return value;
}

bool parse_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw ConfigError("invalid boolean for " + key + ": '" + text + "'");
}

struct Field {
  std::string section;
  std::string key;
  std::string doc;
  std::function<std::string(const ExperimentConfig&)> get;
  std::function<void(ExperimentConfig&, const std::string&)> set;
};

template <class T>
Field number(std::string section, std::string key, T ExperimentConfig::*member, std::string doc) {
  const std::string full = section + "." + key;
  return {section, key, std::move(doc),
          [member](const ExperimentConfig& c) {
            if constexpr (std::is_floating_point_v<T>) {
              return format_double(c.*member);
            } else {
              return std::to_string(c.*member);
            }
          },
          [member, full](ExperimentConfig& c, const std::string& v) { c.*member = parse_number<T>(full, v); }};
}

Field flag(std::string section, std::string key, bool ExperimentConfig::*member, std::string doc) {
  const std::string full = section + "." + key;
  return {section, key, std::move(doc), [member](const ExperimentConfig& c) { return std::string(c.*member ? "true" : "false"); },
          [member, full](ExperimentConfig& c, const std::string& v) { c.*member = parse_bool(full, v); }};
}

Field text(std::string section, std::string key, std::string ExperimentConfig::*member, std::string doc) {
  return {section, key, std::move(doc), [member](const ExperimentConfig& c) { return c.*member; },
          [member](ExperimentConfig& c, const std::string& v) { c.*member = v; }};
}

const std::vector<Field>& fields() {
  using C = ExperimentConfig;
  static const std::vector<Field> table = {
      number("lattice", "dimension", &C::dimension, "spatial dimension, 1 or 2"),
      number("lattice", "n_cut", &C::n_cut, "lattice cutoff on |k|^2"),
      number("lattice", "a", &C::a, "Gaussian covariance exponent"),
      number("norm", "beta", &C::beta, "negative Sobolev exponent of the H^beta norm"),
      flag("wick", "enabled", &C::wick, "subtract the counterterm C phi in the flow"),
      text("wick", "cutoff", &C::wick_cutoff, "counterterm predicate: lattice | norm_le | norm_lt"),
      number("wick", "cutoff_value", &C::wick_cutoff_value, "predicate parameter, 0 = n_cut"),
      number("flow", "dt", &C::dt, "time step"),
      number("flow", "T", &C::T, "final time, may be negative"),
      text("flow", "integrator", &C::integrator, "lawson_rk4 | strang"),
      text("flow", "dispersion", &C::dispersion, "gibbs (1/2) | unit (1) | angular (4 pi^2) | number"),
      number("flow", "drift_tolerance", &C::drift_tolerance, "mass drift flag threshold"),
      flag("flow", "project_each_step", &C::project_each_step, "project onto the initial level set after each step"),
      number("flow", "checkpoints", &C::checkpoints, "number of checkpoint intervals"),
      number("ensemble", "members", &C::members, "ensemble size"),
      text("ensemble", "base", &C::base, "gibbs | mu2"),
      text("ensemble", "source", &C::source, "Gibbs sampler: hmc | importance"),
      number("ensemble", "pool_factor", &C::pool_factor, "mu2 pool size per member for importance resampling"),
      number("ensemble", "hmc_burn_in", &C::hmc_burn_in, "HMC adaptation iterations"),
      number("ensemble", "hmc_iterations", &C::hmc_iterations, "HMC fixed-step iterations"),
      number("ensemble", "hmc_leapfrog", &C::hmc_leapfrog, "leapfrog steps per HMC iteration"),
      number("ensemble", "hmc_step", &C::hmc_step, "initial HMC step size"),
      number("moments", "samples", &C::moment_samples, "Monte Carlo samples"),
      number("moments", "max_norm_sq", &C::moment_max_norm_sq, "modes with |k|^2 up to this value"),
      number("moments", "max_p", &C::moment_max_p, "highest moment order"),
      number("second_moment", "samples", &C::second_moment_samples, "Monte Carlo samples"),
      text("second_moment", "modes", &C::second_moment_modes, "modes k as 'x,y;x,y'"),
      text("second_moment", "grad_pairs", &C::grad_pairs, "derivative pairs as 'jx,jy:kx,ky;...'"),
      text("wick_bound", "cutoffs", &C::cutoffs, "comma-separated lattice cutoffs"),
      number("wick_bound", "samples", &C::bound_samples, "Monte Carlo samples per cutoff"),
      number("invariance", "alpha", &C::alpha, "family-wise significance level"),
      number("invariance", "panel_modes", &C::panel_modes, "number of lowest modes in the observable panel"),
      text("invariance", "design", &C::design, "split | paired"),
      flag("invariance", "negative_control", &C::negative_control, "also run the unweighted mu2 control"),
      number("invariance", "dt", &C::invariance_dt, "time step for ensemble evolution"),
      text("level_set", "r", &C::level, "target renormalized mass, or auto (density mode)"),
      number("level_set", "delta", &C::delta, "shell half-width"),
      number("level_set", "bandwidth", &C::bandwidth, "kernel bandwidth, 0 = Silverman"),
      text("level_set", "refinement", &C::refinement, "shell widths for the refinement study"),
      text("series", "K", &C::series_K, "comma-separated radii"),
      number("series", "beta", &C::series_beta, "exponent of |k|"),
      number("run", "seed", &C::seed, "master seed"),
      text("run", "output", &C::output, "output directory"),
      number("run", "threads", &C::threads, "worker threads"),
  };
  return table;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) {
    const auto b = cur.find_first_not_of(" \t");
    const auto e = cur.find_last_not_of(" \t");
    parts.push_back(b == std::string::npos ? "" : cur.substr(b, e - b + 1));
  }
  return parts;
}

ExperimentConfig from_ptree(const boost::property_tree::ptree& tree) {
  ExperimentConfig cfg;
  std::map<std::string, const Field*> index;
  for (const auto& f : fields()) index[f.section + "." + f.key] = &f;
  for (const auto& [section, body] : tree) {
    if (body.empty()) throw ConfigError("key outside any section: " + section);
    for (const auto& [key, value] : body) {
      const auto it = index.find(section + "." + key);
      if (it == index.end()) throw ConfigError("unknown key: " + section + "." + key);
      it->second->set(cfg, value.get_value<std::string>());
    }
  }
  cfg.validate();
  return cfg;
}

}  // namespace

void ExperimentConfig::validate() const {
  if (dimension != 1 && dimension != 2) throw ConfigError("lattice.dimension must be 1 or 2");
  if (n_cut < 1) throw ConfigError("lattice.n_cut must be >= 1");
  if (!(a > 0.0)) throw ConfigError("lattice.a must be positive");
  if (!(beta < 0.0)) throw ConfigError("norm.beta must be negative (got " + format_double(beta) + ")");
  if (wick_cutoff != "lattice" && wick_cutoff != "norm_le" && wick_cutoff != "norm_lt") {
    throw ConfigError("wick.cutoff must be lattice, norm_le or norm_lt");
  }
  if (wick_cutoff_value < 0) throw ConfigError("wick.cutoff_value must be >= 0");
  if (!(dt > 0.0)) throw ConfigError("flow.dt must be positive");
  if (!std::isfinite(T)) throw ConfigError("flow.T must be finite");
  integrator_from_string(integrator);
  dispersion_value(*this);
  if (!(drift_tolerance > 0.0)) throw ConfigError("flow.drift_tolerance must be positive");
  if (checkpoints < 1) throw ConfigError("flow.checkpoints must be >= 1");
  if (members < 1) throw ConfigError("ensemble.members must be >= 1");
  base_measure_from_string(base);
  gibbs_source_from_string(source);
  if (pool_factor < 1) throw ConfigError("ensemble.pool_factor must be >= 1");
  if (hmc_burn_in < 0 || hmc_iterations < 1 || hmc_leapfrog < 1 || !(hmc_step > 0.0)) {
    throw ConfigError("invalid HMC settings");
  }
  if (moment_samples < 2 || moment_max_norm_sq < 1 || moment_max_p < 1) throw ConfigError("invalid [moments] settings");
  if (second_moment_samples < 2) throw ConfigError("second_moment.samples must be >= 2");
  wnls::second_moment_modes(*this);
  wnls::grad_pairs(*this);
  for (int N : parse_int_list(cutoffs)) {
    if (N < 1) throw ConfigError("wick_bound.cutoffs must be positive");
  }
  if (bound_samples < 2) throw ConfigError("wick_bound.samples must be >= 2");
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("invariance.alpha must lie in (0, 1)");
  if (panel_modes < 1) throw ConfigError("invariance.panel_modes must be >= 1");
  design_from_string(design);
  if (!(invariance_dt > 0.0)) throw ConfigError("invariance.dt must be positive");
  if (level != "auto") parse_number<double>("level_set.r", level);
  if (!(delta > 0.0)) throw ConfigError("level_set.delta must be positive");
  if (bandwidth < 0.0) throw ConfigError("level_set.bandwidth must be >= 0");
  for (double d : parse_double_list(refinement)) {
    if (!(d > 0.0)) throw ConfigError("level_set.refinement entries must be positive");
  }
  for (int K : parse_int_list(series_K)) {
    if (K < 2) throw ConfigError("series.K entries must be >= 2");
  }
  if (!(series_beta < 0.0)) throw ConfigError("series.beta must be negative");
}

ExperimentConfig parse_config_text(const std::string& text) {
  boost::property_tree::ptree tree;
  std::istringstream is(text);
  try {
    boost::property_tree::read_ini(is, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(std::string("config syntax error: ") + e.what());
  }
  return from_ptree(tree);
}

ExperimentConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

std::string serialize_config(const ExperimentConfig& cfg) {
  std::ostringstream os;
  std::string section;
  for (const auto& f : fields()) {
    if (f.section != section) {
      if (!section.empty()) os << '\n';
      section = f.section;
      os << '[' << section << "]\n";
    }
    os << f.key << " = " << f.get(cfg) << '\n';
  }
  return os.str();
}

std::string config_hash(const ExperimentConfig& cfg) {
  ExperimentConfig keyed = cfg;
  keyed.output = ExperimentConfig{}.output;
  keyed.threads = ExperimentConfig{}.threads;
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : serialize_config(keyed)) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string describe_defaults() {
  const ExperimentConfig def;
  std::ostringstream os;
  for (const auto& f : fields()) {
    os << "  " << f.section << '.' << f.key << " = " << f.get(def) << "    " << f.doc << '\n';
  }
  return os.str();
}

std::vector<int> parse_int_list(const std::string& s) {
  std::vector<int> out;
  for (const auto& p : split(s, ',')) out.push_back(parse_number<int>("list", p));
  if (out.empty()) throw ConfigError("empty list");
  return out;
}

std::vector<double> parse_double_list(const std::string& s) {
  std::vector<double> out;
  for (const auto& p : split(s, ',')) out.push_back(parse_number<double>("list", p));
  if (out.empty()) throw ConfigError("empty list");
  return out;
}

namespace {

Mode parse_mode(const std::string& s, int dim) {
  const auto parts = split(s, ',');
  if (parts.size() != static_cast<std::size_t>(dim) && !(dim == 1 && parts.size() == 2)) {
    throw ConfigError("mode '" + s + "' does not match the dimension");
  }
  Mode k{parse_number<int>("mode", parts[0]), parts.size() > 1 ? parse_number<int>("mode", parts[1]) : 0};
  if (dim == 1 && k[1] != 0) throw ConfigError("mode '" + s + "' has a second component in d = 1");
  return k;
}

}  // namespace

std::vector<Mode> parse_mode_list(const std::string& s, int dim) {
  std::vector<Mode> out;
  for (const auto& p : split(s, ';')) out.push_back(parse_mode(p, dim));
  return out;
}

std::vector<std::pair<Mode, Mode>> parse_mode_pairs(const std::string& s, int dim) {
  std::vector<std::pair<Mode, Mode>> out;
  for (const auto& p : split(s, ';')) {
    const auto jk = split(p, ':');
    if (jk.size() != 2) throw ConfigError("mode pair '" + p + "' must read j:k");
    out.emplace_back(parse_mode(jk[0], dim), parse_mode(jk[1], dim));
  }
  return out;
}

std::vector<Mode> second_moment_modes(const ExperimentConfig& cfg) {
  if (cfg.second_moment_modes != "auto") return parse_mode_list(cfg.second_moment_modes, cfg.dimension);
  return parse_mode_list(cfg.dimension == 2 ? "1,0;1,1;2,0" : "1;2;3", cfg.dimension);
}

std::vector<std::pair<Mode, Mode>> grad_pairs(const ExperimentConfig& cfg) {
  if (cfg.grad_pairs != "auto") return parse_mode_pairs(cfg.grad_pairs, cfg.dimension);
  return parse_mode_pairs(cfg.dimension == 2 ? "1,0:1,0;1,0:0,1;1,1:2,0" : "1:1;1:2;2:-1", cfg.dimension);
}

double dispersion_value(const ExperimentConfig& cfg) {
  if (cfg.dispersion == "gibbs" || cfg.dispersion == "unit" || cfg.dispersion == "angular") {
    return dispersion_preset(cfg.dispersion);
  }
  const double v = parse_number<double>("flow.dispersion", cfg.dispersion);
  if (!(v > 0.0)) throw ConfigError("flow.dispersion must be positive");
  return v;
}

WickSpec wick_spec(const ExperimentConfig& cfg, const FreqLattice& lattice) {
  if (!cfg.wick) return WickSpec::plain();
  CutoffPredicate pred = CutoffPredicate::lattice(lattice);
  const int value = cfg.wick_cutoff_value > 0 ? cfg.wick_cutoff_value : lattice.n_cut();
  if (cfg.wick_cutoff == "norm_le") pred = {CutoffPredicate::Kind::norm_le, value};
  if (cfg.wick_cutoff == "norm_lt") pred = {CutoffPredicate::Kind::norm_lt, value};
  if (cfg.wick_cutoff == "lattice") pred.value = value;
  return WickSpec(lattice, pred, cfg.a);
}

FlowConfig flow_config(const ExperimentConfig& cfg, const FreqLattice& lattice) {
  FlowConfig f;
  f.dt = cfg.dt;
  f.T = cfg.T;
  f.integrator = integrator_from_string(cfg.integrator);
  f.wick = wick_spec(cfg, lattice);
  f.dispersion = dispersion_value(cfg);
  f.drift_tolerance = cfg.drift_tolerance;
  f.project_each_step = cfg.project_each_step;
  f.checkpoints = cfg.checkpoints;
  return f;
}

InvarianceConfig invariance_config(const ExperimentConfig& cfg) {
  InvarianceConfig c;
  c.dim = cfg.dimension;
  c.n_cut = cfg.n_cut;
  c.wick = cfg.wick;
  c.dispersion = dispersion_value(cfg);
  c.integrator = integrator_from_string(cfg.integrator);
  c.dt = cfg.invariance_dt;
  c.T = cfg.T;
  c.members = cfg.members;
  c.seed = cfg.seed;
  c.threads = cfg.threads;
  c.beta = cfg.beta;
  c.alpha = cfg.alpha;
  c.base = base_measure_from_string(cfg.base);
  c.source = gibbs_source_from_string(cfg.source);
  c.hmc = {cfg.hmc_burn_in, cfg.hmc_iterations, cfg.hmc_leapfrog, cfg.hmc_step, 0.75};
  c.importance_pool_factor = cfg.pool_factor;
  c.design = design_from_string(cfg.design);
  c.panel_modes = cfg.panel_modes;
  return c;
}

SurfaceConfig surface_config(const ExperimentConfig& cfg) {
  SurfaceConfig s;
  s.base = invariance_config(cfg);
  s.delta = cfg.delta;
  if (cfg.level != "auto") s.r = parse_number<double>("level_set.r", cfg.level);
  s.bandwidth = cfg.bandwidth;
  s.refinement = parse_double_list(cfg.refinement);
  return s;
}

}  // namespace wnls
