#include "wnls/measures.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <random>
#include <string>

#include "wnls/errors.hpp"
#include "wnls/parallel.hpp"
#include "wnls/rng.hpp"

namespace wnls {

GaussianSpec::GaussianSpec(LatticePtr lattice, double a) : lattice_(std::move(lattice)), a_(a) {
  if (!(a > 0.0)) throw ConfigError("Gaussian covariance exponent a must be positive");
  variances_.reserve(lattice_->size());
  for (std::size_t i = 0; i < lattice_->size(); ++i) {
    variances_.push_back(2.0 * std::pow(static_cast<double>(lattice_->norm_sq(i)), -0.5 * a_));
  }
}

SpectralField sample_mu_a(const GaussianSpec& spec, std::uint64_t seed) {
  auto rng = make_engine(seed, Stream::gaussian);
  std::normal_distribution<double> normal(0.0, 1.0);
  SpectralField f(spec.lattice());
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double sd = std::sqrt(0.5 * spec.variance(i));
    const double re = normal(rng);
    const double im = normal(rng);
    f[i] = {sd * re, sd * im};
  }
  return f;
}

double moment_oracle(const Mode& k, int p, double a) {
  if (p < 1) throw ConfigError("moment order p must be >= 1");
  double c = 1.0;
  for (int i = 1; i <= p; ++i) c *= 2.0 * i;  // 2^p p!
  const double norm_sq = static_cast<double>(k[0]) * k[0] + static_cast<double>(k[1]) * k[1];
  if (norm_sq == 0.0) throw ConfigError("moment oracle is undefined at the zero mode");
  return c * std::pow(norm_sq, -0.5 * a * p);
}

double a_N_constant(const FreqLattice& lattice, const CutoffPredicate& pred) {
  double acc = 0.0;
  for (std::size_t i = 0; i < lattice.size(); ++i) {
    if (pred.admits(lattice.norm_sq(i))) acc += 1.0 / lattice.norm_sq(i);
  }
  return 2.0 * acc;
}

QuarticIntegral quartic_integral(const SpectralField& f, int grid_size) {
  const bool exact = grid_size >= min_product_grid(f.lattice());
  GridTransform grid(f.lattice_ptr(), grid_size,
                     exact ? GridTransform::Purpose::product : GridTransform::Purpose::roundtrip);
  return {grid.quartic_mean(f.coeffs()), exact};
}

double gibbs_log_weight(const SpectralField& f, double aN, GridTransform& grid) {
  return -0.5 * grid.quartic_mean(f.coeffs()) + 2.0 * aN * f.mass() - aN * aN;
}

double gibbs_log_weight(const SpectralField& f, double aN) {
  GridTransform grid(f.lattice_ptr());
  return gibbs_log_weight(f, aN, grid);
}

std::string to_string(Provenance p) {
  switch (p) {
    case Provenance::mu_a:
      return "mu_a";
    case Provenance::gibbs:
      return "gibbs";
    case Provenance::conditional:
      return "conditional";
  }
  return "unknown";
}

Provenance provenance_from_string(const std::string& s) {
  if (s == "mu_a") return Provenance::mu_a;
  if (s == "gibbs") return Provenance::gibbs;
  if (s == "conditional") return Provenance::conditional;
  throw ConfigError("unknown ensemble provenance '" + s + "'");
}

void Ensemble::validate() const {
  if (log_weights.size() != members.size() || seeds.size() != members.size()) {
    throw ConfigError("ensemble members, log-weights and seeds differ in length");
  }
  for (const auto& m : members) {
    if (!(m.lattice() == members.front().lattice())) throw ConfigError("ensemble members use different lattices");
  }
  for (double w : log_weights) {
    // -inf is a legitimate zero weight; NaN and +inf are not.
    if (std::isnan(w) || w == std::numeric_limits<double>::infinity()) {
      throw ConfigError("ensemble has a non-finite log-weight");
    }
  }
}

Ensemble sample_ensemble(const GaussianSpec& spec, std::size_t count, std::uint64_t master_seed,
                         unsigned threads) {
  Ensemble e;
  e.provenance = Provenance::mu_a;
  e.members.assign(count, SpectralField(spec.lattice()));
  e.log_weights.assign(count, 0.0);
  e.seeds.resize(count);
  parallel_for(count, threads, [&](std::size_t i) {
    e.seeds[i] = member_seed(master_seed, i);
    e.members[i] = sample_mu_a(spec, e.seeds[i]);
  });
  return e;
}

double effective_sample_size(std::span<const double> log_weights) {
  double top = -std::numeric_limits<double>::infinity();
  for (double w : log_weights) top = std::max(top, w);
  if (!std::isfinite(top)) return 0.0;
  double s1 = 0.0;
  double s2 = 0.0;
  for (double lw : log_weights) {
    const double w = std::exp(lw - top);
    s1 += w;
    s2 += w * w;
  }
  return s1 * s1 / s2;
}

ResampleResult importance_resample(const Ensemble& e, std::size_t m, std::uint64_t seed) {
  e.validate();
  double top = -std::numeric_limits<double>::infinity();
  for (double w : e.log_weights) top = std::max(top, w);
  if (e.size() == 0 || !std::isfinite(top)) {
    throw DegenerateEnsembleError("importance resampling needs at least one finite weight");
  }
  std::vector<double> weights;
  weights.reserve(e.size());
  for (double lw : e.log_weights) weights.push_back(std::exp(lw - top));

  ResampleResult out;
  out.ess = effective_sample_size(e.log_weights);
  out.ess_warning = out.ess < 0.1 * static_cast<double>(e.size());

  auto rng = make_engine(seed, Stream::resample);
  std::discrete_distribution<std::size_t> pick(weights.begin(), weights.end());
  out.ensemble.provenance = Provenance::gibbs;
  out.ensemble.members.reserve(m);
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t j = pick(rng);
    out.ensemble.members.push_back(e.members[j]);
    out.ensemble.seeds.push_back(e.seeds[j]);
  }
  out.ensemble.log_weights.assign(m, 0.0);
  return out;
}

void write_ensemble_jsonl(std::ostream& os, const Ensemble& e) {
  e.validate();
  for (std::size_t i = 0; i < e.size(); ++i) {
    nlohmann::json line = {{"index", i},
                           {"seed", e.seeds[i]},
                           {"log_weight", e.log_weights[i]},
                           {"provenance", to_string(e.provenance)},
                           {"field", field_to_json(e.members[i])}};
    os << line.dump() << '\n';
  }
}

Ensemble read_ensemble_jsonl(std::istream& is) {
  Ensemble e;
  std::string line;
  std::size_t expected = 0;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      if (j.at("index").get<std::size_t>() != expected) throw ConfigError("ensemble records out of order");
      const auto prov = provenance_from_string(j.at("provenance").get<std::string>());
      if (expected == 0) e.provenance = prov;
      e.seeds.push_back(j.at("seed").get<std::uint64_t>());
      const auto& lw = j.at("log_weight");
      e.log_weights.push_back(lw.is_null() ? -std::numeric_limits<double>::infinity() : lw.get<double>());
      e.members.push_back(field_from_json(j.at("field")));
      ++expected;
    } catch (const nlohmann::json::exception& ex) {
      throw ConfigError(std::string("malformed ensemble record: ") + ex.what());
    }
  }
  e.validate();
  return e;
}

}  // namespace wnls
