#include "wnls/nonlinearity.hpp"

#include <algorithm>
#include <cmath>

#include "wnls/errors.hpp"
#include "wnls/grid_transform.hpp"
#include "wnls/numerics.hpp"
#include "wnls/parallel.hpp"
#include "wnls/rng.hpp"

namespace wnls {

namespace {

Mode add(const Mode& x, const Mode& y) { return {x[0] + y[0], x[1] + y[1]}; }
Mode sub(const Mode& x, const Mode& y) { return {x[0] - y[0], x[1] - y[1]}; }

std::vector<double> lattice_variances(const FreqLattice& lat, double a) {
  std::vector<double> s(lat.size());
  for (std::size_t i = 0; i < lat.size(); ++i) s[i] = 2.0 * std::pow(static_cast<double>(lat.norm_sq(i)), -0.5 * a);
  return s;
}

double lattice_D(const std::vector<double>& s) {
  CompensatedSum d;
  for (double v : s) d += v;
  return d.value();
}

}  // namespace

WickSpec::WickSpec(const FreqLattice& lattice, CutoffPredicate pred, double a) : pred_(pred), a_(a) {
  CompensatedSum d;
  for (std::size_t i = 0; i < lattice.size(); ++i) {
    if (pred.admits(lattice.norm_sq(i))) d += 2.0 * std::pow(static_cast<double>(lattice.norm_sq(i)), -0.5 * a);
  }
  D_ = d.value();
  C_ = 2.0 * D_;
}

WickSpec WickSpec::plain() { return WickSpec(); }

SpectralField B_direct(const SpectralField& f) {
  const auto& lat = f.lattice();
  const auto modes = lat.modes();
  SpectralField out(f.lattice_ptr());
  for (std::size_t a = 0; a < modes.size(); ++a) {
    for (std::size_t b = 0; b < modes.size(); ++b) {
      const cplx ab = f[a] * f[b];
      const Mode s = add(modes[a], modes[b]);
      for (std::size_t c = 0; c < modes.size(); ++c) {
        if (auto k = lat.index_of(sub(s, modes[c]))) out[*k] += ab * std::conj(f[c]);
      }
    }
  }
  return out;
}

SpectralField B_fft(const SpectralField& f, int grid_size) {
  GridTransform grid(f.lattice_ptr(), grid_size, GridTransform::Purpose::product);
  SpectralField out(f.lattice_ptr());
  grid.cubic(f.coeffs(), out.coeffs());
  return out;
}

SpectralField B_fft(const SpectralField& f) { return B_fft(f, default_product_grid(f.lattice())); }

SpectralField wick_B(const SpectralField& f, const WickSpec& w, GridTransform& grid) {
  SpectralField out(f.lattice_ptr());
  grid.cubic(f.coeffs(), out.coeffs());
  if (!w.is_plain()) {
    for (std::size_t i = 0; i < f.size(); ++i) out[i] -= w.C() * f[i];
  }
  return out;
}

SpectralField wick_B(const SpectralField& f, const WickSpec& w) {
  GridTransform grid(f.lattice_ptr());
  return wick_B(f, w, grid);
}

SecondMoment second_moment_oracle(const FreqLattice& lat, const Mode& k, const WickSpec& w) {
  const auto ki = lat.index_of(k);
  if (!ki) throw ConfigError("second_moment_oracle: mode is not on the lattice");
  const auto s = lattice_variances(lat, w.a());
  const auto modes = lat.modes();
  const double sk = s[*ki];

  // moments of a complex Gaussian with E|z|^2 = v: E|z|^4 = 2 v^2, E|z|^6 = 6 v^3
  CompensatedSum fourth_others, cross;
  for (std::size_t l = 0; l < modes.size(); ++l) {
    if (l != *ki) fourth_others += 2.0 * s[l] * s[l];
    const Mode m = sub(k, modes[l]);
    if (m == Mode{0, 0}) continue;
    if (auto c = lat.index_of(sub(k, add(m, m)))) cross += 2.0 * s[l] * s[l] * s[*c];
  }
  SecondMoment r;
  r.degenerate = 6.0 * sk * sk * sk / 3.0 + 2.0 * sk * fourth_others.value() + cross.value();

  CompensatedSum generic;
  for (std::size_t a = 0; a < modes.size(); ++a) {
    if (a == *ki) continue;
    for (std::size_t b = 0; b < modes.size(); ++b) {
      if (b == *ki || b == a) continue;
      if (auto c = lat.index_of(sub(add(modes[a], modes[b]), k))) generic += s[a] * s[b] * s[*c];
    }
  }
  r.generic = 2.0 * generic.value();
  const double gap = 2.0 * lattice_D(s) - w.C();
  r.mismatch = sk * gap * gap;
  return r;
}

double grad_moment_oracle(const FreqLattice& lat, const Mode& j, const Mode& k, const WickSpec& w) {
  if (!lat.index_of(j) || !lat.index_of(k)) throw ConfigError("grad_moment_oracle: mode is not on the lattice");
  const auto s = lattice_variances(lat, w.a());
  const auto modes = lat.modes();
  const Mode shift = sub(k, j);
  const Mode total = add(j, k);
  CompensatedSum hop, pair;
  for (std::size_t c = 0; c < modes.size(); ++c) {
    if (auto d = lat.index_of(add(modes[c], shift))) hop += s[c] * s[*d];
    if (auto b = lat.index_of(sub(total, modes[c]))) pair += s[c] * s[*b];
  }
  double v = 4.0 * hop.value() + 2.0 * pair.value();
  if (j == k) {
    const double gap = 2.0 * lattice_D(s) - w.C();
    v += gap * gap;
  }
  return v;
}

double wick_norm_oracle(const FreqLattice& lat, const NormSpec& ns, const WickSpec& w) {
  auto lp = std::make_shared<const FreqLattice>(lat);
  const auto s = lattice_variances(lat, w.a());
  GridTransform grid(lp);
  std::vector<cplx> coeffs(s.begin(), s.end());
  std::vector<cplx> s3(s.size());
  grid.pointwise(coeffs, s3, [](cplx u) { return u * u * u; });
  const double gap = 2.0 * lattice_D(s) - w.C();
  CompensatedSum total;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double weight = std::pow(static_cast<double>(lat.norm_sq(i)), ns.beta());
    total += weight * (s[i] * gap * gap + 2.0 * s3[i].real());
  }
  return total.value();
}

std::vector<BoundRow> uniform_bound_experiment(int dim, const std::vector<int>& cutoffs, const NormSpec& ns,
                                               std::size_t samples, std::uint64_t seed, unsigned threads) {
  std::vector<BoundRow> rows;
  for (int N : cutoffs) {
    const auto lat = build_lattice(dim, N);
    const GaussianSpec gauss(lat, 2.0);
    const auto wick = WickSpec::lattice_default(*lat);
    std::vector<double> weights(lat->size());
    for (std::size_t i = 0; i < lat->size(); ++i) weights[i] = std::pow(static_cast<double>(lat->norm_sq(i)), ns.beta());

    std::vector<double> wick_vals(samples), plain_vals(samples);
    const std::uint64_t level_seed = splitmix64(seed ^ static_cast<std::uint64_t>(N));
    const unsigned workers = std::max(1u, threads);
    std::vector<GridTransform> grids(workers, GridTransform(lat));
    const std::size_t block = (samples + workers - 1) / workers;
    parallel_for(workers, workers, [&](std::size_t t) {
      auto& grid = grids[t];
      std::vector<cplx> b(lat->size());
      for (std::size_t i = t * block; i < std::min(samples, (t + 1) * block); ++i) {
        const auto f = sample_mu_a(gauss, member_seed(level_seed, i));
        grid.cubic(f.coeffs(), b);
        CompensatedSum w, p;
        for (std::size_t m = 0; m < b.size(); ++m) {
          p += weights[m] * std::norm(b[m]);
          w += weights[m] * std::norm(b[m] - wick.C() * f[m]);
        }
        wick_vals[i] = w.value();
        plain_vals[i] = p.value();
      }
    });
    MeanAccumulator wa, pa;
    for (std::size_t i = 0; i < samples; ++i) {
      wa.add(wick_vals[i]);
      pa.add(plain_vals[i]);
    }
    rows.push_back({N, "wick_mc", wa.mean(), wa.stderr_of_mean(), samples, ns.beta(), seed});
    rows.push_back({N, "plain_mc", pa.mean(), pa.stderr_of_mean(), samples, ns.beta(), seed});
    rows.push_back({N, "wick_exact", wick_norm_oracle(*lat, ns, wick), 0.0, 0, ns.beta(), seed});
    rows.push_back({N, "plain_exact", wick_norm_oracle(*lat, ns, WickSpec::plain()), 0.0, 0, ns.beta(), seed});
  }
  return rows;
}

void write_bound_csv(std::ostream& os, const std::vector<BoundRow>& rows) {
  os << "N,estimator,value,stderr,samples,beta,seed\n";
  for (const auto& r : rows) {
    os << r.N << ',' << r.estimator << ',' << format_double(r.value) << ',' << format_double(r.stderr_) << ','
       << r.samples << ',' << format_double(r.beta) << ',' << r.seed << '\n';
  }
}

}  // namespace wnls
