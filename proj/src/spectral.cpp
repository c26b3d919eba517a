#include "wnls/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "wnls/errors.hpp"
#include "wnls/grid_transform.hpp"

namespace wnls {

FreqLattice::FreqLattice(int dim, int n_cut) : dim_(dim), n_cut_(n_cut) {
  if (dim != 1 && dim != 2) {
    throw ConfigError("lattice dimension must be 1 or 2, got " + std::to_string(dim));
  }
  if (n_cut < 1) {
    throw ConfigError("lattice cutoff n_cut must be >= 1, got " + std::to_string(n_cut));
  }
  const int r = static_cast<int>(std::floor(std::sqrt(static_cast<double>(n_cut))));
  const int r2 = (dim == 2) ? r : 0;
  for (int x = -r; x <= r; ++x) {
    for (int y = -r2; y <= r2; ++y) {
      const int n2 = x * x + y * y;
      if (n2 >= 1 && n2 <= n_cut) {
        modes_.push_back({x, y});
        norm_sq_.push_back(n2);
        k_max_ = std::max({k_max_, std::abs(x), std::abs(y)});
      }
    }
  }
  const int side = 2 * k_max_ + 1;
  table_.assign(dim == 2 ? side * side : side, -1);
  for (std::size_t i = 0; i < modes_.size(); ++i) {
    const auto& k = modes_[i];
    const std::size_t slot = (dim == 2) ? static_cast<std::size_t>((k[0] + k_max_) * side + (k[1] + k_max_))
                                        : static_cast<std::size_t>(k[0] + k_max_);
    table_[slot] = static_cast<std::ptrdiff_t>(i);
  }
  negation_.resize(modes_.size());
  for (std::size_t i = 0; i < modes_.size(); ++i) {
    negation_[i] = *index_of({-modes_[i][0], -modes_[i][1]});
  }
}

std::optional<std::size_t> FreqLattice::index_of(const Mode& k) const {
  if (std::abs(k[0]) > k_max_ || std::abs(k[1]) > k_max_) return std::nullopt;
  if (dim_ == 1 && k[1] != 0) return std::nullopt;
  const int side = 2 * k_max_ + 1;
  const std::size_t slot = (dim_ == 2) ? static_cast<std::size_t>((k[0] + k_max_) * side + (k[1] + k_max_))
                                       : static_cast<std::size_t>(k[0] + k_max_);
  const auto idx = table_[slot];
  if (idx < 0) return std::nullopt;
  return static_cast<std::size_t>(idx);
}

LatticePtr build_lattice(int dim, int n_cut) {
  return std::make_shared<const FreqLattice>(dim, n_cut);
}

SpectralField::SpectralField(LatticePtr lattice)
    : lattice_(std::move(lattice)), coeffs_(lattice_->size(), cplx{0.0, 0.0}) {}

SpectralField::SpectralField(LatticePtr lattice, std::vector<cplx> coeffs)
    : lattice_(std::move(lattice)), coeffs_(std::move(coeffs)) {
  if (coeffs_.size() != lattice_->size()) {
    throw ConfigError("coefficient count " + std::to_string(coeffs_.size()) +
                      " does not match lattice size " + std::to_string(lattice_->size()));
  }
  if (!all_finite()) throw ConfigError("spectral field has non-finite coefficients");
}

cplx SpectralField::at(const Mode& k) const {
  const auto idx = lattice_->index_of(k);
  return idx ? coeffs_[*idx] : cplx{0.0, 0.0};
}

bool SpectralField::all_finite() const {
  return std::all_of(coeffs_.begin(), coeffs_.end(),
                     [](cplx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); });
}

double SpectralField::mass() const {
  double m = 0.0;
  for (const auto& z : coeffs_) m += std::norm(z);
  return m;
}

SpectralField& SpectralField::operator+=(const SpectralField& other) {
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += other.coeffs_[i];
  return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& other) {
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= other.coeffs_[i];
  return *this;
}

SpectralField& SpectralField::operator*=(cplx s) {
  for (auto& z : coeffs_) z *= s;
  return *this;
}

SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
SpectralField operator*(cplx s, SpectralField a) { return a *= s; }

bool CutoffPredicate::admits(int norm_sq) const {
  switch (kind) {
    case Kind::norm_sq_le:
      return norm_sq <= value;
    case Kind::norm_le:
      return norm_sq <= value * value;
    case Kind::norm_lt:
      return norm_sq < value * value;
  }
  return false;
}

NormSpec::NormSpec(double beta) : beta_(beta) {
  if (!(beta < 0.0)) {
    throw ConfigError("Sobolev exponent beta must be negative, got " + std::to_string(beta));
  }
}

double h_beta_norm_sq(const SpectralField& f, const NormSpec& ns) {
  const auto& lat = f.lattice();
  double acc = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    acc += std::pow(static_cast<double>(lat.norm_sq(i)), ns.beta()) * std::norm(f[i]);
  }
  return acc;
}

int min_roundtrip_grid(const FreqLattice& lattice) { return 2 * lattice.k_max() + 1; }
int min_product_grid(const FreqLattice& lattice) { return 4 * lattice.k_max() + 1; }

int default_product_grid(const FreqLattice& lattice) {
  int g = min_product_grid(lattice);
  for (;; ++g) {
    int r = g;
    for (int p : {2, 3, 5}) {
      while (r % p == 0) r /= p;
    }
    if (r == 1) return g;
  }
}

GridField to_grid(const SpectralField& f, int grid_size) {
  GridTransform tr(f.lattice_ptr(), grid_size, GridTransform::Purpose::roundtrip);
  GridField g{f.lattice().dim(), grid_size, std::vector<cplx>(tr.points())};
  tr.synthesize(f.coeffs(), g.values);
  return g;
}

SpectralField from_grid(const GridField& g, const LatticePtr& lattice) {
  if (g.dim != lattice->dim()) throw ConfigError("grid and lattice dimensions differ");
  GridTransform tr(lattice, g.grid_size, GridTransform::Purpose::roundtrip);
  if (g.values.size() != tr.points()) throw ConfigError("grid value count does not match grid size");
  std::vector<cplx> scratch = g.values;
  SpectralField f(lattice);
  tr.analyze(scratch, f.coeffs());
  return f;
}

SpectralField linear_phase(const SpectralField& f, double t, double dispersion) {
  SpectralField out = f;
  const auto& lat = f.lattice();
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double theta = -dispersion * lat.norm_sq(i) * t;
    out[i] *= cplx{std::cos(theta), std::sin(theta)};
  }
  return out;
}

nlohmann::json field_to_json(const SpectralField& f) {
  const auto& lat = f.lattice();
  nlohmann::json coeffs = nlohmann::json::array();
  for (std::size_t i = 0; i < f.size(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    row.push_back(lat.mode(i)[0]);
    if (lat.dim() == 2) row.push_back(lat.mode(i)[1]);
    row.push_back(f[i].real());
    row.push_back(f[i].imag());
    coeffs.push_back(std::move(row));
  }
  return {{"dim", lat.dim()}, {"n_cut", lat.n_cut()}, {"coeffs", std::move(coeffs)}};
}

SpectralField field_from_json(const nlohmann::json& j) {
  try {
    auto lat = build_lattice(j.at("dim").get<int>(), j.at("n_cut").get<int>());
    SpectralField f(lat);
    const auto& rows = j.at("coeffs");
    if (rows.size() != lat->size()) throw ConfigError("field record has wrong number of modes");
    const std::size_t width = lat->dim() == 2 ? 4 : 3;
    for (const auto& row : rows) {
      if (row.size() != width) throw ConfigError("malformed coefficient row in field record");
      Mode k{row[0].get<int>(), lat->dim() == 2 ? row[1].get<int>() : 0};
      const auto idx = lat->index_of(k);
      if (!idx) throw ConfigError("field record contains a mode outside the lattice");
      f[*idx] = {row[width - 2].get<double>(), row[width - 1].get<double>()};
    }
    if (!f.all_finite()) throw ConfigError("field record has non-finite coefficients");
    return f;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed field record: ") + e.what());
  }
}

}  // namespace wnls
