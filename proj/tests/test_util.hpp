#pragma once

#include <random>

#include "wnls/spectral.hpp"

inline wnls::SpectralField random_field(const wnls::LatticePtr& lat, std::uint64_t seed, double scale = 1.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, scale);
  wnls::SpectralField f(lat);
  for (auto& c : f.coeffs()) c = {n(rng), n(rng)};
  return f;
}

inline double max_abs_diff(const wnls::SpectralField& a, const wnls::SpectralField& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}
