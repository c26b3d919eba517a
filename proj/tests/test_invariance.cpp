#include <cmath>

#include "doctest.h"
#include "test_util.hpp"
#include "wnls/errors.hpp"
#include "wnls/invariance.hpp"
#include "wnls/nonlinearity.hpp"
#include "wnls/numerics.hpp"

using namespace wnls;

namespace {

// direct four-fold convolution sum_{a+b=c+d} phi_a phi_b conj(phi_c phi_d)
double quartic_direct(const SpectralField& f) {
  const auto& lat = f.lattice();
  double q = 0.0;
  for (std::size_t a = 0; a < f.size(); ++a)
    for (std::size_t b = 0; b < f.size(); ++b)
      for (std::size_t c = 0; c < f.size(); ++c) {
        auto m = lat.mode(a);
        for (int i = 0; i < lat.dim(); ++i) m[i] += lat.mode(b)[i] - lat.mode(c)[i];
        const auto d = lat.index_of(m);
        if (d) q += (f[a] * f[b] * std::conj(f[c] * f[*d])).real();
      }
  return q;
}

InvarianceConfig small_config() {
  InvarianceConfig c;
  c.dim = 1;
  c.n_cut = 4;
  c.members = 2000;
  c.dt = 1e-2;
  c.T = 0.5;
  c.panel_modes = 3;
  return c;
}

}  // namespace

TEST_CASE("observable panel values") {
  auto lat = build_lattice(2, 5);
  const double D = a_N_constant(*lat, CutoffPredicate::lattice(*lat));
  const ObservablePanel panel(lat, 6, -0.5, D);
  REQUIRE(panel.size() == 20);
  CHECK(panel.labels().back() == "wick_quartic");
  GridTransform grid(lat);
  const auto f = random_field(lat, 3, 0.4);
  const auto v = panel.evaluate(f, grid);
  CHECK(v[0] == f[*lat->index_of({-1, 0})].real());
  double hb = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) hb += std::norm(f[i]) / std::sqrt(lat->norm_sq(i));
  CHECK(v[18] == doctest::Approx(hb).epsilon(1e-13));
  CHECK(v[19] == doctest::Approx(quartic_direct(f) - 4.0 * D * f.mass() + 2.0 * D * D).epsilon(1e-12));

  // the Wick quartic has zero mean under the reference Gaussian measure
  const auto e = sample_ensemble(GaussianSpec(lat), 20000, 4);
  MeanAccumulator acc;
  for (const auto& m : e.members) acc.add(panel.evaluate(m, grid)[19]);
  CHECK(std::abs(acc.mean()) < 4.0 * acc.stderr_of_mean());
}

TEST_CASE("zero-time flow passes trivially in the paired design") {
  auto cfg = small_config();
  cfg.T = 0.0;
  cfg.design = Design::paired;
  cfg.members = 300;
  const auto rep = gibbs_invariance(cfg);
  CHECK_FALSE(rep.rejected);
  for (const auto& o : rep.observables) CHECK(o.test.p_value == 1.0);
  CHECK(rep.reference_size == 300);
  CHECK(rep.test_size == 300);
}

TEST_CASE("small Gibbs invariance run and its negative control") {
  auto cfg = small_config();
  const auto rep = gibbs_invariance(cfg);
  CHECK_FALSE(rep.rejected);
  CHECK(rep.threshold == doctest::Approx(0.01 / rep.observables.size()));
  CHECK(rep.hmc_acceptance > 0.5);
  CHECK(rep.max_mass_drift < 1e-4);

  cfg.base = BaseMeasure::mu2;
  cfg.members = 6000;
  cfg.T = 1.0;
  CHECK(gibbs_invariance(cfg).rejected);
}

TEST_CASE("importance-resampled Gibbs source reports weight degeneracy") {
  auto cfg = small_config();
  cfg.n_cut = 2;
  cfg.source = GibbsSource::importance;
  cfg.members = 1000;
  double ess = 0.0;
  bool warning = false;
  const auto e = draw_base_ensemble(cfg, &ess, &warning);
  CHECK(e.size() == 1000);
  CHECK(e.provenance == Provenance::gibbs);
  CHECK(ess > 0.0);
  CHECK(ess < 0.1 * 20000);
  CHECK(warning);
}

TEST_CASE("small surface invariance run") {
  SurfaceConfig sc;
  sc.base = small_config();
  sc.base.members = 6000;
  const auto rep = surface_invariance(sc);
  CHECK_FALSE(rep.invariance.rejected);
  CHECK(rep.unit_exact);
  CHECK(rep.level_ok);
  CHECK(rep.cross_validation_ok);
  CHECK(rep.refinement_ok);
  CHECK(rep.invariance.max_level_error <= 1e-9);
  CHECK(rep.acceptance_fraction > 0.0);
  CHECK(to_json(rep)["invariance"]["observables"].size() == rep.invariance.observables.size());
}

TEST_CASE("string conversions") {
  CHECK(base_measure_from_string("mu2") == BaseMeasure::mu2);
  CHECK(gibbs_source_from_string("importance") == GibbsSource::importance);
  CHECK(design_from_string("paired") == Design::paired);
  CHECK(to_string(Design::split) == "split");
  CHECK_THROWS_AS(design_from_string("other"), ConfigError);
}
