#include <cmath>

#include "doctest.h"
#include "pks/catalog.hpp"
#include "pks/dynamics.hpp"
#include "pks/stat_tests.hpp"

using namespace pks;
using doctest::Approx;

namespace {

// G(s)/(g_V(s) ν_H(ℝ)) through quadrature or exact sums only.
double generic_ratio_vertical(const PksParams& p, double s) {
  return convolution(p.vertical, p.horizontal, s) / (p.vertical.density(s) * p.horizontal.mass());
}
double generic_ratio_horizontal(const PksParams& p, double s) {
  return convolution(p.vertical, p.horizontal, s) / (p.horizontal.density(s) * p.vertical.mass());
}

}  // namespace

TEST_CASE("every in-scope preset builds and validates with its defaults") {
  for (const auto& name : preset_names()) {
    CAPTURE(name);
    const ModelPreset m = preset(name);
    CHECK(validate(m.params).ok());
    CHECK(m.name == name);
  }
}

TEST_CASE("mixed continuous/atomic pairs are out of scope") {
  CHECK_THROWS_AS(preset("exp-geom"), OutOfScope);
  CHECK_THROWS_AS(preset("negexp-geom"), OutOfScope);
  int listed = 0;
  for (const auto& info : catalog_listing()) listed += info.in_scope ? 0 : 1;
  CHECK(listed == 2);
  CHECK_THROWS_AS(preset("nonsense"), ParameterError);
  CHECK_THROWS_AS(preset("normal", {{"bogus", "1"}}), ParameterError);
  CHECK_THROWS_AS(preset("ber-ber", {{"q_V", "1.5"}}), ParameterError);
  CHECK_THROWS_AS(preset("dirac-dirac", {{"atom_V", "0"}}), ParameterError);
}

TEST_CASE("closed-form rate ratios agree with the generic computation") {
  for (const auto& name : preset_names()) {
    CAPTURE(name);
    const ModelPreset m = preset(name);
    const PksParams& p = m.params;
    if (m.rate_vertical)
      for (double s : m.rate_points_vertical) {
        CAPTURE(s);
        CHECK(m.rate_vertical(s) == Approx(generic_ratio_vertical(p, s)).epsilon(1e-6));
      }
    if (m.rate_horizontal)
      for (double s : m.rate_points_horizontal) {
        CAPTURE(s);
        CHECK(m.rate_horizontal(s) == Approx(generic_ratio_horizontal(p, s)).epsilon(1e-6));
      }
    // A forced-zero side: no crossing can produce the line's own intensity.
    if (m.forced_zero_vertical)
      for (double s : m.rate_points_vertical) CHECK(convolution(p.vertical, p.horizontal, s) == 0.0);
    if (m.forced_zero_horizontal)
      for (double s : m.rate_points_horizontal)
        CHECK(convolution(p.vertical, p.horizontal, s) == 0.0);
  }
}

TEST_CASE("attached convolutions agree with quadrature") {
  for (const auto& name : preset_names()) {
    const ModelPreset m = preset(name);
    if (!m.params.closed.convolution) continue;
    CAPTURE(name);
    for (double s : m.kernel_points)
      CHECK(m.params.closed.convolution(s) ==
            Approx(convolution(m.params.vertical, m.params.horizontal, s)).epsilon(1e-6));
  }
}

TEST_CASE("closed-form kernels agree with the generic kernel") {
  for (const auto& name : preset_names()) {
    const ModelPreset m = preset(name);
    if (!m.kernel) continue;
    CAPTURE(name);
    for (double s : m.kernel_points) {
      CAPTURE(s);
      const KernelLaw law = m.kernel(s);
      CrossingKernelTable table(m.params.vertical, m.params.horizontal, s);
      if (table.atomic()) {
        REQUIRE(law.discrete());
        double total = 0;
        for (std::size_t i = 0; i < table.probabilities().size(); ++i) {
          const long t = table.first() + static_cast<long>(i);
          CHECK(table.probabilities()[i] == Approx(law.pmf(t)).epsilon(1e-9));
          total += law.pmf(t);
        }
        CHECK(total == Approx(1.0).epsilon(1e-9));
      } else {
        Rng rng(11);
        std::vector<double> xs;
        for (int i = 0; i < 100000; ++i) xs.push_back(table.sample(rng));
        CHECK(ks_one_sample(xs, [&](double t) { return law.cdf(t); }).p_value > 1e-3);
      }
    }
  }
}

TEST_CASE("closed-form samplers follow their own laws") {
  for (const auto& name : preset_names()) {
    const ModelPreset m = preset(name);
    if (!m.params.closed.kernel) continue;
    CAPTURE(name);
    for (double s : m.kernel_points) {
      const KernelLaw law = m.kernel(s);
      Rng rng(5);
      std::vector<double> xs;
      for (int i = 0; i < 20000; ++i) xs.push_back(m.params.closed.kernel(s, rng));
      CHECK(ks_one_sample(xs, [&](double t) { return law.cdf(t); }).p_value > 1e-3);
    }
  }
}

TEST_CASE("discrete kernel samplers match their pmfs") {
  const KernelLaw laws[] = {
      {KernelLaw::Family::Binomial, 0, 6, 0.3, 0},
      {KernelLaw::Family::Geometric, 2, 0.4, 0, 0},
      {KernelLaw::Family::DiscreteUniform, 0, 0, 5, 0},
      {KernelLaw::Family::Bernoulli, 3, 0.25, 0, 0},
  };
  for (const auto& law : laws) {
    CAPTURE(law.describe());
    Rng rng(2);
    std::vector<double> counts(40, 0.0), probs(40);
    for (int i = 0; i < 20000; ++i) {
      const long t = static_cast<long>(law.sample(rng));
      REQUIRE(t >= 0);
      counts[static_cast<std::size_t>(std::min(t, 39L))] += 1;
    }
    double tail = 1;
    for (long t = 0; t < 39; ++t) tail -= (probs[static_cast<std::size_t>(t)] = law.pmf(t));
    probs[39] = std::max(tail, 0.0);
    CHECK(chi_square_gof(counts, probs).p_value > 1e-3);
  }
}

TEST_CASE("worked kernel examples") {
  // Standard normals: at s = 3 the horizontal share is N(1.5, 1/2).
  const auto normal = preset("normal");
  const KernelLaw k = normal.kernel(3.0);
  CHECK(k.family == KernelLaw::Family::Normal);
  CHECK(k.a == Approx(1.5));
  CHECK(k.b == Approx(0.5));
  CHECK(normal.rate_vertical(0.0) == Approx(1 / std::sqrt(2.0)));

  const auto poisson = preset("poisson", {{"gamma_V", "1"}, {"gamma_H", "3"}});
  const KernelLaw b = poisson.kernel(4.0);
  CHECK(b.family == KernelLaw::Family::Binomial);
  CHECK(b.a == 4.0);
  CHECK(b.b == Approx(0.75));

  const auto dd = preset("dirac-dirac");
  CHECK(dd.forced_zero_vertical);
  CHECK(dd.forced_zero_horizontal);
  CHECK(dd.kernel(3.0).shift == 2.0);
}

TEST_CASE("user functions are restricted to the supports") {
  const auto m = preset("ber-ber", {{"p_V", "0.5"}, {"p_H", "0.2"}, {"q", "0.1"}});
  CHECK(m.params.pv(1) == 0.5);
  CHECK(m.params.pv(2) == 0.0);
  CHECK(m.params.q(-1) == 0.0);
  CHECK(validate(m.params).ok());
  CHECK_THROWS_AS(preset("normal", {{"p_V", "0.7"}, {"p_H", "0.7"}}), ParameterError);
  CHECK_THROWS_AS(preset("normal", {{"p_V", "0.3 +"}}), ParameterError);
}

TEST_CASE("named special cases") {
  const auto h = preset("hammersley");
  CHECK(h.params.p_annihilation == 1.0);
  CHECK(h.params.pv(-1) == 0.0);
  CHECK(h.monotone);

  const auto g = preset("generalized-lpp", {{"mu0", "1 4 9"}});
  CHECK(g.params.horizontal.density(1) == Approx(1.0 / 6));
  CHECK(g.params.horizontal.density(3) == Approx(3.0 / 6));
  CHECK(g.params.vertical.density(-2) == Approx(2.0 / 6));

  // sqrt of a Gamma(3,1) density is a Gamma(2, 2) density up to a constant.
  const auto c = preset("generalized-lpp");
  const double r1 = c.params.horizontal.density(1.0) / std::sqrt(0.5 * std::exp(-1.0));
  const double r2 = c.params.horizontal.density(4.0) / std::sqrt(8.0 * std::exp(-4.0));
  CHECK(r1 == Approx(r2).epsilon(1e-9));
}

TEST_CASE("six-vertex weights and types") {
  const auto w = six_vertex_weights(SixVertexVariant::NegBerBer, 0.3, 0.6);
  CHECK(w[2] == Approx(0.3 * 0.6));
  CHECK(w[0] == Approx(1 - 0.3 - 0.6 + 2 * 0.18));
  const auto v = SixVertexVariant::NegBerBer;
  CHECK(six_vertex_type(v, 1, 0, 1, 0) == 1);
  CHECK(six_vertex_type(v, 0, -1, 0, -1) == 2);
  CHECK(six_vertex_type(v, 1, -1, 1, -1) == 3);
  CHECK(six_vertex_type(v, 0, 0, 0, 0) == 4);
  CHECK(six_vertex_type(v, 1, -1, 0, 0) == 5);
  CHECK(six_vertex_type(v, 0, 0, 1, -1) == 6);
  CHECK(six_vertex_type(SixVertexVariant::BerBer, 1, 1, 1, 1) == 1);
  CHECK(six_vertex_type(SixVertexVariant::BerBer, 0, 0, 0, 0) == 2);
}

TEST_CASE("six-vertex export reproduces the weights") {
  // Incoming (west, south) arrows fix which two types can occur; their relative
  // frequencies must follow the weights.
  for (auto variant : {SixVertexVariant::BerBer, SixVertexVariant::NegBerBer}) {
    const double qv = 0.3, qh = 0.6;
    const std::string name = variant == SixVertexVariant::BerBer ? "ber-ber" : "negber-ber";
    CAPTURE(name);
    const auto m = preset(name, {{"q_V", "0.3"}, {"q_H", "0.6"}, {"p_V", "0"}, {"p_H", "0"}, {"q", "0"}});
    const auto w = six_vertex_weights(variant, qv, qh);
    double n3 = 0, n5 = 0, n4 = 0, n6 = 0;
    for (std::uint64_t seed = 1; seed <= 150; ++seed) {
      const Drawing d = simulate(m.params, 6, 6, seed);
      const SixVertexConfig cfg = six_vertex_export(d, variant, qv, qh);
      REQUIRE(cfg.type.size() == static_cast<std::size_t>(cfg.columns * cfg.rows));
      for (int t : cfg.type) {
        n3 += t == 3;
        n5 += t == 5;
        n4 += t == 4;
        n6 += t == 6;
      }
    }
    REQUIRE(n3 + n5 > 100);
    REQUIRE(n4 + n6 > 100);
    CHECK(chi_square_gof({n3, n5}, {w[2] / (w[2] + w[4]), w[4] / (w[2] + w[4])}).p_value > 1e-3);
    CHECK(chi_square_gof({n4, n6}, {w[3] / (w[3] + w[5]), w[5] / (w[3] + w[5])}).p_value > 1e-3);
  }
}

TEST_CASE("six-vertex export of an empty drawing is an empty grid") {
  Drawing d;
  const auto cfg = six_vertex_export(d, SixVertexVariant::BerBer, 0.3, 0.6);
  CHECK(cfg.columns == 0);
  CHECK(cfg.rows == 0);
  CHECK(cfg.type.empty());
}

TEST_CASE("six-vertex export rejects drawings that are not grids") {
  const auto m = preset("ber-ber");  // splits and turns on
  bool thrown = false;
  for (std::uint64_t seed = 1; seed <= 20 && !thrown; ++seed) {
    try {
      six_vertex_export(simulate(m.params, 6, 6, seed), SixVertexVariant::BerBer, 0.3, 0.6);
    } catch (const DrawingError&) {
      thrown = true;
    }
  }
  CHECK(thrown);
}
