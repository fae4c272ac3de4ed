#include <algorithm>
#include <cmath>
#include <numbers>

#include "doctest.h"
#include "json.hpp"
#include "pks/catalog.hpp"
#include "pks/statistics.hpp"

using namespace pks;
using doctest::Approx;

namespace {

PksParams gaussian(double pv, double ph, double q) {
  PksParams p;
  p.vertical = p.horizontal = measures::normal(0, 1);
  p.p_vertical = [pv](double) { return pv; };
  p.p_horizontal = [ph](double) { return ph; };
  p.turn = [q](double) { return q; };
  p.description = "gaussian";
  return p;
}

// Same model with the closed-form convolution attached (fast to simulate).
PksParams normal_preset(double pv, double ph, double q) {
  const auto s = [](double x) { return std::to_string(x); };
  return preset("normal", {{"p_V", s(pv)}, {"p_H", s(ph)}, {"q", s(q)}}).params;
}

PksParams grid() {
  PksParams p;
  p.vertical = p.horizontal = measures::dirac(0);
  p.description = "grid";
  return p;
}

bool any_failed(const std::vector<StatReport>& r) { return !all_passed(r); }

}  // namespace

TEST_CASE("expected node counts: Gaussian configuration") {
  const auto m = expected_node_counts(gaussian(0.4, 0.4, 0.1), 50, 50);
  CHECK(m.at(NodeKind::CC) == Approx(500).epsilon(1e-6));
  CHECK(m.at(NodeKind::HT) == Approx(250).epsilon(1e-6));
  CHECK(m.at(NodeKind::VT) == Approx(250).epsilon(1e-6));
  CHECK(m.at(NodeKind::VE) == Approx(50));
  CHECK(m.at(NodeKind::HS) == Approx(50));
  CHECK(m.at(NodeKind::HB) == Approx(1000).epsilon(1e-6));
  CHECK(m.at(NodeKind::OB) == 0.0);
}

TEST_CASE("expected node counts: degenerate and atomic cases") {
  auto p = gaussian(0, 0, 0);
  p.vertical = p.vertical.with_mass(2);
  const auto m = expected_node_counts(p, 3, 4);
  CHECK(m.at(NodeKind::HB) == 0.0);
  CHECK(m.at(NodeKind::HT) == 0.0);
  CHECK(m.at(NodeKind::CC) == Approx(24).epsilon(1e-9));

  const auto h = preset("hammersley");
  const auto mh = expected_node_counts(h.params, 10, 10);
  CHECK(mh.at(NodeKind::OB) == Approx(100));
  CHECK(mh.at(NodeKind::OA) == Approx(100));
  CHECK(mh.at(NodeKind::CC) == Approx(0).epsilon(1e-12));
}

TEST_CASE("coalescence, split and crossing means add up to the face count") {
  for (const char* name : {"normal", "poisson", "negexp-exp", "gamma-gamma", "ber-ber"}) {
    CAPTURE(name);
    const auto m = preset(name);
    const auto e = expected_node_counts(m.params, 7, 3);
    const double f = expected_face_count(m.params, 7, 3);
    const double extra = e.at(NodeKind::OA);  // annihilations also close a face
    CHECK(e.at(NodeKind::HB) + e.at(NodeKind::VB) + e.at(NodeKind::CC) + extra == Approx(f).epsilon(1e-6));
    CHECK(e.at(NodeKind::HA) + e.at(NodeKind::VA) + e.at(NodeKind::CC) + extra == Approx(f).epsilon(1e-6));
  }
}

TEST_CASE("expected face counts") {
  auto p = gaussian(0.4, 0.4, 0.1);
  CHECK(expected_face_count(p, 50, 50) == Approx(2500));
  CHECK(expected_face_count(p, 0, 50) == 0.0);
  p.vertical = p.vertical.with_mass(2);
  p.horizontal = p.horizontal.with_mass(3);
  CHECK(expected_face_count(p, 1, 1) == Approx(6));
}

TEST_CASE("expected face limits") {
  const auto a = expected_face_limits(gaussian(0.25, 0.25, 0));
  CHECK(a.nodes == Approx(5.0).epsilon(1e-6));
  CHECK(a.corners == Approx(4.0));
  const auto b = expected_face_limits(gaussian(0, 0, 0));
  CHECK(b.nodes == Approx(4.0));
  CHECK(b.corners == Approx(4.0));
  const auto c = expected_face_limits(gaussian(0.4, 0.4, 0.1));
  CHECK(c.nodes == Approx(6.0).epsilon(1e-6));
  CHECK(c.corners == Approx(4.4).epsilon(1e-6));
}

TEST_CASE("verdicts are a function of statistic, reference and threshold") {
  StatReport r;
  r.mode = StatReport::Mode::ZScore;
  r.observed = 10.5;
  r.reference = 10;
  r.se = 0.2;
  r.threshold = 3;
  CHECK(r.z() == Approx(2.5));
  CHECK(r.passed());
  r.se = 0.1;
  CHECK_FALSE(r.passed());
  r.se = 0;
  CHECK_FALSE(r.passed());
  r.observed = 10;
  CHECK(r.passed());

  std::vector<StatReport> v(4);
  for (auto& x : v) {
    x.mode = StatReport::Mode::PValue;
    x.p_value = 0.0003;
  }
  v[3].mode = StatReport::Mode::Exact;
  bonferroni(v, 0.001);
  CHECK(v[0].threshold == Approx(0.001 / 3));
  CHECK_FALSE(v[0].passed());
  CHECK(v[3].passed());
}

TEST_CASE("reports serialize as text and JSON") {
  StatReport r;
  r.suite = "means";
  r.name = "count CC";
  r.observed = 1;
  r.reference = 1;
  r.se = 0.5;
  const std::vector<StatReport> v{r};
  CHECK(format_text(v).rfind("PASS means: count CC", 0) == 0);
  const auto doc = nlohmann::json::parse(format_json(v, "demo"));
  CHECK(doc["passed"] == true);
  CHECK(doc["reports"][0]["name"] == "count CC");
  CHECK(doc["reports"][0]["z"] == 0.0);
}

TEST_CASE("replica mapping does not depend on the thread count") {
  const std::function<double(std::size_t, std::uint64_t)> f = [](std::size_t i, std::uint64_t s) {
    return static_cast<double>(i) + static_cast<double>(s % 1000) / 1000;
  };
  const auto one = map_replicas<double>(50, 9, f, 1);
  const auto four = map_replicas<double>(50, 9, f, 4);
  CHECK(one == four);
  CHECK(one[3] == Approx(3 + static_cast<double>(replica_seed(9, 3) % 1000) / 1000));
}

TEST_CASE("cuts and their hits") {
  const Cut d = slope_cut(50, 50, 1);
  CHECK(d.x_extent() == Approx(50));
  CHECK(d.y_extent() == Approx(50));
  CHECK(d.x_extent() / d.length() == Approx(1 / std::sqrt(2.0)));
  const Cut v = slope_cut(10, 20, INFINITY);
  CHECK(v.x_extent() == 0.0);
  CHECK(v.y_extent() == Approx(20));
  const Cut s = staircase_cut(10, 10, 4);
  CHECK(s.x_extent() == Approx(8));
  CHECK(s.y_extent() == Approx(8));

  // One vertical line at x=2 (intensity 1.5), one horizontal at y=7 (intensity -1).
  Drawing dr;
  dr.a = dr.b = 10;
  dr.segments = {{{2, 0}, {2, 10}, Orientation::Vertical, 1.5}, {{0, 7}, {10, 7}, Orientation::Horizontal, -1}};
  const CutHits h = intersect(dr, slope_cut(10, 10, 1));
  REQUIRE(h.vertical.size() == 1);
  CHECK(h.vertical[0].position == Approx(2));
  CHECK(h.vertical[0].intensity == 1.5);
  REQUIRE(h.horizontal.size() == 1);
  CHECK(h.horizontal[0].position == Approx(3));
  CHECK(h.horizontal[0].intensity == -1);
}

TEST_CASE("Gaussian ensemble passes every suite; the corrupted dynamics does not") {
  const auto p = normal_preset(0.4, 0.4, 0.1);
  EnsembleSpec spec;
  spec.a = spec.b = 20;
  spec.replicas = 120;
  spec.seed = 4;
  spec.cuts = {slope_cut(20, 20, 1), slope_cut(20, 20, INFINITY), staircase_cut(20, 20, 3)};
  const Ensemble e = run_ensemble(p, spec);
  const auto exits = test_exit_processes(e);
  const auto cuts = test_cross_section(e);
  const auto rev = test_reversibility(e);
  const auto means = test_mean_counts(e);
  CHECK_MESSAGE(all_passed(exits), format_text(exits));
  CHECK_MESSAGE(all_passed(cuts), format_text(cuts));
  CHECK_MESSAGE(all_passed(rev), format_text(rev));
  CHECK_MESSAGE(all_passed(means), format_text(means));

  SimulationOptions bad;
  bad.vertical_turn_factor = 2.0;
  CHECK(any_failed(test_exit_processes(p, 20, 20, 120, 4, {}, bad)));
  CHECK(any_failed(test_reversibility(p, 20, 20, 120, 4, {}, bad)));
}

TEST_CASE("vertical cut reduces to the exit law of a narrower box") {
  const auto r = test_cross_section(normal_preset(0.4, 0.4, 0.1), 20, 20, INFINITY, 100, 2);
  CHECK_MESSAGE(all_passed(r), format_text(r));
  bool saw = false;
  for (const auto& x : r)
    if (x.name == "slope inf horizontal count mean") {
      saw = true;
      CHECK(x.reference == Approx(20));
    }
  CHECK(saw);
}

TEST_CASE("grid model: exits are the entries and the census is a product") {
  const auto p = grid();
  EnsembleSpec spec;
  spec.a = spec.b = 6;
  spec.replicas = 60;
  const Ensemble e = run_ensemble(p, spec);
  for (const auto& r : e.replicas)
    CHECK(count(r.census, NodeKind::CC) == count(r.census, NodeKind::VE) * count(r.census, NodeKind::HE));
  CHECK(all_passed(test_exit_processes(e)));
  CHECK(all_passed(test_reversibility(e)));
  CHECK(all_passed(test_mean_counts(e)));
}

TEST_CASE("Hammersley means and atomic intensity laws") {
  const auto h = preset("hammersley");
  const auto r = test_mean_counts(h.params, 10, 10, 200, 3);
  CHECK_MESSAGE(all_passed(r), format_text(r));
  const auto x = test_exit_processes(preset("neggeom-geom").params, 12, 12, 150, 5);
  CHECK_MESSAGE(all_passed(x), format_text(x));
  // Atomic with turns but no annihilation: the face-count mean applies.
  const auto pm = test_mean_counts(preset("poisson").params, 8, 8, 150, 6);
  CHECK_MESSAGE(all_passed(pm), format_text(pm));
  CHECK(std::any_of(pm.begin(), pm.end(), [](const StatReport& s) { return s.name.rfind("faces", 0) == 0; }));
}

TEST_CASE("face limits: per-face means approach the limits") {
  EnsembleSpec spec;
  spec.a = spec.b = 60;
  spec.replicas = 10;
  spec.reversibility = false;
  const Ensemble e = run_ensemble(normal_preset(0.25, 0.25, 0), spec);
  const auto r = test_face_limits(e);
  for (const auto& x : r) {
    CAPTURE(x.name);
    if (x.name == "mean nodes per face") CHECK(x.observed == Approx(5.0).epsilon(0.02));
    if (x.name.find("corners") != std::string::npos) CHECK(x.observed == Approx(4.0));
  }
}

TEST_CASE("tilting both densities by r^s leaves rates and kernels unchanged") {
  const auto base = gaussian(0.4, 0.4, 0.1);
  for (double r : {0.5, 3.0}) {
    CAPTURE(r);
    const double shift = std::log(r);  // r^s φ(s) ∝ φ(s - log r)
    PksParams t = base;
    const auto tilted = [r](double s) {
      return std::pow(r, s) * std::exp(-s * s / 2) / std::sqrt(2 * std::numbers::pi);
    };
    t.vertical = measures::from_density(tilted, shift - 14, shift + 14, "tilted");
    t.horizontal = measures::from_density(tilted, shift - 14, shift + 14, "tilted");
    for (double s = -3; s <= 3; s += 0.25) {
      CAPTURE(s);
      CHECK(split_rate_vertical(t, s) == Approx(split_rate_vertical(base, s)).epsilon(1e-6));
      CHECK(split_rate_horizontal(t, s) == Approx(split_rate_horizontal(base, s)).epsilon(1e-6));
      CHECK(turn_rate_vertical(t, s) == Approx(turn_rate_vertical(base, s)).epsilon(1e-6));
    }
    for (double s : {-1.0, 0.5, 2.0}) {
      const CrossingKernelTable k0(base.vertical, base.horizontal, s), k1(t.vertical, t.horizontal, s);
      for (double u = s / 2 - 1.5; u <= s / 2 + 1.5; u += 0.5) CHECK(k1.cdf(u) == Approx(k0.cdf(u)).epsilon(1e-5));
    }
  }
}

TEST_CASE("preset checks report closed-form agreement") {
  for (const auto& name : preset_names()) {
    CAPTURE(name);
    const auto m = preset(name);
    const auto rates = test_rates(m);
    CHECK_MESSAGE(all_passed(rates), format_text(rates));
    const auto k = test_kernels(m, 5000, 1);
    CHECK_MESSAGE(all_passed(k), format_text(k));
  }
}
