#include <sstream>

#include "doctest.h"
#include "pks/drawing.hpp"
#include "pks/dynamics.hpp"

using namespace pks;

namespace {

PksParams busy_atomic() {
  PksParams p;
  p.vertical = measures::geometric(0.4).negated();
  p.horizontal = measures::geometric(0.5);
  p.p_vertical = [v = p.vertical](double s) { return v.in_support(s) ? 0.3 : 0.0; };
  p.p_horizontal = [h = p.horizontal](double s) { return h.in_support(s) ? 0.3 : 0.0; };
  p.turn = [](double s) { return s == 0 ? 0.4 : 0.0; };
  p.p_annihilation = 0.3;
  p.description = "busy";
  return p;
}

PksParams busy_continuous() {
  PksParams p;
  p.vertical = measures::normal(0, 1);
  p.horizontal = measures::normal(0.5, 2);
  p.p_vertical = [](double) { return 0.45; };
  p.p_horizontal = [](double) { return 0.45; };
  p.turn = [](double) { return 0.2; };
  p.description = "busy continuous";
  return p;
}

}  // namespace

TEST_CASE("rotation maps kinds as an involution") {
  for (int k = 0; k < kNodeKinds; ++k) {
    const auto nk = static_cast<NodeKind>(k);
    CHECK(rotated(rotated(nk)) == nk);
    CHECK(node_kind_from_string(to_string(nk)) == nk);
  }
  CHECK(rotated(NodeKind::HB) == NodeKind::HA);
  CHECK(rotated(NodeKind::VB) == NodeKind::VA);
  CHECK(rotated(NodeKind::HT) == NodeKind::VT);
  CHECK(rotated(NodeKind::OB) == NodeKind::OA);
  CHECK(rotated(NodeKind::VE) == NodeKind::VS);
  CHECK(rotated(NodeKind::HE) == NodeKind::HS);
  CHECK(rotated(NodeKind::CC) == NodeKind::CC);
  CHECK_FALSE(node_kind_from_string("XX").has_value());
}

TEST_CASE("half-turn of simulated drawings") {
  for (const auto& p : {busy_atomic(), busy_continuous()}) {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      const Drawing d = simulate(p, 5, 4, seed);
      const Drawing r = rotate180(d);
      CHECK(rotate180(r) == d);  // exact thanks to the dyadic grid
      CHECK_NOTHROW(check_structure(r));
      CHECK_NOTHROW(classify_nodes(r));
      CHECK(kirchhoff_violations(r).empty());
      CHECK(counting_identities(r).ok());
      const Census c = classify_nodes(d), cr = classify_nodes(r);
      for (int k = 0; k < kNodeKinds; ++k)
        CHECK(c[k] == cr[static_cast<int>(rotated(static_cast<NodeKind>(k)))]);
    }
  }
}

TEST_CASE("serialization round-trips exactly") {
  for (const auto& p : {busy_atomic(), busy_continuous()}) {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      const Drawing d = simulate(p, 3.7, 2.1, seed);
      const std::string text = serialize(d);
      const Drawing back = deserialize(text);
      CHECK(back == d);
      CHECK(serialize(back) == text);
    }
  }
}

TEST_CASE("parse errors carry the line number") {
  const Drawing d = simulate(busy_continuous(), 2, 2, 3);
  std::string text = serialize(d);
  CHECK_THROWS_AS(deserialize("pks-drawing 2\n"), ParseError);
  try {
    std::string bad = text;
    const auto pos = bad.find("box ");
    bad.replace(pos, 4, "bax ");
    deserialize(bad);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line == 2);
  }
  CHECK_THROWS_AS(deserialize(text.substr(0, text.size() / 2)), ParseError);
}

TEST_CASE("corrupted drawings fail validation on load") {
  Drawing d = simulate(busy_atomic(), 4, 4, 5);
  REQUIRE(!d.segments.empty());
  // Break Kirchhoff at an interior node by changing one intensity.
  int target = -1;
  for (std::size_t i = 0; i < d.nodes.size() && target < 0; ++i) {
    const NodeKind k = d.nodes[i].kind;
    if (k == NodeKind::CC || k == NodeKind::HB || k == NodeKind::VB) target = static_cast<int>(i);
  }
  if (target >= 0) {
    const int seg = d.nodes[target].adjacent[N] >= 0 ? d.nodes[target].adjacent[N] : d.nodes[target].adjacent[E];
    d.segments[seg].intensity += 1;
    CHECK_FALSE(kirchhoff_violations(d).empty());
    CHECK_THROWS_AS(deserialize(serialize(d)), DrawingError);
  }
  Drawing e = simulate(busy_atomic(), 4, 4, 5);
  e.nodes[0].kind = e.nodes[0].kind == NodeKind::CC ? NodeKind::HB : NodeKind::CC;
  CHECK_THROWS_AS(classify_nodes(e), DrawingError);
}

TEST_CASE("census identities on many drawings") {
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    const Drawing d = simulate(busy_atomic(), 6, 6, seed);
    const auto cc = counting_identities(d);
    CHECK(cc.ok());
    CHECK(cc.half_edges == 2 * static_cast<long>(d.segments.size()));
  }
}

TEST_CASE("single lines: census and half-turn") {
  PksParams p;
  p.vertical = measures::normal(0, 1);
  p.horizontal = measures::normal(0, 1);
  p.description = "single";
  Sweep sw(p, 2, 2);
  sw.enter_vertical(0.3, 0.7);
  Rng rng(1);
  const Drawing d = sw.run(rng);
  const Census c = classify_nodes(d);
  long total = 0;
  for (long n : c) total += n;
  CHECK(total == 2);
  CHECK(count(c, NodeKind::VE) == 1);
  CHECK(count(c, NodeKind::VS) == 1);
  const Drawing r = rotate180(d);
  REQUIRE(r.segments.size() == 1);
  CHECK(r.segments[0].lo.x == doctest::Approx(1.7));
  CHECK(r.segments[0].intensity == 0.7);
}
