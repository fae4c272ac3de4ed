#include <algorithm>

#include "doctest.h"
#include "pks/dynamics.hpp"
#include "pks/faces.hpp"

using namespace pks;
using doctest::Approx;

namespace {

PksParams deltas(long v, long h, double p0) {
  PksParams p;
  p.vertical = measures::dirac(v);
  p.horizontal = measures::dirac(h);
  p.p_annihilation = p0;
  p.description = "deltas";
  return p;
}

// A closed rectangle [1,3]x[1,2] in a 4x4 box: created at its lower-left
// corner, turning at the two side corners, annihilated at the upper right.
Drawing floating_rectangle() {
  Drawing d;
  d.a = d.b = 4;
  d.kind = MeasureKind::Atomic;
  auto seg = [&](Point lo, Point hi, Orientation o) {
    d.segments.push_back({lo, hi, o, 0.0});
    return static_cast<int>(d.segments.size()) - 1;
  };
  const int v1 = seg({1, 1}, {1, 2}, Orientation::Vertical);
  const int h1 = seg({1, 1}, {3, 1}, Orientation::Horizontal);
  const int v2 = seg({3, 1}, {3, 2}, Orientation::Vertical);
  const int h2 = seg({1, 2}, {3, 2}, Orientation::Horizontal);
  d.nodes.push_back({{1, 1}, NodeKind::OB, {v1, h1, -1, -1}});
  d.nodes.push_back({{3, 1}, NodeKind::VT, {v2, -1, -1, h1}});
  d.nodes.push_back({{1, 2}, NodeKind::HT, {-1, h2, v1, -1}});
  d.nodes.push_back({{3, 2}, NodeKind::OA, {-1, -1, v2, h2}});
  return d;
}

}  // namespace

TEST_CASE("empty box is one face") {
  Drawing d;
  d.a = 3;
  d.b = 2;
  const FaceMap fm = faces(d);
  REQUIRE(fm.faces.size() == 1);
  CHECK(fm.faces[0].area == Approx(6));
  CHECK(fm.faces[0].nodes == 4);
  CHECK(fm.faces[0].corners == 4);
  CHECK(fm.faces[0].touches_north_or_east());
}

TEST_CASE("one crossing splits the box in four") {
  Sweep sw(deltas(1, 2, 0), 4, 4);
  sw.enter_vertical(2, 1);
  sw.enter_horizontal(1, 2);
  Rng rng(1);
  const Drawing d = sw.run(rng);
  const FaceMap fm = faces(d);
  REQUIRE(fm.faces.size() == 4);
  std::vector<double> areas;
  for (const auto& f : fm.faces) {
    areas.push_back(f.area);
    CHECK(f.corners == 4);
  }
  std::sort(areas.begin(), areas.end());
  CHECK(areas == std::vector<double>{2, 2, 6, 6});
  const Face& base = fm.faces[fm.base];
  CHECK(base.area == Approx(2));
  CHECK(base.nodes == 4);  // corner, VE, CC, HE
  CHECK_FALSE(base.touches_north_or_east());
  CHECK(base.touches[S]);
  CHECK(base.touches[W]);

  const PotentialMap pm = potential(d);
  // Crossing the vertical eastward subtracts 1, the horizontal upward adds 2.
  std::vector<double> vals = pm.value;
  std::sort(vals.begin(), vals.end());
  CHECK(vals == std::vector<double>{-1, 0, 1, 2});
  CHECK(pm.value[fm.base] == 0);
  // A positive vertical makes the potential drop eastward on all 64 transects.
  CHECK(monotone_violations(d, pm) == 64);
  const PotentialMap col = potential(d, TraversalOrder::ColumnMajor);
  CHECK(col.value == pm.value);
}

TEST_CASE("negative verticals give a monotone potential") {
  Sweep sw(deltas(-1, 2, 0), 4, 4);
  sw.enter_vertical(2, -1);
  sw.enter_horizontal(1, 2);
  Rng rng(1);
  const Drawing d = sw.run(rng);
  const PotentialMap pm = potential(d);
  std::vector<double> vals = pm.value;
  std::sort(vals.begin(), vals.end());
  CHECK(vals == std::vector<double>{0, 1, 2, 3});
  CHECK(monotone_violations(d, pm) == 0);
}

TEST_CASE("a floating rectangle is a hole in the outer face") {
  const Drawing d = floating_rectangle();
  REQUIRE_NOTHROW(check_structure(d));
  REQUIRE_NOTHROW(classify_nodes(d));
  CHECK(counting_identities(d).ok());
  const FaceMap fm = faces(d);
  REQUIRE(fm.faces.size() == 2);
  const Face& outer = fm.faces[fm.base];
  CHECK(outer.area == Approx(14));
  CHECK(outer.boundary.size() == 2);
  const Face& inner = fm.faces[1 - fm.base];
  CHECK(inner.area == Approx(2));
  CHECK(inner.nodes == 4);
  CHECK(inner.corners == 4);
  CHECK_FALSE(inner.touches_north_or_east());
  CHECK(outer.nodes == 8);
  CHECK(outer.corners == 8);
}

TEST_CASE("potential is consistent on simulated drawings in both orders") {
  PksParams p;
  p.vertical = measures::geometric(0.4).negated();
  p.horizontal = measures::geometric(0.5);
  p.p_vertical = [v = p.vertical](double s) { return v.in_support(s) ? 0.3 : 0.0; };
  p.p_horizontal = [h = p.horizontal](double s) { return h.in_support(s) ? 0.3 : 0.0; };
  p.turn = [](double s) { return s == 0 ? 0.4 : 0.0; };
  p.p_annihilation = 0.3;
  p.description = "busy";
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const Drawing d = simulate(p, 6, 6, seed);
    const PotentialMap a = potential(d, TraversalOrder::RowMajor);
    const PotentialMap b = potential(d, TraversalOrder::ColumnMajor);
    CHECK(a.value == b.value);
    double total = 0;
    for (const auto& f : a.map.faces) total += f.area;
    CHECK(total == Approx(36).epsilon(1e-12));
  }
}

TEST_CASE("without turns or annihilation faces are rectangles closed by one merge node") {
  PksParams p;
  p.vertical = measures::geometric(0.4).negated();
  p.horizontal = measures::geometric(0.5);
  p.p_vertical = [v = p.vertical](double s) { return v.in_support(s) ? 0.3 : 0.0; };
  p.p_horizontal = [h = p.horizontal](double s) { return h.in_support(s) ? 0.3 : 0.0; };
  p.description = "no turns, no annihilation";
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const Drawing d = simulate(p, 6, 6, seed);
    const FaceMap fm = faces(d);
    const Census c = classify_nodes(d);
    long closed = 0;
    for (const auto& f : fm.faces) {
      CHECK(f.corners == 4 * static_cast<int>(f.boundary.size()));
      closed += f.touches_north_or_east() ? 0 : 1;
    }
    // Each face away from the north and east sides has its upper-right
    // corner at exactly one node with both a south and a west arm.
    CHECK(closed == count(c, NodeKind::HA) + count(c, NodeKind::VA) + count(c, NodeKind::CC) +
                        count(c, NodeKind::OA));
  }
}

TEST_CASE("broken Kirchhoff makes the potential inconsistent") {
  Sweep sw(deltas(1, 2, 0), 4, 4);
  sw.enter_vertical(2, 1);
  sw.enter_horizontal(1, 2);
  Rng rng(1);
  Drawing d = sw.run(rng);
  for (auto& s : d.segments)
    if (s.orientation == Orientation::Vertical && s.lo.y > 0) s.intensity = 5;
  CHECK_THROWS_AS(potential(d), InconsistentPotential);
}

TEST_CASE("two by two grid has nine faces") {
  Sweep sw(deltas(0, 0, 0), 3, 3);
  sw.enter_vertical(1, 0);
  sw.enter_vertical(2, 0);
  sw.enter_horizontal(1, 0);
  sw.enter_horizontal(2, 0);
  Rng rng(1);
  const FaceMap fm = faces(sw.run(rng));
  CHECK(fm.faces.size() == 9);
  for (const auto& f : fm.faces) CHECK(f.area == Approx(1));
}

TEST_CASE("potential jumps across single lines") {
  {
    Sweep sw(deltas(2, 0, 0), 4, 4);
    sw.enter_vertical(1.5, 2);
    Rng rng(1);
    const PotentialMap pm = potential(sw.run(rng));
    REQUIRE(pm.value.size() == 2);
    std::vector<double> v = pm.value;
    std::sort(v.begin(), v.end());
    CHECK(v == std::vector<double>{-2, 0});
    CHECK(pm.value[static_cast<std::size_t>(pm.map.base)] == 0);  // the west face
  }
  {
    Sweep sw(deltas(0, 1, 0), 4, 4);
    sw.enter_horizontal(2.5, 1);
    Rng rng(1);
    const PotentialMap pm = potential(sw.run(rng));
    REQUIRE(pm.value.size() == 2);
    std::vector<double> v = pm.value;
    std::sort(v.begin(), v.end());
    CHECK(v == std::vector<double>{0, 1});
  }
  Drawing empty;
  const PotentialMap pm = potential(empty);
  REQUIRE(pm.value.size() == 1);
  CHECK(pm.value[0] == 0);
}
