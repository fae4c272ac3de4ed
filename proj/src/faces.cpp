#include "pks/faces.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>

namespace pks {

namespace {

struct HalfEdge {
  int from, to;
  int dir;
  int segment;  // -1 for a piece of the box side
  int side;     // Dir of the box side, -1 for segments
  int cycle = -1;
};

struct Graph {
  std::vector<Point> pos;
  std::vector<std::array<int, 4>> out;  // half-edge leaving each vertex, by direction
  std::vector<HalfEdge> he;

  int add_vertex(Point p) {
    pos.push_back(p);
    out.push_back({-1, -1, -1, -1});
    return static_cast<int>(pos.size()) - 1;
  }
  void add_edge(int u, int v, int dir, int segment, int side) {
    const int back = (dir + 2) % 4;
    out[static_cast<std::size_t>(u)][static_cast<std::size_t>(dir)] = static_cast<int>(he.size());
    he.push_back({u, v, dir, segment, side});
    out[static_cast<std::size_t>(v)][static_cast<std::size_t>(back)] = static_cast<int>(he.size());
    // The reverse of a box-side piece faces the outside; tag it with no side.
    he.push_back({v, u, back, segment, -1});
  }
};

Graph build_graph(const Drawing& d) {
  Graph g;
  const int n = static_cast<int>(d.nodes.size());
  for (const Node& node : d.nodes) g.add_vertex(node.position);
  const int c00 = g.add_vertex({0, 0}), ca0 = g.add_vertex({d.a, 0});
  const int cab = g.add_vertex({d.a, d.b}), c0b = g.add_vertex({0, d.b});

  std::vector<int> lo(d.segments.size(), -1), hi(d.segments.size(), -1);
  for (int i = 0; i < n; ++i) {
    const auto& adj = d.nodes[static_cast<std::size_t>(i)].adjacent;
    if (adj[N] >= 0) lo[static_cast<std::size_t>(adj[N])] = i;
    if (adj[E] >= 0) lo[static_cast<std::size_t>(adj[E])] = i;
    if (adj[S] >= 0) hi[static_cast<std::size_t>(adj[S])] = i;
    if (adj[W] >= 0) hi[static_cast<std::size_t>(adj[W])] = i;
  }
  for (std::size_t k = 0; k < d.segments.size(); ++k) {
    if (lo[k] < 0 || hi[k] < 0) throw DrawingError("segment " + std::to_string(k) + " is dangling");
    const bool vertical = d.segments[k].orientation == Orientation::Vertical;
    g.add_edge(lo[k], hi[k], vertical ? N : E, static_cast<int>(k), -1);
  }

  // Box sides, cut at the entry/exit nodes.
  const auto side = [&](int start, int end, NodeKind kind, bool by_x, int dir, int tag) {
    std::vector<int> vs;
    for (int i = 0; i < n; ++i)
      if (d.nodes[static_cast<std::size_t>(i)].kind == kind) vs.push_back(i);
    std::sort(vs.begin(), vs.end(), [&](int p, int q) {
      const Point a = g.pos[static_cast<std::size_t>(p)], b = g.pos[static_cast<std::size_t>(q)];
      return by_x ? a.x < b.x : a.y < b.y;
    });
    int prev = start;
    for (int v : vs) {
      g.add_edge(prev, v, dir, -1, tag);
      prev = v;
    }
    g.add_edge(prev, end, dir, -1, tag);
  };
  side(c00, ca0, NodeKind::VE, true, E, S);
  side(c0b, cab, NodeKind::VS, true, E, N);
  side(c00, c0b, NodeKind::HE, false, N, W);
  side(ca0, cab, NodeKind::HS, false, N, E);
  // Top and right sides are walked with the interior on the left in the
  // opposite direction; fix the tags so the interior half-edge carries them.
  for (auto& h : g.he) {
    if (h.segment >= 0) continue;
    const bool top = g.pos[static_cast<std::size_t>(h.from)].y == d.b &&
                     g.pos[static_cast<std::size_t>(h.to)].y == d.b;
    const bool right = g.pos[static_cast<std::size_t>(h.from)].x == d.a &&
                       g.pos[static_cast<std::size_t>(h.to)].x == d.a;
    const bool bottom = g.pos[static_cast<std::size_t>(h.from)].y == 0 &&
                        g.pos[static_cast<std::size_t>(h.to)].y == 0;
    const bool left = g.pos[static_cast<std::size_t>(h.from)].x == 0 &&
                      g.pos[static_cast<std::size_t>(h.to)].x == 0;
    h.side = -1;
    if (bottom && h.dir == E) h.side = S;
    if (top && h.dir == W) h.side = N;
    if (left && h.dir == S) h.side = W;
    if (right && h.dir == N) h.side = E;
  }
  return g;
}

int next_half_edge(const Graph& g, int h) {
  const HalfEdge& e = g.he[static_cast<std::size_t>(h)];
  const auto& out = g.out[static_cast<std::size_t>(e.to)];
  for (int turn : {3, 0, 1, 2}) {  // left, straight, right, back
    const int cand = out[static_cast<std::size_t>((e.dir + turn) % 4)];
    if (cand >= 0) return cand;
  }
  throw DrawingError("isolated vertex in face traversal");
}

struct Cycle {
  std::vector<int> edges;
  double area2 = 0;  // twice the signed area
  int corners = 0;
};

}  // namespace

FaceMap faces(const Drawing& d) {
  Graph g = build_graph(d);
  std::vector<Cycle> cycles;
  for (std::size_t h0 = 0; h0 < g.he.size(); ++h0) {
    if (g.he[h0].cycle >= 0) continue;
    Cycle c;
    const int id = static_cast<int>(cycles.size());
    int h = static_cast<int>(h0);
    do {
      g.he[static_cast<std::size_t>(h)].cycle = id;
      c.edges.push_back(h);
      const int nx = next_half_edge(g, h);
      if (g.he[static_cast<std::size_t>(nx)].dir != g.he[static_cast<std::size_t>(h)].dir &&
          (g.he[static_cast<std::size_t>(nx)].dir + 2) % 4 != g.he[static_cast<std::size_t>(h)].dir)
        ++c.corners;
      const Point p = g.pos[static_cast<std::size_t>(g.he[static_cast<std::size_t>(h)].from)];
      const Point q = g.pos[static_cast<std::size_t>(g.he[static_cast<std::size_t>(h)].to)];
      c.area2 += p.x * q.y - q.x * p.y;
      h = nx;
    } while (h != static_cast<int>(h0));
    cycles.push_back(std::move(c));
  }

  const int n = static_cast<int>(d.nodes.size());
  const int c00 = n;
  const int exterior = g.he[static_cast<std::size_t>(g.out[static_cast<std::size_t>(c00)][N])].cycle;

  // Positive cycles bound faces; negative ones (other than the exterior) are
  // outer boundaries of components floating inside a face.
  std::vector<int> face_of_cycle(cycles.size(), -1);
  FaceMap fm;
  for (std::size_t c = 0; c < cycles.size(); ++c) {
    if (static_cast<int>(c) == exterior || !(cycles[c].area2 > 0)) continue;
    face_of_cycle[c] = static_cast<int>(fm.faces.size());
    fm.faces.emplace_back();
  }

  // Resolve holes by a westward ray from the hole's leftmost vertical edge.
  std::vector<int> vertical_edges;  // north-going half-edges
  for (std::size_t h = 0; h < g.he.size(); ++h)
    if (g.he[h].dir == N) vertical_edges.push_back(static_cast<int>(h));
  const auto enclosing = [&](int cycle, auto&& self) -> int {
    if (face_of_cycle[static_cast<std::size_t>(cycle)] >= 0)
      return face_of_cycle[static_cast<std::size_t>(cycle)];
    double best_x = INFINITY;
    double ym = 0;
    for (int h : cycles[static_cast<std::size_t>(cycle)].edges) {
      const HalfEdge& e = g.he[static_cast<std::size_t>(h)];
      if (e.dir != N && e.dir != S) continue;
      const Point p = g.pos[static_cast<std::size_t>(e.from)], q = g.pos[static_cast<std::size_t>(e.to)];
      if (p.x < best_x) {
        best_x = p.x;
        ym = 0.5 * (p.y + q.y);
      }
    }
    int hit = -1;
    double hit_x = -INFINITY;
    for (int h : vertical_edges) {
      const HalfEdge& e = g.he[static_cast<std::size_t>(h)];
      const Point p = g.pos[static_cast<std::size_t>(e.from)], q = g.pos[static_cast<std::size_t>(e.to)];
      if (p.x < best_x && p.x > hit_x && p.y < ym && ym < q.y) {
        hit = h;
        hit_x = p.x;
      }
    }
    if (hit < 0) throw DrawingError("cannot locate the face around a floating component");
    // The south-going twin has the east side on its left.
    const int twin = g.out[static_cast<std::size_t>(g.he[static_cast<std::size_t>(hit)].to)][S];
    const int f = self(g.he[static_cast<std::size_t>(twin)].cycle, self);
    face_of_cycle[static_cast<std::size_t>(cycle)] = f;
    return f;
  };
  for (std::size_t c = 0; c < cycles.size(); ++c)
    if (static_cast<int>(c) != exterior && face_of_cycle[c] < 0)
      enclosing(static_cast<int>(c), enclosing);

  // Accumulate per-face measurements; outer cycles first so boundary[0] is outer.
  for (int pass = 0; pass < 2; ++pass) {
    for (std::size_t c = 0; c < cycles.size(); ++c) {
      if (static_cast<int>(c) == exterior) continue;
      const bool outer = cycles[c].area2 > 0;
      if (outer != (pass == 0)) continue;
      Face& f = fm.faces[static_cast<std::size_t>(face_of_cycle[c])];
      f.area += 0.5 * cycles[c].area2;
      f.nodes += static_cast<int>(cycles[c].edges.size());
      f.corners += cycles[c].corners;
      std::vector<Point> poly;
      poly.reserve(cycles[c].edges.size());
      for (int h : cycles[c].edges) {
        const HalfEdge& e = g.he[static_cast<std::size_t>(h)];
        poly.push_back(g.pos[static_cast<std::size_t>(e.from)]);
        if (e.side >= 0) f.touches[static_cast<std::size_t>(e.side)] = true;
      }
      if (outer) {
        f.anchor = *std::min_element(poly.begin(), poly.end(), [](Point a, Point b) {
          return a.y != b.y ? a.y < b.y : a.x < b.x;
        });
      }
      f.boundary.push_back(std::move(poly));
    }
  }

  fm.segment_faces.assign(d.segments.size(), {-1, -1});
  for (const HalfEdge& e : g.he) {
    if (e.segment < 0) continue;
    const int f = face_of_cycle[static_cast<std::size_t>(e.cycle)];
    // Left of a north/east half-edge is west/above; of a south/west one, east/below.
    auto& sf = fm.segment_faces[static_cast<std::size_t>(e.segment)];
    switch (e.dir) {
      case N: sf[0] = f; break;
      case S: sf[1] = f; break;
      case E: sf[1] = f; break;
      case W: sf[0] = f; break;
    }
  }
  fm.base = face_of_cycle[static_cast<std::size_t>(
      g.he[static_cast<std::size_t>(g.out[static_cast<std::size_t>(c00)][E])].cycle)];
  return fm;
}

PotentialMap potential(const Drawing& d, TraversalOrder order) {
  if (const auto bad = kirchhoff_violations(d); !bad.empty()) {
    const Node& n = d.nodes[static_cast<std::size_t>(bad.front())];
    throw InconsistentPotential("Kirchhoff's law fails at node " + std::to_string(bad.front()) +
                                " (" + to_string(n.kind) + " at " + std::to_string(n.position.x) +
                                "," + std::to_string(n.position.y) + ")");
  }
  PotentialMap pm;
  pm.map = faces(d);
  const auto& fs = pm.map.faces;
  struct Link {
    int to;
    double delta;
  };
  std::vector<std::vector<Link>> adj(fs.size());
  for (std::size_t k = 0; k < d.segments.size(); ++k) {
    const auto [lo_face, hi_face] = pm.map.segment_faces[k];
    const double s = d.physical(d.segments[k].intensity);
    // Vertical: v(east) = v(west) - s. Horizontal: v(above) = v(below) + s.
    const double delta = d.segments[k].orientation == Orientation::Vertical ? -s : s;
    adj[static_cast<std::size_t>(lo_face)].push_back({hi_face, delta});
    adj[static_cast<std::size_t>(hi_face)].push_back({lo_face, -delta});
  }
  const bool rows = order == TraversalOrder::RowMajor;
  const auto before = [&](const Link& p, const Link& q) {
    const Point a = fs[static_cast<std::size_t>(p.to)].anchor, b = fs[static_cast<std::size_t>(q.to)].anchor;
    if (rows) return a.y != b.y ? a.y < b.y : a.x < b.x;
    return a.x != b.x ? a.x < b.x : a.y < b.y;
  };
  for (auto& v : adj) std::stable_sort(v.begin(), v.end(), before);

  pm.value.assign(fs.size(), NAN);
  std::vector<char> seen(fs.size(), 0);
  std::deque<int> work{pm.map.base};
  pm.value[static_cast<std::size_t>(pm.map.base)] = 0.0;
  seen[static_cast<std::size_t>(pm.map.base)] = 1;
  while (!work.empty()) {
    int f;
    if (rows) {
      f = work.front();
      work.pop_front();
    } else {
      f = work.back();
      work.pop_back();
    }
    const double vf = pm.value[static_cast<std::size_t>(f)];
    for (const Link& l : adj[static_cast<std::size_t>(f)]) {
      const double target = vf + l.delta;
      double& vt = pm.value[static_cast<std::size_t>(l.to)];
      if (seen[static_cast<std::size_t>(l.to)]) {
        if (!(std::abs(vt - target) <= 1e-9 * std::max(1.0, std::abs(target))))
          throw InconsistentPotential("potential is path dependent around face " +
                                      std::to_string(l.to));
        continue;
      }
      vt = target;
      seen[static_cast<std::size_t>(l.to)] = 1;
      work.push_back(l.to);
    }
  }
  return pm;
}

long monotone_violations(const Drawing& d, const PotentialMap& pm, int transects, double tol) {
  long bad = 0;
  for (int j = 0; j < transects; ++j) {
    const double y = (j + 0.5) * d.b / transects;
    const double x = (j + 0.5) * d.a / transects;
    for (std::size_t k = 0; k < d.segments.size(); ++k) {
      const Segment& s = d.segments[k];
      const bool crosses = s.orientation == Orientation::Vertical ? (s.lo.y < y && y < s.hi.y)
                                                                  : (s.lo.x < x && x < s.hi.x);
      if (!crosses) continue;
      const auto [lo_face, hi_face] = pm.map.segment_faces[k];
      if (pm.value[static_cast<std::size_t>(hi_face)] < pm.value[static_cast<std::size_t>(lo_face)] - tol)
        ++bad;
    }
  }
  return bad;
}

}  // namespace pks
