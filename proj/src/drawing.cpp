#include "pks/drawing.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace pks {

namespace {

constexpr const char* kKindNames[kNodeKinds] = {"VE", "VS", "HE", "HS", "HB", "HT", "HA",
                                                "VB", "VT", "VA", "CC", "OB", "OA"};

int mask_of(const Node& n) {
  int m = 0;
  for (int d = 0; d < 4; ++d)
    if (n.adjacent[d] >= 0) m |= 1 << d;
  return m;
}

}  // namespace

const char* to_string(NodeKind k) { return kKindNames[static_cast<int>(k)]; }

std::optional<NodeKind> node_kind_from_string(const std::string& s) {
  for (int i = 0; i < kNodeKinds; ++i)
    if (s == kKindNames[i]) return static_cast<NodeKind>(i);
  return std::nullopt;
}

NodeKind rotated(NodeKind k) {
  switch (k) {
    case NodeKind::VE: return NodeKind::VS;
    case NodeKind::VS: return NodeKind::VE;
    case NodeKind::HE: return NodeKind::HS;
    case NodeKind::HS: return NodeKind::HE;
    case NodeKind::HB: return NodeKind::HA;
    case NodeKind::HA: return NodeKind::HB;
    case NodeKind::VB: return NodeKind::VA;
    case NodeKind::VA: return NodeKind::VB;
    case NodeKind::HT: return NodeKind::VT;
    case NodeKind::VT: return NodeKind::HT;
    case NodeKind::OB: return NodeKind::OA;
    case NodeKind::OA: return NodeKind::OB;
    case NodeKind::CC: return NodeKind::CC;
  }
  return k;
}

ParseError::ParseError(std::size_t l, const std::string& what)
    : DrawingError("line " + std::to_string(l) + ": " + what), line(l) {}

std::optional<NodeKind> classify(const Node& n, double a, double b) {
  const Point p = n.position;
  switch (mask_of(n)) {
    case 0b0001: return p.y == 0 ? std::optional(NodeKind::VE) : std::nullopt;
    case 0b0100: return p.y == b ? std::optional(NodeKind::VS) : std::nullopt;
    case 0b0010: return p.x == 0 ? std::optional(NodeKind::HE) : std::nullopt;
    case 0b1000: return p.x == a ? std::optional(NodeKind::HS) : std::nullopt;
    case 0b0111: return NodeKind::HB;
    case 0b0110: return NodeKind::HT;
    case 0b1101: return NodeKind::HA;
    case 0b1011: return NodeKind::VB;
    case 0b1001: return NodeKind::VT;
    case 0b1110: return NodeKind::VA;
    case 0b1111: return NodeKind::CC;
    case 0b0011: return NodeKind::OB;
    case 0b1100: return NodeKind::OA;
    default: return std::nullopt;
  }
}

Census classify_nodes(const Drawing& d) {
  Census c{};
  for (std::size_t i = 0; i < d.nodes.size(); ++i) {
    const auto k = classify(d.nodes[i], d.a, d.b);
    if (!k)
      throw DrawingError("node " + std::to_string(i) + ": adjacency pattern matches no kind");
    if (*k != d.nodes[i].kind)
      throw DrawingError("node " + std::to_string(i) + ": stored kind " +
                         to_string(d.nodes[i].kind) + " but adjacency says " + to_string(*k));
    ++c[static_cast<int>(*k)];
  }
  return c;
}

Drawing rotate180(const Drawing& d) {
  Drawing r = d;
  for (Segment& s : r.segments) {
    const Point lo = s.lo, hi = s.hi;
    s.lo = {d.a - hi.x, d.b - hi.y};
    s.hi = {d.a - lo.x, d.b - lo.y};
  }
  for (Node& n : r.nodes) {
    n.position = {d.a - n.position.x, d.b - n.position.y};
    std::swap(n.adjacent[N], n.adjacent[S]);
    std::swap(n.adjacent[E], n.adjacent[W]);
    n.kind = rotated(n.kind);
  }
  return r;
}

std::vector<int> kirchhoff_violations(const Drawing& d, double tol) {
  std::vector<int> bad;
  const bool exact = d.kind == MeasureKind::Atomic;
  for (std::size_t i = 0; i < d.nodes.size(); ++i) {
    const Node& n = d.nodes[i];
    switch (n.kind) {
      case NodeKind::VE: case NodeKind::VS: case NodeKind::HE: case NodeKind::HS: continue;
      default: break;
    }
    const auto s = [&](Dir dir) {
      const int id = n.adjacent[dir];
      return id < 0 ? 0.0 : d.segments[static_cast<std::size_t>(id)].intensity;
    };
    const double in = s(S) + s(W), out = s(N) + s(E);
    if (exact ? in != out : !(std::abs(in - out) <= tol)) bad.push_back(static_cast<int>(i));
  }
  return bad;
}

CountingCheck counting_identities(const Drawing& d) {
  const Census c = classify_nodes(d);
  const auto k = [&](NodeKind kind) { return count(c, kind); };
  using K = NodeKind;
  CountingCheck r;
  r.vertical_starts = k(K::VE) + k(K::VB) + k(K::VT) + k(K::OB);
  r.vertical_ends = k(K::VS) + k(K::VA) + k(K::HT) + k(K::OA);
  r.horizontal_starts = k(K::HE) + k(K::HB) + k(K::HT) + k(K::OB);
  r.horizontal_ends = k(K::HS) + k(K::HA) + k(K::VT) + k(K::OA);
  r.half_edges = 2 * static_cast<long>(d.segments.size());
  r.weighted_degrees = (k(K::VE) + k(K::VS) + 2 * k(K::HT) + 3 * k(K::HB) + 3 * k(K::HA)) +
                       (k(K::HE) + k(K::HS) + 2 * k(K::VT) + 3 * k(K::VB) + 3 * k(K::VA)) +
                       4 * k(K::CC) + 2 * k(K::OB) + 2 * k(K::OA);
  return r;
}

void check_structure(const Drawing& d) {
  if (!(d.a > 0 && d.b > 0)) throw DrawingError("box sides must be positive");
  const auto inside = [&](Point p) { return p.x >= 0 && p.x <= d.a && p.y >= 0 && p.y <= d.b; };
  std::vector<int> lo_refs(d.segments.size(), 0), hi_refs(d.segments.size(), 0);
  for (std::size_t i = 0; i < d.segments.size(); ++i) {
    const Segment& s = d.segments[i];
    const bool ok = s.orientation == Orientation::Vertical ? (s.lo.x == s.hi.x && s.lo.y < s.hi.y)
                                                           : (s.lo.y == s.hi.y && s.lo.x < s.hi.x);
    if (!ok) throw DrawingError("segment " + std::to_string(i) + ": not an axis-aligned segment");
    if (!inside(s.lo) || !inside(s.hi))
      throw DrawingError("segment " + std::to_string(i) + ": leaves the box");
    if (!std::isfinite(s.intensity))
      throw DrawingError("segment " + std::to_string(i) + ": intensity not finite");
  }
  for (std::size_t i = 0; i < d.nodes.size(); ++i) {
    const Node& n = d.nodes[i];
    for (int dir = 0; dir < 4; ++dir) {
      const int id = n.adjacent[dir];
      if (id < 0) continue;
      if (static_cast<std::size_t>(id) >= d.segments.size())
        throw DrawingError("node " + std::to_string(i) + ": unknown segment " + std::to_string(id));
      const Segment& s = d.segments[static_cast<std::size_t>(id)];
      const bool vertical = dir == N || dir == S;
      const bool starts = dir == N || dir == E;
      if ((s.orientation == Orientation::Vertical) != vertical ||
          (starts ? s.lo : s.hi) != n.position)
        throw DrawingError("node " + std::to_string(i) + ": segment " + std::to_string(id) +
                           " does not end at the node");
      ++(starts ? lo_refs : hi_refs)[static_cast<std::size_t>(id)];
    }
  }
  for (std::size_t i = 0; i < d.segments.size(); ++i)
    if (lo_refs[i] != 1 || hi_refs[i] != 1)
      throw DrawingError("segment " + std::to_string(i) + ": endpoints not attached to nodes");
}

namespace {

void put(std::ostream& os, double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  os.write(buf, r.ptr - buf);
}

}  // namespace

void serialize(const Drawing& d, std::ostream& os) {
  os << "pks-drawing 1\n";
  os << "box ";
  put(os, d.a);
  os << ' ';
  put(os, d.b);
  os << "\nseed " << d.seed << "\n";
  {
    std::ostringstream hex;
    hex << std::hex << d.params_digest;
    os << "params " << hex.str() << "\n";
  }
  os << "kind " << to_string(d.kind) << "\nstep ";
  put(os, d.step);
  os << "\nsegments " << d.segments.size() << "\n";
  for (const Segment& s : d.segments) {
    os << (s.orientation == Orientation::Vertical ? 'V' : 'H');
    for (double v : {s.lo.x, s.lo.y, s.hi.x, s.hi.y, s.intensity}) {
      os << ' ';
      put(os, v);
    }
    os << '\n';
  }
  os << "nodes " << d.nodes.size() << "\n";
  for (const Node& n : d.nodes) {
    os << to_string(n.kind) << ' ';
    put(os, n.position.x);
    os << ' ';
    put(os, n.position.y);
    for (int id : n.adjacent) {
      if (id < 0) os << " -";
      else os << ' ' << id;
    }
    os << '\n';
  }
  os << "notes " << d.notes.size() << "\n";
  for (const auto& note : d.notes) os << note << '\n';
  os << "end\n";
}

std::string serialize(const Drawing& d) {
  std::ostringstream os;
  serialize(d, os);
  return os.str();
}

namespace {

class Reader {
 public:
  explicit Reader(const std::string& text) : in_(text) {}

  std::vector<std::string> fields(const char* what) {
    std::string line;
    if (!std::getline(in_, line)) throw ParseError(line_ + 1, std::string("truncated: expected ") + what);
    ++line_;
    std::istringstream ls(line);
    std::vector<std::string> out;
    for (std::string tok; ls >> tok;) out.push_back(tok);
    if (out.empty()) throw ParseError(line_, std::string("empty line, expected ") + what);
    return out;
  }

  std::string raw(const char* what) {
    std::string line;
    if (!std::getline(in_, line)) throw ParseError(line_ + 1, std::string("truncated: expected ") + what);
    ++line_;
    return line;
  }

  std::vector<std::string> keyed(const char* key, std::size_t nvalues) {
    auto f = fields(key);
    if (f[0] != key || f.size() != nvalues + 1)
      throw ParseError(line_, std::string("expected '") + key + "' with " +
                                  std::to_string(nvalues) + " value(s)");
    return f;
  }

  double number(const std::string& s) const {
    double v = 0;
    const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (r.ec != std::errc() || r.ptr != s.data() + s.size())
      throw ParseError(line_, "bad number '" + s + "'");
    return v;
  }

  template <class Int>
  Int integer(const std::string& s, int base = 10) const {
    Int v = 0;
    const auto r = std::from_chars(s.data(), s.data() + s.size(), v, base);
    if (r.ec != std::errc() || r.ptr != s.data() + s.size())
      throw ParseError(line_, "bad integer '" + s + "'");
    return v;
  }

  std::size_t line() const { return line_; }

 private:
  std::istringstream in_;
  std::size_t line_ = 0;
};

}  // namespace

Drawing deserialize(const std::string& text) {
  Reader r(text);
  Drawing d;
  {
    auto f = r.fields("header");
    if (f.size() != 2 || f[0] != "pks-drawing" || f[1] != "1")
      throw ParseError(r.line(), "not a pks-drawing version 1 document");
  }
  {
    auto f = r.keyed("box", 2);
    d.a = r.number(f[1]);
    d.b = r.number(f[2]);
  }
  d.seed = r.integer<std::uint64_t>(r.keyed("seed", 1)[1]);
  d.params_digest = r.integer<std::uint64_t>(r.keyed("params", 1)[1], 16);
  {
    auto f = r.keyed("kind", 1);
    if (f[1] == "atomic") d.kind = MeasureKind::Atomic;
    else if (f[1] == "continuous") d.kind = MeasureKind::Continuous;
    else throw ParseError(r.line(), "unknown kind '" + f[1] + "'");
  }
  d.step = r.number(r.keyed("step", 1)[1]);
  const auto nseg = r.integer<std::size_t>(r.keyed("segments", 1)[1]);
  d.segments.reserve(nseg);
  for (std::size_t i = 0; i < nseg; ++i) {
    auto f = r.fields("segment");
    if (f.size() != 6 || (f[0] != "V" && f[0] != "H"))
      throw ParseError(r.line(), "segment record needs V|H and 5 numbers");
    Segment s;
    s.orientation = f[0] == "V" ? Orientation::Vertical : Orientation::Horizontal;
    s.lo = {r.number(f[1]), r.number(f[2])};
    s.hi = {r.number(f[3]), r.number(f[4])};
    s.intensity = r.number(f[5]);
    d.segments.push_back(s);
  }
  const auto nnodes = r.integer<std::size_t>(r.keyed("nodes", 1)[1]);
  d.nodes.reserve(nnodes);
  for (std::size_t i = 0; i < nnodes; ++i) {
    auto f = r.fields("node");
    if (f.size() != 7) throw ParseError(r.line(), "node record needs kind, x, y and 4 slots");
    Node n;
    const auto k = node_kind_from_string(f[0]);
    if (!k) throw ParseError(r.line(), "unknown node kind '" + f[0] + "'");
    n.kind = *k;
    n.position = {r.number(f[1]), r.number(f[2])};
    for (int dir = 0; dir < 4; ++dir) {
      const std::string& t = f[static_cast<std::size_t>(3 + dir)];
      n.adjacent[static_cast<std::size_t>(dir)] = t == "-" ? -1 : r.integer<int>(t);
    }
    d.nodes.push_back(n);
  }
  const auto nnotes = r.integer<std::size_t>(r.keyed("notes", 1)[1]);
  for (std::size_t i = 0; i < nnotes; ++i) d.notes.push_back(r.raw("note"));
  if (r.fields("end")[0] != "end") throw ParseError(r.line(), "expected 'end'");

  check_structure(d);
  classify_nodes(d);
  if (const auto bad = kirchhoff_violations(d); !bad.empty())
    throw DrawingError("node " + std::to_string(bad.front()) + " violates Kirchhoff's law");
  return d;
}

Drawing load_drawing(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DrawingError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return deserialize(ss.str());
}

void save_drawing(const Drawing& d, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DrawingError("cannot write " + path);
  serialize(d, out);
}

}  // namespace pks
