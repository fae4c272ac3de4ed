#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "pks/measures.hpp"

namespace pks {

enum class Orientation : std::uint8_t { Vertical, Horizontal };

/// Node taxonomy. Entries/exits live on the box sides; the rest are interior.
enum class NodeKind : std::uint8_t { VE, VS, HE, HS, HB, HT, HA, VB, VT, VA, CC, OB, OA };
inline constexpr int kNodeKinds = 13;

const char* to_string(NodeKind k);
std::optional<NodeKind> node_kind_from_string(const std::string& s);

/// Image of a kind under the half-turn of the box.
NodeKind rotated(NodeKind k);

/// Compass slots of Node::adjacent.
enum Dir : int { N = 0, E = 1, S = 2, W = 3 };

struct Point {
  double x = 0, y = 0;
  bool operator==(const Point&) const = default;
};

struct Segment {
  Point lo, hi;  // lo < hi along the segment's axis
  Orientation orientation = Orientation::Vertical;
  double intensity = 0;  // lattice units for atomic drawings
  bool operator==(const Segment&) const = default;
  double length() const { return (hi.x - lo.x) + (hi.y - lo.y); }
};

struct Node {
  Point position;
  NodeKind kind = NodeKind::CC;
  std::array<int, 4> adjacent{-1, -1, -1, -1};  // segment ids by Dir
  bool operator==(const Node&) const = default;
};

struct Drawing {
  double a = 1, b = 1;
  std::uint64_t seed = 0;
  std::uint64_t params_digest = 0;
  MeasureKind kind = MeasureKind::Continuous;
  double step = 1;  // physical value of one lattice unit (atomic kind)
  std::vector<Segment> segments;
  std::vector<Node> nodes;
  std::vector<std::string> notes;  // diagnostics recorded while simulating

  bool operator==(const Drawing&) const = default;
  double physical(double s) const { return kind == MeasureKind::Atomic ? s * step : s; }
};

struct DrawingError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ParseError : DrawingError {
  ParseError(std::size_t line, const std::string& what);
  std::size_t line;
};

using Census = std::array<long, kNodeKinds>;

inline long count(const Census& c, NodeKind k) { return c[static_cast<int>(k)]; }

/// Kind implied by the adjacency pattern (and side, for entries/exits).
std::optional<NodeKind> classify(const Node& n, double a, double b);

/// Classifies every node from its adjacency and returns the census. Throws
/// DrawingError when a pattern matches no kind or disagrees with the stored kind.
Census classify_nodes(const Drawing& d);

/// Half-turn about the box centre. Segment and node indices are preserved.
Drawing rotate180(const Drawing& d);

/// Nodes where s_S + s_W != s_N + s_E beyond `tol` (boundary nodes excluded).
/// Atomic drawings are checked exactly.
std::vector<int> kirchhoff_violations(const Drawing& d, double tol = 1e-9);

struct CountingCheck {
  long vertical_starts = 0, vertical_ends = 0;
  long horizontal_starts = 0, horizontal_ends = 0;
  long half_edges = 0;          // 2 · #segments
  long weighted_degrees = 0;    // node-degree sum by kind
  bool ok() const {
    return vertical_starts == vertical_ends && horizontal_starts == horizontal_ends &&
           half_edges == weighted_degrees;
  }
};

/// Line-balance and half-edge identities on the census.
CountingCheck counting_identities(const Drawing& d);

/// Structural checks: adjacency consistent with segment endpoints, segments
/// axis-aligned, non-degenerate and inside the box.
void check_structure(const Drawing& d);

/// Text document; numbers use shortest round-trip formatting.
std::string serialize(const Drawing& d);
void serialize(const Drawing& d, std::ostream& os);
/// Parses and validates (structure + Kirchhoff). Throws ParseError/DrawingError.
Drawing deserialize(const std::string& text);
Drawing load_drawing(const std::string& path);
void save_drawing(const Drawing& d, const std::string& path);

}  // namespace pks
