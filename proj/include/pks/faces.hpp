#pragma once

#include <array>
#include <vector>

#include "pks/drawing.hpp"

namespace pks {

/// A connected component of the box minus the lines.
struct Face {
  double area = 0;
  int nodes = 0;    // boundary vertex occurrences, box corners included
  int corners = 0;  // occurrences where the boundary turns by ±π/2
  std::array<bool, 4> touches{};  // box sides, indexed by Dir
  Point anchor;     // lowest, then leftmost, vertex of the outer boundary
  std::vector<std::vector<Point>> boundary;  // outer cycle first, then holes
  bool touches_north_or_east() const { return touches[N] || touches[E]; }
};

struct FaceMap {
  std::vector<Face> faces;
  /// Per segment: {face west of / below it, face east of / above it}.
  std::vector<std::array<int, 2>> segment_faces;
  int base = 0;  // the face at the origin corner
};

/// Planar subdivision by half-edge traversal (face kept on the left).
FaceMap faces(const Drawing& d);

struct InconsistentPotential : DrawingError {
  using DrawingError::DrawingError;
};

enum class TraversalOrder { RowMajor, ColumnMajor };

struct PotentialMap {
  FaceMap map;
  std::vector<double> value;  // per face; value[map.base] == 0
};

/// Face potential: +s crossing a horizontal segment upward, -s crossing a
/// vertical one rightward. RowMajor is breadth-first with neighbours visited
/// in (y, x) order; ColumnMajor is depth-first in (x, y) order.
PotentialMap potential(const Drawing& d, TraversalOrder order = TraversalOrder::RowMajor);

/// Number of decreases of the potential along `transects` horizontal and
/// `transects` vertical lines evenly spaced through the box.
long monotone_violations(const Drawing& d, const PotentialMap& pm, int transects = 64,
                         double tol = 1e-9);

}  // namespace pks
