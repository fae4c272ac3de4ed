#pragma once

#include <cstdint>
#include <map>
#include <queue>
#include <vector>

#include "pks/drawing.hpp"
#include "pks/measures.hpp"

namespace pks {

enum class Axis : std::uint8_t { X, Y };

struct BoundaryAtom {
  double coordinate = 0;
  double intensity = 0;
  Axis axis = Axis::X;
};

struct SpontaneousAtom {
  double x = 0, y = 0;
  double intensity = 0;  // the horizontal line gets t, the vertical one -t
};

struct BoundarySample {
  std::vector<BoundaryAtom> x_atoms;  // bottom side, vertical lines
  std::vector<BoundaryAtom> y_atoms;  // left side, horizontal lines
};

BoundarySample sample_boundary(const PksParams& p, double a, double b, Rng& rng);
std::vector<SpontaneousAtom> sample_spontaneous(const PksParams& p, double a, double b, Rng& rng);

struct SimulationOptions {
  /// Multiplies the vertical turn rate. Anything but 1 breaks stationarity;
  /// used only to check that the statistical tests can fail.
  double vertical_turn_factor = 1.0;
};

/// Upward sweep in y. Vertical lines are particles ordered by x; a horizontal
/// line is pushed to the right instantaneously at its y-level. Coordinates are
/// rounded to a dyadic quantum so that the half-turn of the box is exact.
class Sweep {
 public:
  Sweep(const PksParams& p, double a, double b, SimulationOptions opt = {});

  /// Vertical entry at (x, 0).
  void enter_vertical(double x, double s);
  /// Horizontal entry at (0, y), processed when the sweep reaches y.
  void enter_horizontal(double y, double s);
  /// Spontaneous creation at (x, y) with horizontal intensity t.
  void spontaneous(double x, double y, double t);

  /// Processes every event below y = b, closes the surviving lines as exits.
  Drawing run(Rng& rng);

  double quantum() const { return quantum_; }

  struct Particle {
    double intensity;
    double y0;        // start of the open segment
    int node;         // node the open segment starts from
    std::uint64_t token;
  };
  const std::map<double, Particle>& particles() const { return particles_; }

 private:
  enum EventKind : int { Entry = 0, Spawn = 1, Split = 2, Turn = 3 };
  struct Event {
    double y, x;
    int kind;
    std::uint64_t seq;
    std::uint64_t token;
    double s;
    bool operator>(const Event& o) const {
      if (y != o.y) return y > o.y;
      if (x != o.x) return x > o.x;
      if (kind != o.kind) return kind > o.kind;
      return seq > o.seq;
    }
  };

  double snap(double v) const;
  int add_node(double x, double y, NodeKind k);
  void close_vertical(double x, double y0, double y1, double s, int from, int to);
  void close_horizontal(double y, double x0, double x1, double s, int from, int to);
  void schedule(double x, Particle& part, Rng& rng);
  void propagate_horizontal(double x, double y, double s, int from, Rng& rng);
  double kernel(double s, Rng& rng);
  void note(std::string text);
  double free_x(double x);

  PksParams p_;
  double a_, b_, quantum_;
  SimulationOptions opt_;
  Drawing d_;
  std::map<double, Particle> particles_;
  std::priority_queue<Event, std::vector<Event>, std::greater<>> queue_;
  std::uint64_t seq_ = 0, token_ = 0;
  double last_level_ = 0;  // y of the last horizontal line started
};

/// One realization on [0,a]×[0,b]; a deterministic function of its arguments.
Drawing simulate(const PksParams& p, double a, double b, std::uint64_t seed,
                 const SimulationOptions& opt = {});

}  // namespace pks
