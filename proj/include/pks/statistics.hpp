#pragma once

#include <array>
#include <atomic>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <thread>
#include <vector>

#include "pks/catalog.hpp"
#include "pks/drawing.hpp"
#include "pks/dynamics.hpp"
#include "pks/measures.hpp"

namespace pks {

// ---- oracles ------------------------------------------------------------------

/// Mean node census on [0,a]×[0,b] under the stationary law.
std::map<NodeKind, double> expected_node_counts(const PksParams& p, double a, double b);

/// Mean number of faces that touch neither the north nor the east side.
double expected_face_count(const PksParams& p, double a, double b);

struct FaceLimits {
  double nodes = 4, corners = 4;
};
/// Large-box limits of the mean node and corner counts of a face.
FaceLimits expected_face_limits(const PksParams& p);

// ---- reports ------------------------------------------------------------------

struct StatReport {
  enum class Mode {
    ZScore,     // |observed - reference| <= threshold · se
    PValue,     // p_value >= threshold
    Tolerance,  // |observed - reference| <= threshold
    Exact,      // observed == reference
  };
  std::string suite;
  std::string name;
  Mode mode = Mode::ZScore;
  double observed = 0;
  double reference = 0;
  std::string reference_text;  // the reference law, when there is one
  double se = 0;
  double p_value = 1;
  double threshold = 3;
  std::size_t samples = 0;

  double z() const;
  bool passed() const;
};

const char* to_string(StatReport::Mode m);

struct StatOptions {
  double level = 0.001;  // per suite, Bonferroni-corrected across its p-values
  double band = 3.0;     // standard errors allowed for means
  double tolerance = 0.1;  // face-limit means
};

/// Sets the threshold of every PValue report to level / (number of them).
void bonferroni(std::vector<StatReport>& reports, double level);

bool all_passed(const std::vector<StatReport>& reports);
std::string format_text(const std::vector<StatReport>& reports);
std::string format_json(const std::vector<StatReport>& reports, const std::string& description);

// ---- ensembles ----------------------------------------------------------------

/// Runs fn(index, seed) for index = 0..count-1 on up to `threads` workers
/// (0 = hardware concurrency) and returns the results in index order. The
/// seeds are replica_seed(master, index), so the output does not depend on
/// the thread count.
template <class T>
std::vector<T> map_replicas(std::size_t count, std::uint64_t master,
                            const std::function<T(std::size_t, std::uint64_t)>& fn,
                            unsigned threads = 0) {
  std::vector<T> out(count);
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(count, 1)));
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::atomic<bool> failed{false};
  const auto work = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count || failed) return;
      try {
        out[i] = fn(i, replica_seed(master, i));
      } catch (...) {
        if (!failed.exchange(true)) error = std::current_exception();
        return;
      }
    }
  };
  if (threads <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  if (error) std::rethrow_exception(error);
  return out;
}

/// A down-right polyline from the west/north sides to the south/east sides.
/// Vertical lines hit it at rate ν_V(ℝ) per unit of x-extent, horizontal lines
/// at ν_H(ℝ) per unit of y-extent.
struct Cut {
  std::string name;
  std::vector<Point> path;
  double x_extent() const;
  double y_extent() const;
  double length() const;
};

/// Straight cut of slope -alpha through the south-west corner region:
/// alpha = 0 is the horizontal mid-line, alpha = inf the vertical mid-line.
Cut slope_cut(double a, double b, double alpha);
/// Staircase of `steps` horizontal and `steps` vertical pieces.
Cut staircase_cut(double a, double b, int steps);

struct Hit {
  double position;  // x-extent (vertical hits) or y-extent (horizontal) travelled so far
  double intensity;
};
struct CutHits {
  std::vector<Hit> vertical, horizontal;
};
CutHits intersect(const Drawing& d, const Cut& cut);

struct FaceSummary {
  long inner = 0;     // faces touching neither north nor east
  long interior = 0;  // faces touching no side
  double nodes = 0, corners = 0;                             // sums over interior faces
  double area = 0, area_nodes = 0, area_corners = 0;         // area-weighted sums
};

/// Coordinates of the reversibility comparison, in a fixed order.
std::vector<std::string> statistic_names();
std::vector<double> statistic_vector(const Drawing& d);

/// Everything the tests need from one drawing.
struct ReplicaSummary {
  Census census{};
  std::vector<Hit> top, right;  // exits: x or y position, intensity
  FaceSummary faces;
  std::vector<CutHits> cuts;
  std::vector<double> forward, rotated;  // statistic_vector of d and of rotate180(d)
  bool kirchhoff_ok = true;
  bool counting_ok = true;
};

struct EnsembleSpec {
  double a = 10, b = 10;
  std::size_t replicas = 100;
  std::uint64_t seed = 1;
  unsigned threads = 0;
  SimulationOptions sim;
  bool faces = true;
  bool reversibility = true;
  std::vector<Cut> cuts;
};

struct Ensemble {
  PksParams params;
  EnsembleSpec spec;
  std::vector<ReplicaSummary> replicas;
};

ReplicaSummary summarize_replica(const Drawing& d, const EnsembleSpec& spec);
Ensemble run_ensemble(const PksParams& p, const EnsembleSpec& spec);

// ---- tests on an ensemble -------------------------------------------------------

/// Exit laws on the north and east sides: counts Poisson with the entry means,
/// positions uniform, intensities distributed as the entry measures, and the
/// two counts uncorrelated.
std::vector<StatReport> test_exit_processes(const Ensemble& e, const StatOptions& o = {});
/// The same laws for the hits of every cut of the ensemble.
std::vector<StatReport> test_cross_section(const Ensemble& e, const StatOptions& o = {});
/// Two-sample comparison of the statistic vector between the first half of
/// the ensemble and the half-turns of the second half.
std::vector<StatReport> test_reversibility(const Ensemble& e, const StatOptions& o = {});
/// Node census and face count means against the oracles.
std::vector<StatReport> test_mean_counts(const Ensemble& e, const StatOptions& o = {});
/// Interior-face node/corner means (area-biased and per face) against the limits.
std::vector<StatReport> test_face_limits(const Ensemble& e, const StatOptions& o = {});

// Convenience forms that build their own ensemble.
std::vector<StatReport> test_exit_processes(const PksParams& p, double a, double b,
                                            std::size_t replicas, std::uint64_t seed,
                                            const StatOptions& o = {},
                                            const SimulationOptions& sim = {});
std::vector<StatReport> test_cross_section(const PksParams& p, double a, double b,
                                           double alpha, std::size_t replicas,
                                           std::uint64_t seed, const StatOptions& o = {},
                                           const SimulationOptions& sim = {});
std::vector<StatReport> test_reversibility(const PksParams& p, double a, double b,
                                           std::size_t replicas, std::uint64_t seed,
                                           const StatOptions& o = {},
                                           const SimulationOptions& sim = {});
std::vector<StatReport> test_mean_counts(const PksParams& p, double a, double b,
                                         std::size_t replicas, std::uint64_t seed,
                                         const StatOptions& o = {},
                                         const SimulationOptions& sim = {});

// ---- tests on a preset ------------------------------------------------------------

/// Closed-form rate ratios against the generic convolution, 1e-6 relative.
std::vector<StatReport> test_rates(const ModelPreset& m, double rel_tol = 1e-6);
/// Generic-path kernel samples against the closed-form law at each kernel point.
std::vector<StatReport> test_kernels(const ModelPreset& m, std::size_t samples,
                                     std::uint64_t seed, const StatOptions& o = {});

}  // namespace pks
