#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

#include "pks/drawing.hpp"
#include "pks/measures.hpp"

namespace pks {

/// A catalogued model that the simulator deliberately does not support.
struct OutOfScope : ParameterError {
  using ParameterError::ParameterError;
};

/// Closed-form law of the crossing kernel f(s, ·) at one intensity:
/// `shift` plus a draw from the family.
struct KernelLaw {
  enum class Family {
    Dirac,            // shift
    Bernoulli,        // shift + Ber(a)
    DiscreteUniform,  // uniform on {a, ..., b}
    Binomial,         // Bin(a, b)
    Geometric,        // shift + Geom(a) on {0, 1, ...}
    Normal,           // N(a, b) with b the variance
    Uniform,          // U[a, b]
    ScaledBeta,       // c · Beta(a, b)
    Exponential,      // shift + Exp(a)
  };
  Family family = Family::Dirac;
  double shift = 0, a = 0, b = 0, c = 0;

  bool discrete() const;
  /// P(T <= t).
  double cdf(double t) const;
  /// P(T = t), discrete families only.
  double pmf(long t) const;
  double sample(Rng& rng) const;
  std::string describe() const;
};

/// Preset arguments: name → expression text. Numbers accept constant
/// expressions; p_V, p_H and q accept functions of s; lists are
/// whitespace/comma separated.
using PresetArgs = std::map<std::string, std::string>;

struct ModelPreset {
  std::string name;
  std::string family;  // e.g. "N(0,1) / N(0,1)"
  PksParams params;

  /// Closed forms of λ_V/(ν_H(ℝ) p_V) and λ_H/(ν_V(ℝ) p_H), in measure units.
  /// Empty when the model has none. A "forced zero" side has no such ratio:
  /// its split rate itself vanishes wherever the line can live.
  ScalarFn rate_vertical, rate_horizontal;
  bool forced_zero_vertical = false, forced_zero_horizontal = false;
  std::string rate_vertical_text, rate_horizontal_text, kernel_text;

  /// Closed-form kernel; empty when the model has none.
  std::function<KernelLaw(double)> kernel;

  /// Where the closed forms are checked (measure units).
  std::vector<double> rate_points_vertical, rate_points_horizontal, kernel_points;

  /// supp ν_V ⊂ ℝ₋ and supp ν_H ⊂ ℝ₊: the potential is monotone.
  bool monotone = false;
};

struct PresetParameter {
  std::string name;
  std::string default_value;
  std::string help;
};

struct PresetInfo {
  std::string name;
  std::string family;
  std::string rate_vertical, rate_horizontal, kernel;
  std::vector<PresetParameter> parameters;
  bool in_scope = true;
  std::string note;
};

/// Every catalogued name, including the out-of-scope ones.
const std::vector<PresetInfo>& catalog_listing();
std::vector<std::string> preset_names();  // in-scope only

/// Builds and validates a preset. Throws ParameterError for unknown names or
/// arguments and OutOfScope for mixed continuous/atomic pairs.
ModelPreset preset(const std::string& name, const PresetArgs& args = {});

/// Multiplies p_V, p_H and q by the indicators of the supports they need
/// (g_V > 0, g_H > 0, both), as the positivity constraint requires.
void wrap_support(PksParams& p);

// ---- six-vertex export ------------------------------------------------------

enum class SixVertexVariant { BerBer, NegBerBer };

struct SixVertexConfig {
  int columns = 0, rows = 0;  // vertical lines × horizontal lines
  std::vector<int> type;      // row-major from the bottom-left, values 1..6
  std::array<double, 6> weight{};
  int at(int col, int row) const { return type[static_cast<std::size_t>(row * columns + col)]; }
};

/// Weights w_1..w_6 of the variant for the given Bernoulli parameters.
std::array<double, 6> six_vertex_weights(SixVertexVariant v, double q_v, double q_h);

/// Six-vertex type of a crossing from its four segment intensities.
int six_vertex_type(SixVertexVariant v, double s_west, double s_south, double s_east, double s_north);

/// Converts a pure-grid drawing (only crossings inside) into arrow types.
/// Throws DrawingError if the drawing has any other interior node.
SixVertexConfig six_vertex_export(const Drawing& d, SixVertexVariant v, double q_v, double q_h);

}  // namespace pks
