#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "pks/catalog.hpp"
#include "pks/dynamics.hpp"
#include "pks/statistics.hpp"

namespace pks {

/// Everything a command needs. Built from defaults, then the config file,
/// then command-line flags (later wins).
///
/// Config grammar (INI): `key = value` lines under `[model]`, `[run]`,
/// `[verify]` and `[simulation]`; `#` and `;` start comments.
///
///   [model]
///   preset = normal          ; a catalog name, with its arguments as further keys
///   mu_V = 0
///
///   [model]                  ; or an inline model
///   vertical = normal(0, 1)
///   horizontal = -exponential(1) * 2
///   p_V = 0.4
///   p_H = ind(s > 0) + 0.25 * ind(s == 0)
///   q = 0.1
///   p_0 = 0
///
///   [run]     a, b, seed, replicas, threads, output
///   [verify]  level, band, tolerance, alpha, steps, kernel_samples, report
///   [simulation] vertical_turn_factor
///
/// Measures: normal(mean, sd), exponential(rate), gamma(shape, scale),
/// uniform(lo, hi), beta(a, b), density(expr, lo, hi), dirac(atom),
/// bernoulli(p), binomial(n, p), geometric(p [, start]), poisson(lambda),
/// discrete_uniform(lo, hi), pmf(first, m0, m1, ...); a leading '-' negates,
/// a trailing '* m' sets the total mass. Functions use the expression grammar.
struct RunConfig {
  std::string preset;
  PresetArgs model;  // preset arguments, or the inline keys above

  double a = 20, b = 20;
  std::uint64_t seed = 1;
  std::size_t replicas = 1;
  unsigned threads = 0;
  std::string output;

  StatOptions stat;
  double alpha = 1;
  int steps = 4;
  std::size_t kernel_samples = 100000;
  std::string report = "report";

  SimulationOptions sim;
};

/// Reads an INI file into `cfg`. Throws ParameterError naming the line.
void load_config(const std::string& path, RunConfig& cfg);

/// Parses a measure expression such as "-exponential(1) * 2".
IntensityMeasure parse_measure(const std::string& text);

struct ResolvedModel {
  PksParams params;
  std::optional<ModelPreset> preset;
};

/// The preset, or the inline model with p_V, p_H, q restricted to the
/// supports; validated. Throws ParameterError.
ResolvedModel resolve_model(const RunConfig& cfg);

/// Runs the command line (without the program name). Exit codes: 0 success,
/// 1 a verification verdict failed, 2 usage, config or input error.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace pks
