#pragma once

#include <functional>
#include <limits>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "pks/rng.hpp"

namespace pks {

struct ParameterError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Raised when the simulation reaches a state that valid parameters cannot
/// produce (zero-probability kernel, intensity outside the support, ...).
struct InternalError : std::logic_error {
  using std::logic_error::logic_error;
};

enum class MeasureKind { Continuous, Atomic };

const char* to_string(MeasureKind k);

/// A finite non-zero measure on the real line.
///
/// Continuous measures carry a density; atomic ones a pmf on step·ℤ. For the
/// atomic kind every intensity in the library is expressed in lattice units
/// (integers held exactly in doubles) so sums of intensities are exact.
class IntensityMeasure {
 public:
  struct ContinuousLaw {
    std::function<double(double)> pdf;  // normalized
    std::function<double(double)> cdf;  // normalized
    std::function<double(Rng&)> sample;
    double lo = 0, hi = 0;  // finite support hint; pdf is negligible outside
    // Closed support; the pdf may underflow inside it but is zero outside.
    double support_lo = -std::numeric_limits<double>::infinity();
    double support_hi = std::numeric_limits<double>::infinity();
  };

  IntensityMeasure();  // unit Dirac at 0
  static IntensityMeasure continuous(ContinuousLaw law, double mass, std::string label);
  /// masses[i] is the mass of atom first+i. Trailing/leading zeros are trimmed.
  static IntensityMeasure atomic(long first, std::vector<double> masses, double step,
                                 std::string label);

  MeasureKind kind() const;
  bool atomic() const { return kind() == MeasureKind::Atomic; }
  double mass() const;
  double step() const;
  const std::string& label() const;

  /// g(s): density (continuous) or atom mass (atomic, s in lattice units).
  double density(double s) const;
  /// s in the closed support (an atom, for the atomic kind).
  bool in_support(double s) const;
  /// Normalized distribution function.
  double cdf(double s) const;
  /// Draw from ν/ν(ℝ).
  double sample(Rng& rng) const;

  /// Support hint [lo, hi] (lattice units when atomic).
  double lo() const;
  double hi() const;

  long first_atom() const;
  long last_atom() const;
  const std::vector<double>& atom_masses() const;

  IntensityMeasure negated() const;
  IntensityMeasure with_mass(double m) const;

 private:
  struct Impl;
  explicit IntensityMeasure(std::shared_ptr<const Impl> impl);
  std::shared_ptr<const Impl> impl_;
};

namespace measures {

// Continuous families (unit mass; use with_mass to rescale).
IntensityMeasure normal(double mean, double sd);
IntensityMeasure exponential(double rate);
IntensityMeasure gamma(double shape, double scale);
IntensityMeasure uniform(double lo, double hi);
IntensityMeasure beta(double a, double b);
/// Arbitrary nonnegative density on [lo, hi]; mass by quadrature, sampling by
/// tabulated inverse cdf.
IntensityMeasure from_density(std::function<double(double)> g, double lo, double hi,
                              std::string label);

// Atomic families. Bernoulli puts mass p on 1.
IntensityMeasure dirac(long atom, double step = 1.0);
IntensityMeasure bernoulli(double p);
IntensityMeasure binomial(int n, double p);
/// p(1-p)^(x-start) on {start, start+1, ...}.
IntensityMeasure geometric(double p, long start = 0);
IntensityMeasure poisson(double lambda);
IntensityMeasure discrete_uniform(long lo, long hi);
IntensityMeasure from_pmf(long first, std::vector<double> masses, double step = 1.0);

}  // namespace measures

using ScalarFn = std::function<double(double)>;

/// Optional fast paths a catalog family can attach. Both act on intensities in
/// the measures' own units.
struct ClosedForms {
  ScalarFn convolution;                          // G(s)
  std::function<double(double, Rng&)> kernel;    // T ~ f(s, ·)
};

struct PksParams {
  IntensityMeasure vertical;
  IntensityMeasure horizontal;
  ScalarFn p_vertical;    // of the physical intensity
  ScalarFn p_horizontal;
  ScalarFn turn;
  double p_annihilation = 0.0;
  ClosedForms closed;
  std::string description;

  MeasureKind kind() const { return vertical.kind(); }
  bool atomic() const { return vertical.atomic(); }
  double step() const { return vertical.step(); }
  /// Function values at an intensity given in measure units.
  double pv(double s) const { return p_vertical ? p_vertical(s * step()) : 0.0; }
  double ph(double s) const { return p_horizontal ? p_horizontal(s * step()) : 0.0; }
  double q(double s) const { return turn ? turn(s * step()) : 0.0; }
};

/// FNV-1a over the description; recorded in drawings.
std::uint64_t params_digest(const PksParams& p);

/// (ν_V ∗ ν_H) at s: density (continuous, adaptive quadrature) or atom mass
/// (atomic, exact sum).
double convolution(const IntensityMeasure& v, const IntensityMeasure& h, double s);
/// G(s) for the parameters, through the closed form when one is attached.
double convolution_at(const PksParams& p, double s);

double split_rate_vertical(const PksParams& p, double s);
double split_rate_horizontal(const PksParams& p, double s);
double turn_rate_vertical(const PksParams& p, double s);
double turn_rate_horizontal(const PksParams& p, double s);

/// Tabulated law f(s, ·) built from the densities alone (the generic path).
class CrossingKernelTable {
 public:
  CrossingKernelTable(const IntensityMeasure& v, const IntensityMeasure& h, double s);
  double sample(Rng& rng) const;
  double cdf(double t) const;
  bool atomic() const { return atomic_; }
  /// Atomic: first support atom and probabilities.
  long first() const { return first_; }
  const std::vector<double>& probabilities() const { return prob_; }
  std::size_t grid_points() const { return grid_.size(); }

 private:
  bool atomic_ = false;
  long first_ = 0;
  std::vector<double> prob_;
  std::vector<double> grid_, cum_;
};

/// T ~ f(s, ·): closed form if attached, else the generic table.
double crossing_kernel_sample(const PksParams& p, double s, Rng& rng);

struct Violation {
  std::string rule;
  std::vector<double> locations;  // physical intensities
  std::string describe() const;
};

struct ValidationResult {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
  std::string describe() const;
};

/// Probe-grid check of the positivity and probability constraints.
ValidationResult validate(const PksParams& p);

/// The probe points used by validate (measure units).
std::vector<double> probe_grid(const PksParams& p);

}  // namespace pks
