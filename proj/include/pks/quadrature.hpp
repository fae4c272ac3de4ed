#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace pks {

/// ∫_lo^hi f, split into equal panels each integrated by adaptive
/// Gauss-Kronrod. Panelling keeps narrow peaks from being stepped over.
double integrate(const std::function<double(double)>& f, double lo, double hi,
                 int panels = 16, double rel_tol = 1e-10);

/// Piecewise-linear inverse-cdf table for an unnormalized density on [lo, hi].
/// The grid starts at 2048 cells and is doubled until the normalized cdf moves
/// by less than `cdf_tol` between refinements.
class TabulatedLaw {
 public:
  TabulatedLaw() = default;
  TabulatedLaw(const std::function<double(double)>& f, double lo, double hi,
               double cdf_tol = 1e-6);
  double total() const { return total_; }
  double cdf(double x) const;
  double quantile(double u) const;
  std::size_t size() const { return x_.size(); }
  const std::vector<double>& nodes() const { return x_; }

 private:
  std::vector<double> x_, c_;  // c_ normalized, c_.front()=0, c_.back()=1
  double total_ = 0;
};

}  // namespace pks
