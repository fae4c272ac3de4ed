#include "pks/quadrature.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>

namespace pks {

double integrate(const std::function<double(double)>& f, double lo, double hi, int panels,
                 double rel_tol) {
  if (!(hi > lo)) return 0.0;
  using GK = boost::math::quadrature::gauss_kronrod<double, 15>;
  const double w = (hi - lo) / panels;
  double sum = 0.0;
  for (int i = 0; i < panels; ++i) {
    const double a = lo + i * w;
    const double b = (i + 1 == panels) ? hi : lo + (i + 1) * w;
    sum += GK::integrate(f, a, b, 12, rel_tol);
  }
  return sum;
}

namespace {

// Cumulative Simpson integral of f on a uniform grid of n cells.
void cumulate(const std::function<double(double)>& f, double lo, double hi, std::size_t n,
              std::vector<double>& x, std::vector<double>& c) {
  x.resize(n + 1);
  c.assign(n + 1, 0.0);
  const double h = (hi - lo) / static_cast<double>(n);
  double f0 = f(lo);
  x[0] = lo;
  for (std::size_t i = 1; i <= n; ++i) {
    x[i] = (i == n) ? hi : lo + h * static_cast<double>(i);
    const double xm = 0.5 * (x[i - 1] + x[i]);
    const double f1 = f(x[i]);
    c[i] = c[i - 1] + (x[i] - x[i - 1]) / 6.0 * (f0 + 4.0 * f(xm) + f1);
    f0 = f1;
  }
}

}  // namespace

TabulatedLaw::TabulatedLaw(const std::function<double(double)>& f, double lo, double hi,
                           double cdf_tol) {
  if (!(hi > lo)) {
    // Degenerate support: a point mass.
    x_ = {lo, lo};
    c_ = {0.0, 1.0};
    total_ = 0.0;
    return;
  }
  std::size_t n = 2048;
  std::vector<double> x, c;
  cumulate(f, lo, hi, n, x, c);
  if (!(c.back() > 0.0)) {
    x_ = {lo, hi};
    c_ = {0.0, 1.0};
    total_ = 0.0;
    return;
  }
  // Trim to the region that carries the mass.
  {
    const double t = c.back();
    std::size_t i0 = 0, i1 = n;
    while (i0 + 1 < n && c[i0 + 1] <= 1e-15 * t) ++i0;
    while (i1 > i0 + 1 && c[i1 - 1] >= (1 - 1e-15) * t) --i1;
    lo = x[i0];
    hi = x[i1];
  }
  cumulate(f, lo, hi, n, x, c);
  for (;;) {
    std::vector<double> x2, c2;
    cumulate(f, lo, hi, 2 * n, x2, c2);
    double diff = 0.0;
    for (std::size_t i = 0; i <= n; ++i)
      diff = std::max(diff, std::abs(c[i] / c.back() - c2[2 * i] / c2.back()));
    x = std::move(x2);
    c = std::move(c2);
    n *= 2;
    if (diff < cdf_tol || n >= (std::size_t{1} << 20)) break;
  }
  total_ = c.back();
  for (double& v : c) v /= total_;
  x_ = std::move(x);
  c_ = std::move(c);
}

double TabulatedLaw::cdf(double x) const {
  if (x_.empty() || x <= x_.front()) return 0.0;
  if (x >= x_.back()) return 1.0;
  const auto it = std::upper_bound(x_.begin(), x_.end(), x);
  const std::size_t i = static_cast<std::size_t>(it - x_.begin());
  const double w = (x - x_[i - 1]) / (x_[i] - x_[i - 1]);
  return c_[i - 1] + w * (c_[i] - c_[i - 1]);
}

double TabulatedLaw::quantile(double u) const {
  const auto it = std::upper_bound(c_.begin(), c_.end(), u);
  if (it == c_.begin()) return x_.front();
  if (it == c_.end()) return x_.back();
  const std::size_t i = static_cast<std::size_t>(it - c_.begin());
  const double dc = c_[i] - c_[i - 1];
  const double w = dc > 0 ? (u - c_[i - 1]) / dc : 0.0;
  return x_[i - 1] + w * (x_[i] - x_[i - 1]);
}

}  // namespace pks
