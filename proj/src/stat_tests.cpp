#include "pks/stat_tests.hpp"

#include <algorithm>
#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace pks {

double kolmogorov_survival(double lambda) {
  if (!(lambda > 0)) return 1.0;
  if (lambda < 1.18) {
    // P(K <= l) = sqrt(2 pi)/l * sum exp(-(2k-1)^2 pi^2 / (8 l^2))
    const double c = std::numbers::pi * std::numbers::pi / (8 * lambda * lambda);
    double s = 0;
    for (int k = 1; k <= 20; ++k) {
      const double j = 2.0 * k - 1;
      s += std::exp(-j * j * c);
    }
    return std::clamp(1.0 - std::sqrt(2 * std::numbers::pi) / lambda * s, 0.0, 1.0);
  }
  double s = 0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    s += (k % 2 ? term : -term);
    if (term < 1e-300) break;
  }
  return std::clamp(2 * s, 0.0, 1.0);
}

double chi_square_survival(double x, double dof) {
  if (!(dof > 0)) return 1.0;
  if (!(x > 0)) return 1.0;
  return boost::math::cdf(boost::math::complement(boost::math::chi_squared_distribution<double>(dof), x));
}

double normal_two_sided(double z) {
  return std::erfc(std::abs(z) / std::numbers::sqrt2);
}

TestResult ks_one_sample(std::vector<double> x, const std::function<double(double)>& cdf) {
  TestResult r;
  if (x.empty()) return r;
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double d = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double f = cdf(x[i]);
    d = std::max({d, (static_cast<double>(i) + 1) / n - f, f - static_cast<double>(i) / n});
  }
  const double sn = std::sqrt(n);
  r.statistic = d;
  r.p_value = kolmogorov_survival((sn + 0.12 + 0.11 / sn) * d);
  return r;
}

TestResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
  TestResult r;
  if (a.empty() || b.empty()) return r;
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0;
  while (i < a.size() && j < b.size()) {
    const double v = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == v) ++i;
    while (j < b.size() && b[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  const double ne = std::sqrt(na * nb / (na + nb));
  r.statistic = d;
  r.p_value = kolmogorov_survival((ne + 0.12 + 0.11 / ne) * d);
  return r;
}

TestResult chi_square_gof(const std::vector<double>& observed, const std::vector<double>& probs,
                          double min_expected) {
  if (observed.size() != probs.size()) throw std::invalid_argument("chi_square_gof: size mismatch");
  double n = 0;
  for (double o : observed) n += o;
  std::vector<double> obs, exp;
  double o_acc = 0, e_acc = 0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    o_acc += observed[i];
    e_acc += probs[i] * n;
    if (e_acc >= min_expected) {
      obs.push_back(o_acc);
      exp.push_back(e_acc);
      o_acc = e_acc = 0;
    }
  }
  if (e_acc > 0 || o_acc > 0) {
    if (exp.empty()) {
      obs.push_back(o_acc);
      exp.push_back(e_acc);
    } else {
      obs.back() += o_acc;
      exp.back() += e_acc;
    }
  }
  TestResult r;
  for (std::size_t i = 0; i < obs.size(); ++i) {
    if (exp[i] > 0) r.statistic += (obs[i] - exp[i]) * (obs[i] - exp[i]) / exp[i];
    else if (obs[i] > 0) r.statistic = INFINITY;
  }
  r.dof = static_cast<double>(obs.size()) - 1;
  r.p_value = r.dof > 0 ? chi_square_survival(r.statistic, r.dof) : 1.0;
  if (std::isinf(r.statistic)) r.p_value = 0.0;
  return r;
}

TestResult dispersion_test(const std::vector<double>& counts) {
  TestResult r;
  const Summary s = summarize(counts);
  if (s.n < 2 || !(s.mean > 0)) return r;
  r.statistic = (static_cast<double>(s.n) - 1) * s.variance / s.mean;
  r.dof = static_cast<double>(s.n) - 1;
  const double upper = chi_square_survival(r.statistic, r.dof);
  r.p_value = std::min(1.0, 2 * std::min(upper, 1 - upper));
  return r;
}

double Summary::se() const { return n > 0 ? std::sqrt(variance / static_cast<double>(n)) : 0.0; }

Summary summarize(const std::vector<double>& x) {
  Summary s;
  s.n = x.size();
  if (x.empty()) return s;
  double m = 0;
  for (double v : x) m += v;
  m /= static_cast<double>(x.size());
  double ss = 0;
  for (double v : x) ss += (v - m) * (v - m);
  s.mean = m;
  s.variance = x.size() > 1 ? ss / static_cast<double>(x.size() - 1) : 0.0;
  return s;
}

double correlation(const std::vector<double>& x, const std::vector<double>& y) {
  const Summary sx = summarize(x), sy = summarize(y);
  if (sx.n != sy.n || sx.n < 2 || !(sx.variance > 0) || !(sy.variance > 0)) return 0.0;
  double c = 0;
  for (std::size_t i = 0; i < x.size(); ++i) c += (x[i] - sx.mean) * (y[i] - sy.mean);
  c /= static_cast<double>(x.size() - 1);
  return c / std::sqrt(sx.variance * sy.variance);
}

}  // namespace pks
