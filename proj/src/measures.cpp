#include "pks/measures.hpp"

#include <algorithm>
#include <boost/math/distributions/beta.hpp>
#include <boost/math/distributions/binomial.hpp>
#include <boost/math/distributions/exponential.hpp>
#include <boost/math/distributions/gamma.hpp>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/poisson.hpp>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>

#include "pks/quadrature.hpp"

namespace pks {

const char* to_string(MeasureKind k) {
  return k == MeasureKind::Atomic ? "atomic" : "continuous";
}

struct IntensityMeasure::Impl {
  MeasureKind kind = MeasureKind::Atomic;
  double mass = 1.0;
  std::string label;
  ContinuousLaw law;
  long first = 0;
  std::vector<double> masses;
  std::vector<double> cum;  // normalized cumulative masses
  double step = 1.0;
};

IntensityMeasure::IntensityMeasure() : IntensityMeasure(measures::dirac(0)) {}

IntensityMeasure::IntensityMeasure(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}

IntensityMeasure IntensityMeasure::continuous(ContinuousLaw law, double mass, std::string label) {
  if (!(mass > 0.0) || !std::isfinite(mass))
    throw ParameterError("measure '" + label + "': mass must be positive and finite");
  if (!(law.hi > law.lo)) throw ParameterError("measure '" + label + "': empty support");
  auto impl = std::make_shared<Impl>();
  impl->kind = MeasureKind::Continuous;
  impl->mass = mass;
  impl->label = std::move(label);
  impl->law = std::move(law);
  return IntensityMeasure(std::move(impl));
}

IntensityMeasure IntensityMeasure::atomic(long first, std::vector<double> masses, double step,
                                          std::string label) {
  if (!(step > 0.0)) throw ParameterError("measure '" + label + "': step must be positive");
  for (double m : masses)
    if (!(m >= 0.0) || !std::isfinite(m))
      throw ParameterError("measure '" + label + "': atom masses must be nonnegative");
  std::size_t b = 0, e = masses.size();
  while (b < e && masses[b] == 0.0) ++b;
  while (e > b && masses[e - 1] == 0.0) --e;
  if (b == e) throw ParameterError("measure '" + label + "': zero total mass");
  auto impl = std::make_shared<Impl>();
  impl->kind = MeasureKind::Atomic;
  impl->first = first + static_cast<long>(b);
  impl->masses.assign(masses.begin() + static_cast<long>(b), masses.begin() + static_cast<long>(e));
  impl->step = step;
  impl->label = std::move(label);
  double total = 0.0;
  impl->cum.reserve(impl->masses.size());
  for (double m : impl->masses) impl->cum.push_back(total += m);
  for (double& c : impl->cum) c /= total;
  impl->cum.back() = 1.0;
  impl->mass = total;
  return IntensityMeasure(std::move(impl));
}

MeasureKind IntensityMeasure::kind() const { return impl_->kind; }
double IntensityMeasure::mass() const { return impl_->mass; }
double IntensityMeasure::step() const { return impl_->step; }
const std::string& IntensityMeasure::label() const { return impl_->label; }
long IntensityMeasure::first_atom() const { return impl_->first; }
long IntensityMeasure::last_atom() const {
  return impl_->first + static_cast<long>(impl_->masses.size()) - 1;
}
const std::vector<double>& IntensityMeasure::atom_masses() const { return impl_->masses; }

double IntensityMeasure::density(double s) const {
  const Impl& m = *impl_;
  if (m.kind == MeasureKind::Continuous) {
    if (s < m.law.lo || s > m.law.hi) return 0.0;
    return m.mass * m.law.pdf(s);
  }
  if (s != std::floor(s)) return 0.0;
  const double i = s - static_cast<double>(m.first);
  if (i < 0 || i >= static_cast<double>(m.masses.size())) return 0.0;
  return m.masses[static_cast<std::size_t>(i)];
}

double IntensityMeasure::cdf(double s) const {
  const Impl& m = *impl_;
  if (m.kind == MeasureKind::Continuous) return m.law.cdf(s);
  const double i = std::floor(s) - static_cast<double>(m.first);
  if (i < 0) return 0.0;
  if (i >= static_cast<double>(m.masses.size())) return 1.0;
  return m.cum[static_cast<std::size_t>(i)];
}

double IntensityMeasure::sample(Rng& rng) const {
  const Impl& m = *impl_;
  if (m.kind == MeasureKind::Continuous) return m.law.sample(rng);
  const double u = uniform01(rng);
  const auto it = std::upper_bound(m.cum.begin(), m.cum.end(), u);
  const auto i = std::min<std::ptrdiff_t>(it - m.cum.begin(),
                                          static_cast<std::ptrdiff_t>(m.cum.size()) - 1);
  return static_cast<double>(m.first + i);
}

double IntensityMeasure::lo() const {
  return impl_->kind == MeasureKind::Continuous ? impl_->law.lo
                                                : static_cast<double>(first_atom());
}
double IntensityMeasure::hi() const {
  return impl_->kind == MeasureKind::Continuous ? impl_->law.hi
                                                : static_cast<double>(last_atom());
}

bool IntensityMeasure::in_support(double s) const {
  const Impl& m = *impl_;
  if (m.kind == MeasureKind::Continuous) return s >= m.law.support_lo && s <= m.law.support_hi;
  return density(s) > 0.0;
}

IntensityMeasure IntensityMeasure::negated() const {
  const Impl& m = *impl_;
  std::string label = m.label.empty() || m.label[0] != '-' ? "-" + m.label : m.label.substr(1);
  if (m.kind == MeasureKind::Atomic) {
    std::vector<double> r(m.masses.rbegin(), m.masses.rend());
    return atomic(-last_atom(), std::move(r), m.step, std::move(label));
  }
  ContinuousLaw law;
  const ContinuousLaw base = m.law;
  law.pdf = [base](double s) { return base.pdf(-s); };
  law.cdf = [base](double s) { return 1.0 - base.cdf(-s); };
  law.sample = [base](Rng& r) { return -base.sample(r); };
  law.lo = -base.hi;
  law.hi = -base.lo;
  law.support_lo = -base.support_hi;
  law.support_hi = -base.support_lo;
  return continuous(std::move(law), m.mass, std::move(label));
}

IntensityMeasure IntensityMeasure::with_mass(double mass) const {
  const Impl& m = *impl_;
  if (!(mass > 0.0) || !std::isfinite(mass))
    throw ParameterError("measure mass must be positive and finite");
  if (m.kind == MeasureKind::Continuous) return continuous(m.law, mass, m.label);
  std::vector<double> scaled = m.masses;
  for (double& x : scaled) x *= mass / m.mass;
  return atomic(m.first, std::move(scaled), m.step, m.label);
}

namespace measures {

namespace bm = boost::math;

namespace {

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(12);
  os << x;
  return os.str();
}

void require(bool ok, const std::string& what) {
  if (!ok) throw ParameterError(what);
}

}  // namespace

IntensityMeasure normal(double mean, double sd) {
  require(sd > 0 && std::isfinite(mean), "normal: need sd > 0");
  bm::normal_distribution<double> d(mean, sd);
  IntensityMeasure::ContinuousLaw law;
  law.pdf = [d](double x) { return bm::pdf(d, x); };
  law.cdf = [d](double x) { return bm::cdf(d, x); };
  law.sample = [mean, sd](Rng& r) { return mean + sd * standard_normal(r); };
  law.lo = mean - 38.5 * sd;
  law.hi = mean + 38.5 * sd;
  return IntensityMeasure::continuous(std::move(law), 1.0,
                                      "normal(" + fmt(mean) + "," + fmt(sd) + ")");
}

IntensityMeasure exponential(double rate) {
  require(rate > 0, "exponential: need rate > 0");
  IntensityMeasure::ContinuousLaw law;
  law.pdf = [rate](double x) { return x < 0 ? 0.0 : rate * std::exp(-rate * x); };
  law.cdf = [rate](double x) { return x <= 0 ? 0.0 : -std::expm1(-rate * x); };
  law.sample = [rate](Rng& r) { return pks::exponential(r, rate); };
  law.lo = 0.0;
  law.hi = 745.0 / rate;
  law.support_lo = 0.0;
  return IntensityMeasure::continuous(std::move(law), 1.0, "exponential(" + fmt(rate) + ")");
}

IntensityMeasure gamma(double shape, double scale) {
  require(shape > 0 && scale > 0, "gamma: need shape, scale > 0");
  bm::gamma_distribution<double> d(shape, scale);
  IntensityMeasure::ContinuousLaw law;
  law.pdf = [d, shape](double x) {
    if (x < 0 || (x == 0 && shape < 1)) return 0.0;
    return bm::pdf(d, x);
  };
  law.cdf = [d](double x) { return x <= 0 ? 0.0 : bm::cdf(d, x); };
  law.sample = [shape, scale](Rng& r) { return std::gamma_distribution<double>(shape, scale)(r); };
  law.lo = 0.0;
  law.hi = bm::quantile(bm::complement(d, 1e-300));
  law.support_lo = 0.0;
  return IntensityMeasure::continuous(std::move(law), 1.0,
                                      "gamma(" + fmt(shape) + "," + fmt(scale) + ")");
}

IntensityMeasure uniform(double lo, double hi) {
  require(hi > lo, "uniform: need lo < hi");
  IntensityMeasure::ContinuousLaw law;
  law.pdf = [lo, hi](double x) { return (x < lo || x > hi) ? 0.0 : 1.0 / (hi - lo); };
  law.cdf = [lo, hi](double x) { return x <= lo ? 0.0 : x >= hi ? 1.0 : (x - lo) / (hi - lo); };
  law.sample = [lo, hi](Rng& r) { return pks::uniform(r, lo, hi); };
  law.lo = lo;
  law.hi = hi;
  law.support_lo = lo;
  law.support_hi = hi;
  return IntensityMeasure::continuous(std::move(law), 1.0,
                                      "uniform(" + fmt(lo) + "," + fmt(hi) + ")");
}

IntensityMeasure beta(double a, double b) {
  require(a > 0 && b > 0, "beta: need a, b > 0");
  bm::beta_distribution<double> d(a, b);
  IntensityMeasure::ContinuousLaw law;
  law.pdf = [d, a, b](double x) {
    if (x < 0 || x > 1 || (x == 0 && a < 1) || (x == 1 && b < 1)) return 0.0;
    return bm::pdf(d, x);
  };
  law.cdf = [d](double x) { return x <= 0 ? 0.0 : x >= 1 ? 1.0 : bm::cdf(d, x); };
  law.sample = [a, b](Rng& r) {
    const double x = std::gamma_distribution<double>(a, 1.0)(r);
    const double y = std::gamma_distribution<double>(b, 1.0)(r);
    return x / (x + y);
  };
  law.lo = 0.0;
  law.hi = 1.0;
  law.support_lo = 0.0;
  law.support_hi = 1.0;
  return IntensityMeasure::continuous(std::move(law), 1.0, "beta(" + fmt(a) + "," + fmt(b) + ")");
}

IntensityMeasure from_density(std::function<double(double)> g, double lo, double hi,
                              std::string label) {
  require(hi > lo && std::isfinite(lo) && std::isfinite(hi), "density: need a finite support");
  const double mass = integrate(g, lo, hi);
  require(mass > 0 && std::isfinite(mass), "density '" + label + "': mass must be positive");
  auto table = std::make_shared<TabulatedLaw>(g, lo, hi);
  IntensityMeasure::ContinuousLaw law;
  law.pdf = [g, mass, lo, hi](double x) { return (x < lo || x > hi) ? 0.0 : g(x) / mass; };
  law.cdf = [table](double x) { return table->cdf(x); };
  law.sample = [table](Rng& r) { return table->quantile(uniform01(r)); };
  law.lo = lo;
  law.hi = hi;
  law.support_lo = lo;
  law.support_hi = hi;
  return IntensityMeasure::continuous(std::move(law), mass, std::move(label));
}

IntensityMeasure dirac(long atom, double step) {
  return IntensityMeasure::atomic(atom, {1.0}, step, "dirac(" + std::to_string(atom) + ")");
}

IntensityMeasure bernoulli(double p) {
  require(p > 0 && p < 1, "bernoulli: need 0 < p < 1");
  return IntensityMeasure::atomic(0, {1.0 - p, p}, 1.0, "bernoulli(" + fmt(p) + ")");
}

IntensityMeasure binomial(int n, double p) {
  require(n >= 1 && p > 0 && p < 1, "binomial: need n >= 1, 0 < p < 1");
  bm::binomial_distribution<double> d(n, p);
  std::vector<double> m(static_cast<std::size_t>(n) + 1);
  for (int k = 0; k <= n; ++k) m[static_cast<std::size_t>(k)] = bm::pdf(d, k);
  return IntensityMeasure::atomic(0, std::move(m), 1.0,
                                  "binomial(" + std::to_string(n) + "," + fmt(p) + ")");
}

IntensityMeasure geometric(double p, long start) {
  require(p > 0 && p <= 1, "geometric: need 0 < p <= 1");
  std::vector<double> m;
  double tail = 1.0;  // mass not yet emitted
  for (long k = 0; tail > 1e-13; ++k) {
    const double mk = p * std::pow(1.0 - p, static_cast<double>(k));
    m.push_back(mk);
    tail = std::pow(1.0 - p, static_cast<double>(k + 1));
    if (m.size() > 10'000'000) throw ParameterError("geometric: p too small to tabulate");
  }
  std::string label = "geometric(" + fmt(p) + ")";
  if (start != 0) label = "geometric(" + fmt(p) + "," + std::to_string(start) + ")";
  return IntensityMeasure::atomic(start, std::move(m), 1.0, std::move(label));
}

IntensityMeasure poisson(double lambda) {
  require(lambda > 0, "poisson: need lambda > 0");
  bm::poisson_distribution<double> d(lambda);
  std::vector<double> m;
  double acc = 0.0;
  for (long k = 0;; ++k) {
    const double mk = bm::pdf(d, static_cast<double>(k));
    m.push_back(mk);
    acc += mk;
    if (static_cast<double>(k) > lambda && bm::cdf(bm::complement(d, static_cast<double>(k))) < 1e-13)
      break;
  }
  return IntensityMeasure::atomic(0, std::move(m), 1.0, "poisson(" + fmt(lambda) + ")");
}

IntensityMeasure discrete_uniform(long lo, long hi) {
  require(hi >= lo, "discrete_uniform: need lo <= hi");
  const auto n = static_cast<std::size_t>(hi - lo + 1);
  return IntensityMeasure::atomic(lo, std::vector<double>(n, 1.0 / static_cast<double>(n)), 1.0,
                                  "discrete_uniform(" + std::to_string(lo) + "," +
                                      std::to_string(hi) + ")");
}

IntensityMeasure from_pmf(long first, std::vector<double> masses, double step) {
  std::string label = "pmf(" + std::to_string(first);
  for (double m : masses) label += "," + fmt(m);
  label += ")";
  return IntensityMeasure::atomic(first, std::move(masses), step, std::move(label));
}

}  // namespace measures

std::uint64_t params_digest(const PksParams& p) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : p.description) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

namespace {

void check_compatible(const IntensityMeasure& v, const IntensityMeasure& h) {
  if (v.kind() != h.kind())
    throw ParameterError(std::string("measures must share kind (vertical is ") +
                         to_string(v.kind()) + ", horizontal is " + to_string(h.kind()) + ")");
  if (v.atomic() && v.step() != h.step())
    throw ParameterError("atomic measures must share the lattice step");
}

// t-range on which g_V(s-t) g_H(t) can be non-zero.
std::pair<double, double> overlap(const IntensityMeasure& v, const IntensityMeasure& h, double s) {
  return {std::max(h.lo(), s - v.hi()), std::min(h.hi(), s - v.lo())};
}

}  // namespace

double convolution(const IntensityMeasure& v, const IntensityMeasure& h, double s) {
  check_compatible(v, h);
  if (v.atomic()) {
    if (s != std::floor(s)) return 0.0;
    const long k = static_cast<long>(s);
    const long j0 = std::max(h.first_atom(), k - v.last_atom());
    const long j1 = std::min(h.last_atom(), k - v.first_atom());
    double sum = 0.0;
    const auto& hv = h.atom_masses();
    const auto& vv = v.atom_masses();
    for (long j = j0; j <= j1; ++j)
      sum += vv[static_cast<std::size_t>(k - j - v.first_atom())] *
             hv[static_cast<std::size_t>(j - h.first_atom())];
    return sum;
  }
  const auto [lo, hi] = overlap(v, h, s);
  if (!(hi > lo)) return 0.0;
  return integrate([&](double t) { return v.density(s - t) * h.density(t); }, lo, hi);
}

double convolution_at(const PksParams& p, double s) {
  if (p.closed.convolution) return p.closed.convolution(s);
  return convolution(p.vertical, p.horizontal, s);
}

double split_rate_vertical(const PksParams& p, double s) {
  const double g = p.vertical.density(s);
  if (!(g > 0.0)) return 0.0;
  const double pv = p.pv(s);
  if (!(pv > 0.0)) return 0.0;
  return pv * convolution_at(p, s) / g;
}

double split_rate_horizontal(const PksParams& p, double s) {
  const double g = p.horizontal.density(s);
  if (!(g > 0.0)) return 0.0;
  const double ph = p.ph(s);
  if (!(ph > 0.0)) return 0.0;
  return ph * convolution_at(p, s) / g;
}

double turn_rate_vertical(const PksParams& p, double s) {
  const double gv = p.vertical.density(s), gh = p.horizontal.density(s);
  if (!(gv > 0.0) || !(gh > 0.0)) return 0.0;
  const double q = p.q(s);
  return q > 0.0 ? q * std::sqrt(gh / gv) : 0.0;
}

double turn_rate_horizontal(const PksParams& p, double s) {
  const double gv = p.vertical.density(s), gh = p.horizontal.density(s);
  if (!(gv > 0.0) || !(gh > 0.0)) return 0.0;
  const double q = p.q(s);
  return q > 0.0 ? q * std::sqrt(gv / gh) : 0.0;
}

CrossingKernelTable::CrossingKernelTable(const IntensityMeasure& v, const IntensityMeasure& h,
                                         double s) {
  check_compatible(v, h);
  atomic_ = v.atomic();
  if (atomic_) {
    if (s != std::floor(s)) throw InternalError("kernel: intensity off the lattice");
    const long k = static_cast<long>(s);
    const long j0 = std::max(h.first_atom(), k - v.last_atom());
    const long j1 = std::min(h.last_atom(), k - v.first_atom());
    double total = 0.0;
    for (long j = j0; j <= j1; ++j) {
      const double w = v.density(static_cast<double>(k - j)) * h.density(static_cast<double>(j));
      prob_.push_back(w);
      total += w;
    }
    if (!(total > 0.0)) throw InternalError("kernel: G(s) = 0, impossible event");
    for (double& w : prob_) w /= total;
    first_ = j0;
    cum_.reserve(prob_.size());
    double c = 0.0;
    for (double w : prob_) cum_.push_back(c += w);
    cum_.back() = 1.0;
    return;
  }
  const auto [lo, hi] = overlap(v, h, s);
  if (!(hi > lo)) throw InternalError("kernel: G(s) = 0, impossible event");
  TabulatedLaw law([&](double t) { return v.density(s - t) * h.density(t); }, lo, hi);
  if (!(law.total() > 0.0)) throw InternalError("kernel: G(s) = 0, impossible event");
  // Keep a compact copy of the table for sampling.
  grid_ = law.nodes();
  cum_.resize(grid_.size());
  for (std::size_t i = 0; i < grid_.size(); ++i) cum_[i] = law.cdf(grid_[i]);
  cum_.front() = 0.0;
  cum_.back() = 1.0;
}

double CrossingKernelTable::sample(Rng& rng) const {
  const double u = uniform01(rng);
  if (atomic_) {
    const auto it = std::upper_bound(cum_.begin(), cum_.end(), u);
    const auto i = std::min<std::ptrdiff_t>(it - cum_.begin(),
                                            static_cast<std::ptrdiff_t>(cum_.size()) - 1);
    return static_cast<double>(first_ + i);
  }
  const auto it = std::upper_bound(cum_.begin(), cum_.end(), u);
  if (it == cum_.begin()) return grid_.front();
  if (it == cum_.end()) return grid_.back();
  const std::size_t i = static_cast<std::size_t>(it - cum_.begin());
  const double dc = cum_[i] - cum_[i - 1];
  const double w = dc > 0 ? (u - cum_[i - 1]) / dc : 0.0;
  return grid_[i - 1] + w * (grid_[i] - grid_[i - 1]);
}

double CrossingKernelTable::cdf(double t) const {
  if (atomic_) {
    const double i = std::floor(t) - static_cast<double>(first_);
    if (i < 0) return 0.0;
    if (i >= static_cast<double>(cum_.size())) return 1.0;
    return cum_[static_cast<std::size_t>(i)];
  }
  if (t <= grid_.front()) return 0.0;
  if (t >= grid_.back()) return 1.0;
  const auto it = std::upper_bound(grid_.begin(), grid_.end(), t);
  const std::size_t i = static_cast<std::size_t>(it - grid_.begin());
  const double w = (t - grid_[i - 1]) / (grid_[i] - grid_[i - 1]);
  return cum_[i - 1] + w * (cum_[i] - cum_[i - 1]);
}

double crossing_kernel_sample(const PksParams& p, double s, Rng& rng) {
  if (p.closed.kernel) return p.closed.kernel(s, rng);
  if (p.atomic()) {
    // One pass for the total, one for the inversion; no allocation.
    const IntensityMeasure& v = p.vertical;
    const IntensityMeasure& h = p.horizontal;
    if (s != std::floor(s)) throw InternalError("kernel: intensity off the lattice");
    const long k = static_cast<long>(s);
    const long j0 = std::max(h.first_atom(), k - v.last_atom());
    const long j1 = std::min(h.last_atom(), k - v.first_atom());
    const auto w = [&](long j) {
      return v.density(static_cast<double>(k - j)) * h.density(static_cast<double>(j));
    };
    double total = 0.0;
    for (long j = j0; j <= j1; ++j) total += w(j);
    if (!(total > 0.0)) throw InternalError("kernel: G(s) = 0, impossible event");
    const double u = uniform01(rng) * total;
    double c = 0.0;
    long last = j0;
    for (long j = j0; j <= j1; ++j) {
      const double wj = w(j);
      if (wj <= 0.0) continue;
      last = j;
      c += wj;
      if (u < c) return static_cast<double>(j);
    }
    return static_cast<double>(last);
  }
  return CrossingKernelTable(p.vertical, p.horizontal, s).sample(rng);
}

std::string Violation::describe() const {
  std::ostringstream os;
  os << rule << " at " << locations.size() << " probed point(s)";
  if (!locations.empty()) {
    os << " (e.g. s=" << locations.front();
    if (locations.size() > 1) os << " .. s=" << locations.back();
    os << ")";
  }
  return os.str();
}

std::string ValidationResult::describe() const {
  if (ok()) return "ok";
  std::string out;
  for (const auto& v : violations) out += v.describe() + "\n";
  return out;
}

std::vector<double> probe_grid(const PksParams& p) {
  const IntensityMeasure& v = p.vertical;
  const IntensityMeasure& h = p.horizontal;
  std::vector<double> out;
  if (p.atomic()) {
    // Every lattice point that is an atom or a possible crossing sum.
    const long lo = std::min({v.first_atom(), h.first_atom(), v.first_atom() + h.first_atom()});
    const long hi = std::max({v.last_atom(), h.last_atom(), v.last_atom() + h.last_atom()});
    for (long k = lo; k <= hi; ++k) out.push_back(static_cast<double>(k));
    return out;
  }
  const double lo = std::min(v.lo(), h.lo());
  const double hi = std::max(v.hi(), h.hi());
  const int n = 10000;
  out.reserve(n);
  for (int i = 0; i < n; ++i) out.push_back(lo + (hi - lo) * i / (n - 1));
  return out;
}

ValidationResult validate(const PksParams& p) {
  ValidationResult res;
  if (p.vertical.kind() != p.horizontal.kind()) {
    res.violations.push_back({"measures of different kinds", {}});
    return res;
  }
  if (p.atomic() && p.vertical.step() != p.horizontal.step()) {
    res.violations.push_back({"atomic measures with different lattice steps", {}});
    return res;
  }
  std::map<std::string, std::vector<double>> found;
  const auto flag = [&](const std::string& rule, double s) {
    found[rule].push_back(s * p.step());
  };
  if (!(p.p_annihilation >= 0.0 && p.p_annihilation <= 1.0)) found["p_0 outside [0,1]"];
  if (!p.atomic() && p.p_annihilation != 0.0) found["p_0 must be 0 for continuous measures"];
  constexpr double eps = 1e-12;
  for (double s : probe_grid(p)) {
    const bool gv = p.vertical.in_support(s), gh = p.horizontal.in_support(s);
    const double pv = p.pv(s), ph = p.ph(s), q = p.q(s);
    if (!(pv >= 0.0 && pv <= 1.0)) flag("p_V outside [0,1]", s);
    if (!(ph >= 0.0 && ph <= 1.0)) flag("p_H outside [0,1]", s);
    if (!(q >= 0.0) || !std::isfinite(q)) flag("q negative or not finite", s);
    if (!gv && pv != 0.0) flag("p_V nonzero where g_V = 0", s);
    if (!gh && ph != 0.0) flag("p_H nonzero where g_H = 0", s);
    if ((!gv || !gh) && q != 0.0) flag("q nonzero where g_V or g_H = 0", s);
    if (p.atomic() && s == 0.0) {
      if (pv + ph + p.p_annihilation > 1.0 + eps) flag("p_V+p_H+p_0>1", s);
    } else if (pv + ph > 1.0 + eps) {
      flag("p_V+p_H>1", s);
    }
  }
  for (auto& [rule, locs] : found) res.violations.push_back({rule, std::move(locs)});
  return res;
}

}  // namespace pks
