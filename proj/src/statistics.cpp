#include "pks/statistics.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>

#include "json.hpp"
#include "pks/faces.hpp"
#include "pks/quadrature.hpp"
#include "pks/stat_tests.hpp"

namespace pks {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct Integrals {
  double split_v = 0, split_h = 0;  // ∫ p_V G, ∫ p_H G
  double turn = 0;                  // ∫ q sqrt(g_V g_H)
  double creation = 0;              // p_0 G(0)
  double masses = 0;                // ν_V(ℝ) ν_H(ℝ)
};

Integrals integrals(const PksParams& p) {
  Integrals r;
  const auto& v = p.vertical;
  const auto& h = p.horizontal;
  r.masses = v.mass() * h.mass();
  if (p.atomic()) {
    for (long s = v.first_atom() + h.first_atom(); s <= v.last_atom() + h.last_atom(); ++s) {
      const double g = convolution(v, h, static_cast<double>(s));
      r.split_v += p.pv(s) * g;
      r.split_h += p.ph(s) * g;
    }
    for (long s = std::max(v.first_atom(), h.first_atom());
         s <= std::min(v.last_atom(), h.last_atom()); ++s)
      r.turn += p.q(s) * std::sqrt(v.density(s) * h.density(s));
    r.creation = p.p_annihilation * convolution(v, h, 0.0);
    return r;
  }
  const double lo = v.lo() + h.lo(), hi = v.hi() + h.hi();
  r.split_v = integrate([&](double s) { return p.pv(s) * convolution_at(p, s); }, lo, hi, 64);
  r.split_h = integrate([&](double s) { return p.ph(s) * convolution_at(p, s); }, lo, hi, 64);
  const double tlo = std::max(v.lo(), h.lo()), thi = std::min(v.hi(), h.hi());
  if (tlo < thi)
    r.turn = integrate([&](double s) { return p.q(s) * std::sqrt(v.density(s) * h.density(s)); },
                       tlo, thi, 64);
  return r;
}

}  // namespace

std::map<NodeKind, double> expected_node_counts(const PksParams& p, double a, double b) {
  const Integrals in = integrals(p);
  const double ab = a * b;
  std::map<NodeKind, double> m;
  m[NodeKind::VE] = m[NodeKind::VS] = a * p.vertical.mass();
  m[NodeKind::HE] = m[NodeKind::HS] = b * p.horizontal.mass();
  m[NodeKind::HB] = m[NodeKind::HA] = ab * in.split_v;
  m[NodeKind::VB] = m[NodeKind::VA] = ab * in.split_h;
  m[NodeKind::HT] = m[NodeKind::VT] = ab * in.turn;
  m[NodeKind::OB] = m[NodeKind::OA] = ab * in.creation;
  // Meetings happen at rate ν_V(ℝ)ν_H(ℝ) per unit area; the ones that are
  // neither coalescences nor annihilations are crossings.
  m[NodeKind::CC] = ab * (in.masses - in.split_v - in.split_h - in.creation);
  return m;
}

double expected_face_count(const PksParams& p, double a, double b) {
  return a * b * p.vertical.mass() * p.horizontal.mass();
}

FaceLimits expected_face_limits(const PksParams& p) {
  const Integrals in = integrals(p);
  FaceLimits f;
  f.nodes = 4 + 2 * (in.split_v + in.split_h + 2 * in.turn) / in.masses;
  f.corners = 4 + 4 * in.turn / in.masses;
  return f;
}

// ---- reports ------------------------------------------------------------------

double StatReport::z() const {
  if (mode != Mode::ZScore) return kNaN;
  const double d = observed - reference;
  if (se > 0) return d / se;
  return d == 0 ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), d);
}

bool StatReport::passed() const {
  switch (mode) {
    case Mode::ZScore: return std::abs(z()) <= threshold;
    case Mode::PValue: return p_value >= threshold;
    case Mode::Tolerance: return std::abs(observed - reference) <= threshold;
    case Mode::Exact: return observed == reference;
  }
  return false;
}

const char* to_string(StatReport::Mode m) {
  switch (m) {
    case StatReport::Mode::ZScore: return "z-score";
    case StatReport::Mode::PValue: return "p-value";
    case StatReport::Mode::Tolerance: return "tolerance";
    case StatReport::Mode::Exact: return "exact";
  }
  return "?";
}

void bonferroni(std::vector<StatReport>& reports, double level) {
  const auto m = std::count_if(reports.begin(), reports.end(),
                               [](const StatReport& r) { return r.mode == StatReport::Mode::PValue; });
  for (auto& r : reports)
    if (r.mode == StatReport::Mode::PValue) r.threshold = level / static_cast<double>(m);
}

bool all_passed(const std::vector<StatReport>& reports) {
  return std::all_of(reports.begin(), reports.end(), [](const StatReport& r) { return r.passed(); });
}

std::string format_text(const std::vector<StatReport>& reports) {
  std::ostringstream os;
  os << std::setprecision(6);
  for (const auto& r : reports) {
    os << (r.passed() ? "PASS " : "FAIL ") << r.suite << ": " << r.name << ": ";
    switch (r.mode) {
      case StatReport::Mode::ZScore:
        os << "observed " << r.observed << ", reference " << r.reference << ", se " << r.se
           << ", z " << r.z() << " (band " << r.threshold << ")";
        break;
      case StatReport::Mode::PValue:
        os << "statistic " << r.observed << " vs " << r.reference_text << ", p " << r.p_value
           << " (level " << r.threshold << ")";
        break;
      case StatReport::Mode::Tolerance:
        os << "observed " << r.observed << ", reference " << r.reference << " (tolerance "
           << r.threshold << ")";
        break;
      case StatReport::Mode::Exact:
        os << "observed " << r.observed << ", required " << r.reference;
        break;
    }
    if (r.samples) os << ", n = " << r.samples;
    os << "\n";
  }
  return os.str();
}

std::string format_json(const std::vector<StatReport>& reports, const std::string& description) {
  nlohmann::json doc;
  doc["format"] = "pks-report";
  doc["version"] = 1;
  doc["params"] = description;
  doc["passed"] = all_passed(reports);
  doc["reports"] = nlohmann::json::array();
  for (const auto& r : reports) {
    nlohmann::json j;
    j["suite"] = r.suite;
    j["name"] = r.name;
    j["mode"] = to_string(r.mode);
    j["observed"] = r.observed;
    j["reference"] = r.reference;
    if (!r.reference_text.empty()) j["reference_law"] = r.reference_text;
    if (r.mode == StatReport::Mode::ZScore) {
      j["se"] = r.se;
      j["z"] = r.z();
    }
    if (r.mode == StatReport::Mode::PValue) j["p_value"] = r.p_value;
    j["threshold"] = r.threshold;
    j["samples"] = r.samples;
    j["passed"] = r.passed();
    doc["reports"].push_back(std::move(j));
  }
  return doc.dump(2) + "\n";
}

// ---- cuts ---------------------------------------------------------------------

double Cut::x_extent() const {
  double e = 0;
  for (std::size_t i = 1; i < path.size(); ++i) e += path[i].x - path[i - 1].x;
  return e;
}

double Cut::y_extent() const {
  double e = 0;
  for (std::size_t i = 1; i < path.size(); ++i) e += path[i - 1].y - path[i].y;
  return e;
}

double Cut::length() const {
  double e = 0;
  for (std::size_t i = 1; i < path.size(); ++i)
    e += std::hypot(path[i].x - path[i - 1].x, path[i].y - path[i - 1].y);
  return e;
}

Cut slope_cut(double a, double b, double alpha) {
  std::ostringstream name;
  name << "slope " << alpha;
  if (alpha == 0) return {name.str(), {{0, b / 2}, {a, b / 2}}};
  if (std::isinf(alpha)) return {name.str(), {{a / 2, b}, {a / 2, 0}}};
  const double w = std::min(a, b / alpha);
  return {name.str(), {{0, alpha * w}, {w, 0}}};
}

Cut staircase_cut(double a, double b, int steps) {
  Cut c;
  c.name = "staircase " + std::to_string(steps);
  const double dx = a / (steps + 1), dy = b / (steps + 1);
  c.path.push_back({0, b - dy});
  for (int k = 1; k <= steps; ++k) {
    c.path.push_back({k * dx, b - k * dy});
    c.path.push_back({k * dx, b - (k + 1) * dy});
  }
  return c;
}

CutHits intersect(const Drawing& d, const Cut& cut) {
  CutHits hits;
  double cum_x = 0, cum_y = 0;
  for (std::size_t i = 1; i < cut.path.size(); ++i) {
    const Point p0 = cut.path[i - 1], p1 = cut.path[i];
    for (const Segment& s : d.segments) {
      if (s.orientation == Orientation::Vertical) {
        if (!(p0.x < p1.x)) continue;
        const double x = s.lo.x;
        if (x < p0.x || x >= p1.x) continue;
        const double y = p0.y + (x - p0.x) * (p1.y - p0.y) / (p1.x - p0.x);
        if (y >= s.lo.y && y < s.hi.y) hits.vertical.push_back({cum_x + (x - p0.x), s.intensity});
      } else {
        if (!(p0.y > p1.y)) continue;
        const double y = s.lo.y;
        if (y <= p1.y || y > p0.y) continue;
        const double x = p0.x + (p0.y - y) * (p1.x - p0.x) / (p0.y - p1.y);
        if (x >= s.lo.x && x < s.hi.x)
          hits.horizontal.push_back({cum_y + (p0.y - y), s.intensity});
      }
    }
    cum_x += p1.x - p0.x;
    cum_y += p0.y - p1.y;
  }
  const auto by_position = [](const Hit& l, const Hit& r) { return l.position < r.position; };
  std::sort(hits.vertical.begin(), hits.vertical.end(), by_position);
  std::sort(hits.horizontal.begin(), hits.horizontal.end(), by_position);
  return hits;
}

// ---- replica summaries ----------------------------------------------------------

namespace {

std::vector<Hit> exits(const Drawing& d, NodeKind kind) {
  std::vector<Hit> out;
  for (const Node& n : d.nodes) {
    if (n.kind != kind) continue;
    const bool top = kind == NodeKind::VS;
    const int seg = n.adjacent[top ? S : W];
    out.push_back({top ? n.position.x : n.position.y, d.segments[static_cast<std::size_t>(seg)].intensity});
  }
  std::sort(out.begin(), out.end(), [](const Hit& l, const Hit& r) { return l.position < r.position; });
  return out;
}

double quantile(const std::vector<Hit>& sorted, double q) {
  if (sorted.empty()) return kNaN;
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto i = static_cast<std::size_t>(std::floor(pos));
  const double f = pos - static_cast<double>(i);
  const double lo = sorted[i].position;
  const double hi = sorted[std::min(i + 1, sorted.size() - 1)].position;
  return lo + f * (hi - lo);
}

double mean_intensity(const std::vector<Hit>& h) {
  if (h.empty()) return kNaN;
  double t = 0;
  for (const auto& x : h) t += x.intensity;
  return t / static_cast<double>(h.size());
}

}  // namespace

std::vector<std::string> statistic_names() {
  std::vector<std::string> names;
  for (int k = 0; k < kNodeKinds; ++k) names.push_back(std::string("count ") + to_string(static_cast<NodeKind>(k)));
  for (const char* side : {"top", "right"})
    for (const char* q : {"q25", "q50", "q75"}) names.push_back(std::string(side) + " exit position " + q);
  names.push_back("top exit mean intensity");
  names.push_back("right exit mean intensity");
  names.push_back("vertical length");
  names.push_back("horizontal length");
  return names;
}

std::vector<double> statistic_vector(const Drawing& d) {
  std::vector<double> v;
  const Census c = classify_nodes(d);
  for (long n : c) v.push_back(static_cast<double>(n));
  const auto top = exits(d, NodeKind::VS), right = exits(d, NodeKind::HS);
  for (const auto* side : {&top, &right})
    for (double q : {0.25, 0.5, 0.75}) v.push_back(quantile(*side, q));
  v.push_back(mean_intensity(top));
  v.push_back(mean_intensity(right));
  double lv = 0, lh = 0;
  for (const auto& s : d.segments) (s.orientation == Orientation::Vertical ? lv : lh) += s.length();
  v.push_back(lv);
  v.push_back(lh);
  return v;
}

ReplicaSummary summarize_replica(const Drawing& d, const EnsembleSpec& spec) {
  ReplicaSummary r;
  r.census = classify_nodes(d);
  r.top = exits(d, NodeKind::VS);
  r.right = exits(d, NodeKind::HS);
  r.kirchhoff_ok = kirchhoff_violations(d).empty();
  r.counting_ok = counting_identities(d).ok();
  if (spec.faces) {
    const FaceMap fm = faces(d);
    for (const Face& f : fm.faces) {
      if (!f.touches_north_or_east()) ++r.faces.inner;
      if (f.touches[N] || f.touches[E] || f.touches[S] || f.touches[W]) continue;
      ++r.faces.interior;
      r.faces.nodes += f.nodes;
      r.faces.corners += f.corners;
      r.faces.area += f.area;
      r.faces.area_nodes += f.area * f.nodes;
      r.faces.area_corners += f.area * f.corners;
    }
  }
  for (const Cut& c : spec.cuts) r.cuts.push_back(intersect(d, c));
  if (spec.reversibility) {
    r.forward = statistic_vector(d);
    r.rotated = statistic_vector(rotate180(d));
  }
  return r;
}

Ensemble run_ensemble(const PksParams& p, const EnsembleSpec& spec) {
  const auto v = validate(p);
  if (!v.ok()) throw ParameterError("invalid parameters:\n" + v.describe());
  Ensemble e{p, spec, {}};
  e.replicas = map_replicas<ReplicaSummary>(
      spec.replicas, spec.seed,
      [&](std::size_t, std::uint64_t seed) {
        return summarize_replica(simulate(p, spec.a, spec.b, seed, spec.sim), spec);
      },
      spec.threads);
  return e;
}

// ---- report builders ------------------------------------------------------------

namespace {

StatReport mean_report(const std::string& suite, const std::string& name,
                       const std::vector<double>& values, double reference, double band,
                       double scale = 1.0) {
  const Summary s = summarize(values);
  StatReport r;
  r.suite = suite;
  r.name = name;
  r.mode = StatReport::Mode::ZScore;
  r.observed = s.mean / scale;
  r.reference = reference / scale;
  r.se = s.se() / scale;
  r.threshold = band;
  r.samples = s.n;
  return r;
}

StatReport p_report(const std::string& suite, const std::string& name, const TestResult& t,
                    const std::string& law, std::size_t n) {
  StatReport r;
  r.suite = suite;
  r.name = name;
  r.mode = StatReport::Mode::PValue;
  r.observed = t.statistic;
  r.p_value = t.p_value;
  r.reference_text = law;
  r.samples = n;
  return r;
}

StatReport correlation_report(const std::string& suite, const std::string& name,
                              const std::vector<double>& x, const std::vector<double>& y,
                              double band) {
  StatReport r;
  r.suite = suite;
  r.name = name;
  r.mode = StatReport::Mode::ZScore;
  r.observed = correlation(x, y);
  r.reference = 0;
  r.se = x.size() > 1 ? 1 / std::sqrt(static_cast<double>(x.size() - 1)) : 0.0;
  r.threshold = band;
  r.samples = x.size();
  return r;
}

StatReport exact_report(const std::string& suite, const std::string& name, double observed,
                        double required, std::size_t n) {
  StatReport r;
  r.suite = suite;
  r.name = name;
  r.mode = StatReport::Mode::Exact;
  r.observed = observed;
  r.reference = required;
  r.samples = n;
  return r;
}

std::string fmt(double x) {
  std::ostringstream os;
  os << std::setprecision(6) << x;
  return os.str();
}

/// Intensity law test of pooled hits against ν/ν(ℝ).
StatReport intensity_report(const std::string& suite, const std::string& name,
                            const std::vector<double>& xs, const IntensityMeasure& m) {
  if (!m.atomic()) {
    return p_report(suite, name, ks_one_sample(xs, [&](double t) { return m.cdf(t); }),
                    m.label(), xs.size());
  }
  const long lo = m.first_atom(), hi = m.last_atom();
  std::vector<double> counts(static_cast<std::size_t>(hi - lo + 1), 0.0), probs(counts.size());
  std::size_t outside = 0;
  for (double x : xs) {
    const long k = std::lround(x);
    if (k < lo || k > hi || static_cast<double>(k) != x) {
      ++outside;
      continue;
    }
    counts[static_cast<std::size_t>(k - lo)] += 1;
  }
  for (long k = lo; k <= hi; ++k) probs[static_cast<std::size_t>(k - lo)] = m.density(static_cast<double>(k)) / m.mass();
  TestResult t = chi_square_gof(counts, probs);
  if (outside) t.p_value = 0;  // an intensity off the support
  return p_report(suite, name, t, m.label(), xs.size());
}

/// Count, dispersion, position and intensity tests for one family of hits
/// (exits of one side, or the hits of one line family on a cut).
void hit_reports(std::vector<StatReport>& out, const std::string& suite, const std::string& label,
                 const std::vector<const std::vector<Hit>*>& per_replica, double extent,
                 const IntensityMeasure& m, const StatOptions& o, double length = 0) {
  std::vector<double> counts, positions, intensities;
  for (const auto* hits : per_replica) {
    counts.push_back(static_cast<double>(hits->size()));
    for (const Hit& h : *hits) {
      positions.push_back(h.position);
      intensities.push_back(h.intensity);
    }
  }
  const double expected = m.mass() * extent;
  out.push_back(mean_report(suite, label + " count mean", counts, expected, o.band));
  if (length > 0)
    out.push_back(mean_report(suite, label + " hits per unit length", counts, expected, o.band, length));
  if (expected > 0) {
    out.push_back(p_report(suite, label + " count dispersion", dispersion_test(counts),
                           "Poisson(" + fmt(expected) + ")", counts.size()));
    out.push_back(p_report(suite, label + " positions",
                           ks_one_sample(positions, [extent](double t) { return std::clamp(t / extent, 0.0, 1.0); }),
                           "Uniform[0, " + fmt(extent) + "]", positions.size()));
    out.push_back(intensity_report(suite, label + " intensities", intensities, m));
  }
}

std::vector<double> counts_of(const std::vector<const std::vector<Hit>*>& v) {
  std::vector<double> c;
  for (const auto* h : v) c.push_back(static_cast<double>(h->size()));
  return c;
}

}  // namespace

std::vector<StatReport> test_exit_processes(const Ensemble& e, const StatOptions& o) {
  std::vector<StatReport> out;
  std::vector<const std::vector<Hit>*> top, right;
  for (const auto& r : e.replicas) {
    top.push_back(&r.top);
    right.push_back(&r.right);
  }
  hit_reports(out, "exits", "top", top, e.spec.a, e.params.vertical, o);
  hit_reports(out, "exits", "right", right, e.spec.b, e.params.horizontal, o);
  out.push_back(correlation_report("exits", "top/right count correlation", counts_of(top),
                                   counts_of(right), o.band));
  bonferroni(out, o.level);
  return out;
}

std::vector<StatReport> test_cross_section(const Ensemble& e, const StatOptions& o) {
  std::vector<StatReport> out;
  for (std::size_t c = 0; c < e.spec.cuts.size(); ++c) {
    const Cut& cut = e.spec.cuts[c];
    std::vector<const std::vector<Hit>*> v, h;
    for (const auto& r : e.replicas) {
      v.push_back(&r.cuts[c].vertical);
      h.push_back(&r.cuts[c].horizontal);
    }
    const std::string suite = "cross-section";
    hit_reports(out, suite, cut.name + " vertical", v, cut.x_extent(), e.params.vertical, o, cut.length());
    hit_reports(out, suite, cut.name + " horizontal", h, cut.y_extent(), e.params.horizontal, o,
                cut.length());
    out.push_back(correlation_report(suite, cut.name + " vertical/horizontal count correlation",
                                     counts_of(v), counts_of(h), o.band));
  }
  bonferroni(out, o.level);
  return out;
}

std::vector<StatReport> test_reversibility(const Ensemble& e, const StatOptions& o) {
  std::vector<StatReport> out;
  const auto names = statistic_names();
  const std::size_t half = e.replicas.size() / 2;
  for (std::size_t k = 0; k < names.size(); ++k) {
    std::vector<double> fwd, rot;
    for (std::size_t i = 0; i < e.replicas.size(); ++i) {
      const auto& r = e.replicas[i];
      const double x = i < half ? r.forward.at(k) : r.rotated.at(k);
      if (std::isnan(x)) continue;
      (i < half ? fwd : rot).push_back(x);
    }
    if (fwd.empty() || rot.empty()) continue;
    out.push_back(p_report("reversibility", names[k], ks_two_sample(fwd, rot),
                           "same law under the half-turn", fwd.size() + rot.size()));
  }
  bonferroni(out, o.level);
  return out;
}

std::vector<StatReport> test_mean_counts(const Ensemble& e, const StatOptions& o) {
  std::vector<StatReport> out;
  const auto expected = expected_node_counts(e.params, e.spec.a, e.spec.b);
  const bool atomic = e.params.atomic();
  for (int k = 0; k < kNodeKinds; ++k) {
    const auto kind = static_cast<NodeKind>(k);
    if (!atomic && (kind == NodeKind::OB || kind == NodeKind::OA)) continue;
    std::vector<double> xs;
    for (const auto& r : e.replicas) xs.push_back(static_cast<double>(count(r.census, kind)));
    out.push_back(mean_report("means", std::string("count ") + to_string(kind), xs, expected.at(kind), o.band));
  }
  // With annihilation a face can have several north-east corners (staircases
  // of OA/OB nodes), so the face-count mean only applies without it.
  if (e.spec.faces && e.params.p_annihilation == 0) {
    std::vector<double> xs;
    for (const auto& r : e.replicas) xs.push_back(static_cast<double>(r.faces.inner));
    out.push_back(mean_report("means", "faces not touching north/east", xs,
                              expected_face_count(e.params, e.spec.a, e.spec.b), o.band));
  }
  double bad_k = 0, bad_c = 0;
  for (const auto& r : e.replicas) {
    bad_k += !r.kirchhoff_ok;
    bad_c += !r.counting_ok;
  }
  out.push_back(exact_report("means", "replicas violating Kirchhoff", bad_k, 0, e.replicas.size()));
  out.push_back(exact_report("means", "replicas violating counting identities", bad_c, 0, e.replicas.size()));
  return out;
}

std::vector<StatReport> test_face_limits(const Ensemble& e, const StatOptions& o) {
  std::vector<StatReport> out;
  FaceSummary t;
  for (const auto& r : e.replicas) {
    t.interior += r.faces.interior;
    t.nodes += r.faces.nodes;
    t.corners += r.faces.corners;
    t.area += r.faces.area;
    t.area_nodes += r.faces.area_nodes;
    t.area_corners += r.faces.area_corners;
  }
  const FaceLimits lim = expected_face_limits(e.params);
  const auto tol = [&](const std::string& name, double observed, double reference) {
    StatReport r;
    r.suite = "faces";
    r.name = name;
    r.mode = StatReport::Mode::Tolerance;
    r.observed = observed;
    r.reference = reference;
    r.threshold = o.tolerance;
    r.samples = static_cast<std::size_t>(t.interior);
    out.push_back(r);
  };
  const double n = static_cast<double>(t.interior);
  tol("area-biased mean nodes per face", t.area > 0 ? t.area_nodes / t.area : kNaN, lim.nodes);
  tol("area-biased mean corners per face", t.area > 0 ? t.area_corners / t.area : kNaN, lim.corners);
  tol("mean nodes per face", n > 0 ? t.nodes / n : kNaN, lim.nodes);
  tol("mean corners per face", n > 0 ? t.corners / n : kNaN, lim.corners);
  return out;
}

namespace {

Ensemble quick_ensemble(const PksParams& p, double a, double b, std::size_t replicas,
                        std::uint64_t seed, const SimulationOptions& sim, bool faces,
                        bool reversibility, std::vector<Cut> cuts = {}) {
  EnsembleSpec spec;
  spec.a = a;
  spec.b = b;
  spec.replicas = replicas;
  spec.seed = seed;
  spec.sim = sim;
  spec.faces = faces;
  spec.reversibility = reversibility;
  spec.cuts = std::move(cuts);
  return run_ensemble(p, spec);
}

}  // namespace

std::vector<StatReport> test_exit_processes(const PksParams& p, double a, double b,
                                            std::size_t replicas, std::uint64_t seed,
                                            const StatOptions& o, const SimulationOptions& sim) {
  return test_exit_processes(quick_ensemble(p, a, b, replicas, seed, sim, false, false), o);
}

std::vector<StatReport> test_cross_section(const PksParams& p, double a, double b, double alpha,
                                           std::size_t replicas, std::uint64_t seed,
                                           const StatOptions& o, const SimulationOptions& sim) {
  return test_cross_section(
      quick_ensemble(p, a, b, replicas, seed, sim, false, false, {slope_cut(a, b, alpha)}), o);
}

std::vector<StatReport> test_reversibility(const PksParams& p, double a, double b,
                                           std::size_t replicas, std::uint64_t seed,
                                           const StatOptions& o, const SimulationOptions& sim) {
  return test_reversibility(quick_ensemble(p, a, b, replicas, seed, sim, false, true), o);
}

std::vector<StatReport> test_mean_counts(const PksParams& p, double a, double b,
                                         std::size_t replicas, std::uint64_t seed,
                                         const StatOptions& o, const SimulationOptions& sim) {
  return test_mean_counts(quick_ensemble(p, a, b, replicas, seed, sim, true, false), o);
}

// ---- preset checks --------------------------------------------------------------

std::vector<StatReport> test_rates(const ModelPreset& m, double rel_tol) {
  std::vector<StatReport> out;
  const PksParams& p = m.params;
  const auto side = [&](const std::string& label, const ScalarFn& closed, bool forced,
                        const std::vector<double>& points, bool vertical) {
    const IntensityMeasure& own = vertical ? p.vertical : p.horizontal;
    const IntensityMeasure& other = vertical ? p.horizontal : p.vertical;
    StatReport r;
    r.suite = "rates";
    r.samples = points.size();
    if (forced) {
      double worst = 0;
      for (double s : points) worst = std::max(worst, std::abs(convolution(p.vertical, p.horizontal, s)));
      r.name = label + ": forced zero (max G on the support)";
      r.mode = StatReport::Mode::Exact;
      r.observed = worst;
      r.reference = 0;
      out.push_back(r);
      return;
    }
    if (!closed) return;
    double worst = 0;
    for (double s : points) {
      const double generic = convolution(p.vertical, p.horizontal, s) / (own.density(s) * other.mass());
      const double c = closed(s);
      const double scale = std::max(std::abs(c), std::abs(generic));
      const double rel = scale > 0 ? std::abs(c - generic) / scale : 0.0;
      worst = std::max(worst, std::isnan(rel) ? std::numeric_limits<double>::infinity() : rel);
    }
    r.name = label + ": max relative error of " + (vertical ? m.rate_vertical_text : m.rate_horizontal_text);
    r.mode = StatReport::Mode::Tolerance;
    r.observed = worst;
    r.reference = 0;
    r.threshold = rel_tol;
    out.push_back(r);
  };
  side(m.name + " vertical", m.rate_vertical, m.forced_zero_vertical, m.rate_points_vertical, true);
  side(m.name + " horizontal", m.rate_horizontal, m.forced_zero_horizontal, m.rate_points_horizontal, false);
  return out;
}

std::vector<StatReport> test_kernels(const ModelPreset& m, std::size_t samples, std::uint64_t seed,
                                     const StatOptions& o) {
  std::vector<StatReport> out;
  if (!m.kernel) return out;
  for (std::size_t i = 0; i < m.kernel_points.size(); ++i) {
    const double s = m.kernel_points[i];
    const KernelLaw law = m.kernel(s);
    const CrossingKernelTable table(m.params.vertical, m.params.horizontal, s);
    Rng rng(replica_seed(seed, i));
    std::vector<double> xs(samples);
    for (auto& x : xs) x = table.sample(rng);
    const std::string name = m.name + " kernel at s=" + fmt(s);
    if (!law.discrete()) {
      out.push_back(p_report("kernels", name, ks_one_sample(xs, [&](double t) { return law.cdf(t); }),
                             law.describe(), samples));
      continue;
    }
    const long lo = table.first(), hi = lo + static_cast<long>(table.probabilities().size()) - 1;
    std::vector<double> counts(static_cast<std::size_t>(hi - lo + 1), 0.0), probs(counts.size());
    std::size_t outside = 0;
    for (double x : xs) {
      const long k = std::lround(x);
      if (k < lo || k > hi) ++outside;
      else counts[static_cast<std::size_t>(k - lo)] += 1;
    }
    double total = 0;
    for (long k = lo; k <= hi; ++k) total += (probs[static_cast<std::size_t>(k - lo)] = law.pmf(k));
    TestResult t;
    if (counts.size() == 1) {
      t.p_value = (outside == 0 && std::abs(total - 1) < 1e-9) ? 1.0 : 0.0;
    } else {
      t = chi_square_gof(counts, probs);
      if (outside || std::abs(total - 1) > 1e-9) t.p_value = 0;
    }
    out.push_back(p_report("kernels", name, t, law.describe(), samples));
  }
  bonferroni(out, o.level);
  return out;
}

}  // namespace pks
