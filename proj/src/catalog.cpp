#include "pks/catalog.hpp"

#include <algorithm>
#include <boost/math/distributions/beta.hpp>
#include <boost/math/distributions/binomial.hpp>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

#include "pks/expression.hpp"

namespace pks {

namespace bm = boost::math;

// ---- kernel laws --------------------------------------------------------------

bool KernelLaw::discrete() const {
  switch (family) {
    case Family::Dirac:
    case Family::Bernoulli:
    case Family::DiscreteUniform:
    case Family::Binomial:
    case Family::Geometric:
      return true;
    default:
      return false;
  }
}

double KernelLaw::pmf(long t) const {
  const double x = static_cast<double>(t) - shift;
  switch (family) {
    case Family::Dirac:
      return x == 0 ? 1.0 : 0.0;
    case Family::Bernoulli:
      return x == 0 ? 1 - a : x == 1 ? a : 0.0;
    case Family::DiscreteUniform:
      return (t >= a && t <= b) ? 1.0 / (b - a + 1) : 0.0;
    case Family::Binomial:
      return (t >= 0 && t <= a) ? bm::pdf(bm::binomial_distribution<double>(a, b), static_cast<double>(t)) : 0.0;
    case Family::Geometric:
      return x >= 0 ? a * std::pow(1 - a, x) : 0.0;
    default:
      return 0.0;
  }
}

double KernelLaw::cdf(double t) const {
  const double x = t - shift;
  switch (family) {
    case Family::Dirac:
      return x >= 0 ? 1.0 : 0.0;
    case Family::Bernoulli:
      return x < 0 ? 0.0 : x < 1 ? 1 - a : 1.0;
    case Family::DiscreteUniform:
      return t < a ? 0.0 : t >= b ? 1.0 : (std::floor(t) - a + 1) / (b - a + 1);
    case Family::Binomial:
      return t < 0 ? 0.0 : t >= a ? 1.0 : bm::cdf(bm::binomial_distribution<double>(a, b), std::floor(t));
    case Family::Geometric:
      return x < 0 ? 0.0 : 1 - std::pow(1 - a, std::floor(x) + 1);
    case Family::Normal:
      return bm::cdf(bm::normal_distribution<double>(a, std::sqrt(b)), t);
    case Family::Uniform:
      return t <= a ? 0.0 : t >= b ? 1.0 : (t - a) / (b - a);
    case Family::ScaledBeta:
      return t <= 0 ? 0.0 : t >= c ? 1.0 : bm::cdf(bm::beta_distribution<double>(a, b), t / c);
    case Family::Exponential:
      return x <= 0 ? 0.0 : -std::expm1(-a * x);
  }
  return 0.0;
}

double KernelLaw::sample(Rng& rng) const {
  switch (family) {
    case Family::Dirac:
      return shift;
    case Family::Bernoulli:
      return shift + (uniform01(rng) < a ? 1.0 : 0.0);
    case Family::DiscreteUniform:
      return a + std::floor(uniform01(rng) * (b - a + 1));
    case Family::Binomial:
      return static_cast<double>(std::binomial_distribution<long>(static_cast<long>(a), b)(rng));
    case Family::Geometric:
      return shift + static_cast<double>(std::geometric_distribution<long>(a)(rng));
    case Family::Normal:
      return a + std::sqrt(b) * standard_normal(rng);
    case Family::Uniform:
      return uniform(rng, a, b);
    case Family::ScaledBeta: {
      const double x = std::gamma_distribution<double>(a, 1.0)(rng);
      const double y = std::gamma_distribution<double>(b, 1.0)(rng);
      return c * x / (x + y);
    }
    case Family::Exponential:
      return shift + exponential(rng, a);
  }
  return 0.0;
}

std::string KernelLaw::describe() const {
  std::ostringstream os;
  os.precision(6);
  const auto plus_shift = [&] {
    if (shift != 0) os << shift << " + ";
  };
  switch (family) {
    case Family::Dirac: os << "Dirac(" << shift << ")"; break;
    case Family::Bernoulli: plus_shift(); os << "Ber(" << a << ")"; break;
    case Family::DiscreteUniform: os << "Unif{" << a << ".." << b << "}"; break;
    case Family::Binomial: os << "Bin(" << a << ", " << b << ")"; break;
    case Family::Geometric: plus_shift(); os << "Geom(" << a << ")"; break;
    case Family::Normal: os << "N(" << a << ", " << b << ")"; break;
    case Family::Uniform: os << "Unif[" << a << ", " << b << "]"; break;
    case Family::ScaledBeta: os << c << " * Beta(" << a << ", " << b << ")"; break;
    case Family::Exponential: plus_shift(); os << "Exp(" << a << ")"; break;
  }
  return os.str();
}

namespace {

using F = KernelLaw::Family;

KernelLaw law(F f, double shift, double a = 0, double b = 0, double c = 0) {
  KernelLaw k;
  k.family = f;
  k.shift = shift;
  k.a = a;
  k.b = b;
  k.c = c;
  return k;
}

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> v;
  for (int i = 0; i < n; ++i) v.push_back(lo + (hi - lo) * i / (n - 1));
  return v;
}

std::vector<double> integers(long lo, long hi) {
  std::vector<double> v;
  for (long k = lo; k <= hi; ++k) v.push_back(static_cast<double>(k));
  return v;
}

// ---- argument handling ----------------------------------------------------------

struct Spec {
  Spec(std::string n, std::string f, std::string rv, std::string rh, std::string k,
       std::vector<PresetParameter> ps, bool scope = true, std::string why = {})
      : name(std::move(n)), family(std::move(f)), rate_v(std::move(rv)), rate_h(std::move(rh)),
        kernel(std::move(k)), params(std::move(ps)), in_scope(scope), note(std::move(why)) {}
  std::string name, family, rate_v, rate_h, kernel;
  std::vector<PresetParameter> params;
  bool in_scope = true;
  std::string note;
};

const std::vector<PresetParameter> kFunctions = {
    {"p_V", "0.3", "vertical splitting function of s"},
    {"p_H", "0.3", "horizontal splitting function of s"},
    {"q", "0.1", "turn function of s"},
    {"mass_V", "1", "total mass of the vertical measure"},
    {"mass_H", "1", "total mass of the horizontal measure"},
};

std::vector<PresetParameter> with_functions(std::vector<PresetParameter> own, bool atomic,
                                            const char* pv = "0.3", const char* ph = "0.3",
                                            const char* q = "0.1") {
  for (auto f : kFunctions) {
    if (f.name == "p_V") f.default_value = pv;
    if (f.name == "p_H") f.default_value = ph;
    if (f.name == "q") f.default_value = q;
    own.push_back(f);
  }
  if (atomic) own.push_back({"p_0", "0", "annihilation/creation probability"});
  return own;
}

std::vector<PresetParameter> masses_only(std::vector<PresetParameter> own) {
  own.push_back({"mass_V", "1", "total mass of the vertical measure"});
  own.push_back({"mass_H", "1", "total mass of the horizontal measure"});
  return own;
}

const std::vector<Spec>& specs() {
  static const std::vector<Spec> all = {
      {"dirac0-dirac0", "Dirac(0) / Dirac(0)", "1", "1", "Dirac(0)", with_functions({}, true)},
      {"dirac-dirac", "Dirac(atom_V) / Dirac(atom_H), atoms nonzero", "forced zero (p_V = 0)",
       "forced zero (p_H = 0)", "Dirac(atom_H)",
       with_functions({{"atom_V", "1", "vertical atom (nonzero integer)"},
                       {"atom_H", "2", "horizontal atom (nonzero integer)"}},
                      true)},
      {"dirac-dirac0", "Dirac(atom_V) / Dirac(0), atom nonzero", "1", "forced zero (p_H = 0)",
       "Dirac(0)", with_functions({{"atom_V", "1", "vertical atom (nonzero integer)"}}, true)},
      {"ber-ber", "Ber(q_V) / Ber(q_H)", "(1-q_H) 1{s=0} + (1+q_H(1/q_V-2)) 1{s=1}",
       "(1-q_V) 1{s=0} + (1+q_V(1/q_H-2)) 1{s=1}",
       "Dirac(0) at s=0; Ber(q_H(1-q_V)/(q_V+q_H-2q_Vq_H)) at s=1; Dirac(1) at s=2",
       with_functions({{"q_V", "0.3", "P(vertical intensity = 1)"},
                       {"q_H", "0.6", "P(horizontal intensity = 1)"}},
                      true)},
      {"negber-ber", "-Ber(q_V) / Ber(q_H)", "(1-q_H) 1{s=-1} + (1+q_H(2q_V-1)/(1-q_V)) 1{s=0}",
       "(1-q_V) 1{s=1} + (1+q_V(2q_H-1)/(1-q_H)) 1{s=0}",
       "Dirac(0) at s=-1; Ber(q_Vq_H/(1-q_V-q_H+2q_Vq_H)) at s=0; Dirac(1) at s=1",
       with_functions({{"q_V", "0.3", "P(vertical intensity = -1)"},
                       {"q_H", "0.6", "P(horizontal intensity = 1)"}},
                      true)},
      {"unif-unif", "Unif[0,width_V] / Unif[0,width_H]", "min(s/width_H, 1) 1{0<s<width_V}",
       "min(s/width_V, 1) 1{0<s<width_H}", "Unif[max(0,s-width_V), min(width_H,s)]",
       with_functions({{"width_V", "1", "vertical support width"},
                       {"width_H", "2", "horizontal support width"}},
                      false)},
      {"negunif-unif", "-Unif[0,width_V] / Unif[0,width_H]",
       "min((width_V+s)/width_H, 1) 1{-width_V<s<0}", "min((width_H-s)/width_V, 1) 1{0<s<width_H}",
       "Unif[max(0,s), min(width_H,s+width_V)]",
       with_functions({{"width_V", "1", "vertical support width"},
                       {"width_H", "2", "horizontal support width"}},
                      false)},
      {"geom-geom", "Geom(q_geom) / Geom(q_geom)", "(s+1) q_geom", "(s+1) q_geom", "Unif{0..s}",
       with_functions({{"q_geom", "0.4", "geometric parameter of both measures"}}, true)},
      {"exp-exp", "Exp(rate) / Exp(rate)", "rate s 1{s>=0}", "rate s 1{s>=0}", "Unif[0,s]",
       with_functions({{"rate", "1", "exponential rate of both measures"}}, false)},
      {"exp-geom", "Exp(gamma_V) / Geom(q_H)", "", "", "", {}, false,
       "mixed continuous/atomic support pair: needs general (Radon-Nikodym) measures, not supported"},
      {"gamma-gamma", "Gamma(k_V,theta) / Gamma(k_H,theta)",
       "Gamma(k_V)/Gamma(k_V+k_H) (s/theta)^k_H", "Gamma(k_H)/Gamma(k_V+k_H) (s/theta)^k_V",
       "s Beta(k_H, k_V)",
       with_functions({{"k_V", "2", "vertical shape"},
                       {"k_H", "1.5", "horizontal shape"},
                       {"theta", "1", "common scale"}},
                      false)},
      {"negber-geom", "-Ber(q_V) / Geom(q_H)", "q_H 1{s=-1} + q_H(1-q_Vq_H)/(1-q_V) 1{s=0}",
       "(1-q_Vq_H) 1{s>=0}", "s + Ber(q_V(1-q_H)/(1-q_Vq_H)) for s>=0; Dirac(0) at s=-1",
       with_functions({{"q_V", "0.3", "P(vertical intensity = -1)"},
                       {"q_H", "0.4", "geometric parameter"}},
                      true)},
      {"neggeom-geom", "-Geom(q_V) / Geom(q_H)", "q_H/(q_V+q_H-q_Vq_H) 1{s<=0}",
       "q_V/(q_V+q_H-q_Vq_H) 1{s>=0}", "max(0,s) + Geom(q_V+q_H-q_Vq_H)",
       with_functions({{"q_V", "0.3", "vertical geometric parameter"},
                       {"q_H", "0.4", "horizontal geometric parameter"}},
                      true)},
      {"negexp-exp", "-Exp(gamma_V) / Exp(gamma_H)", "gamma_H/(gamma_V+gamma_H) 1{s<=0}",
       "gamma_V/(gamma_V+gamma_H) 1{s>=0}", "max(0,s) + Exp(gamma_V+gamma_H)",
       with_functions({{"gamma_V", "1", "vertical rate"}, {"gamma_H", "1.5", "horizontal rate"}},
                      false)},
      {"negexp-geom", "-Exp(gamma_V) / Geom(q_H)", "", "", "", {}, false,
       "mixed continuous/atomic support pair: needs general (Radon-Nikodym) measures, not supported"},
      {"normal", "N(mu_V,sigma_V^2) / N(mu_H,sigma_H^2)", "(1/sqrt 2) exp(s^2/4) for N(0,1)/N(0,1)",
       "(1/sqrt 2) exp(s^2/4) for N(0,1)/N(0,1)", "N(s/2, 1/2) for N(0,1)/N(0,1)",
       with_functions({{"mu_V", "0", "vertical mean"},
                       {"sigma_V", "1", "vertical standard deviation"},
                       {"mu_H", "0", "horizontal mean"},
                       {"sigma_H", "1", "horizontal standard deviation"}},
                      false, "0.4", "0.4", "0.1")},
      {"poisson", "Poi(gamma_V) / Poi(gamma_H)", "exp(-gamma_H) (1+gamma_H/gamma_V)^s",
       "exp(-gamma_V) (1+gamma_V/gamma_H)^s", "Bin(s, gamma_H/(gamma_V+gamma_H))",
       with_functions({{"gamma_V", "1", "vertical Poisson mean"},
                       {"gamma_H", "1.5", "horizontal Poisson mean"}},
                      true)},
      {"hammersley", "Dirac(-1) / Dirac(1), p_0 = 1", "forced zero", "forced zero", "Dirac(1)",
       masses_only({})},
      {"bullet", "Dirac(0) / Dirac(0), q = 0, p_0 = 0", "1", "1", "Dirac(0)",
       masses_only({{"p_V", "0.3", "p_V(0): the horizontal bullet dies"},
                    {"p_H", "0.3", "p_H(0): the vertical bullet dies"}})},
      {"exponential-lpp", "-Exp(gamma_V) / Exp(gamma_H), p = q = 0", "gamma_H/(gamma_V+gamma_H)",
       "gamma_V/(gamma_V+gamma_H)", "max(0,s) + Exp(gamma_V+gamma_H)",
       masses_only({{"gamma_V", "1", "vertical rate"}, {"gamma_H", "1.5", "horizontal rate"}})},
      {"geometric-lpp", "-Geom(q_V) / Geom(q_H), p = q = 0", "q_H/(q_V+q_H-q_Vq_H)",
       "q_V/(q_V+q_H-q_Vq_H)", "max(0,s) + Geom(q_V+q_H-q_Vq_H)",
       masses_only({{"q_V", "0.3", "vertical geometric parameter"},
                    {"q_H", "0.4", "horizontal geometric parameter"}})},
      {"geometric-lpp-shifted", "-Geom(q_V) on {1,2,..} / Geom(q_H) on {1,2,..}, p = q = 0", "",
       "", "generic",
       masses_only({{"q_V", "0.3", "vertical geometric parameter"},
                    {"q_H", "0.4", "horizontal geometric parameter"}})},
      {"discrete-hammersley", "-Ber(q_V) / Geom(q_H), p = q = 0",
       "q_H 1{s=-1} + q_H(1-q_Vq_H)/(1-q_V) 1{s=0}", "(1-q_Vq_H) 1{s>=0}",
       "s + Ber(q_V(1-q_H)/(1-q_Vq_H))",
       masses_only({{"q_V", "0.3", "P(vertical intensity = -1)"},
                    {"q_H", "0.4", "geometric parameter"}})},
      {"generalized-lpp", "nu_H = sqrt(mu_0)/Z, nu_V(-A) = nu_H(A), p = q = 0", "", "", "generic",
       {{"k", "3", "mu_0 = Gamma(k, theta) density (continuous variant)"},
        {"theta", "1", "scale of mu_0"},
        {"mu0", "", "pmf of mu_0 on 1, 2, ... (atomic variant; overrides k/theta)"}}},
  };
  return all;
}

const Spec& find_spec(const std::string& name) {
  for (const auto& s : specs())
    if (s.name == name) return s;
  throw ParameterError("unknown preset '" + name + "' (see the catalog command)");
}

class Args {
 public:
  Args(const Spec& spec, const PresetArgs& given) : spec_(spec), given_(given) {
    for (const auto& [k, v] : given) {
      (void)v;
      bool known = false;
      for (const auto& p : spec.params) known = known || p.name == k;
      if (!known) throw ParameterError("preset '" + spec.name + "' has no parameter '" + k + "'");
    }
  }
  std::string text(const std::string& key) const {
    if (auto it = given_.find(key); it != given_.end()) return it->second;
    for (const auto& p : spec_.params)
      if (p.name == key) return p.default_value;
    throw InternalError("preset parameter '" + key + "' not declared");
  }
  bool given(const std::string& key) const { return given_.count(key) > 0; }
  double number(const std::string& key) const {
    try {
      return parse_number(text(key));
    } catch (const ParameterError& e) {
      throw ParameterError("preset '" + spec_.name + "', parameter " + key + ": " + e.what());
    }
  }
  ScalarFn function(const std::string& key) const {
    try {
      return parse_function(text(key));
    } catch (const ParameterError& e) {
      throw ParameterError("preset '" + spec_.name + "', parameter " + key + ": " + e.what());
    }
  }
  long integer(const std::string& key) const {
    const double v = number(key);
    if (v != std::floor(v)) throw ParameterError(spec_.name + ": " + key + " must be an integer");
    return static_cast<long>(v);
  }
  std::vector<double> list(const std::string& key) const {
    std::string t = text(key);
    std::replace(t.begin(), t.end(), ',', ' ');
    std::istringstream is(t);
    std::vector<double> out;
    std::string tok;
    while (is >> tok) out.push_back(parse_number(tok));
    return out;
  }
  void require(bool ok, const std::string& what) const {
    if (!ok) throw ParameterError("preset '" + spec_.name + "': " + what);
  }

 private:
  const Spec& spec_;
  const PresetArgs& given_;
};

std::string describe_args(const Spec& spec, const PresetArgs& given) {
  std::string out = spec.name;
  for (const auto& p : spec.params) {
    const auto it = given.find(p.name);
    out += " " + p.name + "=" + (it != given.end() ? it->second : p.default_value);
  }
  return out;
}

void set_functions(ModelPreset& m, const Args& args) {
  m.params.p_vertical = args.function("p_V");
  m.params.p_horizontal = args.function("p_H");
  m.params.turn = args.function("q");
}

void set_masses(ModelPreset& m, const Args& args) {
  const double mv = args.number("mass_V"), mh = args.number("mass_H");
  args.require(mv > 0 && mh > 0 && std::isfinite(mv) && std::isfinite(mh),
               "masses must be positive and finite");
  m.params.vertical = m.params.vertical.with_mass(mv);
  m.params.horizontal = m.params.horizontal.with_mass(mh);
}

ScalarFn constant(double c) {
  return [c](double) { return c; };
}

ScalarFn zero_fn() { return constant(0.0); }

// Closed-form fast paths for continuous families: G(s) scaled by the masses and
// a kernel sampler from the descriptor.
void attach_closed(ModelPreset& m, ScalarFn unit_convolution) {
  const double scale = m.params.vertical.mass() * m.params.horizontal.mass();
  m.params.closed.convolution = [unit_convolution, scale](double s) {
    return scale * unit_convolution(s);
  };
  auto kernel = m.kernel;
  m.params.closed.kernel = [kernel](double s, Rng& rng) { return kernel(s).sample(rng); };
}

double normal_pdf(double x, double mean, double var) {
  return std::exp(-(x - mean) * (x - mean) / (2 * var)) / std::sqrt(2 * std::numbers::pi * var);
}

ModelPreset build(const Spec& spec, const PresetArgs& given) {
  if (!spec.in_scope) throw OutOfScope("preset '" + spec.name + "': " + spec.note);
  const Args args(spec, given);
  ModelPreset m;
  m.name = spec.name;
  m.family = spec.family;
  m.rate_vertical_text = spec.rate_v;
  m.rate_horizontal_text = spec.rate_h;
  m.kernel_text = spec.kernel;
  PksParams& p = m.params;
  const std::string& n = spec.name;
  bool lpp = false;  // p = q = p_0 = 0 presets

  if (n == "dirac0-dirac0" || n == "bullet" || n == "hammersley") {
    const bool ham = n == "hammersley";
    p.vertical = measures::dirac(ham ? -1 : 0);
    p.horizontal = measures::dirac(ham ? 1 : 0);
    if (n == "dirac0-dirac0") {
      set_functions(m, args);
      p.p_annihilation = args.number("p_0");
    } else if (n == "bullet") {
      p.p_vertical = constant(args.number("p_V"));
      p.p_horizontal = constant(args.number("p_H"));
      p.turn = zero_fn();
    } else {
      p.p_vertical = p.p_horizontal = p.turn = zero_fn();
      p.p_annihilation = 1.0;
    }
    set_masses(m, args);
    if (ham) {
      m.forced_zero_vertical = m.forced_zero_horizontal = true;
      m.rate_points_vertical = {-1};
      m.rate_points_horizontal = {1};
      m.kernel = [](double) { return law(F::Dirac, 1); };
      m.kernel_points = {0};
      m.monotone = true;
    } else {
      m.rate_vertical = m.rate_horizontal = constant(1.0);
      m.rate_points_vertical = m.rate_points_horizontal = {0};
      m.kernel = [](double) { return law(F::Dirac, 0); };
      m.kernel_points = {0};
    }
  } else if (n == "dirac-dirac" || n == "dirac-dirac0") {
    const long av = args.integer("atom_V");
    const long ah = n == "dirac-dirac" ? args.integer("atom_H") : 0;
    args.require(av != 0, "atom_V must be nonzero");
    if (n == "dirac-dirac") args.require(ah != 0, "atom_H must be nonzero");
    p.vertical = measures::dirac(av);
    p.horizontal = measures::dirac(ah);
    set_functions(m, args);
    p.p_annihilation = args.number("p_0");
    set_masses(m, args);
    m.forced_zero_horizontal = true;
    m.rate_points_horizontal = {static_cast<double>(ah)};
    m.rate_points_vertical = {static_cast<double>(av)};
    if (n == "dirac-dirac") {
      m.forced_zero_vertical = true;
    } else {
      m.rate_vertical = constant(1.0);
    }
    m.kernel = [ah](double) { return law(F::Dirac, static_cast<double>(ah)); };
    m.kernel_points = {static_cast<double>(av + ah)};
  } else if (n == "ber-ber" || n == "negber-ber") {
    const double qv = args.number("q_V"), qh = args.number("q_H");
    args.require(qv > 0 && qv < 1 && qh > 0 && qh < 1, "q_V and q_H must lie in (0,1)");
    const bool neg = n == "negber-ber";
    p.vertical = neg ? measures::bernoulli(qv).negated() : measures::bernoulli(qv);
    p.horizontal = measures::bernoulli(qh);
    set_functions(m, args);
    p.p_annihilation = args.number("p_0");
    set_masses(m, args);
    if (!neg) {
      m.rate_vertical = [qv, qh](double s) {
        return (s == 0) * (1 - qh) + (s == 1) * (1 + qh * (1 / qv - 2));
      };
      m.rate_horizontal = [qv, qh](double s) {
        return (s == 0) * (1 - qv) + (s == 1) * (1 + qv * (1 / qh - 2));
      };
      m.rate_points_vertical = m.rate_points_horizontal = {0, 1};
      const double r = qh * (1 - qv) / (qv + qh - 2 * qh * qv);
      m.kernel = [r](double s) {
        if (s == 1) return law(F::Bernoulli, 0, r);
        return law(F::Dirac, s == 0 ? 0.0 : 1.0);
      };
      m.kernel_points = {0, 1, 2};
    } else {
      m.rate_vertical = [qv, qh](double s) {
        return (s == -1) * (1 - qh) + (s == 0) * (1 + qh * (2 * qv - 1) / (1 - qv));
      };
      m.rate_horizontal = [qv, qh](double s) {
        return (s == 1) * (1 - qv) + (s == 0) * (1 + qv * (2 * qh - 1) / (1 - qh));
      };
      m.rate_points_vertical = {-1, 0};
      m.rate_points_horizontal = {0, 1};
      const double r = qv * qh / (1 - qv - qh + 2 * qh * qv);
      m.kernel = [r](double s) {
        if (s == 0) return law(F::Bernoulli, 0, r);
        return law(F::Dirac, s == -1 ? 0.0 : 1.0);
      };
      m.kernel_points = {-1, 0, 1};
    }
  } else if (n == "unif-unif" || n == "negunif-unif") {
    const double wv = args.number("width_V"), wh = args.number("width_H");
    args.require(wv > 0 && wh > 0, "widths must be positive");
    const bool neg = n == "negunif-unif";
    p.vertical = neg ? measures::uniform(-wv, 0) : measures::uniform(0, wv);
    p.horizontal = measures::uniform(0, wh);
    set_functions(m, args);
    set_masses(m, args);
    if (!neg) {
      m.rate_vertical = [wh](double s) { return std::min(s / wh, 1.0); };
      m.rate_horizontal = [wv](double s) { return std::min(s / wv, 1.0); };
      m.rate_points_vertical = linspace(0.01 * wv, 0.99 * wv, 100);
      m.rate_points_horizontal = linspace(0.01 * wh, 0.99 * wh, 100);
      m.kernel = [wv, wh](double s) {
        return law(F::Uniform, 0, std::max(0.0, s - wv), std::min(wh, s));
      };
      m.kernel_points = {0.3 * (wv + wh), 0.5 * (wv + wh), 0.8 * (wv + wh)};
      attach_closed(m, [wv, wh](double s) {
        const double len = std::min(wh, s) - std::max(0.0, s - wv);
        return len > 0 ? len / (wv * wh) : 0.0;
      });
    } else {
      m.rate_vertical = [wv, wh](double s) { return std::min((wv + s) / wh, 1.0); };
      m.rate_horizontal = [wv, wh](double s) { return std::min((wh - s) / wv, 1.0); };
      m.rate_points_vertical = linspace(-0.99 * wv, -0.01 * wv, 100);
      m.rate_points_horizontal = linspace(0.01 * wh, 0.99 * wh, 100);
      m.kernel = [wv, wh](double s) {
        return law(F::Uniform, 0, std::max(0.0, s), std::min(wh, s + wv));
      };
      m.kernel_points = {-0.5 * wv, 0.25 * wh, 0.75 * wh};
      attach_closed(m, [wv, wh](double s) {
        const double len = std::min(wh, s + wv) - std::max(0.0, s);
        return len > 0 ? len / (wv * wh) : 0.0;
      });
    }
  } else if (n == "geom-geom") {
    const double q = args.number("q_geom");
    args.require(q > 0 && q < 1, "q_geom must lie in (0,1)");
    p.vertical = p.horizontal = measures::geometric(q);
    set_functions(m, args);
    p.p_annihilation = args.number("p_0");
    set_masses(m, args);
    m.rate_vertical = m.rate_horizontal = [q](double s) { return (s + 1) * q; };
    m.rate_points_vertical = m.rate_points_horizontal =
        integers(0, std::min(99L, p.vertical.last_atom() / 2));
    m.kernel = [](double s) { return law(F::DiscreteUniform, 0, 0, s); };
    m.kernel_points = {0, 3, 8};
  } else if (n == "exp-exp") {
    const double g = args.number("rate");
    args.require(g > 0, "rate must be positive");
    p.vertical = p.horizontal = measures::exponential(g);
    set_functions(m, args);
    set_masses(m, args);
    m.rate_vertical = m.rate_horizontal = [g](double s) { return g * s * (s >= 0); };
    m.rate_points_vertical = m.rate_points_horizontal = linspace(0.05 / g, 20 / g, 100);
    m.kernel = [](double s) { return law(F::Uniform, 0, 0, s); };
    m.kernel_points = {0.5 / g, 2 / g, 5 / g};
    attach_closed(m, [g](double s) { return s > 0 ? g * g * s * std::exp(-g * s) : 0.0; });
  } else if (n == "gamma-gamma") {
    const double kv = args.number("k_V"), kh = args.number("k_H"), th = args.number("theta");
    args.require(kv > 0 && kh > 0 && th > 0, "shapes and scale must be positive");
    p.vertical = measures::gamma(kv, th);
    p.horizontal = measures::gamma(kh, th);
    set_functions(m, args);
    set_masses(m, args);
    const double cv = std::exp(std::lgamma(kv) - std::lgamma(kv + kh));
    const double ch = std::exp(std::lgamma(kh) - std::lgamma(kv + kh));
    m.rate_vertical = [cv, kh, th](double s) { return cv * std::pow(s / th, kh); };
    m.rate_horizontal = [ch, kv, th](double s) { return ch * std::pow(s / th, kv); };
    m.rate_points_vertical = m.rate_points_horizontal = linspace(0.05 * th, 20 * th, 100);
    m.kernel = [kv, kh](double s) { return law(F::ScaledBeta, 0, kh, kv, s); };
    m.kernel_points = {0.5 * th, 2 * th, 6 * th};
    const double k = kv + kh;
    attach_closed(m, [k, th](double s) {
      if (!(s > 0)) return 0.0;
      return std::exp((k - 1) * std::log(s) - s / th - std::lgamma(k) - k * std::log(th));
    });
  } else if (n == "negber-geom" || n == "discrete-hammersley") {
    const double qv = args.number("q_V"), qh = args.number("q_H");
    args.require(qv > 0 && qv < 1 && qh > 0 && qh < 1, "q_V and q_H must lie in (0,1)");
    p.vertical = measures::bernoulli(qv).negated();
    p.horizontal = measures::geometric(qh);
    if (n == "negber-geom") {
      set_functions(m, args);
      p.p_annihilation = args.number("p_0");
    } else {
      lpp = true;
      m.monotone = true;
    }
    set_masses(m, args);
    m.rate_vertical = [qv, qh](double s) {
      return (s == -1) * qh + (s == 0) * qh * (1 - qv * qh) / (1 - qv);
    };
    m.rate_horizontal = [qv, qh](double s) { return (1 - qv * qh) * (s >= 0); };
    m.rate_points_vertical = {-1, 0};
    m.rate_points_horizontal = integers(0, std::min(99L, p.horizontal.last_atom() / 2));
    const double r = qv * (1 - qh) / (1 - qv * qh);
    m.kernel = [r](double s) {
      if (s < 0) return law(F::Dirac, 0);
      return law(F::Bernoulli, s, r);
    };
    m.kernel_points = {-1, 0, 4};
    m.monotone = true;
  } else if (n == "neggeom-geom" || n == "geometric-lpp") {
    const double qv = args.number("q_V"), qh = args.number("q_H");
    args.require(qv > 0 && qv < 1 && qh > 0 && qh < 1, "q_V and q_H must lie in (0,1)");
    p.vertical = measures::geometric(qv).negated();
    p.horizontal = measures::geometric(qh);
    if (n == "neggeom-geom") {
      set_functions(m, args);
      p.p_annihilation = args.number("p_0");
    } else {
      lpp = true;
    }
    set_masses(m, args);
    const double r = qv + qh - qv * qh;
    m.rate_vertical = [qh, r](double s) { return qh / r * (s <= 0); };
    m.rate_horizontal = [qv, r](double s) { return qv / r * (s >= 0); };
    m.rate_points_vertical = integers(std::max(-99L, p.vertical.first_atom() / 2), 0);
    m.rate_points_horizontal = integers(0, std::min(99L, p.horizontal.last_atom() / 2));
    m.kernel = [r](double s) { return law(F::Geometric, std::max(0.0, s), r); };
    m.kernel_points = {-3, 0, 4};
    m.monotone = true;
  } else if (n == "negexp-exp" || n == "exponential-lpp") {
    const double gv = args.number("gamma_V"), gh = args.number("gamma_H");
    args.require(gv > 0 && gh > 0, "rates must be positive");
    p.vertical = measures::exponential(gv).negated();
    p.horizontal = measures::exponential(gh);
    if (n == "negexp-exp") {
      set_functions(m, args);
    } else {
      lpp = true;
    }
    set_masses(m, args);
    m.rate_vertical = [gv, gh](double s) { return gh / (gv + gh) * (s <= 0); };
    m.rate_horizontal = [gv, gh](double s) { return gv / (gv + gh) * (s >= 0); };
    m.rate_points_vertical = linspace(-20 / gv, -0.05 / gv, 100);
    m.rate_points_horizontal = linspace(0.05 / gh, 20 / gh, 100);
    m.kernel = [gv, gh](double s) { return law(F::Exponential, std::max(0.0, s), gv + gh); };
    m.kernel_points = {-2 / gv, 0.5 / gh, 3 / gh};
    m.monotone = true;
    attach_closed(m, [gv, gh](double s) {
      return gv * gh / (gv + gh) * std::exp(gv * s - (gv + gh) * std::max(0.0, s));
    });
  } else if (n == "geometric-lpp-shifted") {
    const double qv = args.number("q_V"), qh = args.number("q_H");
    args.require(qv > 0 && qv < 1 && qh > 0 && qh < 1, "q_V and q_H must lie in (0,1)");
    p.vertical = measures::geometric(qv, 1).negated();
    p.horizontal = measures::geometric(qh, 1);
    set_masses(m, args);
    lpp = true;
    m.monotone = true;
    m.kernel_points = {-2, 0, 3};
  } else if (n == "normal") {
    const double mv = args.number("mu_V"), sv = args.number("sigma_V");
    const double mh = args.number("mu_H"), sh = args.number("sigma_H");
    args.require(sv > 0 && sh > 0, "standard deviations must be positive");
    p.vertical = measures::normal(mv, sv);
    p.horizontal = measures::normal(mh, sh);
    set_functions(m, args);
    set_masses(m, args);
    const double mu = mv + mh, var = sv * sv + sh * sh;
    m.rate_vertical = [=](double s) { return normal_pdf(s, mu, var) / normal_pdf(s, mv, sv * sv); };
    m.rate_horizontal = [=](double s) { return normal_pdf(s, mu, var) / normal_pdf(s, mh, sh * sh); };
    m.rate_points_vertical = linspace(mv - 5 * sv, mv + 5 * sv, 100);
    m.rate_points_horizontal = linspace(mh - 5 * sh, mh + 5 * sh, 100);
    m.kernel = [=](double s) {
      return law(F::Normal, 0, mh + sh * sh / var * (s - mu), sv * sv * sh * sh / var);
    };
    m.kernel_points = {mu - std::sqrt(var), mu + 0.5 * std::sqrt(var), mu + 2 * std::sqrt(var)};
    attach_closed(m, [=](double s) { return normal_pdf(s, mu, var); });
  } else if (n == "poisson") {
    const double gv = args.number("gamma_V"), gh = args.number("gamma_H");
    args.require(gv > 0 && gh > 0, "Poisson means must be positive");
    p.vertical = measures::poisson(gv);
    p.horizontal = measures::poisson(gh);
    set_functions(m, args);
    p.p_annihilation = args.number("p_0");
    set_masses(m, args);
    m.rate_vertical = [gv, gh](double s) { return std::exp(-gh) * std::pow(1 + gh / gv, s); };
    m.rate_horizontal = [gv, gh](double s) { return std::exp(-gv) * std::pow(1 + gv / gh, s); };
    m.rate_points_vertical = integers(0, std::min(99L, p.vertical.last_atom() / 2));
    m.rate_points_horizontal = integers(0, std::min(99L, p.horizontal.last_atom() / 2));
    const double r = gh / (gv + gh);
    m.kernel = [r](double s) { return law(F::Binomial, 0, s, r); };
    m.kernel_points = {0, 2, 5};
  } else if (n == "generalized-lpp") {
    lpp = true;
    m.monotone = true;
    const auto mu0 = args.list("mu0");
    if (!mu0.empty()) {
      std::vector<double> root;
      for (double w : mu0) {
        args.require(w >= 0 && std::isfinite(w), "mu0 entries must be nonnegative");
        root.push_back(std::sqrt(w));
      }
      double z = 0;
      for (double r : root) z += r;
      args.require(z > 0, "mu0 must have positive mass");
      for (double& r : root) r /= z;
      p.horizontal = measures::from_pmf(1, root);
      p.vertical = p.horizontal.negated();
      m.kernel_points = {-1, 0, 1};
    } else {
      const double k = args.number("k"), th = args.number("theta");
      args.require(k > 0 && th > 0, "k and theta must be positive");
      // sqrt of a Gamma(k, theta) density is proportional to a Gamma((k+1)/2, 2 theta) density.
      p.horizontal = measures::gamma((k + 1) / 2, 2 * th);
      p.vertical = p.horizontal.negated();
      m.kernel_points = {-2 * th, 0.5 * th, 3 * th};
    }
  } else {
    throw InternalError("preset '" + n + "' has no builder");
  }

  if (lpp) {
    p.p_vertical = p.p_horizontal = p.turn = zero_fn();
    p.p_annihilation = 0.0;
  }
  wrap_support(p);
  p.description = describe_args(spec, given);
  const auto v = validate(p);
  if (!v.ok()) throw ParameterError("preset '" + n + "' has invalid parameters:\n" + v.describe());
  return m;
}

}  // namespace

void wrap_support(PksParams& p) {
  const IntensityMeasure v = p.vertical, h = p.horizontal;
  const double step = p.step();
  const auto wrap = [step](ScalarFn f, auto keep) -> ScalarFn {
    if (!f) return f;
    return [f, keep, step](double s) { return keep(s / step) ? f(s) : 0.0; };
  };
  p.p_vertical = wrap(p.p_vertical, [v](double u) { return v.in_support(u); });
  p.p_horizontal = wrap(p.p_horizontal, [h](double u) { return h.in_support(u); });
  p.turn = wrap(p.turn, [v, h](double u) { return v.in_support(u) && h.in_support(u); });
}

const std::vector<PresetInfo>& catalog_listing() {
  static const std::vector<PresetInfo> listing = [] {
    std::vector<PresetInfo> out;
    for (const auto& s : specs())
      out.push_back({s.name, s.family, s.rate_v, s.rate_h, s.kernel, s.params, s.in_scope, s.note});
    return out;
  }();
  return listing;
}

std::vector<std::string> preset_names() {
  std::vector<std::string> out;
  for (const auto& s : specs())
    if (s.in_scope) out.push_back(s.name);
  return out;
}

ModelPreset preset(const std::string& name, const PresetArgs& args) {
  return build(find_spec(name), args);
}

// ---- six-vertex -----------------------------------------------------------------

std::array<double, 6> six_vertex_weights(SixVertexVariant v, double qv, double qh) {
  if (v == SixVertexVariant::BerBer) {
    const double w12 = qv + qh - 2 * qh * qv;
    return {w12, w12, qh * (1 - qv), qv * (1 - qh), qv * (1 - qh), qh * (1 - qv)};
  }
  const double w12 = 1 - qh - qv + 2 * qv * qh;
  return {w12, w12, qv * qh, (1 - qv) * (1 - qh), (1 - qv) * (1 - qh), qv * qh};
}

int six_vertex_type(SixVertexVariant v, double s_west, double s_south, double s_east,
                    double s_north) {
  // Arrow of each edge: true = east (horizontal) / north (vertical).
  const auto horizontal_east = [](double s) { return s == 1; };
  const auto vertical_north = [v](double s) {
    return v == SixVertexVariant::BerBer ? s == 1 : s == 0;
  };
  const bool w = horizontal_east(s_west), e = horizontal_east(s_east);
  const bool s = vertical_north(s_south), n = vertical_north(s_north);
  if (w && e && s && n) return 1;
  if (!w && !e && !s && !n) return 2;
  if (w && e && !s && !n) return 3;
  if (!w && !e && s && n) return 4;
  if (w && !e && !s && n) return 5;  // horizontals in, verticals out
  if (!w && e && s && !n) return 6;  // verticals in, horizontals out
  return 0;
}

SixVertexConfig six_vertex_export(const Drawing& d, SixVertexVariant v, double qv, double qh) {
  SixVertexConfig cfg;
  cfg.weight = six_vertex_weights(v, qv, qh);
  std::vector<double> xs, ys;
  for (const Node& nd : d.nodes) {
    switch (nd.kind) {
      case NodeKind::VE: xs.push_back(nd.position.x); break;
      case NodeKind::HE: ys.push_back(nd.position.y); break;
      case NodeKind::VS:
      case NodeKind::HS:
      case NodeKind::CC:
        break;
      default:
        throw DrawingError(std::string("six-vertex export needs a pure grid; found a ") +
                           to_string(nd.kind) + " node");
    }
  }
  std::sort(xs.begin(), xs.end());
  std::sort(ys.begin(), ys.end());
  cfg.columns = static_cast<int>(xs.size());
  cfg.rows = static_cast<int>(ys.size());
  cfg.type.assign(xs.size() * ys.size(), 0);
  const auto index = [](const std::vector<double>& vals, double x) {
    const auto it = std::lower_bound(vals.begin(), vals.end(), x);
    if (it == vals.end() || *it != x) throw DrawingError("six-vertex export: crossing off the grid");
    return static_cast<int>(it - vals.begin());
  };
  const auto intensity = [&](int seg) { return d.segments[static_cast<std::size_t>(seg)].intensity; };
  for (const Node& nd : d.nodes) {
    if (nd.kind != NodeKind::CC) continue;
    const int col = index(xs, nd.position.x), row = index(ys, nd.position.y);
    const int t = six_vertex_type(v, intensity(nd.adjacent[W]), intensity(nd.adjacent[S]),
                                  intensity(nd.adjacent[E]), intensity(nd.adjacent[N]));
    if (t == 0) throw DrawingError("six-vertex export: intensities outside the variant's values");
    cfg.type[static_cast<std::size_t>(row * cfg.columns + col)] = t;
  }
  for (int t : cfg.type)
    if (t == 0) throw DrawingError("six-vertex export: grid has a missing crossing");
  return cfg;
}

}  // namespace pks
