#include "pks/cli.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "pks/expression.hpp"
#include "pks/render.hpp"

namespace pks {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

// Splits on commas outside parentheses.
std::vector<std::string> split_args(const std::string& s) {
  std::vector<std::string> out;
  int depth = 0;
  std::string cur;
  for (char c : s) {
    if (c == '(') ++depth;
    if (c == ')') --depth;
    if (c == ',' && depth == 0) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!trim(cur).empty() || !out.empty()) out.push_back(trim(cur));
  return out;
}

long parse_integer(const std::string& text) {
  const double v = parse_number(text);
  if (v != std::floor(v)) throw ParameterError("expected an integer, got '" + text + "'");
  return static_cast<long>(v);
}

double to_double(const std::string& key, const std::string& value) {
  try {
    return parse_number(value);
  } catch (const ParameterError& e) {
    throw ParameterError(key + ": " + e.what());
  }
}

std::uint64_t to_unsigned(const std::string& key, const std::string& value) {
  const double v = to_double(key, value);
  if (v < 0 || v != std::floor(v)) throw ParameterError(key + ": expected a nonnegative integer");
  return static_cast<std::uint64_t>(v);
}

}  // namespace

IntensityMeasure parse_measure(const std::string& text) {
  std::string s = trim(text);
  bool negate = false;
  if (!s.empty() && s[0] == '-') {
    negate = true;
    s = trim(s.substr(1));
  }
  std::optional<double> mass;
  const auto close = s.rfind(')');
  if (close == std::string::npos) throw ParameterError("measure '" + text + "': expected name(arguments)");
  const std::string tail = trim(s.substr(close + 1));
  if (!tail.empty()) {
    if (tail[0] != '*') throw ParameterError("measure '" + text + "': unexpected '" + tail + "'");
    mass = parse_number(tail.substr(1));
    if (!(*mass > 0)) throw ParameterError("measure '" + text + "': mass must be positive");
  }
  const auto open = s.find('(');
  if (open == std::string::npos || open > close)
    throw ParameterError("measure '" + text + "': expected name(arguments)");
  const std::string name = trim(s.substr(0, open));
  const auto args = split_args(s.substr(open + 1, close - open - 1));
  const auto need = [&](std::size_t lo, std::size_t hi) {
    if (args.size() < lo || args.size() > hi)
      throw ParameterError("measure '" + name + "': wrong number of arguments");
  };
  const auto num = [&](std::size_t i) { return parse_number(args[i]); };

  IntensityMeasure m;
  if (name == "normal") {
    need(2, 2);
    m = measures::normal(num(0), num(1));
  } else if (name == "exponential") {
    need(1, 1);
    m = measures::exponential(num(0));
  } else if (name == "gamma") {
    need(2, 2);
    m = measures::gamma(num(0), num(1));
  } else if (name == "uniform") {
    need(2, 2);
    m = measures::uniform(num(0), num(1));
  } else if (name == "beta") {
    need(2, 2);
    m = measures::beta(num(0), num(1));
  } else if (name == "density") {
    need(3, 3);
    m = measures::from_density(parse_function(args[0]), num(1), num(2), "density(" + args[0] + ")");
  } else if (name == "dirac") {
    need(1, 1);
    m = measures::dirac(parse_integer(args[0]));
  } else if (name == "bernoulli") {
    need(1, 1);
    m = measures::bernoulli(num(0));
  } else if (name == "binomial") {
    need(2, 2);
    m = measures::binomial(static_cast<int>(parse_integer(args[0])), num(1));
  } else if (name == "geometric") {
    need(1, 2);
    m = measures::geometric(num(0), args.size() > 1 ? parse_integer(args[1]) : 0);
  } else if (name == "poisson") {
    need(1, 1);
    m = measures::poisson(num(0));
  } else if (name == "discrete_uniform") {
    need(2, 2);
    m = measures::discrete_uniform(parse_integer(args[0]), parse_integer(args[1]));
  } else if (name == "pmf") {
    if (args.size() < 2) throw ParameterError("measure 'pmf': needs first atom and masses");
    std::vector<double> masses;
    for (std::size_t i = 1; i < args.size(); ++i) masses.push_back(num(i));
    m = measures::from_pmf(parse_integer(args[0]), masses);
  } else {
    throw ParameterError("unknown measure '" + name + "'");
  }
  if (negate) m = m.negated();
  if (mass) m = m.with_mass(*mass);
  return m;
}

void load_config(const std::string& path, RunConfig& cfg) {
  namespace pt = boost::property_tree;
  std::ifstream file(path);
  if (!file) throw ParameterError("config: cannot open " + path);
  // Comments may follow a value; lines are kept so error line numbers hold.
  std::stringstream clean;
  for (std::string line; std::getline(file, line);)
    clean << line.substr(0, line.find_first_of("#;")) << "\n";
  pt::ptree tree;
  try {
    pt::read_ini(clean, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ParameterError("config " + path + ", line " + std::to_string(e.line()) + ": " + e.message());
  }
  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty())
      throw ParameterError("config " + path + ": key '" + section + "' outside a section");
    for (const auto& [key, node] : body) {
      const std::string value = trim(node.data());
      const std::string where = section + "." + key;
      if (section == "model") {
        if (key == "preset")
          cfg.preset = value;
        else
          cfg.model[key] = value;
      } else if (section == "run") {
        if (key == "a")
          cfg.a = to_double(where, value);
        else if (key == "b")
          cfg.b = to_double(where, value);
        else if (key == "seed")
          cfg.seed = to_unsigned(where, value);
        else if (key == "replicas")
          cfg.replicas = to_unsigned(where, value);
        else if (key == "threads")
          cfg.threads = static_cast<unsigned>(to_unsigned(where, value));
        else if (key == "output")
          cfg.output = value;
        else
          throw ParameterError("config: unknown key " + where);
      } else if (section == "verify") {
        if (key == "level")
          cfg.stat.level = to_double(where, value);
        else if (key == "band")
          cfg.stat.band = to_double(where, value);
        else if (key == "tolerance")
          cfg.stat.tolerance = to_double(where, value);
        else if (key == "alpha")
          cfg.alpha = value == "inf" ? std::numeric_limits<double>::infinity() : to_double(where, value);
        else if (key == "steps")
          cfg.steps = static_cast<int>(to_unsigned(where, value));
        else if (key == "kernel_samples")
          cfg.kernel_samples = to_unsigned(where, value);
        else if (key == "report")
          cfg.report = value;
        else
          throw ParameterError("config: unknown key " + where);
      } else if (section == "simulation") {
        if (key == "vertical_turn_factor")
          cfg.sim.vertical_turn_factor = to_double(where, value);
        else
          throw ParameterError("config: unknown key " + where);
      } else {
        throw ParameterError("config: unknown section [" + section + "]");
      }
    }
  }
}

ResolvedModel resolve_model(const RunConfig& cfg) {
  ResolvedModel r;
  if (!cfg.preset.empty()) {
    r.preset = preset(cfg.preset, cfg.model);
    r.params = r.preset->params;
    return r;
  }
  if (cfg.model.empty()) throw ParameterError("no model given: use --preset or a [model] section");
  const auto get = [&](const std::string& key, const std::string& fallback) {
    const auto it = cfg.model.find(key);
    if (it != cfg.model.end()) return it->second;
    if (fallback.empty()) throw ParameterError("model: missing '" + key + "'");
    return fallback;
  };
  for (const auto& [key, value] : cfg.model)
    if (key != "vertical" && key != "horizontal" && key != "p_V" && key != "p_H" && key != "q" &&
        key != "p_0")
      throw ParameterError("model: unknown key '" + key + "'");

  PksParams& p = r.params;
  p.vertical = parse_measure(get("vertical", ""));
  p.horizontal = parse_measure(get("horizontal", ""));
  if (p.vertical.kind() != p.horizontal.kind())
    throw ParameterError("model: mixed continuous/atomic measures are not supported");
  p.p_vertical = parse_function(get("p_V", "0"));
  p.p_horizontal = parse_function(get("p_H", "0"));
  p.turn = parse_function(get("q", "0"));
  p.p_annihilation = to_double("p_0", get("p_0", "0"));
  std::ostringstream desc;
  desc << "inline vertical=" << get("vertical", "") << " horizontal=" << get("horizontal", "")
       << " p_V=" << get("p_V", "0") << " p_H=" << get("p_H", "0") << " q=" << get("q", "0")
       << " p_0=" << get("p_0", "0");
  p.description = desc.str();
  wrap_support(p);
  const ValidationResult v = validate(p);
  if (!v.ok()) throw ParameterError("model: " + v.describe());
  return r;
}

// ---- commands ---------------------------------------------------------------------

namespace {

const std::vector<std::string> kSuites = {"rates", "kernels", "exits", "cross-section",
                                          "reversibility", "means", "faces"};

void write_file(const std::string& path, const std::string& text) {
  const std::filesystem::path fp(path);
  if (fp.has_parent_path()) std::filesystem::create_directories(fp.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << text;
  if (!f) throw std::runtime_error("cannot write " + path);
}

int cmd_simulate(const RunConfig& cfg, std::ostream& out) {
  const ResolvedModel m = resolve_model(cfg);
  if (cfg.replicas == 0) throw ParameterError("replicas must be positive");
  if (!(cfg.a > 0) || !(cfg.b > 0)) throw ParameterError("box sides must be positive");
  // One replica uses the seed itself; several use seeds derived from it.
  std::vector<std::string> docs;
  if (cfg.replicas == 1) {
    docs.push_back(serialize(simulate(m.params, cfg.a, cfg.b, cfg.seed, cfg.sim)));
  } else {
    docs = map_replicas<std::string>(
        cfg.replicas, cfg.seed,
        [&](std::size_t, std::uint64_t seed) {
          return serialize(simulate(m.params, cfg.a, cfg.b, seed, cfg.sim));
        },
        cfg.threads);
  }
  if (cfg.replicas == 1) {
    const std::string path = cfg.output.empty() ? "drawing.pks" : cfg.output;
    write_file(path, docs[0]);
    out << path << "\n";
    return 0;
  }
  const std::filesystem::path dir(cfg.output.empty() ? "drawings" : cfg.output);
  for (std::size_t i = 0; i < docs.size(); ++i) {
    std::ostringstream name;
    name << "drawing-" << std::setw(4) << std::setfill('0') << i << ".pks";
    const std::string path = (dir / name.str()).string();
    write_file(path, docs[i]);
    out << path << "\n";
  }
  return 0;
}

int cmd_render(const std::string& input, const std::string& mode, const std::string& output,
               double scale, std::ostream& out) {
  RenderStyle style;
  style.mode = mode == "potential" ? RenderMode::Potential : RenderMode::Lines;
  style.pixels_per_unit = scale;
  const Drawing d = load_drawing(input);
  std::string path = output;
  if (path.empty()) path = std::filesystem::path(input).replace_extension(".svg").string();
  write_file(path, render_svg(d, style));
  out << path << "\n";
  return 0;
}

int cmd_verify(const RunConfig& cfg, std::vector<std::string> suites, std::ostream& out) {
  const ResolvedModel m = resolve_model(cfg);
  if (suites.empty()) suites = kSuites;
  const auto wants = [&](const std::string& s) {
    return std::find(suites.begin(), suites.end(), s) != suites.end();
  };
  if ((wants("rates") || wants("kernels")) && !m.preset)
    throw ParameterError("the rates and kernels suites need a catalog preset");

  std::vector<StatReport> reports;
  const auto add = [&](std::vector<StatReport> r) {
    reports.insert(reports.end(), r.begin(), r.end());
  };
  if (wants("rates")) add(test_rates(*m.preset));
  if (wants("kernels")) add(test_kernels(*m.preset, cfg.kernel_samples, cfg.seed, cfg.stat));

  const bool ensemble_needed = wants("exits") || wants("cross-section") ||
                               wants("reversibility") || wants("means") || wants("faces");
  if (ensemble_needed) {
    if (cfg.replicas < 2) throw ParameterError("ensemble suites need at least 2 replicas");
    EnsembleSpec spec;
    spec.a = cfg.a;
    spec.b = cfg.b;
    spec.replicas = cfg.replicas;
    spec.seed = cfg.seed;
    spec.threads = cfg.threads;
    spec.sim = cfg.sim;
    spec.faces = wants("means") || wants("faces");
    spec.reversibility = wants("reversibility");
    if (wants("cross-section")) {
      spec.cuts.push_back(slope_cut(cfg.a, cfg.b, cfg.alpha));
      spec.cuts.push_back(staircase_cut(cfg.a, cfg.b, cfg.steps));
    }
    const Ensemble e = run_ensemble(m.params, spec);
    if (wants("exits")) add(test_exit_processes(e, cfg.stat));
    if (wants("cross-section")) add(test_cross_section(e, cfg.stat));
    if (wants("reversibility")) add(test_reversibility(e, cfg.stat));
    if (wants("means")) add(test_mean_counts(e, cfg.stat));
    if (wants("faces")) add(test_face_limits(e, cfg.stat));
  }

  std::ostringstream desc;
  desc << (m.preset ? "preset " + m.preset->name : m.params.description) << "; box " << cfg.a
       << "x" << cfg.b << "; replicas " << cfg.replicas << "; seed " << cfg.seed;
  const std::string text = format_text(reports);
  out << text;
  if (!cfg.report.empty()) {
    write_file(cfg.report + ".txt", text);
    write_file(cfg.report + ".json", format_json(reports, desc.str()));
  }
  const bool ok = all_passed(reports);
  std::size_t failed = 0;
  for (const auto& r : reports) failed += r.passed() ? 0 : 1;
  out << (ok ? "verify: all " + std::to_string(reports.size()) + " checks passed\n"
             : "verify: " + std::to_string(failed) + " of " + std::to_string(reports.size()) +
                   " checks failed\n");
  return ok ? 0 : 1;
}

int cmd_catalog(bool json, std::ostream& out) {
  const auto& rows = catalog_listing();
  if (json) {
    nlohmann::ordered_json list = nlohmann::ordered_json::array();
    for (const auto& r : rows) {
      nlohmann::ordered_json params = nlohmann::ordered_json::array();
      for (const auto& p : r.parameters)
        params.push_back({{"name", p.name}, {"default", p.default_value}, {"help", p.help}});
      list.push_back({{"name", r.name},
                      {"family", r.family},
                      {"in_scope", r.in_scope},
                      {"rate_vertical", r.rate_vertical},
                      {"rate_horizontal", r.rate_horizontal},
                      {"kernel", r.kernel},
                      {"parameters", params},
                      {"note", r.note}});
    }
    out << nlohmann::ordered_json{{"format", "pks-catalog"}, {"presets", list}}.dump(2) << "\n";
    return 0;
  }
  for (const auto& r : rows) {
    out << r.name << "  " << r.family << (r.in_scope ? "" : "  [out of scope]") << "\n";
    if (!r.in_scope) {
      out << "    " << r.note << "\n";
      continue;
    }
    out << "    G/g_V: " << r.rate_vertical << "\n";
    out << "    G/g_H: " << r.rate_horizontal << "\n";
    out << "    kernel: " << r.kernel << "\n";
    if (!r.parameters.empty()) {
      out << "    parameters:";
      for (const auto& p : r.parameters) out << " " << p.name << "=" << p.default_value;
      out << "\n";
    }
    if (!r.note.empty()) out << "    " << r.note << "\n";
  }
  return 0;
}

// Flags that override the config file when given.
struct Overrides {
  std::string config;
  std::optional<std::string> preset;
  std::vector<std::string> params;
  std::optional<double> a, b, turn_factor;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> replicas;
  std::optional<unsigned> threads;
  std::optional<std::string> output;

  void add_to(CLI::App* app, bool ensemble) {
    app->add_option("--config,-c", config, "INI config file")->check(CLI::ExistingFile);
    app->add_option("--preset,-p", preset, "catalog preset name");
    app->add_option("--param", params, "model key=value (preset argument or inline key)")
        ->allow_extra_args(false);
    app->add_option("--a", a, "box width");
    app->add_option("--b", b, "box height");
    app->add_option("--seed", seed, "master seed");
    app->add_option("--replicas,-n", replicas, "number of replicas");
    app->add_option("--threads,-j", threads, "worker threads (0 = all cores)");
    if (ensemble)
      app->add_option("--vertical-turn-factor", turn_factor,
                      "multiply the vertical turn rate (breaks the dynamics; for canaries)");
  }

  RunConfig resolve(RunConfig cfg) const {
    if (!config.empty()) load_config(config, cfg);
    if (preset) cfg.preset = *preset;
    for (const auto& kv : params) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos || eq == 0) throw ParameterError("--param expects key=value, got '" + kv + "'");
      cfg.model[trim(kv.substr(0, eq))] = trim(kv.substr(eq + 1));
    }
    if (a) cfg.a = *a;
    if (b) cfg.b = *b;
    if (seed) cfg.seed = *seed;
    if (replicas) cfg.replicas = *replicas;
    if (threads) cfg.threads = *threads;
    if (output) cfg.output = *output;
    if (turn_factor) cfg.sim.vertical_turn_factor = *turn_factor;
    return cfg;
  }
};

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Poisson-Kirchhoff system simulator and verification harness", "pks"};
  app.require_subcommand(1);

  Overrides sim_flags, verify_flags;
  auto* simulate_cmd = app.add_subcommand("simulate", "simulate drawings and write them to disk");
  sim_flags.add_to(simulate_cmd, true);
  simulate_cmd->add_option("--output,-o", sim_flags.output,
                           "output file (one replica) or directory (several)");

  std::string render_in, render_out, render_mode = "lines";
  double render_scale = 12;
  auto* render_cmd = app.add_subcommand("render", "render a drawing file as SVG");
  render_cmd->add_option("drawing", render_in, "drawing file")->required();
  render_cmd->add_option("--mode,-m", render_mode, "lines or potential")
      ->check(CLI::IsMember({"lines", "potential"}));
  render_cmd->add_option("--output,-o", render_out, "SVG path (default: drawing with .svg)");
  render_cmd->add_option("--scale", render_scale, "pixels per unit length")
      ->check(CLI::PositiveNumber);

  std::vector<std::string> suites;
  std::optional<double> level, band, tolerance, alpha;
  std::optional<std::size_t> kernel_samples;
  std::optional<std::string> report;
  auto* verify_cmd = app.add_subcommand("verify", "run statistical verification suites");
  verify_flags.add_to(verify_cmd, true);
  verify_cmd->add_option("--suite,-s", suites, "suite(s) to run (default: all)")
      ->check(CLI::IsMember(kSuites));
  verify_cmd->add_option("--level", level, "per-suite significance level");
  verify_cmd->add_option("--band", band, "standard errors allowed for means");
  verify_cmd->add_option("--tolerance", tolerance, "tolerance for face-limit means");
  verify_cmd->add_option("--alpha", alpha, "slope of the cross-section cut");
  verify_cmd->add_option("--kernel-samples", kernel_samples, "samples per kernel point");
  verify_cmd->add_option("--report,-r", report,
                         "report path prefix; writes PREFIX.txt and PREFIX.json ('' to skip)");

  bool catalog_json = false;
  auto* catalog_cmd = app.add_subcommand("catalog", "list the model catalog");
  catalog_cmd->add_flag("--json", catalog_json, "machine-readable listing");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*simulate_cmd) {
      RunConfig cfg;
      cfg = sim_flags.resolve(cfg);
      return cmd_simulate(cfg, out);
    }
    if (*render_cmd) return cmd_render(render_in, render_mode, render_out, render_scale, out);
    if (*verify_cmd) {
      RunConfig cfg;
      cfg.replicas = 200;
      cfg = verify_flags.resolve(cfg);
      if (level) cfg.stat.level = *level;
      if (band) cfg.stat.band = *band;
      if (tolerance) cfg.stat.tolerance = *tolerance;
      if (alpha) cfg.alpha = *alpha;
      if (kernel_samples) cfg.kernel_samples = *kernel_samples;
      if (report) cfg.report = *report;
      return cmd_verify(cfg, suites, out);
    }
    if (*catalog_cmd) return cmd_catalog(catalog_json, out);
  } catch (const std::exception& e) {
    err << "pks: " << e.what() << "\n";
    return 2;
  }
  return 2;
}

}  // namespace pks
