#include "cli.hpp"

#include "swapsim/analysis.hpp"
#include "swapsim/engine.hpp"
#include "swapsim/geometry.hpp"
#include "swapsim/io.hpp"
#include "swapsim/toys.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <map>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace swapsim::cli {

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::string normalize_key(std::string key) {
  for (char& c : key) {
    if (c == '-') c = '_';
  }
  return key;
}

std::string json_scalar_text(const Json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_array()) {
    std::string joined;
    for (const auto& item : v) {
      if (!joined.empty()) joined += ',';
      joined += json_scalar_text(item);
    }
    return joined;
  }
  return v.dump();
}

/// Flat key/value settings: a config file overlaid by command-line flags.
/// The file is either `key = value` lines or a JSON document whose "meta"
/// object (or top level) holds the keys, as echoed into every report.
class RunConfig {
 public:
  void load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read config file " + path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    const std::string text = buffer.str();
    if (trim(text).starts_with('{')) {
      Json doc;
      try {
        doc = Json::parse(text);
      } catch (const Json::exception& e) {
        throw UsageError("config file " + path + " is not valid JSON: " + e.what());
      }
      const Json& meta = doc.contains("meta") ? doc["meta"] : doc;
      for (const auto& [key, value] : meta.items()) {
        if (value.is_object() || (value.is_array() && !value.empty() && value[0].is_object())) continue;
        values_[normalize_key(key)] = json_scalar_text(value);
      }
      return;
    }
    std::istringstream lines(text);
    std::string line;
    int number = 0;
    while (std::getline(lines, line)) {
      ++number;
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      line = trim(line);
      if (line.empty()) continue;
      const auto eq = line.find('=');
      if (eq == std::string::npos) {
        throw UsageError(path + ":" + std::to_string(number) + ": expected key = value");
      }
      values_[normalize_key(trim(line.substr(0, eq)))] = trim(line.substr(eq + 1));
    }
  }

  void set(const std::string& key, std::string value) { values_[normalize_key(key)] = std::move(value); }

  std::optional<std::string> get(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return std::nullopt;
    return it->second;
  }

  std::string text(const std::string& key, const std::string& fallback) const {
    return get(key).value_or(fallback);
  }

  std::int64_t integer(const std::string& key, std::int64_t fallback) const {
    const auto v = get(key);
    if (!v) return fallback;
    try {
      std::size_t used = 0;
      const auto n = std::stoll(*v, &used);
      if (used != v->size()) throw std::invalid_argument(*v);
      return n;
    } catch (const std::exception&) {
      throw UsageError("--" + key + " expects an integer, got '" + *v + "'");
    }
  }

  std::uint64_t seed() const {
    auto v = get("seed");
    if (!v) {
      if (const char* env = std::getenv("SWAPSIM_SEED")) v = std::string(env);
    }
    if (!v) return 1;
    try {
      std::size_t used = 0;
      const auto n = std::stoull(*v, &used);
      if (used != v->size() || v->starts_with('-')) throw std::invalid_argument(*v);
      return n;
    } catch (const std::exception&) {
      throw UsageError("seed must be a non-negative integer, got '" + *v + "'");
    }
  }

  bool boolean(const std::string& key, bool fallback) const {
    const auto v = get(key);
    if (!v) return fallback;
    if (*v == "true" || *v == "1" || *v == "yes") return true;
    if (*v == "false" || *v == "0" || *v == "no") return false;
    throw UsageError("--" + key + " expects true or false, got '" + *v + "'");
  }

  double real(const std::string& key, double fallback) const {
    const auto v = get(key);
    if (!v) return fallback;
    return parse_angle(*v);
  }

  std::array<double, 2> angle_pair(const std::string& key, std::array<double, 2> fallback) const {
    const auto v = get(key);
    if (!v) return fallback;
    const auto comma = v->find(',');
    if (comma == std::string::npos || v->find(',', comma + 1) != std::string::npos) {
      throw UsageError("--" + key + " expects two comma-separated angles");
    }
    return {parse_angle(v->substr(0, comma)), parse_angle(v->substr(comma + 1))};
  }

  /// Accepts plain numbers and multiples of pi such as "pi/4", "3*pi/4", "-pi".
  static double parse_angle(const std::string& raw) {
    const std::string s = trim(raw);
    try {
      const auto pi_at = s.find("pi");
      if (pi_at == std::string::npos) {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size() || !std::isfinite(v)) throw std::invalid_argument(s);
        return v;
      }
      std::string coef = trim(s.substr(0, pi_at));
      if (!coef.empty() && coef.back() == '*') coef.pop_back();
      double scale = 1.0;
      if (coef == "-") {
        scale = -1.0;
      } else if (!coef.empty() && coef != "+") {
        std::size_t used = 0;
        scale = std::stod(coef, &used);
        if (used != coef.size()) throw std::invalid_argument(s);
      }
      const std::string rest = trim(s.substr(pi_at + 2));
      double divisor = 1.0;
      if (!rest.empty()) {
        if (rest.front() != '/') throw std::invalid_argument(s);
        std::size_t used = 0;
        divisor = std::stod(rest.substr(1), &used);
        if (used != rest.size() - 1 || divisor == 0.0) throw std::invalid_argument(s);
      }
      return scale * std::numbers::pi / divisor;
    } catch (const std::exception&) {
      throw UsageError("cannot parse angle '" + s + "'");
    }
  }

 private:
  std::map<std::string, std::string> values_;
};

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << content;
  out.flush();
  if (!out) throw IoError("failed writing " + path);
}

std::string dump(const Json& doc) { return doc.dump(2) + "\n"; }

/// Report to <out>.report.json, or to stdout when no --out was given.
void emit_report(const std::optional<std::string>& out_prefix, const Json& report, std::ostream& out) {
  if (out_prefix) {
    write_file(*out_prefix + ".report.json", dump(report));
  } else {
    out << dump(report);
  }
}

ExperimentConfig experiment_config(const RunConfig& rc, Json& meta) {
  ExperimentConfig cfg;
  const std::string geometry = rc.text("geometry", "early");
  try {
    cfg.geometry = preset_by_name(geometry);
    cfg.herald = HeraldPredicate::parse(rc.text("herald", "psi-"));
    cfg.bsm_mode = parse_bsm_mode(rc.text("bsm", "full"));
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  cfg.n_trials = rc.integer("trials", 100000);
  if (cfg.n_trials < 1) throw UsageError("--trials must be at least 1");
  cfg.seed = rc.seed();
  const auto defaults = AngleMap::chsh_optimal();
  cfg.angles.a = rc.angle_pair("angles_a", defaults.a);
  cfg.angles.b = rc.angle_pair("angles_b", defaults.b);
  cfg.c_enabled = rc.boolean("c_enabled", true);

  meta["geometry"] = preset_token(cfg.geometry.name);
  meta["trials"] = cfg.n_trials;
  meta["seed"] = cfg.seed;
  meta["angles_a"] = {cfg.angles.a[0], cfg.angles.a[1]};
  meta["angles_b"] = {cfg.angles.b[0], cfg.angles.b[1]};
  meta["herald"] = cfg.herald.name();
  meta["bsm"] = bsm_mode_token(cfg.bsm_mode);
  meta["c_enabled"] = cfg.c_enabled;
  return cfg;
}

Json exact_section(const ExperimentConfig& cfg) {
  Json section;
  const auto combination = extremal_combination(cfg.angles);
  if (cfg.c_enabled) {
    const auto table = exact_experiment_distribution(cfg);
    double herald_mass = 0.0;
    for (double p : table.heralded_abAB(cfg.herald)) herald_mass += p;
    section["herald_probability"] = herald_mass;
    const auto corr = exact_correlators(table, cfg.herald);
    section["correlators"] = to_json(corr);
    bool all_defined = true;
    for (int k = 0; k < 4; ++k) all_defined = all_defined && corr.E[k].has_value();
    if (all_defined) section["chsh"] = to_json(chsh(corr, combination));
    section["fragility"] = to_json(fragility(cfg));
  }
  section["nda"] = to_json(no_difference_check(cfg));
  return section;
}

Json ci_array(const CategoricalData& data, std::initializer_list<CITestSpec> specs,
              const std::string& suffix = "") {
  Json out = Json::array();
  for (auto spec : specs) {
    spec.hypothesis += suffix;
    out.push_back(to_json(test_conditional_independence(data, spec)));
  }
  return out;
}

int cmd_simulate(const RunConfig& rc, const std::optional<std::string>& out_prefix, unsigned threads,
                 std::ostream& out) {
  if (!out_prefix) throw UsageError("simulate requires --out");
  Json meta{{"command", "simulate"}};
  const ExperimentConfig cfg = experiment_config(rc, meta);
  const bool exact = rc.boolean("exact", false);
  meta["exact"] = exact;

  Json report{{"meta", meta}};
  if (exact) {
    report["mode"] = "exact";
    report.update(exact_section(cfg));
    write_file(*out_prefix + ".report.json", dump(report));
    out << "wrote " << *out_prefix << ".report.json\n";
    return kExitOk;
  }

  const Ensemble ensemble = run_trials(cfg, threads);
  const Ensemble heralded = post_select(ensemble);
  const auto combination = extremal_combination(cfg.angles);

  {
    std::ostringstream csv;
    write_ensemble_csv(csv, ensemble);
    write_file(*out_prefix + ".csv", csv.str());
  }
  write_file(*out_prefix + ".json", dump(ensemble_to_json(ensemble, meta)));

  const double n = static_cast<double>(ensemble.records.size());
  const double frac = static_cast<double>(heralded.records.size()) / n;
  report["mode"] = "monte_carlo";
  report["ensemble"] = Json{{"n_trials", ensemble.records.size()},
                            {"n_heralded", heralded.records.size()},
                            {"heralded_fraction", frac},
                            {"heralded_fraction_stderr", std::sqrt(frac * (1.0 - frac) / n)},
                            {"config_digest", ensemble.config_digest}};
  const auto corr = correlators(heralded.records);
  report["correlators"] = to_json(corr);
  try {
    report["chsh"] = to_json(chsh(corr, combination));
  } catch (const std::invalid_argument&) {
    report["chsh"] = nullptr;
  }
  Json tests = ci_array(to_categorical(ensemble.records), {no_signaling_a_spec(), no_signaling_b_spec()});
  for (auto& t : ci_array(to_categorical(heralded.records), {lc_ps_a_spec(), lc_ps_b_spec()})) {
    tests.push_back(std::move(t));
  }
  report["ci_tests"] = std::move(tests);
  report["exact"] = exact_section(cfg);
  write_file(*out_prefix + ".report.json", dump(report));
  out << "wrote " << *out_prefix << ".csv, .json, .report.json\n";
  return kExitOk;
}

int cmd_toy(const RunConfig& rc, const std::optional<std::string>& out_prefix, std::ostream& out) {
  const std::string variant = rc.text("variant", "collider");
  if (variant != "collider" && variant != "source") {
    throw UsageError("--variant must be collider or source");
  }
  const auto n = rc.integer("trials", 100000);
  if (n < 1) throw UsageError("--trials must be at least 1");
  const auto seed = rc.seed();
  AngleMap angles = AngleMap::chsh_optimal();
  angles.a = rc.angle_pair("angles_a", angles.a);
  angles.b = rc.angle_pair("angles_b", angles.b);

  Json meta{{"command", "toy"}, {"variant", variant}, {"trials", n}, {"seed", seed},
            {"angles_a", {angles.a[0], angles.a[1]}}, {"angles_b", {angles.b[0], angles.b[1]}},
            {"rule", "bell"}};

  const auto rule = AcceptanceRule::bell(angles);
  const auto trials = variant == "collider" ? run_toy_collider(n, seed, rule)
                                            : run_toy_source_variant(n, seed, rule);
  const auto accepted = accepted_only(trials);

  std::int64_t a_plus = 0;
  std::int64_t b_plus = 0;
  for (const auto& t : trials) {
    a_plus += t.A == +1;
    b_plus += t.B == +1;
  }
  const double nd = static_cast<double>(trials.size());
  Json report{{"meta", meta}};
  report["n_trials"] = trials.size();
  report["n_accepted"] = accepted.size();
  report["generator_marginals"] = Json{{"P_A_plus", a_plus / nd},
                                       {"P_B_plus", b_plus / nd},
                                       {"stderr", std::sqrt(0.25 / nd)}};
  const auto corr = correlators(accepted);
  report["correlators"] = to_json(corr);
  try {
    report["chsh"] = to_json(chsh(corr, extremal_combination(angles)));
  } catch (const std::invalid_argument&) {
    report["chsh"] = nullptr;
  }

  const auto full = to_categorical(trials);
  const auto post = to_categorical(accepted);
  Json tests = Json::array();
  auto add = [&](const CategoricalData& d, CITestSpec spec) {
    tests.push_back(to_json(test_conditional_independence(d, spec)));
  };
  add(full, {"no-signaling-A", {"A"}, {"a"}, {"b"}});
  add(full, {"no-signaling-B", {"B"}, {"b"}, {"a"}});
  add(full, {"LC-A", {"A"}, {"a"}, {"b", "B"}});
  add(full, {"LC-B", {"B"}, {"b"}, {"a", "A"}});
  if (variant == "collider") {
    add(post, lc_ps_a_spec());
    add(post, lc_ps_b_spec());
  } else {
    add(full, si_spec());
    add(post, {"SI_ps", {"lambda_A", "lambda_B"}, {}, {"a", "b"}});
    add(post, {"LC_ps-A|lambda", {"A"}, {"a", "lambda_A", "lambda_B"}, {"b", "B"}});
    add(post, {"LC_ps-B|lambda", {"B"}, {"b", "lambda_A", "lambda_B"}, {"a", "A"}});
  }
  report["ci_tests"] = std::move(tests);

  if (out_prefix) {
    std::ostringstream csv;
    write_toy_csv(csv, trials);
    write_file(*out_prefix + ".csv", csv.str());
  }
  emit_report(out_prefix, report, out);
  return kExitOk;
}

int cmd_rps(const RunConfig& rc, const std::optional<std::string>& out_prefix, std::ostream& out) {
  const auto n = rc.integer("trials", 10000);
  if (n < 1) throw UsageError("--trials must be at least 1");
  const auto seed = rc.seed();
  const auto trials = run_rps(n, seed);
  const auto data = to_categorical(trials);

  std::int64_t rock_rock = 0;
  for (const auto& t : trials) rock_rock += t.alice == RpsChoice::Rock && t.bob == RpsChoice::Rock;

  Json report{{"meta", {{"command", "rps"}, {"trials", n}, {"seed", seed}}}};
  report["p_rock_rock"] = static_cast<double>(rock_rock) / static_cast<double>(n);
  Json tests = Json::array();
  tests.push_back(to_json(test_conditional_independence(data, {"choices-independent", {"alice"}, {}, {"bob"}})));
  for (RpsVerdict v : {RpsVerdict::AliceWins, RpsVerdict::BobWins, RpsVerdict::Draw}) {
    const auto subset = data.filter_equal("verdict", static_cast<int>(v));
    tests.push_back(to_json(test_conditional_independence(
        subset, {"choices-independent|" + to_string(v), {"alice"}, {}, {"bob"}})));
  }
  report["ci_tests"] = std::move(tests);

  if (out_prefix) {
    std::ostringstream csv;
    write_rps_csv(csv, trials);
    write_file(*out_prefix + ".csv", csv.str());
  }
  emit_report(out_prefix, report, out);
  return kExitOk;
}

int cmd_teleport(const RunConfig& rc, const std::optional<std::string>& out_prefix, std::ostream& out) {
  const bool controlled = rc.boolean("controlled", true);
  const auto n = rc.integer("trials", 100000);
  if (n < 1) throw UsageError("--trials must be at least 1");
  const auto seed = rc.seed();
  const auto result = teleport_channel_demo(controlled, n, seed);
  Json report{{"meta", {{"command", "teleport"}, {"controlled", controlled}, {"trials", n}, {"seed", seed}}}};
  report["teleport"] = to_json(result);
  emit_report(out_prefix, report, out);
  return kExitOk;
}

SpacetimeEvent parse_event(const std::string& spec) {
  const auto eq = spec.find('=');
  const auto comma = spec.find(',', eq == std::string::npos ? 0 : eq);
  if (eq == std::string::npos || comma == std::string::npos) {
    throw UsageError("--event expects LABEL=t,x, got '" + spec + "'");
  }
  SpacetimeEvent e;
  try {
    e.label = parse_event_label(trim(spec.substr(0, eq)));
  } catch (const std::invalid_argument& ex) {
    throw UsageError(ex.what());
  }
  e.t = RunConfig::parse_angle(spec.substr(eq + 1, comma - eq - 1));
  e.x = RunConfig::parse_angle(spec.substr(comma + 1));
  return e;
}

int cmd_geometry(const RunConfig& rc, const std::vector<std::string>& events,
                 const std::vector<std::string>& boosts, std::ostream& out) {
  GeometryPreset preset;
  try {
    preset = preset_by_name(rc.get("preset").value_or(rc.text("geometry", "early")));
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  for (const auto& e : events) preset = with_event(preset, parse_event(e));

  std::vector<double> velocities{0.0};
  for (const auto& b : boosts) {
    const double v = RunConfig::parse_angle(b);
    if (!(std::abs(v) < 1.0)) throw UsageError("--boost must satisfy |v| < 1");
    if (v != 0.0) velocities.push_back(v);
  }

  out << "preset: " << to_string(preset.name) << "\n";
  out << "events:\n";
  for (const auto& e : preset.events) {
    out << "  " << std::left << std::setw(12) << to_string(e.label) << " t=" << e.t << " x=" << e.x << "\n";
  }
  out << "relations (second relative to first):\n";
  for (std::size_t i = 0; i < preset.events.size(); ++i) {
    for (std::size_t j = i + 1; j < preset.events.size(); ++j) {
      out << "  " << std::left << std::setw(12) << to_string(preset.events[i].label) << std::setw(12)
          << to_string(preset.events[j].label) << to_string(classify(preset.events[i], preset.events[j]))
          << "\n";
    }
  }
  out << "classification: " << to_string(classify_geometry(preset)) << "\n";
  for (const auto& problem : preset_violations(preset)) out << "warning: " << problem << "\n";
  out << "time order:\n";
  for (double v : velocities) {
    out << "  v=" << v << ":";
    for (EventLabel label : boosted_time_order(preset, v)) {
      const double t = boosted_time(preset.event(label), v);
      out << " " << to_string(label) << "(" << t << ")";
    }
    out << "\n";
  }
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Entanglement-swapping Bell test simulator and collider-bias diagnostics", "swapsim"};
  app.require_subcommand(1);

  std::map<std::string, std::string> flags;
  std::string config_path;
  std::optional<std::string> out_prefix;
  std::vector<std::string> boosts;
  std::vector<std::string> events;
  unsigned threads = 0;

  const auto value_flag = [&](CLI::App* sub, const std::string& name, const std::string& help) {
    sub->add_option("--" + name, flags[normalize_key(name)], help);
  };
  const auto common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "key = value file (or a JSON report whose meta is reused)");
    sub->add_option("--trials", flags["trials"], "number of trials");
    sub->add_option("--seed", flags["seed"], "master seed (default: $SWAPSIM_SEED, else 1)");
  };

  auto* simulate = app.add_subcommand("simulate", "run the quantum experiment and analyse it");
  common(simulate);
  value_flag(simulate, "geometry", "early | delayed | spacelike");
  value_flag(simulate, "angles-a", "two angles for A, e.g. 0,pi/2");
  value_flag(simulate, "angles-b", "two angles for B, e.g. pi/4,3*pi/4");
  value_flag(simulate, "herald", "psi- (default), any, or outcomes joined by |");
  value_flag(simulate, "bsm", "full | partial | partial-psi+");
  value_flag(simulate, "c-enabled", "true | false");
  simulate->add_flag("--exact", "exact enumeration instead of sampling");
  simulate->add_option("--out", out_prefix, "output path prefix");
  simulate->add_option("--threads", threads, "worker threads (0 = auto)");

  auto* toy = app.add_subcommand("toy", "classical collider toy models");
  common(toy);
  value_flag(toy, "variant", "collider | source");
  value_flag(toy, "angles-a", "two angles for the A setting map");
  value_flag(toy, "angles-b", "two angles for the B setting map");
  toy->add_option("--out", out_prefix, "output path prefix (report to stdout if omitted)");

  auto* rps = app.add_subcommand("rps", "rock-paper-scissors selection example");
  common(rps);
  rps->add_option("--out", out_prefix, "output path prefix (report to stdout if omitted)");

  auto* geometry = app.add_subcommand("geometry", "classify events and show boosted time orders");
  value_flag(geometry, "geometry", "early | delayed | spacelike");
  value_flag(geometry, "preset", "alias of --geometry");
  geometry->add_option("--boost", boosts, "frame velocity, repeatable, |v| < 1");
  geometry->add_option("--event", events, "override an event: LABEL=t,x (repeatable)");

  auto* teleport = app.add_subcommand("teleport", "teleportation through a controlled collider");
  common(teleport);
  value_flag(teleport, "controlled", "true | false");
  teleport->add_option("--out", out_prefix, "output path prefix (report to stdout if omitted)");

  std::vector<std::string> argv_storage{"swapsim"};
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : argv_storage) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return kExitUsage;
  }

  try {
    RunConfig rc;
    if (!config_path.empty()) rc.load_file(config_path);
    for (auto* sub : app.get_subcommands()) {
      for (const auto* opt : sub->get_options()) {
        const std::string name = opt->get_name(false, true);
        if (opt->count() == 0 || !name.starts_with("--")) continue;
        const std::string key = normalize_key(name.substr(2));
        if (const auto it = flags.find(key); it != flags.end()) rc.set(key, it->second);
      }
      if (sub == simulate && simulate->count("--exact") > 0) rc.set("exact", "true");
    }

    if (simulate->parsed()) return cmd_simulate(rc, out_prefix, threads, out);
    if (toy->parsed()) return cmd_toy(rc, out_prefix, out);
    if (rps->parsed()) return cmd_rps(rc, out_prefix, out);
    if (geometry->parsed()) return cmd_geometry(rc, events, boosts, out);
    if (teleport->parsed()) return cmd_teleport(rc, out_prefix, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    for (auto* sub : app.get_subcommands()) err << sub->help();
    return kExitUsage;
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return kExitIo;
  }
  return kExitUsage;
}

}  // namespace swapsim::cli
