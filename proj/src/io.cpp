#include "swapsim/io.hpp"

#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace swapsim {

namespace {

constexpr const char* kEnsembleHeader = "trial_id,a,b,A,B,c_outcome,heralded";

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

int parse_int(const std::string& s) {
  std::size_t used = 0;
  const int v = std::stoi(s, &used);
  if (used != s.size()) throw std::runtime_error("bad integer field: " + s);
  return v;
}

}  // namespace

void write_ensemble_csv(std::ostream& out, const Ensemble& ensemble) {
  out << kEnsembleHeader << '\n';
  for (const auto& r : ensemble.records) {
    out << r.trial_id << ',' << r.a << ',' << r.b << ',' << r.A << ',' << r.B << ','
        << bell_token(r.c_outcome) << ',' << (r.heralded ? 1 : 0) << '\n';
  }
}

std::vector<TrialRecord> read_ensemble_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kEnsembleHeader) {
    throw std::runtime_error("ensemble CSV has an unexpected header");
  }
  std::vector<TrialRecord> records;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split_csv(line);
    if (f.size() != 7) throw std::runtime_error("ensemble CSV row has wrong arity: " + line);
    try {
      TrialRecord r;
      r.trial_id = std::stoll(f[0]);
      r.a = parse_int(f[1]);
      r.b = parse_int(f[2]);
      r.A = parse_int(f[3]);
      r.B = parse_int(f[4]);
      r.c_outcome = parse_bell_token(f[5]);
      r.heralded = parse_int(f[6]) != 0;
      records.push_back(r);
    } catch (const std::logic_error& e) {
      throw std::runtime_error(std::string("ensemble CSV row is malformed: ") + e.what());
    }
  }
  return records;
}

Json ensemble_to_json(const Ensemble& ensemble, const Json& meta) {
  Json doc;
  doc["meta"] = meta;
  doc["config_digest"] = ensemble.config_digest;
  Json records = Json::array();
  for (const auto& r : ensemble.records) {
    records.push_back(Json{{"trial_id", r.trial_id}, {"a", r.a}, {"b", r.b}, {"A", r.A}, {"B", r.B},
                           {"c_outcome", bell_token(r.c_outcome)}, {"heralded", r.heralded}});
  }
  doc["records"] = std::move(records);
  return doc;
}

Ensemble ensemble_from_json(const Json& doc) {
  Ensemble e;
  e.config_digest = doc.at("config_digest").get<std::string>();
  e.seed = doc.at("meta").at("seed").get<std::uint64_t>();
  for (const auto& j : doc.at("records")) {
    TrialRecord r;
    r.trial_id = j.at("trial_id").get<std::int64_t>();
    r.a = j.at("a").get<int>();
    r.b = j.at("b").get<int>();
    r.A = j.at("A").get<int>();
    r.B = j.at("B").get<int>();
    r.c_outcome = parse_bell_token(j.at("c_outcome").get<std::string>());
    r.heralded = j.at("heralded").get<bool>();
    e.records.push_back(r);
  }
  return e;
}

void write_toy_csv(std::ostream& out, const std::vector<ToyTrial>& trials) {
  out << "trial_id,a,b,A,B,lambda_A,lambda_B,accepted\n";
  for (const auto& t : trials) {
    out << t.trial_id << ',' << t.a << ',' << t.b << ',' << t.A << ',' << t.B << ',';
    if (t.lambda) {
      out << t.lambda->first << ',' << t.lambda->second;
    } else {
      out << ',';
    }
    out << ',' << (t.accepted ? 1 : 0) << '\n';
  }
}

void write_rps_csv(std::ostream& out, const std::vector<RpsTrial>& trials) {
  out << "trial_id,alice,bob,verdict\n";
  for (const auto& t : trials) {
    out << t.trial_id << ',' << to_string(t.alice) << ',' << to_string(t.bob) << ','
        << to_string(t.verdict) << '\n';
  }
}

Json config_meta(const ExperimentConfig& config) {
  Json events = Json::array();
  for (const auto& e : config.geometry.events) {
    events.push_back(Json{{"label", to_string(e.label)}, {"t", e.t}, {"x", e.x}});
  }
  return Json{{"geometry", preset_token(config.geometry.name)},
              {"events", std::move(events)},
              {"trials", config.n_trials},
              {"seed", config.seed},
              {"angles_a", {config.angles.a[0], config.angles.a[1]}},
              {"angles_b", {config.angles.b[0], config.angles.b[1]}},
              {"herald", config.herald.name()},
              {"bsm", bsm_mode_token(config.bsm_mode)},
              {"c_enabled", config.c_enabled},
              {"config_digest", config.digest()}};
}

Json to_json(const CorrelatorTable& table) {
  Json E = Json::array();
  Json counts = Json::array();
  Json err = Json::array();
  for (int a = 0; a < 2; ++a) {
    Json e_row = Json::array();
    Json c_row = Json::array();
    Json s_row = Json::array();
    for (int b = 0; b < 2; ++b) {
      const int k = CorrelatorTable::index(a, b);
      e_row.push_back(table.E[k] ? Json(*table.E[k]) : Json(nullptr));
      c_row.push_back(table.counts[k]);
      s_row.push_back(table.stderr_[k]);
    }
    E.push_back(std::move(e_row));
    counts.push_back(std::move(c_row));
    err.push_back(std::move(s_row));
  }
  return Json{{"E", std::move(E)}, {"counts", std::move(counts)}, {"stderr", std::move(err)}};
}

Json to_json(const CHSHResult& result) {
  return Json{{"S", result.S},
              {"stderr", result.stderr_},
              {"combination", result.combination.name()},
              {"exceeds_tsirelson", result.exceeds_tsirelson}};
}

Json to_json(const CITestResult& result) {
  return Json{{"hypothesis", result.hypothesis},
              {"divergence", result.divergence},
              {"threshold", result.threshold},
              {"verdict", to_string(result.verdict)},
              {"g_statistic", result.g_statistic},
              {"dof", result.dof},
              {"n", result.n},
              {"min_cell", result.min_cell}};
}

Json to_json(const NdaReport& report) {
  return Json{{"max_abs_diff", report.max_abs_diff},
              {"verdict", report.no_difference ? "NoDifference" : "Difference"}};
}

Json to_json(const FragilityReport& report) {
  Json cells = Json::array();
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      for (int A : {+1, -1}) {
        for (int B : {+1, -1}) {
          const auto& v = report.cells[ExperimentTable::cell(a, b, A, B)];
          cells.push_back(Json{{"a", a}, {"b", b}, {"A", A}, {"B", B},
                               {"p_herald", v ? Json(*v) : Json(nullptr)}});
        }
      }
    }
  }
  return Json{{"cells", std::move(cells)},
              {"max_spread", report.max_spread},
              {"undefined_cells", report.undefined_cells}};
}

Json to_json(const TeleportReport& report) {
  return Json{{"controlled", report.controlled},
              {"n_used", report.n_used},
              {"counts", {{report.counts[0][0], report.counts[0][1]},
                          {report.counts[1][0], report.counts[1][1]}}},
              {"p_out_given_in", {{report.p_out_given_in(0, 0), report.p_out_given_in(0, 1)},
                                  {report.p_out_given_in(1, 0), report.p_out_given_in(1, 1)}}},
              {"p_match", report.p_match},
              {"mutual_information_bits", report.mutual_information_bits}};
}

}  // namespace swapsim
