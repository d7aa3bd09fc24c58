#include "swapsim/engine.hpp"

#include "swapsim/random.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace swapsim {

AngleMap AngleMap::chsh_optimal() {
  constexpr double pi = std::numbers::pi;
  return AngleMap{{0.0, pi / 2}, {pi / 4, 3 * pi / 4}};
}

HeraldPredicate HeraldPredicate::any() {
  HeraldPredicate h;
  h.mask_ = 0x1FU;
  return h;
}

HeraldPredicate HeraldPredicate::of(std::initializer_list<BellOutcome> outcomes) {
  HeraldPredicate h;
  for (BellOutcome o : outcomes) h.mask_ |= 1U << static_cast<unsigned>(o);
  return h;
}

HeraldPredicate HeraldPredicate::parse(std::string_view text) {
  if (text == "any" || text == "all") return any();
  HeraldPredicate h;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t end = std::min(text.find('|', start), text.size());
    const auto token = text.substr(start, end - start);
    const auto outcome = parse_bell_token(token);
    if (!outcome) throw std::invalid_argument("herald cannot include 'absent'");
    h.mask_ |= 1U << static_cast<unsigned>(*outcome);
    start = end + 1;
  }
  return h;
}

std::string HeraldPredicate::name() const {
  if (accepts_all()) return "any";
  std::string out;
  for (BellOutcome o : kAllBellOutcomes) {
    if (!(*this)(o)) continue;
    if (!out.empty()) out += '|';
    out += bell_token(o);
  }
  return out.empty() ? "nothing" : out;
}

void ExperimentConfig::validate() const {
  if (n_trials < 1) throw std::invalid_argument("n_trials must be at least 1");
  for (EventLabel label : {EventLabel::A, EventLabel::B, EventLabel::C}) {
    if (!geometry.find(label)) {
      throw std::invalid_argument("geometry is missing event " + to_string(label));
    }
  }
  for (double angle : {angles.a[0], angles.a[1], angles.b[0], angles.b[1]}) {
    if (!std::isfinite(angle)) throw std::invalid_argument("angles must be finite");
  }
}

std::string ExperimentConfig::canonical() const {
  std::ostringstream out;
  char buf[64];
  const auto num = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  out << "geometry=" << preset_token(geometry.name) << ";events=";
  for (const auto& e : geometry.events) {
    out << to_string(e.label) << '(' << num(e.t) << ',' << num(e.x) << ')';
  }
  out << ";n_trials=" << n_trials << ";seed=" << seed << ";angles_a=" << num(angles.a[0]) << ','
      << num(angles.a[1]) << ";angles_b=" << num(angles.b[0]) << ',' << num(angles.b[1])
      << ";herald=" << herald.name() << ";c_enabled=" << (c_enabled ? 1 : 0)
      << ";bsm=" << bsm_mode_token(bsm_mode);
  return out.str();
}

std::string ExperimentConfig::digest() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : canonical()) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::vector<EventLabel> execution_order(const GeometryPreset& geometry) {
  std::vector<EventLabel> order;
  for (EventLabel label : boosted_time_order(geometry, 0.0)) {
    if (label == EventLabel::A || label == EventLabel::B || label == EventLabel::C) {
      order.push_back(label);
    }
  }
  return order;
}

TrialRecord simulate_trial(const ExperimentConfig& config, std::int64_t trial_id) {
  TrialStream stream(config.seed, static_cast<std::uint64_t>(trial_id));
  TrialRecord rec;
  rec.trial_id = trial_id;
  rec.a = stream.bit();
  rec.b = stream.bit();
  // One draw per measurement in a fixed slot, whatever the execution order.
  const double draw_a = stream.uniform();
  const double draw_b = stream.uniform();
  const double draw_c = stream.uniform();

  StateVector state = make_two_singlets();
  for (EventLabel label : execution_order(config.geometry)) {
    switch (label) {
      case EventLabel::A: {
        auto r = measure_spin(state, SpinMeasurement{kQubitA, config.angles.a[rec.a]}, draw_a);
        rec.A = r.outcome;
        state = std::move(r.state);
        break;
      }
      case EventLabel::B: {
        auto r = measure_spin(state, SpinMeasurement{kQubitB, config.angles.b[rec.b]}, draw_b);
        rec.B = r.outcome;
        state = std::move(r.state);
        break;
      }
      case EventLabel::C: {
        if (!config.c_enabled) break;
        auto r = bell_state_measurement(
            state, BellMeasurement{kQubitSwapLeft, kQubitSwapRight, config.bsm_mode}, draw_c);
        rec.c_outcome = r.outcome;
        state = std::move(r.state);
        break;
      }
      default:
        break;
    }
  }
  rec.heralded = rec.c_outcome.has_value() && config.herald(*rec.c_outcome);
  return rec;
}

Ensemble run_trials(const ExperimentConfig& config, unsigned threads) {
  config.validate();
  Ensemble ensemble;
  ensemble.config_digest = config.digest();
  ensemble.seed = config.seed;
  const auto n = static_cast<std::size_t>(config.n_trials);
  ensemble.records.resize(n);

  if (threads == 0) threads = std::max(1U, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(1, n / 4096)));
  const auto fill = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      ensemble.records[i] = simulate_trial(config, static_cast<std::int64_t>(i));
    }
  };
  if (threads <= 1) {
    fill(0, n);
    return ensemble;
  }
  std::vector<std::jthread> workers;
  const std::size_t chunk = (n + threads - 1) / threads;
  for (std::size_t begin = 0; begin < n; begin += chunk) {
    workers.emplace_back(fill, begin, std::min(n, begin + chunk));
  }
  return ensemble;
}

Ensemble post_select(const Ensemble& ensemble) {
  Ensemble out{{}, ensemble.config_digest, ensemble.seed};
  std::copy_if(ensemble.records.begin(), ensemble.records.end(), std::back_inserter(out.records),
               [](const TrialRecord& r) { return r.heralded; });
  return out;
}

Ensemble post_select(const Ensemble& ensemble, const HeraldPredicate& predicate) {
  Ensemble out{{}, ensemble.config_digest, ensemble.seed};
  std::copy_if(ensemble.records.begin(), ensemble.records.end(), std::back_inserter(out.records),
               [&](const TrialRecord& r) { return r.c_outcome && predicate(*r.c_outcome); });
  return out;
}

double ExperimentTable::total() const {
  double t = 0;
  for (double p : p_) t += p;
  return t;
}

std::array<double, ExperimentTable::kCells> ExperimentTable::marginal_abAB() const {
  std::array<double, kCells> out{};
  for (int cell = 0; cell < kCells; ++cell) {
    for (int c = 0; c < kCSlots; ++c) out[cell] += p_[cell * kCSlots + c];
  }
  return out;
}

std::array<double, ExperimentTable::kCells> ExperimentTable::heralded_abAB(
    const HeraldPredicate& herald) const {
  std::array<double, kCells> out{};
  for (int cell = 0; cell < kCells; ++cell) {
    for (BellOutcome o : kAllBellOutcomes) {
      if (herald(o)) out[cell] += p_[cell * kCSlots + static_cast<int>(o)];
    }
  }
  return out;
}

double ExperimentTable::max_abs_diff(const ExperimentTable& other) const {
  double worst = 0;
  for (std::size_t i = 0; i < p_.size(); ++i) worst = std::max(worst, std::abs(p_[i] - other.p_[i]));
  return worst;
}

ExperimentTable exact_experiment_distribution(const ExperimentConfig& config) {
  config.validate();
  ExperimentTable table;
  const StateVector initial = make_two_singlets();
  const auto order = execution_order(config.geometry);
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      std::vector<PlanStep> plan;
      for (EventLabel label : order) {
        if (label == EventLabel::A) {
          plan.push_back({"A", SpinMeasurement{kQubitA, config.angles.a[a]}});
        } else if (label == EventLabel::B) {
          plan.push_back({"B", SpinMeasurement{kQubitB, config.angles.b[b]}});
        } else if (config.c_enabled) {
          plan.push_back({"C", BellMeasurement{kQubitSwapLeft, kQubitSwapRight, config.bsm_mode}});
        }
      }
      const auto branches = exact_branch_enumeration(initial, plan);
      for (const auto& [key, p] : branches.probabilities) {
        const int c_slot = config.c_enabled ? key[2] : ExperimentTable::kAbsentSlot;
        table.at(a, b, key[0], key[1], c_slot) += 0.25 * p;
      }
    }
  }
  return table;
}

std::string bell_token(std::optional<BellOutcome> c) {
  if (!c) return "absent";
  switch (*c) {
    case BellOutcome::PhiPlus: return "phi+";
    case BellOutcome::PhiMinus: return "phi-";
    case BellOutcome::PsiPlus: return "psi+";
    case BellOutcome::PsiMinus: return "psi-";
    case BellOutcome::NoHerald: return "none";
  }
  return "?";
}

std::optional<BellOutcome> parse_bell_token(std::string_view token) {
  if (token == "absent") return std::nullopt;
  for (BellOutcome o : kAllBellOutcomes) {
    if (token == bell_token(o)) return o;
  }
  throw std::invalid_argument("unknown Bell outcome token: " + std::string(token));
}

std::string bsm_mode_token(BsmMode mode) {
  switch (mode) {
    case BsmMode::Full: return "full";
    case BsmMode::Partial: return "partial";
    case BsmMode::PartialResolvePsiPlus: return "partial-psi+";
  }
  return "?";
}

BsmMode parse_bsm_mode(std::string_view token) {
  for (BsmMode m : {BsmMode::Full, BsmMode::Partial, BsmMode::PartialResolvePsiPlus}) {
    if (token == bsm_mode_token(m)) return m;
  }
  throw std::invalid_argument("unknown BSM mode: " + std::string(token));
}

}  // namespace swapsim
