#include "swapsim/analysis.hpp"

#include "swapsim/random.hpp"

#include <boost/math/distributions/chi_squared.hpp>

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <unordered_map>

namespace swapsim {

// ---------------------------------------------------------------- CHSH

double CorrelatorTable::at(int a, int b) const {
  const auto& e = E[index(a, b)];
  if (!e) throw std::invalid_argument("correlator cell has no samples");
  return *e;
}

namespace {

template <typename Range>
CorrelatorTable tally(const Range& rows) {
  CorrelatorTable t;
  std::array<std::int64_t, 4> sum{};
  for (const auto& r : rows) {
    const int k = CorrelatorTable::index(r.a, r.b);
    ++t.counts[k];
    sum[k] += r.A * r.B;
  }
  for (int k = 0; k < 4; ++k) {
    if (t.counts[k] == 0) continue;
    const double e = static_cast<double>(sum[k]) / static_cast<double>(t.counts[k]);
    t.E[k] = e;
    t.stderr_[k] = std::sqrt(std::max(0.0, 1.0 - e * e) / static_cast<double>(t.counts[k]));
  }
  return t;
}

}  // namespace

CorrelatorTable correlators(std::span<const TrialRecord> records) { return tally(records); }
CorrelatorTable correlators(std::span<const ToyTrial> trials) { return tally(trials); }

CorrelatorTable exact_correlators(const ExperimentTable& table, const HeraldPredicate& herald) {
  const auto joint = herald.accepts_all() ? table.marginal_abAB() : table.heralded_abAB(herald);
  CorrelatorTable t;
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      double mass = 0.0;
      double moment = 0.0;
      for (int A : {+1, -1}) {
        for (int B : {+1, -1}) {
          const double p = joint[ExperimentTable::cell(a, b, A, B)];
          mass += p;
          moment += A * B * p;
        }
      }
      if (mass > 0.0) t.E[CorrelatorTable::index(a, b)] = moment / mass;
    }
  }
  return t;
}

std::string ChshCombination::name() const {
  std::string s;
  for (int sign : signs) s += sign > 0 ? '+' : '-';
  return s;
}

ChshCombination extremal_combination(const AngleMap& angles) {
  const auto score = [&](const ChshCombination& c) {
    double v = 0.0;
    for (int a = 0; a < 2; ++a) {
      for (int b = 0; b < 2; ++b) v += c.signs[CorrelatorTable::index(a, b)] * -std::cos(angles.delta(a, b));
    }
    return v;
  };
  ChshCombination best = kStandardChsh;
  double best_score = score(best);
  for (unsigned mask = 0; mask < 16; ++mask) {
    if (std::popcount(mask) % 2 == 0) continue;
    ChshCombination c;
    for (int k = 0; k < 4; ++k) c.signs[k] = (mask >> k) & 1U ? -1 : +1;
    const double s = score(c);
    if (s > best_score + 1e-12) {
      best = c;
      best_score = s;
    }
  }
  return best;
}

CHSHResult chsh(const CorrelatorTable& table, const ChshCombination& combination) {
  CHSHResult r;
  r.combination = combination;
  double var = 0.0;
  for (int k = 0; k < 4; ++k) {
    if (!table.E[k]) throw std::invalid_argument("CHSH needs all four correlator cells");
    r.S += combination.signs[k] * *table.E[k];
    var += table.stderr_[k] * table.stderr_[k];
  }
  r.stderr_ = std::sqrt(var);
  r.exceeds_tsirelson = std::abs(r.S) > 2.0 * std::numbers::sqrt2 + 5.0 * r.stderr_ + 1e-12;
  return r;
}

// ------------------------------------------------- independence tests

void CategoricalData::add_column(std::string name, std::vector<int> values) {
  if (!columns_.empty() && values.size() != rows_) {
    throw std::invalid_argument("column length mismatch for " + name);
  }
  rows_ = values.size();
  columns_.insert_or_assign(std::move(name), std::move(values));
}

bool CategoricalData::has_column(std::string_view name) const { return columns_.contains(name); }

const std::vector<int>& CategoricalData::column(std::string_view name) const {
  const auto it = columns_.find(name);
  if (it == columns_.end()) throw std::invalid_argument("no column named " + std::string(name));
  return it->second;
}

CategoricalData CategoricalData::filter_equal(std::string_view name, int value) const {
  const auto& key = column(name);
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < rows_; ++i) {
    if (key[i] == value) keep.push_back(i);
  }
  CategoricalData out;
  for (const auto& [col, values] : columns_) {
    std::vector<int> picked;
    picked.reserve(keep.size());
    for (std::size_t i : keep) picked.push_back(values[i]);
    out.add_column(col, std::move(picked));
  }
  if (columns_.empty()) out.rows_ = 0;
  return out;
}

CategoricalData to_categorical(std::span<const TrialRecord> records) {
  std::vector<int> a, b, A, B, c, h;
  for (const auto& r : records) {
    a.push_back(r.a);
    b.push_back(r.b);
    A.push_back(r.A);
    B.push_back(r.B);
    c.push_back(r.c_outcome ? static_cast<int>(*r.c_outcome) : -1);
    h.push_back(r.heralded ? 1 : 0);
  }
  CategoricalData d;
  d.add_column("a", std::move(a));
  d.add_column("b", std::move(b));
  d.add_column("A", std::move(A));
  d.add_column("B", std::move(B));
  d.add_column("c", std::move(c));
  d.add_column("heralded", std::move(h));
  return d;
}

CategoricalData to_categorical(std::span<const ToyTrial> trials) {
  std::vector<int> a, b, A, B, acc, la, lb;
  bool all_lambda = !trials.empty();
  for (const auto& t : trials) {
    a.push_back(t.a);
    b.push_back(t.b);
    A.push_back(t.A);
    B.push_back(t.B);
    acc.push_back(t.accepted ? 1 : 0);
    if (t.lambda) {
      la.push_back(t.lambda->first);
      lb.push_back(t.lambda->second);
    } else {
      all_lambda = false;
    }
  }
  CategoricalData d;
  d.add_column("a", std::move(a));
  d.add_column("b", std::move(b));
  d.add_column("A", std::move(A));
  d.add_column("B", std::move(B));
  d.add_column("accepted", std::move(acc));
  if (all_lambda) {
    d.add_column("lambda_A", std::move(la));
    d.add_column("lambda_B", std::move(lb));
  }
  return d;
}

CategoricalData to_categorical(std::span<const RpsTrial> trials) {
  std::vector<int> alice, bob, verdict;
  for (const auto& t : trials) {
    alice.push_back(static_cast<int>(t.alice));
    bob.push_back(static_cast<int>(t.bob));
    verdict.push_back(static_cast<int>(t.verdict));
  }
  CategoricalData d;
  d.add_column("alice", std::move(alice));
  d.add_column("bob", std::move(bob));
  d.add_column("verdict", std::move(verdict));
  return d;
}

CITestSpec lc_ps_a_spec() { return {"LC_ps-A", {"A"}, {"a"}, {"b", "B"}}; }
CITestSpec lc_ps_b_spec() { return {"LC_ps-B", {"B"}, {"b"}, {"a", "A"}}; }
CITestSpec no_signaling_a_spec() { return {"no-signaling-A", {"A"}, {"a"}, {"b"}}; }
CITestSpec no_signaling_b_spec() { return {"no-signaling-B", {"B"}, {"b"}, {"a"}}; }
CITestSpec si_spec() { return {"SI", {"lambda_A", "lambda_B"}, {}, {"a", "b"}}; }

namespace {

/// Packs the values of several small-range columns into one key.
class JointKey {
 public:
  JointKey(const CategoricalData& data, const std::vector<std::string>& names) {
    for (const auto& n : names) cols_.push_back(&data.column(n));
  }
  std::int64_t operator()(std::size_t row) const {
    std::int64_t key = 0;
    for (const auto* col : cols_) key = key * 1024 + ((*col)[row] + 512);
    return key;
  }

 private:
  std::vector<const std::vector<int>*> cols_;
};

struct Stratum {
  std::int64_t total = 0;
  std::unordered_map<std::int64_t, std::int64_t> by_target;
  std::unordered_map<std::int64_t, std::int64_t> by_versus;
  std::map<std::pair<std::int64_t, std::int64_t>, std::int64_t> joint;
};

}  // namespace

CITestResult test_conditional_independence(const CategoricalData& data, const CITestSpec& spec,
                                           const CITestOptions& options) {
  const JointKey target(data, spec.target);
  const JointKey given(data, spec.given);
  const JointKey versus(data, spec.versus);

  CITestResult r;
  r.hypothesis = spec.hypothesis;
  r.n = static_cast<std::int64_t>(data.rows());
  if (r.n == 0) return r;

  std::map<std::int64_t, Stratum> strata;
  for (std::size_t i = 0; i < data.rows(); ++i) {
    Stratum& s = strata[given(i)];
    const auto t = target(i);
    const auto v = versus(i);
    ++s.total;
    ++s.by_target[t];
    ++s.by_versus[v];
    ++s.joint[{v, t}];
  }

  r.min_cell = r.n;
  for (const auto& [key, s] : strata) {
    for (const auto& [v, count] : s.by_versus) r.min_cell = std::min(r.min_cell, count);
    for (const auto& [vt, count] : s.joint) {
      const double expected = static_cast<double>(s.by_versus.at(vt.first)) *
                              static_cast<double>(s.by_target.at(vt.second)) /
                              static_cast<double>(s.total);
      r.g_statistic += 2.0 * static_cast<double>(count) * std::log(static_cast<double>(count) / expected);
    }
    r.dof += static_cast<int>((s.by_target.size() - 1) * (s.by_versus.size() - 1));
  }
  r.g_statistic = std::max(0.0, r.g_statistic);
  const double two_n = 2.0 * static_cast<double>(r.n);
  r.divergence = r.g_statistic / two_n;

  if (r.dof > 0) {
    const boost::math::chi_squared dist(r.dof);
    r.threshold = boost::math::quantile(boost::math::complement(dist, options.significance)) / two_n;
  }
  if (r.min_cell < options.min_cell_count) {
    r.verdict = Verdict::Inconclusive;
  } else {
    r.verdict = r.dof > 0 && r.divergence > r.threshold ? Verdict::Violated : Verdict::Holds;
  }
  return r;
}

// --------------------------------------------- exact causal diagnostics

NdaReport no_difference_check(const ExperimentConfig& config) {
  ExperimentConfig with_c = config;
  with_c.c_enabled = true;
  ExperimentConfig without_c = config;
  without_c.c_enabled = false;
  const auto on = exact_experiment_distribution(with_c).marginal_abAB();
  const auto off = exact_experiment_distribution(without_c).marginal_abAB();
  NdaReport r;
  for (int k = 0; k < ExperimentTable::kCells; ++k) {
    r.max_abs_diff = std::max(r.max_abs_diff, std::abs(on[k] - off[k]));
  }
  r.no_difference = r.max_abs_diff < 1e-12;
  return r;
}

double post_selection_shift(const ExperimentConfig& config) {
  ExperimentConfig with_c = config;
  with_c.c_enabled = true;
  const auto table = exact_experiment_distribution(with_c);
  const auto all = table.marginal_abAB();
  const auto heralded = table.heralded_abAB(config.herald);
  double mass = 0.0;
  for (double p : heralded) mass += p;
  if (!(mass > 0.0)) throw std::invalid_argument("herald has zero probability");
  double worst = 0.0;
  for (int k = 0; k < ExperimentTable::kCells; ++k) {
    worst = std::max(worst, std::abs(heralded[k] / mass - all[k]));
  }
  return worst;
}

FragilityReport fragility(const ExperimentConfig& config) {
  if (!config.c_enabled) throw std::invalid_argument("fragility needs the C measurement enabled");
  const auto table = exact_experiment_distribution(config);
  const auto all = table.marginal_abAB();
  const auto heralded = table.heralded_abAB(config.herald);

  FragilityReport r;
  for (int k = 0; k < ExperimentTable::kCells; ++k) {
    if (all[k] > 0.0) {
      r.cells[k] = heralded[k] / all[k];
    } else {
      ++r.undefined_cells;
    }
  }
  const auto spread = [&](int k0, int k1) {
    if (r.cells[k0] && r.cells[k1]) {
      r.max_spread = std::max(r.max_spread, std::abs(*r.cells[k0] - *r.cells[k1]));
    }
  };
  for (int other = 0; other < 2; ++other) {
    for (int A : {+1, -1}) {
      for (int B : {+1, -1}) {
        spread(ExperimentTable::cell(0, other, A, B), ExperimentTable::cell(1, other, A, B));
        spread(ExperimentTable::cell(other, 0, A, B), ExperimentTable::cell(other, 1, A, B));
      }
    }
  }
  return r;
}

// ------------------------------------------------------- teleportation

double TeleportReport::p_out_given_in(int in, int out) const {
  const auto row = counts[in][0] + counts[in][1];
  return row == 0 ? 0.0 : static_cast<double>(counts[in][out]) / static_cast<double>(row);
}

double mutual_information_bits(const std::array<std::array<std::int64_t, 2>, 2>& counts) {
  std::array<std::array<double, 2>, 2> p{};
  double total = 0.0;
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      p[i][j] = static_cast<double>(counts[i][j]) + 0.5;
      total += p[i][j];
    }
  }
  double mi = 0.0;
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      const double pij = p[i][j] / total;
      const double pi = (p[i][0] + p[i][1]) / total;
      const double pj = (p[0][j] + p[1][j]) / total;
      mi += pij * std::log2(pij / (pi * pj));
    }
  }
  return std::max(0.0, mi);
}

TeleportReport teleport_channel_demo(bool controlled, std::int64_t n, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("teleport demo needs n >= 1");
  TeleportReport r;
  r.controlled = controlled;
  const std::array<StateVector, 2> inputs = {tensor(StateVector::basis(1, 0), singlet()),
                                             tensor(StateVector::basis(1, 1), singlet())};
  for (std::int64_t i = 0; i < n; ++i) {
    TrialStream s(seed, static_cast<std::uint64_t>(i));
    const int in = s.bit();
    const double draw_bsm = s.uniform();
    const double draw_out = s.uniform();
    const auto bsm = bell_state_measurement(inputs[in], BellMeasurement{0, 1, BsmMode::Full}, draw_bsm);
    if (controlled && bsm.outcome != BellOutcome::PsiMinus) continue;
    const auto readout = measure_spin(bsm.state, SpinMeasurement{2, 0.0}, draw_out);
    const int out = readout.outcome == +1 ? 0 : 1;
    ++r.counts[in][out];
    ++r.n_used;
  }
  if (r.n_used > 0) {
    r.p_match = static_cast<double>(r.counts[0][0] + r.counts[1][1]) / static_cast<double>(r.n_used);
  }
  r.mutual_information_bits = mutual_information_bits(r.counts);
  return r;
}

std::string to_string(Verdict verdict) {
  switch (verdict) {
    case Verdict::Holds: return "Holds";
    case Verdict::Violated: return "Violated";
    case Verdict::Inconclusive: return "Inconclusive";
  }
  return "?";
}

}  // namespace swapsim
