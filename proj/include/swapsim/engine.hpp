// Trial engine for the two-source entanglement-swapping experiment.
//
// Register layout: qubits 0,1 are the left singlet and 2,3 the right one.
// A measures qubit 0, B measures qubit 3, and C performs the Bell-state
// measurement on qubits (1, 2).

#pragma once

#include "swapsim/geometry.hpp"
#include "swapsim/qcore.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace swapsim {

inline constexpr int kQubitA = 0;
inline constexpr int kQubitSwapLeft = 1;
inline constexpr int kQubitSwapRight = 2;
inline constexpr int kQubitB = 3;

/// Setting bit -> measurement angle, shared by the quantum engine and the toys.
struct AngleMap {
  std::array<double, 2> a{};
  std::array<double, 2> b{};

  /// A in {0, pi/2}, B in {pi/4, 3pi/4}.
  static AngleMap chsh_optimal();
  double delta(int a_setting, int b_setting) const { return a[a_setting] - b[b_setting]; }
};

/// Set of BellOutcomes that count as a herald.
class HeraldPredicate {
 public:
  constexpr HeraldPredicate() = default;
  static HeraldPredicate psi_minus() { return of({BellOutcome::PsiMinus}); }
  static HeraldPredicate any();
  static HeraldPredicate of(std::initializer_list<BellOutcome> outcomes);
  /// "any" or a '|'-separated token list such as "psi-|psi+".
  static HeraldPredicate parse(std::string_view text);

  bool operator()(BellOutcome outcome) const {
    return (mask_ >> static_cast<unsigned>(outcome)) & 1U;
  }
  bool accepts_all() const { return mask_ == 0x1FU; }
  std::string name() const;
  friend bool operator==(const HeraldPredicate&, const HeraldPredicate&) = default;

 private:
  unsigned mask_ = 0;
};

struct ExperimentConfig {
  GeometryPreset geometry = early_delft();
  std::int64_t n_trials = 1;
  std::uint64_t seed = 0;
  AngleMap angles = AngleMap::chsh_optimal();
  HeraldPredicate herald = HeraldPredicate::psi_minus();
  bool c_enabled = true;
  BsmMode bsm_mode = BsmMode::Full;

  /// Throws std::invalid_argument on n_trials < 1 or an inconsistent geometry.
  void validate() const;
  /// Stable text rendering of every field; input to digest().
  std::string canonical() const;
  /// 16 hex digits (FNV-1a over canonical()).
  std::string digest() const;
};

struct TrialRecord {
  std::int64_t trial_id = 0;
  int a = 0;
  int b = 0;
  int A = +1;
  int B = +1;
  std::optional<BellOutcome> c_outcome;  // nullopt: C disabled
  bool heralded = false;

  friend bool operator==(const TrialRecord&, const TrialRecord&) = default;
};

struct Ensemble {
  std::vector<TrialRecord> records;
  std::string config_digest;
  std::uint64_t seed = 0;

  friend bool operator==(const Ensemble&, const Ensemble&) = default;
};

/// Order in which A, B and C are executed: raw time order, ties by label.
std::vector<EventLabel> execution_order(const GeometryPreset& geometry);

TrialRecord simulate_trial(const ExperimentConfig& config, std::int64_t trial_id);

/// threads = 0 picks hardware concurrency; output is independent of it.
Ensemble run_trials(const ExperimentConfig& config, unsigned threads = 0);

/// Heralded records, order and trial ids preserved.
Ensemble post_select(const Ensemble& ensemble);
/// Records whose C outcome is present and satisfies `predicate`.
Ensemble post_select(const Ensemble& ensemble, const HeraldPredicate& predicate);

inline int outcome_index(int spin) { return spin == +1 ? 0 : 1; }
inline int spin_of_index(int index) { return index == 0 ? +1 : -1; }

/// Exact P(a, b, A, B, c). The c axis has the five BellOutcomes followed by
/// an "absent" slot used when C is disabled.
class ExperimentTable {
 public:
  static constexpr int kCSlots = 6;
  static constexpr int kAbsentSlot = 5;
  static constexpr int kCells = 16;

  static int c_slot(std::optional<BellOutcome> c) {
    return c ? static_cast<int>(*c) : kAbsentSlot;
  }
  /// Index of (a, b, A, B) in 0..15, A and B given as +1/-1.
  static int cell(int a, int b, int A, int B) {
    return ((a * 2 + b) * 2 + outcome_index(A)) * 2 + outcome_index(B);
  }

  double& at(int a, int b, int A, int B, int c_slot) { return p_[cell(a, b, A, B) * kCSlots + c_slot]; }
  double at(int a, int b, int A, int B, int c_slot) const { return p_[cell(a, b, A, B) * kCSlots + c_slot]; }

  double total() const;
  /// P(a, b, A, B) summed over the c axis.
  std::array<double, kCells> marginal_abAB() const;
  /// P(a, b, A, B, c in predicate).
  std::array<double, kCells> heralded_abAB(const HeraldPredicate& herald) const;
  double max_abs_diff(const ExperimentTable& other) const;

 private:
  std::array<double, kCells * kCSlots> p_{};
};

ExperimentTable exact_experiment_distribution(const ExperimentConfig& config);

std::string bell_token(std::optional<BellOutcome> c);
std::optional<BellOutcome> parse_bell_token(std::string_view token);
std::string bsm_mode_token(BsmMode mode);
BsmMode parse_bsm_mode(std::string_view token);

}  // namespace swapsim
