// Diagnostic battery: correlators and CHSH, likelihood-ratio tests of
// conditional independence, the no-difference check, setting fragility of
// the herald, and the controlled-collider teleportation channel.

#pragma once

#include "swapsim/engine.hpp"
#include "swapsim/toys.hpp"

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace swapsim {

// ---------------------------------------------------------------- CHSH

/// Cells are indexed a * 2 + b. Undefined cells (no samples) hold nullopt.
struct CorrelatorTable {
  std::array<std::optional<double>, 4> E{};
  std::array<std::int64_t, 4> counts{};
  std::array<double, 4> stderr_{};

  static int index(int a, int b) { return a * 2 + b; }
  bool defined(int a, int b) const { return E[index(a, b)].has_value(); }
  /// Throws std::invalid_argument for an undefined cell.
  double at(int a, int b) const;
};

CorrelatorTable correlators(std::span<const TrialRecord> records);
CorrelatorTable correlators(std::span<const ToyTrial> trials);
/// Exact correlators of the subensemble selected by `herald`; stderr is 0.
CorrelatorTable exact_correlators(const ExperimentTable& table, const HeraldPredicate& herald);

/// Signs applied to E(0,0), E(0,1), E(1,0), E(1,1); an odd number are negative.
struct ChshCombination {
  std::array<int, 4> signs{+1, +1, +1, -1};
  std::string name() const;
  friend bool operator==(const ChshCombination&, const ChshCombination&) = default;
};

inline constexpr ChshCombination kStandardChsh{};

/// The CHSH combination maximizing the singlet prediction -cos(theta_a - theta_b)
/// at the given angles.
ChshCombination extremal_combination(const AngleMap& angles);

struct CHSHResult {
  double S = 0.0;
  double stderr_ = 0.0;
  ChshCombination combination;
  /// |S| > 2 sqrt 2 + 5 stderr.
  bool exceeds_tsirelson = false;
};

CHSHResult chsh(const CorrelatorTable& table, const ChshCombination& combination = kStandardChsh);

// ------------------------------------------------- independence tests

/// Column-oriented categorical data; every column has the same length.
class CategoricalData {
 public:
  void add_column(std::string name, std::vector<int> values);
  bool has_column(std::string_view name) const;
  const std::vector<int>& column(std::string_view name) const;
  std::size_t rows() const { return rows_; }
  CategoricalData filter_equal(std::string_view name, int value) const;

 private:
  std::map<std::string, std::vector<int>, std::less<>> columns_;
  std::size_t rows_ = 0;
};

/// Columns a, b, A, B, c (BellOutcome value, or -1 when absent), heralded.
CategoricalData to_categorical(std::span<const TrialRecord> records);
/// Columns a, b, A, B, accepted, and lambda_A, lambda_B when every trial has lambda.
CategoricalData to_categorical(std::span<const ToyTrial> trials);
/// Columns alice, bob, verdict.
CategoricalData to_categorical(std::span<const RpsTrial> trials);

struct CITestSpec {
  std::string hypothesis;
  std::vector<std::string> target;
  std::vector<std::string> given;
  std::vector<std::string> versus;
};

/// A independent of the remote setting and outcome given a (and mirror).
CITestSpec lc_ps_a_spec();
CITestSpec lc_ps_b_spec();
/// A independent of the remote setting given a (and mirror).
CITestSpec no_signaling_a_spec();
CITestSpec no_signaling_b_spec();
/// lambda independent of the settings.
CITestSpec si_spec();

enum class Verdict { Holds, Violated, Inconclusive };

struct CITestOptions {
  double significance = 1e-3;
  std::int64_t min_cell_count = 50;
};

struct CITestResult {
  std::string hypothesis;
  double divergence = 0.0;  // G / 2n, nats
  double threshold = 0.0;   // chi2 quantile / 2n
  Verdict verdict = Verdict::Inconclusive;
  double g_statistic = 0.0;
  int dof = 0;
  std::int64_t n = 0;
  std::int64_t min_cell = 0;
};

/// G-test of target _||_ versus | given, pooled over the strata of `given`.
/// Throws std::invalid_argument when a named column is missing.
CITestResult test_conditional_independence(const CategoricalData& data, const CITestSpec& spec,
                                           const CITestOptions& options = {});

// --------------------------------------------- exact causal diagnostics

struct NdaReport {
  double max_abs_diff = 0.0;
  bool no_difference = false;
};

/// Exact P(a, b, A, B) with C present (marginalized over its outcome)
/// against C absent; NoDifference iff the max entrywise gap is < 1e-12.
NdaReport no_difference_check(const ExperimentConfig& config);

/// Max |P(a, b, A, B | herald) - P(a, b, A, B)|: the selection artifact.
double post_selection_shift(const ExperimentConfig& config);

/// P(herald | a, b, A, B) for the 16 cells indexed by ExperimentTable::cell.
struct FragilityReport {
  std::array<std::optional<double>, ExperimentTable::kCells> cells{};
  double max_spread = 0.0;
  int undefined_cells = 0;
};

/// Throws std::invalid_argument when C is disabled.
FragilityReport fragility(const ExperimentConfig& config);

// ------------------------------------------------------- teleportation

struct TeleportReport {
  bool controlled = false;
  std::array<std::array<std::int64_t, 2>, 2> counts{};  // [input][output]
  std::int64_t n_used = 0;
  double p_match = 0.0;
  double mutual_information_bits = 0.0;
  double p_out_given_in(int in, int out) const;
};

/// Mutual information of a 2x2 count table with 0.5 added to every cell.
double mutual_information_bits(const std::array<std::array<std::int64_t, 2>, 2>& counts);

/// Input bit on qubit 0, singlet resource on (1, 2), Bell measurement on
/// (0, 1), no correction; qubit 2 is read out in Z. Controlled runs keep
/// only PsiMinus outcomes.
TeleportReport teleport_channel_demo(bool controlled, std::int64_t n, std::uint64_t seed);

std::string to_string(Verdict verdict);

}  // namespace swapsim
