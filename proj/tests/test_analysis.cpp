#include <doctest.h>

#include "swapsim/analysis.hpp"

#include <cmath>
#include <numbers>

using namespace swapsim;

namespace {

constexpr double kExact = 1e-12;
const double kTsirelson = 2.0 * std::numbers::sqrt2;

ExperimentConfig base_config(const GeometryPreset& g = early_delft()) {
  ExperimentConfig c;
  c.geometry = g;
  c.n_trials = 100000;
  c.seed = 12;
  return c;
}

CategoricalData table_data(const std::vector<std::array<int, 3>>& cells) {
  // cells: {x, y, count}
  std::vector<int> x, y;
  for (const auto& [xv, yv, n] : cells) {
    for (int i = 0; i < n; ++i) {
      x.push_back(xv);
      y.push_back(yv);
    }
  }
  CategoricalData d;
  d.add_column("x", x);
  d.add_column("y", y);
  return d;
}

}  // namespace

TEST_CASE("correlators") {
  std::vector<TrialRecord> ones;
  for (int i = 0; i < 8; ++i) ones.push_back({i, i % 2, (i / 2) % 2, +1, +1, std::nullopt, false});
  const auto t = correlators(ones);
  for (int k = 0; k < 4; ++k) {
    CHECK(t.E[k] == 1.0);
    CHECK(t.counts[k] == 2);
    CHECK(t.stderr_[k] == 0.0);
  }
  const auto empty = correlators(std::vector<TrialRecord>{});
  for (int k = 0; k < 4; ++k) CHECK_FALSE(empty.E[k].has_value());
  CHECK_THROWS_AS(empty.at(0, 0), std::invalid_argument);
  CHECK_THROWS_AS(chsh(empty), std::invalid_argument);

  const auto exact = exact_correlators(exact_experiment_distribution(base_config()), HeraldPredicate::psi_minus());
  CHECK(exact.at(0, 0) == doctest::Approx(-std::cos(-std::numbers::pi / 4)).epsilon(kExact));
}

TEST_CASE("CHSH combinations") {
  CorrelatorTable zeros;
  for (int k = 0; k < 4; ++k) zeros.E[k] = 0.0;
  CHECK(chsh(zeros).S == 0.0);

  CorrelatorTable plus;
  for (int k = 0; k < 4; ++k) plus.E[k] = 1.0;
  CHECK(chsh(plus).S == 2.0);
  CHECK(chsh(plus).combination.name() == "+++-");

  const auto angles = AngleMap::chsh_optimal();
  const auto best = extremal_combination(angles);
  CHECK(best.name() == "-+--");
  const auto exact = exact_correlators(exact_experiment_distribution(base_config()), HeraldPredicate::psi_minus());
  CHECK(std::abs(chsh(exact, best).S - kTsirelson) < 1e-9);
  // The +++- form is blind to these angles.
  CHECK(std::abs(chsh(exact).S) < 1e-12);

  // Standard angles for +++- with the singlet sign: b in {-pi/4, pi/4} flipped.
  AngleMap standard{{0.0, std::numbers::pi / 2}, {5 * std::numbers::pi / 4, 3 * std::numbers::pi / 4}};
  CHECK(extremal_combination(standard) == kStandardChsh);

  CorrelatorTable noisy;
  for (int k = 0; k < 4; ++k) {
    noisy.E[k] = 0.5;
    noisy.stderr_[k] = 0.1;
  }
  CHECK(chsh(noisy).stderr_ == doctest::Approx(0.2));
}

TEST_CASE("G-test against a hand-computed 2x2 table") {
  const auto d = table_data({{0, 0, 30}, {0, 1, 10}, {1, 0, 10}, {1, 1, 30}});
  const CITestSpec spec{"x-vs-y", {"x"}, {}, {"y"}};
  CITestOptions loose;
  loose.min_cell_count = 10;
  const auto r = test_conditional_independence(d, spec, loose);
  const double g = 2.0 * (2 * 30 * std::log(30.0 / 20.0) + 2 * 10 * std::log(10.0 / 20.0));
  CHECK(r.g_statistic == doctest::Approx(g).epsilon(1e-12));
  CHECK(r.dof == 1);
  CHECK(r.n == 80);
  CHECK(r.divergence == doctest::Approx(g / 160.0));
  // chi-squared(1) upper 1e-3 quantile = 10.8276.
  CHECK(r.threshold * 160.0 == doctest::Approx(10.8276).epsilon(1e-4));
  CHECK(r.verdict == Verdict::Violated);

  // 40 samples per y value is below the default 50-sample floor.
  CHECK(test_conditional_independence(d, spec).verdict == Verdict::Inconclusive);

  const auto flat = table_data({{0, 0, 100}, {0, 1, 100}, {1, 0, 100}, {1, 1, 100}});
  const auto h = test_conditional_independence(flat, spec);
  CHECK(h.g_statistic == doctest::Approx(0.0));
  CHECK(h.verdict == Verdict::Holds);

  CategoricalData none;
  none.add_column("x", {});
  none.add_column("y", {});
  CHECK(test_conditional_independence(none, spec).verdict == Verdict::Inconclusive);
  CHECK_THROWS_AS(test_conditional_independence(CategoricalData{}, spec), std::invalid_argument);
  CHECK_THROWS_AS(test_conditional_independence(d, {"bad", {"z"}, {}, {"y"}}), std::invalid_argument);
}

TEST_CASE("collider toy: LC_ps violated on accepted data, LC holds on full data") {
  const auto trials = run_toy_collider(100000, 31, AcceptanceRule::bell());
  const auto full = to_categorical(trials);
  const auto accepted = accepted_only(trials);
  const auto post = to_categorical(accepted);
  CHECK(test_conditional_independence(post, lc_ps_a_spec()).verdict == Verdict::Violated);
  CHECK(test_conditional_independence(post, lc_ps_b_spec()).verdict == Verdict::Violated);
  CHECK(test_conditional_independence(full, lc_ps_a_spec()).verdict == Verdict::Holds);
  CHECK(test_conditional_independence(full, no_signaling_a_spec()).verdict == Verdict::Holds);
  CHECK(test_conditional_independence(full, no_signaling_b_spec()).verdict == Verdict::Holds);
  // Selection keeps the wing marginals blind to the remote setting.
  CHECK(test_conditional_independence(post, no_signaling_a_spec()).verdict == Verdict::Holds);

  const auto r = chsh(correlators(accepted), extremal_combination(AngleMap::chsh_optimal()));
  CHECK(std::abs(r.S - kTsirelson) < 5 * r.stderr_);
  CHECK_FALSE(r.exceeds_tsirelson);

  const auto unselected = chsh(correlators(trials), extremal_combination(AngleMap::chsh_optimal()));
  CHECK(std::abs(unselected.S) < 5 * unselected.stderr_);
}

TEST_CASE("source toy: SI_ps violated on accepted data, SI holds on full data") {
  const auto trials = run_toy_source_variant(100000, 32, AcceptanceRule::bell());
  const auto full = to_categorical(trials);
  const auto post = to_categorical(accepted_only(trials));
  REQUIRE(full.has_column("lambda_A"));
  CHECK(test_conditional_independence(post, si_spec()).verdict == Verdict::Violated);
  CHECK(test_conditional_independence(full, si_spec()).verdict == Verdict::Holds);
  // Given lambda, A carries no further dependence on the remote wing.
  const CITestSpec lc_given_lambda{"LC_ps-A|lambda", {"A"}, {"a", "lambda_A", "lambda_B"}, {"b", "B"}};
  const auto lc = test_conditional_independence(post, lc_given_lambda);
  CHECK(lc.dof == 0);
  CHECK(lc.verdict == Verdict::Holds);

  const auto unselected = to_categorical(accepted_only(run_toy_source_variant(100000, 32, AcceptanceRule::constant(1.0))));
  CHECK(test_conditional_independence(unselected, si_spec()).verdict == Verdict::Holds);
}

TEST_CASE("quantum ensembles: no-signalling holds, LC_ps fails in E_C") {
  const auto e = run_trials(base_config(delayed_delft()));
  const auto full = to_categorical(e.records);
  const auto heralded = post_select(e);
  const auto post = to_categorical(heralded.records);
  CHECK(test_conditional_independence(full, no_signaling_a_spec()).verdict == Verdict::Holds);
  CHECK(test_conditional_independence(full, no_signaling_b_spec()).verdict == Verdict::Holds);
  CHECK(test_conditional_independence(post, lc_ps_a_spec()).verdict == Verdict::Violated);
  CHECK(test_conditional_independence(post, lc_ps_b_spec()).verdict == Verdict::Violated);

  const auto corr = correlators(heralded.records);
  const auto angles = AngleMap::chsh_optimal();
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      const int k = CorrelatorTable::index(a, b);
      CHECK(std::abs(corr.at(a, b) + std::cos(angles.delta(a, b))) < 5 * corr.stderr_[k]);
    }
  }
  const auto r = chsh(corr, extremal_combination(angles));
  CHECK(std::abs(r.S) <= kTsirelson + 5 * r.stderr_);
}

TEST_CASE("rock-paper-scissors: independence unconditionally, dependence given a verdict") {
  const auto data = to_categorical(run_rps(10000, 3));
  const CITestSpec spec{"choices", {"alice"}, {}, {"bob"}};
  CHECK(test_conditional_independence(data, spec).verdict == Verdict::Holds);
  for (RpsVerdict v : {RpsVerdict::AliceWins, RpsVerdict::BobWins, RpsVerdict::Draw}) {
    const auto subset = data.filter_equal("verdict", static_cast<int>(v));
    CHECK(subset.rows() > 3000);
    CHECK(test_conditional_independence(subset, spec).verdict == Verdict::Violated);
  }
}

TEST_CASE("no-difference check") {
  for (const auto& g : {early_delft(), delayed_delft(), spacelike_delft()}) {
    const auto r = no_difference_check(base_config(g));
    CHECK(r.no_difference);
    CHECK(r.max_abs_diff < 1e-12);
  }
  CHECK(post_selection_shift(base_config()) > 0.01);
  auto any = base_config();
  any.herald = HeraldPredicate::any();
  CHECK(post_selection_shift(any) < 1e-12);
}

TEST_CASE("fragility matches (1 - AB cos)/4") {
  const auto cfg = base_config(spacelike_delft());
  const auto report = fragility(cfg);
  CHECK(report.undefined_cells == 0);
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int A : {+1, -1})
        for (int B : {+1, -1}) {
          const double closed = (1.0 - A * B * std::cos(cfg.angles.delta(a, b))) / 4.0;
          CHECK(std::abs(*report.cells[ExperimentTable::cell(a, b, A, B)] - closed) < kExact);
        }
  // Spread: |(1+r)/4 - (1-r)/4| with r = cos(pi/4).
  CHECK(report.max_spread == doctest::Approx(std::cos(std::numbers::pi / 4) / 2).epsilon(1e-12));

  auto equal = cfg;
  equal.angles = AngleMap{{0.3, 1.0}, {0.3, 2.0}};
  CHECK(*fragility(equal).cells[ExperimentTable::cell(0, 0, +1, -1)] == doctest::Approx(0.5).epsilon(kExact));

  auto any = cfg;
  any.herald = HeraldPredicate::any();
  const auto flat = fragility(any);
  for (const auto& c : flat.cells) CHECK(*c == doctest::Approx(1.0).epsilon(kExact));
  CHECK(flat.max_spread < kExact);

  auto silent = cfg;
  silent.c_enabled = false;
  CHECK_THROWS_AS(fragility(silent), std::invalid_argument);
}

TEST_CASE("uncorrected teleportation through a PsiMinus outcome returns the input") {
  for (int in = 0; in < 2; ++in) {
    const auto s = tensor(StateVector::basis(1, in), singlet());
    // Draw 0.8 selects PsiMinus when all four outcomes have weight 1/4.
    const auto r = bell_state_measurement(s, {0, 1, BsmMode::Full}, 0.8);
    REQUIRE(r.outcome == BellOutcome::PsiMinus);
    CHECK(prob_spin_up(r.state, {2, 0.0}) == doctest::Approx(in == 0 ? 1.0 : 0.0).epsilon(kExact));
  }
}

TEST_CASE("mutual information with add-half smoothing") {
  CHECK(mutual_information_bits({{{100, 100}, {100, 100}}}) == doctest::Approx(0.0));
  const double smoothed = mutual_information_bits({{{1000, 0}, {0, 1000}}});
  // Hand: p_diag = 1000.5/2002, p_off = 0.5/2002, marginals 1/2.
  const double pd = 1000.5 / 2002.0, po = 0.5 / 2002.0;
  CHECK(smoothed == doctest::Approx(2 * pd * std::log2(pd / 0.25) + 2 * po * std::log2(po / 0.25)));
}

TEST_CASE("teleport channel dichotomy") {
  const auto controlled = teleport_channel_demo(true, 100000, 4);
  CHECK(controlled.p_match == 1.0);
  CHECK(controlled.mutual_information_bits > 0.9);
  const double kept = static_cast<double>(controlled.n_used) / 1e5;
  CHECK(std::abs(kept - 0.25) < 5 * std::sqrt(0.25 * 0.75 / 1e5));

  const auto open = teleport_channel_demo(false, 100000, 4);
  CHECK(open.n_used == 100000);
  CHECK(std::abs(open.p_match - 0.5) < 5 * std::sqrt(0.25 / 1e5));
  CHECK(open.mutual_information_bits < 0.05);
  CHECK_THROWS_AS(teleport_channel_demo(true, 0, 1), std::invalid_argument);
}
