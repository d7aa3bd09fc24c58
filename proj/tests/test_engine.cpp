#include <doctest.h>

#include "swapsim/engine.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace swapsim;

namespace {

constexpr double kExact = 1e-12;

// Closed form: a BSM outcome beta on (1,2) leaves (0,3) in beta, and x-z plane
// correlators of the Bell states are -cos(a-b), -cos(a+b), cos(a-b), cos(a+b).
double bell_correlator(BellOutcome o, double ta, double tb) {
  switch (o) {
    case BellOutcome::PsiMinus: return -std::cos(ta - tb);
    case BellOutcome::PsiPlus: return -std::cos(ta + tb);
    case BellOutcome::PhiPlus: return std::cos(ta - tb);
    case BellOutcome::PhiMinus: return std::cos(ta + tb);
    default: return 0.0;
  }
}

double oracle_joint(const AngleMap& angles, int a, int b, int A, int B, BellOutcome o) {
  return 0.25 * 0.25 * (1.0 + A * B * bell_correlator(o, angles.a[a], angles.b[b])) / 4.0;
}

ExperimentConfig config_for(const GeometryPreset& g, std::int64_t n = 1000, std::uint64_t seed = 3) {
  ExperimentConfig c;
  c.geometry = g;
  c.n_trials = n;
  c.seed = seed;
  return c;
}

}  // namespace

TEST_CASE("execution order follows the geometry") {
  using L = EventLabel;
  CHECK(execution_order(early_delft()) == std::vector<L>{L::C, L::A, L::B});
  CHECK(execution_order(delayed_delft()) == std::vector<L>{L::A, L::B, L::C});
  CHECK(execution_order(spacelike_delft()) == std::vector<L>{L::A, L::B, L::C});
}

TEST_CASE("heralded fraction is 1/4 at 1e5 trials") {
  const auto e = run_trials(config_for(early_delft(), 100000, 11));
  const auto heralded = post_select(e);
  const double frac = heralded.records.size() / 1e5;
  CHECK(std::abs(frac - 0.25) < 5 * std::sqrt(0.25 * 0.75 / 1e5));
}

TEST_CASE("run_trials is deterministic and thread-count independent") {
  auto cfg = config_for(spacelike_delft(), 20000, 77);
  const auto first = run_trials(cfg, 1);
  CHECK(first == run_trials(cfg, 1));
  CHECK(first == run_trials(cfg, 4));
  for (std::size_t i = 0; i < first.records.size(); ++i) {
    REQUIRE(first.records[i].trial_id == static_cast<std::int64_t>(i));
  }
  cfg.seed = 78;
  CHECK_FALSE(first == run_trials(cfg, 1));
}

TEST_CASE("records respect their invariants") {
  auto cfg = config_for(delayed_delft(), 2000);
  cfg.bsm_mode = BsmMode::Partial;
  for (const auto& r : run_trials(cfg).records) {
    REQUIRE(r.c_outcome.has_value());
    CHECK(r.heralded == cfg.herald(*r.c_outcome));
    CHECK((*r.c_outcome == BellOutcome::PsiMinus || *r.c_outcome == BellOutcome::NoHerald));
  }
  cfg.c_enabled = false;
  for (const auto& r : run_trials(cfg).records) {
    CHECK_FALSE(r.c_outcome.has_value());
    CHECK_FALSE(r.heralded);
  }
}

TEST_CASE("config validation") {
  auto cfg = config_for(early_delft());
  cfg.n_trials = 0;
  CHECK_THROWS_AS(run_trials(cfg), std::invalid_argument);
  cfg.n_trials = 10;
  cfg.geometry.events.pop_back();
  CHECK_THROWS_AS(run_trials(cfg), std::invalid_argument);
}

TEST_CASE("post_select") {
  auto cfg = config_for(early_delft(), 500);
  const auto e = run_trials(cfg);

  const auto h = post_select(e);
  std::int64_t last = -1;
  for (const auto& r : h.records) {
    CHECK(r.heralded);
    CHECK(r.trial_id > last);
    last = r.trial_id;
    CHECK(r == e.records[static_cast<std::size_t>(r.trial_id)]);
  }
  CHECK(post_select(e, HeraldPredicate::any()).records == e.records);

  cfg.c_enabled = false;
  const auto silent = run_trials(cfg);
  CHECK(post_select(silent).records.empty());
  CHECK(post_select(silent, HeraldPredicate::any()).records.empty());
}

TEST_CASE("herald predicate parsing") {
  CHECK(HeraldPredicate::parse("psi-") == HeraldPredicate::psi_minus());
  CHECK(HeraldPredicate::parse("any").accepts_all());
  const auto both = HeraldPredicate::parse("psi-|psi+");
  CHECK(both(BellOutcome::PsiPlus));
  CHECK_FALSE(both(BellOutcome::PhiPlus));
  CHECK(both.name() == "psi+|psi-");
  CHECK_THROWS_AS(HeraldPredicate::parse("psi"), std::invalid_argument);
  CHECK_THROWS_AS(HeraldPredicate::parse("absent"), std::invalid_argument);
}

TEST_CASE("exact distribution matches the closed form in every geometry") {
  std::mt19937_64 gen(17);
  std::uniform_real_distribution<double> angle(0.0, 2 * std::numbers::pi);
  std::vector<AngleMap> maps{AngleMap::chsh_optimal()};
  for (int k = 0; k < 10; ++k) maps.push_back(AngleMap{{angle(gen), angle(gen)}, {angle(gen), angle(gen)}});
  for (const auto& angles : maps) {
    std::vector<ExperimentTable> tables;
    for (const auto& g : {early_delft(), delayed_delft(), spacelike_delft()}) {
      auto cfg = config_for(g);
      cfg.angles = angles;
      tables.push_back(exact_experiment_distribution(cfg));
      const auto& t = tables.back();
      CHECK(t.total() == doctest::Approx(1.0).epsilon(kExact));
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
          for (int A : {+1, -1})
            for (int B : {+1, -1})
              for (BellOutcome o : {BellOutcome::PhiPlus, BellOutcome::PhiMinus, BellOutcome::PsiPlus,
                                    BellOutcome::PsiMinus}) {
                CHECK(std::abs(t.at(a, b, A, B, static_cast<int>(o)) - oracle_joint(angles, a, b, A, B, o)) <
                      kExact);
              }
    }
    CHECK(tables[0].max_abs_diff(tables[1]) < kExact);
    CHECK(tables[0].max_abs_diff(tables[2]) < kExact);
  }
}

TEST_CASE("exact distribution: C on vs off, wing marginals, herald independence") {
  auto cfg = config_for(delayed_delft());
  const auto on = exact_experiment_distribution(cfg);
  cfg.c_enabled = false;
  const auto off = exact_experiment_distribution(cfg);
  const auto m_on = on.marginal_abAB();
  const auto m_off = off.marginal_abAB();
  for (int k = 0; k < ExperimentTable::kCells; ++k) CHECK(std::abs(m_on[k] - m_off[k]) < kExact);
  CHECK(off.at(0, 0, +1, +1, ExperimentTable::kAbsentSlot) == doctest::Approx(1.0 / 16).epsilon(kExact));

  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      double p_a_plus = 0.0;
      double p_b_plus = 0.0;
      for (int c = 0; c < ExperimentTable::kCSlots; ++c) {
        double p_c = 0.0;
        for (int A : {+1, -1}) {
          for (int B : {+1, -1}) {
            p_c += on.at(a, b, A, B, c);
            if (A == +1) p_a_plus += on.at(a, b, A, B, c);
            if (B == +1) p_b_plus += on.at(a, b, A, B, c);
          }
        }
        // P(c | a, b) does not depend on the settings.
        const double expected = c < 4 ? 0.25 : 0.0;
        CHECK(std::abs(p_c / 0.25 - expected) < kExact);
      }
      CHECK(std::abs(p_a_plus / 0.25 - 0.5) < kExact);
      CHECK(std::abs(p_b_plus / 0.25 - 0.5) < kExact);
    }
  }
}

TEST_CASE("Monte Carlo no-signalling in the full ensemble") {
  const auto e = run_trials(config_for(spacelike_delft(), 100000, 5));
  std::array<std::array<double, 2>, 2> plus{};
  std::array<std::array<double, 2>, 2> count{};
  for (const auto& r : e.records) {
    count[r.a][r.b] += 1;
    plus[r.a][r.b] += r.A == +1;
  }
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      const double p = plus[a][b] / count[a][b];
      CHECK(std::abs(p - 0.5) < 5 * std::sqrt(0.25 / count[a][b]));
    }
  }
}

TEST_CASE("Bell tokens and digest") {
  for (BellOutcome o : kAllBellOutcomes) CHECK(parse_bell_token(bell_token(o)) == o);
  CHECK_FALSE(parse_bell_token("absent").has_value());
  CHECK_THROWS_AS(parse_bell_token("psi"), std::invalid_argument);
  auto cfg = config_for(early_delft());
  const auto d = cfg.digest();
  CHECK(d.size() == 16);
  cfg.seed += 1;
  CHECK(cfg.digest() != d);
}
