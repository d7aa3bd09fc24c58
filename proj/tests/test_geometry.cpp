#include <doctest.h>

#include "swapsim/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <random>

using namespace swapsim;

namespace {

std::size_t position(const std::vector<EventLabel>& order, EventLabel label) {
  return static_cast<std::size_t>(std::find(order.begin(), order.end(), label) - order.begin());
}

std::vector<double> velocity_sweep() {
  std::vector<double> v;
  for (int k = -9; k <= 9; ++k) v.push_back(k / 10.0);
  return v;
}

}  // namespace

TEST_CASE("classify examples") {
  const SpacetimeEvent origin{EventLabel::A, 0, 0};
  CHECK(classify(origin, {EventLabel::B, 1, 0}) == CausalRelation::TimelikeFuture);
  CHECK(classify(origin, {EventLabel::B, -1, 0}) == CausalRelation::TimelikePast);
  CHECK(classify(origin, {EventLabel::B, 0, 5}) == CausalRelation::Spacelike);
  CHECK(classify(origin, {EventLabel::B, 1, 1}) == CausalRelation::Lightlike);
  CHECK(classify(origin, {EventLabel::B, -2, 2}) == CausalRelation::Lightlike);
  CHECK(classify(origin, origin) == CausalRelation::Lightlike);
}

TEST_CASE("presets satisfy their invariants") {
  CHECK(classify_geometry(early_delft()) == GeometryClass::ED);
  CHECK(classify_geometry(delayed_delft()) == GeometryClass::DD);
  CHECK(classify_geometry(spacelike_delft()) == GeometryClass::Spacelike);
  for (const auto& p : {early_delft(), delayed_delft(), spacelike_delft()}) {
    CHECK(preset_violations(p).empty());
  }
  CHECK(preset_by_name("early").name == PresetName::EarlyDelft);
  CHECK(preset_by_name("delayed").name == PresetName::DelayedDelft);
  CHECK(preset_by_name("spacelike").name == PresetName::SpacelikeDelft);
  CHECK_THROWS_AS(preset_by_name("sideways"), std::invalid_argument);
}

TEST_CASE("mixed and incomplete geometries") {
  GeometryPreset custom{PresetName::Custom,
                        {{EventLabel::A, 0, -1}, {EventLabel::B, 0, 5}, {EventLabel::C, 1, -1}}};
  CHECK(classify_geometry(custom) == GeometryClass::Mixed);
  GeometryPreset missing{PresetName::Custom, {{EventLabel::A, 0, 0}, {EventLabel::B, 0, 1}}};
  CHECK_THROWS_AS(classify_geometry(missing), std::invalid_argument);
  CHECK_FALSE(preset_violations(missing).empty());

  auto mislabeled = spacelike_delft();
  mislabeled.events.back().t = 10.0;  // C now in the future of A and B
  CHECK_FALSE(preset_violations(mislabeled).empty());
}

TEST_CASE("boosted time order, hand-computed") {
  auto preset = spacelike_delft();
  preset = with_event(preset, {EventLabel::A, 1, -1});
  preset = with_event(preset, {EventLabel::B, 1, 1});
  preset = with_event(preset, {EventLabel::C, 1, 0});
  CHECK(preset.name == PresetName::Custom);

  // v = 0: A, B, C tie at t = 1 and fall back to label order.
  CHECK(boosted_time_order(preset, 0.0) ==
        std::vector<EventLabel>{EventLabel::SourceLeft, EventLabel::SourceRight, EventLabel::A,
                                EventLabel::B, EventLabel::C});
  // v = 0.5, gamma = 2/sqrt(3): t'(SR) = -0.5g, t'(SL) = t'(B) = 0.5g, t'(C) = g, t'(A) = 1.5g.
  const double g = 2.0 / std::sqrt(3.0);
  CHECK(boosted_time(preset.event(EventLabel::A), 0.5) == doctest::Approx(1.5 * g));
  CHECK(boosted_time(preset.event(EventLabel::C), 0.5) == doctest::Approx(g));
  CHECK(boosted_time_order(preset, 0.5) ==
        std::vector<EventLabel>{EventLabel::SourceRight, EventLabel::SourceLeft, EventLabel::B,
                                EventLabel::C, EventLabel::A});

  CHECK_THROWS_AS(boosted_time_order(preset, 1.0), std::domain_error);
  CHECK_THROWS_AS(boosted_time_order(preset, -1.5), std::domain_error);
}

TEST_CASE("v = 0 orders by raw time") {
  const auto order = boosted_time_order(early_delft(), 0.0);
  CHECK(order.front() == EventLabel::C);
  CHECK(position(order, EventLabel::A) < position(order, EventLabel::B));
}

TEST_CASE("delayed preset keeps C last in every frame") {
  for (double v : velocity_sweep()) {
    const auto order = boosted_time_order(delayed_delft(), v);
    CHECK(position(order, EventLabel::C) > position(order, EventLabel::A));
    CHECK(position(order, EventLabel::C) > position(order, EventLabel::B));
  }
}

TEST_CASE("property: timelike order is frame invariant, classify is antisymmetric") {
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> coord(-3.0, 3.0);
  int timelike_pairs = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const SpacetimeEvent e1{EventLabel::A, coord(gen), coord(gen)};
    const SpacetimeEvent e2{EventLabel::B, coord(gen), coord(gen)};
    const auto forward = classify(e1, e2);
    const auto backward = classify(e2, e1);
    if (forward == CausalRelation::TimelikeFuture) CHECK(backward == CausalRelation::TimelikePast);
    if (forward == CausalRelation::TimelikePast) CHECK(backward == CausalRelation::TimelikeFuture);
    if (forward == CausalRelation::Spacelike || forward == CausalRelation::Lightlike) {
      CHECK(backward == forward);
    }
    if (std::abs(e2.t - e1.t) > std::abs(e2.x - e1.x)) {
      ++timelike_pairs;
      const bool later = e2.t > e1.t;
      for (double v : velocity_sweep()) CHECK((boosted_time(e2, v) > boosted_time(e1, v)) == later);
    }
  }
  CHECK(timelike_pairs > 50);
}

TEST_CASE("spacelike preset: C's order relative to A and to B depends on the frame") {
  const auto preset = spacelike_delft();
  for (EventLabel wing : {EventLabel::A, EventLabel::B}) {
    bool before = false;
    bool after = false;
    for (double v : velocity_sweep()) {
      const auto order = boosted_time_order(preset, v);
      const bool c_first = position(order, EventLabel::C) < position(order, wing);
      (c_first ? before : after) = true;
    }
    CHECK(before);
    CHECK(after);
  }
}
