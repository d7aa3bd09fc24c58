#include "swapsim/toys.hpp"

#include "swapsim/random.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace swapsim {

AcceptanceRule::AcceptanceRule(std::string name, Weight weight)
    : name_(std::move(name)), weight_(std::move(weight)) {
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      for (int A : {+1, -1}) {
        for (int B : {+1, -1}) {
          const double w = weight_(a, b, A, B);
          if (!(w >= 0.0 && w <= 1.0)) {
            throw std::invalid_argument("acceptance weight outside [0, 1] for rule " + name_);
          }
        }
      }
    }
  }
}

AcceptanceRule AcceptanceRule::bell(const AngleMap& angles) {
  return AcceptanceRule("bell", [angles](int a, int b, int A, int B) {
    return (1.0 - A * B * std::cos(angles.delta(a, b))) / 2.0;
  });
}

AcceptanceRule AcceptanceRule::constant(double w) {
  return AcceptanceRule("constant", [w](int, int, int, int) { return w; });
}

namespace {

int spin_bit(TrialStream& s) { return s.bit() ? -1 : +1; }

template <bool SourceVariant>
std::vector<ToyTrial> run_toy(std::int64_t n, std::uint64_t seed, const AcceptanceRule& rule) {
  if (n < 1) throw std::invalid_argument("toy run needs n >= 1");
  std::vector<ToyTrial> out(static_cast<std::size_t>(n));
  for (std::int64_t i = 0; i < n; ++i) {
    TrialStream s(seed, static_cast<std::uint64_t>(i));
    ToyTrial& t = out[static_cast<std::size_t>(i)];
    t.trial_id = i;
    t.a = s.bit();
    t.b = s.bit();
    t.A = spin_bit(s);
    t.B = spin_bit(s);
    if constexpr (SourceVariant) t.lambda = std::pair{t.A, t.B};
    t.accepted = s.uniform() < rule(t.a, t.b, t.A, t.B);
  }
  return out;
}

}  // namespace

std::vector<ToyTrial> run_toy_collider(std::int64_t n, std::uint64_t seed, const AcceptanceRule& rule) {
  return run_toy<false>(n, seed, rule);
}

std::vector<ToyTrial> run_toy_source_variant(std::int64_t n, std::uint64_t seed,
                                             const AcceptanceRule& rule) {
  return run_toy<true>(n, seed, rule);
}

std::vector<ToyTrial> accepted_only(const std::vector<ToyTrial>& trials) {
  std::vector<ToyTrial> out;
  std::copy_if(trials.begin(), trials.end(), std::back_inserter(out),
               [](const ToyTrial& t) { return t.accepted; });
  return out;
}

RpsVerdict rps_verdict(RpsChoice alice, RpsChoice bob) {
  if (alice == bob) return RpsVerdict::Draw;
  // Each choice beats the one before it, cyclically.
  const int diff = (static_cast<int>(alice) - static_cast<int>(bob) + 3) % 3;
  return diff == 1 ? RpsVerdict::AliceWins : RpsVerdict::BobWins;
}

std::vector<RpsTrial> run_rps(std::int64_t n, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("rps run needs n >= 1");
  std::vector<RpsTrial> out(static_cast<std::size_t>(n));
  for (std::int64_t i = 0; i < n; ++i) {
    TrialStream s(seed, static_cast<std::uint64_t>(i));
    RpsTrial& t = out[static_cast<std::size_t>(i)];
    t.trial_id = i;
    t.alice = static_cast<RpsChoice>(s.below(3));
    t.bob = static_cast<RpsChoice>(s.below(3));
    t.verdict = rps_verdict(t.alice, t.bob);
  }
  return out;
}

std::string to_string(RpsChoice choice) {
  switch (choice) {
    case RpsChoice::Rock: return "rock";
    case RpsChoice::Paper: return "paper";
    case RpsChoice::Scissors: return "scissors";
  }
  return "?";
}

std::string to_string(RpsVerdict verdict) {
  switch (verdict) {
    case RpsVerdict::AliceWins: return "alice_wins";
    case RpsVerdict::BobWins: return "bob_wins";
    case RpsVerdict::Draw: return "draw";
  }
  return "?";
}

}  // namespace swapsim
