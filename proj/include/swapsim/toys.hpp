// Classical collider constructions: two random-bit toys whose post-selected
// subensemble reproduces singlet statistics, and rock-paper-scissors.

#pragma once

#include "swapsim/engine.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace swapsim {

struct ToyTrial {
  std::int64_t trial_id = 0;
  int a = 0;
  int b = 0;
  int A = +1;
  int B = +1;
  std::optional<std::pair<int, int>> lambda;  // set by the source variant only
  bool accepted = false;

  friend bool operator==(const ToyTrial&, const ToyTrial&) = default;
};

/// Charlie's acceptance probability w(a, b, A, B).
class AcceptanceRule {
 public:
  using Weight = std::function<double(int a, int b, int A, int B)>;

  /// Throws std::invalid_argument if w leaves [0, 1] on any of the 16 inputs.
  AcceptanceRule(std::string name, Weight weight);

  /// w = (1 - A B cos(theta_a - theta_b)) / 2.
  static AcceptanceRule bell(const AngleMap& angles = AngleMap::chsh_optimal());
  static AcceptanceRule constant(double w);

  double operator()(int a, int b, int A, int B) const { return weight_(a, b, A, B); }
  const std::string& name() const { return name_; }

 private:
  std::string name_;
  Weight weight_;
};

/// Settings and outcomes are independent fair bits at the wings.
std::vector<ToyTrial> run_toy_collider(std::int64_t n, std::uint64_t seed, const AcceptanceRule& rule);

/// Same draws, but (A, B) is emitted by a midpoint source and stored as lambda.
std::vector<ToyTrial> run_toy_source_variant(std::int64_t n, std::uint64_t seed,
                                             const AcceptanceRule& rule);

std::vector<ToyTrial> accepted_only(const std::vector<ToyTrial>& trials);

enum class RpsChoice { Rock, Paper, Scissors };
enum class RpsVerdict { AliceWins, BobWins, Draw };

RpsVerdict rps_verdict(RpsChoice alice, RpsChoice bob);

struct RpsTrial {
  std::int64_t trial_id = 0;
  RpsChoice alice = RpsChoice::Rock;
  RpsChoice bob = RpsChoice::Rock;
  RpsVerdict verdict = RpsVerdict::Draw;

  friend bool operator==(const RpsTrial&, const RpsTrial&) = default;
};

std::vector<RpsTrial> run_rps(std::int64_t n, std::uint64_t seed);

std::string to_string(RpsChoice choice);
std::string to_string(RpsVerdict verdict);

}  // namespace swapsim
