// Exact state-vector algebra for small qubit registers (at most five qubits).
//
// Conventions:
//   - qubit 0 is the most significant bit of the basis index, so a
//     four-qubit register |q0 q1 q2 q3> maps to index 8*q0 + 4*q1 + 2*q2 + q3;
//   - spin up is |0>, spin down is |1>;
//   - a spin measurement at angle t measures cos(t) Z + sin(t) X;
//   - the singlet is (|01> - |10>)/sqrt(2).
//
// Every operation returns a fresh value; nothing here mutates its inputs.

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <map>
#include <numbers>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

namespace swapsim {

inline constexpr int kMaxQubits = 5;

template <typename Scalar>
constexpr Scalar norm_tolerance() {
  return std::numeric_limits<Scalar>::epsilon() * Scalar(4096);
}

template <typename Scalar>
class BasicStateVector {
 public:
  using Complex = std::complex<Scalar>;
  using Amplitudes = Eigen::Matrix<Complex, Eigen::Dynamic, 1>;

  /// The all-zero computational basis state.
  explicit BasicStateVector(int num_qubits)
      : num_qubits_(checked_qubits(num_qubits)),
        amps_(Amplitudes::Zero(Eigen::Index{1} << num_qubits)) {
    amps_(0) = Complex(1);
  }

  /// Throws std::invalid_argument unless the vector has length 2^n and unit norm.
  BasicStateVector(int num_qubits, Amplitudes amplitudes)
      : num_qubits_(checked_qubits(num_qubits)), amps_(std::move(amplitudes)) {
    if (amps_.size() != (Eigen::Index{1} << num_qubits_)) {
      throw std::invalid_argument("amplitude vector length must be 2^num_qubits");
    }
    if (std::abs(amps_.norm() - Scalar(1)) > norm_tolerance<Scalar>()) {
      throw std::invalid_argument("amplitude vector is not normalized");
    }
  }

  static BasicStateVector basis(int num_qubits, Eigen::Index index) {
    BasicStateVector s(num_qubits);
    if (index < 0 || index >= s.dimension()) {
      throw std::out_of_range("basis index out of range");
    }
    s.amps_(0) = Complex(0);
    s.amps_(index) = Complex(1);
    return s;
  }

  /// Renormalizes an unnormalized vector; throws std::logic_error on a zero vector.
  static BasicStateVector normalized(int num_qubits, Amplitudes amplitudes) {
    const Scalar n = amplitudes.norm();
    if (!(n > Scalar(0))) {
      throw std::logic_error("cannot normalize a zero-norm projection");
    }
    amplitudes /= n;
    return BasicStateVector(num_qubits, std::move(amplitudes));
  }

  int num_qubits() const { return num_qubits_; }
  Eigen::Index dimension() const { return amps_.size(); }
  const Amplitudes& amplitudes() const { return amps_; }
  Complex amplitude(Eigen::Index index) const { return amps_(index); }
  Scalar norm() const { return amps_.norm(); }

  friend bool operator==(const BasicStateVector& lhs, const BasicStateVector& rhs) {
    return lhs.num_qubits_ == rhs.num_qubits_ && lhs.amps_ == rhs.amps_;
  }

 private:
  static int checked_qubits(int n) {
    if (n < 1 || n > kMaxQubits) {
      throw std::invalid_argument("num_qubits must be in 1..5");
    }
    return n;
  }

  int num_qubits_;
  Amplitudes amps_;
};

using StateVector = BasicStateVector<double>;

enum class BellOutcome { PhiPlus, PhiMinus, PsiPlus, PsiMinus, NoHerald };

inline constexpr std::array<BellOutcome, 5> kAllBellOutcomes = {
    BellOutcome::PhiPlus, BellOutcome::PhiMinus, BellOutcome::PsiPlus,
    BellOutcome::PsiMinus, BellOutcome::NoHerald};

/// Full: all four Bell states resolved. Partial: only PsiMinus resolved.
/// PartialResolvePsiPlus: PsiMinus and PsiPlus resolved. Unresolved
/// outcomes fold into NoHerald.
enum class BsmMode { Full, Partial, PartialResolvePsiPlus };

struct SpinMeasurement {
  int qubit = 0;
  double angle = 0.0;
};

struct BellMeasurement {
  int left = 0;
  int right = 1;
  BsmMode mode = BsmMode::Full;
};

/// Outcomes a Bell analyzer can report, in collapse (draw-threshold) order.
inline std::vector<BellOutcome> bsm_outcomes(BsmMode mode) {
  switch (mode) {
    case BsmMode::Full:
      return {BellOutcome::PhiPlus, BellOutcome::PhiMinus, BellOutcome::PsiPlus,
              BellOutcome::PsiMinus};
    case BsmMode::Partial:
      return {BellOutcome::PsiMinus, BellOutcome::NoHerald};
    case BsmMode::PartialResolvePsiPlus:
      return {BellOutcome::PsiPlus, BellOutcome::PsiMinus, BellOutcome::NoHerald};
  }
  throw std::invalid_argument("unknown BsmMode");
}

namespace detail {

inline void check_qubit(int qubit, int num_qubits) {
  if (qubit < 0 || qubit >= num_qubits) {
    throw std::out_of_range("qubit index out of range");
  }
}

inline void check_pair(int left, int right, int num_qubits) {
  check_qubit(left, num_qubits);
  check_qubit(right, num_qubits);
  if (left == right) {
    throw std::invalid_argument("Bell measurement needs two distinct qubits");
  }
}

inline int bit_of(int qubit, int num_qubits) { return num_qubits - 1 - qubit; }

template <typename Scalar>
using Op2 = Eigen::Matrix<std::complex<Scalar>, 2, 2>;
template <typename Scalar>
using Op4 = Eigen::Matrix<std::complex<Scalar>, 4, 4>;

/// Applies a 2x2 operator to one qubit of an amplitude vector.
template <typename Scalar>
Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, 1> apply_one(
    const Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, 1>& amps, int num_qubits,
    int qubit, const Op2<Scalar>& op) {
  const Eigen::Index mask = Eigen::Index{1} << bit_of(qubit, num_qubits);
  Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, 1> out(amps.size());
  for (Eigen::Index i = 0; i < amps.size(); ++i) {
    if (i & mask) continue;
    const auto a0 = amps(i);
    const auto a1 = amps(i | mask);
    out(i) = op(0, 0) * a0 + op(0, 1) * a1;
    out(i | mask) = op(1, 0) * a0 + op(1, 1) * a1;
  }
  return out;
}

/// Applies a 4x4 operator to the ordered pair (left, right); the local
/// index is 2*bit(left) + bit(right).
template <typename Scalar>
Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, 1> apply_two(
    const Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, 1>& amps, int num_qubits,
    int left, int right, const Op4<Scalar>& op) {
  const Eigen::Index ml = Eigen::Index{1} << bit_of(left, num_qubits);
  const Eigen::Index mr = Eigen::Index{1} << bit_of(right, num_qubits);
  Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, 1> out(amps.size());
  for (Eigen::Index i = 0; i < amps.size(); ++i) {
    if ((i & ml) || (i & mr)) continue;
    const std::array<Eigen::Index, 4> idx = {i, i | mr, i | ml, i | ml | mr};
    Eigen::Matrix<std::complex<Scalar>, 4, 1> local;
    for (int k = 0; k < 4; ++k) local(k) = amps(idx[k]);
    const Eigen::Matrix<std::complex<Scalar>, 4, 1> mapped = op * local;
    for (int k = 0; k < 4; ++k) out(idx[k]) = mapped(k);
  }
  return out;
}

template <typename Scalar>
Op2<Scalar> spin_projector(double angle, int outcome) {
  const Scalar c = static_cast<Scalar>(std::cos(angle / 2));
  const Scalar s = static_cast<Scalar>(std::sin(angle / 2));
  Eigen::Matrix<std::complex<Scalar>, 2, 1> v;
  if (outcome == +1) {
    v << c, s;
  } else {
    v << -s, c;
  }
  return v * v.adjoint();
}

}  // namespace detail

/// Two-qubit Bell state; NoHerald has no associated vector.
template <typename Scalar = double>
Eigen::Matrix<std::complex<Scalar>, 4, 1> bell_vector(BellOutcome outcome) {
  const Scalar h = Scalar(1) / std::sqrt(Scalar(2));
  Eigen::Matrix<std::complex<Scalar>, 4, 1> v = Eigen::Matrix<std::complex<Scalar>, 4, 1>::Zero();
  switch (outcome) {
    case BellOutcome::PhiPlus: v(0) = h; v(3) = h; break;
    case BellOutcome::PhiMinus: v(0) = h; v(3) = -h; break;
    case BellOutcome::PsiPlus: v(1) = h; v(2) = h; break;
    case BellOutcome::PsiMinus: v(1) = h; v(2) = -h; break;
    case BellOutcome::NoHerald:
      throw std::invalid_argument("NoHerald is not a Bell state");
  }
  return v;
}

/// Projector for a reported analyzer outcome under the given mode.
template <typename Scalar = double>
detail::Op4<Scalar> bell_projector(BellOutcome outcome, BsmMode mode) {
  const auto reported = bsm_outcomes(mode);
  if (std::find(reported.begin(), reported.end(), outcome) == reported.end()) {
    throw std::invalid_argument("outcome not reported by this Bell analyzer mode");
  }
  if (outcome != BellOutcome::NoHerald) {
    const auto v = bell_vector<Scalar>(outcome);
    return v * v.adjoint();
  }
  detail::Op4<Scalar> p = detail::Op4<Scalar>::Identity();
  for (BellOutcome o : reported) {
    if (o == BellOutcome::NoHerald) continue;
    const auto v = bell_vector<Scalar>(o);
    p -= v * v.adjoint();
  }
  return p;
}

template <typename Scalar = double>
BasicStateVector<Scalar> tensor(const BasicStateVector<Scalar>& lhs,
                                const BasicStateVector<Scalar>& rhs) {
  using Amps = typename BasicStateVector<Scalar>::Amplitudes;
  Amps out(lhs.dimension() * rhs.dimension());
  for (Eigen::Index i = 0; i < lhs.dimension(); ++i) {
    out.segment(i * rhs.dimension(), rhs.dimension()) = lhs.amplitude(i) * rhs.amplitudes();
  }
  return BasicStateVector<Scalar>(lhs.num_qubits() + rhs.num_qubits(), std::move(out));
}

template <typename Scalar = double>
BasicStateVector<Scalar> bell_pair(BellOutcome which) {
  auto v = bell_vector<Scalar>(which);
  return BasicStateVector<Scalar>(2, typename BasicStateVector<Scalar>::Amplitudes(v));
}

template <typename Scalar = double>
BasicStateVector<Scalar> singlet() {
  return bell_pair<Scalar>(BellOutcome::PsiMinus);
}

/// singlet(0,1) (x) singlet(2,3): the left wing is qubits 0,1 and the right wing 2,3.
template <typename Scalar = double>
BasicStateVector<Scalar> make_two_singlets() {
  return tensor(singlet<Scalar>(), singlet<Scalar>());
}

template <typename Scalar>
Scalar prob_spin_up(const BasicStateVector<Scalar>& state, const SpinMeasurement& m) {
  detail::check_qubit(m.qubit, state.num_qubits());
  const auto projected = detail::apply_one<Scalar>(state.amplitudes(), state.num_qubits(),
                                                   m.qubit, detail::spin_projector<Scalar>(m.angle, +1));
  return std::clamp(projected.squaredNorm(), Scalar(0), Scalar(1));
}

template <typename Scalar>
struct SpinResult {
  int outcome;
  BasicStateVector<Scalar> state;
};

/// Born-rule collapse: +1 iff draw < P(+1).
template <typename Scalar>
SpinResult<Scalar> measure_spin(const BasicStateVector<Scalar>& state, const SpinMeasurement& m,
                                double draw) {
  if (!(draw >= 0.0 && draw < 1.0)) {
    throw std::invalid_argument("draw must lie in [0, 1)");
  }
  const Scalar p_up = prob_spin_up(state, m);
  const int outcome = draw < static_cast<double>(p_up) ? +1 : -1;
  auto projected = detail::apply_one<Scalar>(state.amplitudes(), state.num_qubits(), m.qubit,
                                             detail::spin_projector<Scalar>(m.angle, outcome));
  return {outcome, BasicStateVector<Scalar>::normalized(state.num_qubits(), std::move(projected))};
}

template <typename Scalar>
std::vector<std::pair<BellOutcome, Scalar>> bsm_probabilities(const BasicStateVector<Scalar>& state,
                                                              const BellMeasurement& bm) {
  detail::check_pair(bm.left, bm.right, state.num_qubits());
  std::vector<std::pair<BellOutcome, Scalar>> out;
  for (BellOutcome o : bsm_outcomes(bm.mode)) {
    const auto projected = detail::apply_two<Scalar>(state.amplitudes(), state.num_qubits(), bm.left,
                                                     bm.right, bell_projector<Scalar>(o, bm.mode));
    out.emplace_back(o, projected.squaredNorm());
  }
  return out;
}

template <typename Scalar>
struct BsmResult {
  BellOutcome outcome;
  BasicStateVector<Scalar> state;
};

/// Samples an analyzer outcome by cumulative probability in bsm_outcomes() order.
template <typename Scalar>
BsmResult<Scalar> bell_state_measurement(const BasicStateVector<Scalar>& state,
                                         const BellMeasurement& bm, double draw) {
  if (!(draw >= 0.0 && draw < 1.0)) {
    throw std::invalid_argument("draw must lie in [0, 1)");
  }
  const auto probs = bsm_probabilities(state, bm);
  BellOutcome chosen = probs.back().first;
  double cumulative = 0.0;
  for (const auto& [o, p] : probs) {
    if (p <= Scalar(0)) continue;
    cumulative += static_cast<double>(p);
    chosen = o;
    if (draw < cumulative) break;
  }
  auto projected = detail::apply_two<Scalar>(state.amplitudes(), state.num_qubits(), bm.left,
                                             bm.right, bell_projector<Scalar>(chosen, bm.mode));
  return {chosen, BasicStateVector<Scalar>::normalized(state.num_qubits(), std::move(projected))};
}

/// Fidelity of the (left, right) reduced state with a Bell state:
/// <psi| (|bell><bell| (x) 1) |psi>.
template <typename Scalar>
Scalar pair_fidelity(const BasicStateVector<Scalar>& state, int left, int right,
                     BellOutcome target) {
  detail::check_pair(left, right, state.num_qubits());
  const auto projected = detail::apply_two<Scalar>(state.amplitudes(), state.num_qubits(), left,
                                                   right, bell_projector<Scalar>(target, BsmMode::Full));
  return projected.squaredNorm();
}

using MeasurementOp = std::variant<SpinMeasurement, BellMeasurement>;

struct PlanStep {
  std::string label;
  MeasurementOp op;
};

/// Outcome codes: spin steps use +1/-1; Bell steps use the BellOutcome value.
inline int outcome_code(BellOutcome o) { return static_cast<int>(o); }

/// Joint distribution over the outcomes of a measurement plan. Keys list
/// outcome codes in the order of `labels`, which is sorted, so tables from
/// differently ordered plans over the same labels compare entry by entry.
template <typename Scalar = double>
struct OutcomeTable {
  std::vector<std::string> labels;
  std::map<std::vector<int>, Scalar> probabilities;

  Scalar total() const {
    Scalar t = 0;
    for (const auto& [k, p] : probabilities) t += p;
    return t;
  }

  std::size_t index_of(const std::string& label) const {
    const auto it = std::find(labels.begin(), labels.end(), label);
    if (it == labels.end()) throw std::out_of_range("unknown step label: " + label);
    return static_cast<std::size_t>(it - labels.begin());
  }

  std::map<int, Scalar> marginal(const std::string& label) const {
    const std::size_t k = index_of(label);
    std::map<int, Scalar> out;
    for (const auto& [key, p] : probabilities) out[key[k]] += p;
    return out;
  }

  Scalar max_abs_diff(const OutcomeTable& other) const {
    if (labels != other.labels) throw std::invalid_argument("tables have different labels");
    Scalar worst = 0;
    auto lookup = [](const OutcomeTable& t, const std::vector<int>& k) {
      const auto it = t.probabilities.find(k);
      return it == t.probabilities.end() ? Scalar(0) : it->second;
    };
    for (const auto& [k, p] : probabilities) worst = std::max(worst, std::abs(p - lookup(other, k)));
    for (const auto& [k, p] : other.probabilities) worst = std::max(worst, std::abs(p - lookup(*this, k)));
    return worst;
  }
};

namespace detail {

template <typename Scalar>
void expand(const Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, 1>& amps, int num_qubits,
            const std::vector<PlanStep>& plan, std::size_t step,
            const std::vector<std::size_t>& slot, std::vector<int>& key,
            std::map<std::vector<int>, Scalar>& table) {
  if (step == plan.size()) {
    table[key] += amps.squaredNorm();
    return;
  }
  const auto& op = plan[step].op;
  if (const auto* spin = std::get_if<SpinMeasurement>(&op)) {
    for (int outcome : {+1, -1}) {
      key[slot[step]] = outcome;
      expand<Scalar>(apply_one<Scalar>(amps, num_qubits, spin->qubit,
                                       spin_projector<Scalar>(spin->angle, outcome)),
                     num_qubits, plan, step + 1, slot, key, table);
    }
  } else {
    const auto& bm = std::get<BellMeasurement>(op);
    for (BellOutcome o : bsm_outcomes(bm.mode)) {
      key[slot[step]] = outcome_code(o);
      expand<Scalar>(apply_two<Scalar>(amps, num_qubits, bm.left, bm.right,
                                       bell_projector<Scalar>(o, bm.mode)),
                     num_qubits, plan, step + 1, slot, key, table);
    }
  }
}

}  // namespace detail

/// Depth-first expansion of every measurement branch. Branch weights are
/// squared norms of unnormalized projections, so zero-probability outcomes
/// appear in the table with weight 0.
template <typename Scalar>
OutcomeTable<Scalar> exact_branch_enumeration(const BasicStateVector<Scalar>& initial,
                                              const std::vector<PlanStep>& plan) {
  const int n = initial.num_qubits();
  OutcomeTable<Scalar> table;
  for (const auto& step : plan) {
    if (const auto* spin = std::get_if<SpinMeasurement>(&step.op)) {
      detail::check_qubit(spin->qubit, n);
    } else {
      const auto& bm = std::get<BellMeasurement>(step.op);
      detail::check_pair(bm.left, bm.right, n);
    }
    table.labels.push_back(step.label);
  }
  std::sort(table.labels.begin(), table.labels.end());
  if (std::adjacent_find(table.labels.begin(), table.labels.end()) != table.labels.end()) {
    throw std::invalid_argument("plan step labels must be unique");
  }
  std::vector<std::size_t> slot;
  for (const auto& step : plan) slot.push_back(table.index_of(step.label));
  std::vector<int> key(plan.size(), 0);
  detail::expand<Scalar>(initial.amplitudes(), n, plan, 0, slot, key, table.probabilities);
  return table;
}

}  // namespace swapsim
