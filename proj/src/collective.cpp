#include "qswitch/collective.hpp"

#include <cmath>
#include <numbers>
#include <set>
#include <stdexcept>

namespace qswitch {

QubitCollection::QubitCollection(std::vector<std::string> labels) : labels_(std::move(labels)) {
  if (labels_.empty()) throw std::invalid_argument("qubit collection needs at least one qubit");
  std::set<std::string_view> seen;
  for (const auto& l : labels_)
    if (!seen.insert(l).second) throw std::invalid_argument("qubit '" + l + "' listed twice");
  for (std::size_t k = 0; k + 1 < labels_.size(); k += 2) pairs_.emplace_back(labels_[k], labels_[k + 1]);
  if (labels_.size() % 2 == 1) odd_tail_ = labels_.back();
}

Operator qubit_operator(LayoutPtr layout, std::string_view label, PauliAxis axis) {
  const Subsystem& s = layout->subsystem(label);
  if (s.kind == SubsystemKind::qubit) return pauli(std::move(layout), label, axis);
  if (s.kind != SubsystemKind::transmon)
    throw std::invalid_argument("'" + s.label + "' is not a qubit or transmon");
  const Operator c = annihilation(layout, label);
  const Operator cd = c.adjoint();
  switch (axis) {
    case PauliAxis::minus: return c;
    case PauliAxis::plus: return cd;
    case PauliAxis::z: return 2.0 * (cd * c) - Operator::identity(layout);
    case PauliAxis::x: return cd + c;
    case PauliAxis::y: return cplx(0.0, -1.0) * (cd - c);
  }
  throw std::logic_error("unhandled axis");
}

namespace {

PauliAxis axis_of(CollectiveKind kind) {
  switch (kind) {
    case CollectiveKind::x: return PauliAxis::x;
    case CollectiveKind::y: return PauliAxis::y;
    case CollectiveKind::z: return PauliAxis::z;
    case CollectiveKind::plus: return PauliAxis::plus;
    case CollectiveKind::minus: return PauliAxis::minus;
    case CollectiveKind::pm: break;
  }
  throw std::logic_error("J^{+-} has no single-site axis");
}

Operator pair_term(const LayoutPtr& layout, const std::pair<std::string, std::string>& pair, CollectiveKind kind) {
  if (kind == CollectiveKind::pm) {
    const Operator raise = qubit_operator(layout, pair.first, PauliAxis::plus) + qubit_operator(layout, pair.second, PauliAxis::plus);
    const Operator lower = qubit_operator(layout, pair.first, PauliAxis::minus) + qubit_operator(layout, pair.second, PauliAxis::minus);
    return raise * lower;
  }
  const PauliAxis axis = axis_of(kind);
  return qubit_operator(layout, pair.first, axis) + qubit_operator(layout, pair.second, axis);
}

}  // namespace

Operator collective_operator(LayoutPtr layout, const QubitCollection& qubits, CollectiveKind kind, CollectiveOptions options) {
  Operator total = Operator::zero(layout);
  for (const auto& pair : qubits.pairs()) total += pair_term(layout, pair, kind);
  if (kind == CollectiveKind::z && options.odd_qubit_counts_in_jz && qubits.odd_tail())
    total += qubit_operator(layout, *qubits.odd_tail(), PauliAxis::z);
  return total;
}

Operator pair_operator(LayoutPtr layout, const QubitCollection& qubits, int pair_index, CollectiveKind kind) {
  if (pair_index < 0 || pair_index >= qubits.pair_count()) throw std::out_of_range("pair index out of range");
  return pair_term(layout, qubits.pairs()[static_cast<std::size_t>(pair_index)], kind);
}

std::string_view to_string(PairState state) {
  switch (state) {
    case PairState::ground: return "gg";
    case PairState::excited: return "ee";
    case PairState::singlet: return "singlet";
    case PairState::triplet_zero: return "triplet0";
    case PairState::eg: return "eg";
    case PairState::ge: return "ge";
  }
  return "?";
}

std::optional<PairState> pair_state_from_string(std::string_view text) {
  for (PairState s : {PairState::ground, PairState::excited, PairState::singlet, PairState::triplet_zero, PairState::eg,
                      PairState::ge})
    if (to_string(s) == text) return s;
  return std::nullopt;
}

Eigen::Vector4cd pair_state_amplitudes(PairState state) {
  const double r = 1.0 / std::numbers::sqrt2;
  Eigen::Vector4cd v = Eigen::Vector4cd::Zero();  // gg, ge, eg, ee
  switch (state) {
    case PairState::ground: v(0) = 1.0; break;
    case PairState::excited: v(3) = 1.0; break;
    case PairState::singlet: v(2) = r; v(1) = -r; break;  // (|eg> - |ge>)/sqrt2
    case PairState::triplet_zero: v(2) = r; v(1) = r; break;
    case PairState::eg: v(2) = 1.0; break;
    case PairState::ge: v(1) = 1.0; break;
  }
  return v;
}

int pair_jz(PairState state) {
  switch (state) {
    case PairState::ground: return -2;
    case PairState::excited: return 2;
    default: return 0;
  }
}

std::vector<PairState> subradiant_pattern(const QubitCollection& qubits, int j) {
  const int n = qubits.pair_count();
  if (j < 0 || j > n)
    throw std::out_of_range("subradiant j = " + std::to_string(j) + " outside [0, " + std::to_string(n) + "]");
  std::vector<PairState> pattern(static_cast<std::size_t>(n), PairState::singlet);
  for (int k = 0; k < j; ++k) pattern[static_cast<std::size_t>(k)] = PairState::ground;
  return pattern;
}

std::vector<LocalFactor> pair_pattern_factors(const SpaceLayout& layout, const QubitCollection& qubits,
                                              std::span<const PairState> pattern) {
  if (static_cast<int>(pattern.size()) != qubits.pair_count())
    throw std::invalid_argument("pair pattern has " + std::to_string(pattern.size()) + " entries, collection has " +
                                std::to_string(qubits.pair_count()) + " pairs");
  std::vector<LocalFactor> factors;
  for (std::size_t k = 0; k < pattern.size(); ++k) {
    const auto& [first, second] = qubits.pairs()[k];
    const int d1 = layout.subsystem(first).dim;
    const int d2 = layout.subsystem(second).dim;
    const Eigen::Vector4cd pair = pair_state_amplitudes(pattern[k]);
    Eigen::VectorXcd amp = Eigen::VectorXcd::Zero(d1 * d2);
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) amp(a * d2 + b) = pair(a * 2 + b);
    factors.push_back({{first, second}, std::move(amp)});
  }
  if (qubits.odd_tail()) {
    const int d = layout.subsystem(*qubits.odd_tail()).dim;
    Eigen::VectorXcd g = Eigen::VectorXcd::Zero(d);
    g(0) = 1.0;
    factors.push_back({{*qubits.odd_tail()}, std::move(g)});
  }
  return factors;
}

StateVector pair_pattern_state(LayoutPtr layout, const QubitCollection& qubits, std::span<const PairState> pattern) {
  const auto factors = pair_pattern_factors(*layout, qubits, pattern);
  return product_state(std::move(layout), factors);
}

int pattern_jz(const QubitCollection& qubits, std::span<const PairState> pattern, CollectiveOptions options) {
  int jz = 0;
  for (PairState s : pattern) jz += pair_jz(s);
  if (options.odd_qubit_counts_in_jz && qubits.odd_tail()) jz -= 1;
  return jz;
}

StateVector subradiant_state(LayoutPtr layout, const QubitCollection& qubits, int j) {
  const auto pattern = subradiant_pattern(qubits, j);
  return pair_pattern_state(std::move(layout), qubits, pattern);
}

double ladder_coefficient(int j, int m, bool raising) {
  const double jj = j;
  const double mm = m;
  return raising ? std::sqrt((jj - mm) * (jj + mm + 1.0)) : std::sqrt((jj + mm) * (jj - mm + 1.0));
}

StateVector dicke_state(LayoutPtr layout, const QubitCollection& qubits, CollectiveQuantumNumbers q) {
  if (q.j < 0 || q.j > qubits.pair_count() || std::abs(q.m) > q.j)
    throw std::out_of_range("quantum numbers (j=" + std::to_string(q.j) + ", m=" + std::to_string(q.m) +
                            ") out of range");
  StateVector state = subradiant_state(layout, qubits, q.j);
  if (q.m == -q.j) return state;
  const Operator raise = collective_operator(layout, qubits, CollectiveKind::plus);
  for (int m = -q.j; m < q.m; ++m) {
    const StateVector next = apply(raise, state);
    state = StateVector(layout, next.amplitudes() / ladder_coefficient(q.j, m, true));
  }
  return state;
}

}  // namespace qswitch
