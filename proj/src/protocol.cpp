#include "qswitch/protocol.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "qswitch/errors.hpp"
#include "qswitch/propagator.hpp"
#include "qswitch/units.hpp"

namespace qswitch {

std::string_view to_string(StepKind kind) {
  switch (kind) {
    case StepKind::qubit_flip: return "qubit_flip";
    case StepKind::free_evolution: return "free_evolution";
    case StepKind::phase_rotation: return "phase_rotation";
  }
  return "?";
}

double PulseSchedule::total_duration() const {
  double total = 0.0;
  for (const auto& s : steps) total += s.duration_ns;
  return total;
}

void PulseSchedule::validate() const {
  for (std::size_t k = 0; k < steps.size(); ++k) {
    const auto& s = steps[k];
    if (!(s.duration_ns >= 0.0)) throw std::invalid_argument("step " + std::to_string(k) + " has negative duration");
    if (s.kind != StepKind::free_evolution && s.axis != PauliAxis::x && s.axis != PauliAxis::y && s.axis != PauliAxis::z)
      throw std::invalid_argument("step " + std::to_string(k) + " rotates about a non-hermitian axis");
  }
}

namespace {

const double kInvSqrt2 = 1.0 / std::numbers::sqrt2;

Eigen::Vector4cd phi_plus() { return pair_state_amplitudes(PairState::triplet_zero); }

StateVector qubit_state(const QubitCollection& qubits, const std::vector<PairState>& pattern,
                        const std::vector<int>& special_pairs, const Eigen::Vector4cd& special) {
  const LayoutPtr sub = [&] {
    std::vector<Subsystem> subs;
    for (const auto& l : qubits.labels()) subs.push_back({l, SubsystemKind::qubit, 2});
    return make_layout(std::move(subs));
  }();
  auto factors = pair_pattern_factors(*sub, qubits, pattern);
  for (int k : special_pairs) factors[static_cast<std::size_t>(k)].amplitudes = special;
  return product_state(sub, factors);
}

Eigen::Vector4cd basis_pair(int index) {
  Eigen::Vector4cd v = Eigen::Vector4cd::Zero();
  v(index) = 1.0;
  return v;
}

// Pair amplitudes, order gg, ge, eg, ee.
constexpr int kEG = 2;

Eigen::Vector4cd free_evolved(const Eigen::Vector4cd& entry, double chi_sum_ghz, double t_ns) {
  // J^{+-} is 2 on |phi+>, 0 on |phi->, and the rest of H is a global phase on the pair.
  const Eigen::Vector4cd p = phi_plus();
  const cplx c = p.dot(entry);
  return entry + (std::exp(cplx(0.0, -2.0 * angular(chi_sum_ghz) * t_ns)) - 1.0) * c * p;
}

Eigen::Vector4cd rotate_first(const Eigen::Vector4cd& v, PauliAxis axis, double angle) {
  Eigen::Matrix2cd u;
  const Eigen::Matrix2cd s = pauli_matrix(axis);
  u = std::cos(angle) * Eigen::Matrix2cd::Identity() - cplx(0.0, std::sin(angle)) * s;
  Eigen::Matrix4cd full = Eigen::Matrix4cd::Zero();
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int c = 0; c < 2; ++c) full(a * 2 + c, b * 2 + c) = u(a, b);
  return full * v;
}

std::vector<std::string> first_qubits(const QubitCollection& qubits, const std::vector<int>& pairs) {
  std::vector<std::string> labels;
  for (int k : pairs) labels.push_back(qubits.pairs()[static_cast<std::size_t>(k)].first);
  return labels;
}

}  // namespace

ProtocolPlan plan_switch(const QubitCollection& qubits, const DispersiveCoefficients& coeffs, int j, int j_prime) {
  const int n = qubits.pair_count();
  if (j < 0 || j > n) throw std::invalid_argument("j = " + std::to_string(j) + " outside [0, " + std::to_string(n) + "]");
  if (j_prime < 0 || j_prime > j)
    throw std::invalid_argument("j' = " + std::to_string(j_prime) + " must lie in [0, j = " + std::to_string(j) + "]");

  ProtocolPlan plan;
  plan.qubits = qubits;
  plan.coeffs = coeffs;
  plan.j_initial = j;
  plan.j_target = j - j_prime;
  plan.initial_pattern = subradiant_pattern(qubits, j);
  plan.final_pattern = plan.initial_pattern;
  plan.entry_pair_state = basis_pair(kEG);
  if (j_prime == 0) return plan;

  const double chi_sum = coeffs.chi_a + coeffs.chi_b;
  if (chi_sum == 0.0) throw ResonanceError("chi_a + chi_b = 0: free-evolution step undefined");
  const double s = chi_sum > 0.0 ? 1.0 : -1.0;
  plan.t2_ns = std::numbers::pi / (4.0 * angular(std::abs(chi_sum)));

  for (int k = 0; k < j_prime; ++k) plan.target_pairs.push_back(k);
  for (int k : plan.target_pairs) plan.final_pattern[static_cast<std::size_t>(k)] = PairState::singlet;
  const auto targets = first_qubits(qubits, plan.target_pairs);

  const double flip_angle = std::numbers::pi / 2.0;
  const double phase_angle = -s * std::numbers::pi / 4.0;
  plan.schedule.steps = {
      {StepKind::qubit_flip, targets, 0.0, PauliAxis::x, flip_angle},
      {StepKind::free_evolution, {}, plan.t2_ns, PauliAxis::z, 0.0},
      {StepKind::phase_rotation, targets, 0.0, PauliAxis::z, phase_angle},
  };

  // psi2 pair: (|eg> - i s |ge>)/sqrt2
  Eigen::Vector4cd psi2_pair = Eigen::Vector4cd::Zero();
  psi2_pair(kEG) = kInvSqrt2;
  psi2_pair(1) = cplx(0.0, -s * kInvSqrt2);

  PredictedStates p{qubit_state(qubits, plan.initial_pattern, plan.target_pairs, basis_pair(kEG)),
                    qubit_state(qubits, plan.initial_pattern, plan.target_pairs, psi2_pair),
                    qubit_state(qubits, plan.final_pattern, {}, {})};
  plan.expected = {p.psi1, p.psi2, p.psi3_target};
  plan.predicted = std::move(p);
  return plan;
}

ProtocolPlan reverse_plan(const ProtocolPlan& forward) {
  ProtocolPlan plan = forward;
  plan.direction = forward.direction == SwitchDirection::decrease ? SwitchDirection::increase : SwitchDirection::decrease;
  std::swap(plan.j_initial, plan.j_target);
  std::swap(plan.initial_pattern, plan.final_pattern);
  if (forward.schedule.steps.empty()) return plan;

  const auto& fs = forward.schedule.steps;
  PulseStep undo_phase = fs[2];
  undo_phase.angle = -undo_phase.angle;
  PulseStep wait = fs[1];
  wait.duration_ns = 3.0 * forward.t2_ns;  // -t2 modulo the pair period 4 t2
  PulseStep undo_flip = fs[0];
  plan.schedule.steps = {undo_phase, wait, undo_flip};

  const Eigen::Vector4cd singlet = pair_state_amplitudes(PairState::singlet);
  const Eigen::Vector4cd rotated = rotate_first(singlet, PauliAxis::z, undo_phase.angle);
  plan.entry_pair_state = rotated;
  const StateVector after_phase = qubit_state(plan.qubits, plan.initial_pattern, plan.target_pairs, rotated);
  const StateVector after_wait =
      qubit_state(plan.qubits, plan.initial_pattern, plan.target_pairs,
                  free_evolved(rotated, plan.coeffs.chi_a + plan.coeffs.chi_b, wait.duration_ns));
  const StateVector final_state = qubit_state(plan.qubits, plan.final_pattern, {}, {});
  plan.expected = {after_phase, after_wait, final_state};
  plan.predicted = PredictedStates{after_phase, after_wait, final_state};
  return plan;
}

StateVector predicted_free_state(const ProtocolPlan& plan, double t_ns) {
  const Eigen::Vector4cd pair = free_evolved(plan.entry_pair_state, plan.coeffs.chi_a + plan.coeffs.chi_b, t_ns);
  return qubit_state(plan.qubits, plan.initial_pattern, plan.target_pairs, pair);
}

double qubit_fidelity(const StateVector& state, const StateVector& qubit_target) {
  std::vector<std::string> keep;
  for (const auto& s : qubit_target.layout().subsystems()) keep.push_back(s.label);
  const DensityMatrix reduced = partial_trace(state, keep);
  const Eigen::VectorXcd& phi = qubit_target.amplitudes();
  return std::real(phi.dot(reduced.matrix() * phi));
}

double coupling_of_state(const StateVector& state, const QubitCollection& qubits, const DispersiveCoefficients& coeffs,
                         CollectiveOptions options) {
  const Operator jz = collective_operator(state.layout_ptr(), qubits, CollectiveKind::z, options);
  return coeffs.g_ab * std::real(expectation(jz, state));
}

namespace {

StateVector apply_gate(const Operator& hamiltonian, const PulseStep& step, const StateVector& state) {
  const LayoutPtr& layout = state.layout_ptr();
  if (step.duration_ns > 0.0) {
    Operator generator = hamiltonian;
    for (const auto& q : step.targets) generator += (step.angle / step.duration_ns) * pauli(layout, q, step.axis);
    return evolve_unitary(generator, step.duration_ns, state);
  }
  const Eigen::Matrix2cd local =
      std::cos(step.angle) * Eigen::Matrix2cd::Identity() - cplx(0.0, std::sin(step.angle)) * pauli_matrix(step.axis);
  StateVector out = state;
  for (const auto& q : step.targets) out = apply(embed(layout, q, local), out);
  return out;
}

}  // namespace

ProtocolResult simulate_protocol(const ProtocolPlan& plan, const Operator& hamiltonian, const StateVector& initial,
                                 ProtocolOptions options) {
  require_same_layout(hamiltonian.layout(), initial.layout(), "simulate_protocol");
  plan.schedule.validate();
  const LayoutPtr& layout = initial.layout_ptr();
  const Operator jz = collective_operator(layout, plan.qubits, CollectiveKind::z, options.collective);
  auto jz_of = [&](const StateVector& s) { return std::real(expectation(jz, s)); };

  ProtocolResult result;
  StateVector state = initial;
  double t = 0.0;
  result.timeline.push_back({0.0, -1, jz_of(state), 1.0});

  std::optional<UnitaryPropagator> free;
  for (std::size_t k = 0; k < plan.schedule.steps.size(); ++k) {
    const PulseStep& step = plan.schedule.steps[k];
    if (step.kind == StepKind::free_evolution) {
      if (!free) free.emplace(hamiltonian);
      const StateVector entry = state;
      const int samples = std::max(1, options.free_evolution_samples);
      for (int s = 1; s <= samples; ++s) {
        const double dt = step.duration_ns * s / samples;
        const StateVector now = free->apply(dt, entry);
        const double f = qubit_fidelity(now, predicted_free_state(plan, dt));
        result.min_closed_form_fidelity = std::min(result.min_closed_form_fidelity, f);
        result.timeline.push_back({t + dt, static_cast<int>(k), jz_of(now), f});
        if (s == samples) state = now;
      }
      check_truncation(state, "simulate_protocol");
    } else {
      state = apply_gate(hamiltonian, step, state);
      result.timeline.push_back({t + step.duration_ns, static_cast<int>(k), jz_of(state), 1.0});
    }
    t += step.duration_ns;
    result.states.push_back(state);
    result.jz_after_step.push_back(jz_of(state));
    if (k < plan.expected.size()) result.fidelities.push_back(qubit_fidelity(state, plan.expected[k]));
  }
  const StateVector target = [&] {
    std::vector<Subsystem> subs;
    for (const auto& l : plan.qubits.labels()) subs.push_back({l, SubsystemKind::qubit, 2});
    return pair_pattern_state(make_layout(std::move(subs)), plan.qubits, plan.final_pattern);
  }();
  result.final_fidelity = qubit_fidelity(state, target);
  return result;
}

}  // namespace qswitch
