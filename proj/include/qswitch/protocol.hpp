#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qswitch/collective.hpp"
#include "qswitch/hamiltonians.hpp"
#include "qswitch/operator.hpp"

namespace qswitch {

enum class StepKind { qubit_flip, free_evolution, phase_rotation };

std::string_view to_string(StepKind kind);

/// One protocol step. Gates act as exp(-i angle sigma_axis) on every target;
/// with duration > 0 the gate is generated by H + (angle/duration) sigma_axis.
struct PulseStep {
  StepKind kind = StepKind::free_evolution;
  std::vector<std::string> targets;
  double duration_ns = 0.0;
  PauliAxis axis = PauliAxis::x;
  double angle = 0.0;
};

struct PulseSchedule {
  std::vector<PulseStep> steps;

  double total_duration() const;
  /// Throws std::invalid_argument on negative durations or gate axes other than x, y, z.
  void validate() const;
};

enum class SwitchDirection { decrease, increase };

/// States on the qubit-only sub-layout of the collection.
struct PredictedStates {
  StateVector psi1;
  StateVector psi2;
  StateVector psi3_target;
};

struct ProtocolPlan {
  QubitCollection qubits;
  DispersiveCoefficients coeffs;
  SwitchDirection direction = SwitchDirection::decrease;
  int j_initial = 0;
  int j_target = 0;
  double t2_ns = 0.0;
  std::vector<int> target_pairs;  // pairs touched by the gates
  std::vector<PairState> initial_pattern;
  std::vector<PairState> final_pattern;
  PulseSchedule schedule;
  /// Expected qubit state after each schedule step (same length as steps).
  std::vector<StateVector> expected;
  std::optional<PredictedStates> predicted;  // empty for a trivial plan
  Eigen::Vector4cd entry_pair_state;        // target-pair state entering the free evolution
};

/// Decrease the switch from |->_j to a pair-relabelled |->_{j - j'}.
/// Throws std::invalid_argument for j' > j or j out of range and
/// ResonanceError when chi_a + chi_b = 0.
ProtocolPlan plan_switch(const QubitCollection& qubits, const DispersiveCoefficients& coeffs, int j, int j_prime);

/// Undo a plan: restores the initial pattern from the final one.
ProtocolPlan reverse_plan(const ProtocolPlan& plan);

/// Closed-form qubit state at time t into the free-evolution step.
StateVector predicted_free_state(const ProtocolPlan& plan, double t_ns);

struct ProtocolSample {
  double t_ns = 0.0;
  int step = 0;
  double jz = 0.0;
  double closed_form_fidelity = 1.0;
};

struct ProtocolResult {
  std::vector<StateVector> states;      // state after each step
  std::vector<double> fidelities;       // against plan.expected
  std::vector<double> jz_after_step;
  std::vector<ProtocolSample> timeline;
  double final_fidelity = 1.0;          // against the final pattern
  double min_closed_form_fidelity = 1.0;
};

struct ProtocolOptions {
  int free_evolution_samples = 50;
  CollectiveOptions collective;
};

/// Run the schedule on `initial` under `hamiltonian` (both on the full layout).
ProtocolResult simulate_protocol(const ProtocolPlan& plan, const Operator& hamiltonian, const StateVector& initial,
                                 ProtocolOptions options = {});

/// Fidelity <phi| Tr_rest |psi><psi| |phi> of a qubit-sublayout state.
double qubit_fidelity(const StateVector& state, const StateVector& qubit_target);

/// g_ab <J^z>, in GHz.
double coupling_of_state(const StateVector& state, const QubitCollection& qubits, const DispersiveCoefficients& coeffs,
                         CollectiveOptions options = {});

}  // namespace qswitch
