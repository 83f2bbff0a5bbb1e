#pragma once

#include <Eigen/Dense>
#include <optional>

#include "qswitch/operator.hpp"

namespace qswitch {

enum class PropagatorMethod {
  automatic,           // eigendecomposition up to kEigenDimLimit, Taylor above
  eigendecomposition,  // dense, exact up to roundoff
  taylor,              // sparse exp(-iHt) v by scaled truncated Taylor series
};

inline constexpr std::size_t kEigenDimLimit = 2000;

/// exp(-i H t) for a fixed hermitian H (rad/ns). The eigendecomposition is
/// computed once, so repeated apply() calls are cheap.
class UnitaryPropagator {
 public:
  explicit UnitaryPropagator(Operator hamiltonian, PropagatorMethod method = PropagatorMethod::automatic);

  StateVector apply(double t_ns, const StateVector& state) const;

  const Operator& hamiltonian() const { return hamiltonian_; }
  PropagatorMethod method() const { return method_; }

 private:
  Operator hamiltonian_;
  PropagatorMethod method_;
  Eigen::VectorXd eigenvalues_;
  Eigen::MatrixXcd eigenvectors_;
};

/// exp(-i H t) psi. Throws std::invalid_argument when H deviates from
/// hermitian by more than 1e-8 or t < 0. Emits a truncation warning when the
/// result occupies a top Fock level above kTruncationWarningThreshold.
StateVector evolve_unitary(const Operator& hamiltonian, double t_ns, const StateVector& state,
                           PropagatorMethod method = PropagatorMethod::automatic);

/// Warn (via qswitch::warn) for every truncated mode whose top level holds
/// more than kTruncationWarningThreshold. Returns the number of warnings.
int check_truncation(const StateVector& state, std::string_view context);

}  // namespace qswitch
