#include "qswitch/propagator.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "qswitch/diagnostics.hpp"

namespace qswitch {

namespace {

constexpr double kHermiticityTolerance = 1e-8;

// Induced 1-norm (max column sum) of a sparse matrix.
double one_norm(const SparseMatrix& m) {
  Eigen::VectorXd col_sums = Eigen::VectorXd::Zero(m.cols());
  for (int k = 0; k < m.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(m, k); it; ++it) col_sums(it.col()) += std::abs(it.value());
  return col_sums.size() ? col_sums.maxCoeff() : 0.0;
}

Eigen::VectorXcd taylor_expmv(const SparseMatrix& h, double t, const Eigen::VectorXcd& v) {
  const double scaled_norm = one_norm(h) * t;
  // Keep each sub-step's ||H dt|| <= 1 so 30 terms are far past convergence.
  const int substeps = std::max(1, static_cast<int>(std::ceil(scaled_norm)));
  const double dt = t / substeps;
  const cplx factor(0.0, -dt);
  Eigen::VectorXcd result = v;
  for (int s = 0; s < substeps; ++s) {
    Eigen::VectorXcd term = result;
    Eigen::VectorXcd sum = result;
    for (int k = 1; k <= 60; ++k) {
      term = (factor / static_cast<double>(k)) * (h * term);
      sum += term;
      if (term.norm() <= 1e-17 * sum.norm()) break;
    }
    result = std::move(sum);
  }
  return result;
}

}  // namespace

UnitaryPropagator::UnitaryPropagator(Operator hamiltonian, PropagatorMethod method)
    : hamiltonian_(std::move(hamiltonian)), method_(method) {
  if (hamiltonian_.hermiticity_deviation() > kHermiticityTolerance)
    throw std::invalid_argument("evolve_unitary: hamiltonian is not hermitian");
  if (method_ == PropagatorMethod::automatic)
    method_ = hamiltonian_.dim() <= kEigenDimLimit ? PropagatorMethod::eigendecomposition : PropagatorMethod::taylor;
  if (method_ == PropagatorMethod::eigendecomposition) {
    const Eigen::MatrixXcd dense = hamiltonian_.dense();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(0.5 * (dense + dense.adjoint()));
    if (solver.info() != Eigen::Success) throw std::runtime_error("eigendecomposition of hamiltonian failed");
    eigenvalues_ = solver.eigenvalues();
    eigenvectors_ = solver.eigenvectors();
  }
}

StateVector UnitaryPropagator::apply(double t_ns, const StateVector& state) const {
  require_same_layout(hamiltonian_.layout(), state.layout(), "evolve_unitary");
  if (t_ns < 0.0) throw std::invalid_argument("evolve_unitary: negative time");
  if (t_ns == 0.0) return state;
  if (method_ == PropagatorMethod::taylor)
    return StateVector(state.layout_ptr(), taylor_expmv(hamiltonian_.matrix(), t_ns, state.amplitudes()));
  Eigen::VectorXcd coeffs = eigenvectors_.adjoint() * state.amplitudes();
  for (Eigen::Index k = 0; k < coeffs.size(); ++k) coeffs(k) *= std::exp(cplx(0.0, -eigenvalues_(k) * t_ns));
  return StateVector(state.layout_ptr(), eigenvectors_ * coeffs);
}

StateVector evolve_unitary(const Operator& hamiltonian, double t_ns, const StateVector& state, PropagatorMethod method) {
  if (t_ns < 0.0) throw std::invalid_argument("evolve_unitary: negative time");
  StateVector out = UnitaryPropagator(hamiltonian, method).apply(t_ns, state);
  check_truncation(out, "evolve_unitary");
  return out;
}

int check_truncation(const StateVector& state, std::string_view context) {
  int count = 0;
  for (const auto& [label, occ] : top_level_occupations(state)) {
    if (occ > kTruncationWarningThreshold) {
      std::ostringstream msg;
      msg << context << ": top level of '" << label << "' holds " << occ << " (> " << kTruncationWarningThreshold
          << "); increase its truncation";
      warn(msg.str());
      ++count;
    }
  }
  return count;
}

}  // namespace qswitch
