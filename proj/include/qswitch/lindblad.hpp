#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qswitch/kernels.hpp"
#include "qswitch/operator.hpp"

namespace qswitch {

/// rate * D[X], D[X] rho = 2 X rho X^dag - X^dag X rho - rho X^dag X.
/// `rate` is in GHz and is multiplied by 2 pi inside the engine.
struct CollapseTerm {
  Operator op;
  double rate_ghz = 0.0;
  std::string label;
};

struct Observable {
  std::string label;
  Operator op;
};

struct IntegratorSettings {
  double dt_ns = 0.01;
  bool check_convergence = true;
  double convergence_rtol = 1e-4;
  double convergence_atol = 1e-8;
  /// Integrate on the smallest basis set closed under H, X and X^dag X.
  bool reduce_subspace = true;
  /// Remove sum_g w_g N_g when it commutes with H and ad(H0) X = lambda X.
  bool rotating_frame = true;
  /// Record min eigenvalue every k-th sample (0 disables).
  int min_eig_every = 1;
  bool keep_final_state = false;
  const kernels::KernelTable* kernels = nullptr;  // nullptr: kernels::active()
};

struct Trajectory {
  std::vector<double> times;
  std::vector<std::string> labels;
  std::vector<std::vector<double>> values;  // values[k] belongs to labels[k]
  std::vector<double> trace;
  std::vector<double> min_eig;              // NaN where not computed
  std::map<std::string, std::string> metadata;
  std::vector<std::string> warnings;
  std::optional<DensityMatrix> final_state;

  const std::vector<double>& series(std::string_view label) const;  // throws std::out_of_range
  bool has(std::string_view label) const;
};

/// D[X] rho with the factor-2 convention. The result is a traceless hermitian matrix.
DensityMatrix dissipator(const Operator& x, const DensityMatrix& rho);

/// Full generator -i[H, rho] + sum rate D[X] rho (angular units).
DensityMatrix lindblad_rhs(const Operator& hamiltonian, std::span<const CollapseTerm> collapses, const DensityMatrix& rho);

/// Fixed-step RK4 with hermitian symmetrization every step. Grid intervals are
/// split into equal substeps no longer than dt. With check_convergence the run
/// is repeated at dt/2; a final-observable mismatch beyond
/// rtol*|value| + atol throws NumericalError. Returns the dt run.
Trajectory integrate(const Operator& hamiltonian, std::span<const CollapseTerm> collapses, const DensityMatrix& rho0,
                     std::span<const double> t_grid, std::span<const Observable> observables,
                     IntegratorSettings settings = {});

/// 0, step, 2 step, ... , t_final (t_final always included).
std::vector<double> uniform_grid(double t_final_ns, double step_ns);

/// Basis indices reachable from `seed` under the sparsity patterns of `ops`.
std::vector<std::size_t> closed_support(std::span<const std::size_t> seed, std::span<const SparseMatrix* const> ops);

}  // namespace qswitch
