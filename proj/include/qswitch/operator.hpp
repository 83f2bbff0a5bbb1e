#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <complex>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qswitch/space.hpp"

namespace qswitch {

using cplx = std::complex<double>;
using SparseMatrix = Eigen::SparseMatrix<cplx, Eigen::RowMajor, int>;

/// Linear operator on the Hilbert space of a layout. Immutable after
/// construction; arithmetic returns new operators.
class Operator {
 public:
  Operator(LayoutPtr layout, SparseMatrix matrix);

  static Operator zero(LayoutPtr layout);
  static Operator identity(LayoutPtr layout);

  const SpaceLayout& layout() const { return *layout_; }
  const LayoutPtr& layout_ptr() const { return layout_; }
  const SparseMatrix& matrix() const { return matrix_; }
  std::size_t dim() const { return layout_->total_dim(); }

  Eigen::MatrixXcd dense() const { return Eigen::MatrixXcd(matrix_); }
  cplx element(std::size_t row, std::size_t col) const;
  Operator adjoint() const;

  /// max |A - A^dagger| entry.
  double hermiticity_deviation() const;
  bool is_hermitian(double tol = 1e-12) const { return hermiticity_deviation() <= tol; }
  double max_abs() const;

  Operator& operator+=(const Operator& other);
  Operator& operator-=(const Operator& other);
  Operator& operator*=(cplx scale);

 private:
  LayoutPtr layout_;
  SparseMatrix matrix_;
};

Operator operator+(Operator a, const Operator& b);
Operator operator-(Operator a, const Operator& b);
Operator operator*(const Operator& a, const Operator& b);
Operator operator*(cplx scale, Operator a);
inline Operator operator*(double scale, Operator a) { return cplx(scale) * std::move(a); }

Operator commutator(const Operator& a, const Operator& b);

/// Embed a local dim x dim matrix acting on one subsystem.
Operator embed(LayoutPtr layout, std::string_view label, const Eigen::MatrixXcd& local);

/// Truncated lowering operator, <n-1|a|n> = sqrt(n). Bosons and transmons only.
Operator annihilation(LayoutPtr layout, std::string_view label);
Operator creation(LayoutPtr layout, std::string_view label);
Operator number(LayoutPtr layout, std::string_view label);
/// |level><level| on one subsystem.
Operator level_projector(LayoutPtr layout, std::string_view label, int level);

enum class PauliAxis { x, y, z, plus, minus };

/// sigma^z|e> = +|e>, sigma^+ = |e><g|.
Operator pauli(LayoutPtr layout, std::string_view qubit, PauliAxis axis);
Eigen::Matrix2cd pauli_matrix(PauliAxis axis);

class StateVector {
 public:
  StateVector(LayoutPtr layout, Eigen::VectorXcd amplitudes);

  /// Computational basis state; levels in layout order.
  static StateVector basis(LayoutPtr layout, std::span<const int> levels);

  const SpaceLayout& layout() const { return *layout_; }
  const LayoutPtr& layout_ptr() const { return layout_; }
  const Eigen::VectorXcd& amplitudes() const { return amplitudes_; }
  std::size_t dim() const { return static_cast<std::size_t>(amplitudes_.size()); }

  double norm() const { return amplitudes_.norm(); }
  StateVector normalized() const;

 private:
  LayoutPtr layout_;
  Eigen::VectorXcd amplitudes_;
};

/// Amplitudes over the subsystems named in `labels` (first label slowest).
struct LocalFactor {
  std::vector<std::string> labels;
  Eigen::VectorXcd amplitudes;
};

/// Tensor product of factors; subsystems not mentioned sit in level 0.
StateVector product_state(LayoutPtr layout, std::span<const LocalFactor> factors);

StateVector apply(const Operator& op, const StateVector& state);
cplx inner(const StateVector& bra, const StateVector& ket);
/// |<a|b>|^2
double overlap_probability(const StateVector& a, const StateVector& b);

class DensityMatrix {
 public:
  DensityMatrix(LayoutPtr layout, SparseMatrix matrix);

  static DensityMatrix pure(const StateVector& state);
  static DensityMatrix from_dense(LayoutPtr layout, const Eigen::MatrixXcd& matrix);

  const SpaceLayout& layout() const { return *layout_; }
  const LayoutPtr& layout_ptr() const { return layout_; }
  const SparseMatrix& matrix() const { return matrix_; }
  std::size_t dim() const { return layout_->total_dim(); }

  cplx trace() const;
  double hermiticity_deviation() const;
  /// Smallest eigenvalue, computed on the rows/columns that carry weight.
  double min_eigenvalue() const;
  /// Basis indices with a nonzero row.
  std::vector<std::size_t> support() const;

  /// Throws std::invalid_argument unless hermitian, unit trace and PSD.
  void validate(double hermiticity_tol = 1e-10, double trace_tol = 1e-8, double eigen_tol = 1e-8) const;

 private:
  LayoutPtr layout_;
  SparseMatrix matrix_;
};

cplx expectation(const Operator& op, const StateVector& state);
cplx expectation(const Operator& op, const DensityMatrix& rho);

/// Reduced density matrix of `keep` (in that order) from a pure state.
DensityMatrix partial_trace(const StateVector& state, std::span<const std::string> keep);

/// Occupation of the highest level of every boson/transmon subsystem.
std::vector<std::pair<std::string, double>> top_level_occupations(const StateVector& state);

}  // namespace qswitch
