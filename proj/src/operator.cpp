#include "qswitch/operator.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qswitch {

namespace {

using Triplet = Eigen::Triplet<cplx, int>;

SparseMatrix from_triplets(std::size_t dim, const std::vector<Triplet>& triplets) {
  SparseMatrix m(static_cast<int>(dim), static_cast<int>(dim));
  m.setFromTriplets(triplets.begin(), triplets.end());
  m.makeCompressed();
  return m;
}

void require_layout(const LayoutPtr& layout) {
  if (!layout) throw std::invalid_argument("null layout");
}

}  // namespace

Operator::Operator(LayoutPtr layout, SparseMatrix matrix) : layout_(std::move(layout)), matrix_(std::move(matrix)) {
  require_layout(layout_);
  const auto dim = static_cast<Eigen::Index>(layout_->total_dim());
  if (matrix_.rows() != dim || matrix_.cols() != dim)
    throw std::invalid_argument("operator matrix is " + std::to_string(matrix_.rows()) + "x" +
                                std::to_string(matrix_.cols()) + ", layout needs " + std::to_string(dim));
  matrix_.makeCompressed();
}

Operator Operator::zero(LayoutPtr layout) {
  require_layout(layout);
  const auto dim = static_cast<int>(layout->total_dim());
  return Operator(std::move(layout), SparseMatrix(dim, dim));
}

Operator Operator::identity(LayoutPtr layout) {
  require_layout(layout);
  const auto dim = static_cast<int>(layout->total_dim());
  SparseMatrix id(dim, dim);
  id.setIdentity();
  return Operator(std::move(layout), std::move(id));
}

cplx Operator::element(std::size_t row, std::size_t col) const {
  return matrix_.coeff(static_cast<int>(row), static_cast<int>(col));
}

Operator Operator::adjoint() const { return Operator(layout_, SparseMatrix(matrix_.adjoint())); }

double Operator::hermiticity_deviation() const {
  const SparseMatrix diff = matrix_ - SparseMatrix(matrix_.adjoint());
  double worst = 0.0;
  for (int k = 0; k < diff.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(diff, k); it; ++it) worst = std::max(worst, std::abs(it.value()));
  return worst;
}

double Operator::max_abs() const {
  double worst = 0.0;
  for (int k = 0; k < matrix_.nonZeros(); ++k) worst = std::max(worst, std::abs(matrix_.valuePtr()[k]));
  return worst;
}

Operator& Operator::operator+=(const Operator& other) {
  require_same_layout(*layout_, other.layout(), "operator +");
  matrix_ += other.matrix_;
  matrix_.makeCompressed();
  return *this;
}

Operator& Operator::operator-=(const Operator& other) {
  require_same_layout(*layout_, other.layout(), "operator -");
  matrix_ -= other.matrix_;
  matrix_.makeCompressed();
  return *this;
}

Operator& Operator::operator*=(cplx scale) {
  matrix_ *= scale;
  return *this;
}

Operator operator+(Operator a, const Operator& b) { return a += b; }
Operator operator-(Operator a, const Operator& b) { return a -= b; }

Operator operator*(const Operator& a, const Operator& b) {
  require_same_layout(a.layout(), b.layout(), "operator *");
  return Operator(a.layout_ptr(), SparseMatrix(a.matrix() * b.matrix()));
}

Operator operator*(cplx scale, Operator a) { return a *= scale; }

Operator commutator(const Operator& a, const Operator& b) {
  require_same_layout(a.layout(), b.layout(), "commutator");
  return Operator(a.layout_ptr(), SparseMatrix(a.matrix() * b.matrix() - b.matrix() * a.matrix()));
}

Operator embed(LayoutPtr layout, std::string_view label, const Eigen::MatrixXcd& local) {
  require_layout(layout);
  const std::size_t pos = layout->position(label);
  const auto d = static_cast<std::size_t>(layout->subsystems()[pos].dim);
  if (static_cast<std::size_t>(local.rows()) != d || static_cast<std::size_t>(local.cols()) != d)
    throw std::invalid_argument("local operator for '" + std::string(label) + "' must be " + std::to_string(d) + "x" +
                                std::to_string(d));
  const std::size_t right = layout->stride(pos);
  const std::size_t left = layout->total_dim() / (d * right);

  std::vector<Triplet> triplets;
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      const cplx v = local(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      if (v == cplx(0.0)) continue;
      for (std::size_t l = 0; l < left; ++l) {
        const std::size_t row_base = (l * d + i) * right;
        const std::size_t col_base = (l * d + j) * right;
        for (std::size_t r = 0; r < right; ++r)
          triplets.emplace_back(static_cast<int>(row_base + r), static_cast<int>(col_base + r), v);
      }
    }
  }
  const std::size_t dim = layout->total_dim();
  return Operator(std::move(layout), from_triplets(dim, triplets));
}

Operator annihilation(LayoutPtr layout, std::string_view label) {
  require_layout(layout);
  const Subsystem& s = layout->subsystem(label);
  if (s.kind == SubsystemKind::qubit)
    throw std::invalid_argument("'" + s.label + "' is a qubit; use pauli() for two-level operators");
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(s.dim, s.dim);
  for (int n = 1; n < s.dim; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
  return embed(std::move(layout), label, a);
}

Operator creation(LayoutPtr layout, std::string_view label) { return annihilation(std::move(layout), label).adjoint(); }

Operator number(LayoutPtr layout, std::string_view label) {
  require_layout(layout);
  const Subsystem& s = layout->subsystem(label);
  if (s.kind == SubsystemKind::qubit)
    throw std::invalid_argument("'" + s.label + "' is a qubit; use pauli() for two-level operators");
  Eigen::MatrixXcd n = Eigen::MatrixXcd::Zero(s.dim, s.dim);
  for (int k = 0; k < s.dim; ++k) n(k, k) = static_cast<double>(k);
  return embed(std::move(layout), label, n);
}

Operator level_projector(LayoutPtr layout, std::string_view label, int level) {
  require_layout(layout);
  const Subsystem& s = layout->subsystem(label);
  if (level < 0 || level >= s.dim) throw std::out_of_range("level out of range for '" + s.label + "'");
  Eigen::MatrixXcd p = Eigen::MatrixXcd::Zero(s.dim, s.dim);
  p(level, level) = 1.0;
  return embed(std::move(layout), label, p);
}

Eigen::Matrix2cd pauli_matrix(PauliAxis axis) {
  const cplx i(0.0, 1.0);
  Eigen::Matrix2cd m = Eigen::Matrix2cd::Zero();
  // Basis order (g, e).
  switch (axis) {
    case PauliAxis::x: m << 0.0, 1.0, 1.0, 0.0; break;
    case PauliAxis::y: m << 0.0, i, -i, 0.0; break;
    case PauliAxis::z: m << -1.0, 0.0, 0.0, 1.0; break;
    case PauliAxis::plus: m(1, 0) = 1.0; break;
    case PauliAxis::minus: m(0, 1) = 1.0; break;
  }
  return m;
}

Operator pauli(LayoutPtr layout, std::string_view qubit, PauliAxis axis) {
  require_layout(layout);
  const Subsystem& s = layout->subsystem(qubit);
  if (s.kind != SubsystemKind::qubit) throw std::invalid_argument("'" + s.label + "' is not a qubit");
  return embed(std::move(layout), qubit, pauli_matrix(axis));
}

StateVector::StateVector(LayoutPtr layout, Eigen::VectorXcd amplitudes)
    : layout_(std::move(layout)), amplitudes_(std::move(amplitudes)) {
  require_layout(layout_);
  if (static_cast<std::size_t>(amplitudes_.size()) != layout_->total_dim())
    throw std::invalid_argument("state vector length does not match layout");
}

StateVector StateVector::basis(LayoutPtr layout, std::span<const int> levels) {
  require_layout(layout);
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(layout->total_dim()));
  v(static_cast<Eigen::Index>(layout->compose(levels))) = 1.0;
  return StateVector(std::move(layout), std::move(v));
}

StateVector StateVector::normalized() const {
  const double n = norm();
  if (n == 0.0) throw std::invalid_argument("cannot normalize the zero vector");
  return StateVector(layout_, amplitudes_ / n);
}

StateVector product_state(LayoutPtr layout, std::span<const LocalFactor> factors) {
  require_layout(layout);
  const std::size_t nsub = layout->size();
  // owner[p] = (factor index, position of p inside the factor)
  std::vector<std::pair<int, int>> owner(nsub, {-1, -1});
  for (std::size_t f = 0; f < factors.size(); ++f) {
    std::size_t local_dim = 1;
    for (std::size_t k = 0; k < factors[f].labels.size(); ++k) {
      const std::size_t p = layout->position(factors[f].labels[k]);
      if (owner[p].first >= 0) throw std::invalid_argument("subsystem '" + factors[f].labels[k] + "' in two factors");
      owner[p] = {static_cast<int>(f), static_cast<int>(k)};
      local_dim *= static_cast<std::size_t>(layout->subsystems()[p].dim);
    }
    if (static_cast<std::size_t>(factors[f].amplitudes.size()) != local_dim)
      throw std::invalid_argument("factor amplitude length does not match its subsystems");
  }

  std::vector<std::vector<std::size_t>> positions(factors.size());
  for (std::size_t f = 0; f < factors.size(); ++f)
    for (const auto& label : factors[f].labels) positions[f].push_back(layout->position(label));

  const std::size_t dim = layout->total_dim();
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(dim));
  for (std::size_t index = 0; index < dim; ++index) {
    bool vacuum_ok = true;
    for (std::size_t p = 0; p < nsub && vacuum_ok; ++p)
      if (owner[p].first < 0 && layout->digit(index, p) != 0) vacuum_ok = false;
    if (!vacuum_ok) continue;
    cplx amp = 1.0;
    for (std::size_t f = 0; f < factors.size() && amp != cplx(0.0); ++f) {
      std::size_t local = 0;
      for (std::size_t p : positions[f])
        local = local * static_cast<std::size_t>(layout->subsystems()[p].dim) + static_cast<std::size_t>(layout->digit(index, p));
      amp *= factors[f].amplitudes(static_cast<Eigen::Index>(local));
    }
    v(static_cast<Eigen::Index>(index)) = amp;
  }
  return StateVector(std::move(layout), std::move(v));
}

StateVector apply(const Operator& op, const StateVector& state) {
  require_same_layout(op.layout(), state.layout(), "apply");
  return StateVector(op.layout_ptr(), op.matrix() * state.amplitudes());
}

cplx inner(const StateVector& bra, const StateVector& ket) {
  require_same_layout(bra.layout(), ket.layout(), "inner product");
  return bra.amplitudes().dot(ket.amplitudes());  // conjugates the left argument
}

double overlap_probability(const StateVector& a, const StateVector& b) { return std::norm(inner(a, b)); }

DensityMatrix::DensityMatrix(LayoutPtr layout, SparseMatrix matrix) : layout_(std::move(layout)), matrix_(std::move(matrix)) {
  require_layout(layout_);
  const auto dim = static_cast<Eigen::Index>(layout_->total_dim());
  if (matrix_.rows() != dim || matrix_.cols() != dim)
    throw std::invalid_argument("density matrix size does not match layout");
  matrix_.makeCompressed();
}

DensityMatrix DensityMatrix::pure(const StateVector& state) {
  std::vector<std::pair<int, cplx>> nonzero;
  const auto& amp = state.amplitudes();
  for (Eigen::Index i = 0; i < amp.size(); ++i)
    if (amp(i) != cplx(0.0)) nonzero.emplace_back(static_cast<int>(i), amp(i));
  std::vector<Triplet> triplets;
  triplets.reserve(nonzero.size() * nonzero.size());
  for (const auto& [r, ar] : nonzero)
    for (const auto& [c, ac] : nonzero) triplets.emplace_back(r, c, ar * std::conj(ac));
  return DensityMatrix(state.layout_ptr(), from_triplets(state.dim(), triplets));
}

DensityMatrix DensityMatrix::from_dense(LayoutPtr layout, const Eigen::MatrixXcd& matrix) {
  return DensityMatrix(std::move(layout), matrix.sparseView(cplx(0.0), 0.0));
}

cplx DensityMatrix::trace() const {
  cplx t = 0.0;
  for (int k = 0; k < matrix_.outerSize(); ++k) t += matrix_.coeff(k, k);
  return t;
}

double DensityMatrix::hermiticity_deviation() const {
  return Operator(layout_, matrix_).hermiticity_deviation();
}

std::vector<std::size_t> DensityMatrix::support() const {
  std::vector<std::size_t> rows;
  for (int k = 0; k < matrix_.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(matrix_, k); it; ++it) {
      if (it.value() != cplx(0.0)) {
        rows.push_back(static_cast<std::size_t>(k));
        break;
      }
    }
  }
  return rows;
}

double DensityMatrix::min_eigenvalue() const {
  const auto rows = support();
  if (rows.empty()) return 0.0;
  const auto n = static_cast<Eigen::Index>(rows.size());
  Eigen::MatrixXcd block(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      block(i, j) = matrix_.coeff(static_cast<int>(rows[static_cast<std::size_t>(i)]), static_cast<int>(rows[static_cast<std::size_t>(j)]));
  const Eigen::MatrixXcd herm = 0.5 * (block + block.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(herm, Eigen::EigenvaluesOnly);
  const double smallest = solver.eigenvalues()(0);
  // Rows outside the support contribute zero eigenvalues.
  return rows.size() < dim() ? std::min(smallest, 0.0) : smallest;
}

void DensityMatrix::validate(double hermiticity_tol, double trace_tol, double eigen_tol) const {
  if (hermiticity_deviation() > hermiticity_tol) throw std::invalid_argument("density matrix is not hermitian");
  if (std::abs(trace() - 1.0) > trace_tol) throw std::invalid_argument("density matrix trace is not 1");
  if (min_eigenvalue() < -eigen_tol) throw std::invalid_argument("density matrix has a negative eigenvalue");
}

cplx expectation(const Operator& op, const StateVector& state) {
  require_same_layout(op.layout(), state.layout(), "expectation");
  return state.amplitudes().dot(op.matrix() * state.amplitudes());
}

cplx expectation(const Operator& op, const DensityMatrix& rho) {
  require_same_layout(op.layout(), rho.layout(), "expectation");
  // Tr(A rho) = sum_ij A_ij rho_ji
  const SparseMatrix rho_t = rho.matrix().transpose();
  return op.matrix().cwiseProduct(rho_t).sum();
}

DensityMatrix partial_trace(const StateVector& state, std::span<const std::string> keep) {
  const SpaceLayout& layout = state.layout();
  LayoutPtr reduced = sublayout(layout, keep);
  std::vector<std::size_t> kept_pos;
  for (const auto& label : keep) kept_pos.push_back(layout.position(label));
  std::vector<bool> is_kept(layout.size(), false);
  for (std::size_t p : kept_pos) is_kept[p] = true;

  // Group amplitudes by environment index: psi(k, e).
  const std::size_t dk = reduced->total_dim();
  const std::size_t de = layout.total_dim() / dk;
  Eigen::MatrixXcd psi = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(dk), static_cast<Eigen::Index>(de));
  for (std::size_t index = 0; index < layout.total_dim(); ++index) {
    std::size_t k = 0;
    for (std::size_t p : kept_pos) k = k * static_cast<std::size_t>(layout.subsystems()[p].dim) + static_cast<std::size_t>(layout.digit(index, p));
    std::size_t e = 0;
    for (std::size_t p = 0; p < layout.size(); ++p)
      if (!is_kept[p]) e = e * static_cast<std::size_t>(layout.subsystems()[p].dim) + static_cast<std::size_t>(layout.digit(index, p));
    psi(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(e)) = state.amplitudes()(static_cast<Eigen::Index>(index));
  }
  return DensityMatrix::from_dense(reduced, psi * psi.adjoint());
}

std::vector<std::pair<std::string, double>> top_level_occupations(const StateVector& state) {
  std::vector<std::pair<std::string, double>> result;
  const SpaceLayout& layout = state.layout();
  for (std::size_t p = 0; p < layout.size(); ++p) {
    const Subsystem& s = layout.subsystems()[p];
    if (s.kind == SubsystemKind::qubit) continue;
    double occ = 0.0;
    for (std::size_t index = 0; index < layout.total_dim(); ++index)
      if (layout.digit(index, p) == s.dim - 1) occ += std::norm(state.amplitudes()(static_cast<Eigen::Index>(index)));
    result.emplace_back(s.label, occ);
  }
  return result;
}

}  // namespace qswitch
