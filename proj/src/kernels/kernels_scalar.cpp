#include "kernels_impl.hpp"

namespace qswitch::kernels {

namespace scalar {

void axpy(cplx a, const cplx* x, cplx* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void axpby(const cplx* x, cplx a, const cplx* y, cplx* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = x[i] + a * y[i];
}

void csr_times_dense(const CsrView& A, const cplx* X, cplx* Y, std::size_t ncols) {
  for (std::size_t r = 0; r < A.rows; ++r) {
    cplx* yrow = Y + r * ncols;
    for (std::size_t c = 0; c < ncols; ++c) yrow[c] = 0.0;
    for (int k = A.row_ptr[r]; k < A.row_ptr[r + 1]; ++k) {
      axpy(A.values[k], X + static_cast<std::size_t>(A.col_idx[k]) * ncols, yrow, ncols);
    }
  }
}

void adjoint(const cplx* X, cplx* Y, std::size_t n) {
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) Y[c * n + r] = std::conj(X[r * n + c]);
}

void anti_hermitian_part(const cplx* M, cplx* out, std::size_t n) {
  const cplx minus_i(0.0, -1.0);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c)
      out[r * n + c] = minus_i * (M[r * n + c] - std::conj(M[c * n + r]));
}

}  // namespace scalar

const KernelTable& scalar_kernels() {
  static const KernelTable table{"scalar", scalar::axpy, scalar::axpby, scalar::csr_times_dense,
                                 scalar::adjoint, scalar::anti_hermitian_part};
  return table;
}

}  // namespace qswitch::kernels
