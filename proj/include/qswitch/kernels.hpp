#pragma once

// Complex kernels used by the master-equation right-hand side.
//
// Every kernel has a scalar reference implementation; an AVX2/FMA variant is
// compiled when the toolchain supports it and chosen at runtime when the CPU
// does. QSWITCH_KERNELS=scalar|avx2 forces a variant.

#include <complex>
#include <cstddef>
#include <string_view>

namespace qswitch::kernels {

using cplx = std::complex<double>;

/// Borrowed compressed-row view. Column indices sorted within a row.
struct CsrView {
  std::size_t rows = 0;
  std::size_t cols = 0;
  const int* row_ptr = nullptr;
  const int* col_idx = nullptr;
  const cplx* values = nullptr;
};

struct KernelTable {
  std::string_view name;

  // y[0:n] += a * x[0:n]
  void (*axpy)(cplx a, const cplx* x, cplx* y, std::size_t n);

  // out[0:n] = x[0:n] + a * y[0:n]   (out may alias x)
  void (*axpby)(const cplx* x, cplx a, const cplx* y, cplx* out, std::size_t n);

  // Y = A * X with X, Y dense row-major (A.cols x ncols and A.rows x ncols).
  void (*csr_times_dense)(const CsrView& A, const cplx* X, cplx* Y, std::size_t ncols);

  // Y = X^dagger for a square row-major n x n matrix; Y must not alias X.
  void (*adjoint)(const cplx* X, cplx* Y, std::size_t n);

  // out = -i (M - M^dagger) for square row-major n x n; out must not alias M.
  void (*anti_hermitian_part)(const cplx* M, cplx* out, std::size_t n);
};

/// The reference implementation. Always available.
const KernelTable& scalar_kernels();

/// The AVX2/FMA table, or nullptr when it was not compiled in or the CPU lacks it.
const KernelTable* avx2_kernels();

/// Table selected once per process (CPU capability + QSWITCH_KERNELS override).
const KernelTable& active();

}  // namespace qswitch::kernels
