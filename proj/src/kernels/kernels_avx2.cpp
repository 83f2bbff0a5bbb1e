// Compiled with -mavx2 -mfma. Nothing in here may run before dispatch.cpp has
// confirmed the CPU supports both.
#include <immintrin.h>

#include "kernels_impl.hpp"

namespace qswitch::kernels {

namespace {

// One __m256d holds two complex doubles laid out (re0, im0, re1, im1).
inline __m256d load2(const cplx* p) { return _mm256_loadu_pd(reinterpret_cast<const double*>(p)); }
inline void store2(cplx* p, __m256d v) { _mm256_storeu_pd(reinterpret_cast<double*>(p), v); }

// a * x for a broadcast complex a = (ar, ai).
inline __m256d cmul_broadcast(__m256d ar, __m256d ai, __m256d x) {
  const __m256d x_swapped = _mm256_permute_pd(x, 0b0101);  // (im0, re0, im1, re1)
  return _mm256_fmaddsub_pd(ar, x, _mm256_mul_pd(ai, x_swapped));
}

void axpy(cplx a, const cplx* x, cplx* y, std::size_t n) {
  const __m256d ar = _mm256_set1_pd(a.real());
  const __m256d ai = _mm256_set1_pd(a.imag());
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d y0 = _mm256_add_pd(load2(y + i), cmul_broadcast(ar, ai, load2(x + i)));
    const __m256d y1 = _mm256_add_pd(load2(y + i + 2), cmul_broadcast(ar, ai, load2(x + i + 2)));
    store2(y + i, y0);
    store2(y + i + 2, y1);
  }
  for (; i + 2 <= n; i += 2) store2(y + i, _mm256_add_pd(load2(y + i), cmul_broadcast(ar, ai, load2(x + i))));
  for (; i < n; ++i) y[i] += a * x[i];
}

void axpby(const cplx* x, cplx a, const cplx* y, cplx* out, std::size_t n) {
  const __m256d ar = _mm256_set1_pd(a.real());
  const __m256d ai = _mm256_set1_pd(a.imag());
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) store2(out + i, _mm256_add_pd(load2(x + i), cmul_broadcast(ar, ai, load2(y + i))));
  for (; i < n; ++i) out[i] = x[i] + a * y[i];
}

void csr_times_dense(const CsrView& A, const cplx* X, cplx* Y, std::size_t ncols) {
  const __m256d zero = _mm256_setzero_pd();
  for (std::size_t r = 0; r < A.rows; ++r) {
    cplx* yrow = Y + r * ncols;
    std::size_t c = 0;
    for (; c + 2 <= ncols; c += 2) store2(yrow + c, zero);
    for (; c < ncols; ++c) yrow[c] = 0.0;
    for (int k = A.row_ptr[r]; k < A.row_ptr[r + 1]; ++k) {
      axpy(A.values[k], X + static_cast<std::size_t>(A.col_idx[k]) * ncols, yrow, ncols);
    }
  }
}

// Blocked conjugate transpose; a 2x2 complex block is two __m256d rows.
void adjoint(const cplx* X, cplx* Y, std::size_t n) {
  const __m256d conj_mask = _mm256_set_pd(-0.0, 0.0, -0.0, 0.0);
  std::size_t r = 0;
  for (; r + 2 <= n; r += 2) {
    std::size_t c = 0;
    for (; c + 2 <= n; c += 2) {
      const __m256d row0 = _mm256_xor_pd(load2(X + r * n + c), conj_mask);        // x(r,c) x(r,c+1)
      const __m256d row1 = _mm256_xor_pd(load2(X + (r + 1) * n + c), conj_mask);  // x(r+1,c) x(r+1,c+1)
      store2(Y + c * n + r, _mm256_permute2f128_pd(row0, row1, 0x20));
      store2(Y + (c + 1) * n + r, _mm256_permute2f128_pd(row0, row1, 0x31));
    }
    for (; c < n; ++c) {
      Y[c * n + r] = std::conj(X[r * n + c]);
      Y[c * n + r + 1] = std::conj(X[(r + 1) * n + c]);
    }
  }
  for (; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) Y[c * n + r] = std::conj(X[r * n + c]);
}

void anti_hermitian_part(const cplx* M, cplx* out, std::size_t n) {
  adjoint(M, out, n);
  // out currently holds M^dagger; turn it into -i (M - M^dagger) = i M^dagger - i M.
  const __m256d sign_flip = _mm256_set_pd(-0.0, 0.0, -0.0, 0.0);
  const std::size_t total = n * n;
  std::size_t i = 0;
  for (; i + 2 <= total; i += 2) {
    const __m256d diff = _mm256_sub_pd(load2(M + i), load2(out + i));  // (dr, di)
    // -i (dr + i di) = di - i dr  ->  (di, -dr)
    const __m256d swapped = _mm256_permute_pd(diff, 0b0101);
    store2(out + i, _mm256_xor_pd(swapped, sign_flip));
  }
  for (; i < total; ++i) out[i] = cplx(0.0, -1.0) * (M[i] - out[i]);
}

}  // namespace

const KernelTable& avx2_table_unchecked() {
  static const KernelTable table{"avx2", axpy, axpby, csr_times_dense, adjoint, anti_hermitian_part};
  return table;
}

}  // namespace qswitch::kernels
