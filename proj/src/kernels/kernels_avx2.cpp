// Compiled with -mavx2. Only reached after a runtime CPU check.

#include "kernels_impl.hpp"

#include <cassert>
#include <immintrin.h>

namespace xpci::kernels::detail {
namespace {

// Lane notation: <a0 b0 a1 b1> holds two complex numbers a0+i·b0, a1+i·b1.

// <a b> * <c e>  ->  <ac - be, bc + ae>
inline __m256d complex_mul(__m256d x, __m256d y) {
  const __m256d y_re = _mm256_movedup_pd(y);          // <c0 c0 c1 c1>
  const __m256d y_im = _mm256_permute_pd(y, 0xF);     // <e0 e0 e1 e1>
  const __m256d x_swap = _mm256_permute_pd(x, 0x5);   // <b0 a0 b1 a1>
  return _mm256_addsub_pd(_mm256_mul_pd(x, y_re), _mm256_mul_pd(x_swap, y_im));
}

void multiply(std::span<cplx> data, std::span<const cplx> filter) {
  assert(data.size() == filter.size());
  const std::size_t n = data.size();
  auto* d = reinterpret_cast<double*>(data.data());
  const auto* f = reinterpret_cast<const double*>(filter.data());
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d x = _mm256_loadu_pd(d + 2 * i);
    const __m256d y = _mm256_loadu_pd(f + 2 * i);
    _mm256_storeu_pd(d + 2 * i, complex_mul(x, y));
  }
  multiply_range(data.data(), filter.data(), i, n);
}

void multiply_real(std::span<cplx> data, std::span<const double> factor) {
  assert(data.size() == factor.size());
  const std::size_t n = data.size();
  auto* d = reinterpret_cast<double*>(data.data());
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m128d r = _mm_loadu_pd(factor.data() + i);
    const __m256d rr = _mm256_permute4x64_pd(_mm256_castpd128_pd256(r), 0x50); // <r0 r0 r1 r1>
    _mm256_storeu_pd(d + 2 * i, _mm256_mul_pd(_mm256_loadu_pd(d + 2 * i), rr));
  }
  multiply_real_range(data.data(), factor.data(), i, n);
}

void scale(std::span<cplx> data, double s) {
  const std::size_t n = data.size();
  auto* d = reinterpret_cast<double*>(data.data());
  const __m256d ss = _mm256_set1_pd(s);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2)
    _mm256_storeu_pd(d + 2 * i, _mm256_mul_pd(_mm256_loadu_pd(d + 2 * i), ss));
  scale_range(data.data(), s, i, n);
}

// Four complex values -> <|z0|² |z1|² |z2|² |z3|²>
inline __m256d norm_sq4(const double* d) {
  const __m256d lo = _mm256_loadu_pd(d);
  const __m256d hi = _mm256_loadu_pd(d + 4);
  const __m256d s = _mm256_hadd_pd(_mm256_mul_pd(lo, lo), _mm256_mul_pd(hi, hi));
  // hadd yields <|z0|² |z2|² |z1|² |z3|²>
  return _mm256_permute4x64_pd(s, 0xD8);
}

void norm_sq(std::span<const cplx> data, std::span<double> out) {
  assert(data.size() == out.size());
  const std::size_t n = data.size();
  const auto* d = reinterpret_cast<const double*>(data.data());
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) _mm256_storeu_pd(out.data() + i, norm_sq4(d + 2 * i));
  norm_sq_range(data.data(), out.data(), i, n);
}

void accumulate_norm_sq(std::span<const cplx> data, double weight, std::span<double> acc) {
  assert(data.size() == acc.size());
  const std::size_t n = data.size();
  const auto* d = reinterpret_cast<const double*>(data.data());
  const __m256d w = _mm256_set1_pd(weight);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d m = norm_sq4(d + 2 * i);
    const __m256d a = _mm256_loadu_pd(acc.data() + i);
    _mm256_storeu_pd(acc.data() + i, _mm256_add_pd(a, _mm256_mul_pd(w, m)));
  }
  accumulate_norm_sq_range(data.data(), weight, acc.data(), i, n);
}

void accumulate_conj_product(std::span<const cplx> filter, std::span<const cplx> data,
                             std::span<cplx> acc) {
  assert(data.size() == filter.size() && data.size() == acc.size());
  const std::size_t n = data.size();
  const auto* t = reinterpret_cast<const double*>(filter.data());
  const auto* z = reinterpret_cast<const double*>(data.data());
  auto* s = reinterpret_cast<double*>(acc.data());
  const __m256d sign = _mm256_set1_pd(-0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d tt = _mm256_loadu_pd(t + 2 * i);
    const __m256d zz = _mm256_loadu_pd(z + 2 * i);
    const __m256d t_re = _mm256_movedup_pd(tt);
    const __m256d t_im = _mm256_permute_pd(tt, 0xF);
    const __m256d z_swap = _mm256_permute_pd(zz, 0x5);
    const __m256d p1 = _mm256_mul_pd(zz, t_re);                           // <ca cb>
    const __m256d p2 = _mm256_xor_pd(_mm256_mul_pd(z_swap, t_im), sign);  // <-eb -ea>
    const __m256d prod = _mm256_addsub_pd(p1, p2);                        // <ca+eb cb-ea>
    _mm256_storeu_pd(s + 2 * i, _mm256_add_pd(_mm256_loadu_pd(s + 2 * i), prod));
  }
  accumulate_conj_product_range(filter.data(), data.data(), acc.data(), i, n);
}

} // namespace

const Table avx2_table{"avx2",  multiply,           multiply_real,          scale,
                       norm_sq, accumulate_norm_sq, accumulate_conj_product};

} // namespace xpci::kernels::detail
