#pragma once

#include "xpci/kernels.hpp"

namespace xpci::kernels::detail {

// Scalar bodies, reused by the AVX2 variant for loop tails.

inline void multiply_range(cplx* data, const cplx* filter, std::size_t begin, std::size_t end) {
  auto* d = reinterpret_cast<double*>(data);
  const auto* f = reinterpret_cast<const double*>(filter);
  for (std::size_t i = begin; i < end; ++i) {
    const double a = d[2 * i], b = d[2 * i + 1];
    const double c = f[2 * i], e = f[2 * i + 1];
    d[2 * i] = a * c - b * e;
    d[2 * i + 1] = b * c + a * e;
  }
}

inline void multiply_real_range(cplx* data, const double* factor, std::size_t begin,
                                std::size_t end) {
  auto* d = reinterpret_cast<double*>(data);
  for (std::size_t i = begin; i < end; ++i) {
    d[2 * i] *= factor[i];
    d[2 * i + 1] *= factor[i];
  }
}

inline void scale_range(cplx* data, double s, std::size_t begin, std::size_t end) {
  auto* d = reinterpret_cast<double*>(data);
  for (std::size_t i = 2 * begin; i < 2 * end; ++i) d[i] *= s;
}

inline void norm_sq_range(const cplx* data, double* out, std::size_t begin, std::size_t end) {
  const auto* d = reinterpret_cast<const double*>(data);
  for (std::size_t i = begin; i < end; ++i) {
    const double a = d[2 * i], b = d[2 * i + 1];
    out[i] = a * a + b * b;
  }
}

inline void accumulate_norm_sq_range(const cplx* data, double w, double* acc, std::size_t begin,
                                     std::size_t end) {
  const auto* d = reinterpret_cast<const double*>(data);
  for (std::size_t i = begin; i < end; ++i) {
    const double a = d[2 * i], b = d[2 * i + 1];
    const double m = a * a + b * b;
    acc[i] = acc[i] + w * m;
  }
}

inline void accumulate_conj_product_range(const cplx* filter, const cplx* data, cplx* acc,
                                          std::size_t begin, std::size_t end) {
  const auto* t = reinterpret_cast<const double*>(filter);
  const auto* z = reinterpret_cast<const double*>(data);
  auto* s = reinterpret_cast<double*>(acc);
  for (std::size_t i = begin; i < end; ++i) {
    const double c = t[2 * i], e = t[2 * i + 1];
    const double a = z[2 * i], b = z[2 * i + 1];
    const double re = c * a + e * b;
    const double im = c * b - e * a;
    s[2 * i] = s[2 * i] + re;
    s[2 * i + 1] = s[2 * i + 1] + im;
  }
}

extern const Table scalar_table;
#if defined(XPCI_BUILD_AVX2)
extern const Table avx2_table;
#endif

} // namespace xpci::kernels::detail
