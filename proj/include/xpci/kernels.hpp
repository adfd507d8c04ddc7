#pragma once

// Pointwise complex kernels shared by every Fourier-filter operation.
// Each kernel has a scalar reference version and, where the CPU supports it,
// an AVX2 version. Both variants perform the same IEEE operations in the same
// order, so their results are bit-identical.

#include <complex>
#include <span>
#include <string_view>

namespace xpci::kernels {

using cplx = std::complex<double>;

struct Table {
  std::string_view name;
  /// data[i] *= filter[i]
  void (*multiply)(std::span<cplx> data, std::span<const cplx> filter);
  /// data[i] *= factor[i] (real factor)
  void (*multiply_real)(std::span<cplx> data, std::span<const double> factor);
  /// data[i] *= s
  void (*scale)(std::span<cplx> data, double s);
  /// out[i] = |data[i]|^2
  void (*norm_sq)(std::span<const cplx> data, std::span<double> out);
  /// acc[i] += weight * |data[i]|^2
  void (*accumulate_norm_sq)(std::span<const cplx> data, double weight, std::span<double> acc);
  /// acc[i] += conj(filter[i]) * data[i]
  void (*accumulate_conj_product)(std::span<const cplx> filter, std::span<const cplx> data,
                                  std::span<cplx> acc);
};

const Table& scalar();

/// nullptr when the binary was built without AVX2 or the CPU lacks it.
const Table* avx2();

/// The table used by the library. AVX2 when available, unless the
/// XPCI_KERNELS environment variable is set to "scalar".
const Table& active();

} // namespace xpci::kernels
