#pragma once

// Inverse problems: single-image single-material (Paganin) thickness
// retrieval, regularised transfer-function inversion and the multi-image
// Schiske combination.

#include "xpci/field.hpp"
#include "xpci/propagation.hpp"

#include <span>

namespace xpci {

struct RetrievalConfig {
  double delta = 0.0;         ///< δ of the single material
  double mu_per_m = 0.0;      ///< linear attenuation coefficient μ (1/m), > 0
  double distance_m = 0.0;    ///< object-to-detector distance Δ (m), >= 0
  double wavelength_m = 0.0;  ///< design wavelength (m)
  double i0 = 1.0;            ///< flat-field intensity
  double regularization = 0.0;
  double floor_fraction = 1e-8; ///< filtered intensity floor, relative to i0

  void validate() const;
  /// δΔ/μ in m², the coefficient of k² in the low-pass denominator.
  double filter_coefficient() const { return delta * distance_m / mu_per_m; }
};

struct PaganinResult {
  RealMap thickness;          ///< projected thickness T(x, y) in metres
  std::size_t floored_pixels; ///< filtered values raised to floor_fraction·i0
};

/// T = -(1/μ)·ln(𝓕⁻¹{𝓕[I]/I0 / (1 + (δΔ/μ)(kx²+ky²))}).
PaganinResult paganin_retrieve(const IntensityImage& intensity, const RetrievalConfig& cfg);

/// 𝓕⁻¹{T*·𝓕[ψ_out]/(|T|² + ℵ)}. With ℵ = 0, throws NumericalError if |T|
/// falls below 1e-12 anywhere.
ComplexField invert_transfer_single(const ComplexField& output, const TransferFunction& t,
                                    double regularization = 0.0);

/// 𝓕⁻¹{Σ_j T_j*·𝓕[ψ_j] / (Σ_p |T_p|² + ℵ)}. With ℵ = 0, throws NumericalError
/// listing the spatial frequencies where every transfer function vanishes.
ComplexField schiske_combine(std::span<const ComplexField> outputs,
                             std::span<const TransferFunction> systems,
                             double regularization = 0.0);

} // namespace xpci
