#pragma once

// Transport-of-intensity equation: -∇⊥·(I∇⊥φ) = k ∂I/∂z, expanded into the
// prism (∇I·∇φ) and lens (I∇²φ) contributions.

#include "xpci/field.hpp"

#include <cstddef>

namespace xpci {

enum class Derivative {
  spectral,         ///< Fourier differentiation on the periodic grid
  finite_difference ///< periodic central differences (cross-check mode)
};

struct TieTerms {
  RealMap gradient_term;  ///< ∇⊥I·∇⊥φ
  RealMap laplacian_term; ///< I∇⊥²φ
  RealMap didz;           ///< -(gradient_term + laplacian_term)/k
};

/// The phase must be unwrapped and periodic across the grid edges when the
/// spectral mode is used.
TieTerms tie_terms(const IntensityImage& intensity, const PhaseMap& phase, double wavenumber,
                   Derivative mode = Derivative::spectral);

struct TieForwardResult {
  IntensityImage intensity;
  std::size_t clamped_pixels; ///< predictions below zero, set to 0
};

/// I(z+δz) ≈ I - (δz/k)∇⊥·(I∇⊥φ).
TieForwardResult tie_forward(const IntensityImage& intensity, const PhaseMap& phase,
                             double wavenumber, double dz_m,
                             Derivative mode = Derivative::spectral);

} // namespace xpci
