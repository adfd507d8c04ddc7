#pragma once

// Discrete Fourier transforms (FFTW backed).
// Forward transforms are unnormalised; inverse transforms carry the 1/N.
// Plans are cached per shape and may be executed from any thread.

#include "xpci/field.hpp"

#include <span>
#include <vector>

namespace xpci::fft {

void forward_2d(const Grid2D& grid, std::span<cplx> data);
void inverse_2d(const Grid2D& grid, std::span<cplx> data);

void forward_1d(std::span<cplx> data);
void inverse_1d(std::span<cplx> data);

/// k_x² + k_y² on the grid's Fourier lattice, in (rad/m)².
std::vector<double> k_squared(const Grid2D& grid);

} // namespace xpci::fft
