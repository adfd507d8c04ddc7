#include "xpci/fft.hpp"

#include "xpci/kernels.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <tuple>

namespace xpci::fft {
namespace {

// FFTW planning is not thread-safe; execution of an existing plan is.
fftw_plan plan_for(std::size_t n0, std::size_t n1, int sign) {
  static std::mutex mutex;
  static std::map<std::tuple<std::size_t, std::size_t, int>, fftw_plan> cache;
  std::lock_guard lock(mutex);
  const auto key = std::make_tuple(n0, n1, sign);
  if (auto it = cache.find(key); it != cache.end()) return it->second;
  const std::size_t n = n0 * n1;
  auto* scratch = fftw_alloc_complex(n);
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  fftw_plan plan = (n0 == 1)
                       ? fftw_plan_dft_1d(static_cast<int>(n1), scratch, scratch, sign, flags)
                       : fftw_plan_dft_2d(static_cast<int>(n0), static_cast<int>(n1), scratch,
                                          scratch, sign, flags);
  fftw_free(scratch);
  cache.emplace(key, plan);
  return plan;
}

void execute(fftw_plan plan, std::span<cplx> data) {
  auto* p = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(plan, p, p);
}

} // namespace

void forward_2d(const Grid2D& grid, std::span<cplx> data) {
  execute(plan_for(grid.ny(), grid.nx(), FFTW_FORWARD), data);
}

void inverse_2d(const Grid2D& grid, std::span<cplx> data) {
  execute(plan_for(grid.ny(), grid.nx(), FFTW_BACKWARD), data);
  kernels::active().scale(data, 1.0 / static_cast<double>(data.size()));
}

void forward_1d(std::span<cplx> data) { execute(plan_for(1, data.size(), FFTW_FORWARD), data); }

void inverse_1d(std::span<cplx> data) {
  execute(plan_for(1, data.size(), FFTW_BACKWARD), data);
  kernels::active().scale(data, 1.0 / static_cast<double>(data.size()));
}

std::vector<double> k_squared(const Grid2D& grid) {
  std::vector<double> out(grid.size());
  for (std::size_t iy = 0; iy < grid.ny(); ++iy) {
    const double ky = grid.ky(iy);
    for (std::size_t ix = 0; ix < grid.nx(); ++ix) {
      const double kx = grid.kx(ix);
      out[grid.index(ix, iy)] = kx * kx + ky * ky;
    }
  }
  return out;
}

} // namespace xpci::fft
