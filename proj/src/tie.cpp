#include "xpci/tie.hpp"

#include "xpci/diagnostics.hpp"
#include "xpci/errors.hpp"
#include "xpci/fft.hpp"
#include "xpci/kernels.hpp"

#include <cmath>
#include <string>

namespace xpci {
namespace {

struct Derivatives {
  std::vector<double> dx, dy, laplacian;
};

// First-derivative multipliers i·k with the unpaired Nyquist sample zeroed, so
// the Laplacian is exactly the square of the gradient operator and the
// discrete divergence theorem holds to rounding.
std::vector<double> first_derivative_k(const Grid2D& g, bool x_axis) {
  const std::size_t n = x_axis ? g.nx() : g.ny();
  std::vector<double> k(n);
  for (std::size_t m = 0; m < n; ++m) {
    const bool nyquist = n % 2 == 0 && m == n / 2;
    k[m] = nyquist ? 0.0 : (x_axis ? g.kx(m) : g.ky(m));
  }
  return k;
}

Derivatives spectral_derivatives(const Grid2D& g, const std::vector<double>& f, bool laplacian) {
  const auto kx = first_derivative_k(g, true);
  const auto ky = first_derivative_k(g, false);
  std::vector<cplx> spec(f.begin(), f.end());
  fft::forward_2d(g, spec);

  const auto apply = [&](auto&& multiplier) {
    std::vector<cplx> s = spec;
    for (std::size_t iy = 0; iy < g.ny(); ++iy)
      for (std::size_t ix = 0; ix < g.nx(); ++ix) s[g.index(ix, iy)] *= multiplier(ix, iy);
    fft::inverse_2d(g, s);
    std::vector<double> out(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) out[i] = s[i].real();
    return out;
  };

  Derivatives d;
  d.dx = apply([&](std::size_t ix, std::size_t) { return cplx(0.0, kx[ix]); });
  d.dy = apply([&](std::size_t, std::size_t iy) { return cplx(0.0, ky[iy]); });
  if (laplacian)
    d.laplacian = apply([&](std::size_t ix, std::size_t iy) {
      return cplx(-(kx[ix] * kx[ix] + ky[iy] * ky[iy]), 0.0);
    });
  return d;
}

Derivatives difference_derivatives(const Grid2D& g, const std::vector<double>& f, bool laplacian) {
  const std::size_t nx = g.nx(), ny = g.ny();
  Derivatives d;
  d.dx.resize(f.size());
  d.dy.resize(f.size());
  if (laplacian) d.laplacian.resize(f.size());
  for (std::size_t iy = 0; iy < ny; ++iy) {
    const std::size_t yp = (iy + 1) % ny, ym = (iy + ny - 1) % ny;
    for (std::size_t ix = 0; ix < nx; ++ix) {
      const std::size_t xp = (ix + 1) % nx, xm = (ix + nx - 1) % nx;
      const double c = f[g.index(ix, iy)];
      const double e = f[g.index(xp, iy)], w = f[g.index(xm, iy)];
      const double n = f[g.index(ix, yp)], s = f[g.index(ix, ym)];
      const std::size_t i = g.index(ix, iy);
      d.dx[i] = (e - w) / (2.0 * g.dx());
      d.dy[i] = (n - s) / (2.0 * g.dy());
      if (laplacian)
        d.laplacian[i] = (e - 2.0 * c + w) / (g.dx() * g.dx()) + (n - 2.0 * c + s) / (g.dy() * g.dy());
    }
  }
  return d;
}

} // namespace

TieTerms tie_terms(const IntensityImage& intensity, const PhaseMap& phase, double k,
                   Derivative mode) {
  if (!(intensity.grid() == phase.grid()))
    throw ValidationError("tie_terms: intensity and phase grids differ");
  if (!(k > 0.0)) throw ValidationError("tie_terms: wavenumber must be positive");
  const Grid2D& g = intensity.grid();
  const auto& I = intensity.values();
  const auto derive = mode == Derivative::spectral ? spectral_derivatives : difference_derivatives;
  const Derivatives dI = derive(g, I, false);
  const Derivatives dphi = derive(g, phase.values(), true);

  std::vector<double> grad(g.size()), lap(g.size()), didz(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    grad[i] = dI.dx[i] * dphi.dx[i] + dI.dy[i] * dphi.dy[i];
    lap[i] = I[i] * dphi.laplacian[i];
    didz[i] = -(grad[i] + lap[i]) / k;
  }
  return TieTerms{RealMap(g, std::move(grad)), RealMap(g, std::move(lap)),
                  RealMap(g, std::move(didz))};
}

TieForwardResult tie_forward(const IntensityImage& intensity, const PhaseMap& phase, double k,
                             double dz, Derivative mode) {
  if (dz == 0.0) return TieForwardResult{intensity, 0};
  const TieTerms terms = tie_terms(intensity, phase, k, mode);
  std::vector<double> out(intensity.values().size());
  std::size_t clamped = 0;
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = intensity.values()[i] + dz * terms.didz.values()[i];
    if (out[i] < 0.0) {
      out[i] = 0.0;
      ++clamped;
    }
  }
  if (clamped > 0)
    diag::warn("tie-clamped", std::to_string(clamped) +
                                  " pixels predicted negative intensity and were set to 0");
  return TieForwardResult{IntensityImage(intensity.grid(), std::move(out)), clamped};
}

} // namespace xpci
