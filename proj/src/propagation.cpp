#include "xpci/propagation.hpp"

#include "xpci/diagnostics.hpp"
#include "xpci/errors.hpp"
#include "xpci/fft.hpp"
#include "xpci/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace xpci {

TransferFunction TransferFunction::free_space(double distance_m) {
  if (!std::isfinite(distance_m)) throw ValidationError("free-space distance must be finite");
  return TransferFunction(FreeSpace{distance_m});
}

TransferFunction TransferFunction::custom(Grid2D grid, std::vector<cplx> samples) {
  if (samples.size() != grid.size())
    throw ValidationError("custom transfer function: sample count does not match its grid");
  return TransferFunction(CustomTransfer{grid, std::move(samples)});
}

TransferFunction TransferFunction::analyser(std::vector<cplx> profile, Axis axis) {
  return TransferFunction(Analyser{std::move(profile), axis});
}

bool TransferFunction::is_identity() const {
  const auto* fs = std::get_if<FreeSpace>(&kind_);
  return fs && fs->distance_m == 0.0;
}

cplx free_space_carrier(double distance_m, double wavelength_m) {
  const double reduced = std::fmod(distance_m, wavelength_m);
  return std::polar(1.0, 2.0 * std::numbers::pi * reduced / wavelength_m);
}

cplx free_space_filter(double kx, double ky, double distance_m, double wavelength_m) {
  const double k = 2.0 * std::numbers::pi / wavelength_m;
  return free_space_carrier(distance_m, wavelength_m) *
         std::polar(1.0, -distance_m * (kx * kx + ky * ky) / (2.0 * k));
}

std::vector<cplx> TransferFunction::sample(const Grid2D& grid, double wavelength_m) const {
  return std::visit(
      [&](const auto& t) -> std::vector<cplx> {
        using T = std::decay_t<decltype(t)>;
        std::vector<cplx> out(grid.size());
        if constexpr (std::is_same_v<T, FreeSpace>) {
          const double k = 2.0 * std::numbers::pi / wavelength_m;
          const cplx carrier = free_space_carrier(t.distance_m, wavelength_m);
          const double scale = -t.distance_m / (2.0 * k);
          for (std::size_t iy = 0; iy < grid.ny(); ++iy) {
            const double ky = grid.ky(iy);
            for (std::size_t ix = 0; ix < grid.nx(); ++ix) {
              const double kx = grid.kx(ix);
              out[grid.index(ix, iy)] = carrier * std::polar(1.0, scale * (kx * kx + ky * ky));
            }
          }
        } else if constexpr (std::is_same_v<T, Analyser>) {
          const std::size_t n = t.axis == Axis::x ? grid.nx() : grid.ny();
          if (t.profile.size() != n)
            throw ValidationError("analyser profile has " + std::to_string(t.profile.size()) +
                                  " samples, grid axis has " + std::to_string(n));
          for (std::size_t iy = 0; iy < grid.ny(); ++iy)
            for (std::size_t ix = 0; ix < grid.nx(); ++ix)
              out[grid.index(ix, iy)] = t.profile[t.axis == Axis::x ? ix : iy];
        } else {
          if (!(t.grid == grid))
            throw ValidationError("custom transfer function was sampled on a different grid");
          out = t.samples;
        }
        return out;
      },
      kind_);
}

namespace {

void warn_if_aliased(const Grid2D& grid, double distance_m, double wavelength_m) {
  const double spread = std::abs(distance_m) * wavelength_m / (2.0 * std::min(grid.dx(), grid.dy()));
  const double half_extent = 0.5 * std::min(grid.extent_x(), grid.extent_y());
  if (spread > half_extent) {
    std::ostringstream msg;
    msg << "propagation over " << distance_m << " m spreads " << spread
        << " m, more than half the grid extent (" << half_extent << " m); expect wrap-around";
    diag::warn("aliasing", msg.str());
  }
}

ComplexField filter_field(const ComplexField& f, const std::vector<cplx>& filter) {
  std::vector<cplx> data = f.values();
  fft::forward_2d(f.grid(), data);
  kernels::active().multiply(data, filter);
  fft::inverse_2d(f.grid(), data);
  return ComplexField(f.grid(), f.wavelength(), std::move(data));
}

} // namespace

ComplexField apply_transfer(const ComplexField& f, const TransferFunction& t) {
  if (t.is_identity()) return f;
  if (const auto* fs = std::get_if<FreeSpace>(&t.kind()))
    warn_if_aliased(f.grid(), fs->distance_m, f.wavelength());
  return filter_field(f, t.sample(f.grid(), f.wavelength()));
}

ComplexField fresnel_propagate(const ComplexField& f, double distance_m, Boundary boundary) {
  const auto t = TransferFunction::free_space(distance_m);
  if (boundary == Boundary::periodic || t.is_identity()) return apply_transfer(f, t);

  const Grid2D& g = f.grid();
  const Grid2D padded(2 * g.nx(), 2 * g.ny(), g.dx(), g.dy());
  const std::size_t ox = g.nx() / 2, oy = g.ny() / 2;
  std::vector<cplx> big(padded.size());
  for (std::size_t iy = 0; iy < g.ny(); ++iy)
    std::copy_n(f.values().begin() + static_cast<long>(g.index(0, iy)), g.nx(),
                big.begin() + static_cast<long>(padded.index(ox, oy + iy)));
  const ComplexField out = apply_transfer(ComplexField(padded, f.wavelength(), std::move(big)), t);
  std::vector<cplx> cropped(g.size());
  for (std::size_t iy = 0; iy < g.ny(); ++iy)
    std::copy_n(out.values().begin() + static_cast<long>(padded.index(ox, oy + iy)), g.nx(),
                cropped.begin() + static_cast<long>(g.index(0, iy)));
  return ComplexField(g, f.wavelength(), std::move(cropped));
}

LinearSystem compose(std::vector<TransferFunction> stages) { return LinearSystem{std::move(stages)}; }

ComplexField apply_system(const ComplexField& f, const LinearSystem& system) {
  ComplexField out = f;
  for (const auto& stage : system.stages) out = apply_transfer(out, stage);
  return out;
}

std::vector<cplx> system_filter(const LinearSystem& system, const Grid2D& grid,
                                double wavelength_m) {
  std::vector<cplx> out(grid.size(), cplx(1.0, 0.0));
  for (const auto& stage : system.stages) {
    const auto s = stage.sample(grid, wavelength_m);
    kernels::active().multiply(out, s);
  }
  return out;
}

TransferFunction analyser_transfer(const Grid2D& grid, std::vector<cplx> profile, Axis axis) {
  const std::size_t n = axis == Axis::x ? grid.nx() : grid.ny();
  if (profile.size() != n)
    throw ValidationError("analyser profile length " + std::to_string(profile.size()) +
                          " does not match grid axis length " + std::to_string(n));
  return TransferFunction::analyser(std::move(profile), axis);
}

std::vector<cplx> sample_axis_profile(const Grid2D& grid, Axis axis,
                                      const std::function<cplx(double)>& a_of_k) {
  const std::size_t n = axis == Axis::x ? grid.nx() : grid.ny();
  std::vector<cplx> out(n);
  for (std::size_t m = 0; m < n; ++m) out[m] = a_of_k(axis == Axis::x ? grid.kx(m) : grid.ky(m));
  return out;
}

} // namespace xpci
