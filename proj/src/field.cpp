#include "xpci/field.hpp"

#include "xpci/errors.hpp"
#include "xpci/kernels.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace xpci {

Grid2D::Grid2D(std::size_t nx, std::size_t ny, double dx, double dy)
    : nx_(nx), ny_(ny), dx_(dx), dy_(dy) {
  if (nx < 2 || ny < 2)
    throw ValidationError("grid needs at least 2x2 pixels, got " + std::to_string(nx) + "x" +
                          std::to_string(ny));
  if (!(dx > 0.0) || !(dy > 0.0) || !std::isfinite(dx) || !std::isfinite(dy))
    throw ValidationError("grid pixel pitch must be positive and finite");
}

long wrapped_index(std::size_t m, std::size_t n) {
  const auto mi = static_cast<long>(m);
  const auto ni = static_cast<long>(n);
  return mi >= (ni + 1) / 2 ? mi - ni : mi;
}

double Grid2D::kx(std::size_t m) const {
  return 2.0 * std::numbers::pi * static_cast<double>(wrapped_index(m, nx_)) / extent_x();
}

double Grid2D::ky(std::size_t m) const {
  return 2.0 * std::numbers::pi * static_cast<double>(wrapped_index(m, ny_)) / extent_y();
}

double Grid2D::x(std::size_t ix) const {
  return (static_cast<double>(ix) - static_cast<double>(nx_ / 2)) * dx_;
}

double Grid2D::y(std::size_t iy) const {
  return (static_cast<double>(iy) - static_cast<double>(ny_ / 2)) * dy_;
}

namespace {

void check_size(const Grid2D& grid, std::size_t n, const char* what) {
  if (n != grid.size())
    throw ValidationError(std::string(what) + ": expected " + std::to_string(grid.size()) +
                          " values, got " + std::to_string(n));
}

} // namespace

ComplexField::ComplexField(Grid2D grid, double wavelength_m, std::vector<cplx> values)
    : grid_(grid), wavelength_(wavelength_m), values_(std::move(values)) {
  if (!(wavelength_m > 0.0) || !std::isfinite(wavelength_m))
    throw ValidationError("wavelength must be positive and finite");
  check_size(grid_, values_.size(), "complex field");
}

ComplexField ComplexField::constant(Grid2D grid, double wavelength_m, cplx value) {
  return ComplexField(grid, wavelength_m, std::vector<cplx>(grid.size(), value));
}

double ComplexField::wavenumber() const { return 2.0 * std::numbers::pi / wavelength_; }

RealMap::RealMap(Grid2D grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  check_size(grid_, values_.size(), "real map");
}

IntensityImage::IntensityImage(Grid2D grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  check_size(grid_, values_.size(), "intensity image");
  for (std::size_t i = 0; i < values_.size(); ++i)
    if (!(values_[i] >= 0.0) || !std::isfinite(values_[i]))
      throw ValidationError("intensity must be finite and non-negative (pixel " +
                            std::to_string(i) + ")");
}

PhaseMap::PhaseMap(Grid2D grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  check_size(grid_, values_.size(), "phase map");
  for (double v : values_)
    if (!std::isfinite(v)) throw ValidationError("phase values must be finite");
}

IntensityImage extract_intensity(const ComplexField& f) {
  std::vector<double> out(f.values().size());
  kernels::active().norm_sq(f.values(), out);
  return IntensityImage(f.grid(), std::move(out));
}

PhaseExtraction extract_phase(const ComplexField& f) {
  const auto& v = f.values();
  std::vector<double> phase(v.size());
  std::vector<std::uint8_t> valid(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i] == cplx(0.0, 0.0)) {
      phase[i] = 0.0;
      valid[i] = 0;
    } else {
      phase[i] = std::arg(v[i]);
      valid[i] = 1;
    }
  }
  return PhaseExtraction{PhaseMap(f.grid(), std::move(phase)), std::move(valid)};
}

ComplexField compose_field(const IntensityImage& intensity, const PhaseMap& phase,
                           double wavelength_m) {
  if (!(intensity.grid() == phase.grid()))
    throw ValidationError("compose_field: intensity and phase grids differ");
  std::vector<cplx> out(intensity.values().size());
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = std::polar(std::sqrt(intensity.values()[i]), phase.values()[i]);
  return ComplexField(intensity.grid(), wavelength_m, std::move(out));
}

double total_power(const IntensityImage& intensity) {
  double sum = 0.0;
  for (double v : intensity.values()) sum += v;
  return sum * intensity.grid().dx() * intensity.grid().dy();
}

} // namespace xpci
