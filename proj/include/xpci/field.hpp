#pragma once

// Sampled scalar fields on a regular transverse grid.
//
// Storage is row-major with x fastest: value (ix, iy) lives at iy*nx + ix.
// All lengths are metres and all phases radians.

#include <complex>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace xpci {

using cplx = std::complex<double>;

class Grid2D {
public:
  /// Throws ValidationError unless nx, ny >= 2 and dx, dy > 0.
  Grid2D(std::size_t nx, std::size_t ny, double dx, double dy);

  std::size_t nx() const { return nx_; }
  std::size_t ny() const { return ny_; }
  double dx() const { return dx_; }
  double dy() const { return dy_; }
  std::size_t size() const { return nx_ * ny_; }
  double extent_x() const { return static_cast<double>(nx_) * dx_; }
  double extent_y() const { return static_cast<double>(ny_) * dy_; }
  std::size_t index(std::size_t ix, std::size_t iy) const { return iy * nx_ + ix; }

  /// Angular spatial frequency (rad/m) of Fourier index m along x / y.
  double kx(std::size_t m) const;
  double ky(std::size_t m) const;

  /// Physical coordinate of pixel centres, origin at the grid centre pixel
  /// (index n/2).
  double x(std::size_t ix) const;
  double y(std::size_t iy) const;

  bool operator==(const Grid2D&) const = default;

private:
  std::size_t nx_, ny_;
  double dx_, dy_;
};

/// Signed Fourier index in [-n/2, n/2) for storage index m in [0, n).
long wrapped_index(std::size_t m, std::size_t n);

/// Complex amplitude ψ at one angular frequency, identified by wavelength.
class ComplexField {
public:
  ComplexField(Grid2D grid, double wavelength_m, std::vector<cplx> values);
  /// Uniform field of the given amplitude.
  static ComplexField constant(Grid2D grid, double wavelength_m, cplx value = 1.0);

  const Grid2D& grid() const { return grid_; }
  double wavelength() const { return wavelength_; }
  double wavenumber() const;
  const std::vector<cplx>& values() const { return values_; }
  std::vector<cplx>& mutable_values() { return values_; }
  cplx at(std::size_t ix, std::size_t iy) const { return values_[grid_.index(ix, iy)]; }

private:
  Grid2D grid_;
  double wavelength_;
  std::vector<cplx> values_;
};

/// Real-valued map without sign constraints (thickness, phase shift, TIE terms).
class RealMap {
public:
  RealMap(Grid2D grid, std::vector<double> values);
  static RealMap zeros(Grid2D grid) { return RealMap(grid, std::vector<double>(grid.size())); }

  const Grid2D& grid() const { return grid_; }
  const std::vector<double>& values() const { return values_; }
  std::vector<double>& mutable_values() { return values_; }
  double at(std::size_t ix, std::size_t iy) const { return values_[grid_.index(ix, iy)]; }

private:
  Grid2D grid_;
  std::vector<double> values_;
};

/// Detected intensity; every value is finite and >= 0.
class IntensityImage {
public:
  IntensityImage(Grid2D grid, std::vector<double> values);

  const Grid2D& grid() const { return grid_; }
  const std::vector<double>& values() const { return values_; }
  double at(std::size_t ix, std::size_t iy) const { return values_[grid_.index(ix, iy)]; }

private:
  Grid2D grid_;
  std::vector<double> values_;
};

/// Phase in radians; every value is finite.
class PhaseMap {
public:
  PhaseMap(Grid2D grid, std::vector<double> values);

  const Grid2D& grid() const { return grid_; }
  const std::vector<double>& values() const { return values_; }
  double at(std::size_t ix, std::size_t iy) const { return values_[grid_.index(ix, iy)]; }

private:
  Grid2D grid_;
  std::vector<double> values_;
};

struct PhaseExtraction {
  PhaseMap phase;
  /// 1 where |ψ| > 0, 0 where the phase was defined as 0 by convention.
  std::vector<std::uint8_t> valid;
};

IntensityImage extract_intensity(const ComplexField& f);
PhaseExtraction extract_phase(const ComplexField& f);
/// ψ = √I·exp(iφ). Throws ValidationError on grid mismatch.
ComplexField compose_field(const IntensityImage& intensity, const PhaseMap& phase,
                           double wavelength_m);
/// Σ I·dx·dy.
double total_power(const IntensityImage& intensity);

} // namespace xpci
