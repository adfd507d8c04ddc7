#pragma once

// Samples as complex refractive index distributions n = 1 - δ + iβ, the
// projection approximation, and the multi-slice method for thick samples.

#include "xpci/field.hpp"

#include <optional>
#include <vector>

namespace xpci {

/// Homogeneous material, δ and β quoted at one wavelength.
struct Material {
  double delta;
  double beta;
  double wavelength_m;

  /// Throws ValidationError when beta < 0 or wavelength <= 0.
  void validate() const;
  double wavenumber() const;
  /// Linear attenuation coefficient μ = 2kβ.
  double mu() const;
};

/// Voxelised (δ, β). Index (ix, iy, iz) lives at (iz*ny + iy)*nx + ix; z is
/// the optic axis, slice iz is centred at z = (iz + 1/2)·dz.
class RefractiveVolume {
public:
  RefractiveVolume(std::size_t nx, std::size_t ny, std::size_t nz, double dx, double dy, double dz,
                   std::vector<double> delta, std::vector<double> beta);
  static RefractiveVolume empty(std::size_t nx, std::size_t ny, std::size_t nz, double dx,
                                double dy, double dz);

  std::size_t nx() const { return nx_; }
  std::size_t ny() const { return ny_; }
  std::size_t nz() const { return nz_; }
  double dx() const { return dx_; }
  double dy() const { return dy_; }
  double dz() const { return dz_; }
  double thickness() const { return static_cast<double>(nz_) * dz_; }
  std::size_t index(std::size_t ix, std::size_t iy, std::size_t iz) const {
    return (iz * ny_ + iy) * nx_ + ix;
  }
  /// Transverse grid of one slice (requires nx, ny >= 2).
  Grid2D transverse_grid() const { return Grid2D(nx_, ny_, dx_, dy_); }

  const std::vector<double>& delta() const { return delta_; }
  const std::vector<double>& beta() const { return beta_; }

private:
  std::size_t nx_, ny_, nz_;
  double dx_, dy_, dz_;
  std::vector<double> delta_, beta_;
};

/// Line integrals through the sample along z.
struct ProjectedObject {
  Grid2D grid;
  double wavelength_m;
  RealMap phase_shift;           ///< Δφ = -k ∫δ dz (rad)
  RealMap attenuation;           ///< ∫μ dz (dimensionless, >= 0)
  std::optional<RealMap> thickness; ///< projected thickness (m), single material only
};

/// Complex transmission 𝒯(x, y) at one wavelength.
struct TransmissionMap {
  Grid2D grid;
  double wavelength_m;
  std::vector<cplx> values;
};

double mu_from_beta(double beta, double wavenumber);

ProjectedObject project(const RefractiveVolume& volume, double wavelength_m);
/// Single-material projection of a thickness map.
ProjectedObject project_thickness(const RealMap& thickness, const Material& material);
TransmissionMap transmission_function(const ProjectedObject& p);
/// Exit field 𝒯·ψ. Throws ValidationError on grid or wavelength mismatch.
ComplexField apply_sample(const ComplexField& f, const TransmissionMap& t);

enum class Validity { valid, marginal, invalid };

struct FresnelNumber {
  double value;
  Validity verdict;
};

inline constexpr double kFresnelValidThreshold = 10.0;
inline constexpr double kFresnelMarginalThreshold = 1.0;

/// N_F = M·a²/(λ·L); valid when N_F >= 10, marginal in [1, 10), invalid below.
FresnelNumber fresnel_number(double feature_m, double length_m, double wavelength_m,
                             double magnification = 1.0);
/// Δθ = λ/a.
double diffraction_spread(double feature_m, double wavelength_m);

/// Alternates slice transmission and free-space propagation over every slice.
ComplexField multislice(const ComplexField& f, const RefractiveVolume& volume);

/// Solid sphere of one material centred on the grid's centre pixel plus an
/// optional offset. Rim pixels are area-averaged.
ProjectedObject sphere_phantom(const Grid2D& grid, double diameter_m, const Material& material,
                               double centre_x_m = 0.0, double centre_y_m = 0.0);
/// Projected thickness of a sphere, area-averaged over rim pixels.
RealMap sphere_thickness(const Grid2D& grid, double diameter_m, double centre_x_m = 0.0,
                         double centre_y_m = 0.0);

/// Voxelised solid sphere centred on the transverse centre pixel and the
/// middle of the z range. Boundary voxels hold their volume fraction.
RefractiveVolume sphere_volume(std::size_t nx, std::size_t ny, std::size_t nz, double dx,
                               double dz, double diameter_m, double delta, double beta);

struct EffectiveGeometry {
  double magnification; ///< M = (R1 + R2)/R1
  double distance_m;    ///< parallel-beam equivalent distance R2/M
};

EffectiveGeometry effective_geometry(double r1_m, double r2_m);

} // namespace xpci
