#pragma once

// Parallel-beam tomography under the projection approximation. The sample
// rotates about the y axis; each slice y = const is a 2D object in the
// (x, z) plane.

#include "xpci/field.hpp"
#include "xpci/retrieval.hpp"
#include "xpci/sample.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace xpci {

enum class Modality { attenuation_log, phase, propagated_intensity };

std::string_view modality_name(Modality m);
/// Throws ValidationError for unknown names.
Modality parse_modality(std::string_view name);

/// Projections indexed [angle][row][column]. Slice mode has ny == 1.
struct Sinogram {
  std::vector<double> angles_rad;
  Modality modality = Modality::attenuation_log;
  std::size_t nx = 0, ny = 1;
  double dx = 0.0, dy = 0.0;
  double wavelength_m = 0.0;
  double distance_m = 0.0; ///< propagation distance (propagated_intensity only)
  std::vector<double> values;

  void validate() const;
  std::size_t angle_count() const { return angles_rad.size(); }
  std::span<const double> row(std::size_t angle, std::size_t iy = 0) const;
  std::span<double> row(std::size_t angle, std::size_t iy = 0);
};

/// n angles equally spaced over [0, π).
std::vector<double> uniform_angles(std::size_t n);

struct PoissonNoise {
  double mean_counts; ///< expected counts for unit intensity
  std::uint64_t seed = 0;
};

struct ForwardOptions {
  std::optional<double> distance_m; ///< required iff modality is propagated_intensity
  std::optional<PoissonNoise> noise;
};

/// Rotates the volume (bilinear resampling in x-z) and projects along z.
/// Requires dx == dz. attenuation_log records ∫μ dz, phase records
/// Δφ = -k∫δ dz, propagated_intensity records |ψ|² after Fresnel propagation
/// of the exit wave of a unit plane wave. Noise acts on intensities only; an
/// attenuation_log sinogram with noise is -ln of the noisy transmission.
Sinogram forward_sinogram(const RefractiveVolume& volume, double wavelength_m,
                          std::span<const double> angles_rad, Modality modality,
                          const ForwardOptions& options = {});

/// -ln(I/I0) of an intensity sinogram, clamping I to floor_fraction·I0.
Sinogram log_sinogram(const Sinogram& intensity, double i0, double floor_fraction = 1e-8);

enum class ReconQuantity { mu, delta };

struct ReconSlice {
  RealMap values; ///< x along columns, z along rows
  ReconQuantity quantity;
};

struct FbpOptions {
  bool hann = false;
  std::size_t row = 0; ///< sinogram row (slice y index) to reconstruct
};

/// Ram-Lak filtered back-projection on an nx × nx grid of pitch dx.
/// attenuation_log data give μ (1/m); phase data give δ.
ReconSlice fbp_reconstruct(const Sinogram& s, const FbpOptions& options = {});

/// Paganin retrieval of every projection followed by FBP of μ·T. The result
/// is μ, or δ when requested (μ·δ/μ scaling of the same reconstruction).
ReconSlice paganin_fbp(const Sinogram& s, const RetrievalConfig& cfg,
                       ReconQuantity quantity = ReconQuantity::mu,
                       const FbpOptions& options = {});

/// (mean_signal - mean_background)/std_background with the sample standard
/// deviation. A zero background deviation gives +inf (or 0 when the means
/// are equal).
double region_snr(const ReconSlice& slice, std::span<const std::size_t> signal,
                  std::span<const std::size_t> background);

/// Pixel indices of the slice grid whose centres lie within radius of
/// (cx, cz); an inner radius > 0 selects an annulus.
std::vector<std::size_t> disc_region(const Grid2D& grid, double cx_m, double cz_m,
                                     double radius_m, double inner_radius_m = 0.0);

/// Cylinder of one material with its axis along y, as a volume of nx × ny × nx
/// voxels of pitch h. Voxels are area-averaged in the x-z plane.
RefractiveVolume cylinder_volume(std::size_t n, std::size_t ny, double h, double radius_m,
                                 double delta, double beta, double cx_m = 0.0,
                                 double cz_m = 0.0);

/// Voxelwise sum of two volumes with identical shape.
RefractiveVolume add_volumes(const RefractiveVolume& a, const RefractiveVolume& b);

} // namespace xpci
