#pragma once

// Partially coherent illumination in the space-frequency picture: a weighted
// ensemble of strictly monochromatic fields per angular frequency.

#include "xpci/field.hpp"
#include "xpci/propagation.hpp"
#include "xpci/sample.hpp"

#include <cstdint>
#include <variant>
#include <vector>

namespace xpci {

inline constexpr double kSpeedOfLight = 299792458.0;

/// Members share one grid and one wavelength; weights are >= 0 and sum to 1.
class ModeEnsemble {
public:
  ModeEnsemble(std::vector<ComplexField> members, std::vector<double> weights);

  const Grid2D& grid() const { return members_.front().grid(); }
  double wavelength() const { return members_.front().wavelength(); }
  double angular_frequency() const;
  std::size_t size() const { return members_.size(); }
  const std::vector<ComplexField>& members() const { return members_; }
  const std::vector<double>& weights() const { return weights_; }

private:
  std::vector<ComplexField> members_;
  std::vector<double> weights_;
};

/// Ensembles at increasing angular frequency with the detector efficiency ℵ(ω)
/// of each bin.
class PolyState {
public:
  PolyState(std::vector<ModeEnsemble> ensembles, std::vector<double> detector_efficiency);

  const std::vector<ModeEnsemble>& ensembles() const { return ensembles_; }
  const std::vector<double>& detector_efficiency() const { return efficiency_; }

private:
  std::vector<ModeEnsemble> ensembles_;
  std::vector<double> efficiency_;
};

/// Plane waves with directions uniformly distributed over a narrow cone.
struct TiltedPlaneWaves {
  double cone_half_angle_rad = 0.0;
  std::size_t count = 1;
  std::uint64_t seed = 0;
  /// Round each tilt to the grid's Fourier lattice so every member is periodic.
  bool snap_to_grid = true;
};

/// z-directed plane waves carrying a Gaussian-correlated random phase.
struct RandomPhaseScreen {
  double correlation_length_m = 0.0; ///< 1/e length of the phase autocorrelation
  double rms_phase_rad = 0.0;
  std::size_t count = 1;
  std::uint64_t seed = 0;
};

using SourceModel = std::variant<TiltedPlaneWaves, RandomPhaseScreen>;

/// Uniform weights 1/N. amplitude_scale multiplies every member, which is how
/// a source spectrum enters a multi-bin PolyState.
ModeEnsemble make_ensemble(const SourceModel& source, const Grid2D& grid, double wavelength_m,
                           double amplitude_scale = 1.0);

using PipelineStage = std::variant<TransmissionMap, TransferFunction>;

/// Stages act in list order on each member.
struct Pipeline {
  std::vector<PipelineStage> stages;
};

ComplexField apply_pipeline(const ComplexField& f, const Pipeline& pipeline);
/// Every member goes through the same pipeline; weights are unchanged.
ModeEnsemble propagate_ensemble(const ModeEnsemble& e, const Pipeline& pipeline);

/// S = Σ c_j |ψ_j|².
IntensityImage spectral_density(const ModeEnsemble& e);

/// Monte-Carlo standard error of S per pixel: sqrt(N/(N-1)·Σ c_j²(|ψ_j|² - S)²),
/// which is the usual s/√N for uniform weights. Zero for a single member.
IntensityImage spectral_density_standard_error(const ModeEnsemble& e);

struct Pixel {
  std::size_t ix;
  std::size_t iy;
};

/// W(P1, P2) = Σ c_j ψ_j*(P1) ψ_j(P2).
cplx cross_spectral_density(const ModeEnsemble& e, Pixel p1, Pixel p2);

/// ∫ S_ω ℵ(ω) dω by the trapezoidal rule over the bins; a single bin is
/// weighted by its efficiency alone.
IntensityImage detected_intensity(const PolyState& state);

enum class SourceShape { disc, gaussian };

/// Blur width D·R2/R1 in the units of the image grid (detector plane).
/// For the Gaussian shape the width is the full width at half maximum.
double penumbral_width(double source_diameter_m, double r1_m, double r2_m);

/// Convolves the image with a unit-sum source-shaped kernel of width
/// penumbral_width(D, R1, R2).
IntensityImage penumbral_blur(const IntensityImage& image, double source_diameter_m, double r1_m,
                              double r2_m, SourceShape shape = SourceShape::disc);

} // namespace xpci
