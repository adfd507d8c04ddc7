#pragma once

// Phase-gradient imaging with an angular filter (analyser crystal or grating
// pair). A sample attenuates, deflects and broadens the beam; the detector
// sees the filter's transmission curve evaluated at the deflected angle.

#include "xpci/field.hpp"

#include <cstdint>
#include <vector>

namespace xpci {

/// Sampled transmission T(θ) with monotone piecewise-cubic (PCHIP)
/// interpolation and flat extrapolation outside the sampled range.
class RockingCurve {
public:
  /// theta strictly increasing (at least 2 samples), 0 <= t <= 1.
  RockingCurve(std::vector<double> theta, std::vector<double> t);

  const std::vector<double>& theta() const { return theta_; }
  const std::vector<double>& t() const { return t_; }
  double value(double theta) const;
  /// dT/dθ of the interpolant; 0 outside the sampled range.
  double derivative(double theta) const;
  bool in_range(double theta) const { return theta >= theta_.front() && theta <= theta_.back(); }

private:
  std::size_t segment(double theta) const;

  std::vector<double> theta_, t_, slope_;
};

enum class KernelShape { gaussian, uniform };

/// Angular response of the sample: transmitted fraction a₀, mean deflection
/// Δθ_R and scattering width Δθ_S (standard deviation of the density).
struct AngularKernel {
  double attenuation = 1.0;
  double shift_rad = 0.0;
  double width_rad = 0.0;
  KernelShape shape = KernelShape::gaussian;

  void validate() const;
  /// Normalised density f(s) of the deflection offset s about shift_rad.
  double density(double s) const;
  /// Half-width of the support used for quadrature.
  double support_half_width() const;
};

/// I0·a₀·T(θ0 − Δθ_R). The kernel width must be 0. Warns when θ0 − Δθ_R is
/// outside the sampled curve.
double geometric_forward(double i0, const RockingCurve& curve, double theta0,
                         const AngularKernel& kernel);

/// I0·a₀·∫T(θ0 − Δθ_R − s) f(s) ds by composite Simpson quadrature. A zero
/// width gives geometric_forward exactly.
double scatter_forward(double i0, const RockingCurve& curve, double theta0,
                       const AngularKernel& kernel);

/// Image forms of the geometric model: per-pixel a₀ and Δθ_R maps.
IntensityImage geometric_forward_image(double i0, const RockingCurve& curve, double theta0,
                                       const RealMap& attenuation, const RealMap& shift_rad);

struct DeiEstimate {
  double attenuation;
  double shift_rad;
  bool valid;
};

/// Solves I_m/I0 = a₀[T(θ_m) − T'(θ_m)Δθ_R] for m ∈ {lo, hi}.
DeiEstimate dei_two_point(double i_lo, double i_hi, double i0, const RockingCurve& curve,
                          double theta_lo, double theta_hi);

struct DeiResult {
  RealMap attenuation;
  RealMap shift_rad;
  std::vector<std::uint8_t> valid; ///< 0 where the 2x2 system is singular
};

/// Pixelwise dei_two_point. θ_lo and θ_hi must sit on flanks of opposite slope.
DeiResult dei_two_image(const IntensityImage& i_lo, const IntensityImage& i_hi, double i0,
                        const RockingCurve& curve, double theta_lo, double theta_hi);

/// Uniformly sampled angular profile, θ_i = theta0 + i·step.
struct AngularProfile {
  double theta0_rad;
  double step_rad;
  std::vector<double> values;

  double theta(std::size_t i) const { return theta0_rad + static_cast<double>(i) * step_rad; }
  void validate() const;
};

/// Resamples nothing: throws ValidationError unless the curve is uniformly
/// sampled (relative spacing deviation <= 1e-9).
AngularProfile to_profile(const RockingCurve& curve);

/// a₀·(I0 ⋆ f)(θ − Δθ_R) on the profile's own samples, edges extended flat.
/// Kernels narrower than half a sample are applied as a sub-sample shift.
AngularProfile convolution_forward(const AngularProfile& reference, const AngularKernel& kernel);

struct KernelMoments {
  double attenuation; ///< zeroth moment
  double shift_rad;   ///< first moment / zeroth
  double width_rad;   ///< sqrt of the second central moment
};

struct DeconvolutionResult {
  /// Estimated kernel at lags (i − n/2)·step, zero lag at index n/2.
  AngularProfile kernel;
  KernelMoments moments;
};

/// Negative: use the default 1e-3·max|𝓕[reference]|².
inline constexpr double kDefaultDeconvolutionRegularization = -1.0;

/// S = 𝓕⁻¹{𝓕[ref]*·𝓕[meas] / (|𝓕[ref]|² + ℵ)}, computed on a 2x grid whose
/// padding ramps linearly between the end values. Moments are taken over the
/// returned lags [-n/2, n/2). With ℵ = 0 a vanishing |𝓕[ref]| is a
/// NumericalError.
DeconvolutionResult deconvolution_retrieve(const AngularProfile& measured,
                                           const AngularProfile& reference,
                                           double regularization =
                                               kDefaultDeconvolutionRegularization);

} // namespace xpci
