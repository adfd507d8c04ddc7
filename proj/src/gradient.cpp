#include "xpci/gradient.hpp"

#include "xpci/diagnostics.hpp"
#include "xpci/errors.hpp"
#include "xpci/fft.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace xpci {

namespace {

// Fritsch-Carlson end slope (three-point, shape preserving).
double edge_slope(double h0, double h1, double d0, double d1) {
  double s = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
  if (s * d0 <= 0.0) return 0.0;
  if (d0 * d1 <= 0.0 && std::abs(s) > std::abs(3.0 * d0)) return 3.0 * d0;
  return s;
}

} // namespace

RockingCurve::RockingCurve(std::vector<double> theta, std::vector<double> t)
    : theta_(std::move(theta)), t_(std::move(t)) {
  const std::size_t n = theta_.size();
  if (n < 2 || t_.size() != n)
    throw ValidationError("rocking curve needs >= 2 (theta, T) samples of equal count");
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(theta_[i])) throw ValidationError("rocking curve angle is not finite");
    if (!(t_[i] >= 0.0 && t_[i] <= 1.0))
      throw ValidationError("rocking curve transmission must lie in [0, 1]");
    if (i > 0 && !(theta_[i] > theta_[i - 1]))
      throw ValidationError("rocking curve angles must be strictly increasing");
  }
  std::vector<double> h(n - 1), d(n - 1);
  for (std::size_t k = 0; k + 1 < n; ++k) {
    h[k] = theta_[k + 1] - theta_[k];
    d[k] = (t_[k + 1] - t_[k]) / h[k];
  }
  slope_.assign(n, 0.0);
  if (n == 2) {
    slope_[0] = slope_[1] = d[0];
    return;
  }
  for (std::size_t k = 1; k + 1 < n; ++k) {
    if (d[k - 1] * d[k] <= 0.0) continue;
    const double w1 = 2.0 * h[k] + h[k - 1];
    const double w2 = h[k] + 2.0 * h[k - 1];
    slope_[k] = (w1 + w2) / (w1 / d[k - 1] + w2 / d[k]);
  }
  slope_[0] = edge_slope(h[0], h[1], d[0], d[1]);
  slope_[n - 1] = edge_slope(h[n - 2], h[n - 3], d[n - 2], d[n - 3]);
}

std::size_t RockingCurve::segment(double theta) const {
  auto it = std::upper_bound(theta_.begin(), theta_.end(), theta);
  std::size_t k = static_cast<std::size_t>(it - theta_.begin());
  return std::clamp<std::size_t>(k, 1, theta_.size() - 1) - 1;
}

double RockingCurve::value(double theta) const {
  if (theta <= theta_.front()) return t_.front();
  if (theta >= theta_.back()) return t_.back();
  const std::size_t k = segment(theta);
  const double h = theta_[k + 1] - theta_[k];
  const double s = (theta - theta_[k]) / h;
  const double s2 = s * s, s3 = s2 * s;
  return (2.0 * s3 - 3.0 * s2 + 1.0) * t_[k] + (s3 - 2.0 * s2 + s) * h * slope_[k] +
         (-2.0 * s3 + 3.0 * s2) * t_[k + 1] + (s3 - s2) * h * slope_[k + 1];
}

double RockingCurve::derivative(double theta) const {
  if (theta < theta_.front() || theta > theta_.back()) return 0.0;
  const std::size_t k = segment(theta);
  const double h = theta_[k + 1] - theta_[k];
  const double s = (theta - theta_[k]) / h;
  return (6.0 * s * s - 6.0 * s) / h * (t_[k] - t_[k + 1]) +
         (3.0 * s * s - 4.0 * s + 1.0) * slope_[k] + (3.0 * s * s - 2.0 * s) * slope_[k + 1];
}

void AngularKernel::validate() const {
  if (!(attenuation >= 0.0 && attenuation <= 1.0))
    throw ValidationError("kernel attenuation a0 must lie in [0, 1]");
  if (!std::isfinite(shift_rad)) throw ValidationError("kernel shift must be finite");
  if (!(width_rad >= 0.0) || !std::isfinite(width_rad))
    throw ValidationError("kernel width must be >= 0");
}

double AngularKernel::density(double s) const {
  if (width_rad == 0.0) return s == 0.0 ? 1.0 : 0.0;
  if (shape == KernelShape::gaussian) {
    const double u = s / width_rad;
    return std::exp(-0.5 * u * u) / (width_rad * std::sqrt(2.0 * std::numbers::pi));
  }
  const double half = std::sqrt(3.0) * width_rad;
  return std::abs(s) <= half ? 0.5 / half : 0.0;
}

double AngularKernel::support_half_width() const {
  return shape == KernelShape::gaussian ? 6.0 * width_rad : std::sqrt(3.0) * width_rad;
}

namespace {

void warn_if_outside(const RockingCurve& curve, double theta) {
  if (!curve.in_range(theta))
    diag::warn("extrapolation", "angle " + std::to_string(theta) +
                                    " rad is outside the sampled rocking curve; T held flat");
}

double min_spacing(const RockingCurve& curve) {
  double m = curve.theta()[1] - curve.theta()[0];
  for (std::size_t i = 2; i < curve.theta().size(); ++i)
    m = std::min(m, curve.theta()[i] - curve.theta()[i - 1]);
  return m;
}

} // namespace

double geometric_forward(double i0, const RockingCurve& curve, double theta0,
                         const AngularKernel& kernel) {
  kernel.validate();
  if (kernel.width_rad != 0.0)
    throw ValidationError("geometric_forward needs a zero-width kernel; use scatter_forward");
  const double theta = theta0 - kernel.shift_rad;
  warn_if_outside(curve, theta);
  return i0 * kernel.attenuation * curve.value(theta);
}

double scatter_forward(double i0, const RockingCurve& curve, double theta0,
                       const AngularKernel& kernel) {
  kernel.validate();
  if (kernel.width_rad == 0.0) return geometric_forward(i0, curve, theta0, kernel);
  const double centre = theta0 - kernel.shift_rad;
  warn_if_outside(curve, centre);
  const double half = kernel.support_half_width();
  const double target = std::min(min_spacing(curve), kernel.width_rad) / 16.0;
  std::size_t n = static_cast<std::size_t>(std::ceil(2.0 * half / target));
  n = std::clamp<std::size_t>(n + (n % 2), 64, std::size_t{1} << 18);
  const double h = 2.0 * half / static_cast<double>(n);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i <= n; ++i) {
    const double s = -half + static_cast<double>(i) * h;
    const double simpson = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    const double w = simpson * kernel.density(s);
    num += w * curve.value(centre - s);
    den += w;
  }
  return i0 * kernel.attenuation * num / den;
}

IntensityImage geometric_forward_image(double i0, const RockingCurve& curve, double theta0,
                                       const RealMap& attenuation, const RealMap& shift_rad) {
  if (!(attenuation.grid() == shift_rad.grid()))
    throw ValidationError("attenuation and shift maps must share one grid");
  std::size_t outside = 0;
  std::vector<double> out(attenuation.values().size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double a0 = attenuation.values()[i];
    if (!(a0 >= 0.0 && a0 <= 1.0)) throw ValidationError("attenuation map values must lie in [0, 1]");
    const double theta = theta0 - shift_rad.values()[i];
    if (!curve.in_range(theta)) ++outside;
    out[i] = i0 * a0 * curve.value(theta);
  }
  if (outside > 0)
    diag::warn("extrapolation", std::to_string(outside) +
                                    " pixels fall outside the sampled rocking curve");
  return IntensityImage(attenuation.grid(), std::move(out));
}

DeiEstimate dei_two_point(double i_lo, double i_hi, double i0, const RockingCurve& curve,
                          double theta_lo, double theta_hi) {
  const double t_lo = curve.value(theta_lo), t_hi = curve.value(theta_hi);
  const double s_lo = curve.derivative(theta_lo), s_hi = curve.derivative(theta_hi);
  const double r_lo = i_lo / i0, r_hi = i_hi / i0;
  // [T_lo  -T'_lo] [a0     ]   [r_lo]
  // [T_hi  -T'_hi] [a0·Δθ_R] = [r_hi]
  const double det = -t_lo * s_hi + s_lo * t_hi;
  const double scale = std::abs(t_lo * s_hi) + std::abs(s_lo * t_hi);
  if (!(std::abs(det) > 1e-12 * scale)) return {0.0, 0.0, false};
  const double a0 = (-r_lo * s_hi + s_lo * r_hi) / det;
  const double v = (t_lo * r_hi - t_hi * r_lo) / det;
  if (!(a0 > 0.0) || !std::isfinite(v)) return {0.0, 0.0, false};
  return {a0, v / a0, true};
}

DeiResult dei_two_image(const IntensityImage& i_lo, const IntensityImage& i_hi, double i0,
                        const RockingCurve& curve, double theta_lo, double theta_hi) {
  if (!(i_lo.grid() == i_hi.grid())) throw ValidationError("DEI images must share one grid");
  if (!(i0 > 0.0)) throw ValidationError("flat-field intensity I0 must be > 0");
  const double s_lo = curve.derivative(theta_lo), s_hi = curve.derivative(theta_hi);
  if (s_lo == 0.0 || s_hi == 0.0 || (s_lo > 0.0) == (s_hi > 0.0))
    throw ValidationError("DEI working points must sit on rocking-curve flanks of opposite slope");
  const Grid2D& g = i_lo.grid();
  DeiResult r{RealMap::zeros(g), RealMap::zeros(g), std::vector<std::uint8_t>(g.size(), 0)};
  for (std::size_t i = 0; i < g.size(); ++i) {
    const DeiEstimate e =
        dei_two_point(i_lo.values()[i], i_hi.values()[i], i0, curve, theta_lo, theta_hi);
    r.attenuation.mutable_values()[i] = e.attenuation;
    r.shift_rad.mutable_values()[i] = e.shift_rad;
    r.valid[i] = e.valid ? 1 : 0;
  }
  return r;
}

void AngularProfile::validate() const {
  if (!(step_rad > 0.0) || !std::isfinite(theta0_rad))
    throw ValidationError("angular profile needs a positive step and finite origin");
  if (values.size() < 2) throw ValidationError("angular profile needs >= 2 samples");
  for (double v : values)
    if (!std::isfinite(v)) throw ValidationError("angular profile values must be finite");
}

AngularProfile to_profile(const RockingCurve& curve) {
  const auto& th = curve.theta();
  const double step = (th.back() - th.front()) / static_cast<double>(th.size() - 1);
  for (std::size_t i = 1; i < th.size(); ++i)
    if (std::abs((th[i] - th[i - 1]) - step) > 1e-9 * step)
      throw ValidationError("rocking curve is not uniformly sampled");
  return {th.front(), step, curve.t()};
}

AngularProfile convolution_forward(const AngularProfile& reference, const AngularKernel& kernel) {
  reference.validate();
  kernel.validate();
  const double h = reference.step_rad;
  std::vector<long> lags;
  std::vector<double> weights;
  if (kernel.width_rad >= 0.5 * h) {
    const long reach =
        static_cast<long>(std::ceil((std::abs(kernel.shift_rad) + kernel.support_half_width()) / h)) + 1;
    double sum = 0.0;
    for (long m = -reach; m <= reach; ++m) {
      const double w = kernel.density(static_cast<double>(m) * h - kernel.shift_rad);
      if (w == 0.0) continue;
      lags.push_back(m);
      weights.push_back(w);
      sum += w;
    }
    if (sum == 0.0) throw ValidationError("kernel has no mass on the sample lattice");
    for (double& w : weights) w /= sum;
  } else {
    const double q = kernel.shift_rad / h;
    const double base = std::floor(q);
    const double frac = q - base;
    lags = {static_cast<long>(base), static_cast<long>(base) + 1};
    weights = {1.0 - frac, frac};
  }
  const long n = static_cast<long>(reference.values.size());
  AngularProfile out{reference.theta0_rad, h, std::vector<double>(reference.values.size())};
  for (long i = 0; i < n; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < lags.size(); ++j)
      acc += weights[j] * reference.values[static_cast<std::size_t>(std::clamp(i - lags[j], 0L, n - 1))];
    out.values[static_cast<std::size_t>(i)] = kernel.attenuation * acc;
  }
  return out;
}

namespace {

std::vector<cplx> padded_spectrum(const AngularProfile& p) {
  const std::size_t n = p.values.size();
  std::vector<cplx> buf(2 * n);
  for (std::size_t i = 0; i < n; ++i) buf[i] = p.values[i];
  const double a = p.values.back(), b = p.values.front();
  for (std::size_t i = 0; i < n; ++i) {
    const double s = static_cast<double>(i + 1) / static_cast<double>(n + 1);
    buf[n + i] = a + (b - a) * s;
  }
  fft::forward_1d(buf);
  return buf;
}

} // namespace

DeconvolutionResult deconvolution_retrieve(const AngularProfile& measured,
                                           const AngularProfile& reference,
                                           double regularization) {
  measured.validate();
  reference.validate();
  const std::size_t n = reference.values.size();
  if (n < 8) throw ValidationError("deconvolution needs >= 8 angular samples");
  if (measured.values.size() != n ||
      std::abs(measured.step_rad - reference.step_rad) > 1e-9 * reference.step_rad ||
      std::abs(measured.theta0_rad - reference.theta0_rad) > 1e-9 * reference.step_rad)
    throw ValidationError("measured and reference curves must share one angular sampling");
  if (std::all_of(reference.values.begin(), reference.values.end(),
                  [](double v) { return v == 0.0; }))
    throw ValidationError("reference curve is identically zero");

  const std::vector<cplx> r = padded_spectrum(reference);
  std::vector<cplx> m = padded_spectrum(measured);
  double peak = 0.0;
  for (const cplx& z : r) peak = std::max(peak, std::norm(z));
  const double reg = regularization < 0.0 ? 1e-3 * peak : regularization;
  for (std::size_t j = 0; j < m.size(); ++j) {
    const double den = std::norm(r[j]) + reg;
    if (!(den > 0.0))
      throw NumericalError("reference spectrum vanishes at sample " + std::to_string(j) +
                           " and no regularisation was given");
    m[j] = std::conj(r[j]) * m[j] / den;
  }
  fft::inverse_1d(m);

  const std::size_t big = m.size();
  const double h = reference.step_rad;
  AngularProfile k{-static_cast<double>(n / 2) * h, h, std::vector<double>(n)};
  double m0 = 0.0, m1 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const long lag = static_cast<long>(i) - static_cast<long>(n / 2);
    const std::size_t src = static_cast<std::size_t>((lag + static_cast<long>(big)) % static_cast<long>(big));
    k.values[i] = m[src].real();
    m0 += k.values[i];
    m1 += k.values[i] * static_cast<double>(lag) * h;
  }
  if (m0 == 0.0) throw NumericalError("retrieved kernel has zero total weight");
  const double mean = m1 / m0;
  double m2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = k.theta(i) - mean;
    m2 += k.values[i] * d * d;
  }
  return {std::move(k), {m0, mean, std::sqrt(std::max(0.0, m2 / m0))}};
}

} // namespace xpci
