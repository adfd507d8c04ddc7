#include "xpci/coherence.hpp"

#include "xpci/errors.hpp"
#include "xpci/fft.hpp"
#include "xpci/kernels.hpp"
#include "xpci/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace xpci {

ModeEnsemble::ModeEnsemble(std::vector<ComplexField> members, std::vector<double> weights)
    : members_(std::move(members)), weights_(std::move(weights)) {
  if (members_.empty()) throw ValidationError("mode ensemble needs at least one member");
  if (members_.size() != weights_.size())
    throw ValidationError("mode ensemble: member and weight counts differ");
  double sum = 0.0;
  for (double c : weights_) {
    if (!(c >= 0.0 && c <= 1.0)) throw ValidationError("mode weights must lie in [0, 1]");
    sum += c;
  }
  if (std::abs(sum - 1.0) > 1e-12) throw ValidationError("mode weights must sum to 1");
  for (const auto& m : members_)
    if (!(m.grid() == grid()) || m.wavelength() != wavelength())
      throw ValidationError("mode ensemble members must share one grid and one wavelength");
}

double ModeEnsemble::angular_frequency() const {
  return 2.0 * std::numbers::pi * kSpeedOfLight / wavelength();
}

PolyState::PolyState(std::vector<ModeEnsemble> ensembles, std::vector<double> efficiency)
    : ensembles_(std::move(ensembles)), efficiency_(std::move(efficiency)) {
  if (ensembles_.empty()) throw ValidationError("polychromatic state needs at least one bin");
  if (ensembles_.size() != efficiency_.size())
    throw ValidationError("polychromatic state: one detector efficiency per bin required");
  for (double e : efficiency_)
    if (!(e >= 0.0)) throw ValidationError("detector efficiency must be >= 0");
  for (std::size_t b = 1; b < ensembles_.size(); ++b) {
    if (!(ensembles_[b].angular_frequency() > ensembles_[b - 1].angular_frequency()))
      throw ValidationError("angular-frequency bins must be strictly increasing");
    if (!(ensembles_[b].grid() == ensembles_[0].grid()))
      throw ValidationError("all bins must share one grid");
  }
}

namespace {

std::mt19937_64 member_engine(std::uint64_t seed, std::size_t member) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(member), static_cast<std::uint32_t>(member >> 32)};
  return std::mt19937_64(seq);
}

std::vector<ComplexField> tilted_members(const TiltedPlaneWaves& src, const Grid2D& g,
                                         double lambda, double scale) {
  if (src.count == 0) throw ValidationError("source needs at least one mode");
  if (!(src.cone_half_angle_rad >= 0.0) || src.cone_half_angle_rad > 0.1)
    throw ValidationError("cone half-angle must lie in [0, 0.1] rad (paraxial)");
  const double k = 2.0 * std::numbers::pi / lambda;
  const double dkx = 2.0 * std::numbers::pi / g.extent_x();
  const double dky = 2.0 * std::numbers::pi / g.extent_y();
  std::vector<ComplexField> members;
  members.reserve(src.count);
  for (std::size_t j = 0; j < src.count; ++j) {
    double tx = 0.0, ty = 0.0;
    if (src.cone_half_angle_rad > 0.0) {
      auto rng = member_engine(src.seed, j);
      std::uniform_real_distribution<double> u(0.0, 1.0);
      const double r = src.cone_half_angle_rad * std::sqrt(u(rng));
      const double a = 2.0 * std::numbers::pi * u(rng);
      tx = r * std::cos(a);
      ty = r * std::sin(a);
    }
    double kx = k * std::sin(tx), ky = k * std::sin(ty);
    if (src.snap_to_grid) {
      kx = std::round(kx / dkx) * dkx;
      ky = std::round(ky / dky) * dky;
    }
    std::vector<cplx> v(g.size());
    for (std::size_t iy = 0; iy < g.ny(); ++iy)
      for (std::size_t ix = 0; ix < g.nx(); ++ix)
        v[g.index(ix, iy)] = std::polar(scale, kx * g.x(ix) + ky * g.y(iy));
    members.emplace_back(g, lambda, std::move(v));
  }
  return members;
}

std::vector<ComplexField> screen_members(const RandomPhaseScreen& src, const Grid2D& g,
                                         double lambda, double scale) {
  if (src.count == 0) throw ValidationError("source needs at least one mode");
  if (!(src.rms_phase_rad >= 0.0)) throw ValidationError("rms phase must be >= 0");
  if (src.rms_phase_rad > 0.0 && !(src.correlation_length_m > 0.0))
    throw ValidationError("phase-screen correlation length must be > 0");

  // Gaussian autocorrelation exp(-r²/ℓ²) has power spectrum ∝ exp(-k²ℓ²/4).
  std::vector<double> filter = fft::k_squared(g);
  const double l2 = src.correlation_length_m * src.correlation_length_m;
  double mean_power = 0.0;
  for (double& h : filter) {
    h = std::exp(-h * l2 / 8.0);
    mean_power += h * h;
  }
  mean_power /= static_cast<double>(filter.size());
  const double norm = src.rms_phase_rad > 0.0 ? src.rms_phase_rad / std::sqrt(mean_power) : 0.0;
  for (double& h : filter) h *= norm;

  std::vector<ComplexField> members(src.count, ComplexField::constant(g, lambda, scale));
  if (src.rms_phase_rad == 0.0) return members;
  parallel_for(src.count, [&](std::size_t j) {
    auto rng = member_engine(src.seed, j);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<cplx> noise(g.size());
    for (auto& z : noise) z = normal(rng);
    fft::forward_2d(g, noise);
    kernels::active().multiply_real(noise, filter);
    fft::inverse_2d(g, noise);
    auto& v = members[j].mutable_values();
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::polar(scale, noise[i].real());
  });
  return members;
}

} // namespace

ModeEnsemble make_ensemble(const SourceModel& source, const Grid2D& grid, double wavelength_m,
                           double amplitude_scale) {
  std::vector<ComplexField> members = std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, TiltedPlaneWaves>)
          return tilted_members(s, grid, wavelength_m, amplitude_scale);
        else
          return screen_members(s, grid, wavelength_m, amplitude_scale);
      },
      source);
  const std::size_t n = members.size();
  return ModeEnsemble(std::move(members), std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

ComplexField apply_pipeline(const ComplexField& f, const Pipeline& pipeline) {
  ComplexField out = f;
  for (const auto& stage : pipeline.stages) {
    if (const auto* t = std::get_if<TransmissionMap>(&stage))
      out = apply_sample(out, *t);
    else
      out = apply_transfer(out, std::get<TransferFunction>(stage));
  }
  return out;
}

ModeEnsemble propagate_ensemble(const ModeEnsemble& e, const Pipeline& pipeline) {
  std::vector<ComplexField> out(e.members());
  parallel_for(out.size(), [&](std::size_t j) { out[j] = apply_pipeline(out[j], pipeline); });
  return ModeEnsemble(std::move(out), e.weights());
}

IntensityImage spectral_density(const ModeEnsemble& e) {
  std::vector<double> s(e.grid().size(), 0.0);
  const auto& k = kernels::active();
  for (std::size_t j = 0; j < e.size(); ++j)
    k.accumulate_norm_sq(e.members()[j].values(), e.weights()[j], s);
  return IntensityImage(e.grid(), std::move(s));
}

IntensityImage spectral_density_standard_error(const ModeEnsemble& e) {
  const std::size_t n = e.grid().size();
  std::vector<double> se(n, 0.0);
  if (e.size() < 2) return IntensityImage(e.grid(), std::move(se));
  const IntensityImage s = spectral_density(e);
  for (std::size_t j = 0; j < e.size(); ++j) {
    const double c = e.weights()[j];
    const auto& v = e.members()[j].values();
    for (std::size_t i = 0; i < n; ++i) {
      const double d = std::norm(v[i]) - s.values()[i];
      se[i] += c * c * d * d;
    }
  }
  const double bessel = static_cast<double>(e.size()) / static_cast<double>(e.size() - 1);
  for (double& v : se) v = std::sqrt(bessel * v);
  return IntensityImage(e.grid(), std::move(se));
}

cplx cross_spectral_density(const ModeEnsemble& e, Pixel p1, Pixel p2) {
  const Grid2D& g = e.grid();
  if (p1.ix >= g.nx() || p1.iy >= g.ny() || p2.ix >= g.nx() || p2.iy >= g.ny())
    throw ValidationError("cross_spectral_density: pixel out of range");
  const std::size_t i1 = g.index(p1.ix, p1.iy), i2 = g.index(p2.ix, p2.iy);
  double re = 0.0, im = 0.0;
  for (std::size_t j = 0; j < e.size(); ++j) {
    const cplx a = e.members()[j].values()[i1];
    const cplx b = e.members()[j].values()[i2];
    const double c = e.weights()[j];
    re += c * (a.real() * b.real() + a.imag() * b.imag());
    im += c * (a.real() * b.imag() - a.imag() * b.real());
  }
  return {re, im};
}

IntensityImage detected_intensity(const PolyState& state) {
  const auto& bins = state.ensembles();
  const std::size_t n = bins.size();
  std::vector<double> measure(n, 1.0);
  if (n > 1) {
    for (std::size_t b = 0; b < n; ++b) {
      const double lo = bins[b == 0 ? 0 : b - 1].angular_frequency();
      const double hi = bins[b + 1 == n ? b : b + 1].angular_frequency();
      measure[b] = 0.5 * (hi - lo);
    }
  }
  const Grid2D& g = bins.front().grid();
  std::vector<double> out(g.size(), 0.0);
  for (std::size_t b = 0; b < n; ++b) {
    const IntensityImage s = spectral_density(bins[b]);
    const double w = measure[b] * state.detector_efficiency()[b];
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += w * s.values()[i];
  }
  return IntensityImage(g, std::move(out));
}

double penumbral_width(double d, double r1, double r2) {
  if (!(d >= 0.0)) throw ValidationError("source diameter must be >= 0");
  if (!(r1 > 0.0)) throw ValidationError("source-to-object distance must be > 0");
  if (!(r2 >= 0.0)) throw ValidationError("object-to-detector distance must be >= 0");
  return d * r2 / r1;
}

IntensityImage penumbral_blur(const IntensityImage& image, double d, double r1, double r2,
                              SourceShape shape) {
  const double width = penumbral_width(d, r1, r2);
  if (width == 0.0) return image;
  const Grid2D& g = image.grid();

  // Kernel centred on pixel (0, 0) with wrap-around offsets.
  constexpr int kSub = 8;
  std::vector<double> kernel(g.size(), 0.0);
  const double radius = 0.5 * width;
  const double sigma = width / (2.0 * std::sqrt(2.0 * std::log(2.0)));
  for (std::size_t iy = 0; iy < g.ny(); ++iy) {
    const double y = static_cast<double>(wrapped_index(iy, g.ny())) * g.dy();
    for (std::size_t ix = 0; ix < g.nx(); ++ix) {
      const double x = static_cast<double>(wrapped_index(ix, g.nx())) * g.dx();
      double w = 0.0;
      if (shape == SourceShape::disc) {
        const double hx = 0.5 * g.dx(), hy = 0.5 * g.dy();
        const double nx = std::max(0.0, std::abs(x) - hx), ny = std::max(0.0, std::abs(y) - hy);
        if (nx * nx + ny * ny >= radius * radius) continue;
        for (int sy = 0; sy < kSub; ++sy)
          for (int sx = 0; sx < kSub; ++sx) {
            const double px = x + g.dx() * ((sx + 0.5) / kSub - 0.5);
            const double py = y + g.dy() * ((sy + 0.5) / kSub - 0.5);
            if (px * px + py * py <= radius * radius) w += 1.0;
          }
        // A disc narrower than the subsampling still deposits its mass.
        if (ix == 0 && iy == 0 && w == 0.0) w = 1.0;
      } else {
        w = std::exp(-0.5 * (x * x + y * y) / (sigma * sigma));
      }
      kernel[g.index(ix, iy)] = w;
    }
  }
  double sum = 0.0;
  for (double w : kernel) sum += w;
  std::vector<cplx> k_spec(g.size()), data(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    k_spec[i] = kernel[i] / sum;
    data[i] = image.values()[i];
  }
  fft::forward_2d(g, k_spec);
  fft::forward_2d(g, data);
  kernels::active().multiply(data, k_spec);
  fft::inverse_2d(g, data);
  std::vector<double> out(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) out[i] = std::max(0.0, data[i].real());
  return IntensityImage(g, std::move(out));
}

} // namespace xpci
