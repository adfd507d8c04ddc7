#include "xpci/tomo.hpp"

#include "xpci/diagnostics.hpp"
#include "xpci/errors.hpp"
#include "xpci/fft.hpp"
#include "xpci/parallel.hpp"
#include "xpci/propagation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

namespace xpci {

std::string_view modality_name(Modality m) {
  switch (m) {
  case Modality::attenuation_log: return "attenuation_log";
  case Modality::phase: return "phase";
  case Modality::propagated_intensity: return "propagated_intensity";
  }
  return "unknown";
}

Modality parse_modality(std::string_view name) {
  for (Modality m : {Modality::attenuation_log, Modality::phase, Modality::propagated_intensity})
    if (modality_name(m) == name) return m;
  throw ValidationError("unknown modality '" + std::string(name) + "'");
}

void Sinogram::validate() const {
  if (angles_rad.empty()) throw ValidationError("sinogram has no angles");
  for (std::size_t i = 0; i < angles_rad.size(); ++i) {
    if (!(angles_rad[i] >= 0.0 && angles_rad[i] < std::numbers::pi))
      throw ValidationError("sinogram angles must lie in [0, pi)");
    if (i > 0 && !(angles_rad[i] > angles_rad[i - 1]))
      throw ValidationError("sinogram angles must be strictly increasing");
  }
  if (nx < 2 || ny < 1) throw ValidationError("sinogram rows need nx >= 2 and ny >= 1");
  if (!(dx > 0.0) || (ny > 1 && !(dy > 0.0))) throw ValidationError("sinogram pitch must be > 0");
  if (!(wavelength_m > 0.0)) throw ValidationError("sinogram wavelength must be > 0");
  if (values.size() != angles_rad.size() * nx * ny)
    throw ValidationError("sinogram payload size does not match angles x rows");
  for (double v : values)
    if (!std::isfinite(v)) throw ValidationError("sinogram values must be finite");
}

std::span<const double> Sinogram::row(std::size_t angle, std::size_t iy) const {
  return std::span<const double>(values).subspan((angle * ny + iy) * nx, nx);
}

std::span<double> Sinogram::row(std::size_t angle, std::size_t iy) {
  return std::span<double>(values).subspan((angle * ny + iy) * nx, nx);
}

std::vector<double> uniform_angles(std::size_t n) {
  if (n == 0) throw ValidationError("need at least one angle");
  std::vector<double> a(n);
  for (std::size_t i = 0; i < n; ++i)
    a[i] = std::numbers::pi * static_cast<double>(i) / static_cast<double>(n);
  return a;
}

namespace {

// Line integrals of one voxel quantity along z for a volume rotated by phi.
void project_rotated(const RefractiveVolume& v, const std::vector<double>& q, double phi,
                     std::span<double> out) {
  const std::size_t nx = v.nx(), ny = v.ny(), nz = v.nz();
  const std::size_t nt = std::max(nx, nz);
  const double c = std::cos(phi), s = std::sin(phi);
  const long cx = static_cast<long>(nx / 2), cz = static_cast<long>(nz / 2);
  const long ct = static_cast<long>(nt / 2);
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t ix = 0; ix < nx; ++ix) {
    const double sd = static_cast<double>(static_cast<long>(ix) - cx) * v.dx();
    for (std::size_t k = 0; k < nt; ++k) {
      const double t = static_cast<double>(static_cast<long>(k) - ct) * v.dz();
      const double fx = (sd * c - t * s) / v.dx() + static_cast<double>(cx);
      const double fz = (sd * s + t * c) / v.dz() + static_cast<double>(cz);
      const double x0 = std::floor(fx), z0 = std::floor(fz);
      const double wx = fx - x0, wz = fz - z0;
      const long i0 = static_cast<long>(x0), k0 = static_cast<long>(z0);
      for (int a = 0; a < 2; ++a) {
        const long xi = i0 + a;
        const double w1 = a ? wx : 1.0 - wx;
        if (w1 == 0.0 || xi < 0 || xi >= static_cast<long>(nx)) continue;
        for (int b = 0; b < 2; ++b) {
          const long zi = k0 + b;
          const double w = w1 * (b ? wz : 1.0 - wz);
          if (w == 0.0 || zi < 0 || zi >= static_cast<long>(nz)) continue;
          for (std::size_t iy = 0; iy < ny; ++iy)
            out[iy * nx + ix] +=
                w * q[v.index(static_cast<std::size_t>(xi), iy, static_cast<std::size_t>(zi))];
        }
      }
    }
  }
  for (double& o : out) o *= v.dz();
}

void warn_outside_circle(const RefractiveVolume& v) {
  const double r = 0.5 * std::min(static_cast<double>(v.nx()) * v.dx(),
                                  static_cast<double>(v.nz()) * v.dz());
  for (std::size_t iz = 0; iz < v.nz(); ++iz)
    for (std::size_t iy = 0; iy < v.ny(); ++iy)
      for (std::size_t ix = 0; ix < v.nx(); ++ix) {
        const double x = (static_cast<double>(ix) - static_cast<double>(v.nx() / 2)) * v.dx();
        const double z = (static_cast<double>(iz) - static_cast<double>(v.nz() / 2)) * v.dz();
        if (x * x + z * z <= r * r) continue;
        const std::size_t i = v.index(ix, iy, iz);
        if (v.delta()[i] != 0.0 || v.beta()[i] != 0.0) {
          diag::warn("outside-circle",
                     "volume has material outside the inscribed rotation cylinder");
          return;
        }
      }
}

double poisson_sample(std::mt19937_64& rng, double mean) {
  if (mean <= 0.0) return 0.0;
  std::poisson_distribution<long long> p(mean);
  return static_cast<double>(p(rng));
}

} // namespace

Sinogram forward_sinogram(const RefractiveVolume& volume, double wavelength_m,
                          std::span<const double> angles_rad, Modality modality,
                          const ForwardOptions& options) {
  if (!(wavelength_m > 0.0)) throw ValidationError("wavelength must be > 0");
  if (std::abs(volume.dx() - volume.dz()) > 1e-12 * volume.dx())
    throw ValidationError("tomography needs equal x and z voxel pitch");
  if (volume.nx() < 2) throw ValidationError("tomography needs nx >= 2");
  const bool propagated = modality == Modality::propagated_intensity;
  if (propagated != options.distance_m.has_value())
    throw ValidationError("a propagation distance is required iff modality is propagated_intensity");
  if (options.noise) {
    if (modality == Modality::phase)
      throw ValidationError("Poisson noise applies to intensities; phase sinograms are noiseless");
    if (!(options.noise->mean_counts > 0.0))
      throw ValidationError("noise mean counts must be > 0");
  }

  Sinogram s;
  s.angles_rad.assign(angles_rad.begin(), angles_rad.end());
  s.modality = modality;
  s.nx = volume.nx();
  s.ny = volume.ny();
  s.dx = volume.dx();
  s.dy = volume.dy();
  s.wavelength_m = wavelength_m;
  s.distance_m = propagated ? *options.distance_m : 0.0;
  s.values.assign(s.angles_rad.size() * s.nx * s.ny, 0.0);
  // Validate angles before the heavy work.
  {
    Sinogram probe = s;
    probe.values.assign(probe.values.size(), 0.0);
    probe.validate();
  }
  warn_outside_circle(volume);

  const double k = 2.0 * std::numbers::pi / wavelength_m;
  const std::size_t plane = s.nx * s.ny;
  parallel_for(s.angle_count(), [&](std::size_t a) {
    const double phi = s.angles_rad[a];
    std::span<double> out(s.values.data() + a * plane, plane);
    std::vector<double> beta_int(plane), delta_int(plane);
    if (modality != Modality::phase) project_rotated(volume, volume.beta(), phi, beta_int);
    if (modality != Modality::attenuation_log) project_rotated(volume, volume.delta(), phi, delta_int);

    std::vector<double> intensity;
    if (modality == Modality::phase) {
      for (std::size_t i = 0; i < plane; ++i) out[i] = -k * delta_int[i];
      return;
    }
    if (modality == Modality::attenuation_log) {
      for (std::size_t i = 0; i < plane; ++i) out[i] = 2.0 * k * beta_int[i];
      if (!options.noise) return;
      intensity.resize(plane);
      for (std::size_t i = 0; i < plane; ++i) intensity[i] = std::exp(-out[i]);
    } else {
      const std::size_t gy = std::max<std::size_t>(s.ny, 2);
      const Grid2D g(s.nx, gy, s.dx, s.ny > 1 ? s.dy : s.dx);
      std::vector<cplx> t(g.size());
      for (std::size_t iy = 0; iy < gy; ++iy)
        for (std::size_t ix = 0; ix < s.nx; ++ix) {
          const std::size_t src = (s.ny > 1 ? iy : 0) * s.nx + ix;
          t[g.index(ix, iy)] = std::polar(std::exp(-k * beta_int[src]), -k * delta_int[src]);
        }
      const ComplexField exit(g, wavelength_m, std::move(t));
      const IntensityImage img = extract_intensity(fresnel_propagate(exit, s.distance_m));
      intensity.assign(img.values().begin(), img.values().begin() + static_cast<long>(plane));
    }
    if (options.noise) {
      std::seed_seq seq{static_cast<std::uint32_t>(options.noise->seed),
                        static_cast<std::uint32_t>(options.noise->seed >> 32),
                        static_cast<std::uint32_t>(a)};
      std::mt19937_64 rng(seq);
      const double n = options.noise->mean_counts;
      for (double& v : intensity) v = poisson_sample(rng, n * v) / n;
    }
    if (modality == Modality::attenuation_log) {
      const double floor = 0.5 / options.noise->mean_counts;
      for (std::size_t i = 0; i < plane; ++i) out[i] = -std::log(std::max(intensity[i], floor));
    } else {
      std::copy(intensity.begin(), intensity.end(), out.begin());
    }
  });
  return s;
}

Sinogram log_sinogram(const Sinogram& intensity, double i0, double floor_fraction) {
  intensity.validate();
  if (intensity.modality != Modality::propagated_intensity)
    throw ValidationError("log_sinogram expects a propagated_intensity sinogram");
  if (!(i0 > 0.0) || !(floor_fraction > 0.0))
    throw ValidationError("I0 and the floor fraction must be > 0");
  Sinogram out = intensity;
  out.modality = Modality::attenuation_log;
  out.distance_m = 0.0;
  for (double& v : out.values) v = -std::log(std::max(v / i0, floor_fraction));
  return out;
}

namespace {

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

std::vector<double> ramp_filter(std::size_t n_pad, double tau, bool hann) {
  std::vector<cplx> h(n_pad, 0.0);
  for (std::size_t j = 0; j < n_pad; ++j) {
    const long l = wrapped_index(j, n_pad);
    if (l == 0)
      h[j] = 1.0 / (4.0 * tau * tau);
    else if (l % 2 != 0)
      h[j] = -1.0 / (static_cast<double>(l * l) * std::numbers::pi * std::numbers::pi * tau * tau);
  }
  fft::forward_1d(h);
  std::vector<double> filter(n_pad);
  for (std::size_t j = 0; j < n_pad; ++j) {
    double w = tau * h[j].real();
    if (hann) {
      const double f = static_cast<double>(wrapped_index(j, n_pad)) / static_cast<double>(n_pad);
      w *= 0.5 * (1.0 + std::cos(2.0 * std::numbers::pi * f));
    }
    filter[j] = w;
  }
  return filter;
}

} // namespace

ReconSlice fbp_reconstruct(const Sinogram& s, const FbpOptions& options) {
  s.validate();
  if (s.modality == Modality::propagated_intensity)
    throw ValidationError("propagated_intensity sinograms must be phase-retrieved before FBP");
  if (s.angle_count() < 2) throw ValidationError("FBP needs at least 2 angles");
  if (options.row >= s.ny) throw ValidationError("FBP row index out of range");

  const std::size_t nx = s.nx, na = s.angle_count();
  const std::size_t n_pad = next_pow2(2 * nx);
  const std::vector<double> filter = ramp_filter(n_pad, s.dx, options.hann);
  std::vector<std::vector<double>> q(na);
  parallel_for(na, [&](std::size_t a) {
    std::vector<cplx> buf(n_pad, 0.0);
    const auto row = s.row(a, options.row);
    for (std::size_t i = 0; i < nx; ++i) buf[i] = row[i];
    fft::forward_1d(buf);
    for (std::size_t j = 0; j < n_pad; ++j) buf[j] *= filter[j];
    fft::inverse_1d(buf);
    q[a].resize(nx);
    for (std::size_t i = 0; i < nx; ++i) q[a][i] = buf[i].real();
  });

  std::vector<double> cs(na), sn(na);
  for (std::size_t a = 0; a < na; ++a) {
    cs[a] = std::cos(s.angles_rad[a]);
    sn[a] = std::sin(s.angles_rad[a]);
  }
  const Grid2D g(nx, nx, s.dx, s.dx);
  std::vector<double> out(g.size(), 0.0);
  const double centre = static_cast<double>(nx / 2);
  const double scale = std::numbers::pi / static_cast<double>(na);
  parallel_for(nx, [&](std::size_t iz) {
    const double z = (static_cast<double>(iz) - centre) * s.dx;
    for (std::size_t ix = 0; ix < nx; ++ix) {
      const double x = (static_cast<double>(ix) - centre) * s.dx;
      double acc = 0.0;
      for (std::size_t a = 0; a < na; ++a) {
        const double u = (x * cs[a] + z * sn[a]) / s.dx + centre;
        const double u0 = std::floor(u);
        const long i0 = static_cast<long>(u0);
        const double w = u - u0;
        if (i0 >= 0 && i0 < static_cast<long>(nx)) acc += (1.0 - w) * q[a][static_cast<std::size_t>(i0)];
        if (i0 + 1 >= 0 && i0 + 1 < static_cast<long>(nx))
          acc += w * q[a][static_cast<std::size_t>(i0 + 1)];
      }
      out[g.index(ix, iz)] = acc * scale;
    }
  });
  ReconQuantity quantity = ReconQuantity::mu;
  if (s.modality == Modality::phase) {
    const double k = 2.0 * std::numbers::pi / s.wavelength_m;
    for (double& v : out) v /= -k;
    quantity = ReconQuantity::delta;
  }
  return {RealMap(g, std::move(out)), quantity};
}

ReconSlice paganin_fbp(const Sinogram& s, const RetrievalConfig& cfg, ReconQuantity quantity,
                       const FbpOptions& options) {
  s.validate();
  cfg.validate();
  if (s.modality != Modality::propagated_intensity)
    throw ValidationError("paganin_fbp expects a propagated_intensity sinogram");
  if (std::abs(cfg.distance_m - s.distance_m) > 1e-12 * std::max(1.0, s.distance_m))
    throw ValidationError("retrieval distance does not match the sinogram's propagation distance");

  Sinogram att = s;
  att.modality = Modality::attenuation_log;
  att.distance_m = 0.0;
  const std::size_t gy = std::max<std::size_t>(s.ny, 2);
  const Grid2D g(s.nx, gy, s.dx, s.ny > 1 ? s.dy : s.dx);
  parallel_for(s.angle_count(), [&](std::size_t a) {
    std::vector<double> img(g.size());
    for (std::size_t iy = 0; iy < gy; ++iy) {
      const auto row = s.row(a, s.ny > 1 ? iy : 0);
      std::copy(row.begin(), row.end(), img.begin() + static_cast<long>(iy * s.nx));
    }
    const PaganinResult r = paganin_retrieve(IntensityImage(g, std::move(img)), cfg);
    for (std::size_t iy = 0; iy < s.ny; ++iy) {
      auto out = att.row(a, iy);
      for (std::size_t ix = 0; ix < s.nx; ++ix)
        out[ix] = cfg.mu_per_m * r.thickness.values()[g.index(ix, iy)];
    }
  });
  ReconSlice recon = fbp_reconstruct(att, options);
  if (quantity == ReconQuantity::delta) {
    for (double& v : recon.values.mutable_values()) v *= cfg.delta / cfg.mu_per_m;
    recon.quantity = ReconQuantity::delta;
  }
  return recon;
}

double region_snr(const ReconSlice& slice, std::span<const std::size_t> signal,
                  std::span<const std::size_t> background) {
  const std::size_t n = slice.values.values().size();
  if (signal.empty() || background.size() < 2)
    throw ValidationError("SNR needs a nonempty signal region and >= 2 background pixels");
  std::vector<std::size_t> a(signal.begin(), signal.end()), b(background.begin(), background.end());
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  if ((!a.empty() && a.back() >= n) || (!b.empty() && b.back() >= n))
    throw ValidationError("SNR region index outside the slice");
  std::vector<std::size_t> both;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(both));
  if (!both.empty()) throw ValidationError("signal and background regions must be disjoint");

  const auto& v = slice.values.values();
  double ms = 0.0, mb = 0.0;
  for (std::size_t i : a) ms += v[i];
  for (std::size_t i : b) mb += v[i];
  ms /= static_cast<double>(a.size());
  mb /= static_cast<double>(b.size());
  double var = 0.0;
  for (std::size_t i : b) var += (v[i] - mb) * (v[i] - mb);
  const double sd = std::sqrt(var / static_cast<double>(b.size() - 1));
  const double diff = ms - mb;
  if (sd == 0.0) return diff == 0.0 ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), diff);
  return diff / sd;
}

std::vector<std::size_t> disc_region(const Grid2D& grid, double cx_m, double cz_m,
                                     double radius_m, double inner_radius_m) {
  std::vector<std::size_t> out;
  for (std::size_t iz = 0; iz < grid.ny(); ++iz)
    for (std::size_t ix = 0; ix < grid.nx(); ++ix) {
      const double x = grid.x(ix) - cx_m, z = grid.y(iz) - cz_m;
      const double r2 = x * x + z * z;
      if (r2 <= radius_m * radius_m && r2 >= inner_radius_m * inner_radius_m)
        out.push_back(grid.index(ix, iz));
    }
  return out;
}

RefractiveVolume cylinder_volume(std::size_t n, std::size_t ny, double h, double radius_m,
                                 double delta, double beta, double cx_m, double cz_m) {
  if (!(radius_m > 0.0)) throw ValidationError("cylinder radius must be > 0");
  constexpr int kSub = 16;
  std::vector<double> frac(n * n, 0.0);
  const double centre = static_cast<double>(n / 2);
  const double rim = 0.75 * h; // beyond half a pixel diagonal
  for (std::size_t iz = 0; iz < n; ++iz)
    for (std::size_t ix = 0; ix < n; ++ix) {
      const double x = (static_cast<double>(ix) - centre) * h - cx_m;
      const double z = (static_cast<double>(iz) - centre) * h - cz_m;
      const double r = std::hypot(x, z);
      double f;
      if (r <= radius_m - rim)
        f = 1.0;
      else if (r >= radius_m + rim)
        f = 0.0;
      else {
        int inside = 0;
        for (int a = 0; a < kSub; ++a)
          for (int b = 0; b < kSub; ++b) {
            const double px = x + h * ((a + 0.5) / kSub - 0.5);
            const double pz = z + h * ((b + 0.5) / kSub - 0.5);
            if (px * px + pz * pz <= radius_m * radius_m) ++inside;
          }
        f = static_cast<double>(inside) / (kSub * kSub);
      }
      frac[iz * n + ix] = f;
    }
  std::vector<double> d(n * ny * n), bt(n * ny * n);
  for (std::size_t iz = 0; iz < n; ++iz)
    for (std::size_t iy = 0; iy < ny; ++iy)
      for (std::size_t ix = 0; ix < n; ++ix) {
        const std::size_t i = (iz * ny + iy) * n + ix;
        d[i] = delta * frac[iz * n + ix];
        bt[i] = beta * frac[iz * n + ix];
      }
  return RefractiveVolume(n, ny, n, h, h, h, std::move(d), std::move(bt));
}

RefractiveVolume add_volumes(const RefractiveVolume& a, const RefractiveVolume& b) {
  if (a.nx() != b.nx() || a.ny() != b.ny() || a.nz() != b.nz() || a.dx() != b.dx() ||
      a.dy() != b.dy() || a.dz() != b.dz())
    throw ValidationError("volumes must share one shape and pitch");
  std::vector<double> d(a.delta()), bt(a.beta());
  for (std::size_t i = 0; i < d.size(); ++i) {
    d[i] += b.delta()[i];
    bt[i] += b.beta()[i];
  }
  return RefractiveVolume(a.nx(), a.ny(), a.nz(), a.dx(), a.dy(), a.dz(), std::move(d),
                          std::move(bt));
}

} // namespace xpci
