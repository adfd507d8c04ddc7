#include "xpci/sample.hpp"

#include "xpci/diagnostics.hpp"
#include "xpci/errors.hpp"
#include "xpci/kernels.hpp"
#include "xpci/propagation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace xpci {
namespace {

constexpr double kWeakIndexLimit = 1e-3;

bool same_pitch(double a, double b) { return std::abs(a - b) <= 1e-9 * std::max(a, b); }

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v))
    throw ValidationError(std::string(name) + " must be positive and finite");
}

} // namespace

void Material::validate() const {
  if (!(beta >= 0.0)) throw ValidationError("material beta must be >= 0");
  if (!std::isfinite(delta)) throw ValidationError("material delta must be finite");
  require_positive(wavelength_m, "material wavelength");
}

double Material::wavenumber() const { return 2.0 * std::numbers::pi / wavelength_m; }

double Material::mu() const { return mu_from_beta(beta, wavenumber()); }

RefractiveVolume::RefractiveVolume(std::size_t nx, std::size_t ny, std::size_t nz, double dx,
                                   double dy, double dz, std::vector<double> delta,
                                   std::vector<double> beta)
    : nx_(nx), ny_(ny), nz_(nz), dx_(dx), dy_(dy), dz_(dz), delta_(std::move(delta)),
      beta_(std::move(beta)) {
  if (nx == 0 || ny == 0 || nz == 0) throw ValidationError("volume needs at least one voxel");
  require_positive(dx, "voxel pitch dx");
  require_positive(dy, "voxel pitch dy");
  require_positive(dz, "voxel pitch dz");
  const std::size_t n = nx * ny * nz;
  if (delta_.size() != n || beta_.size() != n)
    throw ValidationError("volume arrays must hold nx*ny*nz = " + std::to_string(n) + " values");
  bool strong = false;
  for (std::size_t i = 0; i < n; ++i) {
    if (!(beta_[i] >= 0.0)) throw ValidationError("volume beta must be >= 0 everywhere");
    if (!std::isfinite(delta_[i])) throw ValidationError("volume delta must be finite");
    strong = strong || std::abs(delta_[i]) >= kWeakIndexLimit || beta_[i] >= kWeakIndexLimit;
  }
  if (strong)
    diag::warn("strong-index", "volume has |delta| or beta >= 1e-3; the X-ray small-index "
                               "approximations may not hold");
}

RefractiveVolume RefractiveVolume::empty(std::size_t nx, std::size_t ny, std::size_t nz, double dx,
                                         double dy, double dz) {
  const std::size_t n = nx * ny * nz;
  return RefractiveVolume(nx, ny, nz, dx, dy, dz, std::vector<double>(n), std::vector<double>(n));
}

double mu_from_beta(double beta, double wavenumber) {
  if (!(beta >= 0.0)) throw ValidationError("beta must be >= 0");
  require_positive(wavenumber, "wavenumber");
  return 2.0 * wavenumber * beta;
}

ProjectedObject project(const RefractiveVolume& v, double wavelength_m) {
  require_positive(wavelength_m, "wavelength");
  const Grid2D grid = v.transverse_grid();
  const double k = 2.0 * std::numbers::pi / wavelength_m;
  std::vector<double> sum_delta(grid.size()), sum_beta(grid.size());
  for (std::size_t iz = 0; iz < v.nz(); ++iz)
    for (std::size_t i = 0; i < grid.size(); ++i) {
      sum_delta[i] += v.delta()[iz * grid.size() + i];
      sum_beta[i] += v.beta()[iz * grid.size() + i];
    }
  std::vector<double> phase(grid.size()), atten(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    phase[i] = -k * sum_delta[i] * v.dz();
    atten[i] = 2.0 * k * sum_beta[i] * v.dz();
  }
  return ProjectedObject{grid, wavelength_m, RealMap(grid, std::move(phase)),
                         RealMap(grid, std::move(atten)), std::nullopt};
}

ProjectedObject project_thickness(const RealMap& thickness, const Material& material) {
  material.validate();
  const double k = material.wavenumber();
  const double mu = material.mu();
  const auto& t = thickness.values();
  std::vector<double> phase(t.size()), atten(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (!(t[i] >= 0.0)) throw ValidationError("projected thickness must be >= 0");
    phase[i] = -k * material.delta * t[i];
    atten[i] = mu * t[i];
  }
  const Grid2D& g = thickness.grid();
  return ProjectedObject{g, material.wavelength_m, RealMap(g, std::move(phase)),
                         RealMap(g, std::move(atten)), thickness};
}

TransmissionMap transmission_function(const ProjectedObject& p) {
  const auto& phase = p.phase_shift.values();
  const auto& atten = p.attenuation.values();
  std::vector<cplx> out(phase.size());
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = std::polar(std::exp(-0.5 * atten[i]), phase[i]);
  return TransmissionMap{p.grid, p.wavelength_m, std::move(out)};
}

ComplexField apply_sample(const ComplexField& f, const TransmissionMap& t) {
  if (!(f.grid() == t.grid)) throw ValidationError("apply_sample: field and sample grids differ");
  if (std::abs(f.wavelength() - t.wavelength_m) > 1e-12 * t.wavelength_m) {
    std::ostringstream msg;
    msg << "apply_sample: field wavelength " << f.wavelength()
        << " m differs from the transmission wavelength " << t.wavelength_m << " m";
    throw ValidationError(msg.str());
  }
  std::vector<cplx> out = f.values();
  kernels::active().multiply(out, t.values);
  return ComplexField(f.grid(), f.wavelength(), std::move(out));
}

FresnelNumber fresnel_number(double feature_m, double length_m, double wavelength_m,
                             double magnification) {
  require_positive(feature_m, "feature size");
  require_positive(length_m, "length");
  require_positive(wavelength_m, "wavelength");
  if (!(magnification >= 1.0) || !std::isfinite(magnification))
    throw ValidationError("magnification must be >= 1");
  const double nf = magnification * feature_m * feature_m / (wavelength_m * length_m);
  const Validity verdict = nf >= kFresnelValidThreshold      ? Validity::valid
                           : nf >= kFresnelMarginalThreshold ? Validity::marginal
                                                             : Validity::invalid;
  return FresnelNumber{nf, verdict};
}

double diffraction_spread(double feature_m, double wavelength_m) {
  require_positive(feature_m, "feature size");
  require_positive(wavelength_m, "wavelength");
  return wavelength_m / feature_m;
}

ComplexField multislice(const ComplexField& f, const RefractiveVolume& v) {
  const Grid2D& g = f.grid();
  if (g.nx() != v.nx() || g.ny() != v.ny() || !same_pitch(g.dx(), v.dx()) ||
      !same_pitch(g.dy(), v.dy()))
    throw ValidationError("multislice: volume voxels do not line up with the field pixels");

  const double a_min = 2.0 * std::max(g.dx(), g.dy());
  const auto nf = fresnel_number(a_min, v.dz(), f.wavelength());
  if (nf.verdict != Validity::valid) {
    std::ostringstream msg;
    msg << "slice Fresnel number " << nf.value << " is below " << kFresnelValidThreshold
        << "; slices may not be optically thin";
    diag::warn("thick-slice", msg.str());
  }

  const double k = f.wavenumber();
  const double dz = v.dz();
  const auto step = TransferFunction::free_space(dz);
  const std::size_t n = g.size();
  ComplexField psi = f;
  std::vector<cplx> slice(n);
  for (std::size_t iz = 0; iz < v.nz(); ++iz) {
    // 𝒯_j = exp(-ik(δ - iβ)Δz) = exp(-ikδΔz)·exp(-kβΔz)
    for (std::size_t i = 0; i < n; ++i)
      slice[i] = std::polar(std::exp(-k * v.beta()[iz * n + i] * dz), -k * v.delta()[iz * n + i] * dz);
    kernels::active().multiply(psi.mutable_values(), slice);
    psi = apply_transfer(psi, step);
  }
  return psi;
}

RealMap sphere_thickness(const Grid2D& grid, double diameter_m, double cx, double cy) {
  require_positive(diameter_m, "sphere diameter");
  if (diameter_m > std::min(grid.extent_x(), grid.extent_y()))
    throw ValidationError("sphere diameter exceeds the grid extent");
  const double r = 0.5 * diameter_m;
  const auto chord = [r](double dx, double dy) {
    const double q = r * r - dx * dx - dy * dy;
    return q > 0.0 ? 2.0 * std::sqrt(q) : 0.0;
  };
  constexpr int kSub = 16;
  std::vector<double> out(grid.size());
  for (std::size_t iy = 0; iy < grid.ny(); ++iy) {
    for (std::size_t ix = 0; ix < grid.nx(); ++ix) {
      const double x = grid.x(ix) - cx, y = grid.y(iy) - cy;
      const double hx = 0.5 * grid.dx(), hy = 0.5 * grid.dy();
      const double near_x = std::max(0.0, std::abs(x) - hx), near_y = std::max(0.0, std::abs(y) - hy);
      const double far_x = std::abs(x) + hx, far_y = std::abs(y) + hy;
      const bool inside = far_x * far_x + far_y * far_y <= r * r;
      const bool outside = near_x * near_x + near_y * near_y >= r * r;
      double t = 0.0;
      if (inside) {
        t = chord(x, y);
      } else if (!outside) {
        for (int sy = 0; sy < kSub; ++sy)
          for (int sx = 0; sx < kSub; ++sx)
            t += chord(x + grid.dx() * ((sx + 0.5) / kSub - 0.5), y + grid.dy() * ((sy + 0.5) / kSub - 0.5));
        t /= kSub * kSub;
      }
      out[grid.index(ix, iy)] = t;
    }
  }
  return RealMap(grid, std::move(out));
}

ProjectedObject sphere_phantom(const Grid2D& grid, double diameter_m, const Material& material,
                               double cx, double cy) {
  return project_thickness(sphere_thickness(grid, diameter_m, cx, cy), material);
}

RefractiveVolume sphere_volume(std::size_t nx, std::size_t ny, std::size_t nz, double dx,
                               double dz, double diameter_m, double delta, double beta) {
  require_positive(diameter_m, "sphere diameter");
  const double r = 0.5 * diameter_m;
  const double z0 = 0.5 * static_cast<double>(nz) * dz;
  const double half_diag = 0.5 * std::sqrt(2.0 * dx * dx + dz * dz);
  constexpr int kSub = 4;
  std::vector<double> d(nx * ny * nz), b(nx * ny * nz);
  for (std::size_t iz = 0; iz < nz; ++iz)
    for (std::size_t iy = 0; iy < ny; ++iy)
      for (std::size_t ix = 0; ix < nx; ++ix) {
        const double x = (static_cast<double>(ix) - static_cast<double>(nx / 2)) * dx;
        const double y = (static_cast<double>(iy) - static_cast<double>(ny / 2)) * dx;
        const double z = (static_cast<double>(iz) + 0.5) * dz - z0;
        const double dist = std::sqrt(x * x + y * y + z * z);
        double f = 0.0;
        if (dist <= r - half_diag) {
          f = 1.0;
        } else if (dist < r + half_diag) {
          int inside = 0;
          for (int a = 0; a < kSub; ++a)
            for (int c = 0; c < kSub; ++c)
              for (int e = 0; e < kSub; ++e) {
                const double px = x + dx * ((a + 0.5) / kSub - 0.5);
                const double py = y + dx * ((c + 0.5) / kSub - 0.5);
                const double pz = z + dz * ((e + 0.5) / kSub - 0.5);
                if (px * px + py * py + pz * pz <= r * r) ++inside;
              }
          f = static_cast<double>(inside) / (kSub * kSub * kSub);
        }
        const std::size_t i = (iz * ny + iy) * nx + ix;
        d[i] = delta * f;
        b[i] = beta * f;
      }
  return RefractiveVolume(nx, ny, nz, dx, dx, dz, std::move(d), std::move(b));
}

EffectiveGeometry effective_geometry(double r1_m, double r2_m) {
  require_positive(r1_m, "source-to-object distance R1");
  if (!(r2_m >= 0.0) || !std::isfinite(r2_m))
    throw ValidationError("object-to-detector distance R2 must be >= 0");
  const double m = (r1_m + r2_m) / r1_m;
  return EffectiveGeometry{m, r2_m / m};
}

} // namespace xpci
