#include "xpci/pipeline.hpp"

#include "xpci/curve_io.hpp"
#include "xpci/errors.hpp"
#include "xpci/retrieval.hpp"
#include "xpci/sample.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace xpci {

namespace {

SourceModel source_model(const config::SourceSpec& s, std::uint64_t seed) {
  if (s.model == "tilted_plane_waves")
    return TiltedPlaneWaves{s.cone_half_angle_rad, s.modes, seed, true};
  if (s.model == "random_phase_screen")
    return RandomPhaseScreen{s.correlation_length_m, s.rms_phase_rad, s.modes, seed};
  return TiltedPlaneWaves{0.0, 1, seed, true};
}

SourceShape shape_of(const std::string& s) {
  return s == "gaussian" ? SourceShape::gaussian : SourceShape::disc;
}

// Linear interpolation of a tabulated real amplitude, flat outside.
cplx table_value(const io::TwoColumn& t, double k) {
  if (k <= t.x.front()) return t.y.front();
  if (k >= t.x.back()) return t.y.back();
  const auto it = std::upper_bound(t.x.begin(), t.x.end(), k);
  const std::size_t i = static_cast<std::size_t>(it - t.x.begin());
  const double w = (k - t.x[i - 1]) / (t.x[i] - t.x[i - 1]);
  return (1.0 - w) * t.y[i - 1] + w * t.y[i];
}

Pipeline build_pipeline(const config::ExperimentConfig& cfg, const Grid2D& g, double lambda) {
  Pipeline p;
  for (const auto& st : cfg.stages) {
    if (st.type == "sample") {
      const auto& ph = *cfg.phantom;
      const Material m{ph.delta, ph.beta, lambda};
      p.stages.push_back(transmission_function(
          sphere_phantom(g, ph.diameter_m, m, ph.centre_x_m, ph.centre_y_m)));
    } else if (st.type == "free_space") {
      p.stages.push_back(TransferFunction::free_space(st.distance_m));
    } else {
      const io::TwoColumn table = io::read_two_column(st.profile_file);
      if (table.x.size() < 2) throw ValidationError(st.profile_file + ": need >= 2 rows");
      for (std::size_t i = 1; i < table.x.size(); ++i)
        if (!(table.x[i] > table.x[i - 1]))
          throw ValidationError(st.profile_file + ": frequencies must increase");
      const Axis axis = st.axis == "y" ? Axis::y : Axis::x;
      p.stages.push_back(analyser_transfer(
          g, sample_axis_profile(g, axis, [&](double k) { return table_value(table, k); }), axis));
    }
  }
  return p;
}

} // namespace

ExperimentResult run_experiment(const config::ExperimentConfig& cfg) {
  const Grid2D g(cfg.grid.nx, cfg.grid.ny, cfg.grid.dx_m, cfg.grid.dy_m);
  std::vector<config::SpectralBin> bins = cfg.source.bins;
  // Increasing angular frequency means decreasing wavelength.
  std::sort(bins.begin(), bins.end(),
            [](const auto& a, const auto& b) { return a.wavelength_m > b.wavelength_m; });
  for (std::size_t i = 1; i < bins.size(); ++i)
    if (bins[i].wavelength_m == bins[i - 1].wavelength_m)
      throw SchemaError("source.bins", "wavelengths must be distinct");

  std::vector<ModeEnsemble> out, flat;
  std::vector<double> eff;
  for (std::size_t b = 0; b < bins.size(); ++b) {
    const ModeEnsemble e =
        make_ensemble(source_model(cfg.source, cfg.seed + b), g, bins[b].wavelength_m,
                      bins[b].amplitude);
    out.push_back(propagate_ensemble(e, build_pipeline(cfg, g, bins[b].wavelength_m)));
    flat.push_back(e);
    eff.push_back(bins[b].efficiency);
  }
  IntensityImage detected = detected_intensity(PolyState(std::move(out), eff));
  const IntensityImage flat_image = detected_intensity(PolyState(std::move(flat), eff));
  double flat_field = 0.0;
  for (double v : flat_image.values()) flat_field += v;
  flat_field /= static_cast<double>(flat_image.values().size());

  if (cfg.blur)
    detected = penumbral_blur(detected, cfg.blur->source_diameter_m, cfg.blur->r1_m,
                              cfg.blur->r2_m, shape_of(cfg.blur->shape));

  ExperimentResult r{std::move(detected), flat_field, std::nullopt};
  if (cfg.retrieval) {
    RetrievalConfig rc;
    rc.delta = cfg.retrieval->delta;
    rc.mu_per_m = cfg.retrieval->mu_per_m;
    rc.distance_m = cfg.retrieval->distance_m;
    rc.wavelength_m = bins.back().wavelength_m;
    rc.i0 = flat_field;
    rc.regularization = cfg.retrieval->regularization;
    r.thickness = paganin_retrieve(r.detected, rc).thickness;
  }
  return r;
}

RimFringe rim_fringe(const IntensityImage& image, double i0, std::size_t iy, std::size_t rim_ix,
                     std::size_t window_px, double threshold) {
  const Grid2D& g = image.grid();
  if (iy >= g.ny() || rim_ix >= g.nx()) throw ValidationError("rim position outside the image");
  if (!(i0 > 0.0) || !(threshold > 0.0)) throw ValidationError("I0 and threshold must be > 0");
  const std::size_t lo = rim_ix >= window_px ? rim_ix - window_px : 0;
  const std::size_t hi = std::min(g.nx() - 1, rim_ix + window_px);
  std::size_t imax = lo;
  double vmax = image.at(lo, iy), vmin = vmax;
  for (std::size_t ix = lo; ix <= hi; ++ix) {
    const double v = image.at(ix, iy);
    if (v > vmax) {
      vmax = v;
      imax = ix;
    }
    vmin = std::min(vmin, v);
  }
  const bool interior_max = imax > lo && imax < hi;
  const bool detected =
      interior_max && vmax > i0 * (1.0 + threshold) && vmax - vmin > 2.0 * threshold * i0;
  return {(vmax - i0) / i0, (i0 - vmin) / i0, detected};
}

std::vector<SweepCell> run_fringe_sweep(const config::ExperimentConfig& cfg) {
  if (!cfg.sweep || !cfg.phantom) throw ValidationError("fringe sweep needs sweep and phantom sections");
  const auto& sw = *cfg.sweep;
  const auto& ph = *cfg.phantom;
  const Grid2D g(cfg.grid.nx, cfg.grid.ny, cfg.grid.dx_m, cfg.grid.dy_m);
  const double lambda = cfg.source.bins.front().wavelength_m;
  const Material m{ph.delta, ph.beta, lambda};
  const TransmissionMap t =
      transmission_function(sphere_phantom(g, ph.diameter_m, m, ph.centre_x_m, ph.centre_y_m));
  const ComplexField exit = apply_sample(ComplexField::constant(g, lambda), t);

  // Rim on the +x side of the centre row, in pixels.
  const std::size_t iy = static_cast<std::size_t>(
      std::llround(ph.centre_y_m / g.dy()) + static_cast<long long>(g.ny() / 2));
  const long long rim = std::llround((ph.centre_x_m + 0.5 * ph.diameter_m) / g.dx()) +
                        static_cast<long long>(g.nx() / 2);
  if (rim < 0 || rim >= static_cast<long long>(g.nx()) || iy >= g.ny())
    throw ValidationError("phantom rim lies outside the grid");
  const std::size_t window = static_cast<std::size_t>(std::ceil(sw.rim_window_m / g.dx()));

  std::vector<IntensityImage> coherent;
  for (double r2 : sw.r2_m) {
    const EffectiveGeometry eg = effective_geometry(sw.r1_m, r2);
    const IntensityImage obj = extract_intensity(fresnel_propagate(exit, eg.distance_m));
    const Grid2D det(g.nx(), g.ny(), eg.magnification * g.dx(), eg.magnification * g.dy());
    coherent.emplace_back(det, obj.values());
  }
  std::vector<SweepCell> cells;
  for (double d : sw.source_diameters_m)
    for (std::size_t j = 0; j < sw.r2_m.size(); ++j) {
      const double r2 = sw.r2_m[j];
      IntensityImage img = penumbral_blur(coherent[j], d, sw.r1_m, r2, shape_of(sw.shape));
      const RimFringe f = rim_fringe(img, 1.0, iy, static_cast<std::size_t>(rim), window,
                                     sw.fringe_threshold);
      cells.push_back({d, r2, effective_geometry(sw.r1_m, r2).magnification,
                       penumbral_width(d, sw.r1_m, r2), f, std::move(img)});
    }
  return cells;
}

} // namespace xpci
