// Command-line front end. Every subcommand writes its outputs plus a run
// manifest; exit codes are 0 (success), 2 (invalid input), 3 (numerical).

#include "xpci/coherence.hpp"
#include "xpci/config.hpp"
#include "xpci/curve_io.hpp"
#include "xpci/errors.hpp"
#include "xpci/gradient.hpp"
#include "xpci/pipeline.hpp"
#include "xpci/propagation.hpp"
#include "xpci/raster_io.hpp"
#include "xpci/retrieval.hpp"
#include "xpci/sample.hpp"
#include "xpci/tie.hpp"
#include "xpci/tomo.hpp"
#include "xpci/version.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <numbers>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace xpci;

namespace {

struct Run {
  std::vector<std::string> argv;
  CLI::App* command = nullptr;
  std::vector<fs::path> inputs;
  std::vector<fs::path> outputs;
  std::optional<std::uint64_t> seed;
  json results = json::object();
  std::string manifest;
};

Run g_run;

fs::path input(const std::string& p) {
  g_run.inputs.emplace_back(p);
  return p;
}

fs::path output(const fs::path& p) {
  g_run.outputs.push_back(p);
  return p;
}

void write_manifest(double wall_s) {
  if (g_run.outputs.empty() && g_run.manifest.empty()) return;
  fs::path path = g_run.manifest;
  if (path.empty()) {
    path = g_run.outputs.front();
    path += ".manifest.json";
  }
  json m;
  m["toolkit"] = "xpci";
  m["version"] = kVersion;
  m["command"] = g_run.command->get_name();
  m["argv"] = g_run.argv;
  json params = json::object();
  for (const CLI::Option* opt : g_run.command->get_options()) {
    if (opt->get_name() == "--help" || opt->get_name().empty()) continue;
    const auto& res = opt->results();
    std::string key = opt->get_name();
    while (!key.empty() && key.front() == '-') key.erase(key.begin());
    if (opt->get_expected_max() > 1)
      params[key] = res;
    else if (!res.empty())
      params[key] = res.back();
    else if (opt->get_expected_min() == 0)
      params[key] = false;
  }
  m["parameters"] = params;
  if (g_run.seed) m["seed"] = *g_run.seed;
  auto hashes = [](const std::vector<fs::path>& files, bool with_sidecar) {
    json a = json::array();
    for (const auto& f : files) {
      json e = {{"path", f.string()}};
      if (fs::exists(f)) e["crc32"] = io::file_crc32(f);
      if (with_sidecar && fs::exists(io::sidecar_path(f)))
        e["sidecar_crc32"] = io::file_crc32(io::sidecar_path(f));
      a.push_back(e);
    }
    return a;
  };
  m["inputs"] = hashes(g_run.inputs, true);
  m["outputs"] = hashes(g_run.outputs, true);
  m["results"] = g_run.results;
  m["wall_time_s"] = wall_s;
  io::write_text_atomic(path, m.dump(2) + "\n");
}

io::WriteOptions with_seed(std::string modality) {
  io::WriteOptions o;
  o.modality = std::move(modality);
  o.seed = g_run.seed;
  return o;
}

Derivative parse_derivative(const std::string& s) {
  if (s == "spectral") return Derivative::spectral;
  if (s == "fd" || s == "finite_difference") return Derivative::finite_difference;
  throw ValidationError("--mode must be spectral or fd");
}

// ---------------------------------------------------------------- commands

struct PropagateOpts {
  std::string in, out, intensity_out;
  double delta_m = 0.0;
  bool padded = false;
};

void cmd_propagate(const PropagateOpts& o) {
  const ComplexField f = io::read_field(input(o.in));
  const ComplexField g =
      fresnel_propagate(f, o.delta_m, o.padded ? Boundary::zero_pad_2x : Boundary::periodic);
  io::write_field(output(o.out), g, with_seed("field"));
  if (!o.intensity_out.empty())
    io::write_intensity(output(o.intensity_out), extract_intensity(g), g.wavelength(),
                        with_seed("intensity"));
}

struct GridOpts {
  std::size_t nx = 256, ny = 256;
  double dx_m = 1e-6;
};

struct TransmitOpts {
  GridOpts grid;
  std::string in, thickness_in, out;
  double lambda_m = 0.0, diameter_m = 0.0, delta = 0.0, beta = 0.0;
};

void cmd_transmit(const TransmitOpts& o) {
  std::optional<ComplexField> f;
  if (!o.in.empty()) f = io::read_field(input(o.in));
  const double lambda = f ? f->wavelength() : o.lambda_m;
  if (!(lambda > 0.0)) throw ValidationError("--lambda_m is required without --in");
  const Grid2D g = f ? f->grid() : Grid2D(o.grid.nx, o.grid.ny, o.grid.dx_m, o.grid.dx_m);
  const Material m{o.delta, o.beta, lambda};
  ProjectedObject p = [&] {
    if (!o.thickness_in.empty()) {
      const RealMap t = io::read_real_map(input(o.thickness_in));
      if (!(t.grid() == g)) throw ValidationError("thickness raster grid differs from the field");
      return project_thickness(t, m);
    }
    if (!(o.diameter_m > 0.0)) throw ValidationError("give --thickness_in or --diameter_m");
    return sphere_phantom(g, o.diameter_m, m);
  }();
  const ComplexField in = f ? *f : ComplexField::constant(g, lambda);
  io::write_field(output(o.out), apply_sample(in, transmission_function(p)), with_seed("field"));
}

struct MultisliceOpts {
  GridOpts grid;
  std::string in, out;
  double lambda_m = 0.0, diameter_m = 0.0, delta = 0.0, beta = 0.0;
  std::size_t slices = 16;
};

void cmd_multislice(const MultisliceOpts& o) {
  std::optional<ComplexField> f;
  if (!o.in.empty()) f = io::read_field(input(o.in));
  const double lambda = f ? f->wavelength() : o.lambda_m;
  if (!(lambda > 0.0)) throw ValidationError("--lambda_m is required without --in");
  const Grid2D g = f ? f->grid() : Grid2D(o.grid.nx, o.grid.ny, o.grid.dx_m, o.grid.dx_m);
  if (g.dx() != g.dy()) throw ValidationError("multislice phantom needs square pixels");
  if (o.slices == 0) throw ValidationError("--slices must be >= 1");
  const double dz = o.diameter_m / static_cast<double>(o.slices);
  const RefractiveVolume v =
      sphere_volume(g.nx(), g.ny(), o.slices, g.dx(), dz, o.diameter_m, o.delta, o.beta);
  const ComplexField in = f ? *f : ComplexField::constant(g, lambda);
  io::write_field(output(o.out), multislice(in, v), with_seed("field"));
}

struct TieOpts {
  std::string intensity, phase, out, didz_out, mode = "spectral";
  double lambda_m = 0.0, dz_m = 0.0;
};

void cmd_tie(const TieOpts& o) {
  const IntensityImage i = io::read_intensity(input(o.intensity));
  const RealMap ph = io::read_real_map(input(o.phase));
  if (!(i.grid() == ph.grid())) throw ValidationError("intensity and phase grids differ");
  if (!(o.lambda_m > 0.0)) throw ValidationError("--lambda_m must be > 0");
  const double k = 2.0 * std::numbers::pi / o.lambda_m;
  const PhaseMap phase(ph.grid(), ph.values());
  const Derivative mode = parse_derivative(o.mode);
  const TieForwardResult r = tie_forward(i, phase, k, o.dz_m, mode);
  io::write_intensity(output(o.out), r.intensity, o.lambda_m, with_seed("intensity"));
  if (!o.didz_out.empty()) {
    const TieTerms t = tie_terms(i, phase, k, mode);
    io::write_real(output(o.didz_out), t.didz.grid(), t.didz.values(), o.lambda_m,
                   with_seed("didz"));
  }
  g_run.results["clamped_pixels"] = r.clamped_pixels;
}

struct PaganinOpts {
  std::string in, out;
  RetrievalConfig cfg;
};

void cmd_paganin(const PaganinOpts& o) {
  const IntensityImage i = io::read_intensity(input(o.in));
  const PaganinResult r = paganin_retrieve(i, o.cfg);
  io::write_real(output(o.out), r.thickness.grid(), r.thickness.values(), o.cfg.wavelength_m,
                 with_seed("thickness"));
  g_run.results["floored_pixels"] = r.floored_pixels;
}

struct SchiskeOpts {
  std::vector<std::string> in;
  std::vector<double> distance_m;
  std::string out;
  double regularization = 0.0;
};

void cmd_schiske(const SchiskeOpts& o) {
  if (o.in.empty() || o.in.size() != o.distance_m.size())
    throw ValidationError("give one --distance_m per --in field");
  std::vector<ComplexField> fields;
  std::vector<TransferFunction> systems;
  for (std::size_t j = 0; j < o.in.size(); ++j) {
    fields.push_back(io::read_field(input(o.in[j])));
    systems.push_back(TransferFunction::free_space(o.distance_m[j]));
  }
  io::write_field(output(o.out), schiske_combine(fields, systems, o.regularization),
                  with_seed("field"));
}

struct CoherenceOpts {
  std::string config;
};

void cmd_coherence(const CoherenceOpts& o) {
  const config::ExperimentConfig cfg = config::load(input(o.config));
  g_run.seed = cfg.seed;
  const fs::path dir = cfg.output_directory;
  fs::create_directories(dir);
  const double lambda = cfg.source.bins.front().wavelength_m;
  g_run.results["config"] = config::to_json(cfg);
  if (cfg.sweep) {
    json cells = json::array();
    for (const SweepCell& c : run_fringe_sweep(cfg)) {
      char name[128];
      std::snprintf(name, sizeof name, "%s_D%.0fum_R2%.0fcm.raw", cfg.output_prefix.c_str(),
                    c.source_diameter_m * 1e6, c.r2_m * 1e2);
      io::WriteOptions wo = with_seed("intensity");
      wo.extra = {{"source_diameter_m", c.source_diameter_m}, {"r2_m", c.r2_m}};
      io::write_intensity(output(dir / name), c.image, lambda, wo);
      cells.push_back({{"source_diameter_m", c.source_diameter_m},
                       {"r2_m", c.r2_m},
                       {"magnification", c.magnification},
                       {"blur_width_m", c.blur_width_m},
                       {"overshoot", c.fringe.overshoot},
                       {"undershoot", c.fringe.undershoot},
                       {"fringe", c.fringe.detected},
                       {"image", name}});
      std::cout << "D=" << c.source_diameter_m * 1e6 << "um R2=" << c.r2_m * 1e2
                << "cm overshoot=" << c.fringe.overshoot
                << (c.fringe.detected ? " fringe" : " no-fringe") << "\n";
    }
    g_run.results["sweep"] = cells;
    return;
  }
  const ExperimentResult r = run_experiment(cfg);
  io::write_intensity(output(dir / (cfg.output_prefix + "_intensity.raw")), r.detected, lambda,
                      with_seed("intensity"));
  if (r.thickness)
    io::write_real(output(dir / (cfg.output_prefix + "_thickness.raw")), r.thickness->grid(),
                   r.thickness->values(), lambda, with_seed("thickness"));
  g_run.results["flat_field"] = r.flat_field;
}

struct GradientOpts {
  std::string mode, curve, lo, hi, reference, measured, out, out_shift, a0_map, shift_map;
  double i0 = 1.0, theta0 = 0.0, theta_lo = 0.0, theta_hi = 0.0;
  double a0 = 1.0, shift_rad = 0.0, width_rad = 0.0, regularization = -1.0;
  std::string shape = "gaussian";
};

KernelShape parse_shape(const std::string& s) {
  if (s == "gaussian") return KernelShape::gaussian;
  if (s == "uniform") return KernelShape::uniform;
  throw ValidationError("--shape must be gaussian or uniform");
}

void cmd_gradient(const GradientOpts& o) {
  const AngularKernel kern{o.a0, o.shift_rad, o.width_rad, parse_shape(o.shape)};
  if (o.mode == "forward") {
    const RockingCurve c = io::read_rocking_curve(input(o.curve));
    if (!o.a0_map.empty()) {
      const RealMap a0 = io::read_real_map(input(o.a0_map));
      const RealMap sh = io::read_real_map(input(o.shift_map));
      io::write_intensity(output(o.out), geometric_forward_image(o.i0, c, o.theta0, a0, sh),
                          std::nullopt, with_seed("intensity"));
      return;
    }
    const double i = scatter_forward(o.i0, c, o.theta0, kern);
    g_run.results["intensity"] = i;
    std::printf("%.17g\n", i);
  } else if (o.mode == "convolve") {
    const AngularProfile ref = io::read_profile(input(o.reference));
    io::write_profile(output(o.out), convolution_forward(ref, kern), "theta_rad intensity");
  } else if (o.mode == "dei") {
    const RockingCurve c = io::read_rocking_curve(input(o.curve));
    const DeiResult r = dei_two_image(io::read_intensity(input(o.lo)),
                                      io::read_intensity(input(o.hi)), o.i0, c, o.theta_lo,
                                      o.theta_hi);
    if (o.out_shift.empty()) throw ValidationError("dei mode needs --out_shift");
    const Grid2D& g = r.attenuation.grid();
    io::write_real(output(o.out), g, r.attenuation.values(), std::nullopt, with_seed("attenuation"));
    io::write_real(output(o.out_shift), g, r.shift_rad.values(), std::nullopt, with_seed("shift_rad"));
    std::size_t invalid = 0;
    for (auto v : r.valid) invalid += v == 0;
    g_run.results["invalid_pixels"] = invalid;
  } else if (o.mode == "deconvolve") {
    const DeconvolutionResult r = deconvolution_retrieve(io::read_profile(input(o.measured)),
                                                         io::read_profile(input(o.reference)),
                                                         o.regularization);
    io::write_profile(output(o.out), r.kernel, "lag_rad kernel");
    g_run.results["attenuation"] = r.moments.attenuation;
    g_run.results["shift_rad"] = r.moments.shift_rad;
    g_run.results["width_rad"] = r.moments.width_rad;
    std::printf("a0=%.9g shift_rad=%.9g width_rad=%.9g\n", r.moments.attenuation,
                r.moments.shift_rad, r.moments.width_rad);
  } else {
    throw ValidationError("--mode must be forward, convolve, dei or deconvolve");
  }
}

struct TomoForwardOpts {
  std::size_t n = 128, ny = 1, angles = 180;
  double dx_m = 1e-6, radius_m = 0.0, delta = 0.0, beta = 0.0, lambda_m = 0.0;
  std::string modality = "attenuation_log", out;
  std::optional<double> distance_m, counts;
  std::uint64_t seed = 0;
};

void cmd_tomo_forward(const TomoForwardOpts& o) {
  const RefractiveVolume v = cylinder_volume(o.n, o.ny, o.dx_m, o.radius_m, o.delta, o.beta);
  ForwardOptions fo;
  fo.distance_m = o.distance_m;
  if (o.counts) fo.noise = PoissonNoise{*o.counts, o.seed};
  g_run.seed = o.seed;
  const std::vector<double> angles = uniform_angles(o.angles);
  const Sinogram s = forward_sinogram(v, o.lambda_m, angles, parse_modality(o.modality), fo);
  io::write_sinogram(output(o.out), s, with_seed(""));
}

struct TomoReconOpts {
  std::string in, out;
  bool hann = false, paganin = false;
  std::size_t row = 0;
  RetrievalConfig cfg;
  std::string quantity = "mu";
};

void cmd_tomo_recon(const TomoReconOpts& o) {
  const Sinogram s = io::read_sinogram(input(o.in));
  const FbpOptions fo{o.hann, o.row};
  ReconSlice r = [&] {
    if (!o.paganin) return fbp_reconstruct(s, fo);
    RetrievalConfig cfg = o.cfg;
    cfg.distance_m = s.distance_m;
    cfg.wavelength_m = s.wavelength_m;
    if (o.quantity != "mu" && o.quantity != "delta")
      throw ValidationError("--quantity must be mu or delta");
    return paganin_fbp(s, cfg, o.quantity == "mu" ? ReconQuantity::mu : ReconQuantity::delta, fo);
  }();
  io::write_real(output(o.out), r.values.grid(), r.values.values(), s.wavelength_m,
                 with_seed(r.quantity == ReconQuantity::mu ? "mu_per_m" : "delta"));
}

struct ValidityOpts {
  double a_m = 0.0, t_m = 0.0, lambda_m = 0.0, magnification = 1.0;
};

void cmd_validity(const ValidityOpts& o) {
  const FresnelNumber nf = fresnel_number(o.a_m, o.t_m, o.lambda_m, o.magnification);
  const char* verdict = nf.verdict == Validity::valid      ? "valid"
                        : nf.verdict == Validity::marginal ? "marginal"
                                                           : "invalid";
  std::printf("N_F = %.6g\nverdict: %s\n", nf.value, verdict);
  g_run.results["fresnel_number"] = nf.value;
  g_run.results["verdict"] = verdict;
}

void add_grid(CLI::App* c, GridOpts& g) {
  c->add_option("--nx", g.nx, "grid columns")->capture_default_str();
  c->add_option("--ny", g.ny, "grid rows")->capture_default_str();
  c->add_option("--dx_m", g.dx_m, "pixel pitch (m)")->capture_default_str();
}

void add_retrieval(CLI::App* c, RetrievalConfig& cfg, bool with_geometry) {
  c->add_option("--delta", cfg.delta, "material delta");
  c->add_option("--mu_per_m", cfg.mu_per_m, "linear attenuation coefficient (1/m)");
  if (with_geometry) {
    c->add_option("--distance_m", cfg.distance_m, "propagation distance (m)");
    c->add_option("--lambda_m", cfg.wavelength_m, "wavelength (m)");
  }
  c->add_option("--i0", cfg.i0, "flat-field intensity")->capture_default_str();
  c->add_option("--floor", cfg.floor_fraction, "intensity floor relative to I0")
      ->capture_default_str();
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"X-ray phase-contrast imaging toolkit"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);
  g_run.argv.assign(argv, argv + argc);
  std::string manifest;
  app.add_option("--manifest", manifest, "run manifest path (default: <first output>.manifest.json)");

  std::function<void()> action;

  PropagateOpts prop;
  auto* c = app.add_subcommand("propagate", "Fresnel free-space propagation of a field");
  c->add_option("--in", prop.in, "input field raster")->required();
  c->add_option("--out", prop.out, "output field raster")->required();
  c->add_option("--delta_m", prop.delta_m, "propagation distance (m)")->required();
  c->add_flag("--padded", prop.padded, "2x zero-padded boundary");
  c->add_option("--intensity_out", prop.intensity_out, "also write the detected intensity |psi|^2");
  c->callback([&] { action = [&] { cmd_propagate(prop); }; });

  TransmitOpts tr;
  c = app.add_subcommand("transmit", "apply a projected sample to a field");
  add_grid(c, tr.grid);
  c->add_option("--in", tr.in, "input field (default: unit plane wave)");
  c->add_option("--thickness_in", tr.thickness_in, "thickness raster (m)");
  c->add_option("--diameter_m", tr.diameter_m, "sphere phantom diameter (m)");
  c->add_option("--lambda_m", tr.lambda_m, "wavelength (m)");
  c->add_option("--delta", tr.delta, "material delta")->required();
  c->add_option("--beta", tr.beta, "material beta")->required();
  c->add_option("--out", tr.out, "output field raster")->required();
  c->callback([&] { action = [&] { cmd_transmit(tr); }; });

  MultisliceOpts ms;
  c = app.add_subcommand("multislice", "multi-slice propagation through a sphere phantom");
  add_grid(c, ms.grid);
  c->add_option("--in", ms.in, "input field (default: unit plane wave)");
  c->add_option("--lambda_m", ms.lambda_m, "wavelength (m)");
  c->add_option("--diameter_m", ms.diameter_m, "sphere diameter (m)")->required();
  c->add_option("--delta", ms.delta, "material delta")->required();
  c->add_option("--beta", ms.beta, "material beta")->required();
  c->add_option("--slices", ms.slices, "number of slices")->capture_default_str();
  c->add_option("--out", ms.out, "output field raster")->required();
  c->callback([&] { action = [&] { cmd_multislice(ms); }; });

  TieOpts tie;
  c = app.add_subcommand("tie", "transport-of-intensity forward step");
  c->add_option("--intensity", tie.intensity, "intensity raster")->required();
  c->add_option("--phase", tie.phase, "phase raster (rad)")->required();
  c->add_option("--lambda_m", tie.lambda_m, "wavelength (m)")->required();
  c->add_option("--dz_m", tie.dz_m, "propagation step (m)")->required();
  c->add_option("--mode", tie.mode, "spectral or fd")->capture_default_str();
  c->add_option("--out", tie.out, "predicted intensity raster")->required();
  c->add_option("--didz_out", tie.didz_out, "optional dI/dz raster");
  c->callback([&] { action = [&] { cmd_tie(tie); }; });

  PaganinOpts pg;
  c = app.add_subcommand("retrieve-paganin", "single-image single-material thickness retrieval");
  c->add_option("--in", pg.in, "intensity raster")->required();
  c->add_option("--out", pg.out, "thickness raster (m)")->required();
  add_retrieval(c, pg.cfg, true);
  c->callback([&] { action = [&] { cmd_paganin(pg); }; });

  SchiskeOpts sk;
  c = app.add_subcommand("retrieve-schiske", "multi-distance field recovery");
  c->add_option("--in", sk.in, "output field rasters")->required();
  c->add_option("--distance_m", sk.distance_m, "propagation distance of each field")->required();
  c->add_option("--regularization", sk.regularization, "Tikhonov constant")->capture_default_str();
  c->add_option("--out", sk.out, "recovered field raster")->required();
  c->callback([&] { action = [&] { cmd_schiske(sk); }; });

  CoherenceOpts co;
  c = app.add_subcommand("coherence", "partially coherent pipeline or fringe sweep from a config");
  c->add_option("--config", co.config, "experiment JSON")->required();
  c->callback([&] { action = [&] { cmd_coherence(co); }; });

  GradientOpts gr;
  c = app.add_subcommand("gradient", "angular-filter phase-gradient models");
  c->add_option("--mode", gr.mode, "forward | convolve | dei | deconvolve")->required();
  c->add_option("--curve", gr.curve, "rocking curve (two columns)");
  c->add_option("--reference", gr.reference, "reference angular profile");
  c->add_option("--measured", gr.measured, "measured angular profile");
  c->add_option("--lo", gr.lo, "image at theta_lo");
  c->add_option("--hi", gr.hi, "image at theta_hi");
  c->add_option("--a0_map", gr.a0_map, "attenuation raster (forward images)");
  c->add_option("--shift_map", gr.shift_map, "deflection raster (rad)");
  c->add_option("--i0", gr.i0, "flat-field intensity")->capture_default_str();
  c->add_option("--theta0_rad", gr.theta0, "working angle (rad)");
  c->add_option("--theta_lo_rad", gr.theta_lo, "low-flank angle (rad)");
  c->add_option("--theta_hi_rad", gr.theta_hi, "high-flank angle (rad)");
  c->add_option("--a0", gr.a0, "kernel attenuation")->capture_default_str();
  c->add_option("--shift_rad", gr.shift_rad, "kernel shift (rad)");
  c->add_option("--width_rad", gr.width_rad, "kernel standard deviation (rad)");
  c->add_option("--shape", gr.shape, "gaussian or uniform")->capture_default_str();
  c->add_option("--regularization", gr.regularization, "deconvolution constant (<0: default)");
  c->add_option("--out", gr.out, "output file");
  c->add_option("--out_shift", gr.out_shift, "dei: deflection raster");
  c->callback([&] { action = [&] { cmd_gradient(gr); }; });

  TomoForwardOpts tf;
  c = app.add_subcommand("tomo-forward", "sinogram of a cylinder phantom");
  c->add_option("--n", tf.n, "slice size (pixels)")->capture_default_str();
  c->add_option("--ny", tf.ny, "rows per projection")->capture_default_str();
  c->add_option("--dx_m", tf.dx_m, "pixel pitch (m)")->capture_default_str();
  c->add_option("--radius_m", tf.radius_m, "cylinder radius (m)")->required();
  c->add_option("--delta", tf.delta, "material delta");
  c->add_option("--beta", tf.beta, "material beta");
  c->add_option("--lambda_m", tf.lambda_m, "wavelength (m)")->required();
  c->add_option("--angles", tf.angles, "angles over [0, pi)")->capture_default_str();
  c->add_option("--modality", tf.modality, "attenuation_log | phase | propagated_intensity")
      ->capture_default_str();
  c->add_option("--distance_m", tf.distance_m, "propagation distance (propagated_intensity)");
  c->add_option("--counts", tf.counts, "Poisson mean counts per unit intensity");
  c->add_option("--seed", tf.seed, "noise seed")->capture_default_str();
  c->add_option("--out", tf.out, "sinogram raster")->required();
  c->callback([&] { action = [&] { cmd_tomo_forward(tf); }; });

  TomoReconOpts rc;
  c = app.add_subcommand("tomo-recon", "filtered back-projection");
  c->add_option("--in", rc.in, "sinogram raster")->required();
  c->add_option("--out", rc.out, "slice raster")->required();
  c->add_flag("--hann", rc.hann, "Hann apodisation");
  c->add_option("--row", rc.row, "sinogram row")->capture_default_str();
  c->add_flag("--paganin", rc.paganin, "Paganin retrieval before FBP");
  c->add_option("--quantity", rc.quantity, "mu or delta (with --paganin)")->capture_default_str();
  add_retrieval(c, rc.cfg, false);
  c->callback([&] { action = [&] { cmd_tomo_recon(rc); }; });

  ValidityOpts va;
  c = app.add_subcommand("validity", "Fresnel-number check of the projection approximation");
  c->add_option("--a_m", va.a_m, "feature size (m)")->required();
  c->add_option("--t_m", va.t_m, "length (m)")->required();
  c->add_option("--lambda_m", va.lambda_m, "wavelength (m)")->required();
  c->add_option("--magnification", va.magnification, "geometric magnification")
      ->capture_default_str();
  c->callback([&] { action = [&] { cmd_validity(va); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }
  g_run.command = app.get_subcommands().front();
  g_run.manifest = manifest;

  const auto start = std::chrono::steady_clock::now();
  try {
    action();
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    write_manifest(wall);
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 3;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
