#pragma once

// Declarative experiment description (JSON). Every object rejects unknown
// keys and physical quantities carry their SI unit in the key name.

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace xpci::config {

struct GridSpec {
  std::size_t nx = 0, ny = 0;
  double dx_m = 0.0, dy_m = 0.0;
};

struct SpectralBin {
  double wavelength_m = 0.0;
  double efficiency = 1.0; ///< detector efficiency of the bin
  double amplitude = 1.0;  ///< source amplitude of the bin's modes
};

struct SourceSpec {
  std::string model = "plane_wave"; ///< plane_wave | tilted_plane_waves | random_phase_screen
  double cone_half_angle_rad = 0.0;
  double correlation_length_m = 0.0;
  double rms_phase_rad = 0.0;
  std::size_t modes = 1;
  std::vector<SpectralBin> bins;
};

/// Solid sphere; δ and β are used unchanged at every wavelength bin.
struct PhantomSpec {
  double diameter_m = 0.0;
  double delta = 0.0;
  double beta = 0.0;
  double centre_x_m = 0.0;
  double centre_y_m = 0.0;
};

struct StageSpec {
  std::string type; ///< sample | free_space | analyser
  double distance_m = 0.0;
  std::string profile_file; ///< analyser: two-column text, angular frequency (rad/m) vs amplitude
  std::string axis = "x";
};

struct BlurSpec {
  double source_diameter_m = 0.0;
  double r1_m = 0.0;
  double r2_m = 0.0;
  std::string shape = "disc";
};

struct RetrievalSpec {
  double delta = 0.0;
  double mu_per_m = 0.0;
  double distance_m = 0.0;
  double regularization = 0.0;
};

/// Source-size × detector-distance grid of blurred propagation images.
struct SweepSpec {
  std::vector<double> source_diameters_m;
  std::vector<double> r2_m;
  double r1_m = 0.1;
  double fringe_threshold = 0.035; ///< relative overshoot above I0 counted as a fringe
  double rim_window_m = 100e-6;
  std::string shape = "disc";
};

struct ExperimentConfig {
  std::uint64_t seed = 0;
  GridSpec grid;
  SourceSpec source;
  std::optional<PhantomSpec> phantom;
  std::vector<StageSpec> stages;
  std::optional<BlurSpec> blur;
  std::optional<RetrievalSpec> retrieval;
  std::optional<SweepSpec> sweep;
  std::string output_directory = ".";
  std::string output_prefix = "run";
};

/// Throws SchemaError naming the offending key path (e.g. "source.bins[1].wavelength_m").
ExperimentConfig parse(const nlohmann::json& j);
ExperimentConfig load(const std::filesystem::path& path);
nlohmann::json to_json(const ExperimentConfig& c);

} // namespace xpci::config
