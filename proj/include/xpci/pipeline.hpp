#pragma once

// End-to-end runs assembled from an ExperimentConfig: the partially coherent
// imaging pipeline and the source-size / distance fringe sweep.

#include "xpci/coherence.hpp"
#include "xpci/config.hpp"
#include "xpci/field.hpp"

#include <optional>
#include <vector>

namespace xpci {

struct ExperimentResult {
  IntensityImage detected;
  /// Detected intensity of the same source without any stage, used as I0.
  double flat_field;
  std::optional<RealMap> thickness; ///< present when a retrieval section is given
};

ExperimentResult run_experiment(const config::ExperimentConfig& cfg);

struct RimFringe {
  double overshoot;  ///< (max - I0)/I0 within the window
  double undershoot; ///< (I0 - min)/I0 within the window
  bool detected;
};

/// Looks for a local maximum above I0·(1 + threshold) next to a minimum at
/// least 2·threshold·I0 deeper, within window_px of rim_ix on row iy.
RimFringe rim_fringe(const IntensityImage& image, double i0, std::size_t iy, std::size_t rim_ix,
                     std::size_t window_px, double threshold);

struct SweepCell {
  double source_diameter_m;
  double r2_m;
  double magnification;
  double blur_width_m; ///< penumbral width in the detector plane
  RimFringe fringe;
  IntensityImage image; ///< detector-plane image (pitch M·dx), flat field 1
};

/// Coherent plane-wave image of the phantom at the effective distance R2/M,
/// rescaled to the detector and blurred by the source; one cell per (D, R2).
/// Cells are ordered by source diameter, then R2.
std::vector<SweepCell> run_fringe_sweep(const config::ExperimentConfig& cfg);

} // namespace xpci
