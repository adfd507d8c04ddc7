#include "xpci/retrieval.hpp"

#include "xpci/diagnostics.hpp"
#include "xpci/errors.hpp"
#include "xpci/fft.hpp"
#include "xpci/kernels.hpp"

#include <cmath>
#include <sstream>

namespace xpci {
namespace {

// |T|² below this counts as a transfer-function zero.
constexpr double kZeroDenominator = 1e-24;

} // namespace

void RetrievalConfig::validate() const {
  if (!(mu_per_m > 0.0)) throw ValidationError("retrieval: mu must be > 0");
  if (!(distance_m >= 0.0)) throw ValidationError("retrieval: distance must be >= 0");
  if (!(delta >= 0.0)) throw ValidationError("retrieval: delta must be >= 0");
  if (!(wavelength_m > 0.0)) throw ValidationError("retrieval: wavelength must be > 0");
  if (!(i0 > 0.0)) throw ValidationError("retrieval: flat-field intensity must be > 0");
  if (!(regularization >= 0.0)) throw ValidationError("retrieval: regularization must be >= 0");
  if (!(floor_fraction > 0.0)) throw ValidationError("retrieval: floor fraction must be > 0");
}

PaganinResult paganin_retrieve(const IntensityImage& intensity, const RetrievalConfig& cfg) {
  cfg.validate();
  const Grid2D& g = intensity.grid();
  std::vector<cplx> spec(intensity.values().begin(), intensity.values().end());
  const double coeff = cfg.filter_coefficient();

  std::vector<double> normalised(g.size());
  if (coeff == 0.0) {
    for (std::size_t i = 0; i < g.size(); ++i) normalised[i] = intensity.values()[i] / cfg.i0;
  } else {
    fft::forward_2d(g, spec);
    auto filter = fft::k_squared(g);
    for (double& v : filter) v = 1.0 / (cfg.i0 * (1.0 + coeff * v));
    kernels::active().multiply_real(spec, filter);
    fft::inverse_2d(g, spec);
    for (std::size_t i = 0; i < g.size(); ++i) normalised[i] = spec[i].real();
  }

  std::size_t floored = 0;
  std::vector<double> thickness(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    double v = normalised[i];
    if (!(v >= cfg.floor_fraction)) {
      v = cfg.floor_fraction;
      ++floored;
    }
    thickness[i] = -std::log(v) / cfg.mu_per_m;
  }
  if (floored > 0)
    diag::warn("paganin-floor", std::to_string(floored) +
                                    " filtered intensities were raised to the floor before the log");
  return PaganinResult{RealMap(g, std::move(thickness)), floored};
}

ComplexField schiske_combine(std::span<const ComplexField> outputs,
                             std::span<const TransferFunction> systems, double regularization) {
  if (outputs.empty()) throw ValidationError("schiske_combine: need at least one image");
  if (outputs.size() != systems.size())
    throw ValidationError("schiske_combine: " + std::to_string(outputs.size()) + " images but " +
                          std::to_string(systems.size()) + " transfer functions");
  if (!(regularization >= 0.0)) throw ValidationError("regularization must be >= 0");
  const Grid2D& g = outputs.front().grid();
  const double lambda = outputs.front().wavelength();
  for (const auto& o : outputs)
    if (!(o.grid() == g) || o.wavelength() != lambda)
      throw ValidationError("schiske_combine: images must share one grid and wavelength");

  const auto& k = kernels::active();
  std::vector<cplx> numerator(g.size());
  std::vector<double> denominator(g.size());
  for (std::size_t j = 0; j < outputs.size(); ++j) {
    const auto t = systems[j].sample(g, lambda);
    std::vector<cplx> spec = outputs[j].values();
    fft::forward_2d(g, spec);
    k.accumulate_conj_product(t, spec, numerator);
    k.accumulate_norm_sq(t, 1.0, denominator);
  }

  if (regularization == 0.0) {
    std::ostringstream zeros;
    std::size_t count = 0;
    for (std::size_t iy = 0; iy < g.ny(); ++iy)
      for (std::size_t ix = 0; ix < g.nx(); ++ix)
        if (denominator[g.index(ix, iy)] < kZeroDenominator) {
          if (count < 8) zeros << " (" << g.kx(ix) << ", " << g.ky(iy) << ")";
          ++count;
        }
    if (count > 0) {
      std::ostringstream msg;
      msg << "transfer functions vanish at " << count << " spatial frequencies (kx, ky rad/m):"
          << zeros.str() << (count > 8 ? " ..." : "")
          << "; regularise or increase the number of different states of the imaging system";
      throw NumericalError(msg.str());
    }
  }

  for (double& d : denominator) d = 1.0 / (d + regularization);
  k.multiply_real(numerator, denominator);
  fft::inverse_2d(g, numerator);
  return ComplexField(g, lambda, std::move(numerator));
}

ComplexField invert_transfer_single(const ComplexField& output, const TransferFunction& t,
                                    double regularization) {
  return schiske_combine(std::span(&output, 1), std::span(&t, 1), regularization);
}

} // namespace xpci
