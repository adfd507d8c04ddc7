#pragma once

// Fresnel free-space propagation and linear shift-invariant imaging systems
// described by transfer functions acting on the Fourier transform of a field.

#include "xpci/field.hpp"

#include <functional>
#include <variant>
#include <vector>

namespace xpci {

enum class Axis { x, y };

enum class Boundary {
  periodic,   ///< native wrap-around model
  zero_pad_2x ///< embed in a 2x zero-padded grid, propagate, crop
};

/// e^{ikΔ}·exp[-iΔ(kx²+ky²)/(2k)], a unimodular filter.
struct FreeSpace {
  double distance_m;
};

/// A(k) along one Fourier axis, constant along the other.
/// profile[m] is the value at Fourier storage index m of that axis.
struct Analyser {
  std::vector<cplx> profile;
  Axis axis;
};

/// Arbitrary filter sampled on a specific grid's Fourier lattice
/// (storage order, DC at index 0).
struct CustomTransfer {
  Grid2D grid;
  std::vector<cplx> samples;
};

class TransferFunction {
public:
  using Kind = std::variant<FreeSpace, Analyser, CustomTransfer>;

  static TransferFunction free_space(double distance_m);
  static TransferFunction identity() { return free_space(0.0); }
  /// Throws ValidationError if samples.size() != grid.size().
  static TransferFunction custom(Grid2D grid, std::vector<cplx> samples);
  /// Unchecked; prefer analyser_transfer, which validates against a grid.
  static TransferFunction analyser(std::vector<cplx> profile, Axis axis);

  const Kind& kind() const { return kind_; }

  /// Samples t(kx, ky) over grid's Fourier lattice for a field of the given
  /// wavelength. Throws ValidationError if a sampled kind does not fit grid.
  std::vector<cplx> sample(const Grid2D& grid, double wavelength_m) const;

  /// True when the filter is exactly 1 everywhere (free space with Δ = 0).
  bool is_identity() const;

private:
  explicit TransferFunction(Kind kind) : kind_(std::move(kind)) {}
  Kind kind_;
};

/// e^{ikΔ} with the distance reduced modulo λ before scaling, so the carrier
/// phase stays accurate at macroscopic distances.
cplx free_space_carrier(double distance_m, double wavelength_m);

/// Value of the free-space filter at one angular frequency.
cplx free_space_filter(double kx, double ky, double distance_m, double wavelength_m);

/// Stages applied in list order: stages[0] acts on the input first.
struct LinearSystem {
  std::vector<TransferFunction> stages;
};

ComplexField fresnel_propagate(const ComplexField& f, double distance_m,
                               Boundary boundary = Boundary::periodic);
ComplexField apply_transfer(const ComplexField& f, const TransferFunction& t);

LinearSystem compose(std::vector<TransferFunction> stages);
ComplexField apply_system(const ComplexField& f, const LinearSystem& system);
/// Pointwise product of every stage filter.
std::vector<cplx> system_filter(const LinearSystem& system, const Grid2D& grid,
                                double wavelength_m);

/// Analyser-crystal style system: t(kx, ky) = A(k_axis).
/// profile.size() must equal the grid dimension along axis.
TransferFunction analyser_transfer(const Grid2D& grid, std::vector<cplx> profile, Axis axis);

/// Samples a function of angular frequency along one axis of the grid into
/// Fourier storage order, ready for analyser_transfer.
std::vector<cplx> sample_axis_profile(const Grid2D& grid, Axis axis,
                                      const std::function<cplx(double)>& a_of_k);

} // namespace xpci
