#include "oracles.hpp"

#include "xpci/diagnostics.hpp"
#include "xpci/errors.hpp"
#include "xpci/fft.hpp"
#include "xpci/propagation.hpp"

#include <doctest.h>

#include <numbers>

using namespace xpci;

namespace {

// Dyadic lengths keep Δ1 + Δ2 exact in binary floating point.
constexpr double kLambda = 0x1p-33;  // ≈ 1.16e-10 m
constexpr double kPitch = 0x1p-20;   // ≈ 0.95 µm

ComplexField random_field(std::size_t n, std::uint64_t seed) {
  const Grid2D g(n, n, kPitch, kPitch);
  return ComplexField(g, kLambda, oracle::random_complex(g.size(), seed));
}

double power(const ComplexField& f) { return total_power(extract_intensity(f)); }

} // namespace

TEST_CASE("zero distance is the exact identity") {
  const auto f = random_field(32, 1);
  CHECK(fresnel_propagate(f, 0.0).values() == f.values());
  CHECK(fresnel_propagate(f, 0.0, Boundary::zero_pad_2x).values() == f.values());
  CHECK(apply_transfer(f, TransferFunction::identity()).values() == f.values());
}

TEST_CASE("plane wave picks up only the carrier phase") {
  const Grid2D g(16, 16, kPitch, kPitch);
  const double delta = 0.0123;
  const auto out = fresnel_propagate(ComplexField::constant(g, kLambda), delta);
  const cplx carrier = free_space_carrier(delta, kLambda);
  for (const cplx& z : out.values()) CHECK(std::abs(z - carrier) < 1e-12);
  const double k = 2.0 * std::numbers::pi / kLambda;
  CHECK(std::abs(carrier - std::polar(1.0, std::fmod(k * delta, 2.0 * std::numbers::pi))) < 1e-6);
}

TEST_CASE("free-space filter is unimodular and conserves power") {
  const auto f = random_field(64, 2);
  const Grid2D& g = f.grid();
  for (const cplx& t : TransferFunction::free_space(0.37).sample(g, kLambda))
    CHECK(std::abs(std::abs(t) - 1.0) < 1e-14);
  for (double d : {0.01, -0.2, 1.5}) {
    diag::ScopedCapture quiet;
    CHECK(std::abs(power(fresnel_propagate(f, d)) - power(f)) <= 1e-10 * power(f));
  }
}

TEST_CASE("semigroup and inverse on dyadic distances") {
  diag::ScopedCapture quiet;
  const auto f = random_field(64, 3);
  const double d1 = 0x1p-6, d2 = 0x1p-4;
  const auto two_steps = fresnel_propagate(fresnel_propagate(f, d1), d2);
  const auto one_step = fresnel_propagate(f, d1 + d2);
  CHECK(oracle::rel_l2(two_steps.values(), one_step.values()) <= 1e-10);
  const auto back = fresnel_propagate(fresnel_propagate(f, d2), -d2);
  CHECK(oracle::rel_l2(back.values(), f.values()) <= 1e-10);
  const auto sys = apply_system(f, compose({TransferFunction::free_space(d1),
                                            TransferFunction::free_space(-d1)}));
  CHECK(oracle::rel_l2(sys.values(), f.values()) <= 1e-10);
  CHECK(apply_system(f, compose({})).values() == f.values());
}

TEST_CASE("apply_transfer(FreeSpace) is fresnel_propagate bit-for-bit") {
  const auto f = random_field(32, 4);
  CHECK(apply_transfer(f, TransferFunction::free_space(0.01)).values() ==
        fresnel_propagate(f, 0.01).values());
}

TEST_CASE("a system equals one filtration by the product of its stage filters") {
  diag::ScopedCapture quiet;
  const auto f = random_field(32, 5);
  const Grid2D& g = f.grid();
  const auto custom = TransferFunction::custom(g, oracle::random_complex(g.size(), 6));
  const LinearSystem sys = compose({TransferFunction::free_space(0.02), custom,
                                    TransferFunction::free_space(0.05)});
  const auto seq = apply_system(f, sys);
  const auto once = apply_transfer(f, TransferFunction::custom(g, system_filter(sys, g, kLambda)));
  CHECK(oracle::rel_l2(seq.values(), once.values()) < 1e-12);
}

TEST_CASE("Laplacian-like filter matches the five-point stencil on a smooth field") {
  const std::size_t n = 256;
  const Grid2D g(n, n, 1e-6, 1e-6);
  std::vector<cplx> v(g.size());
  const double L = g.extent_x();
  for (std::size_t iy = 0; iy < n; ++iy)
    for (std::size_t ix = 0; ix < n; ++ix) {
      const double x = g.x(ix), y = g.y(iy);
      v[g.index(ix, iy)] = std::polar(1.0, 0.8 * std::sin(2 * std::numbers::pi * x / L) +
                                                0.5 * std::cos(4 * std::numbers::pi * y / L));
    }
  const ComplexField f(g, kLambda, v);
  auto k2 = fft::k_squared(g);
  std::vector<cplx> t(k2.begin(), k2.end()); // -(-(k²)) = -∇²
  const auto out = apply_transfer(f, TransferFunction::custom(g, t));
  auto lap = oracle::five_point_laplacian(v, g);
  for (auto& z : lap) z = -z;
  CHECK(oracle::rel_l2(out.values(), lap) <= 1e-3);
}

TEST_CASE("linearity and shift covariance") {
  diag::ScopedCapture quiet;
  const auto f = random_field(32, 7), h = random_field(32, 8);
  const Grid2D& g = f.grid();
  const auto t = TransferFunction::custom(g, oracle::random_complex(g.size(), 9));
  const cplx a(0.3, -1.2), b(2.0, 0.5);
  std::vector<cplx> mix(g.size());
  for (std::size_t i = 0; i < mix.size(); ++i) mix[i] = a * f.values()[i] + b * h.values()[i];
  const auto lhs = apply_transfer(ComplexField(g, kLambda, mix), t);
  const auto tf = apply_transfer(f, t), th = apply_transfer(h, t);
  std::vector<cplx> rhs(g.size());
  for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] = a * tf.values()[i] + b * th.values()[i];
  CHECK(oracle::rel_l2(lhs.values(), rhs) <= 1e-12);

  const std::size_t sx = 5, sy = 3;
  std::vector<cplx> shifted(g.size());
  for (std::size_t iy = 0; iy < g.ny(); ++iy)
    for (std::size_t ix = 0; ix < g.nx(); ++ix)
      shifted[g.index((ix + sx) % g.nx(), (iy + sy) % g.ny())] = f.values()[g.index(ix, iy)];
  const auto out_shifted = fresnel_propagate(ComplexField(g, kLambda, shifted), 0.03).values();
  const auto out = fresnel_propagate(f, 0.03).values();
  double err = 0.0;
  for (std::size_t iy = 0; iy < g.ny(); ++iy)
    for (std::size_t ix = 0; ix < g.nx(); ++ix)
      err = std::max(err, std::abs(out_shifted[g.index((ix + sx) % g.nx(), (iy + sy) % g.ny())] -
                                   out[g.index(ix, iy)]));
  CHECK(err < 1e-12);
}

TEST_CASE("Gaussian beam radius follows the paraxial law") {
  diag::ScopedCapture quiet;
  const std::size_t n = 128;
  const double dx = 1e-6, lambda = 1e-10, w0 = 10e-6;
  const Grid2D g(n, n, dx, dx);
  std::vector<cplx> v(g.size());
  for (std::size_t iy = 0; iy < n; ++iy)
    for (std::size_t ix = 0; ix < n; ++ix) {
      const double r2 = g.x(ix) * g.x(ix) + g.y(iy) * g.y(iy);
      v[g.index(ix, iy)] = std::exp(-r2 / (w0 * w0));
    }
  const ComplexField f(g, lambda, v);
  CHECK(oracle::second_moment_radius(extract_intensity(f).values(), g) ==
        doctest::Approx(w0).epsilon(1e-3));
  const double zr = std::numbers::pi * w0 * w0 / lambda;
  for (double z : {0.2 * zr, 1.0 * zr}) {
    const auto out = fresnel_propagate(f, z, Boundary::zero_pad_2x);
    const double w = oracle::second_moment_radius(extract_intensity(out).values(), g);
    CHECK(w == doctest::Approx(oracle::gaussian_beam_radius(w0, z, lambda)).epsilon(0.01));
  }
}

TEST_CASE("aliasing warning fires for long distances only") {
  const auto f = random_field(16, 10);
  {
    diag::ScopedCapture cap;
    fresnel_propagate(f, 1e-4);
    CHECK_FALSE(cap.contains("aliasing"));
  }
  {
    diag::ScopedCapture cap;
    fresnel_propagate(f, 100.0);
    CHECK(cap.contains("aliasing"));
  }
}

TEST_CASE("custom transfer grid mismatch is rejected") {
  const auto f = random_field(16, 11);
  const Grid2D other(8, 8, kPitch, kPitch);
  const auto t = TransferFunction::custom(other, std::vector<cplx>(other.size(), 1.0));
  CHECK_THROWS_AS(apply_transfer(f, t), ValidationError);
  CHECK_THROWS_AS(TransferFunction::custom(other, std::vector<cplx>(3)), ValidationError);
}

TEST_CASE("analyser transfer") {
  const std::size_t n = 64;
  const Grid2D g(n, n, 1e-6, 1e-6);
  const ComplexField f(g, kLambda, oracle::random_complex(g.size(), 12));
  CHECK_THROWS_AS(analyser_transfer(g, std::vector<cplx>(n - 1, 1.0), Axis::x), ValidationError);

  SUBCASE("unit profile is the identity") {
    const auto out = apply_transfer(f, analyser_transfer(g, std::vector<cplx>(n, 1.0), Axis::x));
    CHECK(oracle::rel_l2(out.values(), f.values()) < 1e-14);
  }
  SUBCASE("top-hat band-limits x only") {
    const double cut = 0.25 * std::abs(g.kx(n / 2));
    const auto prof = sample_axis_profile(g, Axis::x, [&](double k) {
      return std::abs(k) <= cut ? cplx(1.0) : cplx(0.0);
    });
    auto in_spec = f.values(), out_spec = apply_transfer(f, analyser_transfer(g, prof, Axis::x)).values();
    fft::forward_2d(g, in_spec);
    fft::forward_2d(g, out_spec);
    for (std::size_t iy = 0; iy < n; ++iy)
      for (std::size_t ix = 0; ix < n; ++ix) {
        const std::size_t i = g.index(ix, iy);
        if (std::abs(g.kx(ix)) > cut)
          CHECK(std::abs(out_spec[i]) < 1e-10 * std::abs(in_spec[i]) + 1e-10);
        else
          CHECK(std::abs(out_spec[i] - in_spec[i]) <= 1e-10 * std::abs(in_spec[i]) + 1e-10);
      }
  }
  SUBCASE("linear ramp on a weak phase object gives contrast ∝ dφ/dx") {
    const double L = g.extent_x();
    const double a = 0.02;
    std::vector<cplx> v(g.size());
    std::vector<double> dphi(g.size());
    for (std::size_t iy = 0; iy < n; ++iy)
      for (std::size_t ix = 0; ix < n; ++ix) {
        const double arg = 2 * std::numbers::pi * g.x(ix) / L;
        v[g.index(ix, iy)] = std::polar(1.0, a * std::sin(arg));
        dphi[g.index(ix, iy)] = a * 2 * std::numbers::pi / L * std::cos(arg);
      }
    const double g1 = 1.0, g2 = 1e-7; // γ2·max|φ'| ≈ 2e-3
    const auto prof = sample_axis_profile(g, Axis::x, [&](double k) { return cplx(g1 + g2 * k); });
    const auto out = extract_intensity(apply_transfer(ComplexField(g, kLambda, v),
                                                      analyser_transfer(g, prof, Axis::x)));
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double predicted = 2.0 * g1 * g2 * dphi[i];
      num += std::pow(out.values()[i] - g1 * g1 - predicted, 2);
      den += predicted * predicted;
    }
    CHECK(std::sqrt(num / den) < 0.01);
  }
}
