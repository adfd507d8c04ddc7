#include "oracles.hpp"

#include "xpci/errors.hpp"
#include "xpci/fft.hpp"
#include "xpci/field.hpp"

#include <doctest.h>

#include <numbers>

using namespace xpci;

TEST_CASE("Grid2D validates and follows the Fourier conventions") {
  CHECK_THROWS_AS(Grid2D(1, 4, 1.0, 1.0), ValidationError);
  CHECK_THROWS_AS(Grid2D(4, 4, 0.0, 1.0), ValidationError);
  CHECK_THROWS_AS(Grid2D(4, 4, 1.0, -1.0), ValidationError);
  const Grid2D g(6, 5, 0.5, 2.0);
  CHECK(g.kx(0) == 0.0);
  CHECK(g.kx(1) == doctest::Approx(2.0 * std::numbers::pi / 3.0));
  CHECK(g.kx(3) == doctest::Approx(-2.0 * std::numbers::pi * 3.0 / 3.0)); // Nyquist is negative
  CHECK(g.kx(5) == doctest::Approx(-2.0 * std::numbers::pi / 3.0));
  CHECK(g.ky(2) == doctest::Approx(2.0 * std::numbers::pi * 2.0 / 10.0));
  CHECK(g.ky(3) == doctest::Approx(-2.0 * std::numbers::pi * 2.0 / 10.0));
  CHECK(wrapped_index(2, 5) == 2);
  CHECK(wrapped_index(3, 5) == -2);
  CHECK(g.x(3) == 0.0);
  CHECK(g.x(0) == doctest::Approx(-1.5));
}

TEST_CASE("extract_intensity") {
  const Grid2D g(4, 4, 1.0, 1.0);
  const auto ones = extract_intensity(ComplexField::constant(g, 1e-10));
  for (double v : ones.values()) CHECK(v == 1.0);

  std::vector<cplx> v(g.size(), 0.0);
  v[5] = cplx(0.0, 2.0);
  const auto i = extract_intensity(ComplexField(g, 1e-10, v));
  CHECK(i.values()[5] == 4.0);
  CHECK(i.values()[0] == 0.0);

  const auto phases = oracle::random_real(g.size(), 3, -3.0, 3.0);
  for (std::size_t p = 0; p < g.size(); ++p) v[p] = std::polar(std::sqrt(2.5), phases[p]);
  const auto mixed = extract_intensity(ComplexField(g, 1e-10, v));
  for (double x : mixed.values()) CHECK(x == doctest::Approx(2.5).epsilon(1e-14));
}

TEST_CASE("extract_phase uses the principal value and masks dark pixels") {
  const Grid2D g(2, 2, 1.0, 1.0);
  const ComplexField f(g, 1e-10,
                       {cplx(1.0, 0.0), cplx(-1.0, 0.0), std::polar(std::sqrt(2.0), 0.7), 0.0});
  const auto p = extract_phase(f);
  CHECK(p.phase.values()[0] == 0.0);
  CHECK(p.phase.values()[1] == doctest::Approx(std::numbers::pi));
  CHECK(p.phase.values()[2] == doctest::Approx(0.7));
  CHECK(p.phase.values()[3] == 0.0);
  CHECK(p.valid == std::vector<std::uint8_t>{1, 1, 1, 0});
}

TEST_CASE("compose_field hand values and round trip") {
  const Grid2D g(2, 2, 1.0, 1.0);
  const auto f = compose_field(IntensityImage(g, {1.0, 4.0, 1.0, 1.0}),
                               PhaseMap(g, {0.0, std::numbers::pi / 2, 0.0, 0.0}), 1e-10);
  CHECK(std::abs(f.values()[0] - cplx(1.0, 0.0)) < 1e-15);
  CHECK(std::abs(f.values()[1] - cplx(0.0, 2.0)) < 1e-15);

  const Grid2D big(16, 12, 1e-6, 1e-6);
  const auto i = oracle::random_real(big.size(), 4, 0.1, 3.0);
  const auto ph = oracle::random_real(big.size(), 5, -3.1, 3.1);
  const auto h = compose_field(IntensityImage(big, i), PhaseMap(big, ph), 1e-10);
  const auto i2 = extract_intensity(h).values();
  const auto p2 = extract_phase(h).phase.values();
  for (std::size_t k = 0; k < i.size(); ++k) {
    CHECK(std::abs(i2[k] - i[k]) <= 1e-12 * i[k]);
    CHECK(std::abs(p2[k] - ph[k]) <= 1e-12 * std::max(1.0, std::abs(ph[k])));
  }
  CHECK_THROWS_AS(compose_field(IntensityImage(g, {1, 1, 1, 1}), PhaseMap(big, ph), 1e-10),
                  ValidationError);
}

TEST_CASE("compose(extract_intensity, extract_phase) reproduces the field") {
  const Grid2D g(9, 7, 1e-6, 2e-6);
  const ComplexField f(g, 1e-10, oracle::random_complex(g.size(), 6));
  const auto back = compose_field(extract_intensity(f), extract_phase(f).phase, 1e-10);
  for (std::size_t k = 0; k < g.size(); ++k)
    CHECK(std::abs(back.values()[k] - f.values()[k]) <= 1e-12 * std::abs(f.values()[k]));
}

TEST_CASE("value types reject invalid samples") {
  const Grid2D g(2, 2, 1.0, 1.0);
  CHECK_THROWS_AS(IntensityImage(g, {1.0, -1e-3, 0.0, 0.0}), ValidationError);
  CHECK_THROWS_AS(IntensityImage(g, {1.0, NAN, 0.0, 0.0}), ValidationError);
  CHECK_THROWS_AS(PhaseMap(g, {1.0, INFINITY, 0.0, 0.0}), ValidationError);
  CHECK_THROWS_AS(ComplexField(g, 1e-10, std::vector<cplx>(3)), ValidationError);
  CHECK_THROWS_AS(ComplexField(g, 0.0, std::vector<cplx>(4)), ValidationError);
}

TEST_CASE("total_power") {
  const Grid2D g(4, 4, 1.0, 1.0);
  CHECK(total_power(IntensityImage(g, std::vector<double>(16, 1.0))) == 16.0);
  CHECK(total_power(IntensityImage(g, std::vector<double>(16, 0.0))) == 0.0);
  const Grid2D h(5, 3, 2e-6, 3e-6);
  const auto v = oracle::random_real(h.size(), 7);
  double s = 0.0;
  for (double x : v) s += x;
  CHECK(total_power(IntensityImage(h, v)) == doctest::Approx(s * 6e-12).epsilon(1e-14));
}

TEST_CASE("FFT matches a brute-force DFT and inverts to the identity") {
  for (auto [nx, ny] : {std::pair<std::size_t, std::size_t>{8, 6}, {7, 5}, {2, 9}}) {
    const Grid2D g(nx, ny, 1.0, 1.0);
    const auto in = oracle::random_complex(g.size(), nx * 31 + ny);
    auto spec = in;
    fft::forward_2d(g, spec);
    CHECK(oracle::rel_l2(spec, oracle::dft2(in, nx, ny, -1)) < 1e-13);
    fft::inverse_2d(g, spec);
    CHECK(oracle::rel_l2(spec, in) < 1e-10);
  }
  const Grid2D g(128, 96, 1.0, 1.0);
  const auto in = oracle::random_complex(g.size(), 99);
  auto x = in;
  fft::forward_2d(g, x);
  fft::inverse_2d(g, x);
  CHECK(oracle::rel_l2(x, in) < 1e-10);
}

TEST_CASE("k_squared matches the grid frequencies") {
  const Grid2D g(6, 4, 1e-6, 2e-6);
  const auto k2 = fft::k_squared(g);
  for (std::size_t iy = 0; iy < g.ny(); ++iy)
    for (std::size_t ix = 0; ix < g.nx(); ++ix)
      CHECK(k2[g.index(ix, iy)] ==
            doctest::Approx(g.kx(ix) * g.kx(ix) + g.ky(iy) * g.ky(iy)).epsilon(1e-15));
}
