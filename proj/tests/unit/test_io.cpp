#include "oracles.hpp"
#include "tempdir.hpp"

#include "xpci/config.hpp"
#include "xpci/curve_io.hpp"
#include "xpci/errors.hpp"
#include "xpci/raster_io.hpp"

#include <doctest.h>

#include <fstream>
#include <iterator>

using namespace xpci;
using nlohmann::json;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

void spit(const std::filesystem::path& p, const std::string& s) {
  std::ofstream(p, std::ios::binary) << s;
}

json minimal_config() {
  return json::parse(R"({
    "seed": 7,
    "grid": {"nx": 64, "ny": 64, "dx_m": 1e-6},
    "source": {"model": "tilted_plane_waves", "cone_half_angle_rad": 1e-5, "modes": 4,
               "wavelength_m": 1e-10},
    "phantom": {"kind": "sphere", "diameter_m": 3e-5, "delta": 1e-6, "beta": 1e-9},
    "stages": [{"type": "sample"}, {"type": "free_space", "distance_m": 0.05}]
  })");
}

} // namespace

TEST_CASE("complex field raster round trip is exact in single precision") {
  testutil::TempDir dir;
  const Grid2D g(7, 5, 1.5e-6, 2e-6);
  std::vector<cplx> v = oracle::random_complex(g.size(), 1);
  for (auto& z : v) z = cplx(static_cast<float>(z.real()), static_cast<float>(z.imag()));
  const ComplexField f(g, 1.2e-10, v);
  io::write_field(dir / "f.raw", f, {"field", 42, json::object()});
  CHECK(std::filesystem::exists(io::sidecar_path(dir / "f.raw")));
  const auto back = io::read_field(dir / "f.raw");
  CHECK(back.grid() == g);
  CHECK(back.wavelength() == 1.2e-10);
  CHECK(back.values() == v);

  // Re-writing what was read gives identical bytes.
  io::write_field(dir / "g.raw", back, {"field", 42, json::object()});
  CHECK(slurp(dir / "f.raw") == slurp(dir / "g.raw"));
  const auto side = json::parse(slurp(io::sidecar_path(dir / "f.raw")));
  CHECK(side["seed"] == 42);
  CHECK(side["byte_order"] == "little");
  CHECK(side["dtype"] == "complex64");
}

TEST_CASE("intensity and real rasters") {
  testutil::TempDir dir;
  const Grid2D g(4, 3, 1e-6, 1e-6);
  std::vector<double> v{0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11.5};
  io::write_intensity(dir / "i.raw", IntensityImage(g, v), 1e-10);
  CHECK(io::read_intensity(dir / "i.raw").values() == v);
  v[0] = -3.25;
  io::write_real(dir / "r.raw", g, v, std::nullopt);
  CHECK(io::read_real_map(dir / "r.raw").values() == v);
  CHECK_THROWS_AS(io::read_intensity(dir / "r.raw"), ValidationError);
  CHECK_THROWS_AS(io::read_field(dir / "r.raw"), FormatError);
}

TEST_CASE("corrupted rasters raise distinct errors") {
  testutil::TempDir dir;
  const Grid2D g(4, 4, 1e-6, 1e-6);
  io::write_intensity(dir / "a.raw", IntensityImage(g, std::vector<double>(16, 1.0)), std::nullopt);
  const std::string payload = slurp(dir / "a.raw");
  const std::string sidecar = slurp(io::sidecar_path(dir / "a.raw"));

  SUBCASE("truncated") {
    spit(dir / "a.raw", payload.substr(0, payload.size() - 4));
    try {
      io::read_raster(dir / "a.raw");
      FAIL("expected an exception");
    } catch (const TruncatedPayloadError& e) {
      CHECK(e.expected_bytes == 64);
      CHECK(e.actual_bytes == 60);
    }
  }
  SUBCASE("flipped byte") {
    std::string bad = payload;
    bad[5] ^= 0x10;
    spit(dir / "a.raw", bad);
    CHECK_THROWS_AS(io::read_raster(dir / "a.raw"), ChecksumError);
  }
  SUBCASE("unknown sidecar key") {
    auto j = json::parse(sidecar);
    j["colour"] = "blue";
    spit(io::sidecar_path(dir / "a.raw"), j.dump());
    try {
      io::read_raster(dir / "a.raw");
      FAIL("expected an exception");
    } catch (const SchemaError& e) {
      CHECK(e.key == "colour");
    }
  }
  SUBCASE("missing sidecar") {
    std::filesystem::remove(io::sidecar_path(dir / "a.raw"));
    CHECK_THROWS_AS(io::read_raster(dir / "a.raw"), FormatError);
  }
  SUBCASE("oversized payload") {
    spit(dir / "a.raw", payload + "xxxx");
    CHECK_THROWS_AS(io::read_raster(dir / "a.raw"), FormatError);
  }
  SUBCASE("complex raster without wavelength") {
    auto j = json::parse(sidecar);
    j["dtype"] = "complex64";
    spit(io::sidecar_path(dir / "a.raw"), j.dump());
    CHECK_THROWS_AS(io::read_raster(dir / "a.raw"), SchemaError);
  }
}

TEST_CASE("sinogram round trip keeps geometry and angles") {
  testutil::TempDir dir;
  Sinogram s{{0.0, 0.5, 1.0}, Modality::propagated_intensity, 4, 2, 1e-6, 1e-6, 1e-10, 0.03,
             std::vector<double>(24)};
  for (std::size_t i = 0; i < s.values.size(); ++i) s.values[i] = 0.25 * static_cast<double>(i);
  io::write_sinogram(dir / "s.raw", s);
  const auto b = io::read_sinogram(dir / "s.raw");
  CHECK(b.angles_rad == s.angles_rad);
  CHECK(b.modality == s.modality);
  CHECK(b.nx == 4);
  CHECK(b.ny == 2);
  CHECK(b.distance_m == 0.03);
  CHECK(b.values == s.values);
}

TEST_CASE("crc32 of a file") {
  testutil::TempDir dir;
  spit(dir / "t", "123456789");
  CHECK(io::file_crc32(dir / "t") == "cbf43926");
}

TEST_CASE("two-column curves") {
  testutil::TempDir dir;
  const RockingCurve c({-1e-6, 0.0, 1.1e-6, 2e-6}, {0.1, 0.9, 1.0 / 3.0, 0.2});
  io::write_rocking_curve(dir / "c.txt", c);
  const auto b = io::read_rocking_curve(dir / "c.txt");
  CHECK(b.theta() == c.theta());
  CHECK(b.t() == c.t());

  spit(dir / "d.txt", "# header\n0 0.5\n\n  1e-6   0.25 # trailing\n");
  const auto d = io::read_two_column(dir / "d.txt");
  CHECK(d.x == std::vector<double>{0.0, 1e-6});
  CHECK(d.y == std::vector<double>{0.5, 0.25});

  spit(dir / "e.txt", "0 0.5\n1 oops\n");
  try {
    io::read_two_column(dir / "e.txt");
    FAIL("expected an exception");
  } catch (const FormatError& e) {
    CHECK(std::string(e.what()).find("e.txt:2:") != std::string::npos);
  }

  const AngularProfile p{-2e-6, 0.5e-6, {0.1, 0.2, 0.4, 0.2, 0.1}};
  io::write_profile(dir / "p.txt", p);
  const auto q = io::read_profile(dir / "p.txt");
  CHECK(q.values == p.values);
  CHECK(q.step_rad == doctest::Approx(p.step_rad).epsilon(1e-12));
  spit(dir / "u.txt", "0 1\n1 1\n3 1\n");
  CHECK_THROWS_AS(io::read_profile(dir / "u.txt"), ValidationError);
}

TEST_CASE("experiment config parsing") {
  const auto c = config::parse(minimal_config());
  CHECK(c.seed == 7);
  CHECK(c.grid.dy_m == 1e-6);
  CHECK(c.source.bins.size() == 1);
  CHECK(c.source.modes == 4);
  REQUIRE(c.phantom.has_value());
  CHECK(c.stages.size() == 2);
  CHECK(c.stages[1].distance_m == 0.05);

  // to_json then parse is a fixed point.
  CHECK(config::to_json(config::parse(config::to_json(c))) == config::to_json(c));

  auto bad_key = [](json j, const std::string& expected) {
    try {
      config::parse(j);
      FAIL("expected SchemaError for " << expected);
    } catch (const SchemaError& e) {
      CHECK(e.key == expected);
    }
  };
  auto j = minimal_config();
  j["source"]["wavelenght_m"] = 1e-10;
  bad_key(j, "source.wavelenght_m");
  j = minimal_config();
  j["stages"][1]["distance"] = 1.0;
  bad_key(j, "stages[1].distance");
  j = minimal_config();
  j["source"]["bins"] = json::array({{{"wavelength_m", 1e-10}}});
  CHECK_THROWS_AS(config::parse(j), SchemaError);
  j = minimal_config();
  j["source"].erase("wavelength_m");
  j["source"]["bins"] = json::array({{{"wavelength_m", 1e-10}}, {{"wavelength_m", -1.0}}});
  bad_key(j, "source.bins[1].wavelength_m");
  j = minimal_config();
  j["grid"]["dx_m"] = "1e-6";
  CHECK_THROWS_AS(config::parse(j), SchemaError);
  j = minimal_config();
  j.erase("phantom");
  CHECK_THROWS_AS(config::parse(j), SchemaError);
}

TEST_CASE("config files load from disk") {
  testutil::TempDir dir;
  spit(dir / "c.json", minimal_config().dump(2));
  CHECK(config::load(dir / "c.json").seed == 7);
  spit(dir / "broken.json", "{ \"seed\": ");
  CHECK_THROWS_AS(config::load(dir / "broken.json"), FormatError);
  CHECK_THROWS_AS(config::load(dir / "missing.json"), Error);
}
