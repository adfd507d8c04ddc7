#include "xpci/raster_io.hpp"

#include "xpci/errors.hpp"
#include "xpci/version.hpp"

#include <zlib.h>

#include <bit>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <set>
#include <sstream>
#include <unistd.h>

namespace xpci::io {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kFormat = "xpci-raster";

std::uint32_t crc_of(const std::string& bytes) {
  uLong c = crc32(0L, Z_NULL, 0);
  const auto* p = reinterpret_cast<const Bytef*>(bytes.data());
  std::size_t left = bytes.size();
  while (left > 0) {
    const uInt chunk = static_cast<uInt>(std::min<std::size_t>(left, 1u << 30));
    c = crc32(c, p, chunk);
    p += chunk;
    left -= chunk;
  }
  return static_cast<std::uint32_t>(c);
}

std::string encode(const std::vector<float>& samples) {
  std::string out(samples.size() * 4, '\0');
  for (std::size_t i = 0; i < samples.size(); ++i) {
    std::uint32_t u = std::bit_cast<std::uint32_t>(samples[i]);
    for (int b = 0; b < 4; ++b) out[4 * i + b] = static_cast<char>((u >> (8 * b)) & 0xFF);
  }
  return out;
}

std::vector<float> decode(const std::string& bytes) {
  std::vector<float> out(bytes.size() / 4);
  for (std::size_t i = 0; i < out.size(); ++i) {
    std::uint32_t u = 0;
    for (int b = 0; b < 4; ++b)
      u |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[4 * i + b])) << (8 * b);
    out[i] = std::bit_cast<float>(u);
  }
  return out;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw FormatError("cannot open " + p.string());
  return std::string(std::istreambuf_iterator<char>(in), {});
}

void write_bytes_atomic(const fs::path& path, const std::string& bytes) {
  fs::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ValidationError("cannot write " + tmp.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw ValidationError("write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp);
    throw ValidationError("cannot rename into " + path.string() + ": " + ec.message());
  }
}

template <class T>
T required(const json& j, const std::string& key) {
  if (!j.contains(key)) throw SchemaError(key, "required key is missing");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw SchemaError(key, "has the wrong type");
  }
}

} // namespace

fs::path sidecar_path(const fs::path& payload) {
  fs::path p = payload;
  p += ".json";
  return p;
}

void write_text_atomic(const fs::path& path, const std::string& text) {
  write_bytes_atomic(path, text);
}

json header_to_json(const RasterHeader& h, const std::string& payload_name) {
  json j;
  j["format"] = kFormat;
  j["version"] = h.version.empty() ? std::string(kVersion) : h.version;
  j["payload"] = payload_name;
  j["nx"] = h.nx;
  j["ny"] = h.ny;
  j["dx_m"] = h.dx_m;
  j["dy_m"] = h.dy_m;
  j["dtype"] = h.dtype == DType::complex64 ? "complex64" : "real32";
  j["byte_order"] = "little";
  if (h.lambda_m) j["lambda_m"] = *h.lambda_m;
  j["modality"] = h.modality;
  if (h.seed) j["seed"] = *h.seed;
  j["crc32"] = h.crc32;
  if (!h.extra.empty()) j["extra"] = h.extra;
  return j;
}

RasterHeader header_from_json(const json& j) {
  if (!j.is_object()) throw SchemaError("<root>", "sidecar must be a JSON object");
  static const std::set<std::string> known = {"format", "version", "payload", "nx", "ny",
                                              "dx_m", "dy_m", "dtype", "byte_order",
                                              "lambda_m", "modality", "seed", "crc32", "extra"};
  for (const auto& item : j.items())
    if (!known.count(item.key())) throw SchemaError(item.key(), "unknown key");
  if (required<std::string>(j, "format") != kFormat)
    throw SchemaError("format", std::string("expected '") + kFormat + "'");
  if (required<std::string>(j, "byte_order") != "little")
    throw SchemaError("byte_order", "only little-endian payloads are supported");

  RasterHeader h;
  h.version = required<std::string>(j, "version");
  required<std::string>(j, "payload");
  h.nx = required<std::size_t>(j, "nx");
  h.ny = required<std::size_t>(j, "ny");
  if (h.nx == 0 || h.ny == 0) throw SchemaError(h.nx == 0 ? "nx" : "ny", "must be >= 1");
  h.dx_m = required<double>(j, "dx_m");
  h.dy_m = required<double>(j, "dy_m");
  if (!(h.dx_m > 0.0)) throw SchemaError("dx_m", "must be > 0");
  if (!(h.dy_m > 0.0)) throw SchemaError("dy_m", "must be > 0");
  const auto dtype = required<std::string>(j, "dtype");
  if (dtype == "real32")
    h.dtype = DType::real32;
  else if (dtype == "complex64")
    h.dtype = DType::complex64;
  else
    throw SchemaError("dtype", "must be real32 or complex64");
  if (j.contains("lambda_m")) {
    h.lambda_m = required<double>(j, "lambda_m");
    if (!(*h.lambda_m > 0.0)) throw SchemaError("lambda_m", "must be > 0");
  } else if (h.dtype == DType::complex64) {
    throw SchemaError("lambda_m", "required for complex64 rasters");
  }
  h.modality = required<std::string>(j, "modality");
  if (j.contains("seed")) h.seed = required<std::uint64_t>(j, "seed");
  h.crc32 = required<std::uint32_t>(j, "crc32");
  if (j.contains("extra")) {
    if (!j["extra"].is_object()) throw SchemaError("extra", "must be an object");
    h.extra = j["extra"];
  }
  return h;
}

void write_raster(const fs::path& payload, Raster raster) {
  RasterHeader& h = raster.header;
  const std::size_t per = h.dtype == DType::complex64 ? 2 : 1;
  if (raster.samples.size() != h.nx * h.ny * per)
    throw ValidationError("raster sample count does not match nx·ny");
  if (h.dtype == DType::complex64 && !h.lambda_m)
    throw SchemaError("lambda_m", "required for complex64 rasters");
  if (h.version.empty()) h.version = kVersion;
  const std::string bytes = encode(raster.samples);
  h.crc32 = crc_of(bytes);
  write_bytes_atomic(payload, bytes);
  write_bytes_atomic(sidecar_path(payload),
                     header_to_json(h, payload.filename().string()).dump(2) + "\n");
}

Raster read_raster(const fs::path& payload) {
  json j;
  try {
    j = json::parse(read_file(sidecar_path(payload)));
  } catch (const json::parse_error& e) {
    throw FormatError("sidecar " + sidecar_path(payload).string() + " is not valid JSON: " +
                      e.what());
  }
  RasterHeader h = header_from_json(j);
  const std::string bytes = read_file(payload);
  const std::size_t expected = h.payload_bytes();
  if (bytes.size() < expected) throw TruncatedPayloadError(expected, bytes.size());
  if (bytes.size() > expected)
    throw FormatError("payload has " + std::to_string(bytes.size()) + " bytes, expected " +
                      std::to_string(expected));
  const std::uint32_t crc = crc_of(bytes);
  if (crc != h.crc32)
    throw ChecksumError("payload checksum mismatch for " + payload.string() + ": sidecar " +
                        std::to_string(h.crc32) + ", payload " + std::to_string(crc));
  return {std::move(h), decode(bytes)};
}

namespace {

RasterHeader base_header(const Grid2D& g, DType dtype, std::optional<double> lambda,
                         const WriteOptions& o) {
  RasterHeader h;
  h.nx = g.nx();
  h.ny = g.ny();
  h.dx_m = g.dx();
  h.dy_m = g.dy();
  h.dtype = dtype;
  h.lambda_m = lambda;
  h.modality = o.modality;
  h.seed = o.seed;
  h.extra = o.extra;
  return h;
}

} // namespace

void write_field(const fs::path& path, const ComplexField& f, const WriteOptions& options) {
  WriteOptions o = options;
  if (o.modality.empty()) o.modality = "field";
  Raster r{base_header(f.grid(), DType::complex64, f.wavelength(), o), {}};
  r.samples.reserve(2 * f.values().size());
  for (const cplx& z : f.values()) {
    r.samples.push_back(static_cast<float>(z.real()));
    r.samples.push_back(static_cast<float>(z.imag()));
  }
  write_raster(path, std::move(r));
}

void write_real(const fs::path& path, const Grid2D& grid, const std::vector<double>& values,
                std::optional<double> lambda_m, const WriteOptions& options) {
  if (values.size() != grid.size()) throw ValidationError("value count does not match grid");
  Raster r{base_header(grid, DType::real32, lambda_m, options), {}};
  r.samples.assign(values.begin(), values.end());
  write_raster(path, std::move(r));
}

void write_intensity(const fs::path& path, const IntensityImage& image,
                     std::optional<double> lambda_m, const WriteOptions& options) {
  WriteOptions o = options;
  if (o.modality.empty()) o.modality = "intensity";
  write_real(path, image.grid(), image.values(), lambda_m, o);
}

ComplexField read_field(const fs::path& path) {
  Raster r = read_raster(path);
  if (r.header.dtype != DType::complex64)
    throw SchemaError("dtype", "expected complex64 for a field");
  std::vector<cplx> v(r.header.nx * r.header.ny);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = {r.samples[2 * i], r.samples[2 * i + 1]};
  return ComplexField(Grid2D(r.header.nx, r.header.ny, r.header.dx_m, r.header.dy_m),
                      *r.header.lambda_m, std::move(v));
}

namespace {

std::pair<Grid2D, std::vector<double>> read_real_values(const fs::path& path) {
  Raster r = read_raster(path);
  if (r.header.dtype != DType::real32) throw SchemaError("dtype", "expected real32");
  return {Grid2D(r.header.nx, r.header.ny, r.header.dx_m, r.header.dy_m),
          std::vector<double>(r.samples.begin(), r.samples.end())};
}

} // namespace

IntensityImage read_intensity(const fs::path& path) {
  auto [g, v] = read_real_values(path);
  return IntensityImage(g, std::move(v));
}

RealMap read_real_map(const fs::path& path) {
  auto [g, v] = read_real_values(path);
  return RealMap(g, std::move(v));
}

void write_sinogram(const fs::path& path, const Sinogram& s, const WriteOptions& options) {
  s.validate();
  RasterHeader h;
  h.nx = s.nx;
  h.ny = s.ny * s.angle_count();
  h.dx_m = s.dx;
  h.dy_m = s.ny > 1 ? s.dy : s.dx;
  h.dtype = DType::real32;
  h.lambda_m = s.wavelength_m;
  h.modality = std::string(modality_name(s.modality));
  h.seed = options.seed;
  h.extra = options.extra;
  h.extra["angles_rad"] = s.angles_rad;
  h.extra["rows_per_angle"] = s.ny;
  h.extra["distance_m"] = s.distance_m;
  Raster r{std::move(h), std::vector<float>(s.values.begin(), s.values.end())};
  write_raster(path, std::move(r));
}

Sinogram read_sinogram(const fs::path& path) {
  Raster r = read_raster(path);
  const RasterHeader& h = r.header;
  if (h.dtype != DType::real32) throw SchemaError("dtype", "sinograms are real32");
  if (!h.lambda_m) throw SchemaError("lambda_m", "required for sinograms");
  Sinogram s;
  try {
    s.modality = parse_modality(h.modality);
  } catch (const ValidationError&) {
    throw SchemaError("modality", "not a sinogram modality: '" + h.modality + "'");
  }
  s.angles_rad = required<std::vector<double>>(h.extra, "angles_rad");
  s.ny = required<std::size_t>(h.extra, "rows_per_angle");
  s.distance_m = required<double>(h.extra, "distance_m");
  if (s.ny == 0 || s.angles_rad.size() * s.ny != h.ny)
    throw SchemaError("extra.rows_per_angle", "angles x rows does not match ny");
  s.nx = h.nx;
  s.dx = h.dx_m;
  s.dy = h.dy_m;
  s.wavelength_m = *h.lambda_m;
  s.values.assign(r.samples.begin(), r.samples.end());
  s.validate();
  return s;
}

std::string file_crc32(const fs::path& path) {
  char buf[9];
  std::snprintf(buf, sizeof buf, "%08x", crc_of(read_file(path)));
  return buf;
}

} // namespace xpci::io
