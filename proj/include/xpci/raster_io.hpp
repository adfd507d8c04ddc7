#pragma once

// Raster files: a JSON sidecar (<payload>.json) describing a raw payload of
// little-endian IEEE-754 float32 values, row-major with x fastest. Complex
// samples are interleaved (re, im).

#include "xpci/field.hpp"
#include "xpci/tomo.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace xpci::io {

enum class DType { real32, complex64 };

struct RasterHeader {
  std::size_t nx = 0;
  std::size_t ny = 0;
  double dx_m = 0.0;
  double dy_m = 0.0;
  DType dtype = DType::real32;
  std::optional<double> lambda_m; ///< mandatory for complex64
  std::string modality;           ///< free-form tag ("intensity", "field", sinogram modality...)
  std::optional<std::uint64_t> seed;
  std::string version;
  std::uint32_t crc32 = 0;        ///< of the payload bytes; filled in on write
  nlohmann::json extra = nlohmann::json::object();

  std::size_t payload_bytes() const { return nx * ny * (dtype == DType::complex64 ? 8 : 4); }
};

struct Raster {
  RasterHeader header;
  std::vector<float> samples; ///< nx·ny or 2·nx·ny floats
};

std::filesystem::path sidecar_path(const std::filesystem::path& payload);

/// Writes payload then sidecar, each through a temporary file and a rename.
void write_raster(const std::filesystem::path& payload, Raster raster);
/// Throws TruncatedPayloadError, ChecksumError or SchemaError.
Raster read_raster(const std::filesystem::path& payload);

nlohmann::json header_to_json(const RasterHeader& h, const std::string& payload_name);
RasterHeader header_from_json(const nlohmann::json& j);

struct WriteOptions {
  std::string modality;
  std::optional<std::uint64_t> seed;
  nlohmann::json extra = nlohmann::json::object();
};

void write_field(const std::filesystem::path& path, const ComplexField& f,
                 const WriteOptions& options = {});
void write_real(const std::filesystem::path& path, const Grid2D& grid,
                const std::vector<double>& values, std::optional<double> lambda_m,
                const WriteOptions& options = {});
void write_intensity(const std::filesystem::path& path, const IntensityImage& image,
                     std::optional<double> lambda_m, const WriteOptions& options = {});

ComplexField read_field(const std::filesystem::path& path);
IntensityImage read_intensity(const std::filesystem::path& path);
RealMap read_real_map(const std::filesystem::path& path);

/// Sinograms are stored as nx × (angles·ny) real rasters with the angles,
/// rows per angle, modality and distance in the sidecar.
void write_sinogram(const std::filesystem::path& path, const Sinogram& s,
                    const WriteOptions& options = {});
Sinogram read_sinogram(const std::filesystem::path& path);

/// Writes text to path atomically.
void write_text_atomic(const std::filesystem::path& path, const std::string& text);

/// crc32 of a file's bytes as 8 lowercase hex digits.
std::string file_crc32(const std::filesystem::path& path);

} // namespace xpci::io
