#pragma once

#include <filesystem>

#include <json.hpp>

#include "resograph/grid.hpp"

namespace resograph::io {

namespace fs = std::filesystem;

// 2D images are binary PGM (P5), file row y holding grid row y. Binary images
// are written as 0/255 and a pixel reads as occupied when it exceeds maxval/2.
// Grayscale reads map pixel/maxval into [0,1]. PGM carries no spacing; the
// caller supplies it.
BinaryImage read_pgm_binary(const fs::path& path, double spacing = 1.0);
GrayscaleImage read_pgm_density(const fs::path& path, double spacing = 1.0);
void write_pgm(const fs::path& path, const BinaryImage& img);
/// Writes values linearly mapped from [lo,hi] to 0..255.
void write_pgm(const fs::path& path, const GrayscaleImage& img, double lo, double hi);

// Volumes and real fields are raw little-endian streams (axis 0 fastest)
// with a JSON sidecar at <path>.json: {"dims":[...],"spacing":r,"origin":[...]}.
fs::path sidecar_path(const fs::path& raw);
nlohmann::json grid_to_json(const GridSpec& g);
GridSpec grid_from_json(const nlohmann::json& j);

void write_raw_u8(const fs::path& path, const BinaryImage& img,
                  const nlohmann::json& extra = nlohmann::json::object());
BinaryImage read_raw_u8(const fs::path& path);
void write_raw_f64(const fs::path& path, const GridSpec& grid, std::span<const double> values,
                   const nlohmann::json& extra = nlohmann::json::object());
GrayscaleImage read_raw_f64(const fs::path& path, bool is_density = false);
void write_raw_i64(const fs::path& path, const GridSpec& grid,
                   std::span<const std::int64_t> values);

/// Dispatches on extension: .pgm -> PGM, anything else -> raw u8 + sidecar.
BinaryImage read_binary(const fs::path& path, double pgm_spacing = 1.0);
void write_binary(const fs::path& path, const BinaryImage& img);

void write_text(const fs::path& path, const std::string& text);
std::string read_text(const fs::path& path);

}  // namespace resograph::io
