#include "resograph/io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

namespace resograph::io {

namespace {

static_assert(std::endian::native == std::endian::little,
              "raw streams are little-endian; big-endian hosts need byte swapping");

struct PgmData {
  std::int64_t width = 0;
  std::int64_t height = 0;
  int maxval = 0;
  std::vector<int> pixels;
};

// Reads the next header token, skipping whitespace and '#' comments.
std::string pgm_token(std::istream& in) {
  std::string tok;
  char c = 0;
  while (in.get(c)) {
    if (c == '#') {
      std::string rest;
      std::getline(in, rest);
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      if (!tok.empty()) break;
      continue;
    }
    tok.push_back(c);
  }
  return tok;
}

PgmData read_pgm(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  if (pgm_token(in) != "P5") throw DataError(path.string() + ": not a binary PGM (P5)");
  PgmData d;
  try {
    d.width = std::stoll(pgm_token(in));
    d.height = std::stoll(pgm_token(in));
    d.maxval = std::stoi(pgm_token(in));
  } catch (const std::exception&) {
    throw DataError(path.string() + ": malformed PGM header");
  }
  if (d.width < 1 || d.height < 1 || d.maxval < 1 || d.maxval > 65535) {
    throw DataError(path.string() + ": invalid PGM header values");
  }
  const std::size_t n = static_cast<std::size_t>(d.width * d.height);
  const std::size_t bytes_per = d.maxval < 256 ? 1 : 2;
  std::vector<unsigned char> raw(n * bytes_per);
  in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (in.gcount() != static_cast<std::streamsize>(raw.size())) {
    throw DataError(path.string() + ": truncated PGM pixel data");
  }
  d.pixels.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    d.pixels[i] = bytes_per == 1 ? raw[i] : (raw[2 * i] << 8) | raw[2 * i + 1];
  }
  return d;
}

void write_pgm_pixels(const fs::path& path, std::int64_t w, std::int64_t h,
                      const std::vector<unsigned char>& pixels) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << "P5\n" << w << ' ' << h << "\n255\n";
  out.write(reinterpret_cast<const char*>(pixels.data()), w * h);
}

std::vector<char> read_bytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

template <typename T>
void write_raw(const fs::path& path, const GridSpec& grid, std::span<const T> values,
               nlohmann::json sidecar) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(values.data()),
            static_cast<std::streamsize>(values.size_bytes()));
  auto j = grid_to_json(grid);
  for (auto it = sidecar.begin(); it != sidecar.end(); ++it) j[it.key()] = it.value();
  write_text(sidecar_path(path), j.dump(2) + "\n");
}

GridSpec read_sidecar(const fs::path& raw) {
  const auto side = sidecar_path(raw);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_text(side));
  } catch (const nlohmann::json::exception& e) {
    throw DataError(side.string() + ": " + e.what());
  }
  return grid_from_json(j);
}

}  // namespace

BinaryImage read_pgm_binary(const fs::path& path, double spacing) {
  const auto d = read_pgm(path);
  std::vector<std::uint8_t> occ(d.pixels.size());
  for (std::size_t i = 0; i < occ.size(); ++i) occ[i] = 2 * d.pixels[i] > d.maxval;
  const std::int64_t dims[] = {d.width, d.height};
  return BinaryImage(GridSpec::make(dims, spacing), std::move(occ));
}

GrayscaleImage read_pgm_density(const fs::path& path, double spacing) {
  const auto d = read_pgm(path);
  std::vector<double> vals(d.pixels.size());
  for (std::size_t i = 0; i < vals.size(); ++i) vals[i] = double(d.pixels[i]) / d.maxval;
  const std::int64_t dims[] = {d.width, d.height};
  return GrayscaleImage(GridSpec::make(dims, spacing), std::move(vals), true);
}

void write_pgm(const fs::path& path, const BinaryImage& img) {
  if (img.grid().d != 2) throw ParameterError("PGM output requires a 2D image");
  std::vector<unsigned char> px(static_cast<std::size_t>(img.size()));
  for (std::int64_t i = 0; i < img.size(); ++i) px[static_cast<std::size_t>(i)] = img[i] ? 255 : 0;
  write_pgm_pixels(path, img.grid().dims[0], img.grid().dims[1], px);
}

void write_pgm(const fs::path& path, const GrayscaleImage& img, double lo, double hi) {
  if (img.grid().d != 2) throw ParameterError("PGM output requires a 2D image");
  const double span = hi > lo ? hi - lo : 1.0;
  std::vector<unsigned char> px(static_cast<std::size_t>(img.size()));
  for (std::int64_t i = 0; i < img.size(); ++i) {
    const double u = std::clamp((img[i] - lo) / span, 0.0, 1.0);
    px[static_cast<std::size_t>(i)] = static_cast<unsigned char>(std::lround(u * 255.0));
  }
  write_pgm_pixels(path, img.grid().dims[0], img.grid().dims[1], px);
}

fs::path sidecar_path(const fs::path& raw) { return fs::path(raw.string() + ".json"); }

nlohmann::json grid_to_json(const GridSpec& g) {
  nlohmann::json j;
  j["dims"] = nlohmann::json::array();
  j["origin"] = nlohmann::json::array();
  for (int k = 0; k < g.d; ++k) {
    j["dims"].push_back(g.dims[k]);
    j["origin"].push_back(g.origin[k]);
  }
  j["spacing"] = g.spacing;
  return j;
}

GridSpec grid_from_json(const nlohmann::json& j) {
  try {
    const auto dims = j.at("dims").get<std::vector<std::int64_t>>();
    const double spacing = j.at("spacing").get<double>();
    std::vector<double> origin;
    if (j.contains("origin")) origin = j.at("origin").get<std::vector<double>>();
    return GridSpec::make(dims, spacing, origin);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("invalid grid sidecar: ") + e.what());
  } catch (const ParameterError& e) {
    throw DataError(std::string("invalid grid sidecar: ") + e.what());
  }
}

void write_raw_u8(const fs::path& path, const BinaryImage& img, const nlohmann::json& extra) {
  auto side = extra;
  side["threshold"] = img.threshold_used();
  write_raw<std::uint8_t>(path, img.grid(), img.occupied(), side);
}

BinaryImage read_raw_u8(const fs::path& path) {
  const GridSpec g = read_sidecar(path);
  const auto bytes = read_bytes(path);
  if (static_cast<std::int64_t>(bytes.size()) != g.voxel_count()) {
    throw DataError(path.string() + ": expected " + std::to_string(g.voxel_count()) +
                    " bytes, found " + std::to_string(bytes.size()));
  }
  std::vector<std::uint8_t> occ(bytes.size());
  for (std::size_t i = 0; i < bytes.size(); ++i) occ[i] = bytes[i] != 0;
  return BinaryImage(g, std::move(occ));
}

void write_raw_f64(const fs::path& path, const GridSpec& grid, std::span<const double> values,
                   const nlohmann::json& extra) {
  write_raw<double>(path, grid, values, extra);
}

GrayscaleImage read_raw_f64(const fs::path& path, bool is_density) {
  const GridSpec g = read_sidecar(path);
  const auto bytes = read_bytes(path);
  if (static_cast<std::int64_t>(bytes.size()) != g.voxel_count() * 8) {
    throw DataError(path.string() + ": size does not match sidecar dims");
  }
  std::vector<double> vals(static_cast<std::size_t>(g.voxel_count()));
  std::memcpy(vals.data(), bytes.data(), bytes.size());
  return GrayscaleImage(g, std::move(vals), is_density);
}

void write_raw_i64(const fs::path& path, const GridSpec& grid,
                   std::span<const std::int64_t> values) {
  write_raw<std::int64_t>(path, grid, values, nlohmann::json::object());
}

BinaryImage read_binary(const fs::path& path, double pgm_spacing) {
  if (path.extension() == ".pgm") return read_pgm_binary(path, pgm_spacing);
  return read_raw_u8(path);
}

void write_binary(const fs::path& path, const BinaryImage& img) {
  if (path.extension() == ".pgm") {
    write_pgm(path, img);
  } else {
    write_raw_u8(path, img);
  }
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << text;
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace resograph::io
