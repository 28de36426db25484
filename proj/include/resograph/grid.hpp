#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace resograph {

/// Bad parameters or configuration (CLI exit code 2).
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Malformed or unusable data (CLI exit code 3).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using Index3 = std::array<std::int64_t, 3>;
using Point3 = std::array<double, 3>;

/// Regular voxel grid with isotropic spacing. Axis 0 varies fastest in the
/// linear index. Unused axes (k >= d) have extent 1.
///
/// Voxel i occupies the open cube prod_k (origin_k + i_k*r, origin_k + (i_k+1)*r).
struct GridSpec {
  int d = 2;
  Index3 dims{1, 1, 1};
  double spacing = 1.0;
  Point3 origin{0.0, 0.0, 0.0};

  static GridSpec make(std::span<const std::int64_t> dims, double spacing,
                       std::span<const double> origin = {});
  static GridSpec square(int d, std::int64_t n, double spacing, double origin = 0.0);

  void validate() const;
  std::int64_t voxel_count() const { return dims[0] * dims[1] * dims[2]; }

  std::int64_t index(std::int64_t x, std::int64_t y, std::int64_t z = 0) const {
    return x + dims[0] * (y + dims[1] * z);
  }
  std::int64_t index(const Index3& c) const { return index(c[0], c[1], c[2]); }
  Index3 coords(std::int64_t idx) const {
    return {idx % dims[0], (idx / dims[0]) % dims[1], idx / (dims[0] * dims[1])};
  }
  Point3 center(std::int64_t idx) const;
  Point3 corner(const Index3& c) const;

  /// Grid with spacing a*r and dims/a; throws ParameterError unless a divides every extent.
  GridSpec coarsened(std::int64_t a) const;

  bool same_shape(const GridSpec& other) const { return d == other.d && dims == other.dims; }
  bool operator==(const GridSpec&) const = default;
  std::string describe() const;
};

/// Real-valued voxel field. A density image carries the is_density flag and
/// satisfies 0 <= value <= 1 everywhere.
class GrayscaleImage {
 public:
  GrayscaleImage() = default;
  GrayscaleImage(GridSpec grid, std::vector<double> values, bool is_density = false);

  const GridSpec& grid() const { return grid_; }
  std::span<const double> values() const { return values_; }
  double operator[](std::int64_t i) const { return values_[static_cast<std::size_t>(i)]; }
  bool is_density() const { return is_density_; }
  std::int64_t size() const { return static_cast<std::int64_t>(values_.size()); }

 private:
  GridSpec grid_;
  std::vector<double> values_;
  bool is_density_ = false;
};

/// Occupancy voxel field X(r,t); threshold_used records the t that produced it.
class BinaryImage {
 public:
  BinaryImage() = default;
  BinaryImage(GridSpec grid, std::vector<std::uint8_t> occupied, double threshold_used = 0.5);

  const GridSpec& grid() const { return grid_; }
  std::span<const std::uint8_t> occupied() const { return occupied_; }
  bool operator[](std::int64_t i) const { return occupied_[static_cast<std::size_t>(i)] != 0; }
  double threshold_used() const { return threshold_used_; }
  std::int64_t size() const { return static_cast<std::int64_t>(occupied_.size()); }

  std::int64_t count() const;
  bool single_phase() const {
    const auto c = count();
    return c == 0 || c == size();
  }
  BinaryImage complement() const;

 private:
  GridSpec grid_;
  std::vector<std::uint8_t> occupied_;
  double threshold_used_ = 0.5;
};

}  // namespace resograph
