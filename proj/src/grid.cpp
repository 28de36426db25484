#include "resograph/grid.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace resograph {

GridSpec GridSpec::make(std::span<const std::int64_t> dims, double spacing,
                        std::span<const double> origin) {
  if (dims.size() != 2 && dims.size() != 3) {
    throw ParameterError("grid must be 2D or 3D, got " + std::to_string(dims.size()) + " axes");
  }
  if (!origin.empty() && origin.size() != dims.size()) {
    throw ParameterError("origin has " + std::to_string(origin.size()) + " entries, expected " +
                         std::to_string(dims.size()));
  }
  GridSpec g;
  g.d = static_cast<int>(dims.size());
  for (std::size_t k = 0; k < dims.size(); ++k) {
    g.dims[k] = dims[k];
    if (!origin.empty()) g.origin[k] = origin[k];
  }
  g.spacing = spacing;
  g.validate();
  return g;
}

GridSpec GridSpec::square(int d, std::int64_t n, double spacing, double origin) {
  std::vector<std::int64_t> dims(static_cast<std::size_t>(d), n);
  std::vector<double> org(static_cast<std::size_t>(d), origin);
  return make(dims, spacing, org);
}

void GridSpec::validate() const {
  if (d != 2 && d != 3) throw ParameterError("grid dimension must be 2 or 3");
  for (int k = 0; k < 3; ++k) {
    if (dims[k] < 1) throw ParameterError("grid extents must be >= 1");
    if (k >= d && dims[k] != 1) throw ParameterError("unused grid axes must have extent 1");
  }
  if (!(spacing > 0.0) || !std::isfinite(spacing)) {
    throw ParameterError("grid spacing must be positive and finite");
  }
}

Point3 GridSpec::center(std::int64_t idx) const {
  const auto c = coords(idx);
  Point3 p{0.0, 0.0, 0.0};
  for (int k = 0; k < d; ++k) p[k] = origin[k] + (static_cast<double>(c[k]) + 0.5) * spacing;
  return p;
}

Point3 GridSpec::corner(const Index3& c) const {
  Point3 p{0.0, 0.0, 0.0};
  for (int k = 0; k < d; ++k) p[k] = origin[k] + static_cast<double>(c[k]) * spacing;
  return p;
}

GridSpec GridSpec::coarsened(std::int64_t a) const {
  if (a < 1) throw ParameterError("kernel size must be a positive integer");
  GridSpec g = *this;
  for (int k = 0; k < d; ++k) {
    if (dims[k] % a != 0) {
      throw ParameterError("kernel " + std::to_string(a) + " does not divide extent " +
                           std::to_string(dims[k]) + " on axis " + std::to_string(k));
    }
    g.dims[k] = dims[k] / a;
  }
  g.spacing = spacing * static_cast<double>(a);
  return g;
}

std::string GridSpec::describe() const {
  std::ostringstream os;
  os << dims[0];
  for (int k = 1; k < d; ++k) os << 'x' << dims[k];
  os << " @ r=" << spacing;
  return os.str();
}

GrayscaleImage::GrayscaleImage(GridSpec grid, std::vector<double> values, bool is_density)
    : grid_(grid), values_(std::move(values)), is_density_(is_density) {
  grid_.validate();
  if (static_cast<std::int64_t>(values_.size()) != grid_.voxel_count()) {
    throw DataError("grayscale image has " + std::to_string(values_.size()) +
                    " values for a grid of " + std::to_string(grid_.voxel_count()) + " voxels");
  }
  if (is_density_) {
    for (std::size_t i = 0; i < values_.size(); ++i) {
      if (!(values_[i] >= 0.0 && values_[i] <= 1.0)) {
        throw DataError("density value out of [0,1] at voxel " + std::to_string(i));
      }
    }
  }
}

BinaryImage::BinaryImage(GridSpec grid, std::vector<std::uint8_t> occupied, double threshold_used)
    : grid_(grid), occupied_(std::move(occupied)), threshold_used_(threshold_used) {
  grid_.validate();
  if (static_cast<std::int64_t>(occupied_.size()) != grid_.voxel_count()) {
    throw DataError("binary image has " + std::to_string(occupied_.size()) +
                    " voxels for a grid of " + std::to_string(grid_.voxel_count()));
  }
  for (auto& v : occupied_) v = v ? 1 : 0;
}

std::int64_t BinaryImage::count() const {
  return std::count(occupied_.begin(), occupied_.end(), std::uint8_t{1});
}

BinaryImage BinaryImage::complement() const {
  std::vector<std::uint8_t> flipped(occupied_.size());
  std::transform(occupied_.begin(), occupied_.end(), flipped.begin(),
                 [](std::uint8_t v) -> std::uint8_t { return v ? 0 : 1; });
  return BinaryImage(grid_, std::move(flipped), threshold_used_);
}

}  // namespace resograph
