#pragma once

#include <limits>

#include "resograph/image.hpp"

namespace resograph {

/// Marks "no target voxel in the grid" in squared-distance buffers.
inline constexpr std::int64_t kNoSite = std::numeric_limits<std::int64_t>::max();

/// Exact squared index distance from every voxel center to the nearest voxel
/// whose occupancy equals `target`; kNoSite when no such voxel exists.
std::vector<std::int64_t> squared_edt(const BinaryImage& img, bool target);

/// DSEDT of a binary image: -r*sqrt(k) inside, +r*sqrt(k) outside, k the exact
/// squared index distance to the nearest opposite-phase voxel.
class SignedDistanceImage {
 public:
  SignedDistanceImage(GridSpec grid, std::vector<double> values,
                      std::vector<std::int64_t> squared_int = {});

  const GridSpec& grid() const { return grid_; }
  std::span<const double> values() const { return values_; }
  double operator[](std::int64_t i) const { return values_[static_cast<std::size_t>(i)]; }
  /// Empty when the values were produced without an exact integer pass (e.g. cropped output).
  std::span<const std::int64_t> squared_int() const { return squared_; }
  GrayscaleImage as_grayscale() const { return GrayscaleImage(grid_, values_); }

 private:
  GridSpec grid_;
  std::vector<double> values_;
  std::vector<std::int64_t> squared_;
};

/// Throws DataError("DSEDT undefined: empty phase") on single-phase input.
SignedDistanceImage dsedt(const BinaryImage& img);
/// Same after padding with a one-voxel border of the given phase, cropped back
/// to the input grid.
SignedDistanceImage dsedt(const BinaryImage& img, PadMode pad_mode);

/// Symmetric Hausdorff distance between the occupied voxel centers of a and b.
double hausdorff(const BinaryImage& a, const BinaryImage& b);

/// Occupied voxels whose center is farther than s from every empty center.
BinaryImage erosion(const BinaryImage& img, double s);
/// Voxels whose center lies within distance s of an occupied center.
BinaryImage dilation(const BinaryImage& img, double s);

/// sup over occupied centers of the distance to erosion(img, s). Returns +inf
/// when the erosion is empty and 0 for an empty image.
double leash(const BinaryImage& img, double s);
/// max(leash(img, s), leash(complement, s)), complement restricted to the grid.
double two_sided_leash(const BinaryImage& img, double s);

}  // namespace resograph
