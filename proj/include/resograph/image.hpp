#pragma once

#include <functional>

#include "resograph/grid.hpp"

namespace resograph {

using ScalarField = std::function<double(const Point3&)>;

/// Voxel averages of f, each approximated by a tensor-product midpoint rule
/// with quadrature_order^d samples. Exact for voxelwise-constant and affine f.
GrayscaleImage digital_approximation(const ScalarField& f, const GridSpec& grid,
                                     int quadrature_order);

/// X(r,t): voxel occupied iff rho(i) >= t. Requires 0 < t <= 1.
BinaryImage threshold(const GrayscaleImage& rho, double t);

/// Block-average then threshold. A block is occupied iff
/// occupied_count >= t * a^d, evaluated exactly in integer arithmetic.
BinaryImage downsample_binary(const BinaryImage& img, std::int64_t a, double t = 0.5);

/// Block means; spacing multiplied by a.
GrayscaleImage downsample_gray(const GrayscaleImage& img, std::int64_t a);

/// Block occupancy fractions of a binary image as a density image at spacing a*r.
GrayscaleImage block_density(const BinaryImage& img, std::int64_t a);

/// Exact test count >= t*total for 0 < t <= 1.
bool meets_fraction(std::int64_t count, std::int64_t total, double t);

enum class PadMode { none, solid, void_ };
PadMode parse_pad_mode(const std::string& s);

/// Adds a one-voxel border of the given phase (none returns the input).
BinaryImage pad(const BinaryImage& img, PadMode mode);
/// Inverse of pad for a field on the padded grid.
std::vector<double> crop_padding(const GridSpec& padded, std::span<const double> values,
                                 const GridSpec& original);

/// Integer divisors of n in ascending order.
std::vector<std::int64_t> divisors(std::int64_t n);

}  // namespace resograph
