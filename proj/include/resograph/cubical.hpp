#pragma once

#include <filesystem>
#include <limits>
#include <utility>

#include "resograph/distance_transform.hpp"

namespace resograph {

/// Cubical complex of a voxel image under the T-construction.
///
/// Cells live on the doubled grid: a used axis of n voxels has 2n+1 doubled
/// coordinates and a cell's dimension is the number of odd coordinates. Voxel
/// i is the top cell at 2i+1. A cell's value is the minimum over the voxels
/// incident to it, computed on demand from the voxel values.
class CubicalFiltration {
 public:
  static CubicalFiltration build(const GrayscaleImage& img);
  static CubicalFiltration build(const SignedDistanceImage& img);

  const GridSpec& grid() const { return grid_; }
  int d() const { return grid_.d; }
  const Index3& shape() const { return shape_; }
  std::int64_t cell_count() const { return shape_[0] * shape_[1] * shape_[2]; }

  Index3 cell_coords(std::int64_t cell) const {
    return {cell % shape_[0], (cell / shape_[0]) % shape_[1], cell / (shape_[0] * shape_[1])};
  }
  std::int64_t cell_index(const Index3& c) const {
    return c[0] + shape_[0] * (c[1] + shape_[1] * c[2]);
  }
  int cell_dim(std::int64_t cell) const;
  double value(std::int64_t cell) const;
  double voxel_value(std::int64_t voxel) const {
    return values_[static_cast<std::size_t>(voxel)];
  }

 private:
  GridSpec grid_;
  Index3 shape_{1, 1, 1};
  std::vector<double> values_;
};

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

struct PersistenceDiagram {
  int dim = 0;
  /// (birth, death) sorted ascending; death may be +inf.
  std::vector<std::pair<double, double>> points;

  std::size_t essential_count() const;
  void sort_points();
};

/// Sublevel persistence with Z/2 coefficients for k = 0..d-1. Cells are
/// ordered by (value, dimension, doubled-grid index); zero-persistence pairs
/// are dropped.
std::vector<PersistenceDiagram> compute_persistence(const CubicalFiltration& filt);

/// Number of points with birth <= delta < death.
std::size_t betti_curve(const PersistenceDiagram& diag, double delta);

/// CSV with header `dim,birth,death`, `inf` for infinite deaths, 17 significant digits.
std::string diagrams_to_csv(const std::vector<PersistenceDiagram>& diagrams);
void write_diagrams_csv(const std::filesystem::path& path,
                        const std::vector<PersistenceDiagram>& diagrams);
/// Returns one diagram per dimension 0..max dim present in the file.
std::vector<PersistenceDiagram> read_diagrams_csv(const std::filesystem::path& path);
std::vector<PersistenceDiagram> parse_diagrams_csv(const std::string& text);

std::string format_real(double v);

}  // namespace resograph
