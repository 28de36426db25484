#pragma once

#include <cstdint>

#include "resograph/scene.hpp"

namespace resograph {

struct DensityOptions {
  int samples_per_axis = 8;  // k; k^d jittered samples per partially covered voxel
  std::uint64_t seed = 0;
};

/// Per-voxel volume fraction of the scene's solid set.
///
/// Exact 2D scenes are evaluated in closed form (disk and box areas, annulus as
/// a difference of disks). Everything else is estimated by stratified jittered
/// supersampling of the voxels that straddle a primitive boundary; voxels whose
/// center lies farther than the half diagonal from every boundary are exact.
GrayscaleImage density_field(const Scene& scene, const GridSpec& grid,
                             const DensityOptions& opts = {});

/// Membership of voxel centers: the point-sampled rasterization.
BinaryImage rasterize_centers(const Scene& scene, const GridSpec& grid);

}  // namespace resograph
