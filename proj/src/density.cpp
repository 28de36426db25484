#include "resograph/density.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace resograph {

namespace {

struct Term {
  double sign;
  Primitive prim;
};

// Exact trees have disjoint union children and nested subtrahends, so the
// covered volume is a signed sum over leaves plus a multiple of the voxel.
void flatten(const SceneNode& n, double sign, double& constant, std::vector<Term>& terms) {
  switch (n.op) {
    case SceneNode::Op::leaf:
      terms.push_back({sign, n.primitive});
      return;
    case SceneNode::Op::union_:
      for (const auto& c : n.children) flatten(c, sign, constant, terms);
      return;
    case SceneNode::Op::difference:
      flatten(n.children[0], sign, constant, terms);
      flatten(n.children[1], -sign, constant, terms);
      return;
    case SceneNode::Op::complement:
      constant += sign;
      flatten(n.children[0], -sign, constant, terms);
      return;
  }
}

Box bounds_of(const Primitive& p, int d) {
  Box b;
  if (const auto* disk = std::get_if<Disk>(&p)) {
    for (int k = 0; k < d; ++k) {
      b.min[k] = disk->center[k] - disk->radius;
      b.max[k] = disk->center[k] + disk->radius;
    }
  } else if (const auto* ann = std::get_if<Annulus>(&p)) {
    for (int k = 0; k < d; ++k) {
      b.min[k] = ann->center[k] - ann->outer_radius;
      b.max[k] = ann->center[k] + ann->outer_radius;
    }
  } else {
    b = std::get<Box>(p);
  }
  return b;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

// Fraction of voxel [lo, lo+r]^d covered, by k^d jittered samples.
template <typename Inside>
double sampled_fraction(const Point3& lo, double r, int d, int k, std::uint64_t seed,
                        Inside&& inside) {
  std::mt19937_64 rng(seed);
  const std::int64_t total = d == 2 ? k * k : k * k * k;
  std::int64_t hits = 0;
  for (std::int64_t s = 0; s < total; ++s) {
    Point3 p{0.0, 0.0, 0.0};
    std::int64_t rest = s;
    for (int a = 0; a < d; ++a) {
      p[a] = lo[a] + (static_cast<double>(rest % k) + unit(rng)) * r / k;
      rest /= k;
    }
    hits += inside(p);
  }
  return static_cast<double>(hits) / static_cast<double>(total);
}

double box_overlap(const Box& b, const Point3& lo, double r, int d) {
  double v = 1.0;
  for (int k = 0; k < d; ++k) {
    const double len = std::min(b.max[k], lo[k] + r) - std::max(b.min[k], lo[k]);
    if (len <= 0.0) return 0.0;
    v *= len;
  }
  return v;
}

double partial_fraction(const Primitive& prim, const Point3& lo, double r, int d,
                        const DensityOptions& opts, std::uint64_t seed) {
  const double vol = d == 2 ? r * r : r * r * r;
  if (const auto* box = std::get_if<Box>(&prim)) return box_overlap(*box, lo, r, d) / vol;
  if (d == 2) {
    if (const auto* disk = std::get_if<Disk>(&prim)) {
      return disk_box_area(disk->center[0], disk->center[1], disk->radius, lo[0], lo[0] + r,
                           lo[1], lo[1] + r) /
             vol;
    }
    const auto& ann = std::get<Annulus>(prim);
    const double outer = disk_box_area(ann.center[0], ann.center[1], ann.outer_radius, lo[0],
                                       lo[0] + r, lo[1], lo[1] + r);
    const double inner = ann.inner_radius > 0.0
                             ? disk_box_area(ann.center[0], ann.center[1], ann.inner_radius,
                                             lo[0], lo[0] + r, lo[1], lo[1] + r)
                             : 0.0;
    return (outer - inner) / vol;
  }
  return sampled_fraction(lo, r, d, opts.samples_per_axis, seed,
                          [&](const Point3& p) { return signed_distance(prim, p, d) <= 0.0; });
}

}  // namespace

GrayscaleImage density_field(const Scene& scene, const GridSpec& grid, const DensityOptions& opts) {
  grid.validate();
  if (scene.d != grid.d) throw ParameterError("scene and grid dimensions differ");
  if (opts.samples_per_axis < 1) throw ParameterError("samples per axis must be >= 1");
  const int d = grid.d;
  const double r = grid.spacing;
  const double half_diag = 0.5 * r * std::sqrt(static_cast<double>(d));
  std::vector<double> rho(static_cast<std::size_t>(grid.voxel_count()), 0.0);

  if (scene.exact) {
    double constant = 0.0;
    std::vector<Term> terms;
    flatten(scene.root, 1.0, constant, terms);
    std::fill(rho.begin(), rho.end(), constant);
    for (std::size_t t = 0; t < terms.size(); ++t) {
      const auto& term = terms[t];
      const Box b = bounds_of(term.prim, d);
      Index3 lo{0, 0, 0};
      Index3 hi{0, 0, 0};
      bool empty = false;
      for (int k = 0; k < d; ++k) {
        lo[k] = std::max<std::int64_t>(0, static_cast<std::int64_t>(
                                              std::floor((b.min[k] - grid.origin[k]) / r)));
        hi[k] = std::min<std::int64_t>(grid.dims[k] - 1, static_cast<std::int64_t>(std::floor(
                                                             (b.max[k] - grid.origin[k]) / r)));
        if (hi[k] < lo[k]) empty = true;
      }
      if (empty) continue;
      for (std::int64_t z = lo[2]; z <= hi[2]; ++z) {
        for (std::int64_t y = lo[1]; y <= hi[1]; ++y) {
          for (std::int64_t x = lo[0]; x <= hi[0]; ++x) {
            const std::int64_t idx = grid.index(x, y, z);
            const double sd = signed_distance(term.prim, grid.center(idx), d);
            double f = 0.0;
            if (sd <= -half_diag) {
              f = 1.0;
            } else if (sd < half_diag) {
              const std::uint64_t seed =
                  splitmix64(opts.seed ^ splitmix64(t * 0x100000001B3ull ^ splitmix64(idx)));
              f = partial_fraction(term.prim, grid.corner({x, y, z}), r, d, opts, seed);
            }
            rho[static_cast<std::size_t>(idx)] += term.sign * f;
          }
        }
      }
    }
  } else {
    for (std::int64_t i = 0; i < grid.voxel_count(); ++i) {
      const double sd = csedt_bound(scene, grid.center(i));
      double f = 0.0;
      if (sd <= -half_diag) {
        f = 1.0;
      } else if (sd < half_diag) {
        const std::uint64_t seed = splitmix64(opts.seed ^ splitmix64(i));
        f = sampled_fraction(grid.corner(grid.coords(i)), r, d, opts.samples_per_axis, seed,
                             [&](const Point3& p) { return membership(scene, p); });
      }
      rho[static_cast<std::size_t>(i)] = f;
    }
  }
  for (auto& v : rho) v = std::clamp(v, 0.0, 1.0);
  return GrayscaleImage(grid, std::move(rho), true);
}

BinaryImage rasterize_centers(const Scene& scene, const GridSpec& grid) {
  if (scene.d != grid.d) throw ParameterError("scene and grid dimensions differ");
  std::vector<std::uint8_t> occ(static_cast<std::size_t>(grid.voxel_count()));
  for (std::int64_t i = 0; i < grid.voxel_count(); ++i) {
    occ[static_cast<std::size_t>(i)] = membership(scene, grid.center(i));
  }
  return BinaryImage(grid, std::move(occ));
}

}  // namespace resograph
