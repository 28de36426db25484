#pragma once

// Slow, independent reference implementations used by the unit and acceptance tests.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <random>
#include <set>
#include <utility>
#include <vector>

#include "resograph/cubical.hpp"
#include "resograph/scene.hpp"

namespace oracle {

using resograph::BinaryImage;
using resograph::GridSpec;
using Diagram = std::vector<std::pair<double, double>>;

inline constexpr double inf = std::numeric_limits<double>::infinity();

/// All-pairs squared index distance to the nearest voxel with the target occupancy.
inline std::vector<std::int64_t> brute_squared_edt(const BinaryImage& img, bool target) {
  const GridSpec& g = img.grid();
  const std::int64_t n = g.voxel_count();
  std::vector<std::int64_t> sites;
  for (std::int64_t i = 0; i < n; ++i) {
    if (img[i] == target) sites.push_back(i);
  }
  std::vector<std::int64_t> out(static_cast<std::size_t>(n), std::numeric_limits<std::int64_t>::max());
  for (std::int64_t i = 0; i < n; ++i) {
    const auto a = g.coords(i);
    for (std::int64_t s : sites) {
      const auto b = g.coords(s);
      std::int64_t q = 0;
      for (int k = 0; k < 3; ++k) q += (a[k] - b[k]) * (a[k] - b[k]);
      out[static_cast<std::size_t>(i)] = std::min(out[static_cast<std::size_t>(i)], q);
    }
  }
  return out;
}

/// Persistence of the T-construction by plain column reduction over Z/2.
///
/// Cells are enumerated directly from voxel coordinates: a cell is a product
/// of per-axis intervals, each either a single voxel or the face between two
/// neighbours (or at the border). Its value is the minimum over the voxels it
/// touches. Ties are broken by dimension, then by a seeded shuffle, which is
/// deliberately different from the library's order.
inline std::vector<Diagram> naive_persistence(const resograph::GrayscaleImage& img,
                                              std::uint64_t tie_seed = 7) {
  const GridSpec& g = img.grid();
  const int d = g.d;
  struct Cell {
    std::array<int, 3> lo{}, hi{};  // inclusive voxel-coordinate ranges per axis
    std::array<int, 3> c{};         // doubled coordinate
    int dim = 0;
    double value = 0.0;
  };
  std::array<int, 3> ext{1, 1, 1};
  for (int k = 0; k < d; ++k) ext[k] = 2 * static_cast<int>(g.dims[k]) + 1;
  std::vector<Cell> cells;
  std::map<std::array<int, 3>, std::size_t> where;
  for (int z = 0; z < ext[2]; ++z) {
    for (int y = 0; y < ext[1]; ++y) {
      for (int x = 0; x < ext[0]; ++x) {
        Cell cell;
        cell.c = {x, y, z};
        double v = inf;
        for (int k = 0; k < 3; ++k) {
          if (k >= d) {
            cell.lo[k] = cell.hi[k] = 0;
            continue;
          }
          const int c = cell.c[k];
          if (c % 2 == 1) {
            cell.lo[k] = cell.hi[k] = (c - 1) / 2;
            ++cell.dim;
          } else {
            cell.lo[k] = std::max(0, c / 2 - 1);
            cell.hi[k] = std::min(static_cast<int>(g.dims[k]) - 1, c / 2);
          }
        }
        for (int vz = cell.lo[2]; vz <= cell.hi[2]; ++vz) {
          for (int vy = cell.lo[1]; vy <= cell.hi[1]; ++vy) {
            for (int vx = cell.lo[0]; vx <= cell.hi[0]; ++vx) {
              v = std::min(v, img[g.index(vx, vy, vz)]);
            }
          }
        }
        cell.value = v;
        where[cell.c] = cells.size();
        cells.push_back(cell);
      }
    }
  }
  std::vector<std::size_t> order(cells.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::mt19937_64 rng(tie_seed);
  std::shuffle(order.begin(), order.end(), rng);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (cells[a].value != cells[b].value) return cells[a].value < cells[b].value;
    return cells[a].dim < cells[b].dim;
  });
  std::vector<std::size_t> pos(cells.size());
  for (std::size_t i = 0; i < order.size(); ++i) pos[order[i]] = i;

  // Boundary columns as sorted sets of filtration positions.
  std::vector<std::set<std::size_t>> cols(cells.size());
  for (std::size_t j = 0; j < order.size(); ++j) {
    const Cell& cell = cells[order[j]];
    for (int k = 0; k < d; ++k) {
      if (cell.c[k] % 2 == 0) continue;
      for (int s : {-1, 1}) {
        auto f = cell.c;
        f[k] += s;
        cols[j].insert(pos[where.at(f)]);
      }
    }
  }
  std::vector<long> pivot_owner(cells.size(), -1);
  std::vector<bool> paired(cells.size(), false);
  std::vector<Diagram> out(static_cast<std::size_t>(d));
  for (std::size_t j = 0; j < cols.size(); ++j) {
    auto& col = cols[j];
    while (!col.empty()) {
      const std::size_t low = *col.rbegin();
      if (pivot_owner[low] < 0) break;
      for (std::size_t e : cols[static_cast<std::size_t>(pivot_owner[low])]) {
        if (!col.erase(e)) col.insert(e);
      }
    }
    if (!col.empty()) {
      const std::size_t low = *col.rbegin();
      pivot_owner[low] = static_cast<long>(j);
      paired[low] = paired[j] = true;
      const Cell& birth = cells[order[low]];
      const Cell& death = cells[order[j]];
      if (birth.value < death.value) out[static_cast<std::size_t>(birth.dim)].push_back({birth.value, death.value});
    }
  }
  for (std::size_t j = 0; j < cols.size(); ++j) {
    const Cell& cell = cells[order[j]];
    if (!paired[j] && cols[j].empty() && cell.dim < d) {
      out[static_cast<std::size_t>(cell.dim)].push_back({cell.value, inf});
    }
  }
  for (auto& dg : out) std::sort(dg.begin(), dg.end());
  return out;
}

inline double match_cost(const std::pair<double, double>& p, const std::pair<double, double>& q) {
  const bool pe = std::isinf(p.second), qe = std::isinf(q.second);
  if (pe && qe) return std::abs(p.first - q.first);
  if (pe || qe) return inf;
  return std::max(std::abs(p.first - q.first), std::abs(p.second - q.second));
}

inline double diagonal_cost(const std::pair<double, double>& p) {
  return std::isinf(p.second) ? inf : (p.second - p.first) / 2.0;
}

/// Bottleneck distance by enumerating every partial injection of a into b.
inline double exhaustive_bottleneck(const Diagram& a, const Diagram& b) {
  double best = inf;
  std::vector<bool> used(b.size(), false);
  // Depth-first over the points of a, each matched to a free point of b or the diagonal.
  auto rec = [&](auto&& self, std::size_t i, double cur) -> void {
    if (cur >= best) return;
    if (i == a.size()) {
      double c = cur;
      for (std::size_t j = 0; j < b.size(); ++j) {
        if (!used[j]) c = std::max(c, diagonal_cost(b[j]));
      }
      best = std::min(best, c);
      return;
    }
    self(self, i + 1, std::max(cur, diagonal_cost(a[i])));
    for (std::size_t j = 0; j < b.size(); ++j) {
      if (used[j]) continue;
      used[j] = true;
      self(self, i + 1, std::max(cur, match_cost(a[i], b[j])));
      used[j] = false;
    }
  };
  rec(rec, 0, 0.0);
  return best;
}

/// Distance from p to the closed axis-aligned square of voxel v.
inline double point_voxel_distance(const GridSpec& g, const resograph::Point3& p, std::int64_t v) {
  const auto c = g.coords(v);
  const auto lo = g.corner(c);
  double s = 0.0;
  for (int k = 0; k < g.d; ++k) {
    const double a = lo[k], b = lo[k] + g.spacing;
    const double t = p[k] < a ? a - p[k] : (p[k] > b ? p[k] - b : 0.0);
    s += t * t;
  }
  return std::sqrt(s);
}

/// Signed distance to the boundary of the union of closed occupied voxels,
/// evaluated at voxel centers. Assumes a fully empty border so the grid's
/// empty voxels carry the complement near every occupied voxel.
inline std::vector<double> box_union_csedt(const BinaryImage& img) {
  const GridSpec& g = img.grid();
  const std::int64_t n = g.voxel_count();
  std::vector<double> out(static_cast<std::size_t>(n));
  for (std::int64_t i = 0; i < n; ++i) {
    const auto p = g.center(i);
    double best = inf;
    for (std::int64_t j = 0; j < n; ++j) {
      if (img[j] != img[i]) best = std::min(best, point_voxel_distance(g, p, j));
    }
    out[static_cast<std::size_t>(i)] = img[i] ? -best : best;
  }
  return out;
}

}  // namespace oracle
