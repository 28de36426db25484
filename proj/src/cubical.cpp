#include "resograph/cubical.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace resograph {

namespace {

struct Keyed {
  double value;
  std::int64_t cell;
  bool operator<(const Keyed& o) const {
    return value < o.value || (value == o.value && cell < o.cell);
  }
};

class UnionFind {
 public:
  explicit UnionFind(std::int64_t n) : parent_(static_cast<std::size_t>(n)) {
    std::iota(parent_.begin(), parent_.end(), std::int64_t{0});
  }
  std::int64_t find(std::int64_t x) {
    while (parent_[static_cast<std::size_t>(x)] != x) {
      auto& p = parent_[static_cast<std::size_t>(x)];
      p = parent_[static_cast<std::size_t>(p)];
      x = p;
    }
    return x;
  }
  void link(std::int64_t child, std::int64_t root) { parent_[static_cast<std::size_t>(child)] = root; }

 private:
  std::vector<std::int64_t> parent_;
};

std::vector<Keyed> sorted_cells_of_dim(const CubicalFiltration& f, int dim) {
  std::vector<Keyed> out;
  const auto& s = f.shape();
  for (std::int64_t z = 0; z < s[2]; ++z) {
    for (std::int64_t y = 0; y < s[1]; ++y) {
      for (std::int64_t x = 0; x < s[0]; ++x) {
        const int k = static_cast<int>((x & 1) + (y & 1) + (z & 1));
        if (k != dim) continue;
        const std::int64_t c = f.cell_index({x, y, z});
        out.push_back({f.value(c), c});
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

// Symmetric difference of two ascending index lists.
void add_column(std::vector<std::int32_t>& col, const std::vector<std::int32_t>& other,
                std::vector<std::int32_t>& scratch) {
  scratch.clear();
  std::size_t i = 0, j = 0;
  while (i < col.size() && j < other.size()) {
    if (col[i] < other[j]) {
      scratch.push_back(col[i++]);
    } else if (other[j] < col[i]) {
      scratch.push_back(other[j++]);
    } else {
      ++i;
      ++j;
    }
  }
  scratch.insert(scratch.end(), col.begin() + static_cast<std::ptrdiff_t>(i), col.end());
  scratch.insert(scratch.end(), other.begin() + static_cast<std::ptrdiff_t>(j), other.end());
  col.swap(scratch);
}

void push_pair(PersistenceDiagram& diag, double birth, double death) {
  if (birth < death) diag.points.emplace_back(birth, death);
}

}  // namespace

CubicalFiltration CubicalFiltration::build(const GrayscaleImage& img) {
  const GridSpec& g = img.grid();
  g.validate();
  CubicalFiltration f;
  f.grid_ = g;
  for (int k = 0; k < g.d; ++k) f.shape_[k] = 2 * g.dims[k] + 1;
  f.values_.assign(img.values().begin(), img.values().end());
  for (std::int64_t i = 0; i < img.size(); ++i) {
    if (!std::isfinite(img[i])) {
      const auto c = g.coords(i);
      throw DataError("non-finite voxel value at (" + std::to_string(c[0]) + "," +
                      std::to_string(c[1]) + "," + std::to_string(c[2]) + ")");
    }
  }
  return f;
}

CubicalFiltration CubicalFiltration::build(const SignedDistanceImage& img) {
  return build(img.as_grayscale());
}

int CubicalFiltration::cell_dim(std::int64_t cell) const {
  const auto c = cell_coords(cell);
  return static_cast<int>((c[0] & 1) + (c[1] & 1) + (c[2] & 1));
}

double CubicalFiltration::value(std::int64_t cell) const {
  const auto c = cell_coords(cell);
  std::int64_t lo[3] = {0, 0, 0};
  std::int64_t hi[3] = {0, 0, 0};
  for (int k = 0; k < grid_.d; ++k) {
    if (c[k] & 1) {
      lo[k] = hi[k] = (c[k] - 1) / 2;
    } else {
      lo[k] = std::max<std::int64_t>(c[k] / 2 - 1, 0);
      hi[k] = std::min<std::int64_t>(c[k] / 2, grid_.dims[k] - 1);
    }
  }
  double v = kInfinity;
  for (std::int64_t z = lo[2]; z <= hi[2]; ++z) {
    for (std::int64_t y = lo[1]; y <= hi[1]; ++y) {
      for (std::int64_t x = lo[0]; x <= hi[0]; ++x) {
        v = std::min(v, values_[static_cast<std::size_t>(grid_.index(x, y, z))]);
      }
    }
  }
  return v;
}

std::size_t PersistenceDiagram::essential_count() const {
  return static_cast<std::size_t>(std::count_if(
      points.begin(), points.end(), [](const auto& p) { return std::isinf(p.second); }));
}

void PersistenceDiagram::sort_points() { std::sort(points.begin(), points.end()); }

std::vector<PersistenceDiagram> compute_persistence(const CubicalFiltration& filt) {
  const int d = filt.d();
  const GridSpec& g = filt.grid();
  std::vector<PersistenceDiagram> diagrams(static_cast<std::size_t>(d));
  for (int k = 0; k < d; ++k) diagrams[static_cast<std::size_t>(k)].dim = k;

  const auto edges = sorted_cells_of_dim(filt, 1);
  std::vector<std::uint8_t> edge_negative(edges.size(), 0);

  // Dimension 0: components merge along ascending edges; the younger dies.
  {
    const std::int64_t vx = g.dims[0] + 1;
    const std::int64_t vy = g.d >= 2 ? g.dims[1] + 1 : 1;
    const std::int64_t vz = g.d >= 3 ? g.dims[2] + 1 : 1;
    const auto vertex_id = [&](const Index3& c) { return c[0] / 2 + vx * (c[1] / 2 + vy * (c[2] / 2)); };
    const auto vertex_cell = [&](std::int64_t v) {
      return filt.cell_index({2 * (v % vx), 2 * ((v / vx) % vy), 2 * (v / (vx * vy))});
    };
    const std::int64_t nv = vx * vy * vz;
    UnionFind uf(nv);
    // Each root remembers the oldest vertex of its component.
    std::vector<std::int64_t> oldest(static_cast<std::size_t>(nv));
    std::iota(oldest.begin(), oldest.end(), std::int64_t{0});
    std::vector<double> vval(static_cast<std::size_t>(nv));
    for (std::int64_t v = 0; v < nv; ++v) vval[static_cast<std::size_t>(v)] = filt.value(vertex_cell(v));
    const auto older = [&](std::int64_t a, std::int64_t b) {
      const double va = vval[static_cast<std::size_t>(a)];
      const double vb = vval[static_cast<std::size_t>(b)];
      return va < vb || (va == vb && a < b);
    };
    for (std::size_t e = 0; e < edges.size(); ++e) {
      auto c = filt.cell_coords(edges[e].cell);
      int axis = 0;
      while ((c[axis] & 1) == 0) ++axis;
      Index3 a = c, b = c;
      --a[axis];
      ++b[axis];
      const std::int64_t ra = uf.find(vertex_id(a));
      const std::int64_t rb = uf.find(vertex_id(b));
      if (ra == rb) continue;
      edge_negative[e] = 1;
      const std::int64_t oa = oldest[static_cast<std::size_t>(ra)];
      const std::int64_t ob = oldest[static_cast<std::size_t>(rb)];
      const bool a_elder = older(oa, ob);
      const std::int64_t young = a_elder ? ob : oa;
      push_pair(diagrams[0], vval[static_cast<std::size_t>(young)], edges[e].value);
      if (a_elder) {
        uf.link(rb, ra);
      } else {
        uf.link(ra, rb);
      }
    }
    const std::int64_t root = uf.find(0);
    diagrams[0].points.emplace_back(vval[static_cast<std::size_t>(oldest[static_cast<std::size_t>(root)])],
                                    kInfinity);
  }

  // Dimension d-1 by duality: top cells merge across descending (d-1)-cells,
  // with the outside of the box as an extra node that never dies.
  std::vector<Keyed> faces;
  std::vector<std::uint8_t> face_cleared;
  {
    std::vector<Keyed> own;
    if (d != 2) own = sorted_cells_of_dim(filt, d - 1);
    const std::vector<Keyed>& fs = d == 2 ? edges : own;
    const std::int64_t nvox = g.voxel_count();
    const std::int64_t outside = nvox;
    UnionFind uf(nvox + 1);
    // Representative = youngest top cell of the component (outside beats all).
    std::vector<std::int64_t> rep(static_cast<std::size_t>(nvox + 1));
    std::iota(rep.begin(), rep.end(), std::int64_t{0});
    const auto younger = [&](std::int64_t a, std::int64_t b) {
      if (a == outside) return true;
      if (b == outside) return false;
      const double va = filt.voxel_value(a);
      const double vb = filt.voxel_value(b);
      return va > vb || (va == vb && a > b);
    };
    std::vector<std::uint8_t> cleared(fs.size(), 0);
    for (std::size_t i = fs.size(); i-- > 0;) {
      const auto c = filt.cell_coords(fs[i].cell);
      int axis = 0;
      while (axis < d && (c[axis] & 1) == 1) ++axis;
      std::int64_t ends[2];
      for (int side = 0; side < 2; ++side) {
        Index3 t = c;
        t[axis] += side == 0 ? -1 : 1;
        if (t[axis] < 1 || t[axis] > 2 * g.dims[axis] - 1) {
          ends[side] = outside;
        } else {
          ends[side] = g.index((t[0] - 1) / 2, d >= 2 ? (t[1] - 1) / 2 : 0, d >= 3 ? (t[2] - 1) / 2 : 0);
        }
      }
      const std::int64_t ra = uf.find(ends[0]);
      const std::int64_t rb = uf.find(ends[1]);
      if (ra == rb) continue;
      cleared[i] = 1;
      const std::int64_t pa = rep[static_cast<std::size_t>(ra)];
      const std::int64_t pb = rep[static_cast<std::size_t>(rb)];
      const bool a_survives = younger(pa, pb);
      const std::int64_t dies = a_survives ? pb : pa;
      push_pair(diagrams[static_cast<std::size_t>(d - 1)], fs[i].value, filt.voxel_value(dies));
      if (a_survives) {
        uf.link(rb, ra);
      } else {
        uf.link(ra, rb);
      }
    }
    if (d == 3) {
      faces = std::move(own);
      face_cleared = std::move(cleared);
    }
  }

  // Middle dimension (3D only): reduce the square columns that the dual pass
  // did not pair. Rows of dimension-0 killers never become pivots and are dropped.
  if (d == 3) {
    std::vector<std::int32_t> edge_rank(static_cast<std::size_t>(filt.cell_count()), -1);
    for (std::size_t e = 0; e < edges.size(); ++e) {
      edge_rank[static_cast<std::size_t>(edges[e].cell)] = static_cast<std::int32_t>(e);
    }
    std::vector<std::int32_t> pivot_owner(edges.size(), -1);
    std::vector<std::vector<std::int32_t>> stored;
    std::vector<std::int32_t> col, scratch;
    for (std::size_t i = 0; i < faces.size(); ++i) {
      if (face_cleared[i]) continue;
      const auto c = filt.cell_coords(faces[i].cell);
      col.clear();
      for (int axis = 0; axis < 3; ++axis) {
        if ((c[axis] & 1) == 0) continue;
        for (int side : {-1, 1}) {
          Index3 t = c;
          t[axis] += side;
          const std::int32_t r = edge_rank[static_cast<std::size_t>(filt.cell_index(t))];
          if (!edge_negative[static_cast<std::size_t>(r)]) col.push_back(r);
        }
      }
      std::sort(col.begin(), col.end());
      while (!col.empty()) {
        const std::int32_t owner = pivot_owner[static_cast<std::size_t>(col.back())];
        if (owner < 0) break;
        add_column(col, stored[static_cast<std::size_t>(owner)], scratch);
      }
      if (col.empty()) continue;
      pivot_owner[static_cast<std::size_t>(col.back())] = static_cast<std::int32_t>(stored.size());
      push_pair(diagrams[1], edges[static_cast<std::size_t>(col.back())].value, faces[i].value);
      stored.push_back(col);
    }
    for (std::size_t e = 0; e < edges.size(); ++e) {
      if (!edge_negative[e] && pivot_owner[e] < 0) diagrams[1].points.emplace_back(edges[e].value, kInfinity);
    }
  }

  for (auto& dg : diagrams) dg.sort_points();
  return diagrams;
}

std::size_t betti_curve(const PersistenceDiagram& diag, double delta) {
  std::size_t n = 0;
  for (const auto& [b, dth] : diag.points) n += (b <= delta && delta < dth);
  return n;
}

}  // namespace resograph
