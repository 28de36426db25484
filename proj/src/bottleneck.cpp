#include "resograph/bottleneck.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <unordered_map>

namespace resograph {

namespace {

using Point = std::pair<double, double>;

double half_persistence(const Point& p) { return (p.second - p.first) / 2.0; }

double linf(const Point& a, const Point& b) {
  return std::max(std::abs(a.first - b.first), std::abs(a.second - b.second));
}

// Uniform buckets over (birth, death) for radius queries in the L-infinity metric.
class BucketGrid {
 public:
  BucketGrid(const std::vector<Point>& pts, double radius) : pts_(pts) {
    double lo = kInfinity, hi = -kInfinity;
    for (const auto& p : pts) {
      lo = std::min({lo, p.first, p.second});
      hi = std::max({hi, p.first, p.second});
    }
    origin_ = pts.empty() ? 0.0 : lo;
    const double span = pts.empty() ? 1.0 : hi - lo;
    cell_ = std::max(radius, span > 0.0 ? span * 0x1.0p-24 : 1.0);
    for (std::size_t i = 0; i < pts.size(); ++i) buckets_[key(cell_of(pts[i].first), cell_of(pts[i].second))].push_back(i);
  }

  template <typename Fn>
  void for_each_near(const Point& q, double radius, Fn&& fn) const {
    const std::int64_t cx = cell_of(q.first), cy = cell_of(q.second);
    for (std::int64_t dx = -1; dx <= 1; ++dx) {
      for (std::int64_t dy = -1; dy <= 1; ++dy) {
        const auto it = buckets_.find(key(cx + dx, cy + dy));
        if (it == buckets_.end()) continue;
        for (std::size_t j : it->second) {
          if (linf(q, pts_[j]) <= radius) fn(j);
        }
      }
    }
  }

 private:
  std::int64_t cell_of(double v) const {
    const double c = std::floor((v - origin_) / cell_);
    return static_cast<std::int64_t>(std::clamp(c, -4.0e15, 4.0e15));
  }
  static std::uint64_t key(std::int64_t x, std::int64_t y) {
    return static_cast<std::uint64_t>(x) * 0x9E3779B97F4A7C15ull ^ static_cast<std::uint64_t>(y);
  }

  const std::vector<Point>& pts_;
  double origin_ = 0.0;
  double cell_ = 1.0;
  std::unordered_map<std::uint64_t, std::vector<std::size_t>> buckets_;
};

// Maximum matching size of left vertices into right vertices (Hopcroft-Karp).
std::size_t max_matching(const std::vector<std::vector<std::size_t>>& adj, std::size_t n_right) {
  const std::size_t n_left = adj.size();
  constexpr std::size_t none = static_cast<std::size_t>(-1);
  std::vector<std::size_t> match_l(n_left, none), match_r(n_right, none), dist(n_left);
  std::vector<std::size_t> queue, it(n_left), stack;
  std::size_t matched = 0;
  while (true) {
    queue.clear();
    for (std::size_t u = 0; u < n_left; ++u) {
      if (match_l[u] == none) {
        dist[u] = 0;
        queue.push_back(u);
      } else {
        dist[u] = none;
      }
    }
    bool found = false;
    for (std::size_t h = 0; h < queue.size(); ++h) {
      const std::size_t u = queue[h];
      for (std::size_t v : adj[u]) {
        const std::size_t w = match_r[v];
        if (w == none) {
          found = true;
        } else if (dist[w] == none) {
          dist[w] = dist[u] + 1;
          queue.push_back(w);
        }
      }
    }
    if (!found) break;
    std::fill(it.begin(), it.end(), 0);
    for (std::size_t root = 0; root < n_left; ++root) {
      if (match_l[root] != none) continue;
      // Iterative layered DFS from root.
      stack.assign(1, root);
      bool augmented = false;
      while (!stack.empty() && !augmented) {
        const std::size_t u = stack.back();
        if (it[u] == adj[u].size()) {
          dist[u] = none;
          stack.pop_back();
          continue;
        }
        const std::size_t v = adj[u][it[u]++];
        const std::size_t w = match_r[v];
        if (w == none) {
          // Flip the path recorded on the stack.
          std::size_t right = v;
          for (std::size_t k = stack.size(); k-- > 0;) {
            const std::size_t l = stack[k];
            const std::size_t prev = match_l[l];
            match_l[l] = right;
            match_r[right] = l;
            right = prev;
          }
          augmented = true;
        } else if (dist[w] == dist[u] + 1) {
          stack.push_back(w);
        }
      }
      if (augmented) ++matched;
    }
  }
  return matched;
}

// Can every point of `must` (indices into a) be matched within eps into b?
bool saturates(const std::vector<Point>& a, const std::vector<std::size_t>& must,
               const std::vector<Point>& b, const BucketGrid& grid, double eps) {
  if (must.empty()) return true;
  if (must.size() > b.size()) return false;
  std::vector<std::vector<std::size_t>> adj(must.size());
  for (std::size_t i = 0; i < must.size(); ++i) {
    grid.for_each_near(a[must[i]], eps, [&](std::size_t j) { adj[i].push_back(j); });
    if (adj[i].empty()) return false;
  }
  return max_matching(adj, b.size()) == must.size();
}

struct Split {
  std::vector<Point> finite;
  std::vector<double> essential;
};

Split split(const PersistenceDiagram& d) {
  Split s;
  for (const auto& p : d.points) {
    if (std::isinf(p.second)) {
      s.essential.push_back(p.first);
    } else {
      s.finite.push_back(p);
    }
  }
  std::sort(s.essential.begin(), s.essential.end());
  return s;
}

// Bottleneck cost of the essential parts: sorted order is optimal on a line.
double essential_cost(const std::vector<double>& a, const std::vector<double>& b, std::size_t* arg) {
  if (a.size() != b.size()) return kInfinity;
  double c = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double v = std::abs(a[i] - b[i]);
    if (v > c) {
      c = v;
      if (arg) *arg = i;
    }
  }
  return c;
}

double upper_bound(const std::vector<Point>& a, const std::vector<Point>& b) {
  double hi = 0.0;
  for (const auto& p : a) hi = std::max(hi, half_persistence(p));
  for (const auto& p : b) hi = std::max(hi, half_persistence(p));
  return hi;
}

void check_dims(const PersistenceDiagram& a, const PersistenceDiagram& b) {
  if (a.dim != b.dim) {
    throw ParameterError("bottleneck distance between diagrams of dimensions " +
                         std::to_string(a.dim) + " and " + std::to_string(b.dim));
  }
}

// A pair or diagonal assignment whose cost equals eps, if one exists.
std::optional<MatchedPair> find_witness(const std::vector<Point>& a, const std::vector<Point>& b,
                                        double eps) {
  for (const auto* side : {&a, &b}) {
    for (const auto& p : *side) {
      if (half_persistence(p) == eps) {
        const double m = (p.first + p.second) / 2.0;
        return MatchedPair{p, {m, m}, true, eps};
      }
    }
  }
  const BucketGrid grid(b, eps);
  for (const auto& p : a) {
    std::optional<MatchedPair> w;
    grid.for_each_near(p, eps, [&](std::size_t j) {
      if (!w && linf(p, b[j]) == eps) w = MatchedPair{p, b[j], false, eps};
    });
    if (w) return w;
  }
  return std::nullopt;
}

}  // namespace

bool bottleneck_feasible(const std::vector<Point>& a, const std::vector<Point>& b, double eps) {
  std::vector<std::size_t> must_a, must_b;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (half_persistence(a[i]) > eps) must_a.push_back(i);
  }
  for (std::size_t i = 0; i < b.size(); ++i) {
    if (half_persistence(b[i]) > eps) must_b.push_back(i);
  }
  // A matching covering must_a and one covering must_b combine into one
  // covering both (Mendelsohn-Dulmage); everything else may use the diagonal.
  if (!saturates(a, must_a, b, BucketGrid(b, eps), eps)) return false;
  return saturates(b, must_b, a, BucketGrid(a, eps), eps);
}

BottleneckResult bottleneck_exact(const PersistenceDiagram& a, const PersistenceDiagram& b) {
  check_dims(a, b);
  const Split sa = split(a), sb = split(b);
  BottleneckResult res;
  std::size_t arg = 0;
  const double ess = essential_cost(sa.essential, sb.essential, &arg);

  // Smallest double eps with a feasible matching; the answer is one of the
  // candidate costs, all computed by the same expressions the test uses.
  double fin = 0.0;
  if (!bottleneck_feasible(sa.finite, sb.finite, 0.0)) {
    std::uint64_t lo = std::bit_cast<std::uint64_t>(0.0);
    std::uint64_t hi = std::bit_cast<std::uint64_t>(upper_bound(sa.finite, sb.finite));
    while (hi - lo > 1) {
      const std::uint64_t mid = lo + (hi - lo) / 2;
      if (bottleneck_feasible(sa.finite, sb.finite, std::bit_cast<double>(mid))) {
        hi = mid;
      } else {
        lo = mid;
      }
    }
    fin = std::bit_cast<double>(hi);
  }
  res.distance = std::max(fin, ess);
  if (std::isinf(ess)) {
    res.witness.reset();
  } else if (ess > fin) {
    res.witness = MatchedPair{{sa.essential[arg], kInfinity}, {sb.essential[arg], kInfinity}, false, ess};
  } else if (fin > 0.0) {
    res.witness = find_witness(sa.finite, sb.finite, fin);
  }
  return res;
}

BottleneckResult bottleneck_approx(const PersistenceDiagram& a, const PersistenceDiagram& b,
                                   double delta) {
  check_dims(a, b);
  if (!(delta > 0.0) || !std::isfinite(delta)) throw ParameterError("delta must be positive");
  const Split sa = split(a), sb = split(b);
  BottleneckResult res;
  res.exact = false;
  res.delta = delta;
  const double ess = essential_cost(sa.essential, sb.essential, nullptr);
  double fin = 0.0;
  if (!bottleneck_feasible(sa.finite, sb.finite, 0.0)) {
    double lo = 0.0;
    double hi = upper_bound(sa.finite, sb.finite);
    while (hi - lo > delta) {
      const double mid = lo + (hi - lo) / 2.0;
      if (mid <= lo || mid >= hi) break;
      if (bottleneck_feasible(sa.finite, sb.finite, mid)) {
        hi = mid;
      } else {
        lo = mid;
      }
    }
    fin = hi;
  }
  res.distance = std::max(fin, ess);
  return res;
}

}  // namespace resograph
