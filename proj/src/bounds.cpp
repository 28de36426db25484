#include "resograph/bounds.hpp"

#include <algorithm>
#include <cmath>

#include "resograph/distance_transform.hpp"

namespace resograph {

namespace {

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) throw ParameterError(std::string(what) + " must be positive");
}

void require_dim(int d) {
  if (d != 2 && d != 3) throw ParameterError("dimension must be 2 or 3");
}

// Min over the 3^d neighborhood of each voxel, clipped at the grid border.
std::vector<double> min_filter(const GrayscaleImage& img) {
  const GridSpec& g = img.grid();
  std::vector<double> cur(img.values().begin(), img.values().end());
  std::vector<double> next(cur.size());
  for (int axis = 0; axis < g.d; ++axis) {
    for (std::int64_t i = 0; i < g.voxel_count(); ++i) {
      const auto c = g.coords(i);
      double v = cur[static_cast<std::size_t>(i)];
      for (int s : {-1, 1}) {
        auto n = c;
        n[axis] += s;
        if (n[axis] < 0 || n[axis] >= g.dims[axis]) continue;
        v = std::min(v, cur[static_cast<std::size_t>(g.index(n))]);
      }
      next[static_cast<std::size_t>(i)] = v;
    }
    cur.swap(next);
  }
  return cur;
}

}  // namespace

void BoundReport::set(const std::string& name, double value, std::string reason) {
  bounds[name] = BoundEntry{value, true, std::move(reason)};
}

void BoundReport::set_absent(const std::string& name, std::string reason) {
  bounds[name] = BoundEntry{std::nullopt, false, std::move(reason)};
}

std::optional<double> BoundReport::get(const std::string& name) const {
  const auto it = bounds.find(name);
  if (it == bounds.end() || !it->second.applicable) return std::nullopt;
  return it->second.value;
}

nlohmann::json BoundReport::to_json() const {
  nlohmann::json j;
  j["r"] = r;
  j["d"] = d;
  j["bounds"] = nlohmann::json::object();
  for (const auto& [name, e] : bounds) {
    nlohmann::json b;
    b["applicable"] = e.applicable;
    b["value"] = e.value ? nlohmann::json(*e.value) : nlohmann::json(nullptr);
    if (!e.reason.empty()) b["reason"] = e.reason;
    j["bounds"][name] = b;
  }
  j["inputs"] = inputs;
  return j;
}

double grayscale_bound(const GrayscaleImage& fine, std::int64_t a) {
  const GridSpec coarse = fine.grid().coarsened(a);
  const auto grown_min = min_filter(fine);
  std::vector<double> bmax(static_cast<std::size_t>(coarse.voxel_count()), -std::numeric_limits<double>::infinity());
  std::vector<double> bmin(bmax.size(), std::numeric_limits<double>::infinity());
  const GridSpec& g = fine.grid();
  for (std::int64_t i = 0; i < g.voxel_count(); ++i) {
    auto c = g.coords(i);
    for (int k = 0; k < g.d; ++k) c[k] /= a;
    const auto b = static_cast<std::size_t>(coarse.index(c));
    bmax[b] = std::max(bmax[b], fine[i]);
    bmin[b] = std::min(bmin[b], grown_min[static_cast<std::size_t>(i)]);
  }
  double M = 0.0;
  for (std::size_t b = 0; b < bmax.size(); ++b) M = std::max(M, bmax[b] - bmin[b]);
  return M;
}

double lipschitz_bound(double L, double r, int d) {
  if (!(L >= 0.0) || !std::isfinite(L)) throw ParameterError("Lipschitz constant must be >= 0");
  require_positive(r, "spacing");
  require_dim(d);
  return L * r * std::sqrt(static_cast<double>(d));
}

double lipschitz_pair_bound(double L, double r1, double r2, int d) {
  if (!(L >= 0.0) || !std::isfinite(L)) throw ParameterError("Lipschitz constant must be >= 0");
  require_positive(r1, "r1");
  require_positive(r2, "r2");
  require_dim(d);
  const double q = r2 / r1;
  const bool divisible = q >= 1.0 && std::abs(q - std::round(q)) <= 1e-12 * q;
  return L * (divisible ? r2 : r1 + r2) * std::sqrt(static_cast<double>(d));
}

double leash_bound(double mleash_value, double r, int d) {
  if (!(mleash_value >= 0.0)) throw ParameterError("leash value must be >= 0");
  require_positive(r, "spacing");
  require_dim(d);
  return mleash_value + 2.0 * std::sqrt(static_cast<double>(d)) * r;
}

std::optional<double> reach_bound(double mreach_value, double r, int d) {
  if (!(mreach_value > 0.0)) throw ParameterError("reach must be positive");
  require_positive(r, "spacing");
  require_dim(d);
  const double sd = std::sqrt(static_cast<double>(d));
  if (r < mreach_value / sd) return 2.0 * sd * r;
  return std::nullopt;
}

RhoBoundResult rho_bound(const GrayscaleImage& rho, double t, double eps) {
  if (!(eps >= 0.0 && eps < 1.0)) throw ParameterError("rho eps must lie in [0,1)");
  const BinaryImage x = threshold(rho, t);
  const auto D = dsedt(x);
  double m = -std::numeric_limits<double>::infinity();
  for (std::int64_t i = 0; i < rho.size(); ++i) {
    if (rho[i] > eps) m = std::max(m, D[i]);
    if (rho[i] < 1.0 - eps) m = std::max(m, -D[i]);
  }
  RhoBoundResult out;
  out.m_raw = m;
  out.m = std::max(m, 0.0);
  out.bound = out.m + 2.0 * std::sqrt(static_cast<double>(rho.grid().d)) * rho.grid().spacing;
  return out;
}

std::vector<Violation> verify_bounds(const std::vector<Measurement>& measured,
                                     const std::map<double, BoundReport>& reports,
                                     double tolerance) {
  std::vector<Violation> out;
  for (const auto& m : measured) {
    const auto it = reports.find(m.n);
    if (it == reports.end()) continue;
    for (const auto& [name, e] : it->second.bounds) {
      if (!e.applicable || !e.value) continue;
      if (m.distance > *e.value + tolerance) out.push_back({m.n, m.dim, m.distance, name, *e.value});
    }
  }
  return out;
}

}  // namespace resograph
