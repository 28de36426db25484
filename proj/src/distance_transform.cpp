#include "resograph/distance_transform.hpp"

#include <cmath>

namespace resograph {

namespace {

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

// Lower envelope of parabolas (x-u)^2 + F(u) over the sites with finite F,
// evaluated at x = 0..n-1 in place along one line of the buffer.
struct Envelope {
  std::vector<std::int64_t> line, site, start;

  void run(std::int64_t* data, std::int64_t n, std::int64_t stride) {
    line.resize(static_cast<std::size_t>(n));
    site.resize(static_cast<std::size_t>(n));
    start.resize(static_cast<std::size_t>(n));
    for (std::int64_t x = 0; x < n; ++x) line[static_cast<std::size_t>(x)] = data[x * stride];
    const auto F = [&](std::int64_t u) { return line[static_cast<std::size_t>(u)]; };
    // Last x at which site i is no worse than site u (i < u).
    const auto sep = [&](std::int64_t i, std::int64_t u) {
      return floor_div(u * u - i * i + F(u) - F(i), 2 * (u - i));
    };
    std::int64_t top = -1;
    for (std::int64_t u = 0; u < n; ++u) {
      if (F(u) == kNoSite) continue;
      while (top >= 0) {
        const auto t = static_cast<std::size_t>(top);
        if (sep(site[t], u) < start[t]) {
          --top;
        } else {
          break;
        }
      }
      if (top < 0) {
        ++top;
        site[0] = u;
        start[0] = 0;
      } else {
        const std::int64_t w = sep(site[static_cast<std::size_t>(top)], u) + 1;
        if (w < n) {
          ++top;
          site[static_cast<std::size_t>(top)] = u;
          start[static_cast<std::size_t>(top)] = w;
        }
      }
    }
    if (top < 0) return;  // no sites: line stays kNoSite
    std::int64_t k = 0;
    for (std::int64_t x = 0; x < n; ++x) {
      while (k < top && start[static_cast<std::size_t>(k + 1)] <= x) ++k;
      const std::int64_t u = site[static_cast<std::size_t>(k)];
      data[x * stride] = (x - u) * (x - u) + F(u);
    }
  }
};

}  // namespace

std::vector<std::int64_t> squared_edt(const BinaryImage& img, bool target) {
  const GridSpec& g = img.grid();
  std::vector<std::int64_t> buf(static_cast<std::size_t>(g.voxel_count()));
  for (std::int64_t i = 0; i < g.voxel_count(); ++i) {
    buf[static_cast<std::size_t>(i)] = img[i] == target ? 0 : kNoSite;
  }
  const std::int64_t nx = g.dims[0], ny = g.dims[1], nz = g.dims[2];
  Envelope env;
  for (int axis = 0; axis < g.d; ++axis) {
    const std::int64_t n = g.dims[axis];
    if (n == 1) continue;
    const std::int64_t stride = axis == 0 ? 1 : axis == 1 ? nx : nx * ny;
    for (std::int64_t z = 0; z < (axis == 2 ? 1 : nz); ++z) {
      for (std::int64_t y = 0; y < (axis == 1 ? 1 : ny); ++y) {
        for (std::int64_t x = 0; x < (axis == 0 ? 1 : nx); ++x) {
          env.run(buf.data() + g.index(x, y, z), n, stride);
        }
      }
    }
  }
  return buf;
}

SignedDistanceImage::SignedDistanceImage(GridSpec grid, std::vector<double> values,
                                         std::vector<std::int64_t> squared_int)
    : grid_(grid), values_(std::move(values)), squared_(std::move(squared_int)) {
  if (static_cast<std::int64_t>(values_.size()) != grid_.voxel_count()) {
    throw ParameterError("distance image size does not match grid " + grid_.describe());
  }
}

SignedDistanceImage dsedt(const BinaryImage& img) {
  if (img.single_phase()) throw DataError("DSEDT undefined: empty phase");
  const auto to_empty = squared_edt(img, false);
  const auto to_full = squared_edt(img, true);
  const double r = img.grid().spacing;
  std::vector<std::int64_t> sq(to_empty.size());
  std::vector<double> vals(to_empty.size());
  for (std::size_t i = 0; i < sq.size(); ++i) {
    const bool inside = img.occupied()[i] != 0;
    sq[i] = inside ? to_empty[i] : to_full[i];
    const double dist = r * std::sqrt(static_cast<double>(sq[i]));
    vals[i] = inside ? -dist : dist;
  }
  return SignedDistanceImage(img.grid(), std::move(vals), std::move(sq));
}

SignedDistanceImage dsedt(const BinaryImage& img, PadMode pad_mode) {
  if (pad_mode == PadMode::none) return dsedt(img);
  const BinaryImage padded = pad(img, pad_mode);
  const auto full = dsedt(padded);
  auto vals = crop_padding(padded.grid(), full.values(), img.grid());
  std::vector<std::int64_t> sq(vals.size());
  for (std::int64_t i = 0; i < img.grid().voxel_count(); ++i) {
    auto c = img.grid().coords(i);
    for (int k = 0; k < img.grid().d; ++k) c[k] += 1;
    sq[static_cast<std::size_t>(i)] =
        full.squared_int()[static_cast<std::size_t>(padded.grid().index(c))];
  }
  return SignedDistanceImage(img.grid(), std::move(vals), std::move(sq));
}

namespace {

// max over occupied voxels of `from` of the distance to `to`'s occupied set.
double directed_hausdorff(const BinaryImage& from, const BinaryImage& to) {
  const auto sq = squared_edt(to, true);
  std::int64_t worst = 0;
  for (std::int64_t i = 0; i < from.size(); ++i) {
    if (from[i]) worst = std::max(worst, sq[static_cast<std::size_t>(i)]);
  }
  if (worst == kNoSite) return std::numeric_limits<double>::infinity();
  return from.grid().spacing * std::sqrt(static_cast<double>(worst));
}

}  // namespace

double hausdorff(const BinaryImage& a, const BinaryImage& b) {
  if (!a.grid().same_shape(b.grid())) throw ParameterError("hausdorff needs images on one grid");
  if (a.count() == 0 || b.count() == 0) throw DataError("hausdorff distance of an empty set");
  return std::max(directed_hausdorff(a, b), directed_hausdorff(b, a));
}

BinaryImage erosion(const BinaryImage& img, double s) {
  if (!(s >= 0.0)) throw ParameterError("erosion radius must be >= 0");
  const auto sq = squared_edt(img, false);
  const double r = img.grid().spacing;
  std::vector<std::uint8_t> out(static_cast<std::size_t>(img.size()), 0);
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (!img.occupied()[i]) continue;
    out[i] = sq[i] == kNoSite || r * std::sqrt(static_cast<double>(sq[i])) > s;
  }
  return BinaryImage(img.grid(), std::move(out), img.threshold_used());
}

BinaryImage dilation(const BinaryImage& img, double s) {
  if (!(s >= 0.0)) throw ParameterError("dilation radius must be >= 0");
  const auto sq = squared_edt(img, true);
  const double r = img.grid().spacing;
  std::vector<std::uint8_t> out(static_cast<std::size_t>(img.size()), 0);
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = sq[i] != kNoSite && r * std::sqrt(static_cast<double>(sq[i])) <= s;
  }
  return BinaryImage(img.grid(), std::move(out), img.threshold_used());
}

double leash(const BinaryImage& img, double s) {
  if (!(s >= 0.0)) throw ParameterError("leash radius must be >= 0");
  if (img.count() == 0) return 0.0;
  const BinaryImage eroded = erosion(img, s);
  if (eroded.count() == 0) return std::numeric_limits<double>::infinity();
  return directed_hausdorff(img, eroded);
}

double two_sided_leash(const BinaryImage& img, double s) {
  return std::max(leash(img, s), leash(img.complement(), s));
}

}  // namespace resograph
