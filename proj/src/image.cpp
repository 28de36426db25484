#include "resograph/image.hpp"

#include <algorithm>
#include <cmath>

namespace resograph {

namespace {

// Visits every fine voxel, handing over the linear index of its coarse block.
template <typename Fn>
void for_each_block_member(const GridSpec& fine, std::int64_t a, Fn&& fn) {
  const GridSpec coarse = fine.coarsened(a);
  for (std::int64_t z = 0; z < fine.dims[2]; ++z) {
    for (std::int64_t y = 0; y < fine.dims[1]; ++y) {
      const std::int64_t row = fine.index(0, y, z);
      const std::int64_t crow = coarse.index(0, y / a, fine.d == 3 ? z / a : 0);
      for (std::int64_t x = 0; x < fine.dims[0]; ++x) fn(row + x, crow + x / a);
    }
  }
}

}  // namespace

GrayscaleImage digital_approximation(const ScalarField& f, const GridSpec& grid,
                                     int quadrature_order) {
  grid.validate();
  if (quadrature_order < 1) throw ParameterError("quadrature order must be >= 1");
  const int q = quadrature_order;
  const int d = grid.d;
  const double h = grid.spacing / q;
  const std::int64_t samples = d == 2 ? q * q : q * q * q;
  std::vector<double> out(static_cast<std::size_t>(grid.voxel_count()));
  for (std::int64_t i = 0; i < grid.voxel_count(); ++i) {
    const Point3 lo = grid.corner(grid.coords(i));
    double sum = 0.0;
    for (std::int64_t s = 0; s < samples; ++s) {
      Point3 p{0.0, 0.0, 0.0};
      std::int64_t rest = s;
      for (int k = 0; k < d; ++k) {
        p[k] = lo[k] + (static_cast<double>(rest % q) + 0.5) * h;
        rest /= q;
      }
      const double v = f(p);
      if (!std::isfinite(v)) {
        const auto c = grid.coords(i);
        throw DataError("non-finite field sample in voxel (" + std::to_string(c[0]) + "," +
                        std::to_string(c[1]) + "," + std::to_string(c[2]) + ")");
      }
      sum += v;
    }
    out[static_cast<std::size_t>(i)] = sum / static_cast<double>(samples);
  }
  return GrayscaleImage(grid, std::move(out));
}

BinaryImage threshold(const GrayscaleImage& rho, double t) {
  if (!(t > 0.0 && t <= 1.0)) throw ParameterError("threshold t must lie in (0,1]");
  if (!rho.is_density()) throw ParameterError("threshold expects a density image");
  std::vector<std::uint8_t> occ(static_cast<std::size_t>(rho.size()));
  for (std::int64_t i = 0; i < rho.size(); ++i) occ[static_cast<std::size_t>(i)] = rho[i] >= t;
  return BinaryImage(rho.grid(), std::move(occ), t);
}

bool meets_fraction(std::int64_t count, std::int64_t total, double t) {
  // t = m * 2^-k exactly; compare count * 2^k >= m * total.
  int exp = 0;
  const double frac = std::frexp(t, &exp);  // t = frac * 2^exp, frac in [0.5,1)
  auto mant = static_cast<std::int64_t>(std::ldexp(frac, 53));
  int k = 53 - exp;
  while (k > 0 && (mant & 1) == 0) {
    mant >>= 1;
    --k;
  }
  using i128 = __int128;
  const i128 rhs = static_cast<i128>(mant) * total;
  if (k <= 0) return static_cast<i128>(count) >= (rhs << (-k));
  if (k > 90) return count >= 1;  // 0 < t*total < 1
  return (static_cast<i128>(count) << k) >= rhs;
}

BinaryImage downsample_binary(const BinaryImage& img, std::int64_t a, double t) {
  if (!(t > 0.0 && t <= 1.0)) throw ParameterError("threshold t must lie in (0,1]");
  const GridSpec coarse = img.grid().coarsened(a);
  std::vector<std::int64_t> counts(static_cast<std::size_t>(coarse.voxel_count()), 0);
  const auto occ = img.occupied();
  for_each_block_member(img.grid(), a, [&](std::int64_t fine, std::int64_t block) {
    counts[static_cast<std::size_t>(block)] += occ[static_cast<std::size_t>(fine)];
  });
  std::int64_t block_size = 1;
  for (int k = 0; k < img.grid().d; ++k) block_size *= a;
  std::vector<std::uint8_t> out(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i) out[i] = meets_fraction(counts[i], block_size, t);
  return BinaryImage(coarse, std::move(out), t);
}

GrayscaleImage downsample_gray(const GrayscaleImage& img, std::int64_t a) {
  const GridSpec coarse = img.grid().coarsened(a);
  std::vector<double> sums(static_cast<std::size_t>(coarse.voxel_count()), 0.0);
  const auto vals = img.values();
  for_each_block_member(img.grid(), a, [&](std::int64_t fine, std::int64_t block) {
    sums[static_cast<std::size_t>(block)] += vals[static_cast<std::size_t>(fine)];
  });
  double block_size = 1.0;
  for (int k = 0; k < img.grid().d; ++k) block_size *= static_cast<double>(a);
  for (auto& s : sums) s /= block_size;
  if (img.is_density()) {
    for (auto& s : sums) s = std::clamp(s, 0.0, 1.0);
  }
  return GrayscaleImage(coarse, std::move(sums), img.is_density());
}

GrayscaleImage block_density(const BinaryImage& img, std::int64_t a) {
  const GridSpec coarse = img.grid().coarsened(a);
  std::vector<std::int64_t> counts(static_cast<std::size_t>(coarse.voxel_count()), 0);
  const auto occ = img.occupied();
  for_each_block_member(img.grid(), a, [&](std::int64_t fine, std::int64_t block) {
    counts[static_cast<std::size_t>(block)] += occ[static_cast<std::size_t>(fine)];
  });
  double block_size = 1.0;
  for (int k = 0; k < img.grid().d; ++k) block_size *= static_cast<double>(a);
  std::vector<double> rho(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i) {
    rho[i] = static_cast<double>(counts[i]) / block_size;
  }
  return GrayscaleImage(coarse, std::move(rho), true);
}

PadMode parse_pad_mode(const std::string& s) {
  if (s == "none") return PadMode::none;
  if (s == "solid") return PadMode::solid;
  if (s == "void") return PadMode::void_;
  throw ParameterError("unknown pad mode '" + s + "' (expected none|solid|void)");
}

BinaryImage pad(const BinaryImage& img, PadMode mode) {
  if (mode == PadMode::none) return img;
  const GridSpec& g = img.grid();
  GridSpec p = g;
  for (int k = 0; k < g.d; ++k) {
    p.dims[k] = g.dims[k] + 2;
    p.origin[k] = g.origin[k] - g.spacing;
  }
  const std::uint8_t fill = mode == PadMode::solid ? 1 : 0;
  std::vector<std::uint8_t> out(static_cast<std::size_t>(p.voxel_count()), fill);
  const std::int64_t off = 1;
  for (std::int64_t i = 0; i < g.voxel_count(); ++i) {
    auto c = g.coords(i);
    for (int k = 0; k < g.d; ++k) c[k] += off;
    out[static_cast<std::size_t>(p.index(c))] = img[i];
  }
  return BinaryImage(p, std::move(out), img.threshold_used());
}

std::vector<double> crop_padding(const GridSpec& padded, std::span<const double> values,
                                 const GridSpec& original) {
  std::vector<double> out(static_cast<std::size_t>(original.voxel_count()));
  for (std::int64_t i = 0; i < original.voxel_count(); ++i) {
    auto c = original.coords(i);
    for (int k = 0; k < original.d; ++k) c[k] += 1;
    out[static_cast<std::size_t>(i)] = values[static_cast<std::size_t>(padded.index(c))];
  }
  return out;
}

std::vector<std::int64_t> divisors(std::int64_t n) {
  std::vector<std::int64_t> out;
  for (std::int64_t a = 1; a <= n; ++a) {
    if (n % a == 0) out.push_back(a);
  }
  return out;
}

}  // namespace resograph
