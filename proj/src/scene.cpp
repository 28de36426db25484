#include "resograph/scene.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "resograph/distance_transform.hpp"

namespace resograph {

namespace {

double norm(const Point3& a, const Point3& b, int d) {
  double s = 0.0;
  for (int k = 0; k < d; ++k) s += (a[k] - b[k]) * (a[k] - b[k]);
  return std::sqrt(s);
}

double tree_sd(const SceneNode& n, const Point3& p, int d) {
  switch (n.op) {
    case SceneNode::Op::leaf:
      return signed_distance(n.primitive, p, d);
    case SceneNode::Op::union_: {
      double v = std::numeric_limits<double>::infinity();
      for (const auto& c : n.children) v = std::min(v, tree_sd(c, p, d));
      return v;
    }
    case SceneNode::Op::difference:
      return std::max(tree_sd(n.children[0], p, d), -tree_sd(n.children[1], p, d));
    case SceneNode::Op::complement:
      return -tree_sd(n.children[0], p, d);
  }
  return 0.0;
}

// Integral of sqrt(R^2 - t^2).
double circle_antiderivative(double t, double R) {
  const double u = std::clamp(t / R, -1.0, 1.0);
  const double s = std::sqrt(std::max(0.0, R * R - t * t));
  return 0.5 * (t * s + R * R * std::asin(u));
}

nlohmann::json point_json(const Point3& p, int d) {
  auto j = nlohmann::json::array();
  for (int k = 0; k < d; ++k) j.push_back(p[k]);
  return j;
}

Point3 point_from_json(const nlohmann::json& j, int d) {
  const auto v = j.get<std::vector<double>>();
  if (static_cast<int>(v.size()) != d) throw ParameterError("point has wrong dimension in scene");
  Point3 p{0.0, 0.0, 0.0};
  for (int k = 0; k < d; ++k) p[k] = v[static_cast<std::size_t>(k)];
  return p;
}

nlohmann::json node_json(const SceneNode& n, int d) {
  nlohmann::json j;
  switch (n.op) {
    case SceneNode::Op::leaf: {
      j["op"] = "leaf";
      nlohmann::json p;
      if (const auto* disk = std::get_if<Disk>(&n.primitive)) {
        p["type"] = d == 2 ? "disk" : "ball";
        p["center"] = point_json(disk->center, d);
        p["radius"] = disk->radius;
      } else if (const auto* ann = std::get_if<Annulus>(&n.primitive)) {
        p["type"] = "annulus";
        p["center"] = point_json(ann->center, d);
        p["inner_radius"] = ann->inner_radius;
        p["outer_radius"] = ann->outer_radius;
      } else {
        const auto& box = std::get<Box>(n.primitive);
        p["type"] = "box";
        p["min"] = point_json(box.min, d);
        p["max"] = point_json(box.max, d);
      }
      j["primitive"] = p;
      return j;
    }
    case SceneNode::Op::union_: j["op"] = "union"; break;
    case SceneNode::Op::difference: j["op"] = "difference"; break;
    case SceneNode::Op::complement: j["op"] = "complement"; break;
  }
  j["children"] = nlohmann::json::array();
  for (const auto& c : n.children) j["children"].push_back(node_json(c, d));
  return j;
}

SceneNode node_from_json(const nlohmann::json& j, int d) {
  const auto op = j.at("op").get<std::string>();
  if (op == "leaf") {
    const auto& p = j.at("primitive");
    const auto type = p.at("type").get<std::string>();
    if (type == "disk" || type == "ball") {
      const double r = p.at("radius").get<double>();
      if (!(r > 0.0)) throw ParameterError("disk radius must be positive");
      return SceneNode::leaf(Disk{point_from_json(p.at("center"), d), r});
    }
    if (type == "annulus") {
      Annulus a{point_from_json(p.at("center"), d), p.at("inner_radius").get<double>(),
                p.at("outer_radius").get<double>()};
      if (!(a.inner_radius >= 0.0 && a.outer_radius > a.inner_radius)) {
        throw ParameterError("annulus needs 0 <= inner_radius < outer_radius");
      }
      return SceneNode::leaf(a);
    }
    if (type == "box") {
      Box b{point_from_json(p.at("min"), d), point_from_json(p.at("max"), d)};
      for (int k = 0; k < d; ++k) {
        if (!(b.max[k] > b.min[k])) throw ParameterError("box needs min < max on every axis");
      }
      return SceneNode::leaf(b);
    }
    throw ParameterError("unknown primitive type '" + type + "'");
  }
  std::vector<SceneNode> children;
  for (const auto& c : j.at("children")) children.push_back(node_from_json(c, d));
  if (op == "union") {
    if (children.empty()) throw ParameterError("union needs at least one child");
    return SceneNode::unite(std::move(children));
  }
  if (op == "difference") {
    if (children.size() != 2) throw ParameterError("difference needs exactly two children");
    return SceneNode::difference(std::move(children[0]), std::move(children[1]));
  }
  if (op == "complement") {
    if (children.size() != 1) throw ParameterError("complement needs exactly one child");
    return SceneNode::complement(std::move(children[0]));
  }
  throw ParameterError("unknown scene op '" + op + "'");
}

}  // namespace

SceneNode SceneNode::leaf(Primitive p) {
  SceneNode n;
  n.op = Op::leaf;
  n.primitive = p;
  return n;
}

SceneNode SceneNode::unite(std::vector<SceneNode> children) {
  SceneNode n;
  n.op = Op::union_;
  n.children = std::move(children);
  return n;
}

SceneNode SceneNode::difference(SceneNode a, SceneNode b) {
  SceneNode n;
  n.op = Op::difference;
  n.children.push_back(std::move(a));
  n.children.push_back(std::move(b));
  return n;
}

SceneNode SceneNode::complement(SceneNode a) {
  SceneNode n;
  n.op = Op::complement;
  n.children.push_back(std::move(a));
  return n;
}

double signed_distance(const Primitive& prim, const Point3& q, int d) {
  if (const auto* disk = std::get_if<Disk>(&prim)) return norm(q, disk->center, d) - disk->radius;
  if (const auto* ann = std::get_if<Annulus>(&prim)) {
    const double rho = norm(q, ann->center, d);
    return std::max(rho - ann->outer_radius, ann->inner_radius - rho);
  }
  const auto& box = std::get<Box>(prim);
  double outside = 0.0;
  double inside = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < d; ++k) {
    const double c = 0.5 * (box.min[k] + box.max[k]);
    const double h = 0.5 * (box.max[k] - box.min[k]);
    const double e = std::abs(q[k] - c) - h;
    outside += std::max(e, 0.0) * std::max(e, 0.0);
    inside = std::max(inside, e);
  }
  return std::sqrt(outside) + std::min(inside, 0.0);
}

double disk_box_area(double cx, double cy, double R, double x0, double x1, double y0, double y1) {
  x0 -= cx;
  x1 -= cx;
  y0 -= cy;
  y1 -= cy;
  const double a = std::max(x0, -R);
  const double b = std::min(x1, R);
  if (!(a < b) || !(y0 < y1)) return 0.0;
  std::vector<double> cuts{a, b};
  for (double y : {y0, y1}) {
    if (std::abs(y) < R) {
      const double t = std::sqrt(R * R - y * y);
      for (double c : {-t, t}) {
        if (c > a && c < b) cuts.push_back(c);
      }
    }
  }
  std::sort(cuts.begin(), cuts.end());
  double area = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double u = cuts[i];
    const double v = cuts[i + 1];
    if (!(v > u)) continue;
    const double m = 0.5 * (u + v);
    const double s = std::sqrt(std::max(0.0, R * R - m * m));
    const bool top_is_circle = s < y1;
    const bool bottom_is_circle = -s > y0;
    const double top_m = top_is_circle ? s : y1;
    const double bottom_m = bottom_is_circle ? -s : y0;
    if (!(top_m > bottom_m)) continue;
    const double arc = circle_antiderivative(v, R) - circle_antiderivative(u, R);
    const double top = top_is_circle ? arc : y1 * (v - u);
    const double bottom = bottom_is_circle ? -arc : y0 * (v - u);
    area += top - bottom;
  }
  return std::max(area, 0.0);
}

double csedt_eval(const Scene& scene, const Point3& p) {
  if (!scene.exact) {
    throw ParameterError(
        "scene tree is not flagged exact; min/max of primitive distances is not its signed "
        "distance. Use csedt_sampled on a grid instead");
  }
  return tree_sd(scene.root, p, scene.d);
}

double csedt_bound(const Scene& scene, const Point3& p) { return tree_sd(scene.root, p, scene.d); }

bool membership(const Scene& scene, const Point3& p) {
  // The sign of the min/max combination is exact for any tree.
  return tree_sd(scene.root, p, scene.d) <= 0.0;
}

std::vector<double> csedt_sampled(const Scene& scene, const GridSpec& grid) {
  std::vector<std::uint8_t> occ(static_cast<std::size_t>(grid.voxel_count()));
  for (std::int64_t i = 0; i < grid.voxel_count(); ++i) {
    occ[static_cast<std::size_t>(i)] = membership(scene, grid.center(i));
  }
  const BinaryImage img(grid, std::move(occ));
  std::vector<double> out(static_cast<std::size_t>(grid.voxel_count()));
  if (img.single_phase()) {
    // No boundary sample inside the grid.
    const double v = img.count() == 0 ? std::numeric_limits<double>::infinity()
                                      : -std::numeric_limits<double>::infinity();
    std::fill(out.begin(), out.end(), v);
    return out;
  }
  const auto sd = dsedt(img);
  const double half = 0.5 * grid.spacing;
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double v = sd.values()[i];
    out[i] = v < 0.0 ? v + half : v - half;
  }
  return out;
}

std::pair<Scene, SceneMetadata> dot_array_scene(double R1, double R2, double w, double n_extent) {
  if (!(R1 > 0.0 && 2.0 * R1 < w)) throw ParameterError("dot array needs 0 < 2*R1 < w");
  if (!(R1 < R2)) throw ParameterError("dot array needs R1 < R2");
  if (!(2.0 * R2 <= n_extent)) throw ParameterError("big disk must fit inside the region");
  const double c = 0.5 * n_extent;
  std::vector<SceneNode> parts;
  parts.push_back(SceneNode::complement(SceneNode::leaf(Disk{{c, c, 0.0}, R2})));
  const auto steps = static_cast<int>(std::ceil(R2 / w)) + 1;
  for (int j = -steps; j < steps; ++j) {
    for (int i = -steps; i < steps; ++i) {
      const double ox = (i + 0.5) * w;
      const double oy = (j + 0.5) * w;
      if (std::hypot(ox, oy) + 3.0 * R1 <= R2) {
        parts.push_back(SceneNode::leaf(Disk{{c + ox, c + oy, 0.0}, R1}));
      }
    }
  }
  Scene s;
  s.d = 2;
  s.root = SceneNode::unite(std::move(parts));
  s.bounding_region = Box{{0.0, 0.0, 0.0}, {n_extent, n_extent, 0.0}};
  s.exact = true;

  SceneMetadata m;
  m.analytic_reach = R1;
  const double mid_const = R2 - w / std::numbers::sqrt2 + R1;
  const double mid_hi = w / std::numbers::sqrt2 - R1;
  m.analytic_leash = [R1, mid_const, mid_hi](double s) -> std::optional<double> {
    if (s < 0.0) return std::nullopt;
    if (s < R1) return s;
    if (s <= mid_hi) return mid_const + s;
    return std::nullopt;
  };
  m.description = "dot array: square frame outside a disk of radius " + std::to_string(R2) +
                  " with " + std::to_string(s.root.children.size() - 1) + " spots of radius " +
                  std::to_string(R1) + " on pitch " + std::to_string(w);
  m.parameters = {{"generator", "dot_array"}, {"R1", R1}, {"R2", R2}, {"w", w},
                  {"extent", n_extent}};
  s.metadata = m;
  return {s, m};
}

std::pair<Scene, SceneMetadata> nested_rings_scene(
    const std::vector<std::pair<double, double>>& radii_and_widths, double extent) {
  if (radii_and_widths.empty()) throw ParameterError("nested rings need at least one ring");
  auto rings = radii_and_widths;
  std::sort(rings.begin(), rings.end());
  const double c = 0.5 * extent;
  double reach = std::numeric_limits<double>::infinity();
  double prev_outer = 0.0;
  std::vector<SceneNode> parts;
  for (std::size_t i = 0; i < rings.size(); ++i) {
    const auto [radius, width] = rings[i];
    if (!(width > 0.0)) throw ParameterError("ring widths must be positive");
    const double inner = radius - 0.5 * width;
    const double outer = radius + 0.5 * width;
    if (!(inner > prev_outer)) {
      throw ParameterError("rings overlap or touch (ring " + std::to_string(i) + ")");
    }
    if (outer > c) throw ParameterError("ring exceeds the region");
    reach = std::min(reach, 0.5 * width);
    reach = std::min(reach, i == 0 ? inner : 0.5 * (inner - prev_outer));
    prev_outer = outer;
    parts.push_back(SceneNode::leaf(Annulus{{c, c, 0.0}, inner, outer}));
  }
  Scene s;
  s.d = 2;
  s.root = SceneNode::unite(std::move(parts));
  s.bounding_region = Box{{0.0, 0.0, 0.0}, {extent, extent, 0.0}};
  s.exact = true;
  SceneMetadata m;
  m.analytic_reach = reach;
  m.analytic_leash = [reach](double s) -> std::optional<double> {
    if (s >= 0.0 && s < reach) return s;
    return std::nullopt;
  };
  m.description = "nested rings (" + std::to_string(rings.size()) + " concentric annuli)";
  auto arr = nlohmann::json::array();
  for (const auto& [r, w] : rings) arr.push_back({r, w});
  m.parameters = {{"generator", "nested_rings"}, {"rings", arr}, {"extent", extent}};
  s.metadata = m;
  return {s, m};
}

std::pair<Scene, SceneMetadata> nested_rings_default() {
  const NestedRingsDefaults def;
  auto out = nested_rings_scene(def.rings, def.extent);
  out.second.description += " [reconstructed default geometry]";
  out.first.metadata.description = out.second.description;
  return out;
}

std::pair<Scene, SceneMetadata> ball_packing_scene(double extent, double r_min, double r_max,
                                                   double target_fraction, double min_gap,
                                                   std::uint64_t seed) {
  if (!(r_min > 0.0 && r_max >= r_min)) throw ParameterError("ball radii need 0 < r_min <= r_max");
  if (!(target_fraction > 0.0 && target_fraction < 0.6)) {
    throw ParameterError("target solid fraction must lie in (0, 0.6)");
  }
  if (!(min_gap > 0.0)) throw ParameterError("ball packing needs a positive minimum gap");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> pos(0.0, extent);
  std::uniform_real_distribution<double> rad(r_min, r_max);
  std::vector<Disk> balls;
  const double total = extent * extent * extent;
  double volume = 0.0;
  int failures = 0;
  while (volume / total < target_fraction && failures < 20000) {
    const Disk b{{pos(rng), pos(rng), pos(rng)}, rad(rng)};
    bool ok = true;
    for (const auto& o : balls) {
      if (norm(b.center, o.center, 3) < b.radius + o.radius + min_gap) {
        ok = false;
        break;
      }
    }
    if (!ok) {
      ++failures;
      continue;
    }
    balls.push_back(b);
    // Volume inside the region is approximated by the full ball volume here;
    // the rasterized density is what downstream code uses.
    volume += 4.0 / 3.0 * std::numbers::pi * b.radius * b.radius * b.radius;
  }
  double reach = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < balls.size(); ++i) {
    reach = std::min(reach, balls[i].radius);
    for (std::size_t j = i + 1; j < balls.size(); ++j) {
      const double gap = norm(balls[i].center, balls[j].center, 3) - balls[i].radius -
                         balls[j].radius;
      reach = std::min(reach, 0.5 * gap);
    }
  }
  std::vector<SceneNode> parts;
  for (const auto& b : balls) parts.push_back(SceneNode::leaf(b));
  Scene s;
  s.d = 3;
  s.root = SceneNode::unite(std::move(parts));
  s.bounding_region = Box{{0.0, 0.0, 0.0}, {extent, extent, extent}};
  s.exact = true;
  SceneMetadata m;
  m.analytic_reach = reach;
  m.analytic_leash = [reach](double s) -> std::optional<double> {
    if (s >= 0.0 && s < reach) return s;
    return std::nullopt;
  };
  m.description = "ball packing: " + std::to_string(balls.size()) + " disjoint balls";
  m.parameters = {{"generator", "ball_packing"}, {"extent", extent}, {"r_min", r_min},
                  {"r_max", r_max}, {"target_fraction", target_fraction},
                  {"min_gap", min_gap}, {"seed", seed}};
  s.metadata = m;
  return {s, m};
}

nlohmann::json scene_to_json(const Scene& scene) {
  nlohmann::json j;
  j["dim"] = scene.d;
  j["exact"] = scene.exact;
  j["bounding_region"] = {{"min", point_json(scene.bounding_region.min, scene.d)},
                          {"max", point_json(scene.bounding_region.max, scene.d)}};
  j["tree"] = node_json(scene.root, scene.d);
  nlohmann::json meta;
  meta["description"] = scene.metadata.description;
  if (scene.metadata.analytic_reach) meta["analytic_reach"] = *scene.metadata.analytic_reach;
  meta["parameters"] = scene.metadata.parameters;
  j["metadata"] = meta;
  return j;
}

Scene scene_from_json(const nlohmann::json& j) {
  try {
    // Generator scenes are rebuilt from their parameters so the analytic
    // metadata and the exactness guarantee come back with them.
    if (j.contains("metadata") && j["metadata"].contains("parameters")) {
      const auto& p = j["metadata"]["parameters"];
      if (p.contains("generator")) {
        const auto gen = p.at("generator").get<std::string>();
        if (gen == "dot_array") {
          return dot_array_scene(p.at("R1"), p.at("R2"), p.at("w"), p.at("extent")).first;
        }
        if (gen == "nested_rings") {
          std::vector<std::pair<double, double>> rings;
          for (const auto& r : p.at("rings")) rings.emplace_back(r.at(0), r.at(1));
          return nested_rings_scene(rings, p.at("extent")).first;
        }
        if (gen == "ball_packing") {
          return ball_packing_scene(p.at("extent"), p.at("r_min"), p.at("r_max"),
                                    p.at("target_fraction"), p.at("min_gap"),
                                    p.at("seed").get<std::uint64_t>())
              .first;
        }
        throw ParameterError("unknown scene generator '" + gen + "'");
      }
    }
    Scene s;
    s.d = j.at("dim").get<int>();
    if (s.d != 2 && s.d != 3) throw ParameterError("scene dim must be 2 or 3");
    const auto& br = j.at("bounding_region");
    s.bounding_region = Box{point_from_json(br.at("min"), s.d), point_from_json(br.at("max"), s.d)};
    s.root = node_from_json(j.at("tree"), s.d);
    s.exact = false;
    if (j.contains("metadata")) {
      const auto& m = j["metadata"];
      if (m.contains("description")) s.metadata.description = m["description"];
      if (m.contains("analytic_reach")) s.metadata.analytic_reach = m["analytic_reach"].get<double>();
    }
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw ParameterError(std::string("invalid scene JSON: ") + e.what());
  }
}

}  // namespace resograph
