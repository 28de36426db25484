#pragma once

#include <functional>
#include <optional>
#include <variant>

#include <json.hpp>

#include "resograph/grid.hpp"

namespace resograph {

/// Disk in 2D, ball in 3D.
struct Disk {
  Point3 center{};
  double radius = 0.0;
};

/// Closed ring (spherical shell in 3D) with inner_radius <= |p - center| <= outer_radius.
struct Annulus {
  Point3 center{};
  double inner_radius = 0.0;
  double outer_radius = 0.0;
};

struct Box {
  Point3 min{};
  Point3 max{};
};

using Primitive = std::variant<Disk, Annulus, Box>;

/// Expression tree over closed solid primitives.
///   union       X = A1 u ... u An
///   difference  X = cl(A \ B)
///   complement  X = cl(A^c)
struct SceneNode {
  enum class Op { leaf, union_, difference, complement };
  Op op = Op::leaf;
  Primitive primitive{};
  std::vector<SceneNode> children;

  static SceneNode leaf(Primitive p);
  static SceneNode unite(std::vector<SceneNode> children);
  static SceneNode difference(SceneNode a, SceneNode b);
  static SceneNode complement(SceneNode a);
};

/// Closed-form geometric facts about a generated scene. analytic_leash(s)
/// returns the two-sided leash when s lies in a regime with a known formula.
struct SceneMetadata {
  std::optional<double> analytic_reach;
  std::function<std::optional<double>(double)> analytic_leash;
  std::string description;
  nlohmann::json parameters = nlohmann::json::object();
};

/// A solid X inside a bounding region R, with the flag `exact` set only for
/// trees whose primitive boundaries stay separated: there min/max of the
/// primitive signed distances is the true signed distance, and areas add up
/// over the tree (union children disjoint, subtrahends nested).
struct Scene {
  int d = 2;
  SceneNode root;
  Box bounding_region{};
  bool exact = false;
  SceneMetadata metadata;
};

/// Signed distance to the boundary of X, negative inside. Throws
/// ParameterError for non-exact scenes (use csedt_sampled instead).
double csedt_eval(const Scene& scene, const Point3& p);

/// Min/max combination of primitive distances. Same sign as the CSEDT and
/// never larger in magnitude, for any tree; equal to it for exact scenes.
double csedt_bound(const Scene& scene, const Point3& p);

/// True iff p lies in the closed set X.
bool membership(const Scene& scene, const Point3& p);

/// Grid-sampled signed distance estimate for arbitrary trees: membership is
/// sampled at voxel centers of `grid` and each value is the distance to the
/// nearest opposite-phase center minus half the pitch. Accuracy is limited by
/// the sampling: errors up to about sqrt(d)*pitch/2 near the boundary.
std::vector<double> csedt_sampled(const Scene& scene, const GridSpec& grid);

/// Dot array: a square frame outside a disk of radius R2 plus small disks of
/// radius R1 on a pitch-w lattice inside it. The lattice is offset by w/2 on
/// both axes so the big-disk center is a lattice cell corner; spots are kept
/// only when their gap to the big circle is at least 2*R1, which makes the
/// reach exactly R1. The region is [0, n_extent]^2 with the big disk centered.
std::pair<Scene, SceneMetadata> dot_array_scene(double R1, double R2, double w, double n_extent);

/// Concentric rings given as (mid-wall radius, wall width), inside [0, extent]^2.
std::pair<Scene, SceneMetadata> nested_rings_scene(
    const std::vector<std::pair<double, double>>& radii_and_widths, double extent);

/// Reconstructed three-ring configuration used by the plateau experiments.
/// Widths are chosen so that the rings resolve at well separated resolutions.
struct NestedRingsDefaults {
  double extent = 1260.0;
  std::vector<std::pair<double, double>> rings{{480.0, 120.0}, {280.0, 36.0}, {150.0, 10.0}};
};
std::pair<Scene, SceneMetadata> nested_rings_default();

/// Random sequential addition of disjoint balls in [0, extent]^3, every pair
/// separated by at least min_gap. Deterministic in seed.
std::pair<Scene, SceneMetadata> ball_packing_scene(double extent, double r_min, double r_max,
                                                   double target_fraction, double min_gap,
                                                   std::uint64_t seed);

nlohmann::json scene_to_json(const Scene& scene);
Scene scene_from_json(const nlohmann::json& j);

// Distance helpers shared with tests.
double signed_distance(const Primitive& p, const Point3& q, int d);
double disk_box_area(double cx, double cy, double R, double x0, double x1, double y0, double y1);

}  // namespace resograph
