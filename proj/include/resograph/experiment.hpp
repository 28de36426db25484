#pragma once

#include <filesystem>
#include <map>
#include <optional>

#include <json.hpp>

#include "resograph/bottleneck.hpp"
#include "resograph/bounds.hpp"
#include "resograph/scene.hpp"

namespace resograph {

/// One (resolution, homology dimension) row of a resolution series.
struct SeriesEntry {
  std::int64_t n = 0;  // linear resolution N/a
  double r = 0.0;      // spacing
  std::int64_t a = 1;  // kernel
  int dim = 0;
  double distance = 0.0;  // d_B to the finest diagram; +inf when a phase vanished
  std::optional<double> bound_leash;
  std::optional<double> bound_reach;
  std::optional<double> bound_rho;
  double seconds = 0.0;
};

struct ResolutionSeries {
  std::int64_t finest_n = 0;
  int d = 2;
  std::vector<SeriesEntry> entries;  // sorted by (n, dim)

  /// Rows of one dimension, ascending n.
  std::vector<SeriesEntry> for_dim(int k) const;
};

std::string series_to_csv(const ResolutionSeries& s);
ResolutionSeries parse_series_csv(const std::string& text, int d = 2);

struct PlateauInterval {
  std::int64_t lo_n = 0;
  std::int64_t hi_n = 0;
  double spread = 0.0;  // max - min of d_B over the interval
  bool is_final = false;
};

struct PlateauReport {
  int dim = 0;
  double epsilon = 0.0;
  /// All maximal windows of consecutive computed resolutions (length >= 2)
  /// whose distances differ pairwise by less than epsilon. Windows may overlap.
  std::vector<PlateauInterval> intervals;

  /// Size of a largest family of pairwise disjoint intervals.
  std::size_t disjoint_count() const;
  nlohmann::json to_json() const;
};

PlateauReport detect_plateaus(const ResolutionSeries& s, int k, double epsilon);
/// True iff all computed resolutions in [lo_n, hi_n] have pairwise differences < epsilon.
bool is_plateau(const ResolutionSeries& s, int k, std::int64_t lo_n, std::int64_t hi_n,
                double epsilon);

struct Spike {
  std::int64_t n = 0;
  double rise = 0.0;
  double fall = 0.0;
  double pixel_diameter = 0.0;  // sqrt(d) * r
};
std::vector<Spike> detect_spikes(const ResolutionSeries& s, int k);

struct PlateauGuarantee {
  std::int64_t M = 0;
  std::int64_t N = 0;
  double r_M = 0.0;
  double epsilon = 0.0;  // 4*sqrt(d)*r_M
};
/// M is the smallest listed resolution with r_M < mreach/sqrt(d).
std::optional<PlateauGuarantee> final_plateau_guarantee(
    double mreach_value, const std::vector<std::pair<std::int64_t, double>>& resolutions, int d,
    std::int64_t N);

// Plotting.
struct PlotLine {
  std::string label;
  std::vector<std::pair<double, double>> points;  // non-finite y breaks the line
  std::string color;
  bool dashed = false;
};
std::string svg_line_plot(const std::string& title, const std::string& xlabel,
                          const std::string& ylabel, const std::vector<PlotLine>& lines,
                          bool log_x);
std::string dim_color(int dim);

struct PipelineConfig {
  nlohmann::json scene;       // generator parameters or a scene tree (empty when image-driven)
  std::string image_path;     // binary PGM or raw+sidecar
  double pgm_spacing = 1.0;
  std::int64_t raster_n = 0;  // finest resolution N for scenes
  std::vector<std::int64_t> kernels;  // empty: every divisor of N
  double t = 0.5;
  std::vector<int> dims;  // empty: 0..d-1
  std::optional<bool> exact;  // default: exact for 2D, approximate for 3D
  double delta = 0.1;
  std::string output_dir = "resograph_out";
  int jobs = 1;
  std::uint64_t seed = 0;
  bool timing = true;
  std::optional<double> reach;
  std::optional<double> leash;  // overrides analytic / estimated two-sided leash
  std::string leash_source = "auto";  // auto | analytic | estimate
  std::optional<double> rho_eps = 0.0;  // nullopt disables the density bound
  int density_samples = 8;
  PadMode pad = PadMode::none;
  std::optional<double> plateau_epsilon;

  static PipelineConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

struct PipelineResult {
  ResolutionSeries series;
  std::map<double, BoundReport> bound_reports;  // keyed by n
  std::vector<Violation> violations;
  std::map<int, PlateauReport> plateaus;
  std::optional<PlateauGuarantee> guarantee;
  nlohmann::json report;
};

/// Raster or read the finest image, downsample per kernel, DSEDT, persistence,
/// d_B to the finest diagram, bounds, plateaus; writes series.csv, diagrams/,
/// SVG plots and report.json into output_dir.
PipelineResult run_pipeline(const PipelineConfig& config);

/// Loads a scene from a generator spec ({"generator": ...}) or a scene tree.
Scene scene_from_spec(const nlohmann::json& spec);

}  // namespace resograph
