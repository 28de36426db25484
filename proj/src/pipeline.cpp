#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <exception>
#include <thread>

#include "resograph/density.hpp"
#include "resograph/experiment.hpp"
#include "resograph/io.hpp"

namespace resograph {

namespace {

namespace fs = std::filesystem;

template <typename T>
T get_or(const nlohmann::json& j, const char* key, T fallback) {
  if (!j.contains(key) || j[key].is_null()) return fallback;
  try {
    return j[key].get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ParameterError(std::string("config field '") + key + "': " + e.what());
  }
}

std::optional<double> opt_number(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || j[key].is_null()) return std::nullopt;
  if (!j[key].is_number()) throw ParameterError(std::string("config field '") + key + "' must be a number");
  return j[key].get<double>();
}

struct Source {
  BinaryImage finest;
  std::optional<Scene> scene;
};

Source load_source(const PipelineConfig& c) {
  Source src;
  if (!c.scene.is_null() && !c.scene.empty()) {
    Scene scene = scene_from_spec(c.scene);
    if (c.raster_n < 1) throw ParameterError("scene input needs a positive raster size n");
    const Box& R = scene.bounding_region;
    const double spacing = (R.max[0] - R.min[0]) / static_cast<double>(c.raster_n);
    std::vector<std::int64_t> dims;
    std::vector<double> origin;
    for (int k = 0; k < scene.d; ++k) {
      const double len = (R.max[k] - R.min[k]) / spacing;
      const auto n = static_cast<std::int64_t>(std::llround(len));
      if (n < 1 || std::abs(len - static_cast<double>(n)) > 1e-6 * len) {
        throw ParameterError("bounding region is not a whole number of voxels on axis " + std::to_string(k));
      }
      dims.push_back(n);
      origin.push_back(R.min[k]);
    }
    const GridSpec grid = GridSpec::make(dims, spacing, origin);
    const auto rho = density_field(scene, grid, {c.density_samples, c.seed});
    src.finest = threshold(rho, c.t);
    src.scene = std::move(scene);
  } else if (!c.image_path.empty()) {
    src.finest = io::read_binary(c.image_path, c.pgm_spacing);
  } else {
    throw ParameterError("config needs either a scene or an image");
  }
  if (src.finest.single_phase()) throw DataError("finest image has a single phase");
  return src;
}

std::vector<std::int64_t> resolve_kernels(const PipelineConfig& c, const GridSpec& g) {
  std::vector<std::int64_t> ks = c.kernels;
  if (ks.empty()) {
    std::int64_t common = g.dims[0];
    for (int k = 1; k < g.d; ++k) common = std::gcd(common, g.dims[k]);
    ks = divisors(common);
  }
  for (auto a : ks) (void)g.coarsened(a);  // throws ParameterError for non-divisors
  ks.push_back(1);
  std::sort(ks.begin(), ks.end());
  ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
  return ks;
}

struct EntryResult {
  std::int64_t a = 1;
  std::vector<double> distances;
  bool single_phase = false;
  std::optional<double> rho_bound;
  std::optional<double> rho_m;
  double seconds = 0.0;
  std::vector<PersistenceDiagram> diagrams;
};

double bottleneck(const PersistenceDiagram& x, const PersistenceDiagram& y, bool exact, double delta) {
  return exact ? bottleneck_exact(x, y).distance : bottleneck_approx(x, y, delta).distance;
}

std::vector<PersistenceDiagram> diagrams_of(const BinaryImage& img, PadMode pad) {
  return compute_persistence(CubicalFiltration::build(dsedt(img, pad)));
}

template <typename Fn>
void parallel_for(std::size_t count, int jobs, Fn&& fn) {
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const int n = std::max(1, std::min<int>(jobs, static_cast<int>(count)));
  if (n == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < n; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace

Scene scene_from_spec(const nlohmann::json& spec) {
  if (!spec.is_object()) throw ParameterError("scene spec must be a JSON object");
  if (!spec.contains("generator")) return scene_from_json(spec);
  nlohmann::json p = spec;
  const auto gen = get_or<std::string>(spec, "generator", "");
  if (gen == "dot_array") {
    if (!p.contains("R1")) p["R1"] = 5.0;
    if (!p.contains("R2")) p["R2"] = 510.0;
    if (!p.contains("w")) p["w"] = 85.0;
    if (!p.contains("extent")) p["extent"] = 2048.0;
  } else if (gen == "nested_rings") {
    const NestedRingsDefaults def;
    if (!p.contains("rings")) {
      p["rings"] = nlohmann::json::array();
      for (const auto& [r, w] : def.rings) p["rings"].push_back({r, w});
    }
    if (!p.contains("extent")) p["extent"] = def.extent;
  } else if (gen == "ball_packing") {
    if (!p.contains("extent")) p["extent"] = 128.0;
    if (!p.contains("r_min")) p["r_min"] = 6.0;
    if (!p.contains("r_max")) p["r_max"] = 12.0;
    if (!p.contains("target_fraction")) p["target_fraction"] = 0.3;
    if (!p.contains("min_gap")) p["min_gap"] = 4.0;
    if (!p.contains("seed")) p["seed"] = 1;
  }
  return scene_from_json({{"metadata", {{"parameters", p}}}});
}

PipelineConfig PipelineConfig::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ParameterError("config must be a JSON object");
  PipelineConfig c;
  if (j.contains("scene")) c.scene = j["scene"];
  if (j.contains("scene_file")) {
    try {
      c.scene = nlohmann::json::parse(io::read_text(get_or<std::string>(j, "scene_file", "")));
    } catch (const nlohmann::json::exception& e) {
      throw DataError(std::string("scene file: ") + e.what());
    }
  }
  c.image_path = get_or<std::string>(j, "image", "");
  c.pgm_spacing = get_or<double>(j, "pgm_spacing", 1.0);
  c.raster_n = get_or<std::int64_t>(j, "n", 0);
  if (j.contains("kernels")) {
    const auto& k = j["kernels"];
    if (k.is_string()) {
      const auto s = k.get<std::string>();
      if (s == "powers_of_two") {
        c.kernels = {-1};
      } else if (s != "divisors") {
        throw ParameterError("kernels must be a list, \"divisors\" or \"powers_of_two\"");
      }
    } else {
      c.kernels = get_or<std::vector<std::int64_t>>(j, "kernels", {});
      for (auto a : c.kernels) {
        if (a < 1) throw ParameterError("kernel sizes must be positive integers");
      }
    }
  }
  c.t = get_or<double>(j, "t", 0.5);
  if (!(c.t > 0.0 && c.t <= 1.0)) throw ParameterError("threshold t must lie in (0,1]");
  c.dims = get_or<std::vector<int>>(j, "dims", {});
  if (j.contains("metric")) {
    const auto m = get_or<std::string>(j, "metric", "");
    if (m == "exact") {
      c.exact = true;
    } else if (m == "approx" || m == "approximate") {
      c.exact = false;
    } else {
      throw ParameterError("metric must be \"exact\" or \"approx\"");
    }
  }
  c.delta = get_or<double>(j, "delta", 0.1);
  if (!(c.delta > 0.0)) throw ParameterError("delta must be positive");
  c.output_dir = get_or<std::string>(j, "output_dir", c.output_dir);
  c.jobs = get_or<int>(j, "jobs", 1);
  if (c.jobs < 1) throw ParameterError("jobs must be >= 1");
  c.seed = get_or<std::uint64_t>(j, "seed", 0);
  c.timing = get_or<bool>(j, "timing", true);
  c.reach = opt_number(j, "reach");
  c.leash = opt_number(j, "leash");
  c.leash_source = get_or<std::string>(j, "leash_source", "auto");
  if (c.leash_source != "auto" && c.leash_source != "analytic" && c.leash_source != "estimate") {
    throw ParameterError("leash_source must be auto, analytic or estimate");
  }
  if (j.contains("rho_eps") && j["rho_eps"].is_null()) {
    c.rho_eps.reset();
  } else {
    c.rho_eps = get_or<double>(j, "rho_eps", 0.0);
  }
  c.density_samples = get_or<int>(j, "density_samples", 8);
  c.pad = parse_pad_mode(get_or<std::string>(j, "pad", "none"));
  c.plateau_epsilon = opt_number(j, "plateau_epsilon");
  return c;
}

nlohmann::json PipelineConfig::to_json() const {
  nlohmann::json j;
  if (!scene.is_null()) j["scene"] = scene;
  if (!image_path.empty()) {
    j["image"] = image_path;
    j["pgm_spacing"] = pgm_spacing;
  }
  if (raster_n > 0) j["n"] = raster_n;
  if (kernels == std::vector<std::int64_t>{-1}) {
    j["kernels"] = "powers_of_two";
  } else if (kernels.empty()) {
    j["kernels"] = "divisors";
  } else {
    j["kernels"] = kernels;
  }
  j["t"] = t;
  if (!dims.empty()) j["dims"] = dims;
  if (exact) j["metric"] = *exact ? "exact" : "approx";
  j["delta"] = delta;
  j["output_dir"] = output_dir;
  j["jobs"] = jobs;
  j["seed"] = seed;
  j["timing"] = timing;
  if (reach) j["reach"] = *reach;
  if (leash) j["leash"] = *leash;
  j["leash_source"] = leash_source;
  j["rho_eps"] = rho_eps ? nlohmann::json(*rho_eps) : nlohmann::json(nullptr);
  j["density_samples"] = density_samples;
  j["pad"] = pad == PadMode::none ? "none" : pad == PadMode::solid ? "solid" : "void";
  if (plateau_epsilon) j["plateau_epsilon"] = *plateau_epsilon;
  return j;
}

PipelineResult run_pipeline(const PipelineConfig& cfg_in) {
  using Clock = std::chrono::steady_clock;
  PipelineConfig cfg = cfg_in;
  const Source src = load_source(cfg);
  const BinaryImage& X = src.finest;
  const GridSpec& g = X.grid();
  const int d = g.d;
  const double sd = std::sqrt(static_cast<double>(d));

  if (cfg.kernels == std::vector<std::int64_t>{-1}) {
    cfg.kernels.clear();
    for (std::int64_t a = 1;; a *= 2) {
      bool ok = true;
      for (int k = 0; k < d; ++k) ok = ok && g.dims[k] % a == 0;
      if (!ok) break;
      cfg.kernels.push_back(a);
    }
  }
  const auto kernels = resolve_kernels(cfg, g);
  std::vector<int> dims = cfg.dims;
  if (dims.empty()) {
    for (int k = 0; k < d; ++k) dims.push_back(k);
  }
  for (int k : dims) {
    if (k < 0 || k >= d) throw ParameterError("homology dimension " + std::to_string(k) + " out of range");
  }
  const bool exact = cfg.exact.value_or(d == 2);
  const std::int64_t N = g.dims[0];
  const double r_fine = g.spacing;

  // Reach and leash inputs.
  std::optional<double> mreach = cfg.reach;
  std::string reach_source = mreach ? "config" : "none";
  if (!mreach && src.scene && src.scene->metadata.analytic_reach) {
    mreach = src.scene->metadata.analytic_reach;
    reach_source = "analytic";
  }
  nlohmann::json leash_log = nlohmann::json::array();
  const auto mleash = [&](double s) -> std::pair<double, std::string> {
    if (cfg.leash) return {*cfg.leash, "config"};
    if (cfg.leash_source != "estimate" && src.scene && src.scene->metadata.analytic_leash) {
      if (const auto v = src.scene->metadata.analytic_leash(s)) return {*v, "analytic"};
    }
    if (cfg.leash_source == "analytic") return {kInfinity, "unavailable"};
    // Estimated on the finest image; the grid error band is added on top.
    return {two_sided_leash(X, s) + sd * r_fine, "estimate"};
  };
  double fine_margin = 0.0;
  std::string fine_margin_kind;
  if (mreach && r_fine < *mreach / sd) {
    fine_margin = 2.0 * sd * r_fine;
    fine_margin_kind = "reach";
  } else {
    fine_margin = leash_bound(mleash(sd * r_fine).first, r_fine, d);
    fine_margin_kind = "leash";
  }

  const fs::path out_dir(cfg.output_dir);
  fs::create_directories(out_dir / "diagrams");
  std::optional<fs::path> tmp_dir;
  if (const char* env = std::getenv("RESOGRAPH_TMPDIR"); env && *env) {
    tmp_dir = fs::path(env) / "resograph";
    fs::create_directories(*tmp_dir);
  }

  // Finest diagram first; every other resolution is compared against it.
  const auto t0 = Clock::now();
  const auto finest_diagrams = diagrams_of(X, cfg.pad);
  const double finest_seconds = std::chrono::duration<double>(Clock::now() - t0).count();

  std::vector<EntryResult> results(kernels.size());
  parallel_for(kernels.size(), cfg.jobs, [&](std::size_t i) {
    const auto start = Clock::now();
    EntryResult& res = results[i];
    res.a = kernels[i];
    const BinaryImage Xa = res.a == 1 ? X : downsample_binary(X, res.a, cfg.t);
    if (tmp_dir) {
      const std::string stem = "n" + std::to_string(N / res.a);
      io::write_binary(*tmp_dir / (stem + (d == 2 ? ".pgm" : ".raw")), Xa);
    }
    res.single_phase = Xa.single_phase();
    if (res.single_phase) {
      res.distances.assign(dims.size(), kInfinity);
    } else {
      res.diagrams = res.a == 1 ? finest_diagrams : diagrams_of(Xa, cfg.pad);
      for (int k : dims) {
        res.distances.push_back(res.a == 1 ? 0.0
                                           : bottleneck(res.diagrams[static_cast<std::size_t>(k)],
                                                        finest_diagrams[static_cast<std::size_t>(k)],
                                                        exact, cfg.delta));
      }
      if (cfg.rho_eps) {
        const auto rb = rho_bound(block_density(X, res.a), cfg.t, *cfg.rho_eps);
        res.rho_bound = rb.bound + sd * r_fine;
        res.rho_m = rb.m;
      }
    }
    res.seconds = std::chrono::duration<double>(Clock::now() - start).count();
    if (res.a == 1) res.seconds += finest_seconds;
  });

  PipelineResult out;
  out.series.finest_n = N;
  out.series.d = d;
  std::vector<Measurement> measured;
  nlohmann::json entries_json = nlohmann::json::array();
  for (auto it = results.rbegin(); it != results.rend(); ++it) {
    const EntryResult& res = *it;
    const std::int64_t n = N / res.a;
    const double r = r_fine * static_cast<double>(res.a);
    BoundReport rep;
    rep.r = r;
    rep.d = d;
    std::optional<double> b_reach, b_leash;
    if (mreach) {
      if (const auto rb = reach_bound(*mreach, r, d)) {
        b_reach = *rb + fine_margin;
        rep.set("reach_bound_tight", *b_reach, "2*sqrt(d)*r plus finest-side margin");
      } else {
        rep.set_absent("reach_bound_tight", "r >= mreach/sqrt(d)");
      }
    } else {
      rep.set_absent("reach_bound_tight", "no reach available");
    }
    const auto [ml, ml_source] = mleash(sd * r);
    if (std::isfinite(ml)) {
      b_leash = leash_bound(ml, r, d) + fine_margin;
      rep.set("leash_bound", *b_leash, "mleash from " + ml_source + " plus finest-side margin");
    } else {
      rep.set_absent("leash_bound", "two-sided leash undefined at s = sqrt(d)*r");
    }
    if (res.rho_bound) {
      rep.set("rho_bound", *res.rho_bound, "density bound plus sqrt(d)*r_fine");
    } else {
      rep.set_absent("rho_bound", res.single_phase ? "single-phase image" : "disabled");
    }
    rep.inputs = {{"mleash", std::isfinite(ml) ? nlohmann::json(ml) : nlohmann::json(nullptr)},
                  {"mleash_source", ml_source},
                  {"mreach", mreach ? nlohmann::json(*mreach) : nlohmann::json(nullptr)},
                  {"finest_margin", fine_margin},
                  {"m", res.rho_m ? nlohmann::json(*res.rho_m) : nlohmann::json(nullptr)}};
    out.bound_reports[static_cast<double>(n)] = rep;

    for (std::size_t q = 0; q < dims.size(); ++q) {
      SeriesEntry e;
      e.n = n;
      e.r = r;
      e.a = res.a;
      e.dim = dims[q];
      e.distance = res.distances[q];
      e.bound_leash = b_leash;
      e.bound_reach = b_reach;
      e.bound_rho = res.rho_bound;
      e.seconds = cfg.timing ? res.seconds : 0.0;
      out.series.entries.push_back(e);
      if (!res.single_phase) measured.push_back({static_cast<double>(n), e.dim, e.distance});
    }
    if (!res.single_phase) {
      write_diagrams_csv(out_dir / "diagrams" / ("n" + std::to_string(n) + ".csv"), res.diagrams);
    }
    nlohmann::json ej = {{"n", n}, {"a", res.a}, {"r", r}, {"single_phase", res.single_phase},
                         {"bounds", rep.to_json()}};
    if (!res.single_phase) ej["diagram_file"] = "diagrams/n" + std::to_string(n) + ".csv";
    entries_json.push_back(ej);
  }
  out.violations = verify_bounds(measured, out.bound_reports);

  // Plateaus and the guarantee.
  nlohmann::json plateau_json = nlohmann::json::object();
  if (cfg.plateau_epsilon && kernels.size() >= 2) {
    for (int k : dims) {
      out.plateaus[k] = detect_plateaus(out.series, k, *cfg.plateau_epsilon);
      plateau_json[std::to_string(k)] = out.plateaus[k].to_json();
    }
  }
  nlohmann::json guarantee_json = nullptr;
  if (mreach) {
    std::vector<std::pair<std::int64_t, double>> res_list;
    for (auto a : kernels) res_list.emplace_back(N / a, r_fine * static_cast<double>(a));
    out.guarantee = final_plateau_guarantee(*mreach, res_list, d, N);
    if (out.guarantee) {
      guarantee_json = {{"M", out.guarantee->M}, {"N", N}, {"r_M", out.guarantee->r_M},
                        {"epsilon", out.guarantee->epsilon}};
      for (int k : dims) {
        guarantee_json["confirmed_dim" + std::to_string(k)] =
            is_plateau(out.series, k, out.guarantee->M, N, out.guarantee->epsilon);
      }
    }
  }
  nlohmann::json spikes_json = nlohmann::json::object();
  for (int k : dims) {
    auto arr = nlohmann::json::array();
    for (const auto& s : detect_spikes(out.series, k)) {
      arr.push_back({{"n", s.n}, {"rise", s.rise}, {"fall", s.fall}, {"pixel_diameter", s.pixel_diameter}});
    }
    spikes_json[std::to_string(k)] = arr;
  }

  // Artifacts.
  io::write_text(out_dir / "series.csv", series_to_csv(out.series));
  for (int k : dims) {
    const auto rows = out.series.for_dim(k);
    PlotLine meas{"d_B dim " + std::to_string(k), {}, dim_color(k), false};
    PlotLine reach_line{"reach bound", {}, "#2ca02c", true};
    PlotLine leash_line{"leash bound", {}, "#2ca02c", true};
    PlotLine rho_line{"rho bound", {}, "#d62728", false};
    PlotLine meas_r = meas, reach_r = reach_line, leash_r = leash_line, rho_r = rho_line;
    for (const auto& e : rows) {
      const auto n = static_cast<double>(e.n);
      meas.points.emplace_back(n, e.distance);
      meas_r.points.emplace_back(e.r, e.distance);
      if (e.bound_reach) {
        reach_line.points.emplace_back(n, *e.bound_reach);
        reach_r.points.emplace_back(e.r, *e.bound_reach);
      }
      if (e.bound_leash) {
        leash_line.points.emplace_back(n, *e.bound_leash);
        leash_r.points.emplace_back(e.r, *e.bound_leash);
      }
      if (e.bound_rho) {
        rho_line.points.emplace_back(n, *e.bound_rho);
        rho_r.points.emplace_back(e.r, *e.bound_rho);
      }
    }
    std::vector<PlotLine> by_n{meas}, by_r{meas_r};
    for (auto* l : {&reach_line, &leash_line, &rho_line}) {
      if (!l->points.empty()) by_n.push_back(*l);
    }
    for (auto* l : {&reach_r, &leash_r, &rho_r}) {
      if (!l->points.empty()) by_r.push_back(*l);
    }
    const std::string title = "Bottleneck distance to n=" + std::to_string(N) + ", dim " + std::to_string(k);
    io::write_text(out_dir / ("plot_dim" + std::to_string(k) + ".svg"),
                   svg_line_plot(title, "resolution n", "d_B", by_n, false));
    io::write_text(out_dir / ("plot_dim" + std::to_string(k) + "_pixel.svg"),
                   svg_line_plot(title, "pixel size r (log scale)", "d_B", by_r, true));
  }

  nlohmann::json report;
  report["config"] = cfg_in.to_json();
  report["finest"] = io::grid_to_json(g);
  report["finest"]["n"] = N;
  report["metric"] = {{"mode", exact ? "exact" : "approximate"}, {"delta", exact ? 0.0 : cfg.delta}};
  report["kernels"] = kernels;
  report["dims"] = dims;
  report["reach"] = {{"value", mreach ? nlohmann::json(*mreach) : nlohmann::json(nullptr)},
                     {"source", reach_source}};
  report["finest_margin"] = {{"value", fine_margin}, {"kind", fine_margin_kind}};
  report["domain"] = "distances restricted to the grid; complement taken inside the grid";
  report["pad"] = cfg.to_json()["pad"];
  if (src.scene) report["scene"] = src.scene->metadata.description;
  report["entries"] = entries_json;
  auto viol = nlohmann::json::array();
  for (const auto& v : out.violations) {
    viol.push_back({{"n", v.n}, {"dim", v.dim}, {"measured", v.measured}, {"bound", v.bound},
                    {"bound_value", v.bound_value}});
  }
  report["violations"] = viol;
  report["plateaus"] = plateau_json;
  report["final_plateau_guarantee"] = guarantee_json;
  report["spikes"] = spikes_json;
  io::write_text(out_dir / "report.json", report.dump(2) + "\n");
  out.report = std::move(report);
  return out;
}

}  // namespace resograph
