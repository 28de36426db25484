// resograph: resolution studies of persistent homology on voxel images.

#include <cmath>
#include <cstdio>
#include <iostream>

#include <CLI11.hpp>

#include "resograph/density.hpp"
#include "resograph/experiment.hpp"
#include "resograph/io.hpp"

namespace fs = std::filesystem;
using namespace resograph;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitData = 3;

nlohmann::json read_json_file(const std::string& path) {
  try {
    return nlohmann::json::parse(io::read_text(path));
  } catch (const nlohmann::json::exception& e) {
    throw DataError(path + ": " + e.what());
  }
}

// key=value pairs; numbers stay numbers.
nlohmann::json parse_params(const std::vector<std::string>& kv) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& s : kv) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ParameterError("expected key=value, got '" + s + "'");
    const std::string key = s.substr(0, eq), val = s.substr(eq + 1);
    try {
      j[key] = nlohmann::json::parse(val);
    } catch (const nlohmann::json::exception&) {
      j[key] = val;
    }
  }
  return j;
}

void print_json(const nlohmann::json& j) { std::cout << j.dump(2) << "\n"; }

bool is_gray_path(const std::string& p) { return fs::path(p).extension() == ".f64"; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Resolution effects on persistent homology of voxel images"};
  app.require_subcommand(1);

  // generate
  auto* gen = app.add_subcommand("generate", "Rasterize a synthetic scene");
  std::string gen_scene, gen_generator, gen_out, gen_density_out, gen_scene_out;
  std::vector<std::string> gen_params;
  std::int64_t gen_n = 0;
  double gen_t = 0.5;
  int gen_samples = 8;
  std::uint64_t gen_seed = 0;
  gen->add_option("--scene", gen_scene, "Scene JSON file");
  gen->add_option("--generator", gen_generator, "dot_array | nested_rings | ball_packing");
  gen->add_option("--param", gen_params, "Generator parameter key=value (repeatable)");
  gen->add_option("-n,--n", gen_n, "Voxels along the first axis")->required();
  gen->add_option("-t,--threshold", gen_t, "Density threshold t");
  gen->add_option("--samples", gen_samples, "Supersamples per axis for sampled voxels");
  gen->add_option("--seed", gen_seed, "Seed for supersampling");
  gen->add_option("-o,--out", gen_out, "Binary image output (.pgm or raw)")->required();
  gen->add_option("--density-out", gen_density_out, "Density field output (raw float64)");
  gen->add_option("--scene-out", gen_scene_out, "Write the scene JSON");

  // downsample
  auto* down = app.add_subcommand("downsample", "Block-average by an integer kernel");
  std::string down_in, down_out;
  std::int64_t down_a = 1;
  double down_t = 0.5, down_spacing = 1.0;
  down->add_option("input", down_in)->required();
  down->add_option("output", down_out)->required();
  down->add_option("-a,--kernel", down_a, "Kernel size")->required();
  down->add_option("-t,--threshold", down_t, "Threshold for binary input");
  down->add_option("--spacing", down_spacing, "Spacing of PGM input");

  // dsedt
  auto* ds = app.add_subcommand("dsedt", "Discrete signed Euclidean distance transform");
  std::string ds_in, ds_out, ds_pad = "none", ds_squared;
  double ds_spacing = 1.0;
  ds->add_option("input", ds_in)->required();
  ds->add_option("output", ds_out, "Raw float64 output")->required();
  ds->add_option("--pad", ds_pad, "none | solid | void");
  ds->add_option("--squared-out", ds_squared, "Raw int64 squared index distances");
  ds->add_option("--spacing", ds_spacing, "Spacing of PGM input");

  // ph
  auto* ph = app.add_subcommand("ph", "Persistence diagrams of a binary image (via DSEDT) or a .f64 field");
  std::string ph_in, ph_out, ph_pad = "none";
  double ph_spacing = 1.0;
  ph->add_option("input", ph_in)->required();
  ph->add_option("output", ph_out, "Diagram CSV")->required();
  ph->add_option("--pad", ph_pad, "none | solid | void");
  ph->add_option("--spacing", ph_spacing, "Spacing of PGM input");

  // bottleneck
  auto* bn = app.add_subcommand("bottleneck", "Bottleneck distance between two diagram files");
  std::string bn_a, bn_b;
  int bn_dim = 0;
  bool bn_exact = false;
  double bn_delta = 0.0;
  bn->add_option("a", bn_a)->required();
  bn->add_option("b", bn_b)->required();
  bn->add_option("--dim", bn_dim, "Homology dimension")->required();
  auto* bn_exact_flag = bn->add_flag("--exact", bn_exact, "Exact distance");
  bn->add_option("--delta", bn_delta, "Approximate within additive delta")->excludes(bn_exact_flag);

  // bounds
  auto* bd = app.add_subcommand("bounds", "Evaluate the resolution bounds");
  std::string bd_image, bd_gray, bd_density;
  double bd_r = 0.0, bd_r2 = 0.0, bd_t = 0.5, bd_spacing = 1.0;
  int bd_d = 0;
  std::int64_t bd_kernel = 0;
  std::optional<double> bd_reach, bd_leash, bd_lip, bd_rho_eps;
  bool bd_estimate = false;
  bd->add_option("--image", bd_image, "Binary image (sets r and d; enables leash estimation)");
  bd->add_option("--spacing", bd_spacing, "Spacing of PGM input");
  bd->add_option("--r", bd_r, "Spacing r");
  bd->add_option("--d", bd_d, "Ambient dimension");
  bd->add_option("--r2", bd_r2, "Second spacing for the Lipschitz pair bound");
  bd->add_option("--reach", bd_reach, "mreach value");
  bd->add_option("--leash", bd_leash, "mleash value at s = sqrt(d) r");
  bd->add_flag("--estimate-leash", bd_estimate, "Estimate mleash on --image");
  bd->add_option("--lipschitz", bd_lip, "Lipschitz constant L");
  bd->add_option("--rho-eps", bd_rho_eps, "Density bound tolerance (needs --density)");
  bd->add_option("--density", bd_density, "Density field (raw float64)");
  bd->add_option("-t,--threshold", bd_t, "Threshold for the density bound");
  bd->add_option("--gray", bd_gray, "Fine grayscale field (raw float64) for the M bound");
  bd->add_option("--kernel", bd_kernel, "Kernel for the M bound");

  // plateau
  auto* pl = app.add_subcommand("plateau", "Plateaus and spikes of a series CSV");
  std::string pl_in;
  int pl_dim = 0, pl_d = 2;
  double pl_eps = 0.0;
  std::optional<double> pl_reach;
  pl->add_option("series", pl_in)->required();
  pl->add_option("--dim", pl_dim, "Homology dimension");
  pl->add_option("--epsilon", pl_eps, "Plateau tolerance")->required();
  pl->add_option("--d", pl_d, "Ambient dimension");
  pl->add_option("--reach", pl_reach, "mreach for the final-plateau guarantee");

  // pipeline
  auto* pp = app.add_subcommand("pipeline", "Full resolution study");
  std::string pp_config, pp_out, pp_kernels, pp_metric;
  std::optional<int> pp_jobs;
  std::optional<std::uint64_t> pp_seed;
  std::optional<double> pp_delta, pp_eps;
  std::optional<std::int64_t> pp_n;
  bool pp_no_timing = false;
  pp->add_option("-c,--config", pp_config, "Config JSON")->required();
  pp->add_option("-o,--out", pp_out, "Output directory");
  pp->add_option("--jobs", pp_jobs, "Concurrent resolutions");
  pp->add_option("--seed", pp_seed, "Seed for stochastic paths");
  pp->add_option("--kernels", pp_kernels, "Comma-separated kernels, 'divisors' or 'powers_of_two'");
  pp->add_option("--metric", pp_metric, "exact | approx");
  pp->add_option("--delta", pp_delta, "Additive error of the approximate metric");
  pp->add_option("--n", pp_n, "Finest raster size for scenes");
  pp->add_option("--plateau-epsilon", pp_eps, "Plateau tolerance");
  pp->add_flag("--no-timing", pp_no_timing, "Write 0 in the seconds column");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*gen) {
      Scene scene;
      if (!gen_scene.empty()) {
        scene = scene_from_spec(read_json_file(gen_scene));
      } else if (!gen_generator.empty()) {
        auto spec = parse_params(gen_params);
        spec["generator"] = gen_generator;
        scene = scene_from_spec(spec);
      } else {
        throw ParameterError("generate needs --scene or --generator");
      }
      const Box& R = scene.bounding_region;
      const double spacing = (R.max[0] - R.min[0]) / static_cast<double>(gen_n);
      std::vector<std::int64_t> dims;
      std::vector<double> origin;
      for (int k = 0; k < scene.d; ++k) {
        dims.push_back(std::llround((R.max[k] - R.min[k]) / spacing));
        origin.push_back(R.min[k]);
      }
      const GridSpec grid = GridSpec::make(dims, spacing, origin);
      const auto rho = density_field(scene, grid, {gen_samples, gen_seed});
      io::write_binary(gen_out, threshold(rho, gen_t));
      if (!gen_density_out.empty()) io::write_raw_f64(gen_density_out, grid, rho.values(), {{"density", true}});
      if (!gen_scene_out.empty()) io::write_text(gen_scene_out, scene_to_json(scene).dump(2) + "\n");
      std::cout << scene.metadata.description << "\n" << grid.describe() << "\n";
    } else if (*down) {
      if (is_gray_path(down_in)) {
        const auto img = io::read_raw_f64(down_in);
        const auto out = downsample_gray(img, down_a);
        io::write_raw_f64(down_out, out.grid(), out.values());
      } else {
        io::write_binary(down_out, downsample_binary(io::read_binary(down_in, down_spacing), down_a, down_t));
      }
    } else if (*ds) {
      const auto img = io::read_binary(ds_in, ds_spacing);
      const auto D = dsedt(img, parse_pad_mode(ds_pad));
      io::write_raw_f64(ds_out, D.grid(), D.values(), {{"pad", ds_pad}, {"domain", "grid-restricted"}});
      if (!ds_squared.empty()) io::write_raw_i64(ds_squared, D.grid(), D.squared_int());
    } else if (*ph) {
      std::vector<PersistenceDiagram> diagrams;
      if (is_gray_path(ph_in)) {
        diagrams = compute_persistence(CubicalFiltration::build(io::read_raw_f64(ph_in)));
      } else {
        const auto img = io::read_binary(ph_in, ph_spacing);
        diagrams = compute_persistence(CubicalFiltration::build(dsedt(img, parse_pad_mode(ph_pad))));
      }
      write_diagrams_csv(ph_out, diagrams);
      for (const auto& dg : diagrams) {
        std::cout << "dim " << dg.dim << ": " << dg.points.size() << " points (" << dg.essential_count()
                  << " essential)\n";
      }
    } else if (*bn) {
      if (!bn_exact && !(bn_delta > 0.0)) throw ParameterError("bottleneck needs --exact or --delta x");
      const auto da = read_diagrams_csv(bn_a);
      const auto db = read_diagrams_csv(bn_b);
      const auto pick = [&](const std::vector<PersistenceDiagram>& v) {
        if (bn_dim < 0) throw ParameterError("dimension must be >= 0");
        return bn_dim < static_cast<int>(v.size()) ? v[static_cast<std::size_t>(bn_dim)]
                                                   : PersistenceDiagram{bn_dim, {}};
      };
      const auto res = bn_exact ? bottleneck_exact(pick(da), pick(db))
                                : bottleneck_approx(pick(da), pick(db), bn_delta);
      std::cout << format_real(res.distance) << "\n";
      if (res.witness) {
        const auto& w = *res.witness;
        std::cout << "witness (" << format_real(w.from.first) << ", " << format_real(w.from.second)
                  << ") -> " << (w.to_diagonal ? "diagonal " : "") << "(" << format_real(w.to.first)
                  << ", " << format_real(w.to.second) << ") cost " << format_real(w.cost) << "\n";
      }
    } else if (*bd) {
      BoundReport rep;
      std::optional<BinaryImage> img;
      if (!bd_image.empty()) {
        img = io::read_binary(bd_image, bd_spacing);
        rep.r = img->grid().spacing;
        rep.d = img->grid().d;
      }
      if (bd_r > 0.0) rep.r = bd_r;
      if (bd_d != 0) rep.d = bd_d;
      if (!img && !(bd_r > 0.0) && bd_gray.empty() && bd_density.empty()) {
        throw ParameterError("bounds needs --image, --r, --gray or --density");
      }
      const double sd = std::sqrt(static_cast<double>(rep.d));
      if (bd_lip) {
        rep.set("lipschitz", lipschitz_bound(*bd_lip, rep.r, rep.d));
        if (bd_r2 > 0.0) rep.set("lipschitz_pair", lipschitz_pair_bound(*bd_lip, rep.r, bd_r2, rep.d));
      }
      if (bd_reach) {
        if (const auto b = reach_bound(*bd_reach, rep.r, rep.d)) {
          rep.set("reach_bound_tight", *b);
        } else {
          rep.set_absent("reach_bound_tight", "r >= mreach/sqrt(d)");
        }
        rep.inputs["mreach"] = *bd_reach;
      }
      if (bd_leash) {
        rep.set("leash_bound", leash_bound(*bd_leash, rep.r, rep.d));
        rep.inputs["mleash"] = *bd_leash;
      } else if (bd_estimate) {
        if (!img) throw ParameterError("--estimate-leash needs --image");
        const double est = two_sided_leash(*img, sd * rep.r);
        rep.inputs["mleash_estimate"] = est;
        rep.inputs["mleash_band"] = sd * img->grid().spacing;
        if (std::isfinite(est)) {
          rep.set("leash_bound", leash_bound(est + sd * img->grid().spacing, rep.r, rep.d),
                  "estimated leash plus grid band");
        } else {
          rep.set_absent("leash_bound", "erosion is empty at s = sqrt(d) r");
        }
      }
      if (bd_rho_eps) {
        if (bd_density.empty()) throw ParameterError("--rho-eps needs --density");
        const auto rho = io::read_raw_f64(bd_density, true);
        const auto rb = rho_bound(rho, bd_t, *bd_rho_eps);
        rep.r = rho.grid().spacing;
        rep.d = rho.grid().d;
        rep.set("rho_bound", rb.bound);
        rep.inputs["m"] = rb.m;
        rep.inputs["m_unclamped"] = rb.m_raw;
      }
      if (!bd_gray.empty()) {
        if (bd_kernel < 1) throw ParameterError("--gray needs --kernel");
        const auto fine = io::read_raw_f64(bd_gray);
        const double M = grayscale_bound(fine, bd_kernel);
        rep.set("grayscale_Mr", M);
        rep.inputs["M"] = M;
      }
      print_json(rep.to_json());
    } else if (*pl) {
      const auto series = parse_series_csv(io::read_text(pl_in), pl_d);
      const auto rep = detect_plateaus(series, pl_dim, pl_eps);
      nlohmann::json j = rep.to_json();
      auto spikes = nlohmann::json::array();
      for (const auto& s : detect_spikes(series, pl_dim)) {
        spikes.push_back({{"n", s.n}, {"rise", s.rise}, {"fall", s.fall}, {"pixel_diameter", s.pixel_diameter}});
      }
      j["spikes"] = spikes;
      if (pl_reach) {
        std::vector<std::pair<std::int64_t, double>> res;
        for (const auto& e : series.for_dim(pl_dim)) res.emplace_back(e.n, e.r);
        if (const auto gq = final_plateau_guarantee(*pl_reach, res, pl_d, series.finest_n)) {
          j["final_plateau_guarantee"] = {{"M", gq->M}, {"N", gq->N}, {"epsilon", gq->epsilon},
                                          {"confirmed", is_plateau(series, pl_dim, gq->M, gq->N, gq->epsilon)}};
        } else {
          j["final_plateau_guarantee"] = nullptr;
        }
      }
      print_json(j);
    } else if (*pp) {
      auto cj = read_json_file(pp_config);
      if (!pp_out.empty()) cj["output_dir"] = pp_out;
      if (pp_jobs) cj["jobs"] = *pp_jobs;
      if (pp_seed) cj["seed"] = *pp_seed;
      if (pp_delta) cj["delta"] = *pp_delta;
      if (pp_n) cj["n"] = *pp_n;
      if (pp_eps) cj["plateau_epsilon"] = *pp_eps;
      if (!pp_metric.empty()) cj["metric"] = pp_metric;
      if (pp_no_timing) cj["timing"] = false;
      if (!pp_kernels.empty()) {
        if (pp_kernels == "divisors" || pp_kernels == "powers_of_two") {
          cj["kernels"] = pp_kernels;
        } else {
          auto arr = nlohmann::json::array();
          std::stringstream ss(pp_kernels);
          std::string tok;
          while (std::getline(ss, tok, ',')) {
            try {
              arr.push_back(std::stoll(tok));
            } catch (const std::exception&) {
              throw ParameterError("bad kernel '" + tok + "'");
            }
          }
          cj["kernels"] = arr;
        }
      }
      const auto res = run_pipeline(PipelineConfig::from_json(cj));
      std::cout << "wrote " << cj.value("output_dir", std::string("resograph_out")) << ": "
                << res.series.entries.size() << " rows, " << res.violations.size() << " bound violations\n";
    }
  } catch (const ParameterError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
  return 0;
}
