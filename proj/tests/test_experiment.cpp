#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <numbers>
#include <random>
#include <set>

#include "resograph/experiment.hpp"
#include "resograph/io.hpp"

using namespace resograph;

namespace {

ResolutionSeries make_series(const std::vector<std::pair<std::int64_t, double>>& rows, int d = 2) {
  ResolutionSeries s;
  s.d = d;
  for (const auto& [n, v] : rows) {
    SeriesEntry e;
    e.n = n;
    e.r = 1.0 / static_cast<double>(n);
    e.distance = v;
    s.entries.push_back(e);
    s.finest_n = std::max(s.finest_n, n);
  }
  return s;
}

bool window_ok(const std::vector<SeriesEntry>& rows, std::size_t i, std::size_t j, double eps) {
  for (std::size_t a = i; a <= j; ++a) {
    for (std::size_t b = i; b <= j; ++b) {
      if (!(std::abs(rows[a].distance - rows[b].distance) < eps)) return false;
    }
  }
  return true;
}

std::filesystem::path scratch(const std::string& name) {
  return std::filesystem::temp_directory_path() / "resograph_unit" / name;
}

}  // namespace

TEST_SUITE("experiment") {
  TEST_CASE("constant series is one plateau") {
    const auto s = make_series({{1, 3.0}, {2, 3.0}, {4, 3.0}, {8, 3.0}});
    const auto rep = detect_plateaus(s, 0, 0.1);
    REQUIRE(rep.intervals.size() == 1);
    CHECK(rep.intervals[0].lo_n == 1);
    CHECK(rep.intervals[0].hi_n == 8);
    CHECK(rep.intervals[0].is_final);
  }

  TEST_CASE("middle resolutions form a plateau") {
    const auto s = make_series({{1, 50.0}, {2, 10.4}, {3, 10.5}, {4, 10.0}, {5, 0.0}});
    const auto rep = detect_plateaus(s, 0, 1.0);
    REQUIRE(rep.intervals.size() == 1);
    CHECK(rep.intervals[0].lo_n == 2);
    CHECK(rep.intervals[0].hi_n == 4);
    CHECK_FALSE(rep.intervals[0].is_final);
    CHECK(rep.intervals[0].spread == doctest::Approx(0.5));
    CHECK_THROWS_AS(detect_plateaus(s, 0, 0.0), ParameterError);
    CHECK_THROWS_AS(detect_plateaus(make_series({{1, 0.0}}), 0, 1.0), ParameterError);
  }

  TEST_CASE("reported plateaus are valid and maximal") {
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> u(0.0, 10.0);
    for (int trial = 0; trial < 200; ++trial) {
      std::vector<std::pair<std::int64_t, double>> rows;
      for (std::int64_t n = 1; n <= 15; ++n) rows.push_back({n, n == 15 ? 0.0 : u(rng)});
      if (trial % 5 == 0) rows[3].second = kInfinity;
      const auto s = make_series(rows);
      const auto sorted = s.for_dim(0);
      const double eps = 1.0 + u(rng) / 2;
      const auto rep = detect_plateaus(s, 0, eps);
      std::set<std::pair<std::size_t, std::size_t>> reported;
      for (const auto& p : rep.intervals) {
        const auto i = static_cast<std::size_t>(p.lo_n - 1), j = static_cast<std::size_t>(p.hi_n - 1);
        reported.insert({i, j});
        CHECK(j > i);
        CHECK(window_ok(sorted, i, j, eps));
        CHECK(is_plateau(s, 0, p.lo_n, p.hi_n, eps));
        if (i > 0) CHECK_FALSE(window_ok(sorted, i - 1, j, eps));
        if (j + 1 < sorted.size()) CHECK_FALSE(window_ok(sorted, i, j + 1, eps));
        CHECK(p.is_final == (p.hi_n == 15));
      }
      // Every maximal valid window of length >= 2 is reported.
      for (std::size_t i = 0; i < sorted.size(); ++i) {
        for (std::size_t j = i + 1; j < sorted.size(); ++j) {
          if (!window_ok(sorted, i, j, eps)) continue;
          const bool left = i > 0 && window_ok(sorted, i - 1, j, eps);
          const bool right = j + 1 < sorted.size() && window_ok(sorted, i, j + 1, eps);
          if (!left && !right) CHECK(reported.count({i, j}) == 1);
        }
      }
    }
  }

  TEST_CASE("disjoint plateau count") {
    PlateauReport rep;
    rep.intervals = {{1, 3, 0, false}, {2, 5, 0, false}, {4, 6, 0, false}, {7, 9, 0, true}};
    CHECK(rep.disjoint_count() == 3);
  }

  TEST_CASE("spikes") {
    CHECK(detect_spikes(make_series({{1, 9.0}, {2, 5.0}, {3, 2.0}, {4, 0.0}}), 0).empty());
    const auto sp = detect_spikes(make_series({{1, 1.0}, {2, 5.0}, {3, 1.0}}), 0);
    REQUIRE(sp.size() == 1);
    CHECK(sp[0].n == 2);
    CHECK(sp[0].rise == 4.0);
    CHECK(sp[0].fall == 4.0);
    CHECK(sp[0].pixel_diameter == doctest::Approx(std::numbers::sqrt2 * 0.5));
  }

  TEST_CASE("final plateau guarantee") {
    std::vector<std::pair<std::int64_t, double>> res;
    for (std::int64_t n = 1; n <= 2048; ++n) res.push_back({n, 2048.0 / static_cast<double>(n)});
    const auto g = final_plateau_guarantee(5.0, res, 2, 2048);
    REQUIRE(g);
    CHECK(g->M == 580);
    CHECK(g->epsilon == doctest::Approx(4 * std::numbers::sqrt2 * 2048.0 / 580));
    const auto inf_reach = final_plateau_guarantee(1e300, res, 2, 2048);
    REQUIRE(inf_reach);
    CHECK(inf_reach->M == 1);
    CHECK_FALSE(final_plateau_guarantee(1e-3, res, 2, 2048).has_value());
    CHECK_THROWS_AS(final_plateau_guarantee(0.0, res, 2, 2048), ParameterError);
  }

  TEST_CASE("series CSV round trip") {
    ResolutionSeries s;
    s.finest_n = 8;
    SeriesEntry a{4, 0.25, 2, 0, 1.5, 3.0, std::nullopt, 7.25, 0.0};
    SeriesEntry b{8, 0.125, 1, 0, 0.0, 2.0, 1.0, 4.0, 0.0};
    SeriesEntry c{2, 0.5, 4, 1, kInfinity, std::nullopt, std::nullopt, std::nullopt, 0.0};
    s.entries = {c, a, b};
    const auto text = series_to_csv(s);
    CHECK(text.rfind("n,r,a,dim,d_B,bound_leash,bound_reach,bound_rho,seconds\n", 0) == 0);
    const auto back = parse_series_csv(text);
    CHECK(back.finest_n == 8);
    CHECK(series_to_csv(back) == text);
    const auto row = back.for_dim(1);
    REQUIRE(row.size() == 1);
    CHECK(std::isinf(row[0].distance));
    CHECK_FALSE(row[0].bound_leash.has_value());
    CHECK_THROWS_AS(parse_series_csv("n,r\n1,2\n"), DataError);
  }

  TEST_CASE("SVG plot") {
    const auto svg = svg_line_plot("t", "x", "y",
                                   {{"dim 0", {{1, 2}, {2, 3}, {4, kInfinity}, {8, 1}}, dim_color(0), false},
                                    {"bound", {{1, 5}, {8, 6}}, "#2ca02c", true}},
                                   true);
    CHECK(svg.rfind("<svg", 0) == 0);
    CHECK(svg.find("<path") != std::string::npos);
    CHECK(svg.find("#1f77b4") != std::string::npos);
    CHECK(svg.find("stroke-dasharray") != std::string::npos);
  }

  TEST_CASE("config JSON round trip and validation") {
    auto cfg = PipelineConfig::from_json(nlohmann::json::parse(
        R"({"scene":{"generator":"dot_array"},"n":512,"kernels":[1,2,4],"metric":"approx","delta":0.2,
            "rho_eps":null,"pad":"void","timing":false,"plateau_epsilon":3})"));
    CHECK(cfg.kernels == std::vector<std::int64_t>{1, 2, 4});
    CHECK(cfg.exact == false);
    CHECK_FALSE(cfg.rho_eps.has_value());
    CHECK(cfg.pad == PadMode::void_);
    const auto again = PipelineConfig::from_json(cfg.to_json());
    CHECK(again.to_json() == cfg.to_json());
    CHECK_THROWS_AS(PipelineConfig::from_json(nlohmann::json::parse(R"({"metric":"fast"})")), ParameterError);
    CHECK_THROWS_AS(PipelineConfig::from_json(nlohmann::json::parse(R"({"kernels":"odd"})")), ParameterError);
  }

  TEST_CASE("small pipeline run is deterministic and self-consistent") {
    const auto make = [](const std::string& out, int jobs) {
      auto j = nlohmann::json::parse(
          R"({"scene":{"generator":"dot_array","R1":4,"R2":100,"w":32,"extent":256},
              "n":256,"kernels":"divisors","timing":false,"plateau_epsilon":4})");
      j["output_dir"] = scratch(out).string();
      j["jobs"] = jobs;
      return PipelineConfig::from_json(j);
    };
    const auto r1 = run_pipeline(make("pipe1", 1));
    const auto r2 = run_pipeline(make("pipe2", 3));
    CHECK(r1.violations.empty());
    CHECK(series_to_csv(r1.series) == series_to_csv(r2.series));
    CHECK(io::read_text(scratch("pipe1") / "series.csv") == io::read_text(scratch("pipe2") / "series.csv"));
    CHECK(io::read_text(scratch("pipe1") / "diagrams" / "n64.csv") ==
          io::read_text(scratch("pipe2") / "diagrams" / "n64.csv"));
    CHECK(std::filesystem::exists(scratch("pipe1") / "plot_dim1.svg"));
    CHECK(std::filesystem::exists(scratch("pipe1") / "plot_dim0_pixel.svg"));
    CHECK(std::filesystem::exists(scratch("pipe1") / "report.json"));
    for (const auto& e : r1.series.entries) {
      if (e.n == 256) CHECK(e.distance == 0.0);
      if (e.r < 4.0 / std::numbers::sqrt2) {
        REQUIRE(e.bound_reach);
        CHECK(e.distance <= *e.bound_reach);
      }
    }
    REQUIRE(r1.guarantee);
    CHECK(is_plateau(r1.series, 1, r1.guarantee->M, 256, r1.guarantee->epsilon));
  }

  TEST_CASE("pipeline rejects kernels that do not divide the grid") {
    auto j = nlohmann::json::parse(R"({"scene":{"generator":"dot_array","R1":4,"R2":100,"w":32,"extent":256},
                                       "n":256,"kernels":[1,3]})");
    j["output_dir"] = scratch("pipe_bad").string();
    CHECK_THROWS_AS(run_pipeline(PipelineConfig::from_json(j)), ParameterError);
  }
}
