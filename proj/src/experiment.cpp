#include "resograph/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace resograph {

namespace {

std::string opt_field(const std::optional<double>& v) { return v ? format_real(*v) : std::string(); }

std::optional<double> parse_opt(const std::string& s, std::size_t line) {
  if (s.empty()) return std::nullopt;
  if (s == "inf") return kInfinity;
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw DataError("series CSV line " + std::to_string(line) + ": bad number '" + s + "'");
  }
}

constexpr const char* kSeriesHeader = "n,r,a,dim,d_B,bound_leash,bound_reach,bound_rho,seconds";

}  // namespace

std::vector<SeriesEntry> ResolutionSeries::for_dim(int k) const {
  std::vector<SeriesEntry> out;
  for (const auto& e : entries) {
    if (e.dim == k) out.push_back(e);
  }
  std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) { return x.n < y.n; });
  return out;
}

std::string series_to_csv(const ResolutionSeries& s) {
  std::string out = std::string(kSeriesHeader) + "\n";
  for (const auto& e : s.entries) {
    out += std::to_string(e.n) + "," + format_real(e.r) + "," + std::to_string(e.a) + "," +
           std::to_string(e.dim) + "," + format_real(e.distance) + "," + opt_field(e.bound_leash) +
           "," + opt_field(e.bound_reach) + "," + opt_field(e.bound_rho) + "," +
           format_real(e.seconds) + "\n";
  }
  return out;
}

ResolutionSeries parse_series_csv(const std::string& text, int d) {
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  ResolutionSeries s;
  s.d = d;
  bool header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (!header) {
      if (line != kSeriesHeader) throw DataError("series CSV header mismatch");
      header = true;
      continue;
    }
    std::vector<std::string> f;
    std::string field;
    std::istringstream ls(line);
    while (std::getline(ls, field, ',')) f.push_back(field);
    if (line.back() == ',') f.emplace_back();
    if (f.size() != 9) throw DataError("series CSV line " + std::to_string(lineno) + ": expected 9 fields");
    SeriesEntry e;
    try {
      e.n = std::stoll(f[0]);
      e.a = std::stoll(f[2]);
      e.dim = std::stoi(f[3]);
    } catch (const std::exception&) {
      throw DataError("series CSV line " + std::to_string(lineno) + ": bad integer field");
    }
    e.r = parse_opt(f[1], lineno).value_or(0.0);
    e.distance = parse_opt(f[4], lineno).value_or(0.0);
    e.bound_leash = parse_opt(f[5], lineno);
    e.bound_reach = parse_opt(f[6], lineno);
    e.bound_rho = parse_opt(f[7], lineno);
    e.seconds = parse_opt(f[8], lineno).value_or(0.0);
    s.finest_n = std::max(s.finest_n, e.n);
    s.entries.push_back(e);
  }
  if (!header) throw DataError("series CSV is empty");
  return s;
}

std::size_t PlateauReport::disjoint_count() const {
  auto iv = intervals;
  std::sort(iv.begin(), iv.end(), [](const auto& x, const auto& y) { return x.hi_n < y.hi_n; });
  std::size_t count = 0;
  std::int64_t last = -1;
  for (const auto& p : iv) {
    if (p.lo_n > last) {
      ++count;
      last = p.hi_n;
    }
  }
  return count;
}

nlohmann::json PlateauReport::to_json() const {
  nlohmann::json j;
  j["dim"] = dim;
  j["epsilon"] = epsilon;
  j["intervals"] = nlohmann::json::array();
  for (const auto& p : intervals) {
    j["intervals"].push_back(
        {{"lo_n", p.lo_n}, {"hi_n", p.hi_n}, {"spread", p.spread}, {"is_final", p.is_final}});
  }
  j["disjoint_count"] = disjoint_count();
  return j;
}

PlateauReport detect_plateaus(const ResolutionSeries& s, int k, double epsilon) {
  if (!(epsilon > 0.0)) throw ParameterError("plateau epsilon must be positive");
  const auto rows = s.for_dim(k);
  if (rows.size() < 2) throw ParameterError("plateau detection needs at least two resolutions");
  PlateauReport rep;
  rep.dim = k;
  rep.epsilon = epsilon;
  const std::size_t m = rows.size();
  // reach[i]: last index j such that rows[i..j] is a valid window.
  std::vector<std::size_t> reach(m);
  for (std::size_t i = 0; i < m; ++i) {
    std::size_t j = i;
    if (std::isfinite(rows[i].distance)) {
      double lo = rows[i].distance, hi = rows[i].distance;
      while (j + 1 < m && std::isfinite(rows[j + 1].distance)) {
        const double v = rows[j + 1].distance;
        if (std::max(hi, v) - std::min(lo, v) >= epsilon) break;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
        ++j;
      }
    }
    reach[i] = j;
  }
  for (std::size_t i = 0; i < m; ++i) {
    if (reach[i] == i) continue;
    if (i > 0 && reach[i - 1] >= reach[i]) continue;  // contained in the window starting at i-1
    PlateauInterval p;
    p.lo_n = rows[i].n;
    p.hi_n = rows[reach[i]].n;
    double lo = kInfinity, hi = -kInfinity;
    for (std::size_t j = i; j <= reach[i]; ++j) {
      lo = std::min(lo, rows[j].distance);
      hi = std::max(hi, rows[j].distance);
    }
    p.spread = hi - lo;
    p.is_final = rows[reach[i]].n == s.finest_n;
    rep.intervals.push_back(p);
  }
  return rep;
}

bool is_plateau(const ResolutionSeries& s, int k, std::int64_t lo_n, std::int64_t hi_n,
                double epsilon) {
  double lo = kInfinity, hi = -kInfinity;
  std::size_t count = 0;
  for (const auto& e : s.for_dim(k)) {
    if (e.n < lo_n || e.n > hi_n) continue;
    if (!std::isfinite(e.distance)) return false;
    lo = std::min(lo, e.distance);
    hi = std::max(hi, e.distance);
    ++count;
  }
  return count >= 1 && hi - lo < epsilon;
}

std::vector<Spike> detect_spikes(const ResolutionSeries& s, int k) {
  const auto rows = s.for_dim(k);
  std::vector<Spike> out;
  for (std::size_t i = 1; i + 1 < rows.size(); ++i) {
    const double a = rows[i - 1].distance, b = rows[i].distance, c = rows[i + 1].distance;
    if (!std::isfinite(a) || !std::isfinite(b) || !std::isfinite(c)) continue;
    if (b > a && b > c) {
      out.push_back({rows[i].n, b - a, b - c, std::sqrt(static_cast<double>(s.d)) * rows[i].r});
    }
  }
  return out;
}

std::optional<PlateauGuarantee> final_plateau_guarantee(
    double mreach_value, const std::vector<std::pair<std::int64_t, double>>& resolutions, int d,
    std::int64_t N) {
  if (!(mreach_value > 0.0)) throw ParameterError("reach must be positive");
  auto res = resolutions;
  std::sort(res.begin(), res.end());
  const double sd = std::sqrt(static_cast<double>(d));
  for (const auto& [n, r] : res) {
    if (r < mreach_value / sd) return PlateauGuarantee{n, N, r, 4.0 * sd * r};
  }
  return std::nullopt;
}

}  // namespace resograph
