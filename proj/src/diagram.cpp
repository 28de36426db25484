#include <charconv>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "resograph/cubical.hpp"
#include "resograph/io.hpp"

namespace resograph {

std::string format_real(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string diagrams_to_csv(const std::vector<PersistenceDiagram>& diagrams) {
  std::string out = "dim,birth,death\n";
  for (const auto& dg : diagrams) {
    for (const auto& [b, d] : dg.points) {
      out += std::to_string(dg.dim) + "," + format_real(b) + "," + format_real(d) + "\n";
    }
  }
  return out;
}

void write_diagrams_csv(const std::filesystem::path& path,
                        const std::vector<PersistenceDiagram>& diagrams) {
  io::write_text(path, diagrams_to_csv(diagrams));
}

namespace {

double parse_real(const std::string& s, std::size_t line) {
  if (s == "inf" || s == "+inf") return kInfinity;
  if (s == "-inf") return -kInfinity;
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size() || !std::isfinite(v)) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw DataError("diagram CSV line " + std::to_string(line) + ": bad number '" + s + "'");
  }
}

}  // namespace

std::vector<PersistenceDiagram> parse_diagrams_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  std::vector<PersistenceDiagram> out;
  bool header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (!header) {
      if (line != "dim,birth,death") {
        throw DataError("diagram CSV must start with the header dim,birth,death");
      }
      header = true;
      continue;
    }
    std::string f[3];
    std::istringstream ls(line);
    for (auto& field : f) {
      if (!std::getline(ls, field, ',')) {
        throw DataError("diagram CSV line " + std::to_string(lineno) + ": expected 3 fields");
      }
    }
    int dim = -1;
    const auto res = std::from_chars(f[0].data(), f[0].data() + f[0].size(), dim);
    if (res.ec != std::errc() || dim < 0 || dim > 2) {
      throw DataError("diagram CSV line " + std::to_string(lineno) + ": bad dimension");
    }
    const double b = parse_real(f[1], lineno);
    const double d = parse_real(f[2], lineno);
    if (!std::isfinite(b) || !(d >= b)) {
      throw DataError("diagram CSV line " + std::to_string(lineno) + ": need finite birth <= death");
    }
    while (static_cast<int>(out.size()) <= dim) {
      out.push_back(PersistenceDiagram{static_cast<int>(out.size()), {}});
    }
    out[static_cast<std::size_t>(dim)].points.emplace_back(b, d);
  }
  if (!header) throw DataError("diagram CSV is empty");
  for (auto& dg : out) dg.sort_points();
  return out;
}

std::vector<PersistenceDiagram> read_diagrams_csv(const std::filesystem::path& path) {
  return parse_diagrams_csv(io::read_text(path));
}

}  // namespace resograph
