#pragma once

#include <map>
#include <optional>

#include <json.hpp>

#include "resograph/image.hpp"

namespace resograph {

struct BoundEntry {
  std::optional<double> value;
  bool applicable = false;
  std::string reason;
};

/// Bounds on d_B between a resolution's diagram and a reference, keyed by name
/// (grayscale_Mr, lipschitz, lipschitz_pair, leash_bound, reach_bound_tight, rho_bound).
struct BoundReport {
  double r = 1.0;
  int d = 2;
  std::map<std::string, BoundEntry> bounds;
  nlohmann::json inputs = nlohmann::json::object();

  void set(const std::string& name, double value, std::string reason = {});
  void set_absent(const std::string& name, std::string reason);
  std::optional<double> get(const std::string& name) const;
  nlohmann::json to_json() const;
};

/// max over coarse blocks of (max of the block's fine values - min over the
/// block grown by one fine voxel, clipped to the grid).
double grayscale_bound(const GrayscaleImage& fine, std::int64_t a);

double lipschitz_bound(double L, double r, int d);
/// L*r2*sqrt(d) when r2/r1 is an integer, otherwise L*(r1+r2)*sqrt(d).
double lipschitz_pair_bound(double L, double r1, double r2, int d);
double leash_bound(double mleash_value, double r, int d);
/// 2*sqrt(d)*r when r < mreach/sqrt(d), otherwise absent.
std::optional<double> reach_bound(double mreach_value, double r, int d);

struct RhoBoundResult {
  double m = 0.0;      // after clamping at 0
  double m_raw = 0.0;  // unclamped maximum
  double bound = 0.0;  // m + 2*sqrt(d)*r
};
/// Density bound for X(r,t) against the continuous object behind rho.
RhoBoundResult rho_bound(const GrayscaleImage& rho, double t, double eps);

struct Measurement {
  double n = 0.0;
  int dim = 0;
  double distance = 0.0;
};

struct Violation {
  double n = 0.0;
  int dim = 0;
  double measured = 0.0;
  std::string bound;
  double bound_value = 0.0;
};

/// Every measurement exceeding an applicable bound of the report for its n.
std::vector<Violation> verify_bounds(const std::vector<Measurement>& measured,
                                     const std::map<double, BoundReport>& reports,
                                     double tolerance = 0.0);

}  // namespace resograph
