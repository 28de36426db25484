#pragma once

#include <optional>

#include "resograph/cubical.hpp"

namespace resograph {

struct MatchedPair {
  /// A point of either diagram; a diagonal partner is reported as its projection.
  std::pair<double, double> from;
  std::pair<double, double> to;
  bool to_diagonal = false;
  double cost = 0.0;
};

struct BottleneckResult {
  double distance = 0.0;  // +inf when the essential counts differ
  bool exact = true;
  double delta = 0.0;  // additive error bound of the approximate mode
  std::optional<MatchedPair> witness;
};

/// Exact bottleneck distance under the L-infinity ground metric. Off-diagonal
/// points may match the diagonal at cost (death-birth)/2; essential points
/// match essential points only, at cost |birth difference|.
BottleneckResult bottleneck_exact(const PersistenceDiagram& a, const PersistenceDiagram& b);

/// Bottleneck distance within additive delta of the exact value.
BottleneckResult bottleneck_approx(const PersistenceDiagram& a, const PersistenceDiagram& b,
                                   double delta);

/// True iff a matching of cost <= eps exists (finite parts only).
bool bottleneck_feasible(const std::vector<std::pair<double, double>>& a,
                         const std::vector<std::pair<double, double>>& b, double eps);

}  // namespace resograph
