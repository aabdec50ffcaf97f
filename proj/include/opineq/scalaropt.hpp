#pragma once

#include <functional>
#include <span>
#include <vector>

#include "opineq/multifunc.hpp"

namespace opineq {

/// Objective over a box: R^n -> R.
using Objective = std::function<double(std::span<const double>)>;

struct OptOptions {
  int grid_points = 33;          ///< per axis, endpoints included
  int top_cells = 5;             ///< coarse nodes polished by local search
  double rel_tolerance = 1e-9;   ///< simplex diameter stop, relative to box width
  int max_iterations = 4000;     ///< per polish
};

struct OptResult {
  std::vector<double> argpoint;
  double value = 0.0;
  int certificate_res = 0;
};

/// Global maximum over the box: exhaustive coarse grid, then projected
/// Nelder-Mead from the best nodes. Ties resolve to the lexicographically
/// smallest argpoint. Deterministic for fixed options.
OptResult box_maximize(const Objective& objective, const BoxDomain& box,
                       const OptOptions& opts = {});

/// Global minimum, computed as -box_maximize(-objective).
OptResult box_minimize(const Objective& objective, const BoxDomain& box,
                       const OptOptions& opts = {});

/// Largest number of axes accepted by the optimizer.
inline constexpr std::size_t kMaxOptimizerArity = 6;

}  // namespace opineq
