#include "opineq/scalaropt.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace opineq {

namespace {

struct Candidate {
  std::vector<double> x;
  double value;
};

/// Higher value wins; equal values resolve to the lexicographically smaller point.
bool better(const Candidate& a, const Candidate& b) {
  if (a.value != b.value) return a.value > b.value;
  return a.x < b.x;
}

class Evaluator {
 public:
  Evaluator(const Objective& f, double sign) : f_(f), sign_(sign) {}

  double operator()(std::span<const double> x) const {
    double v;
    try {
      v = f_(x);
    } catch (const Error& e) {
      throw DomainError(std::string("objective failed at ") + point_string(x) + ": " + e.what());
    }
    if (!std::isfinite(v)) {
      throw DomainError("objective is not finite at " + point_string(x));
    }
    return sign_ * v;
  }

  static std::string point_string(std::span<const double> x) {
    std::ostringstream os;
    os.precision(17);
    os << "(";
    for (std::size_t i = 0; i < x.size(); ++i) os << (i ? ", " : "") << x[i];
    os << ")";
    return os.str();
  }

 private:
  const Objective& f_;
  double sign_;
};

void clamp_to_box(std::vector<double>& x, const BoxDomain& box) {
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::clamp(x[i], box[i].lo, box[i].hi);
}

/// Projected Nelder-Mead (maximizing). The start simplex spans one grid step
/// along each axis, pointing into the box.
Candidate polish(const Evaluator& eval, const BoxDomain& box, const Candidate& start,
                 std::span<const double> step, const OptOptions& opts) {
  const std::size_t n = start.x.size();
  std::vector<Candidate> simplex;
  simplex.reserve(n + 1);
  simplex.push_back(start);
  for (std::size_t i = 0; i < n; ++i) {
    Candidate c{start.x, 0.0};
    c.x[i] += (c.x[i] + step[i] <= box[i].hi) ? step[i] : -step[i];
    clamp_to_box(c.x, box);
    c.value = eval(c.x);
    simplex.push_back(std::move(c));
  }

  const double stop = opts.rel_tolerance * box.max_width();
  auto make = [&](const std::vector<double>& centroid, const std::vector<double>& worst,
                  double t) {
    Candidate c{std::vector<double>(n), 0.0};
    for (std::size_t i = 0; i < n; ++i) c.x[i] = centroid[i] + t * (worst[i] - centroid[i]);
    clamp_to_box(c.x, box);
    c.value = eval(c.x);
    return c;
  };

  for (int iter = 0; iter < opts.max_iterations; ++iter) {
    std::sort(simplex.begin(), simplex.end(), better);

    double diameter = 0.0;
    for (std::size_t k = 1; k <= n; ++k)
      for (std::size_t i = 0; i < n; ++i)
        diameter = std::max(diameter, std::abs(simplex[k].x[i] - simplex[0].x[i]));
    if (diameter < stop) break;

    std::vector<double> centroid(n, 0.0);
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t i = 0; i < n; ++i) centroid[i] += simplex[k].x[i] / double(n);

    const Candidate& worst = simplex[n];
    Candidate reflected = make(centroid, worst.x, -1.0);
    if (better(reflected, simplex[0])) {
      Candidate expanded = make(centroid, worst.x, -2.0);
      simplex[n] = better(expanded, reflected) ? std::move(expanded) : std::move(reflected);
      continue;
    }
    if (better(reflected, simplex[n - 1])) {
      simplex[n] = std::move(reflected);
      continue;
    }
    const bool outside = better(reflected, worst);
    Candidate contracted = make(centroid, outside ? reflected.x : worst.x, 0.5);
    if (better(contracted, outside ? reflected : worst)) {
      simplex[n] = std::move(contracted);
      continue;
    }
    // Shrink toward the best vertex.
    for (std::size_t k = 1; k <= n; ++k) {
      for (std::size_t i = 0; i < n; ++i)
        simplex[k].x[i] = simplex[0].x[i] + 0.5 * (simplex[k].x[i] - simplex[0].x[i]);
      clamp_to_box(simplex[k].x, box);
      simplex[k].value = eval(simplex[k].x);
    }
  }
  return *std::min_element(simplex.begin(), simplex.end(), better);
}

OptResult optimize(const Objective& objective, const BoxDomain& box, const OptOptions& opts,
                   double sign) {
  const std::size_t n = box.arity();
  if (n == 0 || n > kMaxOptimizerArity) {
    throw InputError("optimizer supports 1.." + std::to_string(kMaxOptimizerArity) + " axes");
  }
  if (opts.grid_points < 2 || opts.top_cells < 1) throw InputError("invalid optimizer options");

  const Evaluator eval(objective, sign);
  const auto res = static_cast<std::size_t>(opts.grid_points);
  std::vector<std::vector<double>> nodes(n);
  std::vector<double> step(n);
  for (std::size_t i = 0; i < n; ++i) {
    nodes[i].resize(res);
    const double h = (box[i].hi - box[i].lo) / double(res - 1);
    for (std::size_t k = 0; k < res; ++k) nodes[i][k] = box[i].lo + h * double(k);
    nodes[i][res - 1] = box[i].hi;
    step[i] = h;
  }

  // Keep the best `top_cells` grid nodes.
  const auto keep = static_cast<std::size_t>(opts.top_cells);
  std::vector<Candidate> top;
  std::vector<std::size_t> idx(n, 0);
  std::vector<double> x(n);
  for (;;) {
    for (std::size_t i = 0; i < n; ++i) x[i] = nodes[i][idx[i]];
    Candidate c{x, eval(x)};
    if (top.size() < keep || better(c, top.back())) {
      top.insert(std::upper_bound(top.begin(), top.end(), c, better), std::move(c));
      if (top.size() > keep) top.pop_back();
    }
    std::size_t axis = n;
    while (axis > 0 && ++idx[axis - 1] == res) idx[--axis] = 0;
    if (axis == 0) break;
  }

  Candidate best = top.front();
  for (const auto& start : top) {
    Candidate c = polish(eval, box, start, step, opts);
    if (better(c, best)) best = std::move(c);
  }

  OptResult out;
  out.value = sign * best.value;
  out.argpoint = std::move(best.x);
  out.certificate_res = opts.grid_points;
  return out;
}

}  // namespace

OptResult box_maximize(const Objective& objective, const BoxDomain& box, const OptOptions& opts) {
  return optimize(objective, box, opts, 1.0);
}

OptResult box_minimize(const Objective& objective, const BoxDomain& box, const OptOptions& opts) {
  return optimize(objective, box, opts, -1.0);
}

}  // namespace opineq
