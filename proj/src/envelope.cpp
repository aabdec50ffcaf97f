#include "opineq/envelope.hpp"

#include <cmath>
#include <sstream>

#include "opineq/scalaropt.hpp"

namespace opineq {

double AffineEnvelope::lower(std::span<const double> x) const {
  double acc = b;
  for (std::size_t i = 0; i < x.size(); ++i) acc += a[i] * x[i];
  return acc;
}

double AffineEnvelope::upper(std::span<const double> x) const {
  double acc = d;
  for (std::size_t i = 0; i < x.size(); ++i) acc += c[i] * x[i];
  return acc;
}

namespace {

double chord_slope(const ScalarFunc1D& u, Interval iv) {
  if (u.is_affine()) return u.affine_slope();
  return (u(iv.hi) - u(iv.lo)) / (iv.hi - iv.lo);
}

/// [min, max] of u(s) - k s on the interval.
std::pair<double, double> residual_range(const ScalarFunc1D& u, double k, Interval iv) {
  if (u.is_constant()) {
    const double v = u(iv.lo);
    if (k == 0.0) return {v, v};
  }
  const BoxDomain box({iv});
  const Objective r = [&](std::span<const double> s) { return u(s[0]) - k * s[0]; };
  return {box_minimize(r, box).value, box_maximize(r, box).value};
}

std::vector<double> axis_nodes(Interval iv, int res) {
  std::vector<double> x(static_cast<std::size_t>(res));
  const double h = (iv.hi - iv.lo) / double(res - 1);
  for (int k = 0; k < res; ++k) x[std::size_t(k)] = iv.lo + h * double(k);
  x.back() = iv.hi;
  return x;
}

}  // namespace

AffineEnvelope fit_envelope(const MultiFunc& f, const BoxDomain& box, int grid_res,
                            EnvelopeCheck* check_out) {
  const std::size_t n = f.arity();
  if (box.arity() != n) throw DimensionError("fit_envelope: box arity differs from f");
  if (!f.defined_on(box)) throw DomainError("fit_envelope: " + f.describe() + " is undefined on the box");

  AffineEnvelope env{std::vector<double>(n, 0.0), 0.0, std::vector<double>(n, 0.0), 0.0};
  if (f.is_separable()) {
    const auto& t = f.separable().terms;
    for (std::size_t i = 0; i < n; ++i) {
      const double k = t[i].is_constant() ? 0.0 : chord_slope(t[i], box[i]);
      const auto [lo, hi] = residual_range(t[i], k, box[i]);
      env.a[i] = env.c[i] = k;
      env.b += lo;
      env.d += hi;
    }
  } else {
    const auto& comp = f.composite();
    Interval s{0.0, 0.0};
    for (std::size_t i = 0; i < n; ++i) {
      s.lo += comp.beta[i] * box[i].lo;
      s.hi += comp.beta[i] * box[i].hi;
    }
    if (s.hi > s.lo && !comp.outer.is_constant()) {
      const double k = chord_slope(comp.outer, s);
      const auto [lo, hi] = residual_range(comp.outer, k, s);
      for (std::size_t i = 0; i < n; ++i) env.a[i] = env.c[i] = comp.beta[i] * k;
      env.b = lo;
      env.d = hi;
    } else {
      env.b = env.d = comp.outer(s.lo);
    }
  }

  const auto check = validate_envelope(f, env, box, grid_res);
  if (check_out) *check_out = check;
  if (!check.ok()) {
    std::ostringstream os;
    os << "fit_envelope: fitted envelope for " << f.describe() << " fails validation at "
       << check.violations << " nodes (worst gap " << check.worst_gap << ")";
    throw ConvergenceError(os.str());
  }
  return env;
}

EnvelopeCheck validate_envelope(const MultiFunc& f, const AffineEnvelope& env,
                                const BoxDomain& box, int grid_res) {
  const std::size_t n = f.arity();
  if (box.arity() != n || env.a.size() != n || env.c.size() != n) {
    throw DimensionError("validate_envelope: arity mismatch");
  }
  if (grid_res < 2) throw InputError("validate_envelope: grid_res must be >= 2");

  const auto res = static_cast<std::size_t>(grid_res);
  std::vector<std::vector<double>> nodes(n);
  for (std::size_t i = 0; i < n; ++i) nodes[i] = axis_nodes(box[i], grid_res);

  // Per-axis caches: the envelope sides are always sums over axes, and so is
  // a separable f. Composite f only needs sum_i beta_i x_i per node.
  std::vector<std::vector<double>> lo_part(n, std::vector<double>(res));
  std::vector<std::vector<double>> hi_part(n, std::vector<double>(res));
  std::vector<std::vector<double>> f_part(n, std::vector<double>(res));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < res; ++k) {
      const double x = nodes[i][k];
      lo_part[i][k] = env.a[i] * x;
      hi_part[i][k] = env.c[i] * x;
      f_part[i][k] = f.is_separable() ? f.separable().terms[i](x) : f.composite().beta[i] * x;
    }
  }

  EnvelopeCheck out;
  std::vector<std::size_t> idx(n, 0);
  for (;;) {
    double lo = env.b, hi = env.d, acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      lo += lo_part[i][idx[i]];
      hi += hi_part[i][idx[i]];
      acc += f_part[i][idx[i]];
    }
    const double fx = f.is_separable() ? acc : f.composite().outer(acc);
    const double gap = std::max(lo - fx, fx - hi);
    if (!(gap <= kEnvelopeTolerance)) {
      ++out.violations;
      out.worst_gap = std::max(out.worst_gap, std::isnan(gap) ? INFINITY : gap);
    }
    ++out.nodes;

    std::size_t axis = n;
    while (axis > 0 && ++idx[axis - 1] == res) idx[--axis] = 0;
    if (axis == 0) break;
  }
  return out;
}

}  // namespace opineq
