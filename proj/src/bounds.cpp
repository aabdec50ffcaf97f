#include "opineq/bounds.hpp"

#include <cmath>
#include <sstream>

#include "opineq/scalaropt.hpp"

namespace opineq {

std::vector<std::size_t> InequalityInstance::shape() const {
  std::vector<std::size_t> s;
  for (const auto& a : axes) s.push_back(a.size());
  return s;
}

void check_instance(const InequalityInstance& inst, int envelope_grid) {
  const std::size_t n = inst.arity();
  if (n == 0) throw InputError("instance has no axes");
  if (inst.box.arity() != n) throw DimensionError("instance box arity differs from axis count");
  if (inst.f.arity() != n || inst.g.arity() != n) {
    throw DimensionError("instance f and g must take one argument per axis");
  }
  if (inst.weights.shape() != inst.shape()) throw DimensionError("instance weight shape mismatch");
  if (inst.grid.shape() != inst.shape()) throw DimensionError("instance map grid shape mismatch");
  if (inst.envelope.a.size() != n || inst.envelope.c.size() != n) {
    throw DimensionError("instance envelope arity mismatch");
  }

  const Index dim = inst.grid.dim_in();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < inst.axes[i].size(); ++j) {
      const auto& a = inst.axes[i][j];
      if (a.dim() != dim) throw DimensionError("axis operator dimension differs from map input");
      const auto sd = eig_hermitian(a);
      if (sd.min() < inst.box[i].lo - kSpectrumTolerance ||
          sd.max() > inst.box[i].hi + kSpectrumTolerance) {
        std::ostringstream os;
        os << "spectrum of A[" << i << "][" << j << "] = [" << sd.min() << ", " << sd.max()
           << "] leaves the box [" << inst.box[i].lo << ", " << inst.box[i].hi << "]";
        throw InputError(os.str());
      }
    }
  }
  if (!inst.f.defined_on(inst.box)) throw DomainError("f is not defined on the box");
  if (!inst.g.defined_on(inst.box)) throw DomainError("g is not defined on the box");
  if (envelope_grid > 0) {
    const auto chk = validate_envelope(inst.f, inst.envelope, inst.box, envelope_grid);
    if (!chk.ok()) {
      std::ostringstream os;
      os << "envelope of f fails at " << chk.violations << " grid nodes (worst gap "
         << chk.worst_gap << ")";
      throw InputError(os.str());
    }
  }
}

const char* to_string(Side side) { return side == Side::Upper ? "upper" : "lower"; }

double bound_tolerance(const HermitianOperator& lhs, const HermitianOperator& rhs) {
  return 1e-8 * (1.0 + std::max(max_abs(lhs.matrix()), max_abs(rhs.matrix())));
}

HermitianOperator lhs_f_mixture(const InequalityInstance& inst) {
  const MultiIndexRange range(inst.shape());
  std::vector<HermitianOperator> field(range.size());
  std::vector<HermitianOperator> args(inst.arity());
  range.for_each([&](std::size_t flat, const std::vector<std::size_t>& j) {
    for (std::size_t i = 0; i < j.size(); ++i) args[i] = inst.axes[i][j[i]];
    field[flat] = eval_operator(inst.f, args);
  });
  return aggregate(inst.grid, inst.weights, field);
}

std::vector<HermitianOperator> arg_mixtures(const InequalityInstance& inst) {
  const MultiIndexRange range(inst.shape());
  std::vector<HermitianOperator> out;
  for (std::size_t i = 0; i < inst.arity(); ++i) {
    std::vector<HermitianOperator> field(range.size());
    range.for_each([&](std::size_t flat, const std::vector<std::size_t>& j) {
      field[flat] = inst.axes[i][j[i]];
    });
    out.push_back(aggregate(inst.grid, inst.weights, field));
  }
  return out;
}

bool mixtures_in_box(const InequalityInstance& inst, const std::vector<HermitianOperator>& t,
                     double tol) {
  for (std::size_t i = 0; i < t.size(); ++i) {
    const auto sd = eig_hermitian(t[i]);
    if (sd.min() < inst.box[i].lo - tol || sd.max() > inst.box[i].hi + tol) return false;
  }
  return true;
}

namespace {

struct Envelope1 {
  const std::vector<double>& slope;
  double offset;
  double operator()(std::span<const double> x) const {
    double acc = offset;
    for (std::size_t i = 0; i < x.size(); ++i) acc += slope[i] * x[i];
    return acc;
  }
};

Envelope1 side_envelope(const AffineEnvelope& env, Side side) {
  return side == Side::Upper ? Envelope1{env.c, env.d} : Envelope1{env.a, env.b};
}

OptResult extremum(const Objective& obj, const BoxDomain& box, bool maximize) {
  return maximize ? box_maximize(obj, box) : box_minimize(obj, box);
}

BoundReport finish(std::string theorem, Side side, HermitianOperator lhs, HermitianOperator rhs,
                   const OptResult& opt) {
  BoundReport r;
  r.theorem = std::move(theorem);
  r.side = side;
  const double tol = bound_tolerance(lhs, rhs);
  r.verdict = side == Side::Upper ? loewner_leq(lhs, rhs, tol) : loewner_leq(rhs, lhs, tol);
  r.lhs = std::move(lhs);
  r.rhs = std::move(rhs);
  r.scalar_constant = opt.value;
  r.argpoint = opt.argpoint;
  return r;
}

/// True when v = t * beta for some real t (including v = 0).
bool parallel_to(const std::vector<double>& v, const std::vector<double>& beta) {
  double scale = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) scale = std::max({scale, std::abs(v[i]), std::abs(beta[i])});
  const double tol = 1e-12 * std::max(1.0, scale * scale);
  for (std::size_t i = 0; i < v.size(); ++i)
    for (std::size_t j = i + 1; j < v.size(); ++j)
      if (std::abs(v[i] * beta[j] - v[j] * beta[i]) > tol) return false;
  for (std::size_t i = 0; i < v.size(); ++i)
    if (beta[i] == 0.0 && std::abs(v[i]) > tol) return false;
  return true;
}

bool all_zero(const std::vector<double>& v) {
  for (double x : v)
    if (x != 0.0) return false;
  return true;
}

}  // namespace

std::string admissibility(const InequalityInstance& inst, const FKind& fk, Side side) {
  if (inst.arity() == 1) return {};
  const auto& slopes = side == Side::Upper ? inst.envelope.c : inst.envelope.a;

  if (inst.f.is_composite() && !parallel_to(slopes, inst.f.composite().beta)) {
    return "envelope slopes of composite f are not along its beta, so the envelope does not "
           "transfer to non-commuting arguments";
  }

  const auto* diff = std::get_if<Difference>(&fk);
  if (diff && diff->alpha == 0.0) return {};
  if (diff && inst.g.is_separable()) return {};
  if (inst.g.is_composite() && parallel_to(slopes, inst.g.composite().beta)) return {};
  if (all_zero(slopes) && reduces_to_single_operator(inst.g)) return {};
  if (inst.g.is_separable()) {
    const auto active = inst.g.active_axes();
    if (active.size() <= 1) {
      bool ok = true;
      for (std::size_t i = 0; i < slopes.size(); ++i)
        if (slopes[i] != 0.0 && (active.empty() || i != active[0])) ok = false;
      if (ok) return {};
    }
  }
  return "envelope slopes and g do not reduce to one commuting family of mixtures";
}

BoundReport general_bound(const InequalityInstance& inst, const FKind& fk, Side side) {
  const auto t = arg_mixtures(inst);
  const HermitianOperator tf = lhs_f_mixture(inst);
  const HermitianOperator gt = eval_operator(inst.g, t);
  const Envelope1 env = side_envelope(inst.envelope, side);
  const bool upper = side == Side::Upper;

  HermitianOperator lhs;
  OptResult opt;
  std::string tag;
  if (const auto* diff = std::get_if<Difference>(&fk)) {
    const double alpha = diff->alpha;
    lhs = tf - alpha * gt;
    opt = extremum(
        [&](std::span<const double> x) { return env(x) - alpha * eval_scalar(inst.g, x); },
        inst.box, upper);
    tag = "general/difference";
  } else {
    const auto gmin = box_minimize([&](std::span<const double> x) { return eval_scalar(inst.g, x); },
                                   inst.box);
    if (!(gmin.value > 0.0)) {
      throw PositivityError("congruence form needs g > 0 on the box");
    }
    const HermitianOperator s = psd_inv_sqrt(gt);
    lhs = congruence(s, tf);
    opt = extremum([&](std::span<const double> x) { return env(x) / eval_scalar(inst.g, x); },
                   inst.box, upper);
    tag = "general/congruence";
  }
  const Index dim = tf.dim();
  BoundReport r = finish(tag, side, std::move(lhs), opt.value * HermitianOperator::identity(dim), opt);
  r.admissible = admissibility(inst, fk, side).empty();
  return r;
}

BoundReport alpha_difference_bound(const InequalityInstance& inst, double alpha, Side side) {
  const auto t = arg_mixtures(inst);
  const HermitianOperator tf = lhs_f_mixture(inst);
  const HermitianOperator gt = eval_operator(inst.g, t);
  const Envelope1 env = side_envelope(inst.envelope, side);
  const OptResult opt = extremum(
      [&](std::span<const double> x) { return env(x) - alpha * eval_scalar(inst.g, x); },
      inst.box, side == Side::Upper);
  HermitianOperator rhs = (alpha * gt).shifted(opt.value);
  BoundReport r = finish("alpha-difference", side, tf, std::move(rhs), opt);
  r.admissible = admissibility(inst, Difference{alpha}, side).empty();
  return r;
}

BoundReport difference_bound(const InequalityInstance& inst, Side side) {
  BoundReport r = alpha_difference_bound(inst, 1.0, side);
  r.theorem = "difference";
  return r;
}

GSign detect_g_sign(const MultiFunc& g, const BoxDomain& box) {
  if (!g.defined_on(box)) throw DomainError("g is not defined on the box");
  const Objective obj = [&](std::span<const double> x) { return eval_scalar(g, x); };
  const double lo = box_minimize(obj, box).value;
  if (lo > 0.0) return GSign::Positive;
  const double hi = box_maximize(obj, box).value;
  if (hi < 0.0) return GSign::Negative;
  std::ostringstream os;
  os << "g is not one-signed on the box (range [" << lo << ", " << hi << "])";
  throw DomainError(os.str());
}

BoundReport ratio_bound(const InequalityInstance& inst, Side side, GSign sign) {
  if (detect_g_sign(inst.g, inst.box) != sign) {
    throw DomainError("ratio_bound: g does not have the requested sign on the box");
  }
  const auto t = arg_mixtures(inst);
  const HermitianOperator tf = lhs_f_mixture(inst);
  const HermitianOperator gt = eval_operator(inst.g, t);
  const Envelope1 env = side_envelope(inst.envelope, side);

  // g > 0: upper takes the max, lower the min. g < 0 swaps them.
  const bool maximize = (side == Side::Upper) == (sign == GSign::Positive);
  const OptResult opt = extremum(
      [&](std::span<const double> x) { return env(x) / eval_scalar(inst.g, x); }, inst.box,
      maximize);
  BoundReport r = finish(sign == GSign::Positive ? "ratio/positive-g" : "ratio/negative-g", side,
                         tf, opt.value * gt, opt);
  r.admissible = admissibility(inst, Congruence{}, side).empty();
  return r;
}

BoundReport ratio_bound(const InequalityInstance& inst, Side side) {
  return ratio_bound(inst, side, detect_g_sign(inst.g, inst.box));
}

MultiFunc special_g(SpecialKind kind, std::vector<double> beta, double q) {
  switch (kind) {
    case SpecialKind::Power:
      return CompositeAffine{std::move(beta), q == 1.0 ? ScalarFunc1D::identity()
                                                       : ScalarFunc1D::power(q)};
    case SpecialKind::Log:
      return CompositeAffine{std::move(beta), ScalarFunc1D::log()};
    case SpecialKind::Exp:
      return CompositeAffine{std::move(beta), ScalarFunc1D::exp()};
  }
  throw InputError("unknown special g kind");
}

const char* to_string(RatioBranch branch) {
  switch (branch) {
    case RatioBranch::PowerPositive: return "power";
    case RatioBranch::LogPositive: return "log-positive";
    case RatioBranch::LogNegative: return "log-negative";
    case RatioBranch::ExpPositive: return "exp";
  }
  return "?";
}

RatioBranch route_special_g(SpecialKind kind, const std::vector<double>& beta,
                            const BoxDomain& box) {
  if (beta.size() != box.arity()) throw DimensionError("route_special_g: beta arity mismatch");
  double s_lo = 0.0, s_hi = 0.0;
  for (std::size_t i = 0; i < beta.size(); ++i) {
    if (!(beta[i] >= 0.0)) throw InputError("special g requires beta_i >= 0");
    s_lo += beta[i] * box[i].lo;
    s_hi += beta[i] * box[i].hi;
  }
  switch (kind) {
    case SpecialKind::Exp:
      return RatioBranch::ExpPositive;
    case SpecialKind::Power:
      if (!(s_lo > 0.0)) {
        throw DomainError("power g needs sum beta_i m_i > 0 to be strictly positive");
      }
      return RatioBranch::PowerPositive;
    case SpecialKind::Log: {
      if (!(s_lo > 0.0)) throw DomainError("log g needs sum beta_i m_i > 0");
      const double lo = std::log(s_lo), hi = std::log(s_hi);
      if (lo > 0.0 && hi > 0.0) return RatioBranch::LogPositive;
      if (lo < 0.0 && hi < 0.0) return RatioBranch::LogNegative;
      throw DomainError("log g changes sign on the box");
    }
  }
  throw InputError("unknown special g kind");
}

}  // namespace opineq
