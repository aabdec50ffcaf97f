#include "opineq/multifunc.hpp"

#include <cmath>
#include <sstream>

namespace opineq {

BoxDomain::BoxDomain(std::vector<Interval> axes) : axes_(std::move(axes)) {
  if (axes_.empty()) throw InputError("box must have at least one axis");
  for (std::size_t i = 0; i < axes_.size(); ++i) {
    const auto& iv = axes_[i];
    if (!std::isfinite(iv.lo) || !std::isfinite(iv.hi) || !(iv.lo < iv.hi)) {
      std::ostringstream os;
      os << "box axis " << i << " is not a proper interval [" << iv.lo << ", " << iv.hi << "]";
      throw InputError(os.str());
    }
  }
}

double BoxDomain::max_width() const {
  double w = 0.0;
  for (const auto& iv : axes_) w = std::max(w, iv.hi - iv.lo);
  return w;
}

bool BoxDomain::contains(std::span<const double> x) const {
  if (x.size() != axes_.size()) return false;
  for (std::size_t i = 0; i < x.size(); ++i)
    if (x[i] < axes_[i].lo || x[i] > axes_[i].hi) return false;
  return true;
}

MultiFunc::MultiFunc(Separable s) : form_(std::move(s)) {
  if (separable().terms.empty()) throw InputError("separable function needs at least one term");
}

MultiFunc::MultiFunc(CompositeAffine c) : form_(std::move(c)) {
  const auto& beta = composite().beta;
  if (beta.empty()) throw InputError("composite function needs at least one beta coefficient");
  for (double b : beta) {
    if (!(b >= 0.0) || !std::isfinite(b)) {
      throw InputError("composite function requires finite beta_i >= 0");
    }
  }
}

MultiFunc MultiFunc::constant(std::size_t arity, double c) {
  Separable s{std::vector<ScalarFunc1D>(arity, ScalarFunc1D::constant(0.0))};
  s.terms[0] = ScalarFunc1D::constant(c);
  return s;
}

MultiFunc MultiFunc::sum(std::size_t arity) {
  return Separable{std::vector<ScalarFunc1D>(arity, ScalarFunc1D::identity())};
}

std::size_t MultiFunc::arity() const {
  return is_separable() ? separable().terms.size() : composite().beta.size();
}

std::vector<std::size_t> MultiFunc::active_axes() const {
  std::vector<std::size_t> out;
  if (is_separable()) {
    const auto& t = separable().terms;
    for (std::size_t i = 0; i < t.size(); ++i)
      if (!t[i].is_constant()) out.push_back(i);
  } else {
    const auto& c = composite();
    if (c.outer.is_constant()) return out;
    for (std::size_t i = 0; i < c.beta.size(); ++i)
      if (c.beta[i] != 0.0) out.push_back(i);
  }
  return out;
}

namespace {

Interval affine_range(const std::vector<double>& beta, const BoxDomain& box) {
  Interval s{0.0, 0.0};
  for (std::size_t i = 0; i < beta.size(); ++i) {
    s.lo += beta[i] * box[i].lo;
    s.hi += beta[i] * box[i].hi;
  }
  return s;
}

void check_arity(const MultiFunc& f, std::size_t n, const char* what) {
  if (f.arity() != n) {
    std::ostringstream os;
    os << what << ": function of arity " << f.arity() << " given " << n << " arguments";
    throw DimensionError(os.str());
  }
}

}  // namespace

bool MultiFunc::defined_on(const BoxDomain& box) const {
  if (box.arity() != arity()) return false;
  if (is_separable()) {
    const auto& t = separable().terms;
    for (std::size_t i = 0; i < t.size(); ++i)
      if (!t[i].defined_on(box[i])) return false;
    return true;
  }
  return composite().outer.defined_on(affine_range(composite().beta, box));
}

std::string MultiFunc::describe() const {
  std::ostringstream os;
  if (is_separable()) {
    os << "separable[";
    const auto& t = separable().terms;
    for (std::size_t i = 0; i < t.size(); ++i) os << (i ? "; " : "") << t[i].describe();
    os << "]";
  } else {
    os << "composite[beta=(";
    const auto& c = composite();
    for (std::size_t i = 0; i < c.beta.size(); ++i) os << (i ? "," : "") << c.beta[i];
    os << "), outer=" << c.outer.describe() << "]";
  }
  return os.str();
}

double eval_scalar(const MultiFunc& f, std::span<const double> x) {
  check_arity(f, x.size(), "eval_scalar");
  if (f.is_separable()) {
    const auto& t = f.separable().terms;
    double acc = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) acc += t[i](x[i]);
    return acc;
  }
  const auto& c = f.composite();
  double s = 0.0;
  for (std::size_t i = 0; i < c.beta.size(); ++i) s += c.beta[i] * x[i];
  return c.outer(s);
}

HermitianOperator eval_operator(const MultiFunc& f, std::span<const HermitianOperator> ops) {
  check_arity(f, ops.size(), "eval_operator");
  const Index dim = ops[0].dim();
  for (const auto& a : ops)
    if (a.dim() != dim) throw DimensionError("eval_operator: arguments differ in dimension");

  if (f.is_separable()) {
    const auto& t = f.separable().terms;
    HermitianOperator acc = HermitianOperator::zero(dim);
    for (std::size_t i = 0; i < t.size(); ++i) {
      if (t[i].is_constant()) {
        acc = acc.shifted(t[i](1.0));
      } else {
        acc += apply_scalar_func(ops[i], t[i]);
      }
    }
    return acc;
  }
  const auto& c = f.composite();
  HermitianOperator s = HermitianOperator::zero(dim);
  for (std::size_t i = 0; i < c.beta.size(); ++i)
    if (c.beta[i] != 0.0) s += c.beta[i] * ops[i];
  return apply_scalar_func(s, c.outer);
}

MultiFunc partial(const MultiFunc& f, std::size_t axis) {
  if (axis >= f.arity()) throw DimensionError("partial: axis out of range");
  if (f.is_separable()) {
    const auto& t = f.separable().terms;
    Separable d{std::vector<ScalarFunc1D>(t.size(), ScalarFunc1D::constant(0.0))};
    d.terms[axis] = t[axis].derivative();
    return d;
  }
  const auto& c = f.composite();
  if (c.beta[axis] == 0.0) return MultiFunc::constant(f.arity(), 0.0);
  return CompositeAffine{c.beta, c.outer.derivative().scaled(c.beta[axis])};
}

std::vector<MultiFunc> gradient(const MultiFunc& f) {
  std::vector<MultiFunc> g;
  g.reserve(f.arity());
  for (std::size_t i = 0; i < f.arity(); ++i) g.push_back(partial(f, i));
  return g;
}

double grad_magnitude_scalar(std::span<const MultiFunc> grad, std::span<const double> x) {
  double acc = 0.0;
  for (const auto& d : grad) {
    const double v = eval_scalar(d, x);
    acc += v * v;
  }
  return std::sqrt(acc);
}

double grad_magnitude_scalar(const MultiFunc& f, std::span<const double> x) {
  const auto g = gradient(f);
  return grad_magnitude_scalar(std::span<const MultiFunc>(g), x);
}

HermitianOperator grad_magnitude_operator(const MultiFunc& f,
                                          std::span<const HermitianOperator> ops) {
  check_arity(f, ops.size(), "grad_magnitude_operator");
  HermitianOperator acc = HermitianOperator::zero(ops[0].dim());
  for (std::size_t i = 0; i < f.arity(); ++i) acc += square(eval_operator(partial(f, i), ops));
  return psd_power(acc, 0.5);
}

HermitianOperator abs_power_of_f(const MultiFunc& f, std::span<const HermitianOperator> ops,
                                 double p) {
  if (p == 0.0) {
    check_arity(f, ops.size(), "abs_power_of_f");
    return HermitianOperator::identity(ops[0].dim());
  }
  return operator_abs_power(eval_operator(f, ops), p);
}

bool reduces_to_single_operator(const MultiFunc& f) {
  return f.is_composite() || f.active_axes().size() <= 1;
}

namespace {

/// For separable f with at most one active axis: the axis (or 0) and the sum
/// of the constant terms.
std::pair<std::size_t, double> single_axis_split(const MultiFunc& f) {
  const auto active = f.active_axes();
  if (active.size() > 1) {
    throw InputError("function of several independent operators: " + f.describe());
  }
  const auto& t = f.separable().terms;
  const std::size_t axis = active.empty() ? 0 : active[0];
  double offset = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i)
    if (i != axis || active.empty()) offset += t[i](1.0);
  return {axis, offset};
}

}  // namespace

MultiFunc abs_power_func(const MultiFunc& f, double p) {
  if (f.is_composite()) {
    const auto& c = f.composite();
    return CompositeAffine{c.beta, ScalarFunc1D::abs_power(c.outer, p)};
  }
  const auto [axis, offset] = single_axis_split(f);
  Separable out{std::vector<ScalarFunc1D>(f.arity(), ScalarFunc1D::constant(0.0))};
  if (f.active_axes().empty()) {
    out.terms[0] = ScalarFunc1D::constant(std::pow(std::abs(offset), p));
  } else {
    out.terms[axis] = ScalarFunc1D::abs_power(f.separable().terms[axis], p, offset);
  }
  return out;
}

MultiFunc grad_magnitude_power_func(const MultiFunc& f, double q) {
  if (f.is_composite()) {
    const auto& c = f.composite();
    double norm2 = 0.0;
    for (double b : c.beta) norm2 += b * b;
    if (norm2 == 0.0 || c.outer.is_constant()) return MultiFunc::constant(f.arity(), 0.0);
    return CompositeAffine{c.beta,
                           ScalarFunc1D::abs_power(c.outer.derivative().scaled(std::sqrt(norm2)), q)};
  }
  const auto active = f.active_axes();
  if (active.size() > 1) {
    throw InputError("function of several independent operators: " + f.describe());
  }
  if (active.empty()) return MultiFunc::constant(f.arity(), 0.0);
  Separable out{std::vector<ScalarFunc1D>(f.arity(), ScalarFunc1D::constant(0.0))};
  out.terms[active[0]] = ScalarFunc1D::abs_power(f.separable().terms[active[0]].derivative(), q);
  return out;
}

}  // namespace opineq
