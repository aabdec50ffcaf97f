#pragma once

#include <span>
#include <string>
#include <variant>
#include <vector>

#include "opineq/linalg.hpp"
#include "opineq/scalar_func.hpp"

namespace opineq {

/// Cartesian product of closed intervals [m_i, M_i], m_i < M_i.
class BoxDomain {
 public:
  BoxDomain() = default;
  explicit BoxDomain(std::vector<Interval> axes);

  std::size_t arity() const { return axes_.size(); }
  const Interval& operator[](std::size_t i) const { return axes_[i]; }
  const std::vector<Interval>& axes() const { return axes_; }
  double max_width() const;
  bool contains(std::span<const double> x) const;

 private:
  std::vector<Interval> axes_;
};

/// f(x) = sum_i terms[i](x_i)
struct Separable {
  std::vector<ScalarFunc1D> terms;
};

/// f(x) = outer(sum_i beta[i] x_i), beta_i >= 0
struct CompositeAffine {
  std::vector<double> beta;
  ScalarFunc1D outer;
};

/// Multivariate scalar function restricted to the two forms whose operator
/// evaluation is well defined on non-commuting Hermitian arguments.
class MultiFunc {
 public:
  using Form = std::variant<Separable, CompositeAffine>;

  MultiFunc() = default;
  MultiFunc(Separable s);        // NOLINT(google-explicit-constructor)
  MultiFunc(CompositeAffine c);  // NOLINT(google-explicit-constructor)

  static MultiFunc constant(std::size_t arity, double c);
  /// sum_i x_i
  static MultiFunc sum(std::size_t arity);

  std::size_t arity() const;
  const Form& form() const { return form_; }
  bool is_separable() const { return std::holds_alternative<Separable>(form_); }
  bool is_composite() const { return std::holds_alternative<CompositeAffine>(form_); }
  const Separable& separable() const { return std::get<Separable>(form_); }
  const CompositeAffine& composite() const { return std::get<CompositeAffine>(form_); }

  /// Axes on which the function actually depends.
  std::vector<std::size_t> active_axes() const;

  /// Whether f and its partials are defined everywhere on the box.
  bool defined_on(const BoxDomain& box) const;

  std::string describe() const;

 private:
  Form form_ = Separable{};
};

/// Exact evaluation of the declared form at a point.
double eval_scalar(const MultiFunc& f, std::span<const double> x);

/// f(A_1, ..., A_n): sum_i u_i(A_i) for separable f, outer(sum_i beta_i A_i)
/// for composite f.
HermitianOperator eval_operator(const MultiFunc& f, std::span<const HermitianOperator> ops);

/// Symbolic partial derivative with respect to x_axis.
MultiFunc partial(const MultiFunc& f, std::size_t axis);

/// All partials, in axis order.
std::vector<MultiFunc> gradient(const MultiFunc& f);

/// sqrt(sum_i (df/dx_i)^2) at a point.
double grad_magnitude_scalar(const MultiFunc& f, std::span<const double> x);
double grad_magnitude_scalar(std::span<const MultiFunc> grad, std::span<const double> x);

/// sqrt(sum_i [f^(i)(A...)]^2).
HermitianOperator grad_magnitude_operator(const MultiFunc& f,
                                          std::span<const HermitianOperator> ops);

/// |f(A...)|^p; p == 0 gives the identity.
HermitianOperator abs_power_of_f(const MultiFunc& f, std::span<const HermitianOperator> ops,
                                 double p);

/// The scalar function x -> |f(x)|^p expressed in one of the two supported
/// forms. Available for composite f and for separable f with at most one
/// non-constant term; throws InputError otherwise.
MultiFunc abs_power_func(const MultiFunc& f, double p);

/// x -> |f'(x)|^q in a supported form (same availability as abs_power_func).
MultiFunc grad_magnitude_power_func(const MultiFunc& f, double q);

/// True when f(A...) is a function of a single Hermitian operator built
/// from the arguments (composite form, or at most one active axis). For
/// such f every scalar inequality transfers to operator arguments.
bool reduces_to_single_operator(const MultiFunc& f);

}  // namespace opineq
