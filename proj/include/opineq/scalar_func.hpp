#pragma once

#include <concepts>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "opineq/linalg.hpp"

namespace opineq {

class ScalarFunc1D;

namespace func {

/// sum_k coeffs[k] x^k
struct Polynomial {
  std::vector<double> coeffs;
};
/// coef * x^exponent
struct Power {
  double coef = 1.0;
  double exponent = 1.0;
};
/// coef * log(x)
struct Log {
  double coef = 1.0;
};
/// coef * exp(x)
struct Exp {
  double coef = 1.0;
};
/// slope * x + intercept
struct Affine {
  double slope = 1.0;
  double intercept = 0.0;
};
/// coef / x
struct Reciprocal {
  double coef = 1.0;
};
/// coef * |inner(x) + offset|^exponent
struct AbsPower {
  std::shared_ptr<const ScalarFunc1D> inner;
  double exponent = 1.0;
  double offset = 0.0;
  double coef = 1.0;
};

}  // namespace func

/// Closed real interval [lo, hi].
struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

/// Elementary real function of one variable. Closed under differentiation
/// (except AbsPower) and under scaling by a constant.
class ScalarFunc1D {
 public:
  using Form = std::variant<func::Polynomial, func::Power, func::Log, func::Exp, func::Affine,
                            func::Reciprocal, func::AbsPower>;

  ScalarFunc1D() : form_(func::Polynomial{{0.0}}) {}
  ScalarFunc1D(Form form) : form_(std::move(form)) {}  // NOLINT(google-explicit-constructor)
  template <typename Alt>
    requires(!std::same_as<std::decay_t<Alt>, Form> && std::constructible_from<Form, Alt>)
  ScalarFunc1D(Alt alt) : form_(std::move(alt)) {}  // NOLINT(google-explicit-constructor)

  static ScalarFunc1D constant(double c) { return func::Polynomial{{c}}; }
  static ScalarFunc1D identity() { return func::Affine{1.0, 0.0}; }
  static ScalarFunc1D polynomial(std::vector<double> coeffs) {
    return func::Polynomial{std::move(coeffs)};
  }
  static ScalarFunc1D power(double exponent, double coef = 1.0) {
    return func::Power{coef, exponent};
  }
  static ScalarFunc1D log(double coef = 1.0) { return func::Log{coef}; }
  static ScalarFunc1D exp(double coef = 1.0) { return func::Exp{coef}; }
  static ScalarFunc1D affine(double slope, double intercept) {
    return func::Affine{slope, intercept};
  }
  static ScalarFunc1D reciprocal(double coef = 1.0) { return func::Reciprocal{coef}; }
  static ScalarFunc1D abs_power(ScalarFunc1D inner, double exponent, double offset = 0.0,
                                double coef = 1.0);

  const Form& form() const { return form_; }

  /// Evaluates at x; throws DomainError outside the domain.
  double operator()(double x) const;

  /// True when x lies in the natural domain.
  bool in_domain(double x) const;

  /// True when the whole closed interval lies in the domain (and the
  /// function is differentiable there).
  bool defined_on(Interval iv) const;

  /// Symbolic derivative. Throws InputError for AbsPower.
  ScalarFunc1D derivative() const;

  /// k * f
  ScalarFunc1D scaled(double k) const;

  /// True for identically-zero or constant functions.
  bool is_constant() const;

  /// True for affine functions (slope/intercept available exactly).
  bool is_affine() const;
  /// Exact slope for affine functions.
  double affine_slope() const;

  std::string describe() const;

 private:
  Form form_;
};

/// u(A) = U diag(u(lambda)) U*. Throws DomainError naming the first
/// eigenvalue outside u's domain.
HermitianOperator apply_scalar_func(const HermitianOperator& a, const ScalarFunc1D& u);
HermitianOperator apply_scalar_func(const SpectralDecomposition<double>& sd,
                                    const ScalarFunc1D& u);

}  // namespace opineq
