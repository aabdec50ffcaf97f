#include "opineq/scalar_func.hpp"

#include <cmath>
#include <sstream>

namespace opineq {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

bool is_natural(double q) { return q >= 0.0 && std::floor(q) == q; }

double horner(const std::vector<double>& c, double x) {
  double acc = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * x + *it;
  return acc;
}

double raw_eval(const ScalarFunc1D::Form& form, double x) {
  return std::visit(
      overloaded{
          [x](const func::Polynomial& p) { return horner(p.coeffs, x); },
          [x](const func::Power& p) {
            if (p.exponent == 0.0) return p.coef;
            if (p.exponent == 1.0) return p.coef * x;
            if (p.exponent == 2.0) return p.coef * x * x;
            return p.coef * std::pow(x, p.exponent);
          },
          [x](const func::Log& p) { return p.coef * std::log(x); },
          [x](const func::Exp& p) { return p.coef * std::exp(x); },
          [x](const func::Affine& p) { return p.slope * x + p.intercept; },
          [x](const func::Reciprocal& p) { return p.coef / x; },
          [x](const func::AbsPower& p) {
            const double base = std::abs((*p.inner)(x) + p.offset);
            if (p.exponent == 0.0) return p.coef;
            if (p.exponent == 2.0) return p.coef * base * base;
            return p.coef * std::pow(base, p.exponent);
          },
      },
      form);
}

}  // namespace

ScalarFunc1D ScalarFunc1D::abs_power(ScalarFunc1D inner, double exponent, double offset,
                                     double coef) {
  return func::AbsPower{std::make_shared<const ScalarFunc1D>(std::move(inner)), exponent, offset,
                        coef};
}

bool ScalarFunc1D::in_domain(double x) const {
  if (!std::isfinite(x)) return false;
  return std::visit(overloaded{
                        [](const func::Polynomial&) { return true; },
                        [x](const func::Power& p) { return is_natural(p.exponent) || x > 0.0; },
                        [x](const func::Log&) { return x > 0.0; },
                        [](const func::Exp&) { return true; },
                        [](const func::Affine&) { return true; },
                        [x](const func::Reciprocal&) { return x != 0.0; },
                        [x](const func::AbsPower& p) {
                          if (!p.inner->in_domain(x)) return false;
                          return p.exponent >= 0.0 || (*p.inner)(x) + p.offset != 0.0;
                        },
                    },
                    form_);
}

bool ScalarFunc1D::defined_on(Interval iv) const {
  if (!(iv.lo <= iv.hi)) return false;
  return std::visit(
      overloaded{
          [](const func::Polynomial&) { return true; },
          [iv](const func::Power& p) { return is_natural(p.exponent) || iv.lo > 0.0; },
          [iv](const func::Log&) { return iv.lo > 0.0; },
          [](const func::Exp&) { return true; },
          [](const func::Affine&) { return true; },
          [iv](const func::Reciprocal&) { return iv.lo > 0.0 || iv.hi < 0.0; },
          [iv](const func::AbsPower& p) { return p.inner->defined_on(iv); },
      },
      form_);
}

double ScalarFunc1D::operator()(double x) const {
  if (!in_domain(x)) {
    std::ostringstream os;
    os << describe() << " is undefined at x = " << x;
    throw DomainError(os.str());
  }
  return raw_eval(form_, x);
}

ScalarFunc1D ScalarFunc1D::derivative() const {
  return std::visit(
      overloaded{
          [](const func::Polynomial& p) -> ScalarFunc1D {
            if (p.coeffs.size() <= 1) return constant(0.0);
            std::vector<double> d(p.coeffs.size() - 1);
            for (std::size_t k = 1; k < p.coeffs.size(); ++k) d[k - 1] = double(k) * p.coeffs[k];
            return polynomial(std::move(d));
          },
          [](const func::Power& p) -> ScalarFunc1D {
            if (p.exponent == 0.0) return constant(0.0);
            if (p.exponent == 1.0) return constant(p.coef);
            return power(p.exponent - 1.0, p.coef * p.exponent);
          },
          [](const func::Log& p) -> ScalarFunc1D { return reciprocal(p.coef); },
          [](const func::Exp& p) -> ScalarFunc1D { return exp(p.coef); },
          [](const func::Affine& p) -> ScalarFunc1D { return constant(p.slope); },
          [](const func::Reciprocal& p) -> ScalarFunc1D { return power(-2.0, -p.coef); },
          [](const func::AbsPower&) -> ScalarFunc1D {
            throw InputError("derivative of an abs-power function is not supported");
          },
      },
      form_);
}

ScalarFunc1D ScalarFunc1D::scaled(double k) const {
  return std::visit(overloaded{
                        [k](func::Polynomial p) -> ScalarFunc1D {
                          for (double& c : p.coeffs) c *= k;
                          return p;
                        },
                        [k](func::Power p) -> ScalarFunc1D {
                          p.coef *= k;
                          return p;
                        },
                        [k](func::Log p) -> ScalarFunc1D {
                          p.coef *= k;
                          return p;
                        },
                        [k](func::Exp p) -> ScalarFunc1D {
                          p.coef *= k;
                          return p;
                        },
                        [k](func::Affine p) -> ScalarFunc1D {
                          p.slope *= k;
                          p.intercept *= k;
                          return p;
                        },
                        [k](func::Reciprocal p) -> ScalarFunc1D {
                          p.coef *= k;
                          return p;
                        },
                        [k](func::AbsPower p) -> ScalarFunc1D {
                          p.coef *= k;
                          return p;
                        },
                    },
                    form_);
}

bool ScalarFunc1D::is_constant() const {
  return std::visit(overloaded{
                        [](const func::Polynomial& p) {
                          for (std::size_t k = 1; k < p.coeffs.size(); ++k)
                            if (p.coeffs[k] != 0.0) return false;
                          return true;
                        },
                        [](const func::Power& p) { return p.coef == 0.0 || p.exponent == 0.0; },
                        [](const func::Log& p) { return p.coef == 0.0; },
                        [](const func::Exp& p) { return p.coef == 0.0; },
                        [](const func::Affine& p) { return p.slope == 0.0; },
                        [](const func::Reciprocal& p) { return p.coef == 0.0; },
                        [](const func::AbsPower& p) {
                          return p.coef == 0.0 || p.exponent == 0.0 || p.inner->is_constant();
                        },
                    },
                    form_);
}

bool ScalarFunc1D::is_affine() const {
  if (is_constant()) return !std::holds_alternative<func::Log>(form_) &&
                            !std::holds_alternative<func::Reciprocal>(form_);
  return std::visit(overloaded{
                        [](const func::Polynomial& p) {
                          for (std::size_t k = 2; k < p.coeffs.size(); ++k)
                            if (p.coeffs[k] != 0.0) return false;
                          return true;
                        },
                        [](const func::Power& p) { return p.exponent == 1.0; },
                        [](const func::Affine&) { return true; },
                        [](const auto&) { return false; },
                    },
                    form_);
}

double ScalarFunc1D::affine_slope() const {
  if (!is_affine()) throw InputError("affine_slope: " + describe() + " is not affine");
  if (is_constant()) return 0.0;
  return std::visit(overloaded{
                        [](const func::Polynomial& p) { return p.coeffs.size() > 1 ? p.coeffs[1] : 0.0; },
                        [](const func::Power& p) { return p.coef; },
                        [](const func::Affine& p) { return p.slope; },
                        [](const auto&) { return 0.0; },
                    },
                    form_);
}

std::string ScalarFunc1D::describe() const {
  std::ostringstream os;
  std::visit(overloaded{
                 [&os](const func::Polynomial& p) {
                   os << "poly(";
                   for (std::size_t k = 0; k < p.coeffs.size(); ++k) os << (k ? "," : "") << p.coeffs[k];
                   os << ")";
                 },
                 [&os](const func::Power& p) { os << p.coef << "*x^" << p.exponent; },
                 [&os](const func::Log& p) { os << p.coef << "*log(x)"; },
                 [&os](const func::Exp& p) { os << p.coef << "*exp(x)"; },
                 [&os](const func::Affine& p) { os << p.slope << "*x+" << p.intercept; },
                 [&os](const func::Reciprocal& p) { os << p.coef << "/x"; },
                 [&os](const func::AbsPower& p) {
                   os << p.coef << "*|" << p.inner->describe() << "+" << p.offset << "|^" << p.exponent;
                 },
             },
             form_);
  return os.str();
}

HermitianOperator apply_scalar_func(const SpectralDecomposition<double>& sd,
                                    const ScalarFunc1D& u) {
  for (Index k = 0; k < sd.eigenvalues.size(); ++k) {
    if (!u.in_domain(sd.eigenvalues(k))) {
      std::ostringstream os;
      os << "eigenvalue " << sd.eigenvalues(k) << " lies outside the domain of " << u.describe();
      throw DomainError(os.str());
    }
  }
  return apply_spectral(sd, [&u](double x) { return u(x); });
}

HermitianOperator apply_scalar_func(const HermitianOperator& a, const ScalarFunc1D& u) {
  return apply_scalar_func(eig_hermitian(a), u);
}

}  // namespace opineq
