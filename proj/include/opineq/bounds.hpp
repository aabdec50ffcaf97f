#pragma once

#include <string>
#include <variant>
#include <vector>

#include "opineq/envelope.hpp"
#include "opineq/maps.hpp"
#include "opineq/multifunc.hpp"

namespace opineq {

/// Operators A_{i,j} (axis i, index j), their box, the weights, the map grid,
/// the functions f and g, and an envelope of f on the box.
struct InequalityInstance {
  std::vector<std::vector<HermitianOperator>> axes;
  BoxDomain box;
  WeightFamily weights;
  MapGrid grid;
  MultiFunc f;
  MultiFunc g;
  AffineEnvelope envelope;

  std::size_t arity() const { return axes.size(); }
  std::vector<std::size_t> shape() const;
};

/// Spectra of axis operators may exceed the box by this much.
inline constexpr double kSpectrumTolerance = 1e-10;

/// Throws on any violated instance invariant: shapes, dimensions, spectra in
/// the box, f and g defined on the box. When `envelope_grid` > 0 the
/// envelope is also validated on that grid.
void check_instance(const InequalityInstance& inst, int envelope_grid = kEnvelopeGrid);

/// F(u, v) = u - alpha v.
struct Difference {
  double alpha = 0.0;
};
/// F(u, v) = v^{-1/2} u v^{-1/2}.
struct Congruence {};
using FKind = std::variant<Difference, Congruence>;

enum class Side { Upper, Lower };
const char* to_string(Side side);

struct BoundReport {
  std::string theorem;
  Side side = Side::Upper;
  HermitianOperator lhs;
  HermitianOperator rhs;
  double scalar_constant = 0.0;
  LoewnerVerdict verdict;
  std::vector<double> argpoint;
  /// Whether the operator steps of the argument are valid for this (f, g,
  /// envelope, F). An inadmissible report is still computed honestly.
  bool admissible = true;
};

/// Loewner tolerance used for every bound verdict: 1e-8 (1 + max(||lhs||, ||rhs||)).
double bound_tolerance(const HermitianOperator& lhs, const HermitianOperator& rhs);

/// T_f = sum_J w_J Phi_J(f(A_{1,j_1}, ..., A_{n,j_n})).
HermitianOperator lhs_f_mixture(const InequalityInstance& inst);

/// T_i = sum_J w_J Phi_J(A_{i,j_i}) for every axis.
std::vector<HermitianOperator> arg_mixtures(const InequalityInstance& inst);

/// Spectrum-containment check of every T_i against the box (tolerance 1e-8).
bool mixtures_in_box(const InequalityInstance& inst, const std::vector<HermitianOperator>& t,
                     double tol = 1e-8);

/// F(T_f, g(T...)) compared against the box extremum of F(envelope, g) times I.
BoundReport general_bound(const InequalityInstance& inst, const FKind& fk, Side side);

/// T_f against alpha g(T...) + mu I, mu the extremum of envelope - alpha g.
BoundReport alpha_difference_bound(const InequalityInstance& inst, double alpha, Side side);

enum class GSign { Positive, Negative };

/// Sign of g over the whole box; DomainError if g vanishes or changes sign.
GSign detect_g_sign(const MultiFunc& g, const BoxDomain& box);

/// T_f against lambda g(T...), lambda the extremum of envelope / g.
BoundReport ratio_bound(const InequalityInstance& inst, Side side, GSign sign);
/// As above with the sign detected from the box.
BoundReport ratio_bound(const InequalityInstance& inst, Side side);

/// alpha_difference_bound with alpha = 1.
BoundReport difference_bound(const InequalityInstance& inst, Side side);

enum class SpecialKind { Power, Log, Exp };

/// g(x) = (sum beta_i x_i)^q, log(sum beta_i x_i) or exp(sum beta_i x_i).
MultiFunc special_g(SpecialKind kind, std::vector<double> beta, double q = 1.0);

/// Which part of the ratio corollary a special g falls under on a box.
enum class RatioBranch { PowerPositive, LogPositive, LogNegative, ExpPositive };
const char* to_string(RatioBranch branch);

/// Log is monotone in sum beta_i x_i, so its sign is decided at the two box
/// extremes. Throws DomainError when log changes sign or the power base is
/// not strictly positive.
RatioBranch route_special_g(SpecialKind kind, const std::vector<double>& beta,
                            const BoxDomain& box);

/// Whether the argument chain of the bounds is valid for these inputs with
/// non-commuting operators. f must transfer its envelope to operators
/// (separable f, or composite f with slopes along its beta), and the second
/// step needs the envelope slopes and g to be simultaneously diagonal
/// (n == 1, separable g with Difference, or composite g with slopes along
/// its beta). Returns an empty string when admissible, else the reason.
std::string admissibility(const InequalityInstance& inst, const FKind& fk, Side side);

}  // namespace opineq
