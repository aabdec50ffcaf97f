#pragma once

#include <vector>

#include "opineq/multifunc.hpp"

namespace opineq {

/// sum_i a_i x_i + b <= f(x) <= sum_i c_i x_i + d on a box.
struct AffineEnvelope {
  std::vector<double> a;
  double b = 0.0;
  std::vector<double> c;
  double d = 0.0;

  double lower(std::span<const double> x) const;
  double upper(std::span<const double> x) const;
};

/// Absolute slack allowed at a validation node.
inline constexpr double kEnvelopeTolerance = 1e-10;
/// Default validation resolution per axis.
inline constexpr int kEnvelopeGrid = 201;

struct EnvelopeCheck {
  long long nodes = 0;
  long long violations = 0;
  double worst_gap = 0.0;  ///< largest violation amount; 0 when none
  bool ok() const { return violations == 0; }
};

/// Chord slopes per axis (or along sum beta_i x_i for composite f) with
/// offsets from 1-D extrema of the residual. The result is validated on a
/// grid_res^n grid; a failed validation raises ConvergenceError.
/// Throws DomainError when f is not defined on the whole box. When `check`
/// is given it receives the validation result.
AffineEnvelope fit_envelope(const MultiFunc& f, const BoxDomain& box,
                            int grid_res = kEnvelopeGrid, EnvelopeCheck* check = nullptr);

/// Exhaustive scan of a grid_res^n grid. Never throws on a bad envelope.
EnvelopeCheck validate_envelope(const MultiFunc& f, const AffineEnvelope& env,
                                const BoxDomain& box, int grid_res = kEnvelopeGrid);

}  // namespace opineq
