#include "opineq/sobolev.hpp"

#include <cmath>
#include <sstream>

#include "opineq/scalaropt.hpp"

namespace opineq {

SobolevExponents sobolev_conjugate(int m, double p) {
  if (m <= 1) throw InputError("Sobolev exponents need an integer m > 1");
  if (!(p > 1.0 && p < double(m))) {
    std::ostringstream os;
    os << "Sobolev exponents need 1 < p < m (got p = " << p << ", m = " << m << ")";
    throw InputError(os.str());
  }
  return {m, p, double(m) * p / (double(m) - p)};
}

namespace {

double grad_norm(const std::vector<MultiFunc>& grad, std::span<const double> x) {
  return grad_magnitude_scalar(std::span<const MultiFunc>(grad), x);
}

template <typename Fn>
long long count_grid(const BoxDomain& box, int res, Fn&& bad) {
  const std::size_t n = box.arity();
  const auto r = static_cast<std::size_t>(res);
  std::vector<std::size_t> idx(n, 0);
  std::vector<double> x(n);
  long long count = 0;
  for (;;) {
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = idx[i] + 1 == r ? box[i].hi
                             : box[i].lo + (box[i].hi - box[i].lo) * double(idx[i]) / double(r - 1);
    }
    if (bad(std::span<const double>(x))) ++count;
    std::size_t axis = n;
    while (axis > 0 && ++idx[axis - 1] == r) idx[--axis] = 0;
    if (axis == 0) break;
  }
  return count;
}

bool identically_zero(const MultiFunc& f) {
  if (!f.active_axes().empty()) return false;
  if (f.is_composite()) {
    const auto& outer = f.composite().outer;
    const double s = outer.is_constant() ? 1.0 : 0.0;
    return outer.in_domain(s) && outer(s) == 0.0;
  }
  const std::vector<double> x(f.arity(), 1.0);
  return eval_scalar(f, x) == 0.0;
}

/// Per multi-index |f(A_J)|^p and |f'(A_J)|^q, aggregated.
struct Aggregates {
  HermitianOperator x;  ///< sum w Phi(|f|^p)
  HermitianOperator y;  ///< sum w Phi(|f'|^q)
};

Aggregates aggregates(const InequalityInstance& inst, const SobolevExponents& e, bool need_y) {
  const MultiIndexRange range(inst.shape());
  std::vector<HermitianOperator> fp(range.size()), gq;
  if (need_y) gq.resize(range.size());
  std::vector<HermitianOperator> args(inst.arity());
  range.for_each([&](std::size_t flat, const std::vector<std::size_t>& j) {
    for (std::size_t i = 0; i < j.size(); ++i) args[i] = inst.axes[i][j[i]];
    fp[flat] = abs_power_of_f(inst.f, args, e.p);
    if (need_y) gq[flat] = psd_power(grad_magnitude_operator(inst.f, args), e.q);
  });
  Aggregates out;
  out.x = aggregate(inst.grid, inst.weights, fp);
  if (need_y) out.y = aggregate(inst.grid, inst.weights, gq);
  return out;
}

BoundReport make_report(std::string tag, HermitianOperator lhs, HermitianOperator rhs,
                        double constant) {
  BoundReport r;
  r.theorem = std::move(tag);
  r.side = Side::Upper;
  r.verdict = loewner_leq(lhs, rhs, bound_tolerance(lhs, rhs));
  r.lhs = std::move(lhs);
  r.rhs = std::move(rhs);
  r.scalar_constant = constant;
  return r;
}

SobolevReport trivial_report(const InequalityInstance& inst, std::string tag) {
  const Index dim = inst.grid.dim_out();
  SobolevReport out;
  out.trivial = true;
  out.bound = make_report(std::move(tag), HermitianOperator::zero(dim), HermitianOperator::zero(dim), 0.0);
  return out;
}

}  // namespace

double constant_C2(const MultiFunc& h, const BoxDomain& box, const SobolevExponents& e) {
  const Objective hv = [&](std::span<const double> x) { return eval_scalar(h, x); };
  const double hmin = box_minimize(hv, box).value;
  if (!(hmin > 0.0)) throw DomainError("constant_C2 needs h > 0 on the box");
  const double expo = (e.p - e.q) / e.q;
  return box_minimize([&](std::span<const double> x) { return std::pow(eval_scalar(h, x), expo); },
                      box)
      .value;
}

double constant_C2_spectral(double lo, double hi, const SobolevExponents& e) {
  const double expo = (e.p - e.q) / e.q;
  const double a = std::max(1e-9, lo), b = std::max(1e-9, hi);
  return std::min(std::pow(a, expo), std::pow(b, expo));
}

double constant_C3(const MultiFunc& f, const BoxDomain& box, const SobolevExponents& e) {
  const auto grad = gradient(f);
  const double gmin =
      box_minimize([&](std::span<const double> x) { return grad_norm(grad, x); }, box).value;
  if (!(gmin > 1e-9)) {
    std::ostringstream os;
    os << "constant_C3 needs |f'| bounded away from zero on the box (min " << gmin << ")";
    throw DomainError(os.str());
  }
  const double fmax =
      box_maximize([&](std::span<const double> x) { return std::pow(std::abs(eval_scalar(f, x)), e.p); },
                   box)
          .value;
  return fmax / std::pow(gmin, e.q);
}

long long lemma_C2_violations(const MultiFunc& h, const BoxDomain& box, const SobolevExponents& e,
                              double C2, int res) {
  return count_grid(box, res, [&](std::span<const double> x) {
    const double hx = eval_scalar(h, x);
    const double rhs = std::pow(hx, e.p / e.q);
    return C2 * hx > rhs * (1.0 + 1e-12);
  });
}

long long lemma_C3_violations(const MultiFunc& f, const BoxDomain& box, const SobolevExponents& e,
                              double C3, int res) {
  const auto grad = gradient(f);
  return count_grid(box, res, [&](std::span<const double> x) {
    const double lhs = std::pow(std::abs(eval_scalar(f, x)), e.p);
    const double rhs = C3 * std::pow(grad_norm(grad, x), e.q);
    return lhs > rhs * (1.0 + 1e-12);
  });
}

bool sobolev_admissible(const MultiFunc& f) { return reduces_to_single_operator(f); }

SobolevReport verify_sobolev_original(const InequalityInstance& inst, const SobolevExponents& e) {
  if (identically_zero(inst.f)) return trivial_report(inst, "sobolev");

  const Aggregates agg = aggregates(inst, e, true);
  const HermitianOperator lhs = psd_power(agg.x, 1.0 / e.p);
  const auto sd = eig_hermitian(lhs);

  SobolevReport out;
  auto& k = out.constants;
  k.C3 = constant_C3(inst.f, inst.box, e);
  k.C3_prime = std::pow(k.C3, 1.0 / e.q);
  k.C2 = constant_C2_spectral(sd.min(), sd.max(), e);
  k.C1 = k.C3_prime / k.C2;
  out.bound = make_report("sobolev", lhs, k.C1 * psd_power(agg.y, 1.0 / e.q), k.C1);
  out.bound.admissible = sobolev_admissible(inst.f);
  return out;
}

SobolevReport verify_sobolev_mean(const InequalityInstance& inst, const SobolevExponents& e) {
  if (identically_zero(inst.f)) return trivial_report(inst, "sobolev-mean");

  const auto grad = gradient(inst.f);
  const double gmin =
      box_minimize([&](std::span<const double> x) { return grad_norm(grad, x); }, inst.box).value;
  if (!(gmin > 1e-9)) throw DomainError("|f'|^q must be positive on the box");

  const MultiFunc fp = abs_power_func(inst.f, e.p);
  const AffineEnvelope env = fit_envelope(fp, inst.box);

  const auto t = arg_mixtures(inst);
  const HermitianOperator g = psd_power(grad_magnitude_operator(inst.f, t), e.q);
  const auto gsd = eig_hermitian(g);
  if (gsd.min() <= singular_threshold(gsd)) {
    throw DomainError("|f'(T...)|^q has a zero eigenvalue");
  }

  const Aggregates agg = aggregates(inst, e, false);
  const HermitianOperator lhs = psd_power(agg.x, 1.0 / e.p);

  SobolevReport out;
  auto& k = out.constants;
  const OptResult kopt = box_maximize(
      [&](std::span<const double> x) { return env.upper(x) / std::pow(grad_norm(grad, x), e.q); },
      inst.box);
  k.K = kopt.value;
  const double expo = 1.0 - e.p / e.q;
  k.C4_prime = std::max(std::pow(gsd.min(), expo), std::pow(gsd.max(), expo));
  k.C4 = std::pow(k.C4_prime * k.K, 1.0 / e.p);
  k.C4_stated = k.C4_prime * std::pow(k.K, 1.0 / e.q);

  out.bound = make_report("sobolev-mean", lhs, k.C4 * psd_power(g, 1.0 / e.q), k.C4);
  out.bound.argpoint = kopt.argpoint;
  out.bound.admissible = sobolev_admissible(inst.f);
  return out;
}

EmbeddingNorms embedding_norms(const InequalityInstance& inst, const SobolevExponents& e) {
  EmbeddingNorms out;
  const bool zero = identically_zero(inst.f);
  const Aggregates agg = aggregates(inst, e, !zero);
  const auto norm_of = [](const HermitianOperator& a, double& norm, bool& member) {
    const auto sd = eig_hermitian(a);
    norm = sd.max();
    member = std::isfinite(sd.max()) && std::isfinite(sd.min()) &&
             sd.min() >= -1e-10 * (1.0 + std::abs(sd.max()));
  };
  norm_of(psd_power(agg.x, 1.0 / e.p), out.l_norm, out.l_member);
  if (zero) {
    out.w_norm = 0.0;
    out.w_member = true;
  } else {
    norm_of(psd_power(agg.y, 1.0 / e.q), out.w_norm, out.w_member);
  }
  return out;
}

}  // namespace opineq
