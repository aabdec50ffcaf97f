#pragma once

#include "opineq/bounds.hpp"

namespace opineq {

/// m > 1 integer, 1 < p < m, q = m p / (m - p).
struct SobolevExponents {
  int m = 3;
  double p = 2.0;
  double q = 6.0;
};

SobolevExponents sobolev_conjugate(int m, double p);

/// Constants of both Sobolev-type inequalities. Entries that a given check
/// does not use stay at zero.
struct SobolevConstants {
  double C2 = 0.0;
  double C3 = 0.0;
  double C3_prime = 0.0;  ///< C3^{1/q}
  double C1 = 0.0;        ///< C3_prime / C2
  double C4_prime = 0.0;  ///< max lambda^{1 - p/q} over the spectrum of |f'(T...)|^q
  double K = 0.0;         ///< box max of (c.x + d) / |f'(x)|^q
  double C4 = 0.0;        ///< (C4_prime K)^{1/p}, the constant actually verified
  double C4_stated = 0.0; ///< C4_prime K^{1/q}, kept for comparison
};

struct SobolevReport {
  BoundReport bound;
  SobolevConstants constants;
  bool trivial = false;  ///< f vanishes identically; constants not computed
};

/// Largest C2 with C2 h <= h^{p/q} on the box: min of h^{(p-q)/q}.
/// Throws DomainError unless h > 0 on the box.
double constant_C2(const MultiFunc& h, const BoxDomain& box, const SobolevExponents& e);

/// C2 for the spectral enclosure [lo, hi] of a positive operator:
/// min of t^{(p-q)/q} over [max(1e-9, lo), max(1e-9, hi)].
double constant_C2_spectral(double lo, double hi, const SobolevExponents& e);

/// Smallest C3 with |f|^p <= C3 |f'|^q on the box: max |f|^p / min |f'|^q.
/// Throws DomainError when min |f'| <= 1e-9.
double constant_C3(const MultiFunc& f, const BoxDomain& box, const SobolevExponents& e);

/// Counts nodes of a res^n grid where C2 h(x) > h(x)^{p/q} (beyond 1e-12 relative).
long long lemma_C2_violations(const MultiFunc& h, const BoxDomain& box, const SobolevExponents& e,
                              double C2, int res = 201);

/// Counts nodes where |f(x)|^p > C3 |f'(x)|^q (beyond 1e-12 relative).
long long lemma_C3_violations(const MultiFunc& f, const BoxDomain& box, const SobolevExponents& e,
                              double C3, int res = 201);

/// (sum_J w_J Phi_J(|f(A_J)|^p))^{1/p} against
/// C1 (sum_J w_J Phi_J(|f'(A_J)|^q))^{1/q}.
SobolevReport verify_sobolev_original(const InequalityInstance& inst, const SobolevExponents& e);

/// (sum_J w_J Phi_J(|f(A_J)|^p))^{1/p} against C4 (|f'(T...)|^q)^{1/q}.
SobolevReport verify_sobolev_mean(const InequalityInstance& inst, const SobolevExponents& e);

struct EmbeddingNorms {
  double w_norm = 0.0;  ///< max eigenvalue of (sum w Phi(|f'|^q))^{1/q}
  double l_norm = 0.0;  ///< max eigenvalue of (sum w Phi(|f|^p))^{1/p}
  bool w_member = false;
  bool l_member = false;
  bool member() const { return w_member && l_member; }
};

EmbeddingNorms embedding_norms(const InequalityInstance& inst, const SobolevExponents& e);

/// True when |f|^p and |f'|^q are functions of one operator built from the
/// arguments, which the operator steps of both inequalities require.
bool sobolev_admissible(const MultiFunc& f);

}  // namespace opineq
