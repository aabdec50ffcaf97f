// Acceptance run: one PASS/FAIL line per criterion. Suite criteria read the
// report written by `opineq verify --suite all --seed 42`; the same command
// is run twice for the determinism criterion.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>

#include <Eigen/QR>

#include "opineq/harness.hpp"
#include "opineq/scalaropt.hpp"

using namespace opineq;

namespace {

// Tolerances and budgets, fixed here.
constexpr double kMarginTol = 1e-8;
constexpr double kKantorovichTol = 1e-6;
constexpr double kBitAgreeTol = 1e-12;
constexpr double kSpectrumMapTol = 1e-10;
constexpr double kGradientTol = 1e-6;
constexpr double kOptimizerTol = 1e-6;
constexpr double kIdentityTol = 1e-12;
constexpr double kAffineTol = 1e-10;
constexpr double kBudgetKantorovich = 5.0;
constexpr double kBudgetGeneral = 60.0;
constexpr double kBudgetOptimizer = 30.0;
constexpr double kBudgetSobolev = 90.0;
constexpr std::uint64_t kSeed = 42;

int failures = 0;

void verdict(int id, const char* name, bool ok, const std::string& detail) {
  std::printf("[%s] %2d. %s: %s\n", ok ? "PASS" : "FAIL", id, name, detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Json strip_wall_time(Json j) {
  if (j.is_object()) {
    j.erase("wall_time_s");
    for (auto& [k, v] : j.items()) v = strip_wall_time(v);
  } else if (j.is_array()) {
    for (auto& v : j) v = strip_wall_time(v);
  }
  return j;
}

int run_cli(const std::string& report) {
  const std::string cmd = std::string(OPINEQ_CLI) + " verify --suite all --seed " +
                          std::to_string(kSeed) + " --report " + report + " > " + report + ".log 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

double metric(const SuiteReport& r, const std::string& key) {
  const auto it = r.metrics.find(key);
  return it == r.metrics.end() ? NAN : it->second;
}

bool all_pass(const SuiteReport& r, std::size_t trials) {
  return r.trials == trials && r.passes == trials && r.fails == 0 && r.worst_relative_margin >= -kMarginTol;
}

std::string summary(const SuiteReport& r) {
  std::ostringstream os;
  os << r.passes << "/" << r.trials << " pass, worst relative margin " << r.worst_relative_margin << ", "
     << r.wall_time_s << " s";
  return os.str();
}

std::size_t count_config(const SuiteReport& r, const std::string& prefix, bool need_pass) {
  return std::size_t(std::count_if(r.records.begin(), r.records.end(), [&](const TrialRecord& t) {
    return t.config.starts_with(prefix) && (!need_pass || t.pass);
  }));
}

// ---------------------------------------------------------------- optimizer oracle

/// sum_i a_i sin(w_i x_i + p_i) + x'Qx + c'x + b prod_i exp(-(x_i - m_i)^2)
struct Smooth {
  std::size_t n;
  std::vector<double> a, w, p, c, m;
  Eigen::MatrixXd q;
  double b;

  double operator()(std::span<const double> x) const {
    double v = 0.0, bump = b;
    for (std::size_t i = 0; i < n; ++i) {
      v += a[i] * std::sin(w[i] * x[i] + p[i]) + c[i] * x[i];
      bump *= std::exp(-(x[i] - m[i]) * (x[i] - m[i]));
      for (std::size_t j = 0; j < n; ++j) v += q(Index(i), Index(j)) * x[i] * x[j];
    }
    return v + bump;
  }
};

/// Exhaustive 401-point-per-axis grid with per-axis caches.
double brute(const Smooth& f, const BoxDomain& box, bool maximize) {
  constexpr int res = 401;
  const std::size_t n = f.n;
  std::vector<std::vector<double>> xs(n), lin(n), bump(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (int k = 0; k < res; ++k) {
      const double x = k + 1 == res ? box[i].hi : box[i].lo + (box[i].hi - box[i].lo) * k / (res - 1.0);
      xs[i].push_back(x);
      lin[i].push_back(f.a[i] * std::sin(f.w[i] * x + f.p[i]) + f.c[i] * x);
      bump[i].push_back(std::exp(-(x - f.m[i]) * (x - f.m[i])));
    }
  }
  double best = maximize ? -INFINITY : INFINITY;
  std::vector<std::size_t> idx(n, 0);
  for (;;) {
    double v = 0.0, bp = f.b;
    for (std::size_t i = 0; i < n; ++i) {
      v += lin[i][idx[i]];
      bp *= bump[i][idx[i]];
      for (std::size_t j = 0; j < n; ++j) v += f.q(Index(i), Index(j)) * xs[i][idx[i]] * xs[j][idx[j]];
    }
    v += bp;
    best = maximize ? std::max(best, v) : std::min(best, v);
    std::size_t axis = n;
    while (axis > 0 && ++idx[axis - 1] == std::size_t(res)) idx[--axis] = 0;
    if (axis == 0) break;
  }
  return best;
}

void criterion_optimizer() {
  const auto t0 = std::chrono::steady_clock::now();
  Rng rng(derive_seed(kSeed, 8));
  double worst = 0.0;
  int bad = 0;
  for (int trial = 0; trial < 50; ++trial) {
    Smooth f;
    f.n = std::size_t(1 + trial % 3);
    std::vector<Interval> axes;
    for (std::size_t i = 0; i < f.n; ++i) {
      const double lo = rng.uniform(-2.0, 2.0);
      axes.push_back({lo, lo + rng.uniform(0.3, 1.0)});
      f.a.push_back(rng.uniform(-0.5, 0.5));
      f.w.push_back(rng.uniform(0.2, 1.5));
      f.p.push_back(rng.uniform(0.0, 6.28));
      f.c.push_back(rng.uniform(-1.0, 1.0));
      f.m.push_back(rng.uniform(axes.back().lo, axes.back().hi));
    }
    f.q = Eigen::MatrixXd::Zero(Index(f.n), Index(f.n));
    for (Index i = 0; i < Index(f.n); ++i)
      for (Index j = 0; j < Index(f.n); ++j) f.q(i, j) = rng.uniform(-0.3, 0.3);
    f.b = rng.uniform(-0.5, 0.5);
    const BoxDomain box(axes);
    const bool maximize = trial % 2 == 0;
    const Objective obj = [&f](std::span<const double> x) { return f(x); };
    const double got = maximize ? box_maximize(obj, box).value : box_minimize(obj, box).value;
    const double ref = brute(f, box, maximize);
    const double err = std::abs(got - ref) / (1.0 + std::abs(ref));
    worst = std::max(worst, err);
    if (!(err <= kOptimizerTol)) ++bad;
  }
  const double t = seconds_since(t0);
  std::ostringstream os;
  os << "50 objectives, " << bad << " beyond tolerance, worst relative gap " << worst << ", " << t << " s";
  verdict(8, "optimizer oracle", bad == 0 && t < kBudgetOptimizer, os.str());
}

// ---------------------------------------------------------------- functional calculus

void criterion_calculus() {
  Rng rng(derive_seed(kSeed, 9));
  const std::vector<ScalarFunc1D> pool{
      ScalarFunc1D::power(2.0),  ScalarFunc1D::power(3.0, -0.5), ScalarFunc1D::power(0.5),
      ScalarFunc1D::power(-1.0), ScalarFunc1D::power(-0.5, 2.0), ScalarFunc1D::log(1.5),
      ScalarFunc1D::exp(0.5),    ScalarFunc1D::reciprocal(-1.0), ScalarFunc1D::affine(2.0, -1.0),
      ScalarFunc1D::polynomial({0.3, -1.0, 0.5, 0.25})};
  double worst_map = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const Index dim = 1 + trial % 10;
    std::vector<double> lambda(static_cast<std::size_t>(dim));
    for (auto& l : lambda) l = rng.uniform(0.3, 3.0);
    const auto u = random_unitary(dim, rng);
    Eigen::VectorXcd d(dim);
    for (Index k = 0; k < dim; ++k) d(k) = lambda[std::size_t(k)];
    const auto a = HermitianOperator::project(u * d.asDiagonal() * u.adjoint());
    const auto& fn = pool[std::size_t(trial) % pool.size()];
    std::vector<double> expect;
    for (double l : lambda) expect.push_back(fn(l));
    std::sort(expect.begin(), expect.end());
    const auto got = eig_hermitian(apply_scalar_func(a, fn)).eigenvalues;
    for (Index k = 0; k < dim; ++k) worst_map = std::max(worst_map, std::abs(got(k) - expect[std::size_t(k)]));
  }

  double worst_grad = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto& u = pool[std::size_t(trial) % pool.size()];
    const auto& v = pool[std::size_t(trial * 7 + 3) % pool.size()];
    const std::size_t n = std::size_t(1 + trial % 3);
    MultiFunc f;
    if (trial % 2) {
      std::vector<ScalarFunc1D> terms{u, v, u};
      terms.resize(n);
      f = Separable{terms};
    } else {
      std::vector<double> beta{0.4, 0.9, 0.3};
      beta.resize(n);
      f = CompositeAffine{beta, u};
    }
    std::vector<double> x;
    for (std::size_t i = 0; i < n; ++i) x.push_back(rng.uniform(0.5, 2.5));
    const auto grad = gradient(f);
    for (std::size_t i = 0; i < n; ++i) {
      const double h = 1e-5;
      auto xp = x, xm = x;
      xp[i] += h;
      xm[i] -= h;
      const double fd = (eval_scalar(f, xp) - eval_scalar(f, xm)) / (2 * h);
      const double exact = eval_scalar(grad[i], x);
      worst_grad = std::max(worst_grad, std::abs(fd - exact) / std::max(1.0, std::abs(exact)));
    }
  }
  std::ostringstream os;
  os << "spectrum mapping worst " << worst_map << " over 100 pairs; gradient worst relative error " << worst_grad
     << " over 100 points";
  verdict(9, "functional calculus", worst_map <= kSpectrumMapTol && worst_grad <= kGradientTol, os.str());
}

void criterion_affine_idempotence(const std::vector<SuiteReport>& suites) {
  Rng rng(derive_seed(kSeed, 7));
  double worst = 0.0;
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t n = std::size_t(1 + trial % 3);
    std::vector<Interval> axes;
    std::vector<ScalarFunc1D> terms;
    std::vector<double> slopes, beta;
    double intercept = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double lo = rng.uniform(-3.0, 3.0);
      axes.push_back({lo, lo + rng.uniform(0.1, 2.0)});
      const double s = rng.uniform(-3.0, 3.0), c = rng.uniform(-2.0, 2.0);
      terms.push_back(ScalarFunc1D::affine(s, c));
      slopes.push_back(s);
      intercept += c;
      beta.push_back(rng.uniform(0.1, 2.0));
    }
    const BoxDomain box(axes);
    const double s = rng.uniform(-3.0, 3.0), c = rng.uniform(-2.0, 2.0);
    const auto e1 = fit_envelope(Separable{terms}, box);
    const auto e2 = fit_envelope(CompositeAffine{beta, ScalarFunc1D::affine(s, c)}, box);
    for (std::size_t i = 0; i < n; ++i) {
      worst = std::max({worst, std::abs(e1.a[i] - slopes[i]), std::abs(e1.c[i] - slopes[i]),
                        std::abs(e2.a[i] - beta[i] * s), std::abs(e2.c[i] - beta[i] * s)});
    }
    worst = std::max({worst, std::abs(e1.b - intercept), std::abs(e1.d - intercept), std::abs(e2.b - c),
                      std::abs(e2.d - c)});
  }
  double violations = 0.0, nodes = 0.0, instances = 0.0;
  for (const auto& r : suites) {
    violations += metric(r, "envelope_violations");
    nodes += metric(r, "envelope_nodes");
    instances += metric(r, "instances");
  }
  std::ostringstream os;
  os << violations << " violations at " << nodes << " grid nodes over " << instances
     << " fitted envelopes; affine idempotence worst " << worst;
  verdict(7, "envelope validity", violations == 0.0 && std::isfinite(nodes) && worst <= kAffineTol, os.str());
}

}  // namespace

int main() {
  std::printf("acceptance: seed %llu, margin tolerance %g\n", static_cast<unsigned long long>(kSeed), kMarginTol);

  const int code_a = run_cli("acceptance_report_a.json");
  const int code_b = run_cli("acceptance_report_b.json");
  std::ifstream in_a("acceptance_report_a.json"), in_b("acceptance_report_b.json");
  Json ja, jb;
  try {
    ja = Json::parse(in_a);
    jb = Json::parse(in_b);
  } catch (const std::exception& e) {
    std::printf("[FAIL] cannot read CLI reports (exit codes %d, %d): %s\n", code_a, code_b, e.what());
    return 1;
  }
  std::map<std::string, SuiteReport> by_name;
  std::vector<SuiteReport> suites;
  for (const auto& s : ja.at("suites")) {
    suites.push_back(suite_report_from_json(s));
    by_name[suites.back().suite] = suites.back();
  }

  {
    const auto& r = by_name["kantorovich"];
    const double m = 1.0, M = 2.0, formula = (M + m) * (M + m) / (4 * M * m);
    double worst = 0.0;
    for (const auto& t : r.records) worst = std::max(worst, std::abs(t.constants.at("ratio/positive-g/upper") - formula));
    std::ostringstream os;
    os << summary(r) << ", constant worst |lambda - " << formula << "| = " << worst;
    verdict(1, "Kantorovich regression",
            all_pass(r, 100) && worst <= kKantorovichTol && r.wall_time_s < kBudgetKantorovich, os.str());
  }
  {
    const auto& r = by_name["thm2.3"];
    bool kinds = true;
    for (const char* key : {"general/difference/upper", "general/difference/lower", "general/congruence/upper",
                            "general/congruence/lower"}) {
      kinds = kinds && r.worst_by_theorem.contains(key) && r.worst_by_theorem.at(key) >= -kMarginTol;
    }
    verdict(2, "general bound suite", all_pass(r, 200) && kinds && r.wall_time_s < kBudgetGeneral,
            summary(r) + (kinds ? ", both forms and sides present" : ", missing a form or side"));
  }
  {
    const auto& r = by_name["thm2.4"];
    bool per_alpha = true;
    for (const char* a : {"alpha=-1.", "alpha=0.5", "alpha=1.", "alpha=2."}) {
      std::size_t n = 0;
      for (const auto& t : r.records) n += t.pass && t.config.find(a) != std::string::npos;
      per_alpha = per_alpha && n == 100;
    }
    const double diff = metric(r, "max_alpha1_rhs_diff");
    std::ostringstream os;
    os << summary(r) << ", alpha=1 vs difference rhs max diff " << diff << " over "
       << metric(r, "alpha1_comparisons") << " comparisons";
    verdict(3, "alpha-difference suite",
            all_pass(r, 400) && per_alpha && diff <= kBitAgreeTol && metric(r, "alpha1_comparisons") == 200.0,
            os.str());
  }
  {
    const auto& r = by_name["thm2.9"];
    bool per_config = true;
    for (const char* c : {"power q=-1", "power q=0.5", "power q=2", "exp", "log, positive", "log, negative"}) {
      per_config = per_config && count_config(r, c, true) == 100;
    }
    const double checks = metric(r, "log_routing_checks"), bad = metric(r, "log_routing_mismatches");
    std::ostringstream os;
    os << summary(r) << ", log routing " << checks - bad << "/" << checks << " match";
    verdict(4, "ratio suite", all_pass(r, 600) && per_config && checks == 200.0 && bad == 0.0, os.str());
  }
  {
    const auto& r = by_name["cor-g"];
    bool per_kind = true;
    for (const char* c : {"power", "log", "exp"}) per_kind = per_kind && count_config(r, c, true) == 100;
    verdict(5, "special-g difference suite", all_pass(r, 300) && per_kind, summary(r));
  }
  {
    double bad = 0.0, instances = 0.0;
    for (const auto& r : suites) {
      bad += metric(r, "spectrum_violations");
      instances += metric(r, "instances");
    }
    std::ostringstream os;
    os << bad << " mixtures outside the box over " << instances << " instances in " << suites.size() << " suites";
    verdict(6, "spectrum containment", bad == 0.0 && instances > 0.0, os.str());
  }
  criterion_affine_idempotence(suites);
  criterion_optimizer();
  criterion_calculus();
  {
    const auto& a = by_name["sobolev"];
    const auto& b = by_name["sobolev-mean"];
    bool per_exp = true;
    for (const char* c : {"m=3 p=2 q=6", "m=4 p=2 q=4"}) {
      per_exp = per_exp && count_config(a, c, true) == 100 && count_config(b, c, true) == 100;
    }
    const double ident = metric(a, "max_c1_identity_error");
    const double lemma = metric(a, "lemma_c2_violations") + metric(a, "lemma_c3_violations");
    const double t = a.wall_time_s + b.wall_time_s;
    std::ostringstream os;
    os << "original " << a.passes << "/" << a.trials << ", mean " << b.passes << "/" << b.trials
       << ", C1 identity error " << ident << ", lemma violations " << lemma << " at "
       << metric(a, "lemma_nodes") << " nodes, " << t << " s";
    verdict(10, "Sobolev suites",
            all_pass(a, 200) && all_pass(b, 200) && per_exp && ident <= kIdentityTol && lemma == 0.0 &&
                t < kBudgetSobolev,
            os.str());
  }
  {
    const bool same = strip_wall_time(ja).dump() == strip_wall_time(jb).dump();
    std::ostringstream os;
    os << "two runs of `verify --suite all --seed 42` " << (same ? "identical" : "differ")
       << " apart from wall time (exit codes " << code_a << ", " << code_b << ")";
    verdict(11, "determinism", same && code_a == 0 && code_b == 0, os.str());
  }

  std::printf("%s: %d of 11 criteria failed\n", failures ? "FAILED" : "ALL PASSED", failures);
  return failures ? 1 : 0;
}
