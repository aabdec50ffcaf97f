#include "opineq/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <sstream>
#include <thread>

#include <Eigen/QR>

#include "opineq/scalaropt.hpp"

namespace opineq {

const char* to_string(MapKind kind) {
  switch (kind) {
    case MapKind::RandomKraus: return "random-kraus";
    case MapKind::Pinching: return "pinching";
    case MapKind::Identity: return "identity";
  }
  return "?";
}

const char* to_string(WeightMode mode) {
  return mode == WeightMode::Uniform ? "uniform" : "random-dirichlet";
}

// ---------------------------------------------------------------- spec JSON

namespace {

template <typename Fn>
auto in_field(const char* name, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const InputError& e) {
    throw InputError(std::string("spec.") + name + ": " + e.what());
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("spec.") + name + ": " + e.what());
  } catch (const Error& e) {
    throw InputError(std::string("spec.") + name + ": " + e.what());
  }
}

const Json& need(const Json& j, const char* key) {
  if (!j.contains(key)) throw InputError(std::string("spec: missing field '") + key + "'");
  return j.at(key);
}

}  // namespace

Json to_json(const InstanceSpec& spec) {
  Json boxes = Json::array();
  for (const auto& iv : spec.boxes) boxes.push_back({iv.lo, iv.hi});
  Json out{{"opineq-schema", kSchemaVersion},
           {"seed", spec.seed},
           {"dim", spec.dim},
           {"k", spec.k},
           {"boxes", std::move(boxes)},
           {"f", to_json(spec.f)},
           {"g", to_json(spec.g)},
           {"maps", {{"kind", to_string(spec.maps)}, {"n_kraus", spec.n_kraus}}},
           {"weights", to_string(spec.weights)}};
  if (spec.envelope) out["envelope"] = to_json(*spec.envelope);
  return out;
}

InstanceSpec spec_from_json(const Json& j) {
  check_schema(j);
  InstanceSpec s;
  s.seed = in_field("seed", [&] {
    const Json& v = need(j, "seed");
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0)) {
      throw InputError("must be a nonnegative integer");
    }
    return v.get<std::uint64_t>();
  });
  s.dim = in_field("dim", [&] {
    const Json& v = need(j, "dim");
    if (!v.is_number_integer()) throw InputError("must be an integer");
    return Index(v.get<long long>());
  });
  s.k = in_field("k", [&] {
    std::vector<std::size_t> k;
    for (const auto& v : need(j, "k")) {
      if (!v.is_number_integer() || v.get<long long>() < 1) {
        throw InputError("entries must be positive integers");
      }
      k.push_back(v.get<std::size_t>());
    }
    return k;
  });
  s.boxes = in_field("boxes", [&] { return box_from_json(need(j, "boxes")).axes(); });
  s.f = in_field("f", [&] { return multi_func_from_json(need(j, "f")); });
  s.g = in_field("g", [&] { return multi_func_from_json(need(j, "g")); });
  in_field("maps", [&] {
    if (!j.contains("maps")) return;
    const Json& m = j.at("maps");
    const std::string kind = m.is_string() ? m.get<std::string>() : m.at("kind").get<std::string>();
    if (kind == "random-kraus") {
      s.maps = MapKind::RandomKraus;
    } else if (kind == "pinching") {
      s.maps = MapKind::Pinching;
    } else if (kind == "identity") {
      s.maps = MapKind::Identity;
    } else {
      throw InputError("unknown map kind '" + kind + "'");
    }
    if (m.is_object() && m.contains("n_kraus")) s.n_kraus = m.at("n_kraus").get<int>();
  });
  in_field("weights", [&] {
    if (!j.contains("weights")) return;
    const std::string w = j.at("weights").get<std::string>();
    if (w == "uniform") {
      s.weights = WeightMode::Uniform;
    } else if (w == "random-dirichlet") {
      s.weights = WeightMode::RandomDirichlet;
    } else {
      throw InputError("unknown weight mode '" + w + "'");
    }
  });
  if (j.contains("envelope")) {
    s.envelope = in_field("envelope", [&] { return envelope_from_json(j.at("envelope")); });
  }
  return s;
}

// ---------------------------------------------------------------- instances

ComplexMatrix<double> random_unitary(Index dim, Rng& rng) {
  ComplexMatrix<double> g(dim, dim);
  for (Index c = 0; c < dim; ++c)
    for (Index r = 0; r < dim; ++r) {
      const double re = rng.gaussian();
      g(r, c) = {re, rng.gaussian()};
    }
  const Eigen::HouseholderQR<ComplexMatrix<double>> qr(g);
  ComplexMatrix<double> q = qr.householderQ() * ComplexMatrix<double>::Identity(dim, dim);
  for (Index c = 0; c < dim; ++c) {
    const auto r = qr.matrixQR()(c, c);
    if (std::abs(r) > 0.0) q.col(c) *= r / std::abs(r);
  }
  return q;
}

HermitianOperator random_hermitian_in_box(Index dim, double m, double M, std::uint64_t seed,
                                          bool force_endpoints) {
  if (dim < 1) throw DimensionError("random_hermitian_in_box: dim must be >= 1");
  if (!(m < M)) throw InputError("random_hermitian_in_box: needs m < M");
  Rng rng(seed);
  std::vector<double> lambda(static_cast<std::size_t>(dim));
  for (auto& l : lambda) l = rng.uniform(m, M);
  if (force_endpoints && dim >= 2) {
    lambda[0] = m;
    lambda[1] = M;
  }
  const ComplexMatrix<double> u = random_unitary(dim, rng);
  ComplexMatrix<double> d = ComplexMatrix<double>::Zero(dim, dim);
  for (Index i = 0; i < dim; ++i) d(i, i) = lambda[std::size_t(i)];
  return HermitianOperator::project(u * d * u.adjoint());
}

InequalityInstance build_instance(const InstanceSpec& spec, EnvelopeCheck* envelope_check) {
  const std::size_t n = spec.k.size();
  if (n < 1 || n > kMaxSpecArity) throw InputError("spec.k: need 1 to 4 axes");
  if (spec.dim < 1 || spec.dim > kMaxSpecDim) throw InputError("spec.dim: need 1 <= dim <= 32");
  if (spec.boxes.size() != n) throw InputError("spec.boxes: one interval per axis required");
  for (const auto& iv : spec.boxes) {
    if (!(std::isfinite(iv.lo) && std::isfinite(iv.hi) && iv.lo < iv.hi)) {
      throw InputError("spec.boxes: intervals need finite lo < hi");
    }
  }
  for (auto k : spec.k)
    if (k < 1) throw InputError("spec.k: entries must be positive");
  if (spec.f.arity() != n) throw InputError("spec.f: arity differs from the number of axes");
  if (spec.g.arity() != n) throw InputError("spec.g: arity differs from the number of axes");
  if (spec.maps == MapKind::RandomKraus && (spec.n_kraus < 1 || spec.n_kraus > 64)) {
    throw InputError("spec.maps.n_kraus: need 1 to 64 Kraus operators");
  }

  InequalityInstance inst;
  inst.box = BoxDomain(spec.boxes);
  Rng rng(spec.seed);

  std::size_t drawn = 0;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<HermitianOperator> ops;
    for (std::size_t j = 0; j < spec.k[i]; ++j, ++drawn) {
      ops.push_back(random_hermitian_in_box(spec.dim, spec.boxes[i].lo, spec.boxes[i].hi,
                                            rng.next_u64(), drawn % 4 == 0));
    }
    inst.axes.push_back(std::move(ops));
  }

  if (spec.weights == WeightMode::Uniform) {
    inst.weights = WeightFamily::uniform(spec.k);
  } else {
    std::vector<std::vector<double>> w;
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<double> v(spec.k[i]);
      double total = 0.0;
      for (auto& x : v) total += (x = rng.exponential());
      for (auto& x : v) x /= total;
      w.push_back(std::move(v));
    }
    inst.weights = WeightFamily(std::move(w));
  }

  const MultiIndexRange range(spec.k);
  std::vector<PositiveLinearMap> maps;
  for (std::size_t flat = 0; flat < range.size(); ++flat) {
    switch (spec.maps) {
      case MapKind::RandomKraus:
        maps.push_back(random_map(spec.dim, spec.dim, spec.n_kraus, rng.next_u64()));
        break;
      case MapKind::Pinching: maps.push_back(PositiveLinearMap::pinching(spec.dim)); break;
      case MapKind::Identity: maps.push_back(PositiveLinearMap::identity(spec.dim)); break;
    }
    const auto v = validate_map(maps.back(), 1e-10, 2, derive_seed(spec.seed, flat));
    if (!v.ok()) {
      std::ostringstream os;
      os << "map " << flat << " fails validation (normalization residual "
         << v.normalization_residual << ", min positivity " << v.min_positivity << ")";
      throw ConvergenceError(os.str());
    }
  }
  inst.grid = MapGrid(spec.k, std::move(maps));
  inst.f = spec.f;
  inst.g = spec.g;

  EnvelopeCheck chk;
  if (spec.envelope) {
    if (spec.envelope->a.size() != n || spec.envelope->c.size() != n) {
      throw InputError("spec.envelope: slopes need one entry per axis");
    }
    inst.envelope = *spec.envelope;
    chk = validate_envelope(inst.f, inst.envelope, inst.box);
    if (!chk.ok()) {
      std::ostringstream os;
      os << "spec.envelope: fails at " << chk.violations << " of " << chk.nodes
         << " grid nodes (worst gap " << chk.worst_gap << ")";
      throw InputError(os.str());
    }
  } else {
    inst.envelope = fit_envelope(inst.f, inst.box, kEnvelopeGrid, &chk);
  }
  if (envelope_check) *envelope_check = chk;
  check_instance(inst, 0);
  return inst;
}

// ---------------------------------------------------------------- reports

namespace {

Json num(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

double num_from(const Json& j) {
  return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>();
}

Json num_map(const std::map<std::string, double>& m) {
  Json out = Json::object();
  for (const auto& [k, v] : m) out[k] = num(v);
  return out;
}

std::map<std::string, double> num_map_from(const Json& j) {
  std::map<std::string, double> out;
  for (const auto& [k, v] : j.items()) out[k] = num_from(v);
  return out;
}

Json to_json(const TrialRecord& r) {
  Json arg = Json::array();
  for (double x : r.argpoint) arg.push_back(num(x));
  return Json{{"index", r.index},
              {"seed", r.seed},
              {"config", r.config},
              {"pass", r.pass},
              {"margin", num(r.margin)},
              {"relative_margin", num(r.relative_margin)},
              {"constants", num_map(r.constants)},
              {"argpoint", std::move(arg)},
              {"message", r.message}};
}

TrialRecord record_from_json(const Json& j) {
  TrialRecord r;
  r.index = j.at("index").get<std::size_t>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.config = j.at("config").get<std::string>();
  r.pass = j.at("pass").get<bool>();
  r.margin = num_from(j.at("margin"));
  r.relative_margin = num_from(j.at("relative_margin"));
  r.constants = num_map_from(j.at("constants"));
  for (const auto& x : j.at("argpoint")) r.argpoint.push_back(num_from(x));
  r.message = j.at("message").get<std::string>();
  return r;
}

}  // namespace

Json to_json(const SuiteReport& r) {
  Json records = Json::array();
  for (const auto& t : r.records) records.push_back(to_json(t));
  return Json{{"opineq-schema", kSchemaVersion},
              {"suite", r.suite},
              {"seed", r.seed},
              {"tolerance", r.tolerance},
              {"trials", r.trials},
              {"passes", r.passes},
              {"fails", r.fails},
              {"worst_relative_margin", num(r.worst_relative_margin)},
              {"worst_by_theorem", num_map(r.worst_by_theorem)},
              {"metrics", num_map(r.metrics)},
              {"failure_seeds", r.failure_seeds},
              {"records", std::move(records)},
              {"wall_time_s", r.wall_time_s}};
}

SuiteReport suite_report_from_json(const Json& j) {
  check_schema(j);
  try {
    SuiteReport r;
    r.suite = j.at("suite").get<std::string>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.tolerance = j.at("tolerance").get<double>();
    r.trials = j.at("trials").get<std::size_t>();
    r.passes = j.at("passes").get<std::size_t>();
    r.fails = j.at("fails").get<std::size_t>();
    r.worst_relative_margin = num_from(j.at("worst_relative_margin"));
    r.worst_by_theorem = num_map_from(j.at("worst_by_theorem"));
    r.metrics = num_map_from(j.at("metrics"));
    r.failure_seeds = j.at("failure_seeds").get<std::vector<std::uint64_t>>();
    for (const auto& t : j.at("records")) r.records.push_back(record_from_json(t));
    r.wall_time_s = j.at("wall_time_s").get<double>();
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed suite report: ") + e.what());
  }
}

// ---------------------------------------------------------------- generators

namespace {

double signed_coef(Rng& rng) {
  const double c = rng.uniform(0.5, 2.0);
  return rng.uniform() < 0.5 ? -c : c;
}

constexpr double kPowers[] = {2.0, 3.0, 0.5, -1.0, -0.5, 1.5};

/// Any of the supported elementary functions; all are defined for s > 0.
ScalarFunc1D general_outer(Rng& rng) {
  switch (rng.uniform_int(0, 9)) {
    case 0: case 1: case 2: case 3: case 4: case 5: {
      const double q = kPowers[rng.uniform_int(0, 5)];
      return ScalarFunc1D::power(q, signed_coef(rng));
    }
    case 6: return ScalarFunc1D::log(signed_coef(rng));
    case 7: return ScalarFunc1D::exp(signed_coef(rng));
    case 8: return ScalarFunc1D::reciprocal(signed_coef(rng));
    default: {
      if (rng.uniform() < 0.5) return ScalarFunc1D::affine(rng.uniform(-2, 2), rng.uniform(-1, 1));
      std::vector<double> c(4);
      for (auto& x : c) x = rng.uniform(-1, 1);
      return ScalarFunc1D::polynomial(std::move(c));
    }
  }
}

/// Strictly positive for s > 0.
ScalarFunc1D positive_outer(Rng& rng) {
  switch (rng.uniform_int(0, 4)) {
    case 0: case 1:
      return ScalarFunc1D::power(kPowers[rng.uniform_int(0, 5)], rng.uniform(0.5, 2.0));
    case 2: return ScalarFunc1D::exp(rng.uniform(0.5, 2.0));
    case 3: return ScalarFunc1D::reciprocal(rng.uniform(0.5, 2.0));
    default: return ScalarFunc1D::affine(rng.uniform(0.0, 2.0), rng.uniform(0.1, 1.0));
  }
}

/// Derivative never vanishes for s > 0.
ScalarFunc1D monotone_outer(Rng& rng) {
  switch (rng.uniform_int(0, 4)) {
    case 0: case 1:
      return ScalarFunc1D::power(kPowers[rng.uniform_int(0, 5)], signed_coef(rng));
    case 2: return rng.uniform() < 0.5 ? ScalarFunc1D::log(signed_coef(rng))
                                       : ScalarFunc1D::exp(signed_coef(rng));
    case 3: return ScalarFunc1D::reciprocal(signed_coef(rng));
    default: return ScalarFunc1D::affine(signed_coef(rng), rng.uniform(-1, 1));
  }
}

std::vector<Interval> draw_boxes(Rng& rng, std::size_t n) {
  std::vector<Interval> out;
  for (std::size_t i = 0; i < n; ++i) {
    const double lo = rng.uniform(0.2, 2.0);
    out.push_back({lo, std::min(3.0, lo + rng.uniform(0.3, 1.0))});
  }
  return out;
}

enum class BetaTarget { Default, LogPositive, LogNegative };

std::vector<double> draw_beta(Rng& rng, const std::vector<Interval>& boxes, BetaTarget target) {
  std::vector<double> beta;
  double lo = 0.0, hi = 0.0;
  for (const auto& iv : boxes) {
    beta.push_back(rng.uniform(0.2, 1.0));
    lo += beta.back() * iv.lo;
    hi += beta.back() * iv.hi;
  }
  double scale = 1.0;
  switch (target) {
    case BetaTarget::Default: scale = hi > 4.0 ? 4.0 / hi : 1.0; break;
    case BetaTarget::LogPositive: scale = rng.uniform(1.05, 2.0) / lo; break;
    case BetaTarget::LogNegative: scale = rng.uniform(0.3, 0.95) / hi; break;
  }
  for (auto& b : beta) b *= scale;
  return beta;
}

/// Shape, maps and weights; functions are left to the suite.
InstanceSpec draw_frame(Rng& rng, std::size_t n, int max_dim) {
  InstanceSpec s;
  s.seed = rng.next_u64();
  s.dim = rng.uniform_int(1, max_dim);
  for (std::size_t i = 0; i < n; ++i) s.k.push_back(std::size_t(rng.uniform_int(1, 3)));
  s.boxes = draw_boxes(rng, n);
  switch (rng.uniform_int(0, 5)) {
    case 0: s.maps = MapKind::Pinching; break;
    case 1: s.maps = MapKind::Identity; break;
    default: s.maps = MapKind::RandomKraus; s.n_kraus = rng.uniform_int(1, 3); break;
  }
  s.weights = rng.uniform() < 0.5 ? WeightMode::Uniform : WeightMode::RandomDirichlet;
  return s;
}

Separable separable_of(Rng& rng, std::size_t n, ScalarFunc1D (*pool)(Rng&)) {
  Separable s;
  for (std::size_t i = 0; i < n; ++i) s.terms.push_back(pool(rng));
  return s;
}

// ---------------------------------------------------------------- trial context

struct Trial {
  double tol;
  TrialRecord& rec;
  std::map<std::string, double>& metrics;
  std::vector<std::string> problems;
  double worst = std::numeric_limits<double>::infinity();

  void count(const std::string& key, double v = 1.0) { metrics[key] += v; }
  void maximum(const std::string& key, double v) {
    auto [it, fresh] = metrics.emplace(key, v);
    if (!fresh) it->second = std::max(it->second, v);
  }
  void minimum(const std::string& key, double v) {
    auto [it, fresh] = metrics.emplace(key, v);
    if (!fresh) it->second = std::min(it->second, v);
  }
  void fail(std::string msg) { problems.push_back(std::move(msg)); }

  void add(const BoundReport& r) {
    const std::string key = r.theorem + "/" + to_string(r.side);
    // verdict.tolerance = 1e-8 (1 + scale)
    const double rel = r.verdict.margin * 1e-8 / r.verdict.tolerance;
    count("reports");
    minimum("min_margin/" + key, rel);
    rec.constants[key] = r.scalar_constant;
    if (!(rel >= -tol)) {
      std::ostringstream os;
      os << key << " margin " << r.verdict.margin << " (relative " << rel << ")";
      fail(os.str());
    }
    if (!r.admissible) {
      count("inadmissible");
      fail(key + " is not admissible");
    }
    if (!(rel >= worst)) {
      worst = rel;
      rec.margin = r.verdict.margin;
      rec.relative_margin = rel;
      rec.argpoint = r.argpoint;
    }
  }

  InequalityInstance build(const InstanceSpec& spec) {
    EnvelopeCheck chk;
    InequalityInstance inst = build_instance(spec, &chk);
    count("instances");
    count("envelope_nodes", double(chk.nodes));
    count("envelope_violations", double(chk.violations));
    if (!chk.ok()) fail("envelope violations");
    count("spectrum_violations", 0.0);
    count("inadmissible", 0.0);
    const auto t = arg_mixtures(inst);
    if (!mixtures_in_box(inst, t, 1e-8)) {
      count("spectrum_violations");
      fail("mixture spectrum leaves the box");
    }
    return inst;
  }

  void both_sides(const std::function<BoundReport(Side)>& fn) {
    add(fn(Side::Upper));
    add(fn(Side::Lower));
  }
};

std::string label(const std::string& head, const InstanceSpec& s) {
  std::ostringstream os;
  os << head << " n=" << s.k.size() << " dim=" << s.dim << " maps=" << to_string(s.maps)
     << " f=" << s.f.describe() << " g=" << s.g.describe();
  return os.str();
}

/// Shape families shared by the difference-type suites: a single axis, a
/// composite f with g along the same beta, or separable f and g.
enum class Family { SingleAxis, Composite, Separable };

InstanceSpec family_spec(Rng& rng, Family fam, ScalarFunc1D (*g_pool)(Rng&)) {
  const std::size_t n = fam == Family::SingleAxis ? 1 : std::size_t(rng.uniform_int(2, 3));
  InstanceSpec s = draw_frame(rng, n, 8);
  switch (fam) {
    case Family::SingleAxis:
      s.f = Separable{{general_outer(rng)}};
      s.g = Separable{{g_pool(rng)}};
      break;
    case Family::Composite: {
      const auto beta = draw_beta(rng, s.boxes, BetaTarget::Default);
      s.f = CompositeAffine{beta, general_outer(rng)};
      s.g = CompositeAffine{beta, g_pool(rng)};
      break;
    }
    case Family::Separable:
      s.f = separable_of(rng, n, general_outer);
      s.g = separable_of(rng, n, g_pool);
      break;
  }
  return s;
}

const char* family_name(Family f) {
  switch (f) {
    case Family::SingleAxis: return "single-axis";
    case Family::Composite: return "composite";
    case Family::Separable: return "separable";
  }
  return "?";
}

// ---------------------------------------------------------------- suites

void suite_general(Trial& t, Rng& rng, std::size_t index) {
  const auto fam = Family(index % 3);
  const InstanceSpec spec = family_spec(rng, fam, positive_outer);
  const double alpha = rng.uniform(-1.0, 2.0);
  t.rec.config = label(family_name(fam), spec);
  t.rec.constants["alpha"] = alpha;
  const auto inst = t.build(spec);
  t.both_sides([&](Side s) { return general_bound(inst, Difference{alpha}, s); });
  if (fam != Family::Separable) {
    t.both_sides([&](Side s) { return general_bound(inst, Congruence{}, s); });
  }
}

void suite_alpha(Trial& t, Rng& rng, std::size_t index) {
  constexpr double kAlphas[] = {-1.0, 0.5, 1.0, 2.0};
  const double alpha = kAlphas[index % 4];
  const auto fam = Family((index / 4) % 3);
  const InstanceSpec spec = family_spec(rng, fam, general_outer);
  t.rec.config = label(std::string(family_name(fam)) + " alpha=" + std::to_string(alpha), spec);
  t.rec.constants["alpha"] = alpha;
  const auto inst = t.build(spec);
  for (Side side : {Side::Upper, Side::Lower}) {
    const BoundReport r = alpha_difference_bound(inst, alpha, side);
    t.add(r);
    if (alpha == 1.0) {
      const BoundReport d = difference_bound(inst, side);
      const double diff = max_abs((r.rhs - d.rhs).matrix());
      t.count("alpha1_comparisons");
      t.maximum("max_alpha1_rhs_diff", diff);
      if (!(diff <= 1e-12)) t.fail("alpha = 1 rhs differs from the difference bound");
    }
  }
}

void suite_difference(Trial& t, Rng& rng, std::size_t index) {
  const auto fam = Family(index % 3);
  const InstanceSpec spec = family_spec(rng, fam, general_outer);
  t.rec.config = label(family_name(fam), spec);
  const auto inst = t.build(spec);
  t.both_sides([&](Side s) { return difference_bound(inst, s); });
}

struct SpecialConfig {
  SpecialKind kind;
  double q;
  BetaTarget target;
  const char* name;
};

void suite_ratio(Trial& t, Rng& rng, std::size_t index) {
  static constexpr SpecialConfig kConfigs[] = {
      {SpecialKind::Power, -1.0, BetaTarget::Default, "power q=-1"},
      {SpecialKind::Power, 0.5, BetaTarget::Default, "power q=0.5"},
      {SpecialKind::Power, 2.0, BetaTarget::Default, "power q=2"},
      {SpecialKind::Exp, 1.0, BetaTarget::Default, "exp"},
      {SpecialKind::Log, 1.0, BetaTarget::LogPositive, "log, positive branch"},
      {SpecialKind::Log, 1.0, BetaTarget::LogNegative, "log, negative branch"},
  };
  const SpecialConfig& cfg = kConfigs[index % 6];
  const std::size_t n = std::size_t(rng.uniform_int(1, 3));
  InstanceSpec spec = draw_frame(rng, n, 8);
  const auto beta = draw_beta(rng, spec.boxes, cfg.target);
  spec.f = CompositeAffine{beta, general_outer(rng)};
  spec.g = special_g(cfg.kind, beta, cfg.q);
  t.rec.config = label(cfg.name, spec);
  const auto inst = t.build(spec);

  const RatioBranch branch = route_special_g(cfg.kind, beta, inst.box);
  t.rec.constants["branch_is_negative"] = branch == RatioBranch::LogNegative ? 1.0 : 0.0;
  if (cfg.kind == SpecialKind::Log) {
    // Independent check: the sign of log at both box extremes.
    double s_lo = 0.0, s_hi = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      s_lo += beta[i] * inst.box[i].lo;
      s_hi += beta[i] * inst.box[i].hi;
    }
    const bool pos = std::log(s_lo) > 0.0 && std::log(s_hi) > 0.0;
    const bool neg = std::log(s_lo) < 0.0 && std::log(s_hi) < 0.0;
    const bool match = (pos && branch == RatioBranch::LogPositive) ||
                       (neg && branch == RatioBranch::LogNegative);
    t.count("log_routing_checks");
    t.count("log_routing_mismatches", 0.0);
    if (!match) {
      t.count("log_routing_mismatches");
      t.fail(std::string("log routed to ") + to_string(branch));
    }
  }
  const GSign sign = branch == RatioBranch::LogNegative ? GSign::Negative : GSign::Positive;
  t.both_sides([&](Side s) { return ratio_bound(inst, s, sign); });
}

void suite_special_difference(Trial& t, Rng& rng, std::size_t index) {
  constexpr double kQ[] = {-1.0, 0.5, 2.0};
  const auto kind = SpecialKind(index % 3);
  const double q = kind == SpecialKind::Power ? kQ[(index / 3) % 3] : 1.0;
  const std::size_t n = std::size_t(rng.uniform_int(1, 3));
  InstanceSpec spec = draw_frame(rng, n, 8);
  const auto beta = draw_beta(rng, spec.boxes, BetaTarget::Default);
  spec.f = CompositeAffine{beta, general_outer(rng)};
  spec.g = special_g(kind, beta, q);
  const char* names[] = {"power", "log", "exp"};
  t.rec.config = label(names[index % 3], spec);
  const auto inst = t.build(spec);
  t.both_sides([&](Side s) { return difference_bound(inst, s); });
}

InstanceSpec sobolev_spec(Rng& rng, std::size_t index) {
  const std::size_t n = std::size_t(rng.uniform_int(1, 2));
  InstanceSpec s = draw_frame(rng, n, 6);
  if ((index / 2) % 2 == 0) {
    s.f = CompositeAffine{draw_beta(rng, s.boxes, BetaTarget::Default), monotone_outer(rng)};
  } else {
    Separable f;
    const auto active = std::size_t(rng.uniform_int(0, int(n) - 1));
    for (std::size_t i = 0; i < n; ++i) {
      f.terms.push_back(i == active ? monotone_outer(rng)
                                    : ScalarFunc1D::constant(rng.uniform(-1.0, 1.0)));
    }
    s.f = f;
  }
  s.g = MultiFunc::constant(n, 1.0);
  return s;
}

SobolevExponents sobolev_exponents(std::size_t index) {
  return index % 2 == 0 ? sobolev_conjugate(3, 2.0) : sobolev_conjugate(4, 2.0);
}

std::string sobolev_label(const SobolevExponents& e, const InstanceSpec& s) {
  std::ostringstream os;
  os << "m=" << e.m << " p=" << e.p << " q=" << e.q;
  return label(os.str(), s);
}

void suite_sobolev(Trial& t, Rng& rng, std::size_t index) {
  const SobolevExponents e = sobolev_exponents(index);
  const InstanceSpec spec = sobolev_spec(rng, index);
  t.rec.config = sobolev_label(e, spec);
  const auto inst = t.build(spec);
  const SobolevReport rep = verify_sobolev_original(inst, e);
  t.add(rep.bound);
  const auto& k = rep.constants;
  t.rec.constants["C1"] = k.C1;
  t.rec.constants["C2"] = k.C2;
  t.rec.constants["C3"] = k.C3;
  t.rec.constants["C3_prime"] = k.C3_prime;

  const double identity_err =
      std::abs(k.C1 - std::pow(k.C3, 1.0 / e.q) / k.C2) / std::max(1.0, std::abs(k.C1));
  t.maximum("max_c1_identity_error", identity_err);
  if (!(identity_err <= 1e-12)) t.fail("C1 differs from C3^{1/q} / C2");

  const MultiFunc h = grad_magnitude_power_func(inst.f, e.q);
  const double c2 = constant_C2(h, inst.box, e);
  t.rec.constants["lemma_C2"] = c2;
  const long long v2 = lemma_C2_violations(h, inst.box, e, c2);
  const long long v3 = lemma_C3_violations(inst.f, inst.box, e, k.C3);
  t.count("lemma_nodes", 2.0 * std::pow(double(kEnvelopeGrid), double(inst.arity())));
  t.count("lemma_c2_violations", double(v2));
  t.count("lemma_c3_violations", double(v3));
  if (v2 + v3 > 0) t.fail("scalar lemma grid violations");
}

void suite_sobolev_mean(Trial& t, Rng& rng, std::size_t index) {
  const SobolevExponents e = sobolev_exponents(index);
  const InstanceSpec spec = sobolev_spec(rng, index);
  t.rec.config = sobolev_label(e, spec);
  const auto inst = t.build(spec);
  const SobolevReport rep = verify_sobolev_mean(inst, e);
  t.add(rep.bound);
  const auto& k = rep.constants;
  t.rec.constants["C4"] = k.C4;
  t.rec.constants["C4_prime"] = k.C4_prime;
  t.rec.constants["K"] = k.K;
  t.rec.constants["C4_stated"] = k.C4_stated;
}

void suite_kantorovich(Trial& t, Rng& rng, std::size_t) {
  InstanceSpec spec = draw_frame(rng, 1, 8);
  spec.boxes = {{1.0, 2.0}};
  spec.f = Separable{{ScalarFunc1D::reciprocal()}};
  spec.g = special_g(SpecialKind::Power, {1.0}, -1.0);
  t.rec.config = label("m=1 M=2", spec);
  const auto inst = t.build(spec);
  const BoundReport r = ratio_bound(inst, Side::Upper, GSign::Positive);
  t.add(r);
  const double err = std::abs(r.scalar_constant - 1.125);
  t.maximum("max_kantorovich_error", err);
  if (!(err <= 1e-6)) t.fail("Kantorovich constant differs from 9/8");
}

using SuiteFn = void (*)(Trial&, Rng&, std::size_t);

struct SuiteEntry {
  const char* name;
  SuiteFn fn;
  std::size_t trials;
};

const std::vector<SuiteEntry>& registry() {
  static const std::vector<SuiteEntry> r = {
      {"thm2.3", suite_general, 200},
      {"thm2.4", suite_alpha, 400},
      {"thm2.9", suite_ratio, 600},
      {"thm2.15", suite_difference, 200},
      {"cor-g", suite_special_difference, 300},
      {"sobolev", suite_sobolev, 200},
      {"sobolev-mean", suite_sobolev_mean, 200},
      {"kantorovich", suite_kantorovich, 100},
  };
  return r;
}

const SuiteEntry& find_suite(const std::string& name) {
  for (const auto& e : registry())
    if (name == e.name) return e;
  throw InputError("unknown suite '" + name + "'");
}

void merge_metric(std::map<std::string, double>& into, const std::string& key, double v) {
  auto [it, fresh] = into.emplace(key, v);
  if (fresh) return;
  if (key.starts_with("max_")) {
    it->second = std::max(it->second, v);
  } else if (key.starts_with("min_")) {
    it->second = std::min(it->second, v);
  } else {
    it->second += v;
  }
}

}  // namespace

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& e : registry()) v.emplace_back(e.name);
    return v;
  }();
  return names;
}

bool is_suite(const std::string& name) {
  return std::find(suite_names().begin(), suite_names().end(), name) != suite_names().end();
}

std::size_t default_trials(const std::string& suite) { return find_suite(suite).trials; }

TrialRecord run_trial(const std::string& suite, std::uint64_t base_seed, std::size_t index,
                      double tol, std::map<std::string, double>* metrics) {
  const SuiteEntry& entry = find_suite(suite);
  std::map<std::string, double> local;
  TrialRecord rec;
  rec.index = index;
  rec.seed = derive_seed(base_seed, index);
  rec.margin = rec.relative_margin = std::numeric_limits<double>::quiet_NaN();
  Trial t{tol, rec, metrics ? *metrics : local, {}};
  t.count("exceptions", 0.0);
  Rng rng(rec.seed);
  try {
    entry.fn(t, rng, index);
  } catch (const std::exception& e) {
    t.count("exceptions");
    t.fail(std::string("exception: ") + e.what());
  }
  rec.pass = t.problems.empty();
  for (std::size_t i = 0; i < t.problems.size(); ++i) {
    rec.message += (i ? "; " : "") + t.problems[i];
  }
  return rec;
}

unsigned thread_count_from_env() {
  const char* v = std::getenv("OPINEQ_THREADS");
  if (!v) return 1;
  char* end = nullptr;
  const long n = std::strtol(v, &end, 10);
  if (end == v || *end != '\0' || n < 1) return 1;
  return unsigned(std::min(n, 256L));
}

SuiteReport run_suite(const std::string& suite, std::size_t trials, std::uint64_t base_seed,
                      double tol, unsigned threads) {
  find_suite(suite);
  const auto start = std::chrono::steady_clock::now();

  std::vector<TrialRecord> records(trials);
  std::vector<std::map<std::string, double>> metrics(trials);
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < trials;) {
      records[i] = run_trial(suite, base_seed, i, tol, &metrics[i]);
    }
  };
  const unsigned workers =
      std::max(1u, unsigned(std::min<std::size_t>(threads, std::max<std::size_t>(trials, 1))));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  SuiteReport r;
  r.suite = suite;
  r.seed = base_seed;
  r.tolerance = tol;
  r.trials = trials;
  double worst = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < trials; ++i) {
    for (const auto& [k, v] : metrics[i]) merge_metric(r.metrics, k, v);
    const auto& rec = records[i];
    if (rec.pass) {
      ++r.passes;
    } else {
      ++r.fails;
      r.failure_seeds.push_back(rec.seed);
    }
    if (std::isfinite(rec.relative_margin)) worst = std::min(worst, rec.relative_margin);
  }
  r.worst_relative_margin = trials == 0 ? 0.0 : worst;
  for (auto it = r.metrics.begin(); it != r.metrics.end();) {
    if (it->first.starts_with("min_margin/")) {
      r.worst_by_theorem[it->first.substr(11)] = it->second;
      it = r.metrics.erase(it);
    } else {
      ++it;
    }
  }
  r.records = std::move(records);
  r.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

}  // namespace opineq
