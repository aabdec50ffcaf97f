#include "opineq/serialize.hpp"

#include <sstream>

namespace opineq {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

const Json& field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) {
    throw InputError(std::string("missing field '") + key + "'");
  }
  return j.at(key);
}

double number(const Json& j, const char* key) {
  const Json& v = field(j, key);
  if (!v.is_number()) throw InputError(std::string("field '") + key + "' must be a number");
  return v.get<double>();
}

double number_or(const Json& j, const char* key, double fallback) {
  return j.contains(key) ? number(j, key) : fallback;
}

std::vector<double> numbers(const Json& j, const char* key) {
  const Json& v = field(j, key);
  if (!v.is_array()) throw InputError(std::string("field '") + key + "' must be an array");
  std::vector<double> out;
  for (const auto& x : v) {
    if (!x.is_number()) throw InputError(std::string("field '") + key + "' must hold numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

std::string text(const Json& j, const char* key) {
  const Json& v = field(j, key);
  if (!v.is_string()) throw InputError(std::string("field '") + key + "' must be a string");
  return v.get<std::string>();
}

}  // namespace

void check_schema(const Json& j) {
  if (!j.is_object() || !j.contains("opineq-schema") || j["opineq-schema"] != kSchemaVersion) {
    throw InputError("document lacks \"opineq-schema\": 1");
  }
}

Json to_json(const ComplexMatrix<double>& m) {
  Json rows = Json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Index k = 0; k < m.cols(); ++k) row.push_back({m(i, k).real(), m(i, k).imag()});
    rows.push_back(std::move(row));
  }
  return rows;
}

ComplexMatrix<double> matrix_from_json(const Json& j) {
  if (!j.is_array() || j.empty() || !j[0].is_array()) {
    throw InputError("matrix must be a nonempty array of rows");
  }
  const auto rows = Index(j.size()), cols = Index(j[0].size());
  ComplexMatrix<double> m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    const Json& row = j[std::size_t(i)];
    if (!row.is_array() || Index(row.size()) != cols) throw InputError("matrix rows differ in length");
    for (Index k = 0; k < cols; ++k) {
      const Json& e = row[std::size_t(k)];
      if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number()) {
        throw InputError("matrix entries must be [re, im] pairs");
      }
      m(i, k) = {e[0].get<double>(), e[1].get<double>()};
    }
  }
  return m;
}

Json to_json(const HermitianOperator& a) { return to_json(a.matrix()); }

HermitianOperator hermitian_from_json(const Json& j) { return HermitianOperator(matrix_from_json(j)); }

Json to_json(const ScalarFunc1D& u) {
  return std::visit(
      overloaded{
          [](const func::Polynomial& p) { return Json{{"kind", "polynomial"}, {"coeffs", p.coeffs}}; },
          [](const func::Power& p) {
            return Json{{"kind", "power"}, {"exponent", p.exponent}, {"coef", p.coef}};
          },
          [](const func::Log& p) { return Json{{"kind", "log"}, {"coef", p.coef}}; },
          [](const func::Exp& p) { return Json{{"kind", "exp"}, {"coef", p.coef}}; },
          [](const func::Affine& p) {
            return Json{{"kind", "affine"}, {"slope", p.slope}, {"intercept", p.intercept}};
          },
          [](const func::Reciprocal& p) { return Json{{"kind", "reciprocal"}, {"coef", p.coef}}; },
          [](const func::AbsPower& p) {
            return Json{{"kind", "abs_power"},
                        {"inner", to_json(*p.inner)},
                        {"exponent", p.exponent},
                        {"offset", p.offset},
                        {"coef", p.coef}};
          },
      },
      u.form());
}

ScalarFunc1D scalar_func_from_json(const Json& j) {
  const std::string kind = text(j, "kind");
  if (kind == "polynomial") {
    auto c = numbers(j, "coeffs");
    if (c.empty()) throw InputError("polynomial needs at least one coefficient");
    return ScalarFunc1D::polynomial(std::move(c));
  }
  if (kind == "constant") return ScalarFunc1D::constant(number(j, "value"));
  if (kind == "identity") return ScalarFunc1D::identity();
  if (kind == "power") return ScalarFunc1D::power(number(j, "exponent"), number_or(j, "coef", 1.0));
  if (kind == "log") return ScalarFunc1D::log(number_or(j, "coef", 1.0));
  if (kind == "exp") return ScalarFunc1D::exp(number_or(j, "coef", 1.0));
  if (kind == "affine") return ScalarFunc1D::affine(number(j, "slope"), number(j, "intercept"));
  if (kind == "reciprocal") return ScalarFunc1D::reciprocal(number_or(j, "coef", 1.0));
  if (kind == "abs_power") {
    return ScalarFunc1D::abs_power(scalar_func_from_json(field(j, "inner")), number(j, "exponent"),
                                   number_or(j, "offset", 0.0), number_or(j, "coef", 1.0));
  }
  throw InputError("unknown scalar function kind '" + kind + "'");
}

Json to_json(const MultiFunc& f) {
  if (f.is_separable()) {
    Json terms = Json::array();
    for (const auto& t : f.separable().terms) terms.push_back(to_json(t));
    return Json{{"form", "separable"}, {"terms", std::move(terms)}};
  }
  return Json{{"form", "composite"},
              {"beta", f.composite().beta},
              {"outer", to_json(f.composite().outer)}};
}

MultiFunc multi_func_from_json(const Json& j) {
  const std::string form = text(j, "form");
  if (form == "separable") {
    const Json& terms = field(j, "terms");
    if (!terms.is_array()) throw InputError("field 'terms' must be an array");
    Separable s;
    for (const auto& t : terms) s.terms.push_back(scalar_func_from_json(t));
    return s;
  }
  if (form == "composite") {
    return CompositeAffine{numbers(j, "beta"), scalar_func_from_json(field(j, "outer"))};
  }
  throw InputError("unknown function form '" + form + "'");
}

Json to_json(const BoxDomain& box) {
  Json out = Json::array();
  for (const auto& iv : box.axes()) out.push_back({iv.lo, iv.hi});
  return out;
}

BoxDomain box_from_json(const Json& j) {
  if (!j.is_array()) throw InputError("box must be an array of [lo, hi] pairs");
  std::vector<Interval> axes;
  for (const auto& iv : j) {
    if (!iv.is_array() || iv.size() != 2 || !iv[0].is_number() || !iv[1].is_number()) {
      throw InputError("box entries must be [lo, hi] pairs");
    }
    axes.push_back({iv[0].get<double>(), iv[1].get<double>()});
  }
  return BoxDomain(std::move(axes));
}

Json to_json(const AffineEnvelope& env) {
  return Json{{"a", env.a}, {"b", env.b}, {"c", env.c}, {"d", env.d}};
}

AffineEnvelope envelope_from_json(const Json& j) {
  return {numbers(j, "a"), number(j, "b"), numbers(j, "c"), number(j, "d")};
}

Json to_json(const PositiveLinearMap& phi) {
  Json kraus = Json::array();
  for (const auto& v : phi.kraus()) kraus.push_back(to_json(v));
  return Json{{"kraus", std::move(kraus)}};
}

PositiveLinearMap map_from_json(const Json& j) {
  const Json& kraus = field(j, "kraus");
  if (!kraus.is_array()) throw InputError("field 'kraus' must be an array");
  std::vector<ComplexMatrix<double>> v;
  for (const auto& k : kraus) v.push_back(matrix_from_json(k));
  return PositiveLinearMap::validated(std::move(v));
}

Json to_json(const InequalityInstance& inst) {
  Json axes = Json::array();
  for (const auto& axis : inst.axes) {
    Json ops = Json::array();
    for (const auto& a : axis) ops.push_back(to_json(a));
    axes.push_back(std::move(ops));
  }
  Json maps = Json::array();
  for (const auto& m : inst.grid.maps()) maps.push_back(to_json(m));
  return Json{{"opineq-schema", kSchemaVersion},
              {"box", to_json(inst.box)},
              {"axes", std::move(axes)},
              {"weights", inst.weights.vectors()},
              {"shape", inst.grid.shape()},
              {"maps", std::move(maps)},
              {"f", to_json(inst.f)},
              {"g", to_json(inst.g)},
              {"envelope", to_json(inst.envelope)}};
}

InequalityInstance instance_from_json(const Json& j) {
  check_schema(j);
  InequalityInstance inst;
  inst.box = box_from_json(field(j, "box"));
  const Json& axes = field(j, "axes");
  if (!axes.is_array()) throw InputError("field 'axes' must be an array");
  for (const auto& axis : axes) {
    std::vector<HermitianOperator> ops;
    for (const auto& a : axis) ops.push_back(hermitian_from_json(a));
    inst.axes.push_back(std::move(ops));
  }
  std::vector<std::vector<double>> w;
  for (const auto& v : field(j, "weights")) w.push_back(v.get<std::vector<double>>());
  inst.weights = WeightFamily(std::move(w));
  std::vector<PositiveLinearMap> maps;
  for (const auto& m : field(j, "maps")) maps.push_back(map_from_json(m));
  inst.grid = MapGrid(field(j, "shape").get<std::vector<std::size_t>>(), std::move(maps));
  inst.f = multi_func_from_json(field(j, "f"));
  inst.g = multi_func_from_json(field(j, "g"));
  inst.envelope = envelope_from_json(field(j, "envelope"));
  return inst;
}

Json to_json(const LoewnerVerdict& v) {
  return Json{{"holds", v.holds}, {"margin", v.margin}, {"tolerance", v.tolerance}};
}

Json to_json(const BoundReport& r, bool with_operators) {
  Json out{{"theorem", r.theorem},
           {"side", to_string(r.side)},
           {"scalar_constant", r.scalar_constant},
           {"argpoint", r.argpoint},
           {"verdict", to_json(r.verdict)},
           {"admissible", r.admissible}};
  if (with_operators) {
    out["lhs"] = to_json(r.lhs);
    out["rhs"] = to_json(r.rhs);
  }
  return out;
}

Json to_json(const SobolevConstants& c) {
  return Json{{"C1", c.C1},     {"C2", c.C2}, {"C3", c.C3},
              {"C3_prime", c.C3_prime}, {"C4", c.C4}, {"C4_prime", c.C4_prime},
              {"K", c.K},       {"C4_stated", c.C4_stated}};
}

}  // namespace opineq
