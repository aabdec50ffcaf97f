#pragma once

// JSON forms of the library types. Complex matrices are row-major nested
// arrays of [re, im] pairs; top-level documents carry "opineq-schema": 1.

#include <json.hpp>

#include "opineq/bounds.hpp"
#include "opineq/sobolev.hpp"

namespace opineq {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

Json to_json(const ComplexMatrix<double>& m);
ComplexMatrix<double> matrix_from_json(const Json& j);

Json to_json(const HermitianOperator& a);
HermitianOperator hermitian_from_json(const Json& j);

Json to_json(const ScalarFunc1D& u);
ScalarFunc1D scalar_func_from_json(const Json& j);

Json to_json(const MultiFunc& f);
MultiFunc multi_func_from_json(const Json& j);

Json to_json(const BoxDomain& box);
BoxDomain box_from_json(const Json& j);

Json to_json(const AffineEnvelope& env);
AffineEnvelope envelope_from_json(const Json& j);

Json to_json(const PositiveLinearMap& phi);
PositiveLinearMap map_from_json(const Json& j);

Json to_json(const InequalityInstance& inst);
InequalityInstance instance_from_json(const Json& j);

Json to_json(const LoewnerVerdict& v);
/// Report summary; operators are included only when `with_operators`.
Json to_json(const BoundReport& r, bool with_operators = false);
Json to_json(const SobolevConstants& c);

/// Throws InputError unless j["opineq-schema"] == kSchemaVersion.
void check_schema(const Json& j);

}  // namespace opineq
