#pragma once

#include <nlohmann/json.hpp>
#include <stdexcept>
#include <string>

#include "jetstress/chart.hpp"
#include "jetstress/expr.hpp"
#include "jetstress/measure.hpp"
#include "jetstress/stress.hpp"
#include "jetstress/symalg.hpp"

namespace jetstress {

using Json = nlohmann::json;

/// Malformed or inconsistent input documents.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Expression grammar (variables and fiber indices are 1-based in documents):
//   number                                 constant
//   {"const": c}                           constant
//   {"var": i}                             coordinate x^i
//   {"op": "add"|"mul", "args": [e...]}
//   {"op": "sub", "args": [a, b]}
//   {"op": "neg"|"sin"|"cos"|"exp", "args": [e]}
//   {"op": "pow", "args": [e], "exponent": p}
//   {"op": "compose", "outer": e, "inner": [e...]}
Json to_json(const Expr& e);
Expr expr_from_json(const Json& j);

Json to_json(const MultiIndex& index);
MultiIndex multiindex_from_json(const Json& j, int n);

/// {convention, n, l, entries: [{index: [counts], value}]} in enumeration order.
Json to_json(const SymArray& a);
SymArray symarray_from_json(const Json& j);

enum class FieldKind { variational, traction, nonholonomic, bodyforce };
const char* to_string(FieldKind kind);
FieldKind field_kind_from_string(const std::string& s);

/// A stress-like field read from a document:
/// {n, m, k, kind, components: [{alpha, index, j?, slot?, expr}]}.
/// `j` (1-based) is required for traction components and for the "Pbar" slot
/// of non-holonomic stresses; `slot` is "P" or "Pbar". Absent components are 0.
struct FieldSpec {
  FieldKind kind = FieldKind::variational;
  int n = 1, m = 1, k = 1;
  SmoothMap map;

  VarStressField variational() const;
  TractionField traction() const;
  NonHolStressField nonholonomic() const;
  BodyForceField bodyforce() const;
};
FieldSpec field_from_json(const Json& j);
/// Requires a map built from expressions.
Json to_json(const FieldSpec& field);

/// Key of a flattened component in the field layout of `kind`, such as
/// "a1:I[1,0]", "a1:J[1,0]:j2" or "a1:P:J[0,0]".
std::string component_key(FieldKind kind, int n, int m, int k, int flat_index);
int component_count(FieldKind kind, int n, int m, int k);

/// {forward: [expr...], inverse: [expr...], box: [[lo, hi]...]}
ChartMap chart_from_json(const Json& j);
Json to_json(const ChartMap& chart);
/// Matrix of expressions [[A11, A12...], ...].
BundleTransition transition_from_json(const Json& j, int n);

/// {kind: "box", lo, hi} or {kind: "simplex", vertices}
Region region_from_json(const Json& j);
Json to_json(const Region& region);

/// Section / map given as a list of expressions.
SmoothMap map_from_json(const Json& j, int n);

}  // namespace jetstress
