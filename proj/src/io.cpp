#include "jetstress/io.hpp"

#include <sstream>

namespace jetstress {

namespace {

const Json& member(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw ParseError(std::string("missing field \"") + key + "\"");
  return j.at(key);
}

int as_int(const Json& j, const char* what) {
  if (!j.is_number_integer()) throw ParseError(std::string(what) + " must be an integer");
  return j.get<int>();
}

double as_double(const Json& j, const char* what) {
  if (!j.is_number()) throw ParseError(std::string(what) + " must be a number");
  return j.get<double>();
}

Eigen::VectorXd vector_from_json(const Json& j, const char* what) {
  if (!j.is_array()) throw ParseError(std::string(what) + " must be an array of numbers");
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = as_double(j[i], what);
  return v;
}

Json vector_to_json(const Eigen::VectorXd& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

std::vector<Expr> exprs_from_json(const Json& j) {
  if (!j.is_array()) throw ParseError("expected a list of expressions");
  std::vector<Expr> out;
  for (const auto& e : j) out.push_back(expr_from_json(e));
  return out;
}

Expr::Op op_from_string(const std::string& s) {
  static const std::pair<const char*, Expr::Op> table[] = {
      {"add", Expr::Op::add}, {"sub", Expr::Op::sub}, {"mul", Expr::Op::mul}, {"neg", Expr::Op::neg},
      {"pow", Expr::Op::pow}, {"sin", Expr::Op::sin}, {"cos", Expr::Op::cos}, {"exp", Expr::Op::exp},
      {"compose", Expr::Op::compose}};
  for (const auto& [name, op] : table) {
    if (s == name) return op;
  }
  throw ParseError("unknown expression op \"" + s + "\"");
}

}  // namespace

// --- expressions -----------------------------------------------------------

Json to_json(const Expr& e) {
  switch (e.op()) {
    case Expr::Op::constant:
      return Json{{"const", e.value()}};
    case Expr::Op::variable:
      return Json{{"var", e.index() + 1}};
    case Expr::Op::compose: {
      Json inner = Json::array();
      for (const auto& a : e.args()) inner.push_back(to_json(a));
      return Json{{"op", "compose"}, {"outer", to_json(e.outer())}, {"inner", inner}};
    }
    default: {
      Json args = Json::array();
      for (const auto& a : e.args()) args.push_back(to_json(a));
      Json out{{"op", to_string(e.op())}, {"args", args}};
      if (e.op() == Expr::Op::pow) out["exponent"] = e.exponent();
      return out;
    }
  }
}

Expr expr_from_json(const Json& j) {
  if (j.is_number()) return Expr::constant(j.get<double>());
  if (!j.is_object()) throw ParseError("expression must be a number or an object");
  if (j.contains("const")) return Expr::constant(as_double(j.at("const"), "const"));
  if (j.contains("var")) {
    const int v = as_int(j.at("var"), "var");
    if (v < 1) throw ParseError("variables are numbered from 1");
    return Expr::variable(v - 1);
  }
  const Json& op_json = member(j, "op");
  if (!op_json.is_string()) throw ParseError("op must be a string");
  const auto op = op_from_string(op_json.get<std::string>());
  if (op == Expr::Op::compose) {
    return Expr::compose(expr_from_json(member(j, "outer")), exprs_from_json(member(j, "inner")));
  }
  auto args = exprs_from_json(member(j, "args"));
  const auto need = [&](std::size_t count) {
    if (args.size() != count) {
      throw ParseError("op \"" + op_json.get<std::string>() + "\" takes " + std::to_string(count) + " argument(s)");
    }
  };
  switch (op) {
    case Expr::Op::add:
      if (args.empty()) throw ParseError("add needs arguments");
      return Expr::sum(std::move(args));
    case Expr::Op::mul:
      if (args.empty()) throw ParseError("mul needs arguments");
      return Expr::product(std::move(args));
    case Expr::Op::sub:
      need(2);
      return args[0] - args[1];
    case Expr::Op::neg:
      need(1);
      return -args[0];
    case Expr::Op::pow:
      need(1);
      return Expr::pow(args[0], as_double(member(j, "exponent"), "exponent"));
    case Expr::Op::sin:
      need(1);
      return Expr::sin(args[0]);
    case Expr::Op::cos:
      need(1);
      return Expr::cos(args[0]);
    case Expr::Op::exp:
      need(1);
      return Expr::exp(args[0]);
    default:
      throw ParseError("unsupported op");
  }
}

// --- arrays ----------------------------------------------------------------

Json to_json(const MultiIndex& index) { return Json(index.counts()); }

MultiIndex multiindex_from_json(const Json& j, int n) {
  if (!j.is_array() || static_cast<int>(j.size()) != n) {
    throw ParseError("multi-index must be a count vector of length " + std::to_string(n));
  }
  std::vector<int> counts;
  for (const auto& c : j) {
    const int v = as_int(c, "multi-index count");
    if (v < 0) throw ParseError("multi-index counts must be non-negative");
    counts.push_back(v);
  }
  return MultiIndex(counts);
}

Json to_json(const SymArray& a) {
  Json entries = Json::array();
  const auto indices = enumerate(a.n, a.l);
  for (std::size_t r = 0; r < indices.size(); ++r) {
    entries.push_back(Json{{"index", to_json(indices[r])}, {"value", a.values(static_cast<Eigen::Index>(r))}});
  }
  return Json{{"convention", to_string(a.convention)}, {"n", a.n}, {"l", a.l}, {"entries", entries}};
}

SymArray symarray_from_json(const Json& j) {
  const int n = as_int(member(j, "n"), "n");
  const int l = as_int(member(j, "l"), "l");
  const Json& conv = member(j, "convention");
  Convention c;
  if (conv == "dual") {
    c = Convention::dual;
  } else if (conv == "derivative") {
    c = Convention::derivative;
  } else {
    throw ParseError("convention must be \"dual\" or \"derivative\"");
  }
  if (n < 1 || l < 0) throw ParseError("bad array shape");
  SymArray a(n, l, c);
  for (const auto& e : member(j, "entries")) {
    const auto index = multiindex_from_json(member(e, "index"), n);
    if (degree(index) != l) throw ParseError("entry index has the wrong degree");
    a(index) = as_double(member(e, "value"), "value");
  }
  return a;
}

// --- fields ----------------------------------------------------------------

const char* to_string(FieldKind kind) {
  switch (kind) {
    case FieldKind::variational: return "variational";
    case FieldKind::traction: return "traction";
    case FieldKind::nonholonomic: return "nonholonomic";
    case FieldKind::bodyforce: return "bodyforce";
  }
  return "?";
}

FieldKind field_kind_from_string(const std::string& s) {
  for (auto kind : {FieldKind::variational, FieldKind::traction, FieldKind::nonholonomic, FieldKind::bodyforce}) {
    if (s == to_string(kind)) return kind;
  }
  throw ParseError("unknown field kind \"" + s + "\"");
}

int component_count(FieldKind kind, int n, int m, int k) {
  switch (kind) {
    case FieldKind::variational: return VariationalStress(n, m, k).components();
    case FieldKind::traction: return TractionStress(n, m, k).components();
    case FieldKind::nonholonomic: return NonHolStress(n, m, k).components();
    case FieldKind::bodyforce: return BodyForce(n, m, k).components();
  }
  return 0;
}

namespace {

std::string counts_key(const MultiIndex& index) {
  std::ostringstream os;
  os << '[';
  for (int r = 0; r < index.dimension(); ++r) os << (r ? "," : "") << index[r];
  os << ']';
  return os.str();
}

// (alpha, rank, j) of a flat traction-layout slot.
struct TractionSlot {
  int alpha, rank, j;
};
TractionSlot traction_slot(int flat, int n, int width) {
  return {flat / (width * n), (flat / n) % width, flat % n};
}

}  // namespace

std::string component_key(FieldKind kind, int n, int m, int k, int flat) {
  if (flat < 0 || flat >= component_count(kind, n, m, k)) throw std::out_of_range("component_key");
  const auto alpha_key = [](int a) { return "a" + std::to_string(a + 1); };
  switch (kind) {
    case FieldKind::variational:
    case FieldKind::bodyforce: {
      const int order = kind == FieldKind::variational ? k : k - 1;
      const int width = graded_dimension(n, order);
      const auto index = enumerate_up_to(n, order)[static_cast<std::size_t>(flat % width)];
      return alpha_key(flat / width) + ":I" + counts_key(index);
    }
    case FieldKind::traction: {
      const int width = graded_dimension(n, k - 1);
      const auto s = traction_slot(flat, n, width);
      return alpha_key(s.alpha) + ":J" + counts_key(enumerate_up_to(n, k - 1)[static_cast<std::size_t>(s.rank)]) +
             ":j" + std::to_string(s.j + 1);
    }
    case FieldKind::nonholonomic: {
      const int width = graded_dimension(n, k - 1);
      const auto heads = enumerate_up_to(n, k - 1);
      if (flat < m * width) {
        return alpha_key(flat / width) + ":P:J" + counts_key(heads[static_cast<std::size_t>(flat % width)]);
      }
      const auto s = traction_slot(flat - m * width, n, width);
      return alpha_key(s.alpha) + ":Pbar:J" + counts_key(heads[static_cast<std::size_t>(s.rank)]) + ":j" +
             std::to_string(s.j + 1);
    }
  }
  return {};
}

FieldSpec field_from_json(const Json& j) {
  FieldSpec f;
  const Json& kind = member(j, "kind");
  if (!kind.is_string()) throw ParseError("kind must be a string");
  f.kind = field_kind_from_string(kind.get<std::string>());
  f.n = as_int(member(j, "n"), "n");
  f.m = as_int(member(j, "m"), "m");
  f.k = as_int(member(j, "k"), "k");
  if (f.n < 1 || f.m < 1 || f.k < 0 || (f.kind != FieldKind::variational && f.k < 1)) {
    throw ParseError("field dimensions out of range");
  }
  const int count = component_count(f.kind, f.n, f.m, f.k);
  std::vector<Expr> exprs(static_cast<std::size_t>(count), Expr::constant(0.0));
  std::vector<bool> seen(static_cast<std::size_t>(count), false);
  const int n = f.n;
  const Json& components = member(j, "components");
  if (!components.is_array()) throw ParseError("components must be an array");
  for (const auto& c : components) {
    const int alpha = as_int(member(c, "alpha"), "alpha") - 1;
    if (alpha < 0 || alpha >= f.m) throw ParseError("alpha out of range");
    const auto index = multiindex_from_json(member(c, "index"), n);
    int flat = 0;
    const auto read_j = [&] {
      const int jj = as_int(member(c, "j"), "j") - 1;
      if (jj < 0 || jj >= n) throw ParseError("j out of range");
      return jj;
    };
    switch (f.kind) {
      case FieldKind::variational:
      case FieldKind::bodyforce: {
        const int order = f.kind == FieldKind::variational ? f.k : f.k - 1;
        if (degree(index) > order) throw ParseError("component degree exceeds the field order");
        flat = alpha * graded_dimension(n, order) + graded_rank(index);
        break;
      }
      case FieldKind::traction: {
        if (degree(index) > f.k - 1) throw ParseError("traction index degree exceeds k - 1");
        flat = (alpha * graded_dimension(n, f.k - 1) + graded_rank(index)) * n + read_j();
        break;
      }
      case FieldKind::nonholonomic: {
        if (degree(index) > f.k - 1) throw ParseError("non-holonomic index degree exceeds k - 1");
        const int width = graded_dimension(n, f.k - 1);
        const Json& slot = member(c, "slot");
        if (slot == "P") {
          flat = alpha * width + graded_rank(index);
        } else if (slot == "Pbar") {
          flat = f.m * width + (alpha * width + graded_rank(index)) * n + read_j();
        } else {
          throw ParseError("slot must be \"P\" or \"Pbar\"");
        }
        break;
      }
    }
    if (seen[static_cast<std::size_t>(flat)]) throw ParseError("component given twice");
    seen[static_cast<std::size_t>(flat)] = true;
    auto e = expr_from_json(member(c, "expr"));
    if (e.arity() > n) throw ParseError("component expression reads a variable beyond n");
    exprs[static_cast<std::size_t>(flat)] = std::move(e);
  }
  f.map = SmoothMap::from_expressions(n, std::move(exprs));
  return f;
}

Json to_json(const FieldSpec& field) {
  const auto& exprs = field.map.expressions();
  if (!exprs) throw std::invalid_argument("to_json: field map has no expression form");
  const int n = field.n;
  Json components = Json::array();
  for (int flat = 0; flat < static_cast<int>(exprs->size()); ++flat) {
    const auto& e = (*exprs)[static_cast<std::size_t>(flat)];
    if (e.op() == Expr::Op::constant && e.value() == 0.0) continue;
    Json c;
    switch (field.kind) {
      case FieldKind::variational:
      case FieldKind::bodyforce: {
        const int order = field.kind == FieldKind::variational ? field.k : field.k - 1;
        const int width = graded_dimension(n, order);
        c["alpha"] = flat / width + 1;
        c["index"] = to_json(enumerate_up_to(n, order)[static_cast<std::size_t>(flat % width)]);
        break;
      }
      case FieldKind::traction: {
        const int width = graded_dimension(n, field.k - 1);
        const auto s = traction_slot(flat, n, width);
        c["alpha"] = s.alpha + 1;
        c["index"] = to_json(enumerate_up_to(n, field.k - 1)[static_cast<std::size_t>(s.rank)]);
        c["j"] = s.j + 1;
        break;
      }
      case FieldKind::nonholonomic: {
        const int width = graded_dimension(n, field.k - 1);
        const auto heads = enumerate_up_to(n, field.k - 1);
        if (flat < field.m * width) {
          c["alpha"] = flat / width + 1;
          c["slot"] = "P";
          c["index"] = to_json(heads[static_cast<std::size_t>(flat % width)]);
        } else {
          const auto s = traction_slot(flat - field.m * width, n, width);
          c["alpha"] = s.alpha + 1;
          c["slot"] = "Pbar";
          c["index"] = to_json(heads[static_cast<std::size_t>(s.rank)]);
          c["j"] = s.j + 1;
        }
        break;
      }
    }
    c["expr"] = to_json(e);
    components.push_back(std::move(c));
  }
  return Json{{"kind", to_string(field.kind)}, {"n", n}, {"m", field.m}, {"k", field.k}, {"components", components}};
}

VarStressField FieldSpec::variational() const {
  if (kind != FieldKind::variational) throw ParseError("expected a variational stress field");
  return VarStressField(n, m, k, map);
}

TractionField FieldSpec::traction() const {
  if (kind != FieldKind::traction) throw ParseError("expected a traction stress field");
  return TractionField(n, m, k, map);
}

NonHolStressField FieldSpec::nonholonomic() const {
  if (kind != FieldKind::nonholonomic) throw ParseError("expected a non-holonomic stress field");
  return NonHolStressField(n, m, k, map);
}

BodyForceField FieldSpec::bodyforce() const {
  if (kind != FieldKind::bodyforce) throw ParseError("expected a body force field");
  return BodyForceField(n, m, k, map);
}

// --- charts and regions ----------------------------------------------------

SmoothMap map_from_json(const Json& j, int n) {
  auto exprs = exprs_from_json(j);
  for (const auto& e : exprs) {
    if (e.arity() > n) throw ParseError("expression reads a variable beyond n");
  }
  return SmoothMap::from_expressions(n, std::move(exprs));
}

ChartMap chart_from_json(const Json& j) {
  const Json& fwd = member(j, "forward");
  if (!fwd.is_array() || fwd.empty()) throw ParseError("chart forward must be a non-empty list");
  const int n = static_cast<int>(fwd.size());
  const Json& inv = member(j, "inverse");
  if (!inv.is_array() || static_cast<int>(inv.size()) != n) throw ParseError("chart inverse must have n entries");
  const Json& box = member(j, "box");
  if (!box.is_array() || static_cast<int>(box.size()) != n) throw ParseError("chart box must have n intervals");
  Box b{Eigen::VectorXd(n), Eigen::VectorXd(n)};
  for (int i = 0; i < n; ++i) {
    const auto iv = vector_from_json(box[static_cast<std::size_t>(i)], "box interval");
    if (iv.size() != 2 || !(iv(1) > iv(0))) throw ParseError("box interval must be [lo, hi] with lo < hi");
    b.lo(i) = iv(0);
    b.hi(i) = iv(1);
  }
  try {
    return ChartMap(map_from_json(fwd, n), map_from_json(inv, n), std::move(b));
  } catch (const std::invalid_argument& e) {
    throw ParseError(e.what());
  }
}

Json to_json(const ChartMap& chart) {
  const auto& f = chart.forward().expressions();
  const auto& i = chart.inverse().expressions();
  if (!f || !i) throw std::invalid_argument("to_json: chart maps have no expression form");
  Json fwd = Json::array(), inv = Json::array(), box = Json::array();
  for (const auto& e : *f) fwd.push_back(to_json(e));
  for (const auto& e : *i) inv.push_back(to_json(e));
  for (int r = 0; r < chart.dimension(); ++r) box.push_back(Json::array({chart.box().lo(r), chart.box().hi(r)}));
  return Json{{"forward", fwd}, {"inverse", inv}, {"box", box}};
}

BundleTransition transition_from_json(const Json& j, int n) {
  if (!j.is_array() || j.empty()) throw ParseError("transition must be a square matrix of expressions");
  const int m = static_cast<int>(j.size());
  std::vector<Expr> entries;
  for (const auto& row : j) {
    if (!row.is_array() || static_cast<int>(row.size()) != m) throw ParseError("transition must be square");
    for (const auto& e : row) entries.push_back(expr_from_json(e));
  }
  for (const auto& e : entries) {
    if (e.arity() > n) throw ParseError("transition entry reads a variable beyond n");
  }
  return BundleTransition(m, SmoothMap::from_expressions(n, std::move(entries)));
}

Region region_from_json(const Json& j) {
  const Json& kind = member(j, "kind");
  try {
    Region r;
    if (kind == "box") {
      r = Region::box(vector_from_json(member(j, "lo"), "lo"), vector_from_json(member(j, "hi"), "hi"));
    } else if (kind == "simplex") {
      std::vector<Eigen::VectorXd> v;
      for (const auto& p : member(j, "vertices")) v.push_back(vector_from_json(p, "vertex"));
      r = Region::simplex(std::move(v));
    } else {
      throw ParseError("region kind must be \"box\" or \"simplex\"");
    }
    if (j.contains("orientation")) {
      const int o = as_int(j.at("orientation"), "orientation");
      if (o != 1 && o != -1) throw ParseError("orientation must be 1 or -1");
      r.orientation = o;
    }
    return r;
  } catch (const std::invalid_argument& e) {
    throw ParseError(e.what());
  }
}

Json to_json(const Region& region) {
  Json out;
  if (region.shape == Shape::box) {
    out = Json{{"kind", "box"}, {"lo", vector_to_json(region.lo)}, {"hi", vector_to_json(region.hi)}};
  } else {
    Json v = Json::array();
    for (const auto& p : region.vertices) v.push_back(vector_to_json(p));
    out = Json{{"kind", "simplex"}, {"vertices", v}};
  }
  if (region.orientation != 1) out["orientation"] = region.orientation;
  return out;
}

}  // namespace jetstress
