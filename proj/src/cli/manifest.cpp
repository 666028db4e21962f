#include "liouville/cli/manifest.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "liouville/errors.hpp"
#include "liouville/geometry/catalog.hpp"
#include "liouville/symbolic/parser.hpp"

namespace liouville::cli {

using json = nlohmann::ordered_json;

namespace {

struct TaskKindName {
  TaskKind kind;
  const char* name;
};

constexpr TaskKindName kTaskKinds[] = {
    {TaskKind::ClassifyField, "classify-field"},
    {TaskKind::CheckSoliton, "check-soliton"},
    {TaskKind::CheckJacobi, "check-jacobi"},
    {TaskKind::CheckIdentityConformal, "check-identity:conformal"},
    {TaskKind::CheckIdentitySoliton, "check-identity:soliton"},
    {TaskKind::CheckIdentityBiharmonic, "check-identity:biharmonic"},
    {TaskKind::Hypersurface, "hypersurface"},
    {TaskKind::Tension, "tension"},
    {TaskKind::Bitension, "bitension"},
    {TaskKind::Flow, "flow"},
    {TaskKind::IndexForm, "index-form"},
    {TaskKind::RicciPinch, "ricci-pinch"},
    {TaskKind::Commutator, "commutator"},
};

std::pair<int, int> line_column(const std::string& text, std::size_t offset) {
  int line = 1, column = 1;
  for (std::size_t i = 0; i < offset && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return {line, column};
}

class Loader {
 public:
  explicit Loader(const std::string& text) : text_(text) {}

  Manifest load() {
    json doc;
    try {
      doc = json::parse(text_);
    } catch (const json::parse_error& e) {
      const auto [line, column] = line_column(text_, e.byte > 0 ? e.byte - 1 : 0);
      std::string what = e.what();
      const auto colon = what.find("syntax error");
      throw ParseError("manifest is not valid JSON: " + (colon == std::string::npos ? what : what.substr(colon)), line,
                       column);
    }
    if (!doc.is_object()) throw ValidationError("manifest must be a JSON object", "manifest");
    for (const auto& [key, value] : doc.items()) {
      static const std::set<std::string> known = {"manifolds", "fields", "maps", "hypersurfaces", "tasks"};
      if (!known.contains(key)) throw ValidationError("unknown manifest section \"" + key + "\"", key);
      (void)value;
    }
    if (doc.contains("manifolds")) {
      for (const auto& [name, spec] : object(doc["manifolds"], "manifolds").items()) load_manifold(name, spec);
    }
    if (doc.contains("fields")) {
      for (const auto& [name, spec] : object(doc["fields"], "fields").items()) load_field(name, spec);
    }
    if (doc.contains("maps")) {
      for (const auto& [name, spec] : object(doc["maps"], "maps").items()) load_map(name, spec);
    }
    if (doc.contains("hypersurfaces")) {
      for (const auto& [name, spec] : object(doc["hypersurfaces"], "hypersurfaces").items()) {
        load_hypersurface(name, spec);
      }
    }
    if (doc.contains("tasks")) {
      if (!doc["tasks"].is_array()) throw ValidationError("tasks must be an array", "tasks");
      std::set<std::string> ids;
      for (const auto& t : doc["tasks"]) {
        load_task(t);
        if (!ids.insert(m_.tasks.back().id).second) {
          throw ValidationError("duplicate task id \"" + m_.tasks.back().id + "\"", m_.tasks.back().id);
        }
      }
    }
    return std::move(m_);
  }

  Expression expression(const json& value, int dim, const std::string& where) {
    if (value.is_number()) return Expression::constant(value.get<double>());
    if (!value.is_string()) throw ValidationError(where + " must be an expression string or a number", where);
    const auto text = value.get<std::string>();
    try {
      return symbolic::parse_expression(text, dim);
    } catch (const ParseError& e) {
      std::string msg = e.what();
      if (const auto cut = msg.rfind(" (line "); cut != std::string::npos) msg = msg.substr(0, cut);
      const std::string literal = json(text).dump();
      const auto at = text_.find(literal);
      if (at == std::string::npos) throw ParseError(where + ": " + msg, 0, e.column());
      const auto [line, column] = line_column(text_, at + 1);
      throw ParseError(where + ": " + msg, line, column + e.column() - 1);
    }
  }

 private:
  const std::string& text_;
  Manifest m_;

  static const json& object(const json& v, const std::string& where) {
    if (!v.is_object()) throw ValidationError(where + " must be an object", where);
    return v;
  }

  static const json& required(const json& v, const char* key, const std::string& where) {
    if (!v.is_object() || !v.contains(key)) {
      throw ValidationError(where + " is missing \"" + key + "\"", where);
    }
    return v[key];
  }

  template <class T>
  static T number(const json& v, const std::string& where) {
    if (!v.is_number()) throw ValidationError(where + " must be a number", where);
    if constexpr (std::is_integral_v<T>) {
      if (!v.is_number_integer()) throw ValidationError(where + " must be an integer", where);
    }
    return v.get<T>();
  }

  ChartManifold resolve_manifold(const json& v, const std::string& where) {
    if (!v.is_string()) throw ValidationError(where + " must name a manifold", where);
    return m_.manifold(v.get<std::string>());
  }

  geometry::Box box(const json& v, int dim, const std::string& where) {
    if (!v.is_array() || static_cast<int>(v.size()) != dim) {
      throw ValidationError(where + " needs " + std::to_string(dim) + " [lo, hi] intervals", where);
    }
    geometry::Box b = geometry::Box::unbounded(dim);
    for (int i = 0; i < dim; ++i) {
      const auto& iv = v[static_cast<std::size_t>(i)];
      if (!iv.is_array() || iv.size() != 2) throw ValidationError(where + " intervals are [lo, hi] pairs", where);
      if (!iv[0].is_null()) b.axes[static_cast<std::size_t>(i)].lo = number<double>(iv[0], where);
      if (!iv[1].is_null()) b.axes[static_cast<std::size_t>(i)].hi = number<double>(iv[1], where);
      if (!(b.axes[static_cast<std::size_t>(i)].lo < b.axes[static_cast<std::size_t>(i)].hi)) {
        throw ValidationError(where + " interval " + std::to_string(i) + " is empty", where);
      }
    }
    return b;
  }

  std::vector<Expression> expressions(const json& v, int count, int dim, const std::string& where) {
    if (!v.is_array()) throw ValidationError(where + " must be an array of expressions", where);
    if (count >= 0 && static_cast<int>(v.size()) != count) {
      throw ValidationError(where + " needs " + std::to_string(count) + " components, got " + std::to_string(v.size()),
                            where);
    }
    std::vector<Expression> out;
    for (std::size_t i = 0; i < v.size(); ++i) out.push_back(expression(v[i], dim, where + "[" + std::to_string(i) + "]"));
    return out;
  }

  void check_name(const std::string& name, const std::string& section) {
    if (name.empty()) throw ValidationError(section + " names must be non-empty", name);
  }

  void load_manifold(const std::string& name, const json& spec) {
    check_name(name, "manifold");
    const std::string where = "manifolds." + name;
    object(spec, where);
    if (geometry::is_catalog_name(name)) throw ValidationError(where + " shadows a catalog manifold", name);
    if (spec.contains("catalog")) {
      const auto& c = spec["catalog"];
      if (!c.is_string() || !geometry::is_catalog_name(c.get<std::string>())) {
        throw ValidationError(where + ".catalog does not name a catalog manifold", c.is_string() ? c.get<std::string>() : name);
      }
      m_.manifolds.emplace(name, geometry::catalog_manifold(c.get<std::string>()));
      return;
    }
    const int dim = number<int>(required(spec, "dim", where), where + ".dim");
    if (dim < 1) throw ValidationError(where + ".dim must be positive", name);
    const auto& metric = required(spec, "metric", where);
    if (!metric.is_array() || static_cast<int>(metric.size()) != dim) {
      throw ValidationError(where + ".metric must be a " + std::to_string(dim) + "x" + std::to_string(dim) + " matrix",
                            name);
    }
    symbolic::ExprMatrix g(dim);
    for (int i = 0; i < dim; ++i) {
      const auto& row = metric[static_cast<std::size_t>(i)];
      if (!row.is_array() || static_cast<int>(row.size()) != dim) {
        throw ValidationError(where + ".metric row " + std::to_string(i) + " needs " + std::to_string(dim) + " entries",
                              name);
      }
      for (int j = 0; j < dim; ++j) {
        g(i, j) = expression(row[static_cast<std::size_t>(j)], dim,
                             where + ".metric[" + std::to_string(i) + "][" + std::to_string(j) + "]");
      }
    }
    for (int i = 0; i < dim; ++i) {
      for (int j = i + 1; j < dim; ++j) {
        if (g(i, j).to_string() != g(j, i).to_string()) {
          throw ValidationError(where + ".metric is not symmetric at (" + std::to_string(i) + "," + std::to_string(j) +
                                    ")",
                                name);
        }
      }
    }
    ChartManifold::Options opt;
    opt.sample_box = spec.contains("sample_box") ? box(spec["sample_box"], dim, where + ".sample_box")
                                                 : geometry::Box::uniform(dim, -1.0, 1.0);
    if (!opt.sample_box.bounded()) throw ValidationError(where + ".sample_box must be bounded", name);
    opt.chart_region = spec.contains("chart_region") ? box(spec["chart_region"], dim, where + ".chart_region")
                                                     : geometry::Box::unbounded(dim);
    if (spec.contains("periods")) {
      const auto& p = spec["periods"];
      if (!p.is_array() || static_cast<int>(p.size()) != dim) {
        throw ValidationError(where + ".periods needs one entry per axis", name);
      }
      for (const auto& v : p) {
        const double period = number<double>(v, where + ".periods");
        if (period < 0.0) throw ValidationError(where + ".periods must be non-negative", name);
        opt.periods.push_back(period);
      }
    }
    m_.manifolds.emplace(name, ChartManifold(name, g, std::move(opt)));
  }

  void load_field(const std::string& name, const json& spec) {
    check_name(name, "field");
    const std::string where = "fields." + name;
    object(spec, where);
    const auto manifold_name = required(spec, "manifold", where);
    const ChartManifold m = resolve_manifold(manifold_name, where + ".manifold");
    const int dim = m.dim();
    std::optional<Expression> potential;
    if (spec.contains("potential")) potential = expression(spec["potential"], dim, where + ".potential");
    std::optional<fields::VectorField> field;
    const int forms = spec.contains("components") + spec.contains("builtin") + spec.contains("gradient");
    if (forms != 1) {
      throw ValidationError(where + " needs exactly one of \"components\", \"builtin\" or \"gradient\"", name);
    }
    if (spec.contains("components")) {
      field.emplace(expressions(spec["components"], dim, dim, where + ".components"), dim, potential);
    } else if (spec.contains("gradient")) {
      const Expression f = expression(spec["gradient"], dim, where + ".gradient");
      field.emplace(fields::gradient_expr(m, f), dim, potential);
    } else {
      const auto& b = spec["builtin"];
      const std::string kind = b.is_string() ? b.get<std::string>() : "";
      fields::VectorField base = [&]() -> fields::VectorField {
        if (kind == "position") return fields::position_field(dim);
        if (kind == "rotation") {
          if (dim < 2) throw ValidationError(where + ": rotation field needs dimension >= 2", name);
          return fields::rotation_field(dim);
        }
        if (kind == "coordinate") {
          const int axis = number<int>(required(spec, "axis", where), where + ".axis");
          if (axis < 0 || axis >= dim) throw ValidationError(where + ".axis is out of range", name);
          return fields::coordinate_field(dim, axis);
        }
        if (kind == "special_conformal") {
          const auto& a = required(spec, "a", where);
          if (!a.is_array() || static_cast<int>(a.size()) != dim) {
            throw ValidationError(where + ".a needs " + std::to_string(dim) + " entries", name);
          }
          std::vector<double> av;
          for (const auto& v : a) av.push_back(number<double>(v, where + ".a"));
          return fields::special_conformal_field(av);
        }
        throw ValidationError(where + ".builtin must be position, rotation, coordinate or special_conformal", name);
      }();
      field.emplace(base.components(), dim, potential ? potential : base.potential());
    }
    m_.fields.emplace(name, FieldEntry{manifold_name.get<std::string>(), std::move(*field)});
  }

  void load_map(const std::string& name, const json& spec) {
    check_name(name, "map");
    const std::string where = "maps." + name;
    object(spec, where);
    const auto& dn = required(spec, "domain", where);
    const auto& tn = required(spec, "target", where);
    const ChartManifold domain = resolve_manifold(dn, where + ".domain");
    const ChartManifold target = resolve_manifold(tn, where + ".target");
    std::vector<Expression> comps;
    if (spec.contains("components") == spec.contains("random_polynomial")) {
      throw ValidationError(where + " needs exactly one of \"components\" or \"random_polynomial\"", name);
    }
    if (spec.contains("components")) {
      comps = expressions(spec["components"], target.dim(), domain.dim(), where + ".components");
    } else {
      const auto& rp = object(spec["random_polynomial"], where + ".random_polynomial");
      const int degree = number<int>(required(rp, "degree", where + ".random_polynomial"), where + ".degree");
      if (degree < 0) throw ValidationError(where + ".degree must be non-negative", name);
      const auto seed = number<std::uint64_t>(required(rp, "seed", where + ".random_polynomial"), where + ".seed");
      const double scale = rp.contains("scale") ? number<double>(rp["scale"], where + ".scale") : 0.5;
      std::vector<double> offset;
      if (rp.contains("offset")) {
        if (!rp["offset"].is_array() || static_cast<int>(rp["offset"].size()) != target.dim()) {
          throw ValidationError(where + ".offset needs one entry per target coordinate", name);
        }
        for (const auto& v : rp["offset"]) offset.push_back(number<double>(v, where + ".offset"));
      }
      comps = maps::random_polynomial_components(domain, target.dim(), degree, seed, scale, offset);
    }
    m_.maps.emplace(name, MapEntry{dn.get<std::string>(), tn.get<std::string>(), maps::SmoothMap(domain, target, comps)});
  }

  void load_hypersurface(const std::string& name, const json& spec) {
    check_name(name, "hypersurface");
    const std::string where = "hypersurfaces." + name;
    object(spec, where);
    const auto& an = required(spec, "ambient", where);
    const ChartManifold ambient = resolve_manifold(an, where + ".ambient");
    if (ambient.dim() < 2) throw ValidationError(where + ": ambient dimension must be at least 2", name);
    const int pdim = ambient.dim() - 1;
    auto emb = expressions(required(spec, "embedding", where), ambient.dim(), pdim, where + ".embedding");
    const auto& fn = required(spec, "field", where);
    if (!fn.is_string()) throw ValidationError(where + ".field must name a field", name);
    const FieldEntry& fe = m_.field(fn.get<std::string>());
    if (fe.field.dim() != ambient.dim()) {
      throw ValidationError(where + ": field " + fn.get<std::string>() + " does not live on the ambient manifold",
                            fn.get<std::string>());
    }
    const geometry::Box pbox = box(required(spec, "parameter_box", where), pdim, where + ".parameter_box");
    if (!pbox.bounded()) throw ValidationError(where + ".parameter_box must be bounded", name);
    m_.hypersurfaces.emplace(name, HypersurfaceEntry{an.get<std::string>(), fn.get<std::string>(),
                                                     verifier::HypersurfaceSpec{ambient, emb, fe.field, pbox}});
  }

  void require_keys(const json& t, const std::string& where, std::initializer_list<const char*> keys) {
    for (const char* k : keys) required(t, k, where);
  }

  void load_task(const json& t) {
    if (!t.is_object()) throw ValidationError("every task must be an object", "tasks");
    const auto& idv = required(t, "id", "task");
    if (!idv.is_string() || idv.get<std::string>().empty()) throw ValidationError("task id must be a string", "id");
    const std::string id = idv.get<std::string>();
    const std::string where = "task " + id;
    const auto& kv = required(t, "kind", where);
    const auto kind = task_kind_from_string(kv.is_string() ? kv.get<std::string>() : "");
    if (!kind) throw ValidationError(where + " has unknown kind " + kv.dump(), kv.is_string() ? kv.get<std::string>() : id);
    TaskSpec spec{id, *kind, t, std::nullopt};
    if (t.contains("expect_error")) {
      if (!t["expect_error"].is_string()) throw ValidationError(where + ".expect_error must be a string", id);
      spec.expect_error = t["expect_error"].get<std::string>();
    }
    auto field_ref = [&](const char* key) {
      const auto& v = required(t, key, where);
      if (!v.is_string()) throw ValidationError(where + "." + key + " must name a field", id);
      return &m_.field(v.get<std::string>());
    };
    auto map_ref = [&] {
      const auto& v = required(t, "map", where);
      if (!v.is_string()) throw ValidationError(where + ".map must name a map", id);
      return &m_.map(v.get<std::string>());
    };
    auto soliton_ref = [&](int dim) {
      required(t, "lambda", where);
      number<double>(t["lambda"], where + ".lambda");
      if (t.contains("potential")) expression(t["potential"], dim, where + ".potential");
      if (t.contains("field")) {
        if (field_ref("field")->field.dim() != dim) {
          throw ValidationError(where + ": field " + t["field"].get<std::string>() + " has the wrong dimension",
                                t["field"].get<std::string>());
        }
      } else if (!t.contains("potential")) {
        throw ValidationError(where + " needs a \"field\" or a \"potential\"", id);
      }
    };
    switch (*kind) {
      case TaskKind::ClassifyField:
      case TaskKind::CheckJacobi:
        field_ref("field");
        break;
      case TaskKind::CheckSoliton:
        soliton_ref(task_manifold(t, where).dim());
        break;
      case TaskKind::CheckIdentityConformal:
        if (field_ref("field")->field.dim() != map_ref()->map.target().dim()) {
          throw ValidationError(where + ": field does not live on the map target", t["field"].get<std::string>());
        }
        break;
      case TaskKind::CheckIdentitySoliton:
      case TaskKind::CheckIdentityBiharmonic:
        soliton_ref(map_ref()->map.target().dim());
        break;
      case TaskKind::Hypersurface: {
        const auto& v = required(t, "hypersurface", where);
        if (!v.is_string()) throw ValidationError(where + ".hypersurface must name a hypersurface", id);
        m_.hypersurface(v.get<std::string>());
        break;
      }
      case TaskKind::Tension:
      case TaskKind::Bitension:
        map_ref();
        break;
      case TaskKind::Flow: {
        require_keys(t, where, {"target", "resolution", "initializer"});
        const ChartManifold target = resolve_manifold(t["target"], where + ".target");
        const auto& res = t["resolution"];
        if (!res.is_array() || res.empty()) throw ValidationError(where + ".resolution must be a non-empty array", id);
        for (const auto& r : res) {
          if (number<int>(r, where + ".resolution") < 3) throw ValidationError(where + ".resolution entries must be >= 3", id);
        }
        const auto& init = t["initializer"];
        if (init.is_object() && init.contains("components")) {
          expressions(init["components"], target.dim(), static_cast<int>(res.size()), where + ".initializer.components");
        } else if (!(init == "identity" || (init.is_object() && init.contains("random_smooth")))) {
          throw ValidationError(where + ".initializer must be \"identity\", {\"random_smooth\": ...} or {\"components\": [...]}",
                                id);
        }
        if (t.contains("policy") && t["policy"] != "reject-and-halve" && t["policy"] != "abort") {
          throw ValidationError(where + ".policy must be reject-and-halve or abort", id);
        }
        break;
      }
      case TaskKind::IndexForm: {
        const MapEntry* me = map_ref();
        required(t, "resolution", where);
        expressions(required(t, "v", where), me->map.target().dim(), me->map.domain().dim(), where + ".v");
        if (t.contains("w")) expressions(t["w"], me->map.target().dim(), me->map.domain().dim(), where + ".w");
        break;
      }
      case TaskKind::RicciPinch:
        task_manifold(t, where);
        number<double>(required(t, "lambda", where), where + ".lambda");
        if (t.contains("side") && t["side"] != "above" && t["side"] != "below") {
          throw ValidationError(where + ".side must be above or below", id);
        }
        break;
      case TaskKind::Commutator: {
        const ChartManifold m = task_manifold(t, where);
        expression(required(t, "potential", where), m.dim(), where + ".potential");
        field_ref("field");
        break;
      }
    }
    m_.tasks.push_back(std::move(spec));
  }

  ChartManifold task_manifold(const json& t, const std::string& where) {
    if (t.contains("manifold")) return resolve_manifold(t["manifold"], where + ".manifold");
    if (t.contains("field") && t["field"].is_string()) {
      return m_.manifold(m_.field(t["field"].get<std::string>()).manifold);
    }
    throw ValidationError(where + " is missing \"manifold\"", where);
  }
};

}  // namespace

std::string to_string(TaskKind kind) {
  for (const auto& k : kTaskKinds) {
    if (k.kind == kind) return k.name;
  }
  return "unknown";
}

std::optional<TaskKind> task_kind_from_string(const std::string& name) {
  for (const auto& k : kTaskKinds) {
    if (name == k.name) return k.kind;
  }
  return std::nullopt;
}

ChartManifold Manifest::manifold(const std::string& name) const {
  if (const auto it = manifolds.find(name); it != manifolds.end()) return it->second;
  if (geometry::is_catalog_name(name)) return geometry::catalog_manifold(name);
  throw ValidationError("undefined manifold \"" + name + "\"", name);
}

const FieldEntry& Manifest::field(const std::string& name) const {
  if (const auto it = fields.find(name); it != fields.end()) return it->second;
  throw ValidationError("undefined field \"" + name + "\"", name);
}

const MapEntry& Manifest::map(const std::string& name) const {
  if (const auto it = maps.find(name); it != maps.end()) return it->second;
  throw ValidationError("undefined map \"" + name + "\"", name);
}

const HypersurfaceEntry& Manifest::hypersurface(const std::string& name) const {
  if (const auto it = hypersurfaces.find(name); it != hypersurfaces.end()) return it->second;
  throw ValidationError("undefined hypersurface \"" + name + "\"", name);
}

Manifest parse_manifest_text(const std::string& text) { return Loader(text).load(); }

Manifest parse_manifest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read manifest " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_manifest_text(buf.str());
}

Expression parse_field_expression(const std::string& text, int dim, const std::string& where) {
  try {
    return symbolic::parse_expression(text, dim);
  } catch (const ParseError& e) {
    throw ParseError(where + ": " + std::string(e.what()).substr(0, std::string(e.what()).rfind(" (line ")), e.line(),
                     e.column());
  }
}

}  // namespace liouville::cli
