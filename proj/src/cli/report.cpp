#include "liouville/cli/report.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>

#include "liouville/errors.hpp"
#include "liouville/geometry/sampling.hpp"

namespace liouville::cli {

using json = nlohmann::ordered_json;
using geometry::Point;

namespace {

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

std::string full(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// Reads task parameters with the run-wide overrides applied.
class Params {
 public:
  Params(const Manifest& m, const TaskSpec& t, const RunOptions& o) : m_(m), t_(t.params), o_(o) {}

  const json& raw() const { return t_; }
  bool has(const char* key) const { return t_.contains(key); }

  double number(const char* key, double fallback) const {
    return t_.contains(key) ? t_[key].get<double>() : fallback;
  }
  int integer(const char* key, int fallback) const { return t_.contains(key) ? t_[key].get<int>() : fallback; }
  std::string string(const char* key, const std::string& fallback) const {
    return t_.contains(key) ? t_[key].get<std::string>() : fallback;
  }
  std::uint64_t seed(std::uint64_t fallback) const {
    if (o_.seed) return *o_.seed;
    return t_.contains("seed") ? t_["seed"].get<std::uint64_t>() : fallback;
  }
  double tolerance(double fallback) const {
    if (o_.tolerance) return *o_.tolerance;
    return number("tolerance", fallback);
  }

  geometry::SampleOptions sample_options() const {
    geometry::SampleOptions s;
    if (t_.contains("samples")) {
      const auto& j = t_["samples"];
      if (j.contains("lattice")) s.lattice_per_axis = j["lattice"].get<int>();
      if (j.contains("random")) s.random_count = j["random"].get<int>();
      if (j.contains("seed")) s.seed = j["seed"].get<std::uint64_t>();
    }
    if (o_.seed) s.seed = *o_.seed;
    return s;
  }

  std::vector<Point> samples(const geometry::ChartManifold& m) const {
    auto pts = geometry::sample_points(m, sample_options());
    if (pts.empty()) throw EmptySampleSet("no sample points inside the chart of " + m.name());
    return pts;
  }

  std::vector<Point> box_samples(const geometry::Box& box) const {
    const auto s = sample_options();
    auto pts = geometry::lattice_points(box, s.lattice_per_axis);
    const auto extra = geometry::random_points(box, s.random_count, s.seed);
    pts.insert(pts.end(), extra.begin(), extra.end());
    if (pts.empty()) throw EmptySampleSet("empty parameter sample set");
    return pts;
  }

  geometry::ChartManifold manifold() const {
    if (t_.contains("manifold")) return m_.manifold(t_["manifold"].get<std::string>());
    return m_.manifold(m_.field(t_["field"].get<std::string>()).manifold);
  }

  std::vector<Expression> expressions(const json& v, int dim) const {
    std::vector<Expression> out;
    for (const auto& e : v) {
      out.push_back(e.is_number() ? Expression::constant(e.get<double>())
                                  : parse_field_expression(e.get<std::string>(), dim, "task " + t_["id"].get<std::string>()));
    }
    return out;
  }

  Expression expression(const char* key, int dim) const { return expressions(json::array({t_[key]}), dim)[0]; }

  fields::SolitonSpec soliton(const geometry::ChartManifold& m) const {
    const double lambda = t_["lambda"].get<double>();
    if (!t_.contains("field")) return fields::gradient_soliton(m, expression("potential", m.dim()), lambda);
    const auto& f = m_.field(t_["field"].get<std::string>()).field;
    std::optional<Expression> potential;
    if (t_.contains("potential")) potential = expression("potential", m.dim());
    return fields::SolitonSpec{f, lambda, potential};
  }

  verifier::IdentityOptions identity_options(double default_tol) const {
    verifier::IdentityOptions o;
    o.tolerance = tolerance(default_tol);
    o.precondition_tolerance = number("precondition_tolerance", o.precondition_tolerance);
    o.strict = t_.contains("strict") ? t_["strict"].get<bool>() : true;
    return o;
  }

  const Manifest& manifest() const { return m_; }

 private:
  const Manifest& m_;
  const json& t_;
  const RunOptions& o_;
};

void field_result(Report& r, const fields::FieldReport& f) {
  r.result["sup"] = f.sup;
  r.result["mean"] = f.mean;
  r.result["tolerance"] = f.tolerance;
  r.result["samples"] = f.residuals.size();
  r.pass = f.pass;
  r.summary = "sup " + sci(f.sup) + " (tol " + sci(f.tolerance) + ")";
  r.field_report = f;
}

void identity_result(Report& r, std::vector<verifier::IdentityReport> reports) {
  json steps = json::array();
  r.pass = !reports.empty();
  double worst = 0.0;
  for (const auto& rep : reports) {
    steps.push_back(json{{"name", rep.name},
                         {"sup", rep.sup},
                         {"mean", rep.mean},
                         {"tolerance", rep.tolerance},
                         {"pass", rep.pass},
                         {"rows", rep.rows.size()}});
    r.pass = r.pass && rep.pass;
    worst = std::max(worst, rep.sup);
  }
  r.result["identities"] = std::move(steps);
  r.summary = std::to_string(reports.size()) + (reports.size() == 1 ? " identity" : " identities") + ", worst sup " +
              sci(worst);
  r.identities = std::move(reports);
}

json classification_json(const fields::ConformalClassification& c) {
  return json{{"kind", fields::to_string(c.kind)},
              {"residual", c.residual},
              {"potential_mean", c.potential_mean},
              {"potential_variance", c.potential_variance},
              {"homothety", c.homothety}};
}

void run_classify(const Params& p, Report& r) {
  const auto& fe = p.manifest().field(p.raw()["field"].get<std::string>());
  const auto m = p.manifest().manifold(fe.manifold);
  fields::ClassifyOptions opt;
  opt.tol = p.tolerance(opt.tol);
  opt.homothety_tol = p.number("homothety_tolerance", opt.homothety_tol);
  const auto c = fields::classify_conformal(m, fe.field, p.samples(m), opt);
  r.result = classification_json(c);
  const std::string kind = fields::to_string(c.kind);
  r.pass = p.has("expect") ? kind == p.string("expect", "") : c.kind != fields::ConformalKind::None;
  r.summary = kind + ", residual " + sci(c.residual);
  if (c.kind == fields::ConformalKind::Homothetic) r.summary += ", k = " + sci(c.homothety);
}

void run_tension(const Params& p, Report& r, bool bitension) {
  const auto& phi = p.manifest().map(p.raw()["map"].get<std::string>()).map;
  const auto samples = p.samples(phi.domain());
  double sup = 0.0, sum = 0.0;
  for (const auto& x : samples) {
    const auto mp = maps::map_point(phi, x, 2);
    const geometry::Vector v = bitension ? maps::bitension_at(phi, x) : maps::tension(mp);
    const double norm = std::sqrt(std::max(0.0, v.dot(mp.target.metric.g * v)));
    sup = std::max(sup, norm);
    sum += norm;
  }
  const double tol = p.tolerance(1e-8);
  r.result["sup"] = sup;
  r.result["mean"] = sum / static_cast<double>(samples.size());
  r.result["tolerance"] = tol;
  r.result["samples"] = samples.size();
  const std::string expect = p.string("expect", "");
  if (expect == "zero") r.pass = sup < tol;
  else if (expect == "nonzero") r.pass = sup >= tol;
  else r.pass = std::isfinite(sup);
  r.summary = std::string(bitension ? "sup |tau2| " : "sup |tau| ") + sci(sup);
}

void run_flow_task(const Params& p, Report& r) {
  const auto& t = p.raw();
  const auto target = p.manifest().manifold(t["target"].get<std::string>());
  const auto res = t["resolution"].get<std::vector<int>>();
  flow::Initializer init = flow::Identity{};
  const auto& ij = t["initializer"];
  if (ij.is_object() && ij.contains("components")) {
    init = p.expressions(ij["components"], static_cast<int>(res.size()));
  } else if (ij.is_object()) {
    const auto& rs = ij["random_smooth"];
    flow::RandomSmooth s;
    s.seed = p.seed(rs.is_object() && rs.contains("seed") ? rs["seed"].get<std::uint64_t>() : s.seed);
    if (rs.is_object() && rs.contains("max_frequency")) s.max_frequency = rs["max_frequency"].get<int>();
    if (rs.is_object() && rs.contains("amplitude")) s.amplitude = rs["amplitude"].get<double>();
    init = s;
  }
  flow::FlowConfig cfg;
  cfg.dt = p.number("dt", cfg.dt);
  cfg.max_steps = t.contains("max_steps") ? t["max_steps"].get<std::int64_t>() : cfg.max_steps;
  cfg.stop_tolerance = p.number("stop_tolerance", cfg.stop_tolerance);
  cfg.constant_tolerance = p.number("constant_tolerance", cfg.constant_tolerance);
  cfg.max_halvings = p.integer("max_halvings", cfg.max_halvings);
  if (p.string("policy", "reject-and-halve") == "abort") cfg.policy = flow::EnergyPolicy::Abort;
  const auto state = flow::init_grid_map(res, target, init);
  auto trace = flow::run_flow(state, target, cfg);
  const auto& first = trace.records.front();
  const auto& last = trace.records.back();
  r.result["verdict"] = flow::to_string(trace.verdict);
  if (!trace.message.empty()) r.result["message"] = trace.message;
  r.result["steps"] = last.step;
  r.result["t"] = last.t;
  r.result["rejected_steps"] = trace.rejected_steps;
  r.result["initial_energy"] = first.energy;
  r.result["final_energy"] = last.energy;
  r.result["final_sup_tension"] = last.sup_tension;
  r.result["final_sup_dphi"] = last.sup_dphi;
  bool monotone = true;
  for (std::size_t i = 1; i < trace.records.size(); ++i) {
    monotone = monotone && trace.records[i].energy <= trace.records[i - 1].energy;
  }
  r.result["energy_monotone"] = monotone;
  const std::string verdict = flow::to_string(trace.verdict);
  if (p.has("expect")) {
    r.pass = verdict == p.string("expect", "") && monotone;
  } else {
    r.pass = (trace.verdict == flow::Verdict::ConvergedConstant ||
              trace.verdict == flow::Verdict::ConvergedNonconstant) &&
             monotone;
  }
  r.summary = verdict + " after " + std::to_string(last.step) + " steps, energy " + sci(first.energy) + " -> " +
              sci(last.energy);
  r.trace = std::move(trace);
}

void run_index_form(const Params& p, Report& r) {
  const auto& t = p.raw();
  const auto& phi = p.manifest().map(t["map"].get<std::string>()).map;
  const int dim = phi.domain().dim();
  const auto res = t["resolution"].get<std::vector<int>>();
  const maps::FieldAlongMap v(p.expressions(t["v"], dim), dim);
  const double tol = p.tolerance(1e-9);
  r.result["tolerance"] = tol;
  if (!t.contains("w")) {
    const double ivv = flow::index_form(phi, v, v, res);
    r.result["I_vv"] = ivv;
    r.pass = ivv >= -tol;
    r.summary = "I(v,v) = " + sci(ivv);
    return;
  }
  const maps::FieldAlongMap w(p.expressions(t["w"], dim), dim);
  const double ivw = flow::index_form(phi, v, w, res);
  const double iwv = flow::index_form(phi, w, v, res);
  r.result["I_vw"] = ivw;
  r.result["I_wv"] = iwv;
  r.result["asymmetry"] = std::abs(ivw - iwv);
  r.pass = std::abs(ivw - iwv) <= tol;
  r.summary = "I(v,w) = " + sci(ivw) + ", |I(v,w) - I(w,v)| = " + sci(std::abs(ivw - iwv));
}

void run_body(const Params& p, const TaskSpec& task, Report& r) {
  const auto& t = p.raw();
  switch (task.kind) {
    case TaskKind::ClassifyField:
      run_classify(p, r);
      break;
    case TaskKind::CheckSoliton: {
      const auto m = p.manifold();
      field_result(r, fields::check_soliton(m, p.soliton(m), p.samples(m), p.tolerance(1e-8)));
      break;
    }
    case TaskKind::CheckJacobi: {
      const auto& fe = p.manifest().field(t["field"].get<std::string>());
      const auto m = p.manifest().manifold(fe.manifold);
      field_result(r, fields::check_jacobi_type(m, fe.field, p.samples(m), p.integer("directions", 4), p.seed(1),
                                                p.tolerance(1e-8)));
      break;
    }
    case TaskKind::CheckIdentityConformal: {
      const auto& phi = p.manifest().map(t["map"].get<std::string>()).map;
      const auto& xi = p.manifest().field(t["field"].get<std::string>()).field;
      identity_result(r, {verifier::conformal_divergence_identity(phi, xi, p.samples(phi.domain()),
                                                                  p.identity_options(1e-8))});
      break;
    }
    case TaskKind::CheckIdentitySoliton: {
      const auto& phi = p.manifest().map(t["map"].get<std::string>()).map;
      identity_result(r, {verifier::soliton_divergence_identity(phi, p.soliton(phi.target()), p.samples(phi.domain()),
                                                                p.identity_options(1e-8))});
      break;
    }
    case TaskKind::CheckIdentityBiharmonic: {
      const auto& phi = p.manifest().map(t["map"].get<std::string>()).map;
      identity_result(r, verifier::biharmonic_divergence_identity(phi, p.soliton(phi.target()),
                                                                  p.samples(phi.domain()), p.identity_options(1e-6)));
      break;
    }
    case TaskKind::Hypersurface: {
      const auto& hs = p.manifest().hypersurface(t["hypersurface"].get<std::string>()).spec;
      auto rep = verifier::hypersurface_decompose(hs, p.box_samples(hs.parameter_box), p.tolerance(1e-8));
      identity_result(r, std::move(rep.checks));
      break;
    }
    case TaskKind::Tension:
      run_tension(p, r, false);
      break;
    case TaskKind::Bitension:
      run_tension(p, r, true);
      break;
    case TaskKind::Flow:
      run_flow_task(p, r);
      break;
    case TaskKind::IndexForm:
      run_index_form(p, r);
      break;
    case TaskKind::RicciPinch: {
      const auto m = p.manifold();
      const auto side = p.string("side", "above") == "below" ? fields::PinchSide::Below : fields::PinchSide::Above;
      const auto pr = fields::ricci_pinch_check(m, t["lambda"].get<double>(), p.samples(m), side);
      r.result = json{{"holds", pr.holds},
                      {"margin", pr.margin},
                      {"min_eigenvalue", pr.min_eigenvalue},
                      {"max_eigenvalue", pr.max_eigenvalue}};
      r.pass = pr.holds;
      r.summary = "Ricci eigenvalues in [" + sci(pr.min_eigenvalue) + ", " + sci(pr.max_eigenvalue) + "]";
      break;
    }
    case TaskKind::Commutator: {
      const auto m = p.manifold();
      const auto& xi = p.manifest().field(t["field"].get<std::string>()).field;
      const double tol = p.tolerance(1e-10);
      const auto c = fields::homothetic_commutator_check(m, p.expression("potential", m.dim()), xi, p.samples(m),
                                                         p.number("precondition_tolerance", 1e-8));
      r.result = json{{"sup", c.sup},
                      {"mean", c.mean},
                      {"tolerance", tol},
                      {"grad_norm_sq_mean", c.grad_norm_sq_mean},
                      {"zeta_class", classification_json(c.zeta_class)}};
      r.pass = c.sup < tol && c.zeta_class.kind == fields::ConformalKind::Homothetic;
      r.summary = "sup " + sci(c.sup) + ", zeta " + fields::to_string(c.zeta_class.kind);
      break;
    }
  }
}

std::string safe_file_name(const std::string& id) {
  std::string out = id;
  for (char& c : out) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.')) c = '_';
  }
  return out;
}

void flatten(const json& j, const std::string& prefix, std::ostream& os) {
  if (j.is_object()) {
    for (const auto& [k, v] : j.items()) flatten(v, prefix.empty() ? k : prefix + "." + k, os);
  } else if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i) flatten(j[i], prefix + "[" + std::to_string(i) + "]", os);
  } else if (j.is_number_float()) {
    os << prefix << ',' << full(j.get<double>()) << '\n';
  } else if (j.is_string()) {
    os << prefix << ',' << j.get<std::string>() << '\n';
  } else {
    os << prefix << ',' << j.dump() << '\n';
  }
}

}  // namespace

Report run_task(const Manifest& manifest, const TaskSpec& task, const RunOptions& options) {
  Report r;
  r.id = task.id;
  r.kind = task.kind;
  r.inputs = task.params;
  const auto start = std::chrono::steady_clock::now();
  try {
    run_body(Params(manifest, task, options), task, r);
    if (task.expect_error) {
      r.pass = false;
      r.summary = "expected " + *task.expect_error + " but the task completed";
    }
  } catch (const Error& e) {
    r.error_kind = std::string(to_string(e.kind()));
    r.error_message = e.what();
    r.pass = task.expect_error && *task.expect_error == *r.error_kind;
    r.summary = (r.pass ? "raised expected " : "error ") + *r.error_kind + ": " + r.error_message;
  } catch (const std::exception& e) {
    r.error_kind = "InternalError";
    r.error_message = e.what();
    r.pass = false;
    r.summary = "error InternalError: " + r.error_message;
  }
  r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

std::vector<Report> run_manifest(const Manifest& manifest, const RunOptions& options,
                                 const std::optional<std::string>& only) {
  std::vector<Report> out;
  for (const auto& t : manifest.tasks) {
    if (only && t.id != *only) continue;
    out.push_back(run_task(manifest, t, options));
  }
  if (only && out.empty()) throw ValidationError("no task named \"" + *only + "\"", *only);
  return out;
}

std::optional<Format> format_from_string(const std::string& name) {
  if (name == "text") return Format::Text;
  if (name == "json") return Format::Json;
  if (name == "csv") return Format::Csv;
  return std::nullopt;
}

json to_json(const fields::FieldReport& r) {
  json j{{"check", r.check},
         {"sup", r.sup},
         {"mean", r.mean},
         {"tolerance", r.tolerance},
         {"pass", r.pass},
         {"verdict", r.verdict},
         {"residuals", r.residuals}};
  if (r.lambda) j["lambda"] = *r.lambda;
  if (r.potential) j["potential"] = *r.potential;
  return j;
}

fields::FieldReport field_report_from_json(const json& j) {
  fields::FieldReport r;
  try {
    r.check = j.at("check").get<std::string>();
    r.sup = j.at("sup").get<double>();
    r.mean = j.at("mean").get<double>();
    r.tolerance = j.at("tolerance").get<double>();
    r.pass = j.at("pass").get<bool>();
    r.verdict = j.at("verdict").get<std::string>();
    r.residuals = j.at("residuals").get<std::vector<double>>();
    if (j.contains("lambda")) r.lambda = j["lambda"].get<double>();
    if (j.contains("potential")) r.potential = j["potential"].get<double>();
  } catch (const json::exception& e) {
    throw ValidationError(std::string("field report: ") + e.what(), "field_report");
  }
  return r;
}

json to_json(const Report& r) {
  json j{{"id", r.id}, {"kind", to_string(r.kind)}, {"pass", r.pass}, {"inputs", r.inputs}, {"result", r.result}};
  if (r.field_report) j["field_report"] = to_json(*r.field_report);
  if (r.error_kind) j["error"] = json{{"kind", *r.error_kind}, {"message", r.error_message}};
  return j;
}

json to_json(const std::vector<Report>& reports) {
  json list = json::array();
  for (const auto& r : reports) list.push_back(to_json(r));
  return json{{"tasks", reports.size()}, {"failed", failures(reports)}, {"reports", std::move(list)}};
}

void write_text(std::ostream& os, const std::vector<Report>& reports) {
  std::size_t id_w = 4, kind_w = 4;
  for (const auto& r : reports) {
    id_w = std::max(id_w, r.id.size());
    kind_w = std::max(kind_w, to_string(r.kind).size());
  }
  auto pad = [](const std::string& s, std::size_t w) { return s + std::string(w - s.size(), ' '); };
  os << pad("task", id_w) << "  " << pad("kind", kind_w) << "  result  time      summary\n";
  for (const auto& r : reports) {
    char t[16];
    std::snprintf(t, sizeof t, "%7.3fs", r.wall_seconds);
    os << pad(r.id, id_w) << "  " << pad(to_string(r.kind), kind_w) << "  " << (r.pass ? "PASS  " : "FAIL  ") << "  "
       << t << "  " << r.summary << '\n';
  }
  os << reports.size() << " tasks, " << failures(reports) << " failed\n";
}

void write_json(std::ostream& os, const std::vector<Report>& reports) { os << to_json(reports).dump(2) << '\n'; }

void write_csv(std::ostream& os, const Report& report) {
  if (report.trace) {
    flow::write_trace_csv(os, *report.trace);
  } else if (!report.identities.empty()) {
    verifier::write_csv(os, report.identities);
  } else if (report.field_report) {
    os << "sample,residual\n";
    for (std::size_t i = 0; i < report.field_report->residuals.size(); ++i) {
      os << i << ',' << full(report.field_report->residuals[i]) << '\n';
    }
  } else {
    os << "key,value\n";
    flatten(report.result, "", os);
    os << "pass," << (report.pass ? "true" : "false") << '\n';
    if (report.error_kind) os << "error," << *report.error_kind << '\n';
  }
}

void emit_report(const Report& report, Format format, const std::filesystem::path& path) {
  std::ofstream file;
  if (!path.empty()) {
    file.open(path, std::ios::binary);
    if (!file) throw IoError("cannot write " + path.string());
  }
  std::ostream& os = path.empty() ? std::cout : file;
  switch (format) {
    case Format::Text: write_text(os, {report}); break;
    case Format::Json: os << to_json(report).dump(2) << '\n'; break;
    case Format::Csv: write_csv(os, report); break;
  }
  if (!os) throw IoError("failed writing " + (path.empty() ? std::string("stdout") : path.string()));
}

void emit_reports(const std::vector<Report>& reports, Format format, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  auto open = [](const std::filesystem::path& p) {
    std::ofstream f(p, std::ios::binary);
    if (!f) throw IoError("cannot write " + p.string());
    return f;
  };
  if (format == Format::Csv) {
    for (const auto& r : reports) emit_report(r, Format::Csv, dir / (safe_file_name(r.id) + ".csv"));
    return;
  }
  auto f = open(dir / (format == Format::Text ? "report.txt" : "report.json"));
  if (format == Format::Text) write_text(f, reports);
  else write_json(f, reports);
  if (!f) throw IoError("failed writing report in " + dir.string());
}

int failures(const std::vector<Report>& reports) {
  int n = 0;
  for (const auto& r : reports) n += r.pass ? 0 : 1;
  return n;
}

}  // namespace liouville::cli
