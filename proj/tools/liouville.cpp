#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <iostream>

#include "liouville/cli/report.hpp"
#include "liouville/errors.hpp"
#include "liouville/geometry/catalog.hpp"

namespace {

constexpr int kMaxFailureCode = 125;
constexpr int kInputError = 126;

int failure_code(int failed) { return std::min(failed, kMaxFailureCode); }

int cmd_verify(const std::string& path, const std::optional<std::string>& task, const std::string& format_name,
               const std::optional<std::string>& out, const liouville::cli::RunOptions& options) {
  using namespace liouville::cli;
  const auto format = format_from_string(format_name);
  const Manifest manifest = parse_manifest(path);
  const auto reports = run_manifest(manifest, options, task);
  if (out) {
    emit_reports(reports, *format, *out);
  } else if (*format == Format::Text) {
    write_text(std::cout, reports);
  } else if (*format == Format::Json) {
    write_json(std::cout, reports);
  } else {
    for (const auto& r : reports) {
      std::cout << "# " << r.id << '\n';
      write_csv(std::cout, r);
    }
  }
  return failure_code(failures(reports));
}

int cmd_flow(const std::string& path, const std::string& task, const std::string& trace_path,
             const std::optional<std::string>& state_path, const liouville::cli::RunOptions& options) {
  using namespace liouville::cli;
  const Manifest manifest = parse_manifest(path);
  const auto it = std::find_if(manifest.tasks.begin(), manifest.tasks.end(),
                               [&](const TaskSpec& t) { return t.id == task; });
  if (it == manifest.tasks.end()) throw liouville::ValidationError("no task named \"" + task + "\"", task);
  if (it->kind != TaskKind::Flow) throw liouville::ValidationError("task \"" + task + "\" is not a flow task", task);
  const Report r = run_task(manifest, *it, options);
  write_text(std::cout, {r});
  if (r.trace) {
    emit_report(r, Format::Csv, trace_path);
    if (state_path) {
      std::ofstream f(*state_path, std::ios::binary);
      if (!f) throw liouville::IoError("cannot write " + *state_path);
      liouville::flow::write_state(f, r.trace->final_state);
    }
  }
  return failure_code(r.pass ? 0 : 1);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Chart-based Riemannian geometry checks and harmonic map heat flow", "liouville"};
  app.require_subcommand(1);

  std::string manifest, format = "text", task, trace;
  std::optional<std::string> task_filter, out, state;
  std::optional<std::uint64_t> seed;
  std::optional<double> tol;

  auto* verify = app.add_subcommand("verify", "Run the tasks of a manifest");
  verify->add_option("manifest", manifest, "Manifest JSON file")->required();
  verify->add_option("--task", task_filter, "Run only this task");
  verify->add_option("--format", format, "Output format")->check(CLI::IsMember({"text", "json", "csv"}));
  verify->add_option("--out", out, "Write reports into this directory");
  verify->add_option("--seed", seed, "Override every task seed");
  verify->add_option("--tol", tol, "Override every task tolerance")->check(CLI::PositiveNumber);

  auto* catalog = app.add_subcommand("catalog", "Built-in manifolds");
  catalog->require_subcommand(1);
  auto* list = catalog->add_subcommand("list", "List catalog manifolds");

  auto* flow = app.add_subcommand("flow", "Run one flow task and write its trace");
  flow->add_option("manifest", manifest, "Manifest JSON file")->required();
  flow->add_option("--task", task, "Flow task id")->required();
  flow->add_option("--trace", trace, "Trace CSV path")->required();
  flow->add_option("--state", state, "Final state path");
  flow->add_option("--seed", seed, "Override the initializer seed");

  CLI11_PARSE(app, argc, argv);

  const liouville::cli::RunOptions options{seed, tol};
  try {
    if (*list) {
      for (const auto& name : liouville::geometry::catalog_names()) {
        const auto m = liouville::geometry::catalog_manifold(name);
        std::cout << name << "  dim " << m.dim() << '\n';
      }
      std::cout << "patterns:";
      for (const auto& p : liouville::geometry::catalog_patterns()) std::cout << ' ' << p;
      std::cout << '\n';
      return 0;
    }
    if (*verify) return cmd_verify(manifest, task_filter, format, out, options);
    return cmd_flow(manifest, task, trace, state, options);
  } catch (const liouville::Error& e) {
    std::cerr << "liouville: " << to_string(e.kind()) << ": " << e.what() << '\n';
    return kInputError;
  }
}
