#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "liouville/cli/manifest.hpp"
#include "liouville/flow/heat_flow.hpp"

namespace liouville::cli {

struct Report {
  std::string id;
  TaskKind kind = TaskKind::ClassifyField;
  /// The task object as written.
  nlohmann::ordered_json inputs;
  /// Kind-specific scalars.
  nlohmann::ordered_json result = nlohmann::ordered_json::object();
  bool pass = false;
  /// Error kind name and message when the task raised.
  std::optional<std::string> error_kind;
  std::string error_message;
  double wall_seconds = 0.0;
  /// One-line summary for the text format.
  std::string summary;

  std::optional<fields::FieldReport> field_report;
  std::vector<verifier::IdentityReport> identities;
  std::optional<flow::FlowTrace> trace;
};

struct RunOptions {
  /// Replaces every seed a task reads (samples, directions, random initial maps).
  std::optional<std::uint64_t> seed;
  /// Replaces every task tolerance.
  std::optional<double> tolerance;
};

/// Never throws for module errors: they become a failed Report, or a passing
/// one when the task declares the same expect_error.
Report run_task(const Manifest& manifest, const TaskSpec& task, const RunOptions& options = {});
/// Reports in manifest order; `only` restricts to one task id and throws
/// ValidationError when no task has that id.
std::vector<Report> run_manifest(const Manifest& manifest, const RunOptions& options = {},
                                 const std::optional<std::string>& only = std::nullopt);

enum class Format { Text, Json, Csv };
std::optional<Format> format_from_string(const std::string& name);

nlohmann::ordered_json to_json(const fields::FieldReport& r);
fields::FieldReport field_report_from_json(const nlohmann::ordered_json& j);
/// Wall time is left out so reruns serialize identically.
nlohmann::ordered_json to_json(const Report& r);
nlohmann::ordered_json to_json(const std::vector<Report>& reports);

void write_text(std::ostream& os, const std::vector<Report>& reports);
void write_json(std::ostream& os, const std::vector<Report>& reports);
/// Flow tasks write their trace, identity tasks their rows, field checks
/// their per-sample residuals, everything else `key,value` rows.
void write_csv(std::ostream& os, const Report& report);

/// Writes one report to `path` (stdout when empty). Throws IoError.
void emit_report(const Report& report, Format format, const std::filesystem::path& path);
/// Text and json go to `dir/report.txt` / `dir/report.json`, csv to one `<id>.csv` per task.
void emit_reports(const std::vector<Report>& reports, Format format, const std::filesystem::path& dir);

/// Number of failed reports.
int failures(const std::vector<Report>& reports);

}  // namespace liouville::cli
