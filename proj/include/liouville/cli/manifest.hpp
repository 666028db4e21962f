#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "liouville/fields/fields.hpp"
#include "liouville/maps/maps.hpp"
#include "liouville/verifier/verifier.hpp"

namespace liouville::cli {

using geometry::ChartManifold;
using symbolic::Expression;

struct FieldEntry {
  std::string manifold;
  fields::VectorField field;
};

struct MapEntry {
  std::string domain;
  std::string target;
  maps::SmoothMap map;
};

struct HypersurfaceEntry {
  std::string ambient;
  std::string field;
  verifier::HypersurfaceSpec spec;
};

enum class TaskKind {
  ClassifyField,
  CheckSoliton,
  CheckJacobi,
  CheckIdentityConformal,
  CheckIdentitySoliton,
  CheckIdentityBiharmonic,
  Hypersurface,
  Tension,
  Bitension,
  Flow,
  IndexForm,
  RicciPinch,
  Commutator,
};

std::string to_string(TaskKind kind);
std::optional<TaskKind> task_kind_from_string(const std::string& name);

struct TaskSpec {
  std::string id;
  TaskKind kind;
  /// The task object as written, echoed into reports.
  nlohmann::ordered_json params;
  /// Error kind name the task is expected to raise, e.g. "PreconditionFailed".
  std::optional<std::string> expect_error;
};

/// Names resolve to manifest entries first, then to the built-in catalog.
struct Manifest {
  std::map<std::string, ChartManifold> manifolds;
  std::map<std::string, FieldEntry> fields;
  std::map<std::string, MapEntry> maps;
  std::map<std::string, HypersurfaceEntry> hypersurfaces;
  std::vector<TaskSpec> tasks;

  /// Throws ValidationError naming `name` when it is neither declared nor a catalog manifold.
  ChartManifold manifold(const std::string& name) const;
  const FieldEntry& field(const std::string& name) const;
  const MapEntry& map(const std::string& name) const;
  const HypersurfaceEntry& hypersurface(const std::string& name) const;
};

/// ParseError carries the line and column in the manifest text; expression
/// errors point at the offending character inside the string literal.
Manifest parse_manifest_text(const std::string& text);
/// Throws IoError when the file cannot be read.
Manifest parse_manifest(const std::filesystem::path& path);

/// Expression text with coordinates limited to `dim`; errors name `where`.
Expression parse_field_expression(const std::string& text, int dim, const std::string& where);

}  // namespace liouville::cli
