#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "liouville/maps/maps.hpp"
#include "liouville/simd/kernels.hpp"

namespace liouville::flow {

using geometry::ChartManifold;
using symbolic::Expression;

/// Map from the flat torus [0,2π)^m into a target chart, sampled on a
/// periodic uniform grid. Node k along axis a sits at 2πk/N_a; axis 0 varies
/// slowest. Values are stored as one plane of node values per target
/// coordinate.
struct GridMapState {
  std::vector<int> resolution;
  int target_dim = 0;
  std::vector<double> values;  // [α * nodes + node]
  double t = 0.0;
  std::int64_t steps = 0;

  int domain_dim() const { return static_cast<int>(resolution.size()); }
  std::size_t nodes() const;
  double* plane(int alpha) { return values.data() + static_cast<std::size_t>(alpha) * nodes(); }
  const double* plane(int alpha) const { return values.data() + static_cast<std::size_t>(alpha) * nodes(); }
  double spacing(int axis) const;
  /// Domain coordinates of a node.
  std::vector<double> position(std::size_t node) const;
};

struct RandomSmooth {
  std::uint64_t seed = 1;
  /// Highest frequency per axis.
  int max_frequency = 2;
  /// Peak deviation from the centre as a fraction of the target sample-box half-width.
  double amplitude = 0.5;
};

struct Identity {};

using Initializer = std::variant<std::vector<Expression>, RandomSmooth, Identity>;

/// Throws ChartExit when a node lands outside the target chart and
/// ValidationError when the identity initializer is used with a target that
/// is not the flat torus of the grid's dimension.
GridMapState init_grid_map(const std::vector<int>& resolution, const ChartManifold& target,
                           const Initializer& init);

enum class EnergyPolicy { RejectAndHalve, Abort };

struct FlowConfig {
  /// Time step; 0 selects 0.25·h² with h the smallest grid spacing.
  double dt = 0.0;
  std::int64_t max_steps = 100000;
  double stop_tolerance = 1e-6;
  /// sup|dφ| threshold for the constant verdict.
  double constant_tolerance = 1e-3;
  EnergyPolicy policy = EnergyPolicy::RejectAndHalve;
  int max_halvings = 60;
  std::optional<simd::Isa> isa;
};

struct FlowRecord {
  std::int64_t step = 0;
  double t = 0.0;
  double energy = 0.0;
  double sup_tension = 0.0;
  double sup_dphi = 0.0;
};

enum class Verdict { ConvergedConstant, ConvergedNonconstant, MaxSteps, ChartExit, EnergyIncrease };
std::string to_string(Verdict v);

struct FlowTrace {
  std::vector<FlowRecord> records;
  Verdict verdict = Verdict::MaxSteps;
  std::string message;
  std::int64_t rejected_steps = 0;
  GridMapState final_state;
};

/// Per-node quantities of one state.
struct GridDiagnostics {
  std::vector<double> tension;  // [α * nodes + node]
  double energy = 0.0;
  double sup_tension = 0.0;  // max_node |τ|_h
  double sup_dphi = 0.0;     // max_node operator norm of dφ into (T N, h)
};

/// Precompiled target data shared by all steps of a flow.
class GridTarget {
 public:
  explicit GridTarget(ChartManifold target);
  const ChartManifold& manifold() const { return target_; }
  /// Metric entries (n*n planes) and Christoffel symbols (n³ planes) at every node.
  void eval(const GridMapState& state, std::vector<double>& metric, std::vector<double>& christoffel,
            const simd::Kernels& k) const;

 private:
  ChartManifold target_;
  symbolic::Tape metric_tape_;
  symbolic::Tape christoffel_tape_;
};

/// Throws ChartExit naming the first node outside the target chart.
void check_in_chart(const GridMapState& state, const ChartManifold& target);

GridDiagnostics diagnose(const GridMapState& state, const GridTarget& target, const simd::Kernels& k);
GridDiagnostics diagnose(const GridMapState& state, const ChartManifold& target);

/// τ at every node from periodic central differences.
std::vector<double> tension_grid(const GridMapState& state, const ChartManifold& target);
/// ½ Σ_nodes |dφ|²_h · cell volume with one-sided (forward) differences.
double total_energy(const GridMapState& state, const ChartManifold& target);

/// One guarded explicit Euler step. Returns the energy after the step and
/// the number of rejected attempts; throws EnergyIncrease under the abort
/// policy or when halving is exhausted.
struct StepResult {
  GridMapState state;
  double dt = 0.0;
  int rejected = 0;
};
StepResult flow_step(const GridMapState& state, const ChartManifold& target, const FlowConfig& config);

FlowTrace run_flow(const GridMapState& initial, const ChartManifold& target, const FlowConfig& config);

/// Header `step,t,energy,sup_tension,sup_dphi`.
void write_trace_csv(std::ostream& os, const FlowTrace& trace);
/// One node per line: grid indices then target coordinates.
void write_state(std::ostream& os, const GridMapState& state);

/// I(v, w) = ∫ h(J_φ(v), w) by equal-weight quadrature on the grid; φ must
/// have the flat torus as domain.
double index_form(const maps::SmoothMap& phi, const maps::FieldAlongMap& v, const maps::FieldAlongMap& w,
                  const std::vector<int>& resolution);

}  // namespace liouville::flow
