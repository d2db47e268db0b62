#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "wulff/check_report.hpp"
#include "wulff/convex_calculus.hpp"
#include "wulff/geometry.hpp"
#include "wulff/norms.hpp"
#include "wulff/transport.hpp"
#include "wulff/verifier.hpp"

namespace wulff {

enum class Scenario { NormIdentities, WulffIdentities, SolveAndVerify, Converse, ConvergenceStudy };

const char* to_string(Scenario scenario);
/// Throws InvalidInput for unknown names.
Scenario parse_scenario(const std::string& name);

struct Resolution {
  double grid_h = 1.0 / 128.0;  ///< lattice spacing of the radial-path domains
  int source_nodes = 2000;
  int target_nodes = 2000;
  int boundary_nodes = 512;
};

/// Knobs of the derivative-based and weak-form checks.
struct VerifierSettings {
  int identity_points = 100;
  /// Nodes with |grad u| below this are excluded from finite-difference checks.
  double exclusion = 0.4;
  /// Component band around the axes; negative selects 0.2 for PNorm and 0 otherwise.
  double axis_band = -1.0;
  int radial_target_nodes = 40000;
  /// Node multiplier of the refinement step in the converse experiment.
  double refine_factor = 2.0;
};

/// One batch run. NormSpec has no default, so norm is optional until parsed.
struct RunConfig {
  Scenario scenario = Scenario::NormIdentities;
  std::optional<NormSpec> norm;
  std::optional<DomainDescriptor> domain;
  Resolution resolution;
  SolverOptions solver;
  VerifierSettings verifier;
  std::vector<double> study_h = {1.0 / 32.0, 1.0 / 64.0, 1.0 / 128.0};
  std::uint64_t seed = 1;
  int threads = 1;
  std::string output_dir;
};

/// Parses a YAML run configuration after applying dot-path overrides of the
/// form "solver.max_sweeps=500". Errors name the offending field and line.
RunConfig parse_config(const std::string& text, const std::vector<std::string>& overrides = {});
RunConfig load_config(const std::string& path, const std::vector<std::string>& overrides = {});

/// YAML documents that parse_config (or the matching readers) accept back.
std::string to_yaml(const NormSpec& spec);
std::string to_yaml(const DomainDescriptor& descriptor);
std::string to_yaml(const RunConfig& config);

NormSpec norm_from_yaml(const std::string& text);
DomainDescriptor domain_from_yaml(const std::string& text, const std::optional<NormSpec>& default_norm = {});

/// Named numeric table written as CSV.
struct DataTable {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

struct ScenarioResult {
  Scenario scenario = Scenario::NormIdentities;
  std::vector<CheckReport> checks;
  std::vector<DataTable> tables;
  std::vector<std::string> notes;
  double seconds = 0.0;

  bool pass() const { return !checks.empty() && all_pass(checks); }
};

/// Text format: a header "dim origin... spacing... shape..." followed by one
/// "value mask" line per node in flat order, written with 17 significant digits.
std::string grid_to_text(const GridFunction& grid);
GridFunction grid_from_text(const std::string& text);

/// Plot tables.
DataTable grid_table(const std::string& name, const GridFunction& grid, const std::string& value_column = "value");
DataTable interior_table(const DiscreteDomain& domain);
DataTable boundary_table(const DiscreteDomain& domain);
DataTable trace_table(const std::string& name, const BoundaryStats& stats);
DataTable map_table(const TransportSolution& solution);
/// Rows (h, error, order); the order of the first row is NaN.
DataTable convergence_table(const std::vector<double>& h, const std::vector<double>& error);

std::string to_csv(const DataTable& table);
std::string report_json(const ScenarioResult& result, const RunConfig& config);

/// Writes report.json, checks.csv, summary.txt, config.yaml and one CSV per
/// table into dir (created if needed). Throws Error when dir is unwritable.
void write_outputs(const ScenarioResult& result, const RunConfig& config, const std::string& dir);

}  // namespace wulff
