#pragma once

#include "dfn/config.hpp"
#include "dfn/tracker.hpp"

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace dfn {

struct BranchSnapshot {
  std::string branch;
  std::vector<double> nodes;
  std::vector<double> flux;
  /// Per element, with the regime the element was solved with.
  std::vector<double> pressure;
  std::vector<Regime> regimes;

  bool operator==(const BranchSnapshot&) const = default;
};

struct InterfaceRecord {
  std::string branch;
  double arc = 0.0;

  bool operator==(const InterfaceRecord&) const = default;
};

/// One outer iteration: the solution computed on the current configuration
/// and the interfaces located from it.
struct Snapshot {
  int iteration = 0;
  double distance = 0.0;
  int inner_iterations = 0;
  std::vector<BranchSnapshot> branches;
  std::vector<InterfaceRecord> interfaces;
  std::vector<double> junction_pressure;
  double junction_pressure_jump = 0.0;

  bool operator==(const Snapshot&) const = default;
};

struct RunRecord {
  std::string label;
  std::map<std::string, double> parameters;
  /// Tracker status, or "error" with `error` set.
  std::string status;
  int period = 0;
  int outer_iterations = 0;
  std::vector<int> inner_iterations;
  std::vector<double> distances;
  std::vector<Snapshot> snapshots;
  Snapshot final_state;
  std::string error;
  double seconds = 0.0;

  bool operator==(const RunRecord&) const = default;
};

struct EnergyRecord {
  std::string label;
  double dissipation = 0.0;
  double energy = 0.0;
  double f0 = 0.0;
  std::string quadrature;
  double alpha_star = 0.0;
  double oracle_energy = 0.0;
  /// Mean of u_h - u_hat over the nodes of the final solution.
  double alpha_fem = 0.0;

  bool operator==(const EnergyRecord&) const = default;
};

struct ToleranceRow {
  double eps_nl = 0.0;
  int outer_iterations = 0;
  int inner_iterations = 0;
  double err_p = 0.0;
  double err_u = 0.0;

  bool operator==(const ToleranceRow&) const = default;
};

struct ResultBundle {
  static constexpr int kSchemaVersion = 1;

  int schema_version = kSchemaVersion;
  std::string preset;
  std::vector<RunRecord> runs;
  std::vector<EnergyRecord> energy;
  std::vector<ToleranceRow> table;
  double seconds = 0.0;

  bool operator==(const ResultBundle&) const = default;
};

Snapshot make_snapshot(const IterationRecord& record, const Configuration& solved_on, const FractureNetwork& network);

/// Fills a run record from a tracker report; snapshots only when `trace` is set.
RunRecord make_run_record(const std::string& label, const TrackerReport& report, const FractureNetwork& network,
                          bool trace);

nlohmann::json to_json(const ResultBundle& bundle);
ResultBundle bundle_from_json(const nlohmann::json& document);

/// Writes the bundle under `dir` and returns the files written. JSON is one
/// document; CSV writes a summary per run, the final fields, and one file per
/// field per traced iteration.
std::vector<std::filesystem::path> export_bundle(const ResultBundle& bundle, const std::filesystem::path& dir,
                                                 OutputFormat format);

ResultBundle import_bundle(const std::filesystem::path& json_file);

}  // namespace dfn
