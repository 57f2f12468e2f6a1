#pragma once

#include "dfn/geometry.hpp"
#include "dfn/laws.hpp"
#include "dfn/mixed_fem.hpp"

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <string>

namespace dfn {

enum class InitialConfiguration { AllLow, AllHigh, FromFile };
enum class OutputFormat { Csv, Json };

struct SolverSettings {
  double h = 0.05;
  double eps_nl = 1e-4;
  int max_nonlinear = 50;
  double eps_gamma = 1e-10;
  /// Unset means eps_omega = h.
  std::optional<double> eps_omega;
  int max_outer = 50;
  InitialConfiguration initial = InitialConfiguration::AllLow;
  /// JSON document {"regimes": ["low", "high", ...]} with one entry per base element.
  std::string initial_file;
  /// Loaded from initial_file when initial == FromFile.
  std::optional<RegimeField> initial_labels;
};

struct OutputSettings {
  std::string dir = "out";
  OutputFormat format = OutputFormat::Json;
  bool trace = false;
};

struct ProblemSpec {
  std::string name = "problem";
  /// Set when the network came from a separate file; serialization inlines it.
  std::string network_file;
  bool approximate_geometry = false;
  FractureNetwork network;
  AdaptiveLaw law;
  SolverSettings solver;
  OutputSettings output;

  double eps_omega() const { return solver.eps_omega.value_or(solver.h); }
};

/// Strict parse: unknown keys, wrong types and invariant violations raise
/// ConfigError naming the key path. Relative file references resolve
/// against `base_dir`.
ProblemSpec parse_config(const nlohmann::json& document, const std::filesystem::path& base_dir = {});
ProblemSpec load_config(const std::filesystem::path& path);

/// Parses a network document ({branches, intersections, boundary, sources}).
FractureNetwork parse_network(const nlohmann::json& document, const std::string& path = "network",
                              bool* approximate = nullptr);

nlohmann::json serialize_network(const FractureNetwork& network, bool approximate = false);
nlohmann::json serialize_law(const AdaptiveLaw& law);
/// Inverse of parse_config; the network is always inlined.
nlohmann::json serialize_config(const ProblemSpec& spec);

const char* to_string(InitialConfiguration init);
const char* to_string(OutputFormat format);

}  // namespace dfn
