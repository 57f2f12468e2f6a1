// dfnflow: command-line driver for the adaptive-law fracture flow solver.
//
//   dfnflow solve <config.json> [flags]
//   dfnflow preset <name> [flags]
//   dfnflow sweep-k2 <config.json> [flags]
//
// Exit codes: 0 converged, 2 oscillating, 3 max iterations reached, 1 error.

#include "dfn/error.hpp"
#include "dfn/presets.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>

namespace {

struct Overrides {
  std::optional<double> h;
  std::optional<double> eps_nl;
  std::optional<double> eps_gamma;
  std::optional<double> eps_omega;
  std::optional<int> max_outer;
  std::optional<std::string> init;
  bool trace = false;
  std::optional<std::string> out;
  std::optional<std::string> format;

  void apply(dfn::ProblemSpec& spec) const {
    if (h) spec.solver.h = *h;
    if (eps_nl) spec.solver.eps_nl = *eps_nl;
    if (eps_gamma) spec.solver.eps_gamma = *eps_gamma;
    if (eps_omega) spec.solver.eps_omega = *eps_omega;
    if (max_outer) spec.solver.max_outer = *max_outer;
    if (init) spec.solver.initial = *init == "high" ? dfn::InitialConfiguration::AllHigh : dfn::InitialConfiguration::AllLow;
    if (trace) spec.output.trace = true;
    if (out) spec.output.dir = *out;
    if (format) spec.output.format = *format == "csv" ? dfn::OutputFormat::Csv : dfn::OutputFormat::Json;
  }
};

int status_code(const std::string& status) {
  if (status == "converged") return 0;
  if (status == "oscillating") return 2;
  if (status == "max-iterations") return 3;
  return 1;
}

void print_summary(const dfn::ResultBundle& bundle) {
  for (const auto& run : bundle.runs) {
    std::cout << run.label << ": " << run.status;
    if (run.status == "oscillating") std::cout << " (period " << run.period << ")";
    if (run.status == "error") std::cout << " - " << run.error;
    else std::cout << " after " << run.outer_iterations << " outer iterations, interfaces "
                   << run.final_state.interfaces.size();
    std::cout << '\n';
  }
  for (const auto& e : bundle.energy)
    std::cout << e.label << ": energy " << e.energy << ", alpha* " << e.alpha_star << ", FEM alpha " << e.alpha_fem
              << '\n';
  if (!bundle.table.empty()) {
    std::cout << "eps_nl  it_out  it_in  err_p  err_u\n";
    for (const auto& t : bundle.table)
      std::cout << t.eps_nl << "  " << t.outer_iterations << "  " << t.inner_iterations << "  " << t.err_p << "  "
                << t.err_u << '\n';
  }
}

int finish(const dfn::ResultBundle& bundle, const std::string& dir, dfn::OutputFormat format, bool single) {
  print_summary(bundle);
  for (const auto& file : dfn::export_bundle(bundle, dir, format)) std::cout << "wrote " << file.string() << '\n';
  if (single) return status_code(bundle.runs.front().status);
  for (const auto& run : bundle.runs)
    if (run.status == "error") return 1;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adaptive-law discrete fracture network flow solver"};
  app.set_help_flag("--help", "Print this help message and exit");
  app.require_subcommand(1);
  app.fallthrough();

  Overrides ov;
  app.add_option("--h", ov.h, "Target mesh size")->check(CLI::PositiveNumber);
  app.add_option("--eps-nl", ov.eps_nl, "Picard tolerance")->check(CLI::PositiveNumber);
  app.add_option("--eps-gamma", ov.eps_gamma, "Interface location tolerance")->check(CLI::PositiveNumber);
  app.add_option("--eps-omega", ov.eps_omega, "Configuration distance threshold (default h)")
      ->check(CLI::PositiveNumber);
  app.add_option("--max-outer", ov.max_outer, "Maximum outer iterations")->check(CLI::PositiveNumber);
  app.add_option("--init", ov.init, "Initial configuration")->check(CLI::IsMember({"low", "high"}));
  app.add_flag("--trace", ov.trace, "Export every outer iteration");
  app.add_option("--out", ov.out, "Output directory");
  app.add_option("--format", ov.format, "Export format")->check(CLI::IsMember({"csv", "json"}));

  std::string config;
  std::string preset;
  auto* solve = app.add_subcommand("solve", "Run the tracker on a config file");
  solve->add_option("config", config, "Config file")->required()->check(CLI::ExistingFile);
  auto* pre = app.add_subcommand("preset", "Run a built-in experiment");
  pre->add_option("name", preset, "Preset name")->required()->check(CLI::IsMember(dfn::preset_names()));
  auto* sweep = app.add_subcommand("sweep-k2", "Sweep the high-regime permeability of a config");
  sweep->add_option("config", config, "Config file")->required()->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    auto adjust = [&ov](dfn::ProblemSpec& spec) { ov.apply(spec); };
    const auto format = !ov.format ? dfn::OutputFormat::Json
                                   : (*ov.format == "csv" ? dfn::OutputFormat::Csv : dfn::OutputFormat::Json);
    if (*solve) {
      dfn::ProblemSpec spec = dfn::load_config(config);
      adjust(spec);
      return finish(dfn::run_spec(spec), spec.output.dir, spec.output.format, true);
    }
    if (*pre) {
      const auto bundle = dfn::run_preset(preset, adjust);
      const bool single = preset != "k2-sweep" && preset != "nl-tolerance-table";
      return finish(bundle, ov.out.value_or("out/" + preset), format, single);
    }
    dfn::ProblemSpec spec = dfn::load_config(config);
    adjust(spec);
    const auto bundle = dfn::sweep_k2(spec, dfn::default_k2_grid(), adjust);
    return finish(bundle, spec.output.dir, spec.output.format, false);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
