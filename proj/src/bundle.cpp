#include "dfn/bundle.hpp"

#include "dfn/error.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <tuple>

namespace dfn {

using nlohmann::json;

Snapshot make_snapshot(const IterationRecord& record, const Configuration& solved_on, const FractureNetwork& network) {
  const Solution& sol = record.solution;
  const Mesh& mesh = sol.mesh;
  Snapshot snap;
  snap.iteration = record.configuration.iteration;
  snap.distance = record.distance;
  snap.inner_iterations = record.inner_iterations;
  snap.junction_pressure = sol.junction_pressure;
  snap.junction_pressure_jump = record.junction_pressure_jump;
  for (std::size_t br = 0; br < mesh.branch_count(); ++br) {
    const auto& bm = mesh.branch(br);
    BranchSnapshot b;
    b.branch = network.branches[br].id;
    b.nodes = bm.nodes;
    b.flux = sol.flux[br];
    const std::size_t off = mesh.element_offset(br);
    b.pressure.assign(sol.pressure.begin() + static_cast<std::ptrdiff_t>(off),
                      sol.pressure.begin() + static_cast<std::ptrdiff_t>(off + bm.element_count()));
    b.regimes.assign(solved_on.regimes.begin() + static_cast<std::ptrdiff_t>(off),
                     solved_on.regimes.begin() + static_cast<std::ptrdiff_t>(off + bm.element_count()));
    snap.branches.push_back(std::move(b));
  }
  for (const auto& p : record.configuration.interfaces)
    snap.interfaces.push_back({network.branches[p.branch].id, p.arc});
  return snap;
}

RunRecord make_run_record(const std::string& label, const TrackerReport& report, const FractureNetwork& network,
                          bool trace) {
  RunRecord run;
  run.label = label;
  run.status = to_string(report.status);
  run.period = report.period;
  run.outer_iterations = report.outer_iterations;
  run.inner_iterations = report.inner_iteration_counts;
  for (std::size_t k = 0; k < report.history.size(); ++k) {
    run.distances.push_back(report.history[k].distance);
    const Configuration& solved_on = k == 0 ? report.initial : report.history[k - 1].configuration;
    if (trace || k + 1 == report.history.size()) {
      Snapshot snap = make_snapshot(report.history[k], solved_on, network);
      if (trace) run.snapshots.push_back(snap);
      if (k + 1 == report.history.size()) run.final_state = std::move(snap);
    }
  }
  return run;
}

namespace {

// JSON has no infinities; non-finite values travel as strings.
json num(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

double get_num(const json& j) {
  if (j.is_number()) return j.get<double>();
  const auto s = j.get<std::string>();
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  throw ConfigError("bundle: bad number '" + s + "'");
}

json nums(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(num(x));
  return a;
}

std::vector<double> get_nums(const json& j) {
  std::vector<double> v;
  for (const auto& x : j) v.push_back(get_num(x));
  return v;
}

json snapshot_json(const Snapshot& s) {
  json branches = json::array();
  for (const auto& b : s.branches) {
    json regimes = json::array();
    for (Regime r : b.regimes) regimes.push_back(to_string(r));
    branches.push_back({{"branch", b.branch},
                        {"nodes", nums(b.nodes)},
                        {"flux", nums(b.flux)},
                        {"pressure", nums(b.pressure)},
                        {"regimes", regimes}});
  }
  json interfaces = json::array();
  for (const auto& p : s.interfaces) interfaces.push_back({{"branch", p.branch}, {"arc", num(p.arc)}});
  return {{"iteration", s.iteration},
          {"distance", num(s.distance)},
          {"innerIterations", s.inner_iterations},
          {"branches", branches},
          {"interfaces", interfaces},
          {"junctionPressure", nums(s.junction_pressure)},
          {"junctionPressureJump", num(s.junction_pressure_jump)}};
}

Snapshot snapshot_from(const json& j) {
  Snapshot s;
  s.iteration = j.at("iteration").get<int>();
  s.distance = get_num(j.at("distance"));
  s.inner_iterations = j.at("innerIterations").get<int>();
  for (const auto& b : j.at("branches")) {
    BranchSnapshot bs;
    bs.branch = b.at("branch").get<std::string>();
    bs.nodes = get_nums(b.at("nodes"));
    bs.flux = get_nums(b.at("flux"));
    bs.pressure = get_nums(b.at("pressure"));
    for (const auto& r : b.at("regimes")) bs.regimes.push_back(r.get<std::string>() == "low" ? Regime::Low : Regime::High);
    s.branches.push_back(std::move(bs));
  }
  for (const auto& p : j.at("interfaces")) s.interfaces.push_back({p.at("branch").get<std::string>(), get_num(p.at("arc"))});
  s.junction_pressure = get_nums(j.at("junctionPressure"));
  s.junction_pressure_jump = get_num(j.at("junctionPressureJump"));
  return s;
}

std::string fmt(double v) {
  if (!std::isfinite(v)) return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

struct Row {
  std::string branch;
  double arc;
  std::string value;
};

void write_rows(const std::filesystem::path& file, std::vector<Row> rows, std::vector<std::filesystem::path>& written) {
  std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
    return std::tie(a.branch, a.arc) < std::tie(b.branch, b.arc);
  });
  std::ofstream out(file, std::ios::binary);
  if (!out) throw Error("cannot write '" + file.string() + "'");
  out << "branch,arc,value\n";
  for (const auto& r : rows) out << r.branch << ',' << fmt(r.arc) << ',' << r.value << '\n';
  if (!out) throw Error("write failed for '" + file.string() + "'");
  written.push_back(file);
}

void write_snapshot_csv(const Snapshot& s, const std::filesystem::path& dir, const std::string& prefix,
                        std::vector<std::filesystem::path>& written) {
  std::vector<Row> flux;
  std::vector<Row> pressure;
  std::vector<Row> regime;
  std::vector<Row> interfaces;
  for (const auto& b : s.branches) {
    for (std::size_t i = 0; i < b.nodes.size(); ++i) flux.push_back({b.branch, b.nodes[i], fmt(b.flux[i])});
    for (std::size_t e = 0; e < b.pressure.size(); ++e) {
      const double mid = 0.5 * (b.nodes[e] + b.nodes[e + 1]);
      pressure.push_back({b.branch, mid, fmt(b.pressure[e])});
      regime.push_back({b.branch, mid, to_string(b.regimes[e])});
    }
  }
  for (const auto& p : s.interfaces) interfaces.push_back({p.branch, p.arc, "interface"});
  write_rows(dir / (prefix + "_flux.csv"), std::move(flux), written);
  write_rows(dir / (prefix + "_pressure.csv"), std::move(pressure), written);
  write_rows(dir / (prefix + "_regime.csv"), std::move(regime), written);
  write_rows(dir / (prefix + "_interfaces.csv"), std::move(interfaces), written);
}

std::ofstream open_csv(const std::filesystem::path& file) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw Error("cannot write '" + file.string() + "'");
  return out;
}

std::string safe_name(const std::string& label) {
  std::string s = label;
  for (char& c : s)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.')) c = '_';
  return s.empty() ? "run" : s;
}

}  // namespace

json to_json(const ResultBundle& bundle) {
  json runs = json::array();
  for (const auto& r : bundle.runs) {
    json params = json::object();
    for (const auto& [k, v] : r.parameters) params[k] = num(v);
    json snaps = json::array();
    for (const auto& s : r.snapshots) snaps.push_back(snapshot_json(s));
    runs.push_back({{"label", r.label},
                    {"parameters", params},
                    {"status", r.status},
                    {"period", r.period},
                    {"outerIterations", r.outer_iterations},
                    {"innerIterations", r.inner_iterations},
                    {"distances", nums(r.distances)},
                    {"snapshots", snaps},
                    {"final", snapshot_json(r.final_state)},
                    {"error", r.error},
                    {"seconds", num(r.seconds)}});
  }
  json energy = json::array();
  for (const auto& e : bundle.energy)
    energy.push_back({{"label", e.label},
                      {"dissipation", num(e.dissipation)},
                      {"energy", num(e.energy)},
                      {"f0", num(e.f0)},
                      {"quadrature", e.quadrature},
                      {"alphaStar", num(e.alpha_star)},
                      {"oracleEnergy", num(e.oracle_energy)},
                      {"alphaFem", num(e.alpha_fem)}});
  json table = json::array();
  for (const auto& t : bundle.table)
    table.push_back({{"epsNl", num(t.eps_nl)},
                     {"outerIterations", t.outer_iterations},
                     {"innerIterations", t.inner_iterations},
                     {"errP", num(t.err_p)},
                     {"errU", num(t.err_u)}});
  return {{"schemaVersion", bundle.schema_version},
          {"preset", bundle.preset},
          {"runs", runs},
          {"energy", energy},
          {"table", table},
          {"seconds", num(bundle.seconds)}};
}

ResultBundle bundle_from_json(const json& doc) {
  ResultBundle b;
  try {
    b.schema_version = doc.at("schemaVersion").get<int>();
    if (b.schema_version != ResultBundle::kSchemaVersion)
      throw ConfigError("bundle: unsupported schemaVersion " + std::to_string(b.schema_version));
    b.preset = doc.at("preset").get<std::string>();
    for (const auto& r : doc.at("runs")) {
      RunRecord run;
      run.label = r.at("label").get<std::string>();
      for (const auto& [k, v] : r.at("parameters").items()) run.parameters[k] = get_num(v);
      run.status = r.at("status").get<std::string>();
      run.period = r.at("period").get<int>();
      run.outer_iterations = r.at("outerIterations").get<int>();
      run.inner_iterations = r.at("innerIterations").get<std::vector<int>>();
      run.distances = get_nums(r.at("distances"));
      for (const auto& s : r.at("snapshots")) run.snapshots.push_back(snapshot_from(s));
      run.final_state = snapshot_from(r.at("final"));
      run.error = r.at("error").get<std::string>();
      run.seconds = get_num(r.at("seconds"));
      b.runs.push_back(std::move(run));
    }
    for (const auto& e : doc.at("energy"))
      b.energy.push_back({e.at("label").get<std::string>(), get_num(e.at("dissipation")), get_num(e.at("energy")),
                          get_num(e.at("f0")), e.at("quadrature").get<std::string>(), get_num(e.at("alphaStar")),
                          get_num(e.at("oracleEnergy")), get_num(e.at("alphaFem"))});
    for (const auto& t : doc.at("table"))
      b.table.push_back({get_num(t.at("epsNl")), t.at("outerIterations").get<int>(),
                         t.at("innerIterations").get<int>(), get_num(t.at("errP")), get_num(t.at("errU"))});
    b.seconds = get_num(doc.at("seconds"));
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bundle: ") + e.what());
  }
  return b;
}

std::vector<std::filesystem::path> export_bundle(const ResultBundle& bundle, const std::filesystem::path& dir,
                                                 OutputFormat format) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error("cannot create '" + dir.string() + "': " + ec.message());
  std::vector<std::filesystem::path> written;
  const std::string stem = safe_name(bundle.preset);

  if (format == OutputFormat::Json) {
    const auto file = dir / (stem + ".json");
    std::ofstream out(file, std::ios::binary);
    if (!out) throw Error("cannot write '" + file.string() + "'");
    out << to_json(bundle).dump(2) << '\n';
    if (!out) throw Error("write failed for '" + file.string() + "'");
    written.push_back(file);
    return written;
  }

  for (const auto& run : bundle.runs) {
    const auto rdir = dir / safe_name(run.label);
    std::filesystem::create_directories(rdir, ec);
    if (ec) throw Error("cannot create '" + rdir.string() + "': " + ec.message());
    {
      const auto file = rdir / "report.csv";
      auto out = open_csv(file);
      out << "key,value\n";
      out << "status," << run.status << '\n' << "period," << run.period << '\n';
      out << "outer_iterations," << run.outer_iterations << '\n';
      for (const auto& [k, v] : run.parameters) out << "parameter." << k << ',' << fmt(v) << '\n';
      out << "error," << run.error << '\n' << "seconds," << fmt(run.seconds) << '\n';
      written.push_back(file);
    }
    {
      const auto file = rdir / "iterations.csv";
      auto out = open_csv(file);
      out << "iteration,distance,inner_iterations\n";
      for (std::size_t k = 0; k < run.distances.size(); ++k)
        out << k + 1 << ',' << fmt(run.distances[k]) << ','
            << (k < run.inner_iterations.size() ? run.inner_iterations[k] : 0) << '\n';
      written.push_back(file);
    }
    if (!run.final_state.branches.empty()) write_snapshot_csv(run.final_state, rdir, "final", written);
    for (const auto& s : run.snapshots) write_snapshot_csv(s, rdir, "iter" + std::to_string(s.iteration), written);
  }
  if (!bundle.energy.empty()) {
    const auto file = dir / "energy.csv";
    auto out = open_csv(file);
    out << "label,dissipation,energy,f0,quadrature,alpha_star,oracle_energy,alpha_fem\n";
    for (const auto& e : bundle.energy)
      out << e.label << ',' << fmt(e.dissipation) << ',' << fmt(e.energy) << ',' << fmt(e.f0) << ',' << e.quadrature
          << ',' << fmt(e.alpha_star) << ',' << fmt(e.oracle_energy) << ',' << fmt(e.alpha_fem) << '\n';
    written.push_back(file);
  }
  if (!bundle.table.empty()) {
    const auto file = dir / "table.csv";
    auto out = open_csv(file);
    out << "eps_nl,outer_iterations,inner_iterations,err_p,err_u\n";
    for (const auto& t : bundle.table)
      out << fmt(t.eps_nl) << ',' << t.outer_iterations << ',' << t.inner_iterations << ',' << fmt(t.err_p) << ','
          << fmt(t.err_u) << '\n';
    written.push_back(file);
  }
  return written;
}

ResultBundle import_bundle(const std::filesystem::path& json_file) {
  std::ifstream in(json_file);
  if (!in) throw Error("cannot read '" + json_file.string() + "'");
  try {
    return bundle_from_json(json::parse(in));
  } catch (const json::parse_error& e) {
    throw ConfigError(json_file.string() + ": " + e.what());
  }
}

}  // namespace dfn
