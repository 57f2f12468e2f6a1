#include "dfn/config.hpp"

#include "dfn/error.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace dfn {

using nlohmann::json;

const char* to_string(InitialConfiguration init) {
  switch (init) {
    case InitialConfiguration::AllLow: return "low";
    case InitialConfiguration::AllHigh: return "high";
    case InitialConfiguration::FromFile: return "file";
  }
  return "?";
}

const char* to_string(OutputFormat format) { return format == OutputFormat::Csv ? "csv" : "json"; }

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) { throw ConfigError(path + ": " + what); }

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }
std::string index(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

const json& require_object(const json& j, const std::string& path, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) fail(path, "expected an object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, _] : j.items())
    if (!ok.count(key)) fail(join(path, key), "unknown key '" + key + "'");
  return j;
}

const json& member(const json& obj, const std::string& path, const char* key) {
  if (!obj.contains(key)) fail(join(path, key), "missing required key");
  return obj.at(key);
}

double number(const json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  return j.get<double>();
}

double positive(const json& j, const std::string& path) {
  const double v = number(j, path);
  if (!(v > 0.0)) fail(path, "must be positive");
  return v;
}

int positive_int(const json& j, const std::string& path) {
  if (!j.is_number_integer() || j.get<long long>() < 1) fail(path, "expected a positive integer");
  return j.get<int>();
}

std::string text(const json& j, const std::string& path) {
  if (!j.is_string()) fail(path, "expected a string");
  return j.get<std::string>();
}

bool boolean(const json& j, const std::string& path) {
  if (!j.is_boolean()) fail(path, "expected a boolean");
  return j.get<bool>();
}

Point2 point(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 2) fail(path, "expected [x, y]");
  return {number(j[0], index(path, 0)), number(j[1], index(path, 1))};
}

std::vector<double> numbers(const json& j, const std::string& path) {
  if (!j.is_array()) fail(path, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(number(j[i], index(path, i)));
  return out;
}

BranchEnd branch_end(const json& j, const std::string& path) {
  const auto s = text(j, path);
  if (s == "start") return BranchEnd::Start;
  if (s == "end") return BranchEnd::End;
  fail(path, "expected \"start\" or \"end\"");
}

BranchEndRef end_ref(const json& j, const std::string& path, std::initializer_list<const char*> allowed) {
  require_object(j, path, allowed);
  return {text(member(j, path, "branch"), join(path, "branch")), branch_end(member(j, path, "end"), join(path, "end"))};
}

LawBranch parse_law_branch(const json& j, const std::string& path) {
  require_object(j, path, {"type", "params"});
  const auto type = text(member(j, path, "type"), join(path, "type"));
  const std::string ppath = join(path, "params");
  const json& params = member(j, path, "params");
  if (type == "constant") {
    require_object(params, ppath, {"lambda"});
    return LawBranch::constant(positive(member(params, ppath, "lambda"), join(ppath, "lambda")));
  }
  if (type == "affine") {
    require_object(params, ppath, {"beta0", "beta1"});
    const double b0 = number(member(params, ppath, "beta0"), join(ppath, "beta0"));
    const double b1 = number(member(params, ppath, "beta1"), join(ppath, "beta1"));
    if (b0 < 0.0 || b1 < 0.0 || !(b0 + b1 > 0.0)) fail(ppath, "need beta0 >= 0, beta1 >= 0, beta0 + beta1 > 0");
    return LawBranch::affine(b0, b1);
  }
  fail(join(path, "type"), "unknown law type '" + type + "' (expected constant or affine)");
}

AdaptiveLaw parse_law(const json& j, const std::string& path) {
  require_object(j, path, {"low", "high", "threshold"});
  AdaptiveLaw law;
  law.low = parse_law_branch(member(j, path, "low"), join(path, "low"));
  law.high = parse_law_branch(member(j, path, "high"), join(path, "high"));
  law.threshold = positive(member(j, path, "threshold"), join(path, "threshold"));
  return law;
}

json law_branch_json(const LawBranch& b) {
  switch (b.kind) {
    case LawBranch::Kind::Constant: return {{"type", "constant"}, {"params", {{"lambda", b.beta0}}}};
    case LawBranch::Kind::Affine:
      return {{"type", "affine"}, {"params", {{"beta0", b.beta0}, {"beta1", b.beta1}}}};
    case LawBranch::Kind::Custom: break;
  }
  throw ConfigError("custom law branches cannot be serialized");
}

RegimeField load_initial_labels(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("solver.initialFile: cannot open '" + file.string() + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("solver.initialFile: " + std::string(e.what()));
  }
  const std::string path = file.string();
  require_object(doc, path, {"regimes"});
  const json& arr = member(doc, path, "regimes");
  if (!arr.is_array()) fail(join(path, "regimes"), "expected an array");
  RegimeField out;
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const auto s = text(arr[i], index(join(path, "regimes"), i));
    if (s == "low") out.push_back(Regime::Low);
    else if (s == "high") out.push_back(Regime::High);
    else fail(index(join(path, "regimes"), i), "expected \"low\" or \"high\"");
  }
  return out;
}

json read_json_file(const std::filesystem::path& file, const std::string& what) {
  std::ifstream in(file);
  if (!in) throw ConfigError(what + ": cannot open '" + file.string() + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(what + ": " + file.string() + ": " + e.what());
  }
}

}  // namespace

FractureNetwork parse_network(const json& doc, const std::string& path, bool* approximate) {
  require_object(doc, path, {"branches", "intersections", "boundary", "sources", "approximate", "description"});
  FractureNetwork net;
  if (doc.contains("approximate")) {
    const bool a = boolean(doc.at("approximate"), join(path, "approximate"));
    if (approximate) *approximate = a;
  }
  if (doc.contains("description")) text(doc.at("description"), join(path, "description"));

  const std::string bpath = join(path, "branches");
  const json& branches = member(doc, path, "branches");
  if (!branches.is_array()) fail(bpath, "expected an array");
  for (std::size_t i = 0; i < branches.size(); ++i) {
    const std::string p = index(bpath, i);
    require_object(branches[i], p, {"id", "start", "end"});
    net.branches.push_back({text(member(branches[i], p, "id"), join(p, "id")),
                            point(member(branches[i], p, "start"), join(p, "start")),
                            point(member(branches[i], p, "end"), join(p, "end"))});
  }

  if (doc.contains("intersections")) {
    const std::string ipath = join(path, "intersections");
    const json& inters = doc.at("intersections");
    if (!inters.is_array()) fail(ipath, "expected an array");
    for (std::size_t i = 0; i < inters.size(); ++i) {
      const std::string p = index(ipath, i);
      require_object(inters[i], p, {"id", "point", "incident"});
      Intersection inter{text(member(inters[i], p, "id"), join(p, "id")),
                         point(member(inters[i], p, "point"), join(p, "point")),
                         {}};
      const json& inc = member(inters[i], p, "incident");
      if (!inc.is_array()) fail(join(p, "incident"), "expected an array");
      for (std::size_t k = 0; k < inc.size(); ++k)
        inter.incident.push_back(end_ref(inc[k], index(join(p, "incident"), k), {"branch", "end"}));
      net.intersections.push_back(std::move(inter));
    }
  }

  const std::string bcpath = join(path, "boundary");
  const json& boundary = member(doc, path, "boundary");
  require_object(boundary, bcpath, {"conditions", "meanPressure"});
  if (boundary.contains("meanPressure"))
    net.boundary.mean_pressure = number(boundary.at("meanPressure"), join(bcpath, "meanPressure"));
  if (boundary.contains("conditions")) {
    const std::string cpath = join(bcpath, "conditions");
    const json& conds = boundary.at("conditions");
    if (!conds.is_array()) fail(cpath, "expected an array");
    for (std::size_t i = 0; i < conds.size(); ++i) {
      const std::string p = index(cpath, i);
      const auto where = end_ref(conds[i], p, {"branch", "end", "type", "value"});
      const auto type = text(member(conds[i], p, "type"), join(p, "type"));
      const double value = number(member(conds[i], p, "value"), join(p, "value"));
      if (type == "pressure") net.boundary.conditions.push_back({where, PressureBC{value}});
      else if (type == "velocity") net.boundary.conditions.push_back({where, VelocityBC{value}});
      else fail(join(p, "type"), "expected \"pressure\" or \"velocity\"");
    }
  }

  if (doc.contains("sources")) {
    const std::string spath = join(path, "sources");
    const json& sources = doc.at("sources");
    require_object(sources, spath, {"scalar", "force"});
    if (sources.contains("force")) net.sources.force = point(sources.at("force"), join(spath, "force"));
    if (sources.contains("scalar")) {
      const std::string qpath = join(spath, "scalar");
      const json& scalar = sources.at("scalar");
      if (!scalar.is_array()) fail(qpath, "expected an array");
      for (std::size_t i = 0; i < scalar.size(); ++i) {
        const std::string p = index(qpath, i);
        require_object(scalar[i], p, {"branch", "breakpoints", "values"});
        BranchSource src;
        if (scalar[i].contains("breakpoints"))
          src.breakpoints = numbers(scalar[i].at("breakpoints"), join(p, "breakpoints"));
        src.values = numbers(member(scalar[i], p, "values"), join(p, "values"));
        if (src.values.size() != src.breakpoints.size() + 1)
          fail(join(p, "values"), "needs exactly one more entry than breakpoints");
        net.sources.scalar.emplace_back(text(member(scalar[i], p, "branch"), join(p, "branch")), std::move(src));
      }
    }
  }

  const auto report = validate_network(net);
  if (!report.ok()) {
    std::ostringstream msg;
    for (std::size_t i = 0; i < report.violations.size(); ++i) msg << (i ? "; " : "") << report.violations[i];
    fail(path, msg.str());
  }
  return net;
}

ProblemSpec parse_config(const json& doc, const std::filesystem::path& base_dir) {
  require_object(doc, "", {"name", "network", "networkFile", "law", "solver", "output"});
  ProblemSpec spec;
  if (doc.contains("name")) spec.name = text(doc.at("name"), "name");

  if (doc.contains("network") == doc.contains("networkFile"))
    fail("network", "exactly one of 'network' and 'networkFile' is required");
  if (doc.contains("network")) {
    spec.network = parse_network(doc.at("network"), "network", &spec.approximate_geometry);
  } else {
    spec.network_file = text(doc.at("networkFile"), "networkFile");
    std::filesystem::path file(spec.network_file);
    if (file.is_relative()) file = base_dir / file;
    spec.network = parse_network(read_json_file(file, "networkFile"), file.string(), &spec.approximate_geometry);
  }

  spec.law = parse_law(member(doc, "", "law"), "law");

  if (doc.contains("solver")) {
    const json& s = doc.at("solver");
    require_object(s, "solver",
                   {"h", "epsNl", "maxNonlinear", "epsGamma", "epsOmega", "maxOuter", "initial", "initialFile"});
    auto& sv = spec.solver;
    if (s.contains("h")) sv.h = positive(s.at("h"), "solver.h");
    if (s.contains("epsNl")) sv.eps_nl = positive(s.at("epsNl"), "solver.epsNl");
    if (s.contains("maxNonlinear")) sv.max_nonlinear = positive_int(s.at("maxNonlinear"), "solver.maxNonlinear");
    if (s.contains("epsGamma")) sv.eps_gamma = positive(s.at("epsGamma"), "solver.epsGamma");
    if (s.contains("epsOmega")) sv.eps_omega = positive(s.at("epsOmega"), "solver.epsOmega");
    if (s.contains("maxOuter")) sv.max_outer = positive_int(s.at("maxOuter"), "solver.maxOuter");
    if (s.contains("initial")) {
      const auto init = text(s.at("initial"), "solver.initial");
      if (init == "low") sv.initial = InitialConfiguration::AllLow;
      else if (init == "high") sv.initial = InitialConfiguration::AllHigh;
      else if (init == "file") sv.initial = InitialConfiguration::FromFile;
      else fail("solver.initial", "expected \"low\", \"high\" or \"file\"");
    }
    if (s.contains("initialFile")) sv.initial_file = text(s.at("initialFile"), "solver.initialFile");
    if (sv.initial == InitialConfiguration::FromFile) {
      if (sv.initial_file.empty()) fail("solver.initialFile", "required when solver.initial is \"file\"");
      std::filesystem::path file(sv.initial_file);
      if (file.is_relative()) file = base_dir / file;
      sv.initial_labels = load_initial_labels(file);
    }
  }

  if (doc.contains("output")) {
    const json& o = doc.at("output");
    require_object(o, "output", {"dir", "format", "trace"});
    if (o.contains("dir")) spec.output.dir = text(o.at("dir"), "output.dir");
    if (o.contains("format")) {
      const auto f = text(o.at("format"), "output.format");
      if (f == "csv") spec.output.format = OutputFormat::Csv;
      else if (f == "json") spec.output.format = OutputFormat::Json;
      else fail("output.format", "expected \"csv\" or \"json\"");
    }
    if (o.contains("trace")) spec.output.trace = boolean(o.at("trace"), "output.trace");
  }
  return spec;
}

ProblemSpec load_config(const std::filesystem::path& path) {
  return parse_config(read_json_file(path, "config"), path.parent_path());
}

json serialize_network(const FractureNetwork& network, bool approximate) {
  json doc;
  if (approximate) doc["approximate"] = true;
  doc["branches"] = json::array();
  for (const auto& b : network.branches)
    doc["branches"].push_back({{"id", b.id}, {"start", {b.start.x, b.start.y}}, {"end", {b.end.x, b.end.y}}});
  doc["intersections"] = json::array();
  for (const auto& inter : network.intersections) {
    json inc = json::array();
    for (const auto& ref : inter.incident) inc.push_back({{"branch", ref.branch}, {"end", to_string(ref.end)}});
    doc["intersections"].push_back(
        {{"id", inter.id}, {"point", {inter.point.x, inter.point.y}}, {"incident", inc}});
  }
  json conds = json::array();
  for (const auto& bc : network.boundary.conditions) {
    const bool pressure = std::holds_alternative<PressureBC>(bc.condition);
    const double value = pressure ? std::get<PressureBC>(bc.condition).pressure
                                  : std::get<VelocityBC>(bc.condition).outward_flux;
    conds.push_back({{"branch", bc.where.branch},
                     {"end", to_string(bc.where.end)},
                     {"type", pressure ? "pressure" : "velocity"},
                     {"value", value}});
  }
  doc["boundary"] = {{"conditions", conds}};
  if (network.boundary.mean_pressure) doc["boundary"]["meanPressure"] = *network.boundary.mean_pressure;
  json scalar = json::array();
  for (const auto& [id, src] : network.sources.scalar) {
    if (src.profile) throw ConfigError("sources with a profile function cannot be serialized");
    scalar.push_back({{"branch", id}, {"breakpoints", src.breakpoints}, {"values", src.values}});
  }
  doc["sources"] = {{"scalar", scalar}, {"force", {network.sources.force.x, network.sources.force.y}}};
  return doc;
}

json serialize_law(const AdaptiveLaw& law) {
  return {{"low", law_branch_json(law.low)}, {"high", law_branch_json(law.high)}, {"threshold", law.threshold}};
}

json serialize_config(const ProblemSpec& spec) {
  json doc;
  doc["name"] = spec.name;
  doc["network"] = serialize_network(spec.network, spec.approximate_geometry);
  doc["law"] = serialize_law(spec.law);
  const auto& sv = spec.solver;
  json solver = {{"h", sv.h},
                 {"epsNl", sv.eps_nl},
                 {"maxNonlinear", sv.max_nonlinear},
                 {"epsGamma", sv.eps_gamma},
                 {"maxOuter", sv.max_outer},
                 {"initial", to_string(sv.initial)}};
  if (sv.eps_omega) solver["epsOmega"] = *sv.eps_omega;
  if (!sv.initial_file.empty()) solver["initialFile"] = sv.initial_file;
  doc["solver"] = solver;
  doc["output"] = {{"dir", spec.output.dir}, {"format", to_string(spec.output.format)}, {"trace", spec.output.trace}};
  return doc;
}

}  // namespace dfn
