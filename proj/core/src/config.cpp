#include "davg/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace davg {

namespace {

using nlohmann::json;

void reject_unknown(const json& obj, const std::string& section,
                    const std::set<std::string>& allowed) {
  for (const auto& [key, value] : obj.items()) {
    (void)value;
    if (!allowed.contains(key))
      throw ConfigError("config: unknown key \"" + section + "." + key + "\"");
  }
}

const json& require(const json& obj, const std::string& section,
                    const std::string& key) {
  if (!obj.contains(key))
    throw ConfigError("config: missing key \"" + section + "." + key + "\"");
  return obj.at(key);
}

template <typename T>
T get_as(const json& obj, const std::string& section, const std::string& key) {
  try {
    return require(obj, section, key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError("config: key \"" + section + "." + key +
                      "\" has the wrong type");
  }
}

template <typename T>
T get_or(const json& obj, const std::string& section, const std::string& key,
         T fallback) {
  if (!obj.contains(key)) return fallback;
  return get_as<T>(obj, section, key);
}

GraphKind parse_kind(const std::string& s) {
  if (s == "path") return GraphKind::Path;
  if (s == "cycle") return GraphKind::Cycle;
  if (s == "star") return GraphKind::Star;
  if (s == "grid") return GraphKind::Grid;
  if (s == "erdos-renyi") return GraphKind::ErdosRenyi;
  throw ConfigError("config: topology.kind \"" + s +
                    "\" is not one of path/cycle/star/grid/erdos-renyi");
}

}  // namespace

RunConfig parse_run_config_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config: top level must be an object");
  reject_unknown(doc, "",
                 {"topology", "model", "algorithm", "experiment", "output"});

  RunConfig cfg;
  cfg.source_text = text;

  const json& topo = require(doc, "", "topology");
  reject_unknown(topo, "topology", {"kind", "n", "p", "seed"});
  cfg.topology.kind = parse_kind(get_as<std::string>(topo, "topology", "kind"));
  cfg.topology.n = get_as<int>(topo, "topology", "n");
  cfg.topology.p = get_or<double>(topo, "topology", "p", 0.0);
  cfg.topology.seed = get_or<std::uint64_t>(topo, "topology", "seed", 0);
  if (cfg.topology.n < 2)
    throw ConfigError("config: topology.n must be at least 2");
  if (cfg.topology.kind == GraphKind::Grid) {
    const int side = static_cast<int>(std::lround(std::sqrt(double(cfg.topology.n))));
    if (side * side != cfg.topology.n)
      throw ConfigError("config: topology.n must be a perfect square for grid");
  }
  if (cfg.topology.kind == GraphKind::ErdosRenyi &&
      !(cfg.topology.p > 0.0 && cfg.topology.p <= 1.0))
    throw ConfigError("config: topology.p must be in (0,1] for erdos-renyi");

  if (doc.contains("model")) {
    const json& model = doc.at("model");
    reject_unknown(model, "model", {"b", "sigma", "dim"});
    cfg.model.b = get_or<double>(model, "model", "b", 1.0);
    cfg.model.sigma = get_or<double>(model, "model", "sigma", 1.0);
    cfg.model.dim = get_or<int>(model, "model", "dim", 1);
    if (cfg.model.b < 0.0) throw ConfigError("config: model.b must be >= 0");
    if (cfg.model.sigma < 0.0)
      throw ConfigError("config: model.sigma must be >= 0");
    if (cfg.model.dim < 1) throw ConfigError("config: model.dim must be >= 1");
  }

  if (doc.contains("algorithm")) {
    const json& algo = doc.at("algorithm");
    reject_unknown(algo, "algorithm",
                   {"name", "params", "t_total", "stages", "eta", "zeta",
                    "t_burn"});
    cfg.algorithm.name = get_as<std::string>(algo, "algorithm", "name");
    if (cfg.algorithm.name != "sda" && cfg.algorithm.name != "dsg" &&
        cfg.algorithm.name != "dmasg")
      throw ConfigError("config: algorithm.name \"" + cfg.algorithm.name +
                        "\" is not one of sda/dsg/dmasg");
    cfg.algorithm.params = get_or<std::string>(algo, "algorithm", "params", "");
    cfg.algorithm.t_total = get_or<int>(algo, "algorithm", "t_total", 0);
    cfg.algorithm.stages = get_or<int>(algo, "algorithm", "stages", 3);
    if (algo.contains("eta"))
      cfg.algorithm.eta = get_as<double>(algo, "algorithm", "eta");
    if (algo.contains("zeta"))
      cfg.algorithm.zeta = get_as<double>(algo, "algorithm", "zeta");
    if (algo.contains("t_burn"))
      cfg.algorithm.t_burn = get_as<int>(algo, "algorithm", "t_burn");
    const std::set<std::string> presets{"", "theorem1", "theorem2",
                                        "dmasg-schedule", "single-stage",
                                        "custom"};
    if (!presets.contains(cfg.algorithm.params))
      throw ConfigError("config: algorithm.params \"" + cfg.algorithm.params +
                        "\" is not a known preset");
  }

  if (doc.contains("experiment")) {
    const json& exp = doc.at("experiment");
    reject_unknown(exp, "experiment",
                   {"family", "n_reps", "seed", "t_grid", "eps_grid", "n_grid",
                    "t_cap", "t_stride"});
    cfg.experiment.family = get_as<std::string>(exp, "experiment", "family");
    const std::set<std::string> families{"single-run", "convergence",
                                         "sample-complexity", "non-asymptotic"};
    if (!families.contains(cfg.experiment.family))
      throw ConfigError("config: experiment.family \"" + cfg.experiment.family +
                        "\" is not a known family");
    cfg.experiment.n_reps = get_or<int>(exp, "experiment", "n_reps", 50);
    cfg.experiment.seed = get_or<std::uint64_t>(exp, "experiment", "seed", 0);
    cfg.experiment.t_grid =
        get_or<std::vector<int>>(exp, "experiment", "t_grid", {});
    cfg.experiment.eps_grid =
        get_or<std::vector<double>>(exp, "experiment", "eps_grid", {});
    cfg.experiment.n_grid =
        get_or<std::vector<int>>(exp, "experiment", "n_grid", {});
    cfg.experiment.t_cap = get_or<long long>(exp, "experiment", "t_cap", 200000);
    cfg.experiment.t_stride = get_or<int>(exp, "experiment", "t_stride", 1);
    if (cfg.experiment.n_reps < 1)
      throw ConfigError("config: experiment.n_reps must be >= 1");
  }

  if (doc.contains("output")) {
    const json& out = doc.at("output");
    reject_unknown(out, "output", {"path", "stride"});
    cfg.output.path = get_or<std::string>(out, "output", "path", "out.csv");
    cfg.output.stride = get_or<int>(out, "output", "stride", 0);
    if (cfg.output.stride < 0)
      throw ConfigError("config: output.stride must be >= 0");
  }

  return cfg;
}

RunConfig parse_run_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("config: cannot open \"" + path + "\"");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_run_config_text(buf.str());
}

ExperimentConfig to_experiment_config(const RunConfig& cfg) {
  ExperimentConfig exp;
  if (cfg.experiment.family == "convergence")
    exp.family = ExperimentFamily::Convergence;
  else if (cfg.experiment.family == "sample-complexity")
    exp.family = ExperimentFamily::SampleComplexity;
  else if (cfg.experiment.family == "non-asymptotic")
    exp.family = ExperimentFamily::NonAsymptotic;
  else
    throw ConfigError("config: experiment.family \"" + cfg.experiment.family +
                      "\" is not an experiment family");
  exp.topologies = {cfg.topology};
  if (cfg.algorithm.name == "sda") exp.algorithms = {AlgorithmKind::Sda};
  else if (cfg.algorithm.name == "dsg") exp.algorithms = {AlgorithmKind::Dsg};
  else exp.algorithms = {AlgorithmKind::Dmasg};
  if (exp.family == ExperimentFamily::Convergence)
    exp.algorithms = {AlgorithmKind::Sda, AlgorithmKind::Dsg,
                      AlgorithmKind::Dmasg};
  if (exp.family == ExperimentFamily::NonAsymptotic)
    exp.algorithms = {AlgorithmKind::Sda, AlgorithmKind::Dmasg};
  exp.n_reps = cfg.experiment.n_reps;
  exp.seed = cfg.experiment.seed;
  exp.b = cfg.model.b;
  exp.sigma = cfg.model.sigma;
  exp.dim = cfg.model.dim;
  exp.t_grid = cfg.experiment.t_grid;
  exp.eps_grid = cfg.experiment.eps_grid;
  exp.n_grid = cfg.experiment.n_grid;
  exp.t_cap = cfg.experiment.t_cap;
  exp.t_stride = cfg.experiment.t_stride;
  return exp;
}

}  // namespace davg
