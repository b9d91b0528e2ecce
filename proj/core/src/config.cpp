#include "phslab/config.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "phslab/errors.hpp"

namespace phslab {

namespace {

using nlohmann::json;

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
  std::istringstream in(value);
  T out;
  in >> out;
  if (in.fail()) {
    throw ConfigError("bad value for '" + key + "': " + value);
  }
  return out;
}

void parse_matrix(RunConfig& cfg, const std::string& value) {
  std::istringstream in(value);
  std::string tok;
  int i = 0;
  while (std::getline(in, tok, ',')) {
    if (i >= 4) throw ConfigError("matrix needs exactly four integers");
    cfg.matrix[i++] = parse_number<std::int64_t>("matrix", tok);
  }
  if (i != 4) throw ConfigError("matrix needs exactly four integers");
}

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

}  // namespace

void apply_override(RunConfig& cfg, const std::string& key,
                    const std::string& value) {
  if (key == "preset") cfg.preset = value;
  else if (key == "matrix") parse_matrix(cfg, value);
  else if (key == "epsilon") cfg.epsilon = parse_number<double>(key, value);
  else if (key == "kappa") cfg.kappa = parse_number<double>(key, value);
  else if (key == "power") cfg.power = parse_number<int>(key, value);
  else if (key == "sink_mu") cfg.sink_mu = parse_number<double>(key, value);
  else if (key == "da_radius") cfg.da_radius = parse_number<double>(key, value);
  else if (key == "da_depth") cfg.da_depth = parse_number<double>(key, value);
  else if (key == "cert_n1") cfg.cert_n1 = parse_number<int>(key, value);
  else if (key == "cert_n2") cfg.cert_n2 = parse_number<int>(key, value);
  else if (key == "cert_ns") cfg.cert_ns = parse_number<int>(key, value);
  else if (key == "drift_grid") cfg.drift_grid = parse_number<int>(key, value);
  else if (key == "fiber_grid") cfg.fiber_grid = parse_number<int>(key, value);
  else if (key == "tol") cfg.tol = parse_number<double>(key, value);
  else if (key == "fiber_tol") cfg.fiber_tol = parse_number<double>(key, value);
  else if (key == "fiber_step") cfg.fiber_step = parse_number<double>(key, value);
  else if (key == "height_T") cfg.height_T = parse_number<double>(key, value);
  else if (key == "transect_offset")
    cfg.transect_offset = parse_number<double>(key, value);
  else if (key == "transect_halfspan")
    cfg.transect_halfspan = parse_number<double>(key, value);
  else if (key == "transect_n") cfg.transect_n = parse_number<int>(key, value);
  else if (key == "check_samples")
    cfg.check_samples = parse_number<long>(key, value);
  else if (key == "seed") cfg.seed = parse_number<std::uint64_t>(key, value);
  else if (key == "threads") cfg.threads = parse_number<unsigned>(key, value);
  else if (key == "out_dir") cfg.out_dir = value;
  else throw ConfigError("unknown configuration key '" + key + "'");
}

RunConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  RunConfig cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(path + ":" + std::to_string(lineno) +
                        ": expected key = value");
    }
    apply_override(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return cfg;
}

void validate(const RunConfig& cfg) {
  if (cfg.preset != "product" && cfg.preset != "bump" && cfg.preset != "sink" &&
      cfg.preset != "cu-boundary") {
    throw ConfigError("unknown preset '" + cfg.preset +
                      "' (product, bump, sink, cu-boundary)");
  }
  if (cfg.power < 1) throw ConfigError("power must be >= 1");
  if (!(cfg.tol > 0.0) || !(cfg.fiber_tol > 0.0) || !(cfg.fiber_step > 0.0)) {
    throw ConfigError("tolerances and steps must be positive");
  }
  if (cfg.cert_n1 < 2 || cfg.cert_n2 < 2 || cfg.cert_ns < 2) {
    throw ConfigError("certificate grid must be at least 2x2x2");
  }
  if (cfg.drift_grid < 16) throw ConfigError("drift_grid must be >= 16");
  if (cfg.transect_n < 2) throw ConfigError("transect_n must be >= 2");
  if (cfg.check_samples < 1) throw ConfigError("check_samples must be >= 1");
}

double preset_epsilon(const std::string& preset) {
  if (preset == "bump" || preset == "cu-boundary") return 0.05;
  if (preset == "sink") return 1.0;
  return 0.0;
}

std::string config_json(const RunConfig& cfg) {
  json j;
  j["preset"] = cfg.preset;
  j["matrix"] = {cfg.matrix[0], cfg.matrix[1], cfg.matrix[2], cfg.matrix[3]};
  j["epsilon"] = cfg.epsilon < 0.0 ? preset_epsilon(cfg.preset) : cfg.epsilon;
  j["kappa"] = cfg.kappa;
  j["power"] = cfg.power;
  j["sink_mu"] = cfg.sink_mu;
  j["da_radius"] = cfg.da_radius;
  j["da_depth"] = cfg.da_depth;
  j["cert_grid"] = {cfg.cert_n1, cfg.cert_n2, cfg.cert_ns};
  j["drift_grid"] = cfg.drift_grid;
  j["fiber_grid"] = cfg.fiber_grid;
  j["tol"] = cfg.tol;
  j["fiber_tol"] = cfg.fiber_tol;
  j["fiber_step"] = cfg.fiber_step;
  j["height_T"] = cfg.height_T;
  j["transect"] = {{"offset", cfg.transect_offset},
                   {"halfspan", cfg.transect_halfspan},
                   {"n", cfg.transect_n}};
  j["check_samples"] = cfg.check_samples;
  j["seed"] = cfg.seed;
  j["threads"] = cfg.threads;
  j["out_dir"] = cfg.out_dir;
  return j.dump();
}

ToralAutomorphism make_linear_model(const RunConfig& cfg) {
  return ToralAutomorphism::from_matrix(cfg.matrix[0], cfg.matrix[1],
                                        cfg.matrix[2], cfg.matrix[3]);
}

SlabSystem make_system(const RunConfig& cfg) {
  validate(cfg);
  const ToralAutomorphism lin = make_linear_model(cfg);
  const double eps =
      cfg.epsilon < 0.0 ? preset_epsilon(cfg.preset) : cfg.epsilon;
  if (cfg.preset == "product") {
    return build_product(lin, cfg.kappa, cfg.power);
  }
  PerturbedOptions opts;
  opts.power = cfg.power;
  opts.sink_mu = cfg.sink_mu;
  opts.da_radius = cfg.da_radius;
  opts.da_depth = cfg.da_depth;
  if (cfg.preset == "bump") {
    return build_perturbed(lin, eps, SystemVariant::Bump, opts);
  }
  if (cfg.preset == "sink") {
    return build_perturbed(lin, eps, SystemVariant::Sink, opts);
  }
  return build_perturbed(lin, eps, SystemVariant::CuBoundary, opts);
}

FiberOptions fiber_options(const RunConfig& cfg) {
  FiberOptions f;
  f.step = cfg.fiber_step;
  f.fiber_tol = cfg.fiber_tol;
  return f;
}

void default_transect(const RunConfig& cfg, const ToralAutomorphism& lin,
                      PlanePoint* from, PlanePoint* to) {
  const PlanePoint o = cfg.transect_offset * lin.e_s();
  *from = o - cfg.transect_halfspan * lin.e_u();
  *to = o + cfg.transect_halfspan * lin.e_u();
}

}  // namespace phslab
