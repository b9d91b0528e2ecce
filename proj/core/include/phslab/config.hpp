#ifndef PHSLAB_CONFIG_HPP
#define PHSLAB_CONFIG_HPP

#include <cstdint>
#include <string>

#include "phslab/semiconjugacy.hpp"
#include "phslab/systems.hpp"

namespace phslab {

// Flat run configuration: defaults < config file < command-line overrides.
// A serialized copy is embedded in every output artifact.
struct RunConfig {
  std::string preset = "product";
  std::int64_t matrix[4] = {2, 1, 1, 1};
  double epsilon = -1.0;  // negative selects the preset default
  double kappa = 0.0;
  int power = 1;

  double sink_mu = 0.87;
  double da_radius = 0.18;
  double da_depth = 0.10;

  int cert_n1 = 64, cert_n2 = 64, cert_ns = 16;
  int drift_grid = 32;
  int fiber_grid = 12;

  double tol = 1e-8;
  double fiber_tol = 1e-6;
  double fiber_step = 1e-2;
  double height_T = 0.0;  // 0 = 1.25 x max fiber length over fiber_grid^2

  double transect_offset = 0.06;
  double transect_halfspan = 0.30;
  int transect_n = 200;

  long check_samples = 100;
  std::uint64_t seed = 20260810;
  unsigned threads = 0;
  std::string out_dir = "out";
};

// Parses a flat key = value file ('#' starts a comment). Unknown keys are
// ConfigError.
RunConfig load_config_file(const std::string& path);
void apply_override(RunConfig& cfg, const std::string& key,
                    const std::string& value);
void validate(const RunConfig& cfg);

std::string config_json(const RunConfig& cfg);

double preset_epsilon(const std::string& preset);

ToralAutomorphism make_linear_model(const RunConfig& cfg);

// Builds the configured system; perturbed presets run the coarse
// construction certificate and may raise EpsilonTooLarge.
SlabSystem make_system(const RunConfig& cfg);

FiberOptions fiber_options(const RunConfig& cfg);

// Default figure transect: along e_u through an offset on the stable axis,
// which crosses the weakened region's shadow on the sink preset.
void default_transect(const RunConfig& cfg, const ToralAutomorphism& lin,
                      PlanePoint* from, PlanePoint* to);

}  // namespace phslab

#endif
