#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "fixtures.hpp"
#include "phslab/config.hpp"
#include "phslab/errors.hpp"
#include "phslab/output.hpp"
#include "phslab/ragged.hpp"

using namespace phslab;
using namespace phslab::testing;

TEST_SUITE_BEGIN("config-output");

namespace {

std::string write_temp(const std::string& name, const std::string& content) {
  const auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream out(path);
  out << content;
  return path.string();
}

}  // namespace

TEST_CASE("config file parsing with comments and overrides") {
  const std::string path = write_temp("phslab_test.cfg",
                                      "# sample configuration\n"
                                      "preset = sink\n"
                                      "matrix = 2,1,1,1\n"
                                      "epsilon = 0.9   # inline comment\n"
                                      "check_samples = 25\n"
                                      "\n"
                                      "seed = 7\n");
  RunConfig cfg = load_config_file(path);
  CHECK(cfg.preset == "sink");
  CHECK(cfg.epsilon == 0.9);
  CHECK(cfg.check_samples == 25);
  CHECK(cfg.seed == 7);

  // command-line overrides win over the file
  apply_override(cfg, "epsilon", "1.0");
  CHECK(cfg.epsilon == 1.0);
}

TEST_CASE("unknown keys and malformed values are rejected") {
  RunConfig cfg;
  CHECK_THROWS_AS(apply_override(cfg, "bogus", "1"), ConfigError);
  CHECK_THROWS_AS(apply_override(cfg, "epsilon", "fast"), ConfigError);
  CHECK_THROWS_AS(apply_override(cfg, "matrix", "1,2,3"), ConfigError);
}

TEST_CASE("validation rejects bad configurations") {
  RunConfig cfg;
  cfg.preset = "spiral";
  CHECK_THROWS_AS(validate(cfg), ConfigError);
  cfg.preset = "bump";
  cfg.tol = -1.0;
  CHECK_THROWS_AS(validate(cfg), ConfigError);
}

TEST_CASE("preset construction via config") {
  RunConfig cfg;
  cfg.preset = "product";
  const SlabSystem sys = make_system(cfg);
  CHECK(sys.params().variant == SystemVariant::Product);

  RunConfig bad;
  bad.preset = "product";
  bad.matrix[0] = 1;
  bad.matrix[1] = 0;
  bad.matrix[2] = 0;
  bad.matrix[3] = 1;
  CHECK_THROWS_AS(make_system(bad), NotHyperbolicError);
}

TEST_CASE("config json embeds the resolved epsilon") {
  RunConfig cfg;
  cfg.preset = "bump";
  const std::string j = config_json(cfg);
  CHECK(j.find("\"preset\":\"bump\"") != std::string::npos);
  CHECK(j.find("0.05") != std::string::npos);
}

TEST_CASE("csv exports carry the configuration and the row schema") {
  RunConfig cfg;
  const std::string csv = csv_polyline(
      PlanePoint(0.5, 0.25),
      {SlabPoint{{0.5, 0.25}, 0.0}, SlabPoint{{0.5, 0.25}, 1.0}},
      config_json(cfg));
  CHECK(csv.find("# config {") != std::string::npos);
  CHECK(csv.find("v1,v2,x,y,s\n") != std::string::npos);
  CHECK(csv.find("0.5,0.25,0.5,0.25,0\n") != std::string::npos);
  CHECK(csv.find("0.5,0.25,0.5,0.25,1\n") != std::string::npos);
}

TEST_CASE("svg profile contains segments and highlighted jumps") {
  RaggedProfile prof;
  prof.t = {0.0, 0.5, 1.0};
  prof.v = {PlanePoint(0, 0), PlanePoint(0.5, 0), PlanePoint(1, 0)};
  prof.arclength = {1.0, 1.0, 1.4};
  prof.p_lo = {0.25, 0.25, 0.18};
  prof.p_hi = {0.75, 0.75, 0.82};
  prof.jumps = {2};
  const std::string svg = profile_svg(prof, "test profile");
  CHECK(svg.find("<svg") != std::string::npos);
  CHECK(svg.find("<line") != std::string::npos);
  CHECK(svg.find("class=\"jump\"") != std::string::npos);
  CHECK(svg.find("</svg>") != std::string::npos);
}

TEST_CASE("fiber json records geometry and provenance") {
  const FiberSegment fib = fiber(product_evaluator(), PlanePoint(0.3, 0.7));
  RunConfig cfg;
  const std::string j = fiber_json(fib, config_json(cfg));
  CHECK(j.find("\"arclength\"") != std::string::npos);
  CHECK(j.find("\"config\"") != std::string::npos);
  CHECK(j.find("\"endpoint_faces\"") != std::string::npos);
}

TEST_CASE("default transect crosses the weakened cell shadow") {
  RunConfig cfg;
  cfg.preset = "sink";
  PlanePoint from, to;
  default_transect(cfg, cat_matrix(), &from, &to);
  // the segment midpoint sits on the stable axis near the origin
  const PlanePoint mid = 0.5 * (from + to);
  CHECK(std::abs(cat_matrix().project_u(mid)) < 1e-12);
  CHECK((to - from).norm() == doctest::Approx(0.6).epsilon(1e-12));
}

TEST_SUITE_END();
