#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

TEST_SUITE_BEGIN("cli");

namespace {

namespace fs = std::filesystem;

struct RunResult {
  int exit_code;
  std::string output;
};

RunResult run_cli(const std::string& args, const fs::path& dir) {
  const fs::path log = dir / "cli_output.txt";
  const std::string cmd = std::string(PHSLAB_CLI_PATH) + " " + args + " > " +
                          log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  std::ifstream in(log);
  std::stringstream buf;
  buf << in.rdbuf();
#ifdef _WIN32
  return {status, buf.str()};
#else
  return {WEXITSTATUS(status), buf.str()};
#endif
}

fs::path temp_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / name;
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("build prints the certificate and eigen data") {
  const fs::path dir = temp_dir("phslab_cli_build");
  const auto r = run_cli("--preset product --matrix 2,1,1,1 --threads 2 "
                         "--set cert_n1=8 --set cert_n2=8 --set cert_ns=5 "
                         "--out " + (dir / "out").string() + " build",
                         dir);
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("lambda_u = 2.618033988750") != std::string::npos);
  CHECK(r.output.find("pass") != std::string::npos);
  CHECK(fs::exists(dir / "out" / "build.json"));
}

TEST_CASE("non-hyperbolic matrices exit with the numeric code") {
  const fs::path dir = temp_dir("phslab_cli_nh");
  const auto r = run_cli("--preset product --matrix 1,0,0,1 build", dir);
  CHECK(r.exit_code == 3);
}

TEST_CASE("unknown preset exits with the config code") {
  const fs::path dir = temp_dir("phslab_cli_badpreset");
  const auto r = run_cli("--preset vortex build", dir);
  CHECK(r.exit_code == 2);
}

TEST_CASE("unknown option exits with the config code") {
  const fs::path dir = temp_dir("phslab_cli_badopt");
  const auto r = run_cli("--frobnicate build", dir);
  CHECK(r.exit_code == 2);
}

TEST_CASE("semiconj on the product reports identity-level residuals") {
  const fs::path dir = temp_dir("phslab_cli_semiconj");
  const auto r = run_cli("--preset product --threads 2 --out " +
                             (dir / "out").string() + " semiconj",
                         dir);
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("max |H(p) - v|") != std::string::npos);
  CHECK(fs::exists(dir / "out" / "semiconj_grid.csv"));
  // the product semiconjugacy is the plane projection: residual ~ 1e-15
  const auto pos = r.output.find("max |H(p) - v| = ");
  REQUIRE(pos != std::string::npos);
  const double value = std::atof(r.output.c_str() + pos + 17);
  CHECK(value <= 1e-9);
}

TEST_CASE("fiber export writes csv and json") {
  const fs::path dir = temp_dir("phslab_cli_fiber");
  const auto r = run_cli("--preset product --out " + (dir / "out").string() +
                             " fiber --at 0.3 0.7",
                         dir);
  CHECK(r.exit_code == 0);
  CHECK(fs::exists(dir / "out" / "fiber.csv"));
  CHECK(fs::exists(dir / "out" / "fiber.json"));
  std::ifstream csv(dir / "out" / "fiber.csv");
  std::string header;
  std::getline(csv, header);  // config comment
  std::getline(csv, header);
  CHECK(header == "v1,v2,x,y,s");
}

TEST_CASE("trace exports a center curve") {
  const fs::path dir = temp_dir("phslab_cli_trace");
  const auto r = run_cli("--preset product --out " + (dir / "out").string() +
                             " trace --bundle c --from 0.2 0.4 0.5",
                         dir);
  CHECK(r.exit_code == 0);
  CHECK(fs::exists(dir / "out" / "trace.csv"));
}

TEST_CASE("config file plus override precedence") {
  const fs::path dir = temp_dir("phslab_cli_cfg");
  const fs::path cfg = dir / "run.cfg";
  {
    std::ofstream out(cfg);
    out << "preset = product\nmatrix = 2,1,1,1\nthreads = 2\n";
  }
  // CLI --preset must win over the file's preset
  const auto r = run_cli("--config " + cfg.string() +
                             " --preset product --set cert_n1=8 "
                             "--set cert_n2=8 --set cert_ns=5 --out " +
                             (dir / "out").string() + " build",
                         dir);
  CHECK(r.exit_code == 0);
}

TEST_SUITE_END();
