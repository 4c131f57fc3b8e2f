#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

struct RunResult {
  int exit_code = -1;
  std::string output;
};

RunResult run(const std::string& args) {
  const std::string cmd = std::string(LEVSIM_BIN) + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  RunResult res;
  char buf[4096];
  while (std::fgets(buf, sizeof(buf), pipe)) res.output += buf;
  const int status = pclose(pipe);
  res.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return res;
}

fs::path sandbox() {
  const auto dir = fs::temp_directory_path() / "levsim_cli_test";
  fs::create_directories(dir);
  return dir;
}

std::string write_config(const std::string& name, const std::string& body) {
  const auto path = sandbox() / name;
  std::ofstream out(path);
  out << body;
  return path.string();
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const char* kBaseConfig = R"({
  "sphere": {"radius_nm": 100.0},
  "cavity": {"wavelength_nm": 1064.0, "kappa_rad_s": 6.0e5},
  "coupling": {"mode": "explicit", "a_rad_s": 3.0e5},
  "drive": {"power1_mw": 2.0, "ratio": 1.0},
  "gas": {"pressure_mbar": 1.0},
  "operating_point": {"delta1_rad_s": -1.0e6, "delta2_rad_s": -1.0e6}
})";

}  // namespace

TEST_CASE("help exits cleanly") {
  CHECK(run("--help").exit_code == 0);
  CHECK(run("map --help").exit_code == 0);
}

TEST_CASE("equilibrium reports the symmetric point") {
  const auto cfg = write_config("eq.json", kBaseConfig);
  const auto res = run("equilibrium -c " + cfg);
  CHECK(res.exit_code == 0);
  // pi/8 = 0.392699082
  CHECK(res.output.find("0.39269908") != std::string::npos);
  CHECK(res.output.find("stable") != std::string::npos);
}

TEST_CASE("malformed config returns exit code 2 naming the key") {
  const auto cfg = write_config("bad.json", R"({
    "sphere": {"radius_nm": 100.0, "colour": "blue"},
    "cavity": {"wavelength_nm": 1064.0, "kappa_rad_s": 6.0e5},
    "coupling": {"mode": "explicit", "a_rad_s": 3.0e5},
    "drive": {"power1_mw": 2.0, "ratio": 1.0}
  })");
  const auto res = run("equilibrium -c " + cfg);
  CHECK(res.exit_code == 2);
  CHECK(res.output.find("sphere.colour") != std::string::npos);
}

TEST_CASE("missing operating point is a config error") {
  std::string body = kBaseConfig;
  body.erase(body.find(",\n  \"operating_point\""),
             std::string(",\n  \"operating_point\": "
                         "{\"delta1_rad_s\": -1.0e6, \"delta2_rad_s\": -1.0e6}")
                 .size());
  const auto cfg = write_config("noop.json", body);
  const auto res = run("spectrum -c " + cfg);
  CHECK(res.exit_code == 2);
}

TEST_CASE("numerical failures return exit code 3") {
  // A flat time series has no spectral peak to fit.
  const auto dir = sandbox();
  const auto ts_path = dir / "flat.csv";
  {
    std::ofstream out(ts_path);
    out << "t_s,position\n";
    std::uint64_t state = 0x12345;
    for (int i = 0; i < 8192; ++i) {
      state = state * 6364136223846793005ULL + 1442695040888963407ULL;
      out << i * 1e-5 << "," << (static_cast<double>(state >> 11) / 9.0e18)
          << "\n";
    }
  }
  const auto res = run("fitpsd --input " + ts_path.string() + " --segments 31");
  CHECK(res.exit_code == 3);
}

TEST_CASE("map outputs and sidecar round-trip") {
  const auto dir = sandbox();
  const auto cfg = write_config("map.json", kBaseConfig);
  const std::string prefix = (dir / "roundtrip").string();
  const auto res = run("map -c " + cfg + " -o " + prefix +
                       " --resolution 16 --d1-min -1.5e6 --d1-max -0.5e6"
                       " --d2-min -1.5e6 --d2-max -0.5e6 --threads 2");
  REQUIRE(res.exit_code == 0);
  REQUIRE(fs::exists(prefix + "_map.csv"));
  REQUIRE(fs::exists(prefix + "_loci.json"));
  REQUIRE(fs::exists(prefix + "_meta.json"));

  // Re-feed the sidecar's config object: outputs must be bit-identical.
  const auto meta = slurp(prefix + "_meta.json");
  const auto open = meta.find("\"config\": {");
  REQUIRE(open != std::string::npos);
  // Extract the config object by brace counting.
  std::size_t i = meta.find('{', open + 10);
  int depth = 0;
  std::size_t end = i;
  for (; end < meta.size(); ++end) {
    if (meta[end] == '{') ++depth;
    if (meta[end] == '}' && --depth == 0) break;
  }
  const auto cfg2 =
      write_config("map_echo.json", meta.substr(i, end - i + 1));
  const std::string prefix2 = (dir / "roundtrip2").string();
  const auto res2 = run("map -c " + cfg2 + " -o " + prefix2 +
                        " --resolution 16 --d1-min -1.5e6 --d1-max -0.5e6"
                        " --d2-min -1.5e6 --d2-max -0.5e6 --threads 2");
  REQUIRE(res2.exit_code == 0);
  CHECK(slurp(prefix + "_map.csv") == slurp(prefix2 + "_map.csv"));
}

TEST_CASE("spectrum command writes both methods") {
  const auto dir = sandbox();
  const auto cfg = write_config("spec.json", kBaseConfig);
  const std::string prefix = (dir / "spec").string();
  const auto res =
      run("spectrum -c " + cfg + " -o " + prefix + " --points 512");
  REQUIRE(res.exit_code == 0);
  const auto quantum = slurp(prefix + "_quantum.csv");
  CHECK(quantum.rfind("omega_rad_s,S_xx\n", 0) == 0);
  CHECK(fs::exists(prefix + "_semiclassical.csv"));
  CHECK(fs::exists(prefix + "_meta.json"));
}

TEST_CASE("sphere command validates its range") {
  const auto dir = sandbox();
  std::string body = R"({
    "sphere": {"radius_nm": 100.0},
    "cavity": {"wavelength_nm": 1064.0, "kappa_rad_s": 3.0e5,
               "length_cm": 1.0, "waist_um": 40.0},
    "coupling": {"mode": "geometric"},
    "drive": {"power1_mw": 2.0, "ratio": 1.0},
    "gas": {"pressure_mbar": 1.0}
  })";
  const auto cfg = write_config("sphere.json", body);
  const auto bad = run("sphere -c " + cfg + " --r-min-nm 100 --r-max-nm 50");
  CHECK(bad.exit_code == 2);
  const std::string prefix = (sandbox() / "sphere_run").string();
  const auto ok = run("sphere -c " + cfg +
                      " --r-min-nm 50 --r-max-nm 200 --points 16 -o " + prefix);
  CHECK(ok.exit_code == 0);
  CHECK(fs::exists(prefix + "_sphere.csv"));
}
