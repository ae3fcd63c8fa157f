#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"

namespace fs = std::filesystem;

namespace {

const std::string kCli = CAUSTICA_CLI;
const fs::path kConfigs = CAUSTICA_CONFIGS;

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("caustica_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

// Runs the CLI with `args`, stdout and stderr into `log`; returns the exit code.
int run(const std::string& args, const fs::path& log, const std::string& env = "") {
  const std::string cmd = env + (env.empty() ? "" : " ") + kCli + " " + args + " > " + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  REQUIRE(WIFEXITED(status));
  return WEXITSTATUS(status);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

nlohmann::json load(const fs::path& p) { return nlohmann::json::parse(slurp(p)); }

void write(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

}  // namespace

TEST_CASE("specfun-check passes and prints the Olver slope") {
  const fs::path dir = scratch("specfun");
  CHECK(run("specfun-check", dir / "log") == 0);
  const std::string log = slurp(dir / "log");
  CHECK(log.find("Olver slope") != std::string::npos);
  CHECK(log.find("FAIL") == std::string::npos);
}

TEST_CASE("perturbed Airy function makes specfun-check exit 1") {
  const fs::path dir = scratch("fault");
  CHECK(run("specfun-check", dir / "log", "CAUSTICA_TEST_AIRY_PERTURBATION=1e-6") == 1);
  CHECK(slurp(dir / "log").find("FAIL") != std::string::npos);
}

TEST_CASE("negative level is a config error and writes nothing") {
  const fs::path dir = scratch("negative");
  write(dir / "bad.json", "{\n  \"surface\": \"disk\",\n  \"lambdas\": [-5, 100]\n}\n");
  const fs::path out = dir / "out";
  CHECK(run("sweep --config " + (dir / "bad.json").string() + " --out " + out.string(), dir / "log") == 2);
  CHECK_FALSE(fs::exists(out));
  CHECK(slurp(dir / "log").find("line 3") != std::string::npos);
}

TEST_CASE("config diagnostics name the line and field") {
  const fs::path dir = scratch("diag");
  write(dir / "unknown.json", "{\n  \"surface\": \"disk\",\n\n  \"lamda_min\": 100\n}\n");
  CHECK(run("sweep --config " + (dir / "unknown.json").string() + " --out " + (dir / "o1").string(), dir / "log1") == 2);
  const std::string log1 = slurp(dir / "log1");
  CHECK(log1.find("line 4") != std::string::npos);
  CHECK(log1.find("lamda_min") != std::string::npos);

  write(dir / "syntax.json", "{\n  \"surface\": \"disk\",\n  \"alpha\": 0.1,,\n}\n");
  CHECK(run("sweep --config " + (dir / "syntax.json").string() + " --out " + (dir / "o2").string(), dir / "log2") == 2);
  CHECK(slurp(dir / "log2").find("line 3") != std::string::npos);

  CHECK(run("sweep --workers 0 --out " + (dir / "o3").string(), dir / "log3") == 2);
  CHECK(run("lemmas --lambda 5 --out " + (dir / "o4").string(), dir / "log4") == 2);
  CHECK(run("no-such-command", dir / "log5") == 2);
  CHECK(run("sweep --config " + (dir / "missing.json").string(), dir / "log6") == 2);
  for (const char* o : {"o1", "o2", "o3", "o4"}) CHECK_FALSE(fs::exists(dir / o));
}

TEST_CASE("empty level grid gives an empty table and exit 0") {
  const fs::path dir = scratch("empty");
  write(dir / "empty.json", R"({"surface": "disk", "lambdas": []})");
  const fs::path out = dir / "out";
  CHECK(run("sweep --config " + (dir / "empty.json").string() + " --out " + out.string(), dir / "log") == 0);
  CHECK(load(out / "sweep.json")["rows"].empty());
  CHECK(load(out / "fit.json").contains("error"));
}

TEST_CASE("sweep writes table, fit and plot script; asserted slope decides the exit code") {
  const fs::path dir = scratch("sweep");
  const std::string grid = R"("surface": "disk", "region": [[0.3, 0.7]], "lambda_min": 125.137, "lambda_max": 400.137, "lambda_count": 8)";
  write(dir / "ok.json", "{" + grid + R"(, "max_slope": 0.44666666666666666})");
  write(dir / "tight.json", "{" + grid + R"(, "max_slope": 0.1})");
  const fs::path out = dir / "out";
  CHECK(run("sweep --config " + (dir / "ok.json").string() + " --out " + out.string(), dir / "log") == 0);
  CHECK(slurp(dir / "log").find("slope ") != std::string::npos);
  for (const char* f : {"sweep.csv", "sweep.json", "fit.json", "sweep.gp"}) CHECK(fs::exists(out / f));
  CHECK(slurp(out / "sweep.csv").rfind("lambda,delta,sup,sup_sqrt,", 0) == 0);
  const auto fit = load(out / "fit.json");
  CHECK(fit["samples"] == 8);
  CHECK(fit["pass"] == true);
  CHECK(slurp(out / "sweep.gp").find("$sweep << EOD") != std::string::npos);
  CHECK(load(out / "sweep.json")["rows"].size() == 8);

  CHECK(run("sweep --config " + (dir / "tight.json").string() + " --out " + (dir / "out2").string(), dir / "log2") == 1);
  CHECK(load(dir / "out2" / "fit.json")["pass"] == false);
}

TEST_CASE("cache path precedence: flag over environment over config; seedless disables") {
  const fs::path dir = scratch("cache");
  write(dir / "c.json", R"({"surface": "disk", "lambdas": [125.137], "cache": ")" + (dir / "from_config.bin").string() + "\"}");
  const std::string cfg = "--config " + (dir / "c.json").string();
  const std::string env = "CAUSTICA_CACHE=" + (dir / "from_env.bin").string();

  CHECK(run("sweep " + cfg + " --out " + (dir / "o1").string(), dir / "log1") == 0);
  CHECK(fs::exists(dir / "from_config.bin"));
  CHECK(run("sweep " + cfg + " --out " + (dir / "o2").string(), dir / "log2", env) == 0);
  CHECK(fs::exists(dir / "from_env.bin"));
  CHECK(run("sweep " + cfg + " --cache " + (dir / "from_flag.bin").string() + " --out " + (dir / "o3").string(),
            dir / "log3", env) == 0);
  CHECK(fs::exists(dir / "from_flag.bin"));
  CHECK(run("sweep " + cfg + " --seedless --cache " + (dir / "never.bin").string() + " --out " + (dir / "o4").string(),
            dir / "log4", env) == 0);
  CHECK_FALSE(fs::exists(dir / "never.bin"));

  // Results do not depend on where (or whether) the data was cached.
  const auto strip = [](nlohmann::json j) {
    for (auto& row : j["rows"]) row.erase("wall_time");
    return j;
  };
  const auto ref = strip(load(dir / "o1" / "sweep.json"));
  for (const char* o : {"o2", "o3", "o4"}) CHECK(strip(load(dir / o / "sweep.json")) == ref);
}

TEST_CASE("lemmas on the disk at 500 all pass") {
  const fs::path dir = scratch("lemmas_disk");
  CHECK(run("lemmas --config " + (kConfigs / "disk_interior.json").string() + " --lambda 500 --out " + dir.string(),
            dir / "log") == 0);
  const auto j = load(dir / "lemmas.json");
  CHECK(j["pass"] == true);
  CHECK(j["lambda"] == 500.0);
  for (const char* name : {"gap", "caustic_spacing", "boundary_spacing", "edge_clearance", "zero_asymptotics", "envelope",
                           "abc_decomposition"})
    CHECK_MESSAGE(j["checks"][name]["verdict"] == "pass", name);
}

TEST_CASE("lemmas on the perturbed surface at 150") {
  const fs::path dir = scratch("lemmas_rev");
  CHECK(run("lemmas --config " + (kConfigs / "revolution_perturbed.json").string() + " --lambda 150 --out " +
                dir.string(),
            dir / "log") == 0);
  const auto j = load(dir / "lemmas.json");
  CHECK(j["checks"]["gap"]["verdict"] == "pass");
  CHECK(j["checks"]["caustic_spacing"]["verdict"] == "pass");
  CHECK(j["checks"]["zero_asymptotics"]["verdict"] == "unsupported");
  CHECK(j["checks"]["abc_decomposition"]["verdict"] == "unsupported");
}

TEST_CASE("genericity verdicts") {
  const fs::path dir = scratch("genericity");
  CHECK(run("genericity --config " + (kConfigs / "round_sphere.json").string() + " --out " + (dir / "round").string(),
            dir / "log1") == 0);
  CHECK(load(dir / "round" / "genericity.json")["verdict"] == "degenerate-flat");
  CHECK(slurp(dir / "log1").find("degenerate-flat") != std::string::npos);

  CHECK(run("genericity --config " + (kConfigs / "revolution_perturbed.json").string() + " --out " +
                (dir / "perturbed").string(),
            dir / "log2") == 0);
  CHECK(load(dir / "perturbed" / "genericity.json")["verdict"] == "generic");

  CHECK(run("genericity --config " + (kConfigs / "disk_interior.json").string() + " --out " + (dir / "disk").string(),
            dir / "log3") == 2);
  CHECK_FALSE(fs::exists(dir / "disk"));
}
