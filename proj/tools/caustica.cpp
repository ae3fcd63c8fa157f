// caustica: specfun self-check, exponent sweeps, lemma checks and the
// genericity test from the command line.
//
// Exit codes: 0 success, 1 check failure, 2 configuration or usage error.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "caustica/cache.hpp"
#include "caustica/config.hpp"
#include "caustica/errors.hpp"
#include "caustica/lemmas.hpp"
#include "caustica/revolution.hpp"
#include "caustica/selfcheck.hpp"
#include "caustica/specfun.hpp"
#include "caustica/sweep.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using namespace caustica;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCheck = 1;
constexpr int kExitConfig = 2;

struct Options {
  std::string config;
  std::optional<double> lambda;
  std::string out;
  std::optional<int> workers;
  std::string cache;
  bool seedless = false;
};

RunConfig resolve(const Options& opt) {
  RunConfig run = opt.config.empty() ? parse_run_config("{}") : load_run_config(opt.config);
  if (!opt.out.empty()) run.out_dir = opt.out;
  if (opt.workers) {
    if (*opt.workers < 1) throw ConfigError("workers", "must be >= 1");
    run.sweep.workers = *opt.workers;
  }
  if (const char* env = std::getenv("CAUSTICA_CACHE"); env && *env) run.cache_path = env;
  if (!opt.cache.empty()) run.cache_path = opt.cache;
  if (opt.seedless) run.cache_path.clear();
  if (opt.lambda) {
    const double floor = run.sweep.is_disk() ? 10.0 : 0.0;
    if (!(*opt.lambda > floor))
      throw ConfigError("lambda", run.sweep.is_disk() ? "must exceed 10 on the disk" : "must be positive");
    run.lemma_lambda = *opt.lambda;
  }
  return run;
}

std::unique_ptr<ResultCache> open_cache(const RunConfig& run) {
  if (run.cache_path.empty()) return nullptr;
  auto cache = std::make_unique<ResultCache>(fs::path(run.cache_path));
  for (const auto& w : cache->warnings()) std::cerr << "cache: " << w << '\n';
  return cache;
}

void write_json(const fs::path& file, const nlohmann::json& j) {
  std::ofstream out(file);
  out << j.dump(2) << '\n';
  if (!out) throw std::runtime_error("cannot write " + file.string());
}

int cmd_specfun_check() {
  const auto checks = specfun_checks();
  print_checks(checks, std::cout);
  for (const auto& c : checks)
    if (!c.pass) return kExitCheck;
  return kExitOk;
}

int cmd_sweep(const Options& opt) {
  const RunConfig run = resolve(opt);
  const fs::path out = run.out_dir;
  fs::create_directories(out);
  auto cache = open_cache(run);
  SweepConfig config = run.sweep;
  config.cache = cache.get();

  bool ok = true;
  SweepTable table;
  try {
    table = run_sweep(config, run.lambdas);
  } catch (const SweepAborted& e) {
    std::cerr << "sweep aborted: " << e.what() << '\n';
    table = e.table();
    ok = false;
  }

  {
    std::ofstream csv(out / "sweep.csv");
    write_csv(table, csv);
  }
  write_json(out / "sweep.json", to_json(table));

  std::optional<ExponentFit> fit;
  nlohmann::json fit_json;
  try {
    fit = fit_exponent(table);
    fit_json = to_json(*fit);
  } catch (const InsufficientDataError& e) {
    fit_json = {{"error", e.what()}};
  }
  fit_json["max_slope"] = run.max_slope ? nlohmann::json(*run.max_slope) : nlohmann::json(nullptr);
  fit_json["max_leverage"] = run.max_leverage ? nlohmann::json(*run.max_leverage) : nlohmann::json(nullptr);

  for (const auto& row : table.rows) {
    if (!row.ok) {
      std::cerr << "lambda " << row.lambda << ": " << row.error << '\n';
    } else if (!row.gap_ok) {
      std::cerr << "lambda " << row.lambda << ": gap check failed\n";
      ok = false;
    }
  }
  std::cout << table.rows.size() << " levels, " << table.failures() << " failed\n";
  if (fit) {
    std::cout << std::setprecision(4) << "slope " << fit->slope << " (leverage " << fit->leverage << ", "
              << fit->samples << " samples)\n";
    const bool slope_ok = !run.max_slope || fit->slope <= *run.max_slope;
    const bool leverage_ok = !run.max_leverage || fit->leverage <= *run.max_leverage;
    if (!slope_ok) std::cout << "slope exceeds " << *run.max_slope << '\n';
    if (!leverage_ok) std::cout << "leverage exceeds " << *run.max_leverage << '\n';
    ok = ok && slope_ok && leverage_ok;
  } else {
    std::cout << "no fit: " << fit_json["error"].get<std::string>() << '\n';
    if (run.max_slope || run.max_leverage) ok = false;
  }
  fit_json["pass"] = ok;
  write_json(out / "fit.json", fit_json);

  const std::pair<std::string, double> refs[] = {
      {"5/12", 5.0 / 12.0}, {"4/9", 4.0 / 9.0}, {"1/3", 1.0 / 3.0}};
  std::ofstream(out / "sweep.gp") << plot_script(table, fit, refs);
  return ok ? kExitOk : kExitCheck;
}

int cmd_lemmas(const Options& opt) {
  const RunConfig run = resolve(opt);
  const fs::path out = run.out_dir;
  fs::create_directories(out);
  auto cache = open_cache(run);
  SweepConfig config = run.sweep;
  config.cache = cache.get();

  const LemmaReport report = run_lemmas(config, run.lemma_lambda);
  write_json(out / "lemmas.json", to_json(report));
  std::cout << "lambda " << report.lambda << " on " << report.surface << '\n';
  for (const auto& c : report.checks) std::cout << "  " << std::left << std::setw(20) << c.name << to_string(c.verdict) << '\n';
  return report.pass() ? kExitOk : kExitCheck;
}

int cmd_genericity(const Options& opt) {
  const RunConfig run = resolve(opt);
  if (run.sweep.is_disk()) throw ConfigError("surface", "genericity needs a surface of revolution");
  const RevolutionProfile profile = RevolutionProfile::from_spec(run.sweep.surface);
  const fs::path out = run.out_dir;
  fs::create_directories(out);

  const GenericityReport report = genericity_check(profile);
  nlohmann::json zeros = nlohmann::json::array();
  for (const auto& z : report.zeros)
    zeros.push_back({{"mu", z.mu}, {"dkappa", z.dkappa}, {"nondegenerate", z.nondegenerate}});
  write_json(out / "genericity.json", {{"surface", profile.id()},
                                       {"verdict", to_string(report.verdict)},
                                       {"kappa_max", report.kappa_max},
                                       {"action_decreasing", report.action_decreasing},
                                       {"curvature_zeros", zeros}});
  std::cout << "verdict " << to_string(report.verdict) << '\n';
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  if (const char* p = std::getenv("CAUSTICA_TEST_AIRY_PERTURBATION"); p && *p)
    specfun::testing::set_airy_perturbation(std::strtod(p, nullptr));

  CLI::App app{"Spectral projector sup-norms on the disk and surfaces of revolution"};
  app.require_subcommand(1);
  Options opt;
  const auto add_common = [&](CLI::App* cmd, bool with_lambda) {
    cmd->add_option("--config", opt.config, "Run configuration (JSON)")->check(CLI::ExistingFile);
    cmd->add_option("--out", opt.out, "Output directory");
    cmd->add_option("--workers", opt.workers, "Sweep worker threads");
    cmd->add_option("--cache", opt.cache, "Cache file");
    cmd->add_flag("--seedless", opt.seedless, "Ignore any cache");
    if (with_lambda) cmd->add_option("--lambda", opt.lambda, "Level");
  };
  auto* specfun_cmd = app.add_subcommand("specfun-check", "Special-function invariant suite");
  auto* sweep_cmd = app.add_subcommand("sweep", "Sup-norm sweep and exponent fit");
  auto* lemmas_cmd = app.add_subcommand("lemmas", "Lemma checks at one level");
  auto* genericity_cmd = app.add_subcommand("genericity", "Inflection test of the action curve");
  add_common(sweep_cmd, false);
  add_common(lemmas_cmd, true);
  add_common(genericity_cmd, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*specfun_cmd) return cmd_specfun_check();
    if (*sweep_cmd) return cmd_sweep(opt);
    if (*lemmas_cmd) return cmd_lemmas(opt);
    if (*genericity_cmd) return cmd_genericity(opt);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitCheck;
  }
  return kExitConfig;
}
