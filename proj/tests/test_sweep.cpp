#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <sstream>
#include <vector>

#include "caustica/cache.hpp"
#include "caustica/errors.hpp"
#include "caustica/specfun.hpp"
#include "caustica/sweep.hpp"

using namespace caustica;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("caustica_sweep_" + name);
  fs::remove(p);
  return p;
}

std::vector<double> short_grid() { return log_grid(125.137, 400.137, 5); }

}  // namespace

TEST_CASE("exact power law recovers its exponent") {
  std::vector<double> x, y;
  for (double lambda : log_grid(100.0, 3000.0, 12)) {
    x.push_back(lambda);
    y.push_back(std::cbrt(lambda) * 2.5);
  }
  const ExponentFit fit = fit_power_law(x, y);
  CHECK(std::fabs(fit.slope - 1.0 / 3.0) <= 1e-12);
  CHECK(fit.intercept == doctest::Approx(std::log(2.5)).epsilon(1e-10));
  CHECK(fit.residual_std_error < 1e-12);
  CHECK(fit.leverage < 1e-12);
  CHECK(fit.samples == 12);
}

TEST_CASE("fits need eight samples") {
  const std::vector<double> x{1, 2, 3, 4, 5, 6, 7}, y{1, 2, 3, 4, 5, 6, 7};
  CHECK_THROWS_AS(fit_power_law(x, y), InsufficientDataError);
  SweepTable table;
  CHECK_THROWS_AS(fit_exponent(table), InsufficientDataError);
  const std::vector<double> x8{1, 2, 3, 4, 5, 6, 7, 8}, y8{1, 2, 3, 4, 5, 6, 7, -8};
  CHECK_THROWS_AS(fit_power_law(x8, y8), DomainError);
}

TEST_CASE("log grid") {
  CHECK(log_grid(1.0, 2.0, 0).empty());
  const std::vector<double> g = log_grid(125.137, 1999.137, 16);
  REQUIRE(g.size() == 16);
  CHECK(g.front() == 125.137);
  CHECK(g.back() == 1999.137);
  for (std::size_t i = 1; i < g.size(); ++i)
    CHECK(g[i] / g[i - 1] == doctest::Approx(std::pow(1999.137 / 125.137, 1.0 / 15.0)).epsilon(1e-12));
  CHECK_THROWS_AS(log_grid(-1.0, 2.0, 3), DomainError);
}

TEST_CASE("empty level list gives an empty table") {
  const SweepTable table = run_sweep(SweepConfig{}, {});
  CHECK(table.rows.empty());
  CHECK(table.failures() == 0);
  CHECK(table.surface == "disk");
}

TEST_CASE("configuration errors name the field") {
  SweepConfig config;
  const std::vector<double> negative{-5.0, 100.0};
  try {
    run_sweep(config, negative);
    FAIL("no error");
  } catch (const ConfigError& e) {
    CHECK(e.field() == "lambda");
  }
  const std::vector<double> unsorted{200.0, 150.0};
  CHECK_THROWS_AS(run_sweep(config, unsorted), ConfigError);
  config.region = {{0.0, 0.5}};
  CHECK_THROWS_AS(config.validate(), ConfigError);
  config = SweepConfig{};
  config.workers = 0;
  CHECK_THROWS_AS(config.validate(), ConfigError);
  config = SweepConfig{};
  config.surface = "table:/nonexistent/profile.csv";
  config.region = {{0.5, 0.9}};
  const std::vector<double> one{100.0};
  try {
    run_sweep(config, one);
    FAIL("no error");
  } catch (const ConfigError& e) {
    CHECK(e.field() == "surface");
  }
  config.surface = "perturbed(0.1)";
  config.region = {{0.05, 0.9}};
  CHECK_THROWS_AS(run_sweep(config, one), ConfigError);
}

TEST_CASE("failing rows are recorded and the sweep continues") {
  SweepConfig config;
  const std::vector<double> levels{5.0, 40.0, 45.0, 50.0, 55.0, 60.0};
  const SweepTable table = run_sweep(config, levels);
  REQUIRE(table.rows.size() == 6);
  CHECK(table.failures() == 1);
  CHECK_FALSE(table.rows[0].ok);
  CHECK_FALSE(table.rows[0].error.empty());
  for (std::size_t i = 1; i < 6; ++i) CHECK(table.rows[i].ok);
  const std::vector<double> mostly_bad{5.0, 6.0, 7.0, 40.0, 45.0};
  try {
    run_sweep(config, mostly_bad);
    FAIL("no abort");
  } catch (const SweepAborted& e) {
    CHECK(e.table().failures() == 3);
    CHECK(e.table().rows.size() == 5);
  }
}

TEST_CASE("revolution rows fail when the grid is too coarse for the level") {
  SweepConfig config;
  config.surface = "perturbed(0.1)";
  config.region = {{0.4, 1.0}};
  config.radial_cells = 2000;
  config.max_failure_fraction = 0.5;
  const std::vector<double> levels{30.137, 40.137, 50.137, 70.137};
  const SweepTable table = run_sweep(config, levels);
  CHECK(table.failures() == 1);
  CHECK_FALSE(table.rows.back().ok);
  CHECK(std::isnan(table.rows.front().sigma_a));
  const nlohmann::json j = to_json(table);
  CHECK(j.at("rows").at(0).at("sigma_a").is_null());
  CHECK(j.at("failures").get<std::size_t>() == 1);
}

TEST_CASE("reruns are deterministic across worker counts") {
  SweepConfig config;
  const SweepTable one = run_sweep(config, short_grid());
  config.workers = 3;
  const SweepTable three = run_sweep(config, short_grid());
  CHECK(same_results(one, three));
  SweepTable altered = three;
  altered.rows[2].sup = std::nextafter(altered.rows[2].sup, 1e300);
  CHECK_FALSE(same_results(one, altered));
  altered = three;
  altered.rows[1].wall_time += 10.0;
  CHECK(same_results(three, altered));
}

TEST_CASE("warm cache reproduces the cold sweep without zero finding") {
  const fs::path file = scratch("warm.bin");
  SweepConfig config;
  config.region = {{0.9, 1.0}};
  const std::vector<double> levels = log_grid(1500.137, 2000.137, 2);
  const SweepTable plain = run_sweep(config, levels);
  SweepTable cold, warm;
  {
    ResultCache cache(file);
    config.cache = &cache;
    cold = run_sweep(config, levels);
  }
  {
    ResultCache cache(file);
    config.cache = &cache;
    const std::size_t before = specfun::zero_search_evaluations();
    warm = run_sweep(config, levels);
    CHECK(specfun::zero_search_evaluations() == before);
    CHECK(cache.misses() == 0);
  }
  CHECK(same_results(plain, cold));
  CHECK(same_results(cold, warm));
  fs::remove(file);
}

TEST_CASE("disk interior sweep") {
  SweepConfig config;
  const SweepTable table = run_sweep(config, log_grid(125.137, 1999.137, 16));
  REQUIRE(table.rows.size() == 16);
  CHECK(table.failures() == 0);
  for (const auto& row : table.rows) {
    CAPTURE(row.lambda);
    CHECK(row.gap_ok);
    CHECK(row.min_caustic_gap > 0.0);
    CHECK(row.sup > 0.0);
  }
  const ExponentFit fit = fit_exponent(table);
  MESSAGE("interior slope " << fit.slope << " leverage " << fit.leverage);
  CHECK(fit.slope <= 5.0 / 12.0 + 0.03);
  CHECK(fit.leverage < 0.02);
}

TEST_CASE("delta sweep widens the band") {
  SweepConfig config;
  const std::vector<double> deltas{0.05, 0.1, 0.2, 0.4};
  const SweepTable table = run_delta_sweep(config, 300.137, deltas);
  REQUIRE(table.rows.size() == 4);
  for (std::size_t i = 1; i < 4; ++i) {
    CHECK(table.rows[i].band_count >= table.rows[i - 1].band_count);
    CHECK(table.rows[i].delta == deltas[i]);
  }
}

TEST_CASE("csv, json and plot output") {
  SweepConfig config;
  const SweepTable table = run_sweep(config, short_grid());
  std::ostringstream csv;
  write_csv(table, csv);
  std::istringstream in(csv.str());
  std::string header, line;
  std::getline(in, header);
  CHECK(header.rfind("lambda,delta,sup,sup_sqrt,argmax,", 0) == 0);
  const auto columns = std::count(header.begin(), header.end(), ',');
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    CHECK(std::count(line.begin(), line.end(), ',') == columns);
  }
  CHECK(rows == table.rows.size());
  const nlohmann::json j = to_json(table);
  CHECK(j.at("rows").size() == table.rows.size());
  CHECK(j.at("rows").at(0).at("lambda").get<double>() == table.rows[0].lambda);
  CHECK(j.at("region").get<std::string>() == table.region);
  const std::vector<std::pair<std::string, double>> refs{{"5/12", 5.0 / 12.0}};
  const std::string script = plot_script(table, std::nullopt, refs);
  CHECK(script.find("set logscale xy") != std::string::npos);
  CHECK(script.find("$sweep << EOD") != std::string::npos);
  CHECK(script.find("'5/12'") != std::string::npos);
}
