#include "caustica/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "caustica/errors.hpp"
#include "caustica/norms.hpp"
#include "caustica/revolution.hpp"

namespace caustica {
namespace {

using nlohmann::json;

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys{
      "$schema",       "description",    "surface",      "region",          "region_margin", "lambda_min",
      "lambda_max",    "lambda_count",   "lambdas",      "delta_scale",     "delta_power",   "cutoff_plateau",
      "cutoff_support", "cone_eps",      "alpha",        "zero_cone",       "spacing_lo",    "spacing_hi",
      "radial_cells",  "radial_lambda_h", "workers",     "max_failure_fraction", "cache",   "out",
      "max_slope",     "max_leverage",   "lemma_lambda"};
  return keys;
}

int line_of_offset(std::string_view text, std::size_t offset) {
  offset = std::min(offset, text.size());
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<long>(offset), '\n'));
}

class Reader {
 public:
  Reader(std::string_view text, const json& root) : text_(text), root_(root) {}

  [[noreturn]] void fail(const std::string& field, const std::string& what) const {
    const std::size_t at = text_.find("\"" + field + "\"");
    if (at == std::string_view::npos) throw ConfigError(field, what);
    throw ConfigError(field, "line " + std::to_string(line_of_offset(text_, at)) + ": " + what);
  }

  bool has(const std::string& key) const { return root_.contains(key); }

  double number(const std::string& key, double fallback) const {
    if (!has(key)) return fallback;
    const json& v = root_.at(key);
    if (!v.is_number()) fail(key, "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) fail(key, "must be finite");
    return x;
  }

  int integer(const std::string& key, int fallback) const {
    if (!has(key)) return fallback;
    const json& v = root_.at(key);
    if (!v.is_number_integer()) fail(key, "expected an integer");
    return v.get<int>();
  }

  std::string string(const std::string& key, const std::string& fallback) const {
    if (!has(key)) return fallback;
    const json& v = root_.at(key);
    if (!v.is_string()) fail(key, "expected a string");
    return v.get<std::string>();
  }

  std::vector<double> numbers(const std::string& key) const {
    const json& v = root_.at(key);
    if (!v.is_array()) fail(key, "expected an array of numbers");
    std::vector<double> out;
    for (const json& x : v) {
      if (!x.is_number()) fail(key, "expected an array of numbers");
      out.push_back(x.get<double>());
    }
    return out;
  }

  std::vector<std::pair<double, double>> intervals(const std::string& key) const {
    const json& v = root_.at(key);
    if (!v.is_array() || v.empty()) fail(key, "expected a non-empty array of [lo, hi] pairs");
    std::vector<std::pair<double, double>> out;
    for (const json& pair : v) {
      if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number() || !pair[1].is_number())
        fail(key, "expected a non-empty array of [lo, hi] pairs");
      out.emplace_back(pair[0].get<double>(), pair[1].get<double>());
    }
    return out;
  }

 private:
  std::string_view text_;
  const json& root_;
};

}  // namespace

RunConfig parse_run_config(std::string_view text) {
  json root;
  try {
    root = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ConfigError("", "line " + std::to_string(line_of_offset(text, e.byte > 0 ? e.byte - 1 : 0)) +
                              ": malformed JSON (" + e.what() + ")");
  }
  if (!root.is_object()) throw ConfigError("", "line 1: top level must be an object");
  const Reader in(text, root);
  for (const auto& [key, value] : root.items())
    if (!known_keys().count(key)) in.fail(key, "unknown key");

  RunConfig config;
  SweepConfig& s = config.sweep;
  s.surface = in.string("surface", s.surface);
  if (in.has("region")) s.region = in.intervals("region");
  s.region_margin = in.number("region_margin", s.region_margin);
  s.delta_scale = in.number("delta_scale", s.delta_scale);
  s.delta_power = in.number("delta_power", s.delta_power);
  const double plateau = in.number("cutoff_plateau", 1.0);
  const double support = in.number("cutoff_support", 2.0);
  if (!(plateau > 0.0 && plateau < support)) in.fail(in.has("cutoff_plateau") ? "cutoff_plateau" : "cutoff_support", "need 0 < plateau < support");
  s.cutoff = Cutoff(plateau, support);
  s.cone_eps = in.number("cone_eps", s.cone_eps);
  s.alpha = in.number("alpha", s.alpha);
  s.zero_cone = in.number("zero_cone", s.zero_cone);
  s.spacing_window = {in.number("spacing_lo", s.spacing_window.first), in.number("spacing_hi", s.spacing_window.second)};
  s.radial_cells = in.integer("radial_cells", s.radial_cells);
  s.radial_lambda_h = in.number("radial_lambda_h", s.radial_lambda_h);
  s.workers = in.integer("workers", s.workers);
  s.max_failure_fraction = in.number("max_failure_fraction", s.max_failure_fraction);
  config.cache_path = in.string("cache", "");
  config.out_dir = in.string("out", config.out_dir);
  if (config.out_dir.empty()) in.fail("out", "must not be empty");
  if (in.has("max_slope")) config.max_slope = in.number("max_slope", 0.0);
  if (in.has("max_leverage")) config.max_leverage = in.number("max_leverage", 0.0);
  config.lemma_lambda = in.number("lemma_lambda", config.lemma_lambda);

  const double floor = s.is_disk() ? 10.0 : 0.0;
  const auto check_level = [&](const std::string& key, double x) {
    if (!(x > floor)) in.fail(key, s.is_disk() ? "levels must exceed 10 on the disk" : "levels must be positive");
  };
  check_level("lemma_lambda", config.lemma_lambda);
  if (in.has("lambdas")) {
    if (in.has("lambda_min") || in.has("lambda_max") || in.has("lambda_count"))
      in.fail("lambdas", "give either lambdas or lambda_min/lambda_max/lambda_count");
    config.lambdas = in.numbers("lambdas");
    for (std::size_t i = 0; i < config.lambdas.size(); ++i) {
      check_level("lambdas", config.lambdas[i]);
      if (i > 0 && !(config.lambdas[i] > config.lambdas[i - 1])) in.fail("lambdas", "must increase strictly");
    }
  } else if (in.has("lambda_min") || in.has("lambda_max") || in.has("lambda_count")) {
    const double lo = in.number("lambda_min", 0.0);
    const double hi = in.number("lambda_max", lo);
    const int count = in.integer("lambda_count", 16);
    check_level("lambda_min", lo);
    if (!(hi >= lo)) in.fail("lambda_max", "must be >= lambda_min");
    if (count < 0) in.fail("lambda_count", "must be >= 0");
    if (count > 1 && !(hi > lo)) in.fail("lambda_max", "must exceed lambda_min when lambda_count > 1");
    config.lambdas = log_grid(lo, hi, count);
  }

  try {
    s.validate();
  } catch (const ConfigError& e) {
    in.fail(e.field(), e.detail());
  }
  if (s.is_disk()) {
    if (s.region.size() != 1) in.fail("region", "the disk takes a single annulus");
  } else {
    std::optional<RevolutionProfile> profile;
    try {
      profile = RevolutionProfile::from_spec(s.surface);
    } catch (const std::exception& e) {
      in.fail("surface", e.what());
    }
    const ProfileReport report = validate_profile(*profile);
    if (!report.ok) in.fail("surface", "profile rejected: " + report.failures.front());
    try {
      Region::revolution(*profile, s.region, s.region_margin);
    } catch (const DomainError& e) {
      in.fail("region", e.what());
    }
  }
  return config;
}

RunConfig load_run_config(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw ConfigError("", "cannot read config file " + file.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_run_config(text.str());
}

nlohmann::json to_json(const RunConfig& config) {
  const SweepConfig& s = config.sweep;
  json regions = json::array();
  for (const auto& [lo, hi] : s.region) regions.push_back({lo, hi});
  json j{{"surface", s.surface},
         {"region", regions},
         {"region_margin", s.region_margin},
         {"lambdas", config.lambdas},
         {"delta_scale", s.delta_scale},
         {"delta_power", s.delta_power},
         {"cutoff_plateau", s.cutoff.plateau()},
         {"cutoff_support", s.cutoff.support()},
         {"cone_eps", s.cone_eps},
         {"alpha", s.alpha},
         {"zero_cone", s.zero_cone},
         {"spacing_lo", s.spacing_window.first},
         {"spacing_hi", s.spacing_window.second},
         {"radial_cells", s.radial_cells},
         {"radial_lambda_h", s.radial_lambda_h},
         {"workers", s.workers},
         {"max_failure_fraction", s.max_failure_fraction},
         {"cache", config.cache_path},
         {"out", config.out_dir},
         {"lemma_lambda", config.lemma_lambda}};
  if (config.max_slope) j["max_slope"] = *config.max_slope;
  if (config.max_leverage) j["max_leverage"] = *config.max_leverage;
  return j;
}

}  // namespace caustica
