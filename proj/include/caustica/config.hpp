#pragma once

// Run configuration: a flat JSON object, validated in full before any
// computation. Field reference: schema/run-config.schema.json.

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "caustica/sweep.hpp"
#include "json.hpp"

namespace caustica {

struct RunConfig {
  SweepConfig sweep;  ///< cache pointer left unset
  std::vector<double> lambdas;
  std::string out_dir = "caustica-out";
  std::string cache_path;  ///< empty: no persistent cache
  std::optional<double> max_slope;
  std::optional<double> max_leverage;
  double lemma_lambda = 500.0;
};

/// Throws ConfigError; the message starts with "line N:" when the offending
/// key (or the syntax error) can be located in `text`.
RunConfig parse_run_config(std::string_view text);
RunConfig load_run_config(const std::filesystem::path& file);

nlohmann::json to_json(const RunConfig& config);

}  // namespace caustica
