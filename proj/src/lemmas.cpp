#include "caustica/lemmas.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "caustica/bands.hpp"
#include "caustica/calibration.hpp"
#include "caustica/errors.hpp"
#include "caustica/norms.hpp"
#include "caustica/specfun.hpp"

namespace caustica {

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::pass:
      return "pass";
    case Verdict::fail:
      return "fail";
    case Verdict::unsupported:
      return "unsupported";
  }
  return "?";
}

bool LemmaReport::pass() const {
  return std::none_of(checks.begin(), checks.end(), [](const LemmaCheck& c) { return c.verdict == Verdict::fail; });
}

const LemmaCheck& LemmaReport::at(const std::string& name) const {
  const auto it = std::find_if(checks.begin(), checks.end(), [&](const LemmaCheck& c) { return c.name == name; });
  if (it == checks.end()) throw DomainError("LemmaReport: no check named " + name);
  return *it;
}

namespace {

Verdict verdict(bool ok) { return ok ? Verdict::pass : Verdict::fail; }

nlohmann::json finite_or_null(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); }

}  // namespace

LemmaReport run_lemmas(const SweepConfig& config, double lambda) {
  namespace cal = calibration;
  const double delta = config.delta_for(lambda);
  const auto family = band_family(config, lambda, delta);
  const Region region = config_region(config);
  const Band band = assemble_band(*family, lambda, delta, config.cutoff);
  const bool disk = config.is_disk();

  LemmaReport report;
  report.lambda = lambda;
  report.delta = delta;
  report.surface = band.surface_id;

  const double cone = family->mu_max() - config.cone_eps;
  const GapReport gap = check_gap(band, cone);
  report.checks.push_back({"gap",
                           verdict(gap.injective),
                           {{"cone", cone},
                            {"checked", gap.checked},
                            {"min_separation", gap.checked > 1 ? nlohmann::json(gap.min_separation) : nullptr},
                            {"repeated_n", gap.repeated_n}}});

  const SpacingReport spacing =
      check_caustic_spacing(band, config.spacing_window.first, config.spacing_window.second);
  const double spacing_bound = disk ? cal::kDiskInteriorSpacing / 2.0 : cal::kRevolutionSpacing;
  report.checks.push_back({"caustic_spacing",
                           verdict(spacing.trivial || spacing.normalized >= spacing_bound),
                           {{"window", {spacing.mu_lo, spacing.mu_hi}},
                            {"count", spacing.count},
                            {"min_gap_times_lambda", finite_or_null(spacing.normalized)},
                            {"bound", spacing_bound},
                            {"mu_normalization", to_string(spacing.normalization)}}});

  if (disk) {
    const double eps = std::pow(lambda, -1.0 / 3.0);
    const SpacingReport edge = check_boundary_spacing(band, eps);
    report.checks.push_back({"boundary_spacing",
                             verdict(edge.trivial || edge.normalized >= cal::kDiskBoundarySpacing / 2.0),
                             {{"eps", eps},
                              {"count", edge.count},
                              {"normalized_gap", finite_or_null(edge.normalized)},
                              {"bound", cal::kDiskBoundarySpacing / 2.0}}});
    double clearance = std::numeric_limits<double>::infinity();
    for (const auto& e : band.entries) clearance = std::min(clearance, (1.0 - e.nu.mu) * std::pow(lambda, 2.0 / 3.0));
    report.checks.push_back({"edge_clearance",
                             verdict(!(clearance < cal::kDiskEdgeClearance / 2.0)),
                             {{"min_one_minus_mu_times_lambda_2_3", finite_or_null(clearance)},
                              {"bound", cal::kDiskEdgeClearance / 2.0}}});

    const std::array<int, 5> orders{50, 100, 200, 400, 800};
    const double constant = specfun::olver_fit(orders, 2.1).constant;
    const ZeroAsymptoticsReport zeros = check_zero_asymptotics(band, config.zero_cone, constant);
    report.checks.push_back(
        {"zero_asymptotics",
         verdict(zeros.residual_ok && zeros.max_pair_ratio <= 2.0 * cal::kAiryPairRatio),
         {{"checked", zeros.checked},
          {"n_min", zeros.n_min},
          {"max_residual", zeros.max_residual},
          {"olver_constant", constant},
          {"bound", zeros.bound},
          {"max_argument", zeros.max_argument},
          {"max_pair_ratio", zeros.max_pair_ratio},
          {"pair_ratio_bound", 2.0 * cal::kAiryPairRatio}}});
  } else {
    report.checks.push_back({"zero_asymptotics", Verdict::unsupported, {{"reason", "disk bands only"}}});
  }

  const std::vector<double> points = region_grid(region, band, *family);
  const EnvelopeReport env = envelope_ratio(band, *family, points, config.alpha, Exec::parallel);
  const double env_bound = 2.0 * (disk ? cal::kDiskEnvelope : cal::kRevolutionEnvelope);
  nlohmann::json env_detail = to_json(env);
  env_detail["bound"] = env_bound;
  report.checks.push_back({"envelope", verdict(env.max_ratio <= env_bound), env_detail});

  if (disk) {
    std::vector<BandEntry> cone_entries;
    for (const auto& e : band.entries)
      if (std::abs(e.nu.n) >= config.zero_cone * lambda) cone_entries.push_back(e);
    const Band cone_band = make_band(lambda, delta, band.surface_id, std::move(cone_entries));
    const double scale = std::pow(lambda, -2.0 / 3.0 + config.alpha);
    double worst_a = 0.0, worst_c = 0.0, worst_b_far = 0.0, worst_b_near = 0.0;
    for (int i = 0; i <= 40; ++i) {
      const double eta = 0.1 * i / 40.0;
      const AbcReport abc = abc_decomposition(cone_band, *family, 1.0 - eta, config.alpha);
      if (abc.total > 0.0) worst_a = std::max(worst_a, abc.sigma_a / abc.total);
      worst_c = std::max(worst_c, abc.sigma_c / std::pow(lambda, 8.0 / 9.0));
      if (eta >= scale)
        worst_b_far = std::max(worst_b_far, abc.sigma_b / std::pow(lambda, 8.0 / 9.0));
      else
        worst_b_near = std::max(worst_b_near, abc.sigma_b / std::pow(lambda, 2.0 / 3.0 + config.alpha));
    }
    const bool ok = worst_a <= cal::kSigmaARelative && worst_c <= 2.0 * cal::kSigmaC &&
                    worst_b_far <= 2.0 * cal::kSigmaBFar && worst_b_near <= 2.0 * cal::kSigmaBNear;
    report.checks.push_back({"abc_decomposition",
                             verdict(ok),
                             {{"alpha", config.alpha},
                              {"eta_range", {0.0, 0.1}},
                              {"max_sigma_a_relative", worst_a},
                              {"sigma_a_relative_bound", cal::kSigmaARelative},
                              {"max_sigma_c_over_lambda_8_9", worst_c},
                              {"sigma_c_bound", 2.0 * cal::kSigmaC},
                              {"max_sigma_b_over_lambda_8_9", worst_b_far},
                              {"sigma_b_far_bound", 2.0 * cal::kSigmaBFar},
                              {"max_sigma_b_over_lambda_2_3_alpha", worst_b_near},
                              {"sigma_b_near_bound", 2.0 * cal::kSigmaBNear}}});
  } else {
    report.checks.push_back({"abc_decomposition", Verdict::unsupported, {{"reason", "disk bands only"}}});
  }
  return report;
}

nlohmann::json to_json(const LemmaReport& report) {
  nlohmann::json checks = nlohmann::json::object();
  for (const auto& c : report.checks) {
    nlohmann::json entry = c.detail;
    entry["verdict"] = to_string(c.verdict);
    checks[c.name] = entry;
  }
  return {{"lambda", report.lambda},
          {"delta", report.delta},
          {"surface", report.surface},
          {"pass", report.pass()},
          {"checks", checks}};
}

}  // namespace caustica
