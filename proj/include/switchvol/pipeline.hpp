#pragma once

// End-to-end fitting: initialization, chain, posterior summaries,
// indicators and exports.

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "switchvol/analysis.hpp"
#include "switchvol/config.hpp"
#include "switchvol/io.hpp"
#include "switchvol/mcmc.hpp"
#include "switchvol/regime.hpp"

namespace switchvol {

struct Comparison {
  std::vector<std::string> dates;
  std::vector<double> indicator;
  std::vector<double> reference;
  IndicatorSeries aligned;  // carries the fitted (a, c)
  double score = 0.0;
  std::size_t dropped_indicator = 0;
  std::size_t dropped_reference = 0;
};

struct FitReport {
  RunConfig config;
  ReturnSeries returns;
  int M = 0;

  std::vector<std::string> scalar_names;
  std::vector<std::vector<double>> chain_rows;  // one row per retained draw
  std::vector<ParamSummary> summary;
  AcceptanceTally acceptance;

  /// Posterior means keyed by parameter family, e.g. "sigma_sq" -> per state.
  std::vector<std::pair<std::string, std::vector<double>>> estimates;
  std::vector<double> P_hat;  // M x M mean transition matrix
  std::vector<double> M_hat;  // M x M mean transition counts
  DurationReport durations_of_mean;   // 1 / (1 - p_hat_jj)
  DurationReport durations_mean_of_draws;

  FilteredProbs filtered;  // filtered probabilities averaged over draws
  IndicatorSeries indicator;
  std::optional<Comparison> comparison;

  const std::vector<double>& estimate(const std::string& name) const;
  std::vector<int> argmax_states() const;
};

FitReport fit_jump(const RunConfig& cfg, const ReturnSeries& returns);
FitReport fit_stable(const RunConfig& cfg, const ReturnSeries& returns);

Comparison compare_to_reference(const IndicatorSeries& indicator,
                                const std::vector<std::string>& dates,
                                const DatedSeries& reference);

/// Loads data (and the reference, if configured), fits the configured model
/// and attaches the comparison.
FitReport run_fit(const RunConfig& cfg);

/// Writes summary.json, chain.csv, indicator.csv and filtered.csv.
void export_results(const FitReport& report, const std::filesystem::path& dir);

/// Weekly ISO dates starting 2000-01-03, for synthetic series.
std::vector<std::string> synthetic_dates(std::size_t count);

}  // namespace switchvol
