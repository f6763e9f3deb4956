#pragma once

// Sample summaries and goodness-of-fit statistics used by the verification
// harness and by chain summaries.

#include <functional>
#include <span>
#include <vector>

namespace switchvol {

double mean(std::span<const double> xs);
/// Unbiased sample variance (n - 1 denominator).
double variance(std::span<const double> xs);
double standard_error(std::span<const double> xs);

/// Integrated autocorrelation time by Geyer's initial positive sequence.
double autocorrelation_time(std::span<const double> xs);
/// Standard error of the mean corrected for autocorrelation.
double mcmc_standard_error(std::span<const double> xs);

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

/// Kolmogorov distribution tail Q(t) = 2 sum (-1)^{k-1} exp(-2 k^2 t^2).
double kolmogorov_q(double t);

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);
KsResult ks_one_sample(std::vector<double> xs,
                       const std::function<double(double)>& cdf);

struct ChiSquareResult {
  double statistic = 0.0;
  int dof = 0;
  double p_value = 1.0;
};

/// Pearson goodness of fit of observed counts against expected counts.
/// Cells with expected < 5 are pooled into their neighbour.
ChiSquareResult chi_square_gof(std::span<const double> observed,
                               std::span<const double> expected);

/// Equal-width histogram on [lo, hi] normalized to probabilities; samples
/// outside the range are clamped into the edge bins.
std::vector<double> histogram(std::span<const double> xs, double lo, double hi,
                              int bins);

/// 0.5 * sum |p - q|.
double total_variation(std::span<const double> p, std::span<const double> q);

double quantile(std::vector<double> xs, double q);

}  // namespace switchvol
