#pragma once

// Expected state durations, volatility indicators and their comparison
// against a reference index.

#include <optional>
#include <span>
#include <vector>

#include "switchvol/regime.hpp"

namespace switchvol {

struct DurationReport {
  std::vector<double> durations;  // expected sojourn in time steps, >= 1
};

/// d_j = 1 / (1 - p_jj). Throws when some p_jj equals 1.
DurationReport expected_durations(const TransitionMatrix& P);

/// Mean over draws of the per-draw durations.
DurationReport mean_draw_durations(std::span<const TransitionMatrix> draws);

enum class IndicatorKind { jump, stable };

struct Alignment {
  double a = 1.0;  // slope
  double c = 0.0;  // intercept
};

struct IndicatorSeries {
  std::vector<double> values;
  IndicatorKind kind = IndicatorKind::jump;
  std::optional<Alignment> alignment;
};

/// sqrt(sum_j P(S_t = j | y_1..y_t) (sigma_j^2 + N_j (N_j + 1) / b^2)).
IndicatorSeries indicator_jump(const FilteredProbs& filtered,
                               std::span<const double> sigma_sq_hat,
                               std::span<const double> n_hat, double b);

/// sqrt(lambda sum_j P(S_t = j | y_1..y_t) gamma_j^2).
IndicatorSeries indicator_stable(const FilteredProbs& filtered, double lambda_hat,
                                 std::span<const double> gamma_sq_hat);

/// Least-squares fit of a * indicator + c to the reference. The returned
/// series holds the transformed values and the fitted coefficients.
IndicatorSeries affine_align(const IndicatorSeries& indicator,
                             std::span<const double> reference);

/// Sum of squared differences.
double score(std::span<const double> indicator, std::span<const double> reference);

}  // namespace switchvol
