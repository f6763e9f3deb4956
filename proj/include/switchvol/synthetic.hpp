#pragma once

// Forward simulators for both models and brute-force oracles: exhaustive
// path enumeration and 1-D grid posteriors.

#include <cstdint>
#include <functional>
#include <vector>

#include "switchvol/jump_model.hpp"
#include "switchvol/regime.hpp"
#include "switchvol/stable_model.hpp"

namespace switchvol {

struct SyntheticJumpData {
  std::vector<double> y;
  StatePath path;
  JumpParams params;
  std::vector<int> jumps;  // per-observation jump counts N_t
};

struct SyntheticStableData {
  std::vector<double> y;
  StatePath path;
  StableModelParams params;
};

/// Draws S_t from the chain, then y_t = mu + sigma eps + symGamma(N_t, b)
/// with N_t ~ Poisson(theta_{S_t}) drawn per observation. With one state no
/// randomness is spent on the path.
SyntheticJumpData simulate_jump_model(const JumpParams& params, const TransitionMatrix& P,
                                      const InitialDistribution& pi0, int T, Rng& rng);

/// y_t ~ S_{alpha,0}(gamma_{S_t}, mu_{S_t}) drawn directly by CMS. `params.lambda`
/// is not used.
SyntheticStableData simulate_stable_model(const StableModelParams& params,
                                          const TransitionMatrix& P,
                                          const InitialDistribution& pi0, int T, Rng& rng);

struct PathPosterior {
  int T = 0;
  int M = 0;
  std::vector<double> path_probs;  // index = sum_t s_t M^(T-1-t)
  std::vector<double> marginals;   // T x M smoothed marginals
  double loglik = 0.0;

  std::vector<int> decode(std::size_t index) const;
  std::size_t encode(const std::vector<int>& states) const;
};

/// Exact joint posterior over all M^T paths; refuses M^T > 10^4.
PathPosterior enumerate_path_posterior(const EmissionTable& emissions,
                                       const TransitionMatrix& P,
                                       const InitialDistribution& pi0);

/// Filtered probabilities by enumerating every prefix, row t from the
/// posterior of paths of length t + 1.
FilteredProbs enumerate_filtered(const EmissionTable& emissions, const TransitionMatrix& P,
                                 const InitialDistribution& pi0);

/// Smoothed marginals P(S_t | y_1..y_T) from filtered probabilities.
std::vector<double> smoothed_marginals(const FilteredProbs& filtered, const TransitionMatrix& P);

struct Grid {
  double lo = 0.0;
  double hi = 1.0;
  int cells = 1000;
};

struct GridPosterior {
  std::vector<double> points;  // cell centres
  std::vector<double> probs;   // normalized cell masses
  double step = 0.0;

  double mean() const;
  /// Cell masses aggregated into `bins` equal bins; cells must divide evenly.
  std::vector<double> coarsen(int bins) const;
};

/// Normalized prior x likelihood on the cell centres of `grid`. Throws when
/// more than 1e-8 of the mass appears to lie outside the grid.
GridPosterior grid_posterior(const std::function<double(double)>& log_prior,
                             const std::function<double(double)>& log_lik, const Grid& grid);

}  // namespace switchvol
