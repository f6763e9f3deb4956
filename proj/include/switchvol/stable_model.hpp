#pragma once

// Markov-switching alpha-stable model in its conditionally Gaussian form:
// y_t | lambda ~ N(mu_j, lambda gamma_j^2), gamma_j^2 = gamma_1^2 h*_2 ... h*_j,
// with a single mixing variable lambda shared by all observations.

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "switchvol/distributions.hpp"
#include "switchvol/mcmc.hpp"
#include "switchvol/regime.hpp"

namespace switchvol {

struct StableModelParams {
  std::vector<double> mu;
  double gamma1_sq = 1e-4;
  std::vector<double> h_star;
  double lambda = 1.0;
  double alpha = 1.7;  // fixed, never sampled

  int states() const { return static_cast<int>(mu.size()); }
  double gamma_sq(int j) const;
  std::vector<double> gamma_sq_all() const;
  void validate(double lambda_floor = 0.0) const;
};

struct StablePriors {
  double k = 1e3;
  InvGammaParams scale_prior{2.0, 1e-4};  // gamma_1^2
  FrechetParams frechet{1.0, 2.0, 0.5};
  std::vector<DirichletParams> dirichlet_rows;
  double lambda_floor = 1e-6;
  bool fix_mean_zero = false;

  static StablePriors defaults(int M);
  void validate(int M) const;
};

/// Gaussian log-likelihood of all observations given the path and lambda.
double stable_conditional_loglik(std::span<const double> y, const StatePath& path,
                                 const StableModelParams& p);

/// One MH step for lambda against the positive stable prior times the
/// conditional likelihood. Proposals below the floor are rejected.
MhResult sample_lambda(std::span<const double> y, const StatePath& path,
                       const StableModelParams& p, const StablePriors& priors,
                       double step, Rng& rng);

double sample_gamma1_sq(std::span<const double> data_1, const StableModelParams& p,
                        const StablePriors& priors, Rng& rng);
double sample_stable_mu_j(std::span<const double> data_j, int j,
                          const StableModelParams& p, const StablePriors& priors,
                          Rng& rng);
MhResult sample_stable_h_star_j(std::span<const double> data_j, int j,
                                const StableModelParams& p, const StablePriors& priors,
                                double step, Rng& rng);

struct StableState {
  StatePath path;
  TransitionMatrix P;
  StableModelParams params;
  double loglik = 0.0;

  std::vector<std::pair<std::string, double>> scalars() const;
};

class StableSampler {
 public:
  StableSampler(std::vector<double> y, StablePriors priors, InitialDistribution pi0);

  /// One sweep: path, P, lambda, gamma_1^2, h* ascending, mu.
  void sweep(StableState& state, SweepContext& ctx);

  const FilteredProbs& last_filtered() const { return filtered_; }
  const StablePriors& priors() const { return priors_; }
  std::span<const double> data() const { return y_; }

 private:
  std::vector<double> y_;
  StablePriors priors_;
  InitialDistribution pi0_;
  FilteredProbs filtered_;
  AdaptiveScale lambda_step_{0.2};
  std::vector<AdaptiveScale> h_step_;
};

}  // namespace switchvol
