#pragma once

// Markov-switching jump-diffusion model: y_t = mu_j + sigma_j eps_t plus a
// symmetric Gamma(N_j, b) jump, with sigma_j^2 = sigma_1^2 h*_2 ... h*_j.

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "switchvol/distributions.hpp"
#include "switchvol/mcmc.hpp"
#include "switchvol/regime.hpp"

namespace switchvol {

struct JumpParams {
  std::vector<double> mu;      // per state
  double sigma1_sq = 1e-4;
  std::vector<double> h_star;  // h_star[i] multiplies state i+1 onto state i
  std::vector<double> theta;   // Poisson rates
  std::vector<int> n_jumps;    // N_j
  double b = 40.0;

  int states() const { return static_cast<int>(mu.size()); }
  double sigma_sq(int j) const;
  std::vector<double> sigma_sq_all() const;
  /// Throws a domain Error when an invariant fails. With u given, also
  /// checks theta_j in (u_{j-1}, u_j].
  void validate(const std::vector<double>* u = nullptr) const;
};

struct JumpPriors {
  double k = 1e3;                          // prior precision of mu_j
  InvGammaParams sigma_prior{2.0, 2e-4};   // sigma_1^2
  FrechetParams frechet{1.0, 2.0, 0.5};    // h*_j
  std::vector<double> u;                   // theta_j in (u_{j-1}, u_j], u_0 = 0
  std::vector<DirichletParams> dirichlet_rows;
  bool fix_mean_zero = true;

  static JumpPriors defaults(int M);
  void validate(int M) const;
  double theta_lower(int j) const { return j == 0 ? 0.0 : u[static_cast<std::size_t>(j - 1)]; }
  double theta_upper(int j) const { return u[static_cast<std::size_t>(j)]; }
};

/// Dirichlet rows used by both models: states in the upper half get a
/// diagonal weight of 8 and 1 elsewhere, the rest are flat.
std::vector<DirichletParams> default_dirichlet_rows(int M);

double jump_emission_logpdf(double y, int j, const JumpParams& p);
double jump_state_loglik(std::span<const double> data_j, int j, const JumpParams& p);

MhResult sample_mu_j(std::span<const double> data_j, int j, const JumpParams& p,
                     const JumpPriors& priors, double step, Rng& rng);
MhResult sample_sigma1_sq(std::span<const double> data_1, const JumpParams& p,
                          const JumpPriors& priors, double step, Rng& rng);
/// j >= 1 (0-based state index). Returns the new h*_j.
MhResult sample_h_star_j(std::span<const double> data_j, int j, const JumpParams& p,
                         const JumpPriors& priors, double step, Rng& rng);

/// Normalized conditional weights of N_j over 0..N_max, where N_max is the
/// first count whose Poisson(theta_j) upper tail falls below 1e-12.
std::vector<double> n_jumps_conditional(std::span<const double> data_j, int j,
                                        const JumpParams& p);
int sample_n_jumps_j(std::span<const double> data_j, int j, const JumpParams& p,
                     Rng& rng);

MhResult sample_theta_j(int j, const JumpParams& p, const JumpPriors& priors,
                        double step, Rng& rng);

struct JumpState {
  StatePath path;
  TransitionMatrix P;
  JumpParams params;
  double loglik = 0.0;  // filter log-likelihood at the start of the sweep

  std::vector<std::pair<std::string, double>> scalars() const;
};

/// Groups observations by state.
std::vector<std::vector<double>> split_by_state(std::span<const double> y,
                                                const StatePath& path, int M);

class JumpSampler {
 public:
  JumpSampler(std::vector<double> y, JumpPriors priors, InitialDistribution pi0);

  /// One Gibbs sweep: path, P, mu (unless fixed), sigma_1^2, h* ascending,
  /// N ascending, theta ascending.
  void sweep(JumpState& state, SweepContext& ctx);

  /// Filtered probabilities computed at the start of the last sweep.
  const FilteredProbs& last_filtered() const { return filtered_; }
  const JumpPriors& priors() const { return priors_; }
  std::span<const double> data() const { return y_; }

 private:
  std::vector<double> y_;
  JumpPriors priors_;
  InitialDistribution pi0_;
  FilteredProbs filtered_;
  std::vector<AdaptiveScale> mu_step_;
  AdaptiveScale sigma_step_{0.3};
  std::vector<AdaptiveScale> h_step_;
  std::vector<AdaptiveScale> theta_step_;
};

}  // namespace switchvol
