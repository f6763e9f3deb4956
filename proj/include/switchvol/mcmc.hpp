#pragma once

// Metropolis-Hastings kernels, conjugate updates and chain storage.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "switchvol/distributions.hpp"
#include "switchvol/error.hpp"
#include "switchvol/random.hpp"

namespace switchvol {

using LogTarget = std::function<double(double)>;

/// Proposal q(. | current) with its log density, both taking the step scale.
struct Proposal {
  std::function<double(double current, double scale, Rng& rng)> draw;
  std::function<double(double to, double from, double scale)> log_density;
};

/// Symmetric Gaussian random walk.
Proposal random_walk_proposal();

/// Gaussian random walk on log(x - lower); supports (lower, inf).
Proposal log_scale_proposal(double lower = 0.0);

struct MhKernel {
  LogTarget log_target;
  Proposal proposal;
  double step_scale = 1.0;
};

struct MhResult {
  double value = 0.0;
  bool accepted = false;
  double log_target = 0.0;  // log target at `value`
};

MhResult mh_step(double current, const MhKernel& kernel, Rng& rng);

/// Same step, reusing a cached log target at `current`.
MhResult mh_step(double current, double current_log_target,
                 const MhKernel& kernel, Rng& rng);

/// Robbins-Monro adaptation of a log step scale toward a target acceptance
/// rate. Callers stop updating once burn-in ends.
class AdaptiveScale {
 public:
  explicit AdaptiveScale(double initial = 0.5, double target_rate = 0.3)
      : log_scale_(std::log(initial)), target_(target_rate) {}

  double value() const { return std::exp(log_scale_); }

  void update(bool accepted) {
    ++n_;
    const double gain = 1.0 / std::pow(static_cast<double>(n_), 0.6);
    log_scale_ += gain * ((accepted ? 1.0 : 0.0) - target_);
    log_scale_ = std::clamp(log_scale_, -20.0, 5.0);
  }

 private:
  double log_scale_;
  double target_;
  long n_ = 0;
};

// ---------------------------------------------------------------------------
// Conjugate updates

/// Normal likelihood with known variance and a Normal(mu0, 1/k) prior.
struct NormalNormalPosterior {
  int n = 0;
  double ybar = 0.0;
  double sigma_sq = 1.0;
  double k = 1.0;
  double mu0 = 0.0;

  void validate() const;
  double mean() const;
  double variance() const;
};

double normal_normal_update(const NormalNormalPosterior& p, Rng& rng);

InvGammaParams inv_gamma_normal_posterior(double residual_sq_sum, int n,
                                          const InvGammaParams& prior);
double inv_gamma_normal_update(double residual_sq_sum, int n,
                               const InvGammaParams& prior, Rng& rng);

// ---------------------------------------------------------------------------
// Chains

class AcceptanceTally {
 public:
  struct Counts {
    long accepted = 0;
    long proposed = 0;
  };

  void record(const std::string& name, bool accepted) {
    auto& c = counts_[name];
    ++c.proposed;
    if (accepted) ++c.accepted;
  }

  std::optional<double> rate(const std::string& name) const {
    const auto it = counts_.find(name);
    if (it == counts_.end() || it->second.proposed == 0) return std::nullopt;
    return static_cast<double>(it->second.accepted) /
           static_cast<double>(it->second.proposed);
  }

  const std::map<std::string, Counts>& counts() const { return counts_; }

 private:
  std::map<std::string, Counts> counts_;
};

struct SweepContext {
  Rng& rng;
  int iteration = 0;
  bool adapting = false;  // true during burn-in
  AcceptanceTally& tally;
};

template <class State>
struct Chain {
  std::vector<State> draws;  // the last total - burn_in states
  int burn_in = 0;
  int total = 0;
  AcceptanceTally acceptance;  // post-burn-in tallies only
};

/// Applies `sweep(state, ctx)` n_iter times. `on_draw(state, iteration)` is
/// called for every retained draw. Set keep_draws to false to skip storing
/// the states themselves.
template <class State, class Sweep, class OnDraw>
Chain<State> run_chain(Sweep&& sweep, State init, int n_iter, int burn_in,
                       Rng& rng, OnDraw&& on_draw, bool keep_draws = true) {
  if (n_iter < 1 || burn_in < 0 || burn_in >= n_iter)
    throw Error(ErrorKind::config, "chain needs 0 <= burn_in < iterations");
  Chain<State> chain;
  chain.burn_in = burn_in;
  chain.total = n_iter;
  if (keep_draws) chain.draws.reserve(static_cast<std::size_t>(n_iter - burn_in));
  AcceptanceTally warmup;
  State state = std::move(init);
  for (int it = 0; it < n_iter; ++it) {
    const bool adapting = it < burn_in;
    SweepContext ctx{rng, it, adapting, adapting ? warmup : chain.acceptance};
    try {
      sweep(state, ctx);
    } catch (const Error& e) {
      throw Error(e.kind(),
                  "iteration " + std::to_string(it) + ": " + e.what());
    }
    if (!adapting) {
      on_draw(state, it);
      if (keep_draws) chain.draws.push_back(state);
    }
  }
  return chain;
}

template <class State, class Sweep>
Chain<State> run_chain(Sweep&& sweep, State init, int n_iter, int burn_in,
                       Rng& rng) {
  return run_chain(std::forward<Sweep>(sweep), std::move(init), n_iter,
                   burn_in, rng, [](const State&, int) {});
}

struct ParamSummary {
  std::string name;
  double mean = 0.0;
  double sd = 0.0;
  double hist_lo = 0.0;
  double hist_hi = 0.0;
  std::vector<double> histogram;
  std::optional<double> acceptance;
};

/// Summaries of named scalars, in the order `scalars()` reports them.
std::vector<ParamSummary> summarize_scalars(
    const std::vector<std::vector<std::pair<std::string, double>>>& rows,
    const AcceptanceTally& tally, int bins = 20);

/// State must provide scalars() -> vector<pair<string, double>>.
template <class State>
std::vector<ParamSummary> chain_summary(const Chain<State>& chain,
                                        int bins = 20) {
  if (chain.draws.empty())
    throw Error(ErrorKind::domain, "summary of an empty chain");
  std::vector<std::vector<std::pair<std::string, double>>> rows;
  rows.reserve(chain.draws.size());
  for (const auto& d : chain.draws) rows.push_back(d.scalars());
  return summarize_scalars(rows, chain.acceptance, bins);
}

}  // namespace switchvol
