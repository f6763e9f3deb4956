#include "switchvol/stable_model.hpp"

#include <cmath>
#include <string>

#include "switchvol/error.hpp"
#include "switchvol/jump_model.hpp"
#include "switchvol/numeric.hpp"

namespace switchvol {

namespace {

[[noreturn]] void domain_error(const std::string& what) {
  throw Error(ErrorKind::domain, what);
}

std::string label(const char* name, int j) { return std::string(name) + "_" + std::to_string(j + 1); }

}  // namespace

double StableModelParams::gamma_sq(int j) const {
  double v = gamma1_sq;
  for (int i = 0; i < j; ++i) v *= h_star[static_cast<std::size_t>(i)];
  return v;
}

std::vector<double> StableModelParams::gamma_sq_all() const {
  std::vector<double> out(mu.size());
  for (int j = 0; j < states(); ++j) out[static_cast<std::size_t>(j)] = gamma_sq(j);
  return out;
}

void StableModelParams::validate(double lambda_floor) const {
  if (mu.empty()) domain_error("stable model: need at least one state");
  if (h_star.size() != mu.size() - 1)
    domain_error("stable model: need M - 1 h* values");
  if (!(gamma1_sq > 0.0) || !std::isfinite(gamma1_sq))
    domain_error("stable model: gamma1_sq must be > 0");
  for (double h : h_star)
    if (!(h > 1.0) || !std::isfinite(h)) domain_error("stable model: every h* must exceed 1");
  if (!(lambda > 0.0) || lambda < lambda_floor || !std::isfinite(lambda))
    domain_error("stable model: lambda below its floor");
  if (!(alpha > 1.0 && alpha < 2.0)) domain_error("stable model: alpha must lie in (1, 2)");
}

StablePriors StablePriors::defaults(int M) {
  if (M < 1) throw Error(ErrorKind::config, "number of states must be >= 1");
  StablePriors p;
  p.dirichlet_rows = default_dirichlet_rows(M);
  return p;
}

void StablePriors::validate(int M) const {
  if (!(k > 0.0)) throw Error(ErrorKind::config, "prior precision k must be > 0");
  scale_prior.validate();
  frechet.validate();
  if (!(lambda_floor > 0.0)) throw Error(ErrorKind::config, "lambda_floor must be > 0");
  if (dirichlet_rows.size() != static_cast<std::size_t>(M))
    throw Error(ErrorKind::config, "need one Dirichlet row per state");
  for (const auto& d : dirichlet_rows) {
    d.validate();
    if (d.concentration.size() != static_cast<std::size_t>(M))
      throw Error(ErrorKind::config, "Dirichlet rows must have length M");
  }
}

double stable_conditional_loglik(std::span<const double> y, const StatePath& path,
                                 const StableModelParams& p) {
  if (path.states.size() != y.size())
    throw Error(ErrorKind::domain, "state path and data differ in length");
  const auto g = p.gamma_sq_all();
  double acc = 0.0;
  for (std::size_t t = 0; t < y.size(); ++t) {
    const auto j = static_cast<std::size_t>(path.states[t]);
    acc += normal_log_pdf(y[t], p.mu[j], p.lambda * g[j]);
  }
  return acc;
}

MhResult sample_lambda(std::span<const double> y, const StatePath& path,
                       const StableModelParams& p, const StablePriors& priors,
                       double step, Rng& rng) {
  if (path.states.size() != y.size())
    throw Error(ErrorKind::domain, "state path and data differ in length");
  // As a function of lambda the likelihood is lambda^{-n/2} e^{-Q / (2 lambda)}.
  const auto g = p.gamma_sq_all();
  double q = 0.0;
  for (std::size_t t = 0; t < y.size(); ++t) {
    const auto j = static_cast<std::size_t>(path.states[t]);
    q += (y[t] - p.mu[j]) * (y[t] - p.mu[j]) / g[j];
  }
  const double half_n = 0.5 * static_cast<double>(y.size());
  const double floor = priors.lambda_floor;
  const double alpha = p.alpha;
  MhKernel kernel{
      [=](double lam) {
        if (!(lam >= floor)) return kNegInf;
        const double prior = positive_stable_log_pdf(lam, alpha);
        if (std::isnan(prior))
          throw Error(ErrorKind::numerical, "lambda prior density is not a number");
        return prior - half_n * std::log(lam) - 0.5 * q / lam;
      },
      log_scale_proposal(0.0), step};
  return mh_step(p.lambda, kernel, rng);
}

double sample_gamma1_sq(std::span<const double> data_1, const StableModelParams& p,
                        const StablePriors& priors, Rng& rng) {
  double ss = 0.0;
  for (double y : data_1) ss += (y - p.mu[0]) * (y - p.mu[0]);
  return inv_gamma_normal_update(ss / p.lambda, static_cast<int>(data_1.size()),
                                 priors.scale_prior, rng);
}

double sample_stable_mu_j(std::span<const double> data_j, int j,
                          const StableModelParams& p, const StablePriors& priors,
                          Rng& rng) {
  NormalNormalPosterior post;
  post.n = static_cast<int>(data_j.size());
  double acc = 0.0;
  for (double y : data_j) acc += y;
  post.ybar = data_j.empty() ? 0.0 : acc / static_cast<double>(data_j.size());
  post.sigma_sq = p.lambda * p.gamma_sq(j);
  post.k = priors.k;
  return normal_normal_update(post, rng);
}

MhResult sample_stable_h_star_j(std::span<const double> data_j, int j,
                                const StableModelParams& p, const StablePriors& priors,
                                double step, Rng& rng) {
  if (j < 1 || j >= p.states()) domain_error("h* update needs a state index in 2..M");
  const auto idx = static_cast<std::size_t>(j - 1);
  if (data_j.empty()) return {frechet_sample(priors.frechet, rng), true, 0.0};
  // Residuals scaled by the variance of the state below, as N(0, h*).
  const double below = p.lambda * p.gamma_sq(j - 1);
  const double mu = p.mu[static_cast<std::size_t>(j)];
  double ss = 0.0;
  for (double y : data_j) ss += (y - mu) * (y - mu) / below;
  const double half_n = 0.5 * static_cast<double>(data_j.size());
  MhKernel kernel{
      [&](double h) {
        if (!(h > 1.0)) return kNegInf;
        return frechet_log_pdf(h, priors.frechet) - half_n * std::log(h) - 0.5 * ss / h;
      },
      log_scale_proposal(1.0), step};
  return mh_step(p.h_star[idx], kernel, rng);
}

std::vector<std::pair<std::string, double>> StableState::scalars() const {
  std::vector<std::pair<std::string, double>> out;
  const int M = params.states();
  for (int j = 0; j < M; ++j) out.emplace_back(label("mu", j), params.mu[static_cast<std::size_t>(j)]);
  for (int j = 0; j < M; ++j) out.emplace_back(label("gamma_sq", j), params.gamma_sq(j));
  out.emplace_back("gamma1_sq", params.gamma1_sq);
  for (int j = 1; j < M; ++j)
    out.emplace_back(label("h_star", j), params.h_star[static_cast<std::size_t>(j - 1)]);
  out.emplace_back("lambda", params.lambda);
  for (int j = 0; j < M; ++j)
    out.emplace_back(label("scale_sq", j), params.lambda * params.gamma_sq(j));
  for (int i = 0; i < M; ++i)
    for (int j = 0; j < M; ++j)
      out.emplace_back("P_" + std::to_string(i + 1) + std::to_string(j + 1), P(i, j));
  out.emplace_back("loglik", loglik);
  return out;
}

StableSampler::StableSampler(std::vector<double> y, StablePriors priors, InitialDistribution pi0)
    : y_(std::move(y)), priors_(std::move(priors)), pi0_(std::move(pi0)) {
  const int M = static_cast<int>(priors_.dirichlet_rows.size());
  priors_.validate(M);
  pi0_.validate(M);
  if (y_.empty()) throw Error(ErrorKind::config, "stable model: no observations");
  h_step_.assign(static_cast<std::size_t>(M), AdaptiveScale(0.3));
}

void StableSampler::sweep(StableState& s, SweepContext& ctx) {
  StableModelParams& p = s.params;
  const int M = p.states();
  const int T = static_cast<int>(y_.size());
  auto stage = [](const char* name, auto&& fn) {
    try {
      fn();
    } catch (const Error& e) {
      throw Error(e.kind(), std::string(name) + ": " + e.what());
    }
  };
  auto tune = [&](AdaptiveScale& a, const std::string& name, bool accepted) {
    ctx.tally.record(name, accepted);
    if (ctx.adapting) a.update(accepted);
  };

  stage("state path", [&] {
    EmissionTable em(T, M);
    const auto g = p.gamma_sq_all();
    for (int t = 0; t < T; ++t)
      for (int j = 0; j < M; ++j)
        em(t, j) = normal_log_pdf(y_[static_cast<std::size_t>(t)], p.mu[static_cast<std::size_t>(j)],
                                  p.lambda * g[static_cast<std::size_t>(j)]);
    filtered_ = hamilton_filter(em, s.P, pi0_);
    s.loglik = filtered_.loglik;
    s.path = sample_state_path(filtered_, s.P, ctx.rng);
  });
  stage("transition matrix", [&] {
    s.P = sample_transition_matrix(count_transitions(s.path, M), priors_.dirichlet_rows, ctx.rng);
  });
  stage("lambda", [&] {
    const auto r = sample_lambda(y_, s.path, p, priors_, lambda_step_.value(), ctx.rng);
    p.lambda = r.value;
    tune(lambda_step_, "lambda", r.accepted);
  });

  const auto by_state = split_by_state(y_, s.path, M);
  auto data = [&](int j) { return std::span<const double>(by_state[static_cast<std::size_t>(j)]); };

  stage("gamma1_sq", [&] { p.gamma1_sq = sample_gamma1_sq(data(0), p, priors_, ctx.rng); });
  stage("h_star", [&] {
    for (int j = 1; j < M; ++j) {
      auto& scale = h_step_[static_cast<std::size_t>(j)];
      const bool mh = !data(j).empty();
      const auto r = sample_stable_h_star_j(data(j), j, p, priors_, scale.value(), ctx.rng);
      p.h_star[static_cast<std::size_t>(j - 1)] = r.value;
      if (mh) tune(scale, label("h_star", j), r.accepted);
    }
  });
  if (!priors_.fix_mean_zero) {
    stage("mu", [&] {
      for (int j = 0; j < M; ++j)
        p.mu[static_cast<std::size_t>(j)] = sample_stable_mu_j(data(j), j, p, priors_, ctx.rng);
    });
  }
}

}  // namespace switchvol
