#include "switchvol/jump_model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <boost/math/special_functions/gamma.hpp>

#include "switchvol/error.hpp"
#include "switchvol/numeric.hpp"
#include "switchvol/stats.hpp"

namespace switchvol {

namespace {

[[noreturn]] void domain_error(const std::string& what) {
  throw Error(ErrorKind::domain, what);
}

std::string label(const char* name, int j) { return std::string(name) + "_" + std::to_string(j + 1); }

}  // namespace

double JumpParams::sigma_sq(int j) const {
  double v = sigma1_sq;
  for (int i = 0; i < j; ++i) v *= h_star[static_cast<std::size_t>(i)];
  return v;
}

std::vector<double> JumpParams::sigma_sq_all() const {
  std::vector<double> out(mu.size());
  for (int j = 0; j < states(); ++j) out[static_cast<std::size_t>(j)] = sigma_sq(j);
  return out;
}

void JumpParams::validate(const std::vector<double>* u) const {
  const auto M = mu.size();
  if (M < 1) domain_error("jump model: need at least one state");
  if (h_star.size() != M - 1 || theta.size() != M || n_jumps.size() != M)
    domain_error("jump model: parameter vectors disagree on the number of states");
  if (!(sigma1_sq > 0.0) || !std::isfinite(sigma1_sq))
    domain_error("jump model: sigma1_sq must be > 0");
  if (!(b > 0.0)) domain_error("jump model: b must be > 0");
  for (double h : h_star)
    if (!(h > 1.0) || !std::isfinite(h)) domain_error("jump model: every h* must exceed 1");
  for (int n : n_jumps)
    if (n < 0) domain_error("jump model: jump counts must be >= 0");
  for (std::size_t j = 0; j < M; ++j) {
    if (!(theta[j] > 0.0)) domain_error("jump model: theta must be > 0");
    if (j > 0 && theta[j] < theta[j - 1]) domain_error("jump model: theta must be non-decreasing");
    if (u) {
      const double lo = j == 0 ? 0.0 : (*u)[j - 1];
      if (!(theta[j] > lo && theta[j] <= (*u)[j]))
        domain_error("jump model: theta_" + std::to_string(j + 1) + " outside its interval");
    }
  }
}

std::vector<DirichletParams> default_dirichlet_rows(int M) {
  std::vector<DirichletParams> rows;
  for (int i = 0; i < M; ++i) {
    DirichletParams d{std::vector<double>(static_cast<std::size_t>(M), 1.0)};
    // 0-based i is in the upper half when state i+1 > M/2.
    if (2 * (i + 1) > M && M > 1) d.concentration[static_cast<std::size_t>(i)] = 8.0;
    rows.push_back(std::move(d));
  }
  return rows;
}

JumpPriors JumpPriors::defaults(int M) {
  if (M < 1) throw Error(ErrorKind::config, "number of states must be >= 1");
  JumpPriors p;
  p.u.resize(static_cast<std::size_t>(M));
  for (int j = 0; j < M; ++j) p.u[static_cast<std::size_t>(j)] = 0.5 * std::pow(2.0, j);
  p.dirichlet_rows = default_dirichlet_rows(M);
  return p;
}

void JumpPriors::validate(int M) const {
  if (!(k > 0.0)) throw Error(ErrorKind::config, "prior precision k must be > 0");
  sigma_prior.validate();
  frechet.validate();
  if (u.size() != static_cast<std::size_t>(M))
    throw Error(ErrorKind::config, "u must have one entry per state");
  for (std::size_t j = 0; j < u.size(); ++j) {
    if (!(u[j] > (j == 0 ? 0.0 : u[j - 1])))
      throw Error(ErrorKind::config, "u must be positive and strictly increasing");
  }
  if (dirichlet_rows.size() != static_cast<std::size_t>(M))
    throw Error(ErrorKind::config, "need one Dirichlet row per state");
  for (const auto& d : dirichlet_rows) {
    d.validate();
    if (d.concentration.size() != static_cast<std::size_t>(M))
      throw Error(ErrorKind::config, "Dirichlet rows must have length M");
  }
}

double jump_emission_logpdf(double y, int j, const JumpParams& p) {
  const auto sj = static_cast<std::size_t>(j);
  const double var = p.sigma_sq(j);
  if (p.n_jumps[sj] == 0) return normal_log_pdf(y, p.mu[sj], var);
  return jump_convolved_log_pdf(y, p.mu[sj], std::sqrt(var), p.n_jumps[sj], p.b);
}

double jump_state_loglik(std::span<const double> data_j, int j, const JumpParams& p) {
  double acc = 0.0;
  for (double y : data_j) acc += jump_emission_logpdf(y, j, p);
  return acc;
}

MhResult sample_mu_j(std::span<const double> data_j, int j, const JumpParams& p,
                     const JumpPriors& priors, double step, Rng& rng) {
  const auto sj = static_cast<std::size_t>(j);
  if (p.n_jumps[sj] == 0) {
    NormalNormalPosterior post;
    post.n = static_cast<int>(data_j.size());
    post.ybar = data_j.empty() ? 0.0 : mean(data_j);
    post.sigma_sq = p.sigma_sq(j);
    post.k = priors.k;
    return {normal_normal_update(post, rng), true, 0.0};
  }
  JumpParams trial = p;
  MhKernel kernel{
      [&](double m) {
        trial.mu[sj] = m;
        return normal_log_pdf(m, 0.0, 1.0 / priors.k) + jump_state_loglik(data_j, j, trial);
      },
      random_walk_proposal(), step};
  return mh_step(p.mu[sj], kernel, rng);
}

MhResult sample_sigma1_sq(std::span<const double> data_1, const JumpParams& p,
                          const JumpPriors& priors, double step, Rng& rng) {
  if (p.n_jumps[0] == 0) {
    double ss = 0.0;
    for (double y : data_1) ss += (y - p.mu[0]) * (y - p.mu[0]);
    return {inv_gamma_normal_update(ss, static_cast<int>(data_1.size()), priors.sigma_prior, rng),
            true, 0.0};
  }
  JumpParams trial = p;
  MhKernel kernel{
      [&](double s) {
        trial.sigma1_sq = s;
        return inv_gamma_log_pdf(s, priors.sigma_prior) + jump_state_loglik(data_1, 0, trial);
      },
      log_scale_proposal(0.0), step};
  return mh_step(p.sigma1_sq, kernel, rng);
}

MhResult sample_h_star_j(std::span<const double> data_j, int j, const JumpParams& p,
                         const JumpPriors& priors, double step, Rng& rng) {
  if (j < 1 || j >= p.states()) domain_error("h* update needs a state index in 2..M");
  const auto idx = static_cast<std::size_t>(j - 1);
  if (data_j.empty()) return {frechet_sample(priors.frechet, rng), true, 0.0};
  JumpParams trial = p;
  MhKernel kernel{
      [&](double h) {
        if (!(h > 1.0)) return kNegInf;
        trial.h_star[idx] = h;
        return frechet_log_pdf(h, priors.frechet) + jump_state_loglik(data_j, j, trial);
      },
      log_scale_proposal(1.0), step};
  return mh_step(p.h_star[idx], kernel, rng);
}

std::vector<double> n_jumps_conditional(std::span<const double> data_j, int j,
                                        const JumpParams& p) {
  const double theta = p.theta[static_cast<std::size_t>(j)];
  int n_max = 0;
  while (n_max < 10000 && boost::math::gamma_p(n_max + 1.0, theta) >= 1e-12) ++n_max;

  const auto count = static_cast<std::size_t>(n_max) + 1;
  std::vector<double> logw(count);
  for (std::size_t n = 0; n < count; ++n) logw[n] = poisson_log_pmf(static_cast<int>(n), theta);

  const double sigma = std::sqrt(p.sigma_sq(j));
  const double mu = p.mu[static_cast<std::size_t>(j)];
  std::vector<double> buf(count);
  for (double y : data_j) {
    jump_convolved_log_pdf_all(y, mu, sigma, p.b, buf);
    for (std::size_t n = 0; n < count; ++n) logw[n] += buf[n];
  }
  const double norm = log_sum_exp(logw);
  if (!std::isfinite(norm))
    throw Error(ErrorKind::numerical,
                "jump count conditional for state " + std::to_string(j + 1) + " is degenerate");
  for (double& w : logw) w = std::exp(w - norm);
  return logw;
}

int sample_n_jumps_j(std::span<const double> data_j, int j, const JumpParams& p,
                     Rng& rng) {
  const auto w = n_jumps_conditional(data_j, j, p);
  return sample_categorical(w, rng);
}

MhResult sample_theta_j(int j, const JumpParams& p, const JumpPriors& priors,
                        double step, Rng& rng) {
  const double lo = priors.theta_lower(j);
  const double hi = priors.theta_upper(j);
  const int n = p.n_jumps[static_cast<std::size_t>(j)];
  MhKernel kernel{
      [lo, hi, n](double th) {
        if (!(th > lo && th <= hi)) return kNegInf;
        return n * std::log(th) - th;
      },
      log_scale_proposal(0.0), step};
  return mh_step(p.theta[static_cast<std::size_t>(j)], kernel, rng);
}

std::vector<std::pair<std::string, double>> JumpState::scalars() const {
  std::vector<std::pair<std::string, double>> out;
  const int M = params.states();
  for (int j = 0; j < M; ++j) out.emplace_back(label("mu", j), params.mu[static_cast<std::size_t>(j)]);
  for (int j = 0; j < M; ++j) out.emplace_back(label("sigma_sq", j), params.sigma_sq(j));
  out.emplace_back("sigma1_sq", params.sigma1_sq);
  for (int j = 1; j < M; ++j)
    out.emplace_back(label("h_star", j), params.h_star[static_cast<std::size_t>(j - 1)]);
  for (int j = 0; j < M; ++j) out.emplace_back(label("theta", j), params.theta[static_cast<std::size_t>(j)]);
  for (int j = 0; j < M; ++j)
    out.emplace_back(label("n_jumps", j), params.n_jumps[static_cast<std::size_t>(j)]);
  for (int i = 0; i < M; ++i)
    for (int j = 0; j < M; ++j)
      out.emplace_back("P_" + std::to_string(i + 1) + std::to_string(j + 1), P(i, j));
  out.emplace_back("loglik", loglik);
  return out;
}

std::vector<std::vector<double>> split_by_state(std::span<const double> y,
                                                const StatePath& path, int M) {
  std::vector<std::vector<double>> out(static_cast<std::size_t>(M));
  for (std::size_t t = 0; t < y.size(); ++t)
    out[static_cast<std::size_t>(path.states[t])].push_back(y[t]);
  return out;
}

JumpSampler::JumpSampler(std::vector<double> y, JumpPriors priors, InitialDistribution pi0)
    : y_(std::move(y)), priors_(std::move(priors)), pi0_(std::move(pi0)) {
  const int M = static_cast<int>(priors_.u.size());
  priors_.validate(M);
  pi0_.validate(M);
  if (y_.empty()) throw Error(ErrorKind::config, "jump model: no observations");
  mu_step_.assign(static_cast<std::size_t>(M), AdaptiveScale(0.01));
  h_step_.assign(static_cast<std::size_t>(M), AdaptiveScale(0.3));
  theta_step_.assign(static_cast<std::size_t>(M), AdaptiveScale(0.3));
}

void JumpSampler::sweep(JumpState& s, SweepContext& ctx) {
  JumpParams& p = s.params;
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
    for (int t = 0; t < T; ++t)
      for (int j = 0; j < M; ++j) em(t, j) = jump_emission_logpdf(y_[static_cast<std::size_t>(t)], j, p);
    filtered_ = hamilton_filter(em, s.P, pi0_);
    s.loglik = filtered_.loglik;
    s.path = sample_state_path(filtered_, s.P, ctx.rng);
  });
  stage("transition matrix", [&] {
    s.P = sample_transition_matrix(count_transitions(s.path, M), priors_.dirichlet_rows, ctx.rng);
  });

  const auto by_state = split_by_state(y_, s.path, M);
  auto data = [&](int j) { return std::span<const double>(by_state[static_cast<std::size_t>(j)]); };

  if (!priors_.fix_mean_zero) {
    stage("mu", [&] {
      for (int j = 0; j < M; ++j) {
        auto& scale = mu_step_[static_cast<std::size_t>(j)];
        const bool mh = p.n_jumps[static_cast<std::size_t>(j)] > 0;
        const auto r = sample_mu_j(data(j), j, p, priors_, scale.value(), ctx.rng);
        p.mu[static_cast<std::size_t>(j)] = r.value;
        if (mh) tune(scale, label("mu", j), r.accepted);
      }
    });
  }
  stage("sigma1_sq", [&] {
    const bool mh = p.n_jumps[0] > 0;
    const auto r = sample_sigma1_sq(data(0), p, priors_, sigma_step_.value(), ctx.rng);
    p.sigma1_sq = r.value;
    if (mh) tune(sigma_step_, "sigma1_sq", r.accepted);
  });
  stage("h_star", [&] {
    for (int j = 1; j < M; ++j) {
      auto& scale = h_step_[static_cast<std::size_t>(j)];
      const bool mh = !data(j).empty();
      const auto r = sample_h_star_j(data(j), j, p, priors_, scale.value(), ctx.rng);
      p.h_star[static_cast<std::size_t>(j - 1)] = r.value;
      if (mh) tune(scale, label("h_star", j), r.accepted);
    }
  });
  stage("n_jumps", [&] {
    for (int j = 0; j < M; ++j)
      p.n_jumps[static_cast<std::size_t>(j)] = sample_n_jumps_j(data(j), j, p, ctx.rng);
  });
  stage("theta", [&] {
    for (int j = 0; j < M; ++j) {
      auto& scale = theta_step_[static_cast<std::size_t>(j)];
      const auto r = sample_theta_j(j, p, priors_, scale.value(), ctx.rng);
      p.theta[static_cast<std::size_t>(j)] = r.value;
      tune(scale, label("theta", j), r.accepted);
    }
  });
}

}  // namespace switchvol
