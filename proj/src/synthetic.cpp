#include "switchvol/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "switchvol/error.hpp"
#include "switchvol/numeric.hpp"

namespace switchvol {

namespace {

std::vector<int> simulate_path(const TransitionMatrix& P, const InitialDistribution& pi0,
                               int T, Rng& rng) {
  const int M = P.size();
  pi0.validate(M);
  if (T < 1) throw Error(ErrorKind::domain, "simulation needs T >= 1");
  std::vector<int> s(static_cast<std::size_t>(T), 0);
  if (M == 1) return s;
  s[0] = sample_categorical(pi0.pi0, rng);
  for (std::size_t t = 1; t < s.size(); ++t) s[t] = sample_categorical(P.row(s[t - 1]), rng);
  return s;
}

}  // namespace

SyntheticJumpData simulate_jump_model(const JumpParams& params, const TransitionMatrix& P,
                                      const InitialDistribution& pi0, int T, Rng& rng) {
  if (P.size() != params.states())
    throw Error(ErrorKind::domain, "simulation: P size differs from the state count");
  for (int n : params.n_jumps)
    if (n < 0) throw Error(ErrorKind::domain, "simulation: negative jump count");
  SyntheticJumpData d;
  d.params = params;
  d.path.states = simulate_path(P, pi0, T, rng);
  d.y.resize(static_cast<std::size_t>(T));
  d.jumps.resize(static_cast<std::size_t>(T));
  const auto var = params.sigma_sq_all();
  for (std::size_t t = 0; t < d.y.size(); ++t) {
    const auto j = static_cast<std::size_t>(d.path.states[t]);
    double y = params.mu[j] + std::sqrt(var[j]) * standard_normal(rng);
    const int n = poisson_draw(params.theta[j], rng);
    if (n > 0) y += sym_gamma_sample({n, params.b}, rng);
    d.y[t] = y;
    d.jumps[t] = n;
  }
  return d;
}

SyntheticStableData simulate_stable_model(const StableModelParams& params,
                                          const TransitionMatrix& P,
                                          const InitialDistribution& pi0, int T, Rng& rng) {
  if (P.size() != params.states())
    throw Error(ErrorKind::domain, "simulation: P size differs from the state count");
  SyntheticStableData d;
  d.params = params;
  d.path.states = simulate_path(P, pi0, T, rng);
  d.y.resize(static_cast<std::size_t>(T));
  const auto g = params.gamma_sq_all();
  for (std::size_t t = 0; t < d.y.size(); ++t) {
    const auto j = static_cast<std::size_t>(d.path.states[t]);
    d.y[t] = stable_sample({params.alpha, 0.0, std::sqrt(g[j]), params.mu[j]}, rng);
  }
  return d;
}

std::vector<int> PathPosterior::decode(std::size_t index) const {
  std::vector<int> s(static_cast<std::size_t>(T));
  for (int t = T - 1; t >= 0; --t) {
    s[static_cast<std::size_t>(t)] = static_cast<int>(index % static_cast<std::size_t>(M));
    index /= static_cast<std::size_t>(M);
  }
  return s;
}

std::size_t PathPosterior::encode(const std::vector<int>& states) const {
  std::size_t index = 0;
  for (int s : states) index = index * static_cast<std::size_t>(M) + static_cast<std::size_t>(s);
  return index;
}

namespace {

std::size_t path_count(int M, int T) {
  double total = std::pow(static_cast<double>(M), T);
  if (total > 1e4)
    throw Error(ErrorKind::domain,
                "enumeration refused: " + std::to_string(M) + "^" + std::to_string(T) +
                    " paths exceeds 10^4");
  return static_cast<std::size_t>(std::llround(total));
}

// Log joint of every path of length t_len, index order as in PathPosterior.
std::vector<double> path_log_joint(const EmissionTable& em, const TransitionMatrix& P,
                                   const InitialDistribution& pi0, int t_len) {
  const int M = P.size();
  const std::size_t count = path_count(M, t_len);
  std::vector<double> out(count);
  std::vector<int> s(static_cast<std::size_t>(t_len));
  for (std::size_t idx = 0; idx < count; ++idx) {
    std::size_t r = idx;
    for (int t = t_len - 1; t >= 0; --t) {
      s[static_cast<std::size_t>(t)] = static_cast<int>(r % static_cast<std::size_t>(M));
      r /= static_cast<std::size_t>(M);
    }
    double lp = std::log(pi0.pi0[static_cast<std::size_t>(s[0])]) + em(0, s[0]);
    for (int t = 1; t < t_len; ++t) {
      lp += std::log(P(s[static_cast<std::size_t>(t - 1)], s[static_cast<std::size_t>(t)])) +
            em(t, s[static_cast<std::size_t>(t)]);
    }
    out[idx] = lp;
  }
  return out;
}

}  // namespace

PathPosterior enumerate_path_posterior(const EmissionTable& emissions,
                                       const TransitionMatrix& P,
                                       const InitialDistribution& pi0) {
  const int M = P.size();
  const int T = emissions.T;
  if (emissions.M != M) throw Error(ErrorKind::domain, "enumeration: emission width differs");
  pi0.validate(M);
  PathPosterior out;
  out.T = T;
  out.M = M;
  auto lj = path_log_joint(emissions, P, pi0, T);
  const double norm = log_sum_exp(lj);
  if (!std::isfinite(norm)) throw Error(ErrorKind::numerical, "enumeration: zero total mass");
  out.loglik = norm;
  out.path_probs.resize(lj.size());
  out.marginals.assign(static_cast<std::size_t>(T * M), 0.0);
  for (std::size_t idx = 0; idx < lj.size(); ++idx) {
    const double p = std::exp(lj[idx] - norm);
    out.path_probs[idx] = p;
    const auto s = out.decode(idx);
    for (int t = 0; t < T; ++t)
      out.marginals[static_cast<std::size_t>(t * M + s[static_cast<std::size_t>(t)])] += p;
  }
  return out;
}

FilteredProbs enumerate_filtered(const EmissionTable& emissions, const TransitionMatrix& P,
                                 const InitialDistribution& pi0) {
  const int M = P.size();
  const int T = emissions.T;
  path_count(M, T);
  FilteredProbs out;
  out.T = T;
  out.M = M;
  out.probs.assign(static_cast<std::size_t>(T * M), 0.0);
  for (int len = 1; len <= T; ++len) {
    const auto lj = path_log_joint(emissions, P, pi0, len);
    const double norm = log_sum_exp(lj);
    for (std::size_t idx = 0; idx < lj.size(); ++idx) {
      const int last = static_cast<int>(idx % static_cast<std::size_t>(M));
      out.probs[static_cast<std::size_t>((len - 1) * M + last)] += std::exp(lj[idx] - norm);
    }
    if (len == T) out.loglik = norm;
  }
  return out;
}

std::vector<double> smoothed_marginals(const FilteredProbs& f, const TransitionMatrix& P) {
  const int T = f.T;
  const int M = f.M;
  std::vector<double> sm(f.probs);
  for (int t = T - 2; t >= 0; --t) {
    for (int i = 0; i < M; ++i) {
      double acc = 0.0;
      for (int j = 0; j < M; ++j) {
        double pred = 0.0;
        for (int k = 0; k < M; ++k) pred += f(t, k) * P(k, j);
        if (pred > 0.0) acc += P(i, j) * sm[static_cast<std::size_t>((t + 1) * M + j)] / pred;
      }
      sm[static_cast<std::size_t>(t * M + i)] = f(t, i) * acc;
    }
  }
  return sm;
}

double GridPosterior::mean() const {
  double m = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) m += points[i] * probs[i];
  return m;
}

std::vector<double> GridPosterior::coarsen(int bins) const {
  const auto n = probs.size();
  if (bins < 1 || n % static_cast<std::size_t>(bins) != 0)
    throw Error(ErrorKind::domain, "grid cells must divide evenly into bins");
  const std::size_t per = n / static_cast<std::size_t>(bins);
  std::vector<double> out(static_cast<std::size_t>(bins), 0.0);
  for (std::size_t i = 0; i < n; ++i) out[i / per] += probs[i];
  return out;
}

GridPosterior grid_posterior(const std::function<double(double)>& log_prior,
                             const std::function<double(double)>& log_lik, const Grid& grid) {
  if (!(grid.hi > grid.lo) || grid.cells < 2)
    throw Error(ErrorKind::domain, "grid: need hi > lo and at least two cells");
  GridPosterior g;
  g.step = (grid.hi - grid.lo) / grid.cells;
  auto log_post = [&](double x) {
    const double lp = log_prior(x);
    if (!std::isfinite(lp)) return kNegInf;
    const double v = lp + log_lik(x);
    return std::isnan(v) ? kNegInf : v;
  };
  std::vector<double> lp(static_cast<std::size_t>(grid.cells));
  g.points.resize(lp.size());
  for (int i = 0; i < grid.cells; ++i) {
    const double x = grid.lo + (i + 0.5) * g.step;
    g.points[static_cast<std::size_t>(i)] = x;
    lp[static_cast<std::size_t>(i)] = log_post(x);
  }
  const double norm = log_sum_exp(lp);
  if (!std::isfinite(norm)) throw Error(ErrorKind::numerical, "grid: posterior has no mass on the grid");
  g.probs.resize(lp.size());
  for (std::size_t i = 0; i < lp.size(); ++i) g.probs[i] = std::exp(lp[i] - norm);

  // Tail comparison: mass on a band of the same resolution beyond each edge.
  const int band = std::max(grid.cells / 10, 1);
  std::vector<double> outside;
  for (int i = 1; i <= band; ++i) {
    outside.push_back(log_post(grid.lo - (i - 0.5) * g.step));
    outside.push_back(log_post(grid.hi + (i - 0.5) * g.step));
  }
  const double out_mass = std::exp(log_sum_exp(outside) - norm);
  if (out_mass > 1e-8)
    throw Error(ErrorKind::domain,
                "grid misses posterior mass (" + std::to_string(out_mass) + " beyond the edges); widen the grid");
  return g;
}

}  // namespace switchvol
