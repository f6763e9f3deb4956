#include "switchvol/regime.hpp"

#include <cmath>
#include <string>

#include "switchvol/error.hpp"
#include "switchvol/numeric.hpp"

namespace switchvol {

TransitionMatrix::TransitionMatrix(int m, std::vector<double> probs)
    : m_(m), p_(std::move(probs)) {
  if (m < 1) throw Error(ErrorKind::domain, "transition matrix: M must be >= 1");
  if (p_.size() != static_cast<std::size_t>(m * m))
    throw Error(ErrorKind::domain, "transition matrix: expected M*M entries");
  for (int i = 0; i < m; ++i) {
    double sum = 0.0;
    for (int j = 0; j < m; ++j) {
      const double v = (*this)(i, j);
      if (!(v >= 0.0) || !std::isfinite(v))
        throw Error(ErrorKind::domain, "transition matrix: negative or non-finite entry");
      sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-12)
      throw Error(ErrorKind::domain,
                  "transition matrix: row " + std::to_string(i + 1) + " sums to " +
                      std::to_string(sum));
  }
}

TransitionMatrix TransitionMatrix::uniform(int m) {
  return TransitionMatrix(m, std::vector<double>(static_cast<std::size_t>(m * m), 1.0 / m));
}

TransitionMatrix TransitionMatrix::sticky(int m, double stay) {
  if (m == 1) return uniform(1);
  std::vector<double> p(static_cast<std::size_t>(m * m), (1.0 - stay) / (m - 1));
  for (int i = 0; i < m; ++i) p[static_cast<std::size_t>(i * m + i)] = stay;
  for (int i = 0; i < m; ++i) {
    double s = 0.0;
    for (int j = 0; j < m; ++j) s += p[static_cast<std::size_t>(i * m + j)];
    for (int j = 0; j < m; ++j) p[static_cast<std::size_t>(i * m + j)] /= s;
  }
  return TransitionMatrix(m, std::move(p));
}

InitialDistribution InitialDistribution::uniform(int m) {
  return {std::vector<double>(static_cast<std::size_t>(m), 1.0 / m)};
}

void InitialDistribution::validate(int m) const {
  if (pi0.size() != static_cast<std::size_t>(m))
    throw Error(ErrorKind::domain, "initial distribution: length differs from M");
  double sum = 0.0;
  for (double v : pi0) {
    if (!(v >= 0.0)) throw Error(ErrorKind::domain, "initial distribution: negative entry");
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-10)
    throw Error(ErrorKind::domain, "initial distribution: does not sum to 1");
}

FilteredProbs hamilton_filter(const EmissionTable& emissions,
                              const TransitionMatrix& P,
                              const InitialDistribution& pi0) {
  const int T = emissions.T;
  const int M = emissions.M;
  if (T < 1) throw Error(ErrorKind::domain, "filter: need at least one observation");
  if (P.size() != M) throw Error(ErrorKind::domain, "filter: P size differs from M");
  pi0.validate(M);

  FilteredProbs out;
  out.T = T;
  out.M = M;
  out.probs.resize(static_cast<std::size_t>(T * M));

  std::vector<double> predicted = pi0.pi0;
  std::vector<double> joint(static_cast<std::size_t>(M));
  for (int t = 0; t < T; ++t) {
    for (int j = 0; j < M; ++j) {
      const double pj = predicted[static_cast<std::size_t>(j)];
      joint[static_cast<std::size_t>(j)] = pj > 0.0 ? std::log(pj) + emissions(t, j) : kNegInf;
    }
    const double norm = log_sum_exp(joint);
    if (!std::isfinite(norm))
      throw Error(ErrorKind::numerical,
                  "filter degenerate at observation t=" + std::to_string(t + 1) +
                      ": every state has zero likelihood");
    out.loglik += norm;
    double* row = out.probs.data() + static_cast<std::size_t>(t * M);
    for (int j = 0; j < M; ++j) row[j] = std::exp(joint[static_cast<std::size_t>(j)] - norm);

    for (int j = 0; j < M; ++j) {
      double acc = 0.0;
      for (int i = 0; i < M; ++i) acc += row[i] * P(i, j);
      predicted[static_cast<std::size_t>(j)] = acc;
    }
  }
  return out;
}

FilteredProbs hamilton_filter(const std::function<double(int t, int j)>& emission_logpdf,
                              int T, const TransitionMatrix& P,
                              const InitialDistribution& pi0) {
  EmissionTable table(T, P.size());
  for (int t = 0; t < T; ++t)
    for (int j = 0; j < P.size(); ++j) table(t, j) = emission_logpdf(t, j);
  return hamilton_filter(table, P, pi0);
}

int sample_categorical(std::span<const double> weights, Rng& rng) {
  double total = 0.0;
  for (double w : weights) total += w;
  if (!(total > 0.0) || !std::isfinite(total))
    throw Error(ErrorKind::numerical, "categorical draw with zero total weight");
  const double u = uniform_open(rng) * total;
  double acc = 0.0;
  int last = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] <= 0.0) continue;
    acc += weights[i];
    last = static_cast<int>(i);
    if (u < acc) return last;
  }
  return last;
}

StatePath sample_state_path(const FilteredProbs& filtered,
                            const TransitionMatrix& P, Rng& rng) {
  const int T = filtered.T;
  const int M = filtered.M;
  StatePath path;
  path.states.resize(static_cast<std::size_t>(T));
  path.states[static_cast<std::size_t>(T - 1)] = sample_categorical(filtered.row(T - 1), rng);
  std::vector<double> w(static_cast<std::size_t>(M));
  for (int t = T - 2; t >= 0; --t) {
    const int next = path.states[static_cast<std::size_t>(t + 1)];
    double total = 0.0;
    for (int i = 0; i < M; ++i) {
      w[static_cast<std::size_t>(i)] = P(i, next) * filtered(t, i);
      total += w[static_cast<std::size_t>(i)];
    }
    if (!(total > 0.0))
      throw Error(ErrorKind::numerical,
                  "backward sampling degenerate at t=" + std::to_string(t + 1));
    path.states[static_cast<std::size_t>(t)] = sample_categorical(w, rng);
  }
  return path;
}

long TransitionCounts::total() const {
  long s = 0;
  for (long v : n) s += v;
  return s;
}

TransitionCounts count_transitions(const StatePath& path, int M) {
  TransitionCounts c;
  c.M = M;
  c.n.assign(static_cast<std::size_t>(M * M), 0);
  for (std::size_t t = 1; t < path.states.size(); ++t) {
    const int i = path.states[t - 1];
    const int j = path.states[t];
    if (i < 0 || i >= M || j < 0 || j >= M)
      throw Error(ErrorKind::domain, "state path entry out of range");
    ++c.n[static_cast<std::size_t>(i * M + j)];
  }
  return c;
}

TransitionMatrix sample_transition_matrix(const TransitionCounts& counts,
                                          const std::vector<DirichletParams>& prior_rows,
                                          Rng& rng) {
  const int M = counts.M;
  if (prior_rows.size() != static_cast<std::size_t>(M))
    throw Error(ErrorKind::domain, "transition prior: need one Dirichlet row per state");
  std::vector<double> p(static_cast<std::size_t>(M * M));
  for (int i = 0; i < M; ++i) {
    const auto& prior = prior_rows[static_cast<std::size_t>(i)];
    if (prior.concentration.size() != static_cast<std::size_t>(M))
      throw Error(ErrorKind::domain, "transition prior: row length differs from M");
    DirichletParams post{prior.concentration};
    for (int j = 0; j < M; ++j)
      post.concentration[static_cast<std::size_t>(j)] += static_cast<double>(counts(i, j));
    const auto row = dirichlet_sample(post, rng);
    // Renormalize in long double so the row sum is 1 to the last bit or two.
    long double s = 0.0L;
    for (double v : row) s += v;
    for (int j = 0; j < M; ++j)
      p[static_cast<std::size_t>(i * M + j)] = static_cast<double>(row[static_cast<std::size_t>(j)] / s);
  }
  return TransitionMatrix(M, std::move(p));
}

}  // namespace switchvol
