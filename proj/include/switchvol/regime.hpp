#pragma once

// Hidden-state machinery: forward filtering, backward path sampling and the
// transition-matrix posterior. States are 0-based here; exports add 1.

#include <functional>
#include <span>
#include <vector>

#include "switchvol/distributions.hpp"
#include "switchvol/random.hpp"

namespace switchvol {

/// Row-stochastic M x M matrix, entry (i, j) = P(S_t = j | S_{t-1} = i).
class TransitionMatrix {
 public:
  TransitionMatrix() = default;
  /// Validates non-negativity and that each row sums to 1 within 1e-12.
  TransitionMatrix(int m, std::vector<double> probs);

  static TransitionMatrix uniform(int m);
  /// Diagonal `stay`, the remainder spread evenly.
  static TransitionMatrix sticky(int m, double stay);

  int size() const { return m_; }
  double operator()(int i, int j) const { return p_[static_cast<std::size_t>(i * m_ + j)]; }
  std::span<const double> row(int i) const {
    return {p_.data() + static_cast<std::size_t>(i * m_), static_cast<std::size_t>(m_)};
  }
  const std::vector<double>& flat() const { return p_; }

 private:
  int m_ = 0;
  std::vector<double> p_;
};

/// Distribution of the first observed state S_1.
struct InitialDistribution {
  std::vector<double> pi0;

  static InitialDistribution uniform(int m);
  void validate(int m) const;
};

/// Log emission densities, entry (t, j) = log f(y_t | S_t = j).
struct EmissionTable {
  int T = 0;
  int M = 0;
  std::vector<double> log_density;

  EmissionTable() = default;
  EmissionTable(int t, int m) : T(t), M(m), log_density(static_cast<std::size_t>(t * m)) {}
  double& operator()(int t, int j) { return log_density[static_cast<std::size_t>(t * M + j)]; }
  double operator()(int t, int j) const { return log_density[static_cast<std::size_t>(t * M + j)]; }
};

struct FilteredProbs {
  int T = 0;
  int M = 0;
  std::vector<double> probs;  // row t = P(S_t | y_1..y_t)
  double loglik = 0.0;        // sum_t log f(y_t | y_1..y_{t-1})

  double operator()(int t, int j) const { return probs[static_cast<std::size_t>(t * M + j)]; }
  std::span<const double> row(int t) const {
    return {probs.data() + static_cast<std::size_t>(t * M), static_cast<std::size_t>(M)};
  }
};

struct StatePath {
  std::vector<int> states;
};

FilteredProbs hamilton_filter(const EmissionTable& emissions,
                              const TransitionMatrix& P,
                              const InitialDistribution& pi0);

FilteredProbs hamilton_filter(const std::function<double(int t, int j)>& emission_logpdf,
                              int T, const TransitionMatrix& P,
                              const InitialDistribution& pi0);

/// Backward draw of the whole path from its joint posterior.
StatePath sample_state_path(const FilteredProbs& filtered,
                            const TransitionMatrix& P, Rng& rng);

struct TransitionCounts {
  int M = 0;
  std::vector<long> n;  // (i, j) = number of t with S_{t-1} = i, S_t = j

  long operator()(int i, int j) const { return n[static_cast<std::size_t>(i * M + j)]; }
  long total() const;
};

TransitionCounts count_transitions(const StatePath& path, int M);

/// Row i is drawn from Dirichlet(prior_rows[i] + counts row i).
TransitionMatrix sample_transition_matrix(const TransitionCounts& counts,
                                          const std::vector<DirichletParams>& prior_rows,
                                          Rng& rng);

/// Index drawn with probability proportional to weights.
int sample_categorical(std::span<const double> weights, Rng& rng);

}  // namespace switchvol
