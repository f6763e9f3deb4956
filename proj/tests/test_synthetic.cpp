#include <cmath>
#include <numbers>
#include <numeric>
#include <vector>

#include "doctest.h"
#include "switchvol/distributions.hpp"
#include "switchvol/error.hpp"
#include "switchvol/pipeline.hpp"
#include "switchvol/regime.hpp"
#include "switchvol/stats.hpp"
#include "switchvol/synthetic.hpp"

using namespace switchvol;

namespace {

JumpParams single_state(double sigma_sq, double theta) {
  JumpParams p;
  p.mu = {0.0};
  p.sigma1_sq = sigma_sq;
  p.theta = {theta};
  p.n_jumps = {0};
  p.b = 40.0;
  return p;
}

// SE of a sample variance from the fourth central moment estimate.
double variance_se(const std::vector<double>& xs) {
  const double m = mean(xs);
  double m2 = 0.0, m4 = 0.0;
  for (double x : xs) {
    const double d = (x - m) * (x - m);
    m2 += d;
    m4 += d * d;
  }
  m2 /= xs.size();
  m4 /= xs.size();
  return std::sqrt((m4 - m2 * m2) / xs.size());
}

}  // namespace

TEST_CASE("simulate_jump_model") {
  SUBCASE("zero rates give pure Gaussian switching") {
    Rng rng = make_rng(501);
    JumpParams p;
    p.mu = {0.0, 0.0};
    p.sigma1_sq = 1e-4;
    p.h_star = {4.0};
    p.theta = {0.0, 0.0};
    p.n_jumps = {0, 0};
    const auto d = simulate_jump_model(p, TransitionMatrix::sticky(2, 0.9), InitialDistribution::uniform(2), 2000, rng);
    CHECK(d.y.size() == 2000);
    CHECK(d.path.states.size() == 2000);
    for (int n : d.jumps) CHECK(n == 0);
  }
  SUBCASE("unit variance without jumps") {
    Rng rng = make_rng(502);
    const auto d = simulate_jump_model(single_state(1.0, 0.0), TransitionMatrix::uniform(1),
                                       InitialDistribution::uniform(1), 100000, rng);
    CHECK(std::abs(variance(d.y) - 1.0) < 3 * variance_se(d.y));
  }
  SUBCASE("Poisson jump variance") {
    Rng rng = make_rng(503);
    const double sigma_sq = 1e-4, theta = 2.0;
    const auto d = simulate_jump_model(single_state(sigma_sq, theta), TransitionMatrix::uniform(1),
                                       InitialDistribution::uniform(1), 100000, rng);
    // E[N(N+1)] = theta^2 + 2 theta for Poisson(theta).
    const double expected = sigma_sq + (theta * theta + 2 * theta) / 1600.0;
    CHECK(std::abs(variance(d.y) - expected) < 3 * variance_se(d.y));
  }
}

TEST_CASE("simulate_stable_model") {
  SUBCASE("alpha 2 is Gaussian with variance 2 gamma^2") {
    Rng rng = make_rng(504);
    StableModelParams p;
    p.mu = {0.0};
    p.gamma1_sq = 0.5;
    p.alpha = 2.0;
    const auto d = simulate_stable_model(p, TransitionMatrix::uniform(1), InitialDistribution::uniform(1), 100000, rng);
    CHECK(ks_one_sample(d.y, [](double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }).p_value > 0.01);
  }
  SUBCASE("one state reproduces the stable_sample stream") {
    StableModelParams p;
    p.mu = {0.01};
    p.gamma1_sq = 4e-4;
    p.alpha = 1.7;
    Rng a = make_rng(505), b = make_rng(505);
    const auto d = simulate_stable_model(p, TransitionMatrix::uniform(1), InitialDistribution::uniform(1), 500, a);
    for (double y : d.y) CHECK(y == stable_sample({1.7, 0.0, 0.02, 0.01}, b));
  }
  SUBCASE("per-state medians sit at mu") {
    Rng rng = make_rng(506);
    StableModelParams p;
    p.mu = {-0.01, 0.02};
    p.gamma1_sq = 1e-4;
    p.h_star = {9.0};
    p.alpha = 1.7;
    const auto d = simulate_stable_model(p, TransitionMatrix::sticky(2, 0.9), InitialDistribution::uniform(2), 100000, rng);
    for (int j = 0; j < 2; ++j) {
      std::vector<double> ys;
      for (std::size_t t = 0; t < d.y.size(); ++t)
        if (d.path.states[t] == j) ys.push_back(d.y[t]);
      const double gamma = std::sqrt(p.gamma_sq(j));
      const double f0 = std::tgamma(1.0 + 1.0 / 1.7) / (std::numbers::pi * gamma);
      CHECK(std::abs(quantile(ys, 0.5) - p.mu[static_cast<std::size_t>(j)]) <
            3.0 / (2.0 * f0 * std::sqrt(static_cast<double>(ys.size()))));
    }
  }
}

TEST_CASE("enumerate_path_posterior") {
  SUBCASE("single step is prior times emission") {
    EmissionTable e(1, 3);
    e(0, 0) = std::log(0.2);
    e(0, 1) = std::log(0.5);
    e(0, 2) = std::log(0.3);
    const InitialDistribution pi0{{0.5, 0.25, 0.25}};
    const auto post = enumerate_path_posterior(e, TransitionMatrix::uniform(3), pi0);
    const double z = 0.1 + 0.125 + 0.075;
    CHECK(post.marginals[0] == doctest::Approx(0.1 / z).epsilon(1e-14));
    CHECK(post.marginals[1] == doctest::Approx(0.125 / z).epsilon(1e-14));
    CHECK(post.marginals[2] == doctest::Approx(0.075 / z).epsilon(1e-14));
  }
  SUBCASE("uniform inputs give uniform paths") {
    EmissionTable e(4, 2);
    const auto post = enumerate_path_posterior(e, TransitionMatrix::uniform(2), InitialDistribution::uniform(2));
    for (double p : post.path_probs) CHECK(p == doctest::Approx(1.0 / 16).epsilon(1e-14));
  }
  SUBCASE("marginals equal filter plus smoothing") {
    Rng rng = make_rng(507);
    const int T = 6, M = 3;
    std::vector<double> flat;
    for (int i = 0; i < M; ++i) {
      const auto r = dirichlet_sample({{1.0, 1.0, 1.0}}, rng);
      flat.insert(flat.end(), r.begin(), r.end());
    }
    const TransitionMatrix P(M, flat);
    EmissionTable e(T, M);
    for (int t = 0; t < T; ++t) {
      const double y = standard_normal(rng);
      for (int j = 0; j < M; ++j) e(t, j) = normal_log_pdf(y, 0.3 * j, 0.4 + j);
    }
    const auto pi0 = InitialDistribution::uniform(M);
    const auto post = enumerate_path_posterior(e, P, pi0);
    const auto smooth = smoothed_marginals(hamilton_filter(e, P, pi0), P);
    for (std::size_t i = 0; i < smooth.size(); ++i) CHECK(std::abs(smooth[i] - post.marginals[i]) < 1e-10);
    for (int t = 0; t < T; ++t) {
      double s = 0.0;
      for (int j = 0; j < M; ++j) s += post.marginals[static_cast<std::size_t>(t * M + j)];
      CHECK(std::abs(s - 1.0) < 1e-12);
    }
    const auto states = post.decode(417);
    CHECK(post.encode(states) == 417);
  }
  SUBCASE("size guard") {
    EmissionTable e(9, 3);
    CHECK_THROWS_AS(enumerate_path_posterior(e, TransitionMatrix::uniform(3), InitialDistribution::uniform(3)), Error);
  }
}

TEST_CASE("grid_posterior") {
  SUBCASE("flat prior and Gaussian likelihood") {
    const Grid grid{-6.0, 8.0, 14000};
    const auto g = grid_posterior([](double) { return 0.0; },
                                  [](double x) { return -0.5 * (x - 1.0) * (x - 1.0) / 1.0; }, grid);
    CHECK(std::abs(g.mean() - 1.0) < g.step);
    double var = 0.0, total = 0.0;
    for (std::size_t i = 0; i < g.points.size(); ++i) {
      var += g.probs[i] * (g.points[i] - 1.0) * (g.points[i] - 1.0);
      total += g.probs[i];
    }
    CHECK(std::abs(var - 1.0) < g.step);
    CHECK(std::abs(total - 1.0) < 1e-12);
  }
  SUBCASE("conjugate Normal-Normal mean") {
    // 20 observations with mean 0.8 and variance 2, prior N(-1, 1 / 0.5).
    const double n = 20, ybar = 0.8, s2 = 2.0, k = 0.5, mu0 = -1.0;
    const double post_mean = (n * ybar + mu0 * k * s2) / (n + k * s2);
    const double post_sd = std::sqrt(s2 / (n + k * s2));
    const Grid grid{post_mean - 10 * post_sd, post_mean + 10 * post_sd, 20000};
    const auto g = grid_posterior([&](double m) { return -0.5 * k * (m - mu0) * (m - mu0); },
                                  [&](double m) { return -0.5 * n * (ybar - m) * (ybar - m) / s2; }, grid);
    CHECK(std::abs(g.mean() - post_mean) < g.step);
    CHECK(g.coarsen(20).size() == 20);
    CHECK_THROWS_AS(g.coarsen(7), Error);
  }
  SUBCASE("narrow grid is refused") {
    const Grid grid{-0.5, 0.5, 1000};
    CHECK_THROWS_AS(grid_posterior([](double) { return 0.0; }, [](double x) { return -0.5 * x * x; }, grid), Error);
  }
}

TEST_CASE("round trip recovers the variance ordering") {
  JumpParams truth;
  truth.mu = {0.0, 0.0};
  truth.sigma1_sq = 0.04;
  truth.h_star = {4.0};
  truth.theta = {0.1, 2.0};
  truth.n_jumps = {0, 0};
  int ordered = 0;
  for (int r = 0; r < 20; ++r) {
    const auto seed = 600 + static_cast<std::uint64_t>(r);
    Rng rng = make_rng(seed);
    const auto d =
        simulate_jump_model(truth, TransitionMatrix::sticky(2, 0.95), InitialDistribution::uniform(2), 500, rng);
    RunConfig cfg;
    cfg.resize_defaults(2);
    cfg.jump.u = {0.5, 4.0};
    cfg.sampler.iterations = 1000;
    cfg.sampler.burn_in = 300;
    cfg.sampler.seed = seed;
    const auto fit = fit_jump(cfg, ReturnSeries{synthetic_dates(d.y.size()), d.y, "simulated"});
    const auto& s2 = fit.estimate("sigma_sq");
    // The fitted high state must also be the one that carries the high-variance data.
    int agree = 0;
    const auto states = fit.argmax_states();
    for (std::size_t t = 0; t < states.size(); ++t) agree += states[t] == d.path.states[t];
    if (s2[0] < s2[1] && agree > static_cast<int>(states.size()) / 2) ++ordered;
  }
  CHECK(ordered >= 19);
}
