#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <numbers>
#include <numeric>
#include <vector>

#include "doctest.h"
#include "switchvol/distributions.hpp"
#include "switchvol/error.hpp"
#include "switchvol/stable_model.hpp"
#include "switchvol/stats.hpp"
#include "switchvol/synthetic.hpp"

using namespace switchvol;

namespace {

StableModelParams two_state(double gamma1_sq = 1e-4, double h = 4.0, double lambda = 1.0) {
  StableModelParams p;
  p.mu = {0.0, 0.0};
  p.gamma1_sq = gamma1_sq;
  p.h_star = {h};
  p.lambda = lambda;
  p.alpha = 1.7;
  return p;
}

std::vector<double> normal_data(int n, double mu, double var, Rng& rng) {
  std::vector<double> y(static_cast<std::size_t>(n));
  for (auto& v : y) v = mu + std::sqrt(var) * standard_normal(rng);
  return y;
}

double inv_gamma_cdf(double x, const InvGammaParams& p) { return boost::math::gamma_q(p.shape, p.rate / x); }

}  // namespace

TEST_CASE("stable_conditional_loglik") {
  auto p = two_state(1e-4, 4.0, 2.5);
  p.mu = {0.001, -0.002};
  CHECK(stable_conditional_loglik(std::vector<double>{-0.002}, StatePath{{1}}, p) ==
        doctest::Approx(-0.5 * std::log(2 * std::numbers::pi * 2.5 * 4e-4)).epsilon(1e-14));

  Rng rng = make_rng(301);
  std::vector<double> y;
  StatePath path;
  for (int t = 0; t < 200; ++t) {
    path.states.push_back(t % 3 == 0 ? 1 : 0);
    y.push_back(0.02 * standard_normal(rng));
  }
  double naive = 0.0;
  for (std::size_t t = 0; t < y.size(); ++t) {
    const int j = path.states[t];
    const double v = p.lambda * p.gamma_sq(j);
    const double r = y[t] - p.mu[static_cast<std::size_t>(j)];
    naive += -0.5 * std::log(2 * std::numbers::pi * v) - r * r / (2 * v);
  }
  CHECK(std::abs(stable_conditional_loglik(y, path, p) - naive) < 1e-10);

  auto q = p;
  q.lambda *= 2.0;
  q.gamma1_sq /= 2.0;
  CHECK(stable_conditional_loglik(y, path, q) == doctest::Approx(stable_conditional_loglik(y, path, p)).epsilon(1e-13));
  CHECK_THROWS_AS(stable_conditional_loglik(y, StatePath{{0}}, p), Error);
}

TEST_CASE("sample_lambda") {
  StablePriors priors = StablePriors::defaults(2);
  SUBCASE("proposals below the floor are rejected") {
    priors.lambda_floor = 1.0;
    Rng rng = make_rng(302);
    auto p = two_state(1e-4, 4.0, 1.0);
    const std::vector<double> y{0.001, -0.003};
    const StatePath path{{0, 1}};
    int rejected = 0;
    for (int i = 0; i < 3000; ++i) {
      const auto r = sample_lambda(y, path, p, priors, 2.0, rng);
      REQUIRE(r.value >= 1.0);
      rejected += !r.accepted;
      p.lambda = r.value;
    }
    CHECK(rejected > 0);
  }
  SUBCASE("without data the chain samples the prior") {
    Rng rng = make_rng(303);
    auto p = two_state();
    std::vector<double> kept;
    // Thinned so the KS test sees nearly independent draws.
    for (int i = 0; i < 100000; ++i) {
      p.lambda = sample_lambda({}, StatePath{}, p, priors, 1.5, rng).value;
      if (i % 10 == 9) kept.push_back(p.lambda);
    }
    CHECK(ks_one_sample(kept, [](double x) { return positive_stable_cdf(x, 1.7); }).p_value > 0.01);
  }
}

TEST_CASE("sample_gamma1_sq") {
  StablePriors priors = StablePriors::defaults(2);
  SUBCASE("no data gives the prior") {
    Rng rng = make_rng(304);
    std::vector<double> xs(20000);
    for (auto& x : xs) x = sample_gamma1_sq({}, two_state(), priors, rng);
    CHECK(ks_one_sample(xs, [&](double x) { return inv_gamma_cdf(x, priors.scale_prior); }).p_value > 0.01);
  }
  SUBCASE("delegates with residuals divided by lambda") {
    Rng gen = make_rng(305);
    auto p = two_state(1e-4, 4.0, 3.0);
    p.mu[0] = 0.001;
    const auto y = normal_data(40, 0.0, 3e-4, gen);
    double ss = 0.0;
    for (double v : y) ss += (v - 0.001) * (v - 0.001);
    Rng a = make_rng(10), b = make_rng(10);
    for (int i = 0; i < 50; ++i)
      CHECK(sample_gamma1_sq(y, p, priors, a) == inv_gamma_normal_update(ss / 3.0, 40, priors.scale_prior, b));
  }
  SUBCASE("grid oracle") {
    Rng rng = make_rng(306);
    const auto p = two_state(1e-4, 4.0, 2.0);
    const auto y = normal_data(50, 0.0, 2e-4, rng);
    double ss = 0.0;
    for (double v : y) ss += v * v;
    const Grid grid{2e-5, 3.2e-4, 20000};
    const auto g = grid_posterior([&](double s) { return inv_gamma_log_pdf(s, priors.scale_prior); },
                                  [&](double s) {
                                    double acc = 0.0;
                                    for (double v : y) acc += normal_log_pdf(v, 0.0, 2.0 * s);
                                    return acc;
                                  },
                                  grid);
    std::vector<double> xs(4000000);
    for (auto& x : xs) x = sample_gamma1_sq(y, p, priors, rng);
    CHECK(total_variation(histogram(xs, grid.lo, grid.hi, 20), g.coarsen(20)) < 1e-3);
  }
}

TEST_CASE("sample_stable_mu_j") {
  StablePriors priors = StablePriors::defaults(2);
  Rng rng = make_rng(307);
  SUBCASE("no data gives N(0, 1/k)") {
    std::vector<double> xs(100000);
    for (auto& x : xs) x = sample_stable_mu_j({}, 1, two_state(), priors, rng);
    CHECK(std::abs(mean(xs)) < 3 * standard_error(xs));
    CHECK(std::abs(variance(xs) - 1.0 / priors.k) < 3 * std::sqrt(2.0 / xs.size()) / priors.k);
  }
  SUBCASE("dogmatic prior") {
    priors.k = 1e12;
    const std::vector<double> y{0.3, 0.2, 0.5};
    for (int i = 0; i < 1000; ++i) CHECK(std::abs(sample_stable_mu_j(y, 0, two_state(), priors, rng)) < 1e-5);
  }
  SUBCASE("grid oracle") {
    const auto p = two_state(1e-4, 4.0, 1.5);
    const double var = 1.5 * 4e-4;
    const auto y = normal_data(30, 0.004, var, rng);
    const double centre = mean(y), sd = std::sqrt(var / 30.0);
    const Grid grid{centre - 9 * sd, centre + 9 * sd, 18000};
    const auto g = grid_posterior([&](double m) { return normal_log_pdf(m, 0.0, 1.0 / priors.k); },
                                  [&](double m) {
                                    double acc = 0.0;
                                    for (double v : y) acc += normal_log_pdf(v, m, var);
                                    return acc;
                                  },
                                  grid);
    std::vector<double> xs(4000000);
    for (auto& x : xs) x = sample_stable_mu_j(y, 1, p, priors, rng);
    CHECK(total_variation(histogram(xs, grid.lo, grid.hi, 18), g.coarsen(18)) < 1e-3);
  }
}

TEST_CASE("sample_stable_h_star_j") {
  StablePriors priors = StablePriors::defaults(2);
  SUBCASE("no data gives the Frechet prior") {
    Rng rng = make_rng(308);
    std::vector<double> xs(20000);
    for (auto& x : xs) {
      x = sample_stable_h_star_j({}, 1, two_state(), priors, 0.3, rng).value;
      REQUIRE(x > 1.0);
    }
    const auto& f = priors.frechet;
    CHECK(ks_one_sample(xs, [&](double h) {
            return h <= f.location ? 0.0 : std::exp(-std::pow((h - f.location) / f.scale, -f.shape));
          }).p_value > 0.01);
  }
  SUBCASE("recovers h* = 1.5 from 500 residuals") {
    Rng rng = make_rng(309);
    auto p = two_state(0.5, 2.0, 2.0);  // lambda gamma_1^2 = 1
    const auto y = normal_data(500, 0.0, 1.5, rng);
    std::vector<double> kept;
    double h = 2.0;
    for (int i = 0; i < 6000; ++i) {
      p.h_star[0] = h;
      h = sample_stable_h_star_j(y, 1, p, priors, 0.15, rng).value;
      if (i >= 1000) kept.push_back(h);
    }
    const int bins = 40;
    const auto hist = histogram(kept, 1.0, 3.0, bins);
    const auto top = std::max_element(hist.begin(), hist.end()) - hist.begin();
    CHECK(std::abs(1.0 + (top + 0.5) * 2.0 / bins - 1.5) < 0.2 * 1.5);
  }
  SUBCASE("proposals at or below one are rejected") {
    Rng rng = make_rng(310);
    auto p = two_state(1.0, 1.0001);
    const std::vector<double> y{0.3, -0.2};
    for (int i = 0; i < 2000; ++i) {
      p.h_star[0] = sample_stable_h_star_j(y, 1, p, priors, 3.0, rng).value;
      REQUIRE(p.h_star[0] > 1.0);
    }
  }
}

TEST_CASE("scale mixture at the model level") {
  Rng rng = make_rng(311);
  const double gamma = 0.02, mu = 0.003;
  std::vector<double> mixed(100000), direct(100000);
  for (auto& v : mixed) v = mu + std::sqrt(positive_stable_sample(1.7, rng) * gamma * gamma) * standard_normal(rng);
  for (auto& v : direct) v = stable_sample({1.7, 0.0, gamma, mu}, rng);
  CHECK(ks_two_sample(mixed, direct).p_value > 0.01);
}

TEST_CASE("stable sweep") {
  Rng gen = make_rng(312);
  StablePriors priors = StablePriors::defaults(2);
  const auto truth = two_state(1e-4, 25.0);
  const auto data =
      simulate_stable_model(truth, TransitionMatrix::sticky(2, 0.95), InitialDistribution::uniform(2), 500, gen);

  auto init = [&] {
    StableState s;
    s.params = two_state(2e-4, 3.0, 1.0);
    s.P = TransitionMatrix::sticky(2, 0.9);
    s.path.states.assign(data.y.size(), 0);
    return s;
  };

  SUBCASE("invariants hold over 1000 sweeps") {
    StableSampler sampler(data.y, priors, InitialDistribution::uniform(2));
    Rng rng = make_rng(313);
    AcceptanceTally tally;
    StableState s = init();
    for (int it = 0; it < 1000; ++it) {
      SweepContext ctx{rng, it, it < 300, tally};
      sampler.sweep(s, ctx);
      REQUIRE_NOTHROW(s.params.validate(priors.lambda_floor));
      REQUIRE(s.params.gamma_sq(0) < s.params.gamma_sq(1));
      REQUIRE(s.params.lambda >= priors.lambda_floor);
      for (int i = 0; i < 2; ++i) {
        const auto r = s.P.row(i);
        REQUIRE(std::abs(std::accumulate(r.begin(), r.end(), 0.0) - 1.0) < 1e-12);
      }
    }
    CHECK(tally.rate("lambda").has_value());
  }
  SUBCASE("fixed seed gives identical states") {
    StableSampler a(data.y, priors, InitialDistribution::uniform(2));
    StableSampler b(data.y, priors, InitialDistribution::uniform(2));
    Rng ra = make_rng(314), rb = make_rng(314);
    AcceptanceTally ta, tb;
    StableState sa = init(), sb = init();
    for (int it = 0; it < 100; ++it) {
      SweepContext ca{ra, it, true, ta}, cb{rb, it, true, tb};
      a.sweep(sa, ca);
      b.sweep(sb, cb);
    }
    CHECK(sa.scalars() == sb.scalars());
  }
  SUBCASE("strong separation: ordering and classification") {
    StableSampler sampler(data.y, priors, InitialDistribution::uniform(2));
    Rng rng = make_rng(315);
    AcceptanceTally tally;
    StableState s = init();
    const int T = static_cast<int>(data.y.size());
    std::vector<double> p_high(static_cast<std::size_t>(T), 0.0);
    double g1 = 0.0, g2 = 0.0;
    int kept = 0;
    for (int it = 0; it < 3000; ++it) {
      SweepContext ctx{rng, it, it < 1000, tally};
      sampler.sweep(s, ctx);
      if (it < 1000) continue;
      ++kept;
      g1 += s.params.gamma_sq(0);
      g2 += s.params.gamma_sq(1);
      for (int t = 0; t < T; ++t) p_high[static_cast<std::size_t>(t)] += sampler.last_filtered()(t, 1);
    }
    CHECK(g1 < g2);
    int correct = 0;
    for (int t = 0; t < T; ++t)
      correct += (p_high[static_cast<std::size_t>(t)] / kept > 0.5 ? 1 : 0) == data.path.states[static_cast<std::size_t>(t)];
    CHECK(correct >= 0.7 * T);
  }
}
