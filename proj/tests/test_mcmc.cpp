#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "switchvol/distributions.hpp"
#include "switchvol/error.hpp"
#include "switchvol/mcmc.hpp"
#include "switchvol/stats.hpp"
#include "switchvol/synthetic.hpp"

using namespace switchvol;

namespace {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

struct Scalar {
  double x = 0.0;
  std::vector<std::pair<std::string, double>> scalars() const { return {{"x", x}}; }
};

}  // namespace

TEST_CASE("mh_step with a degenerate proposal always accepts") {
  Proposal stay;
  stay.draw = [](double current, double, Rng&) { return current; };
  stay.log_density = [](double, double, double) { return 0.0; };
  const MhKernel k{[](double x) { return -x * x; }, stay, 1.0};
  Rng rng = make_rng(1);
  for (int i = 0; i < 100; ++i) {
    const auto r = mh_step(0.3, k, rng);
    CHECK(r.accepted);
    CHECK(r.value == 0.3);
  }
}

TEST_CASE("mh_step rejects proposals with zero target density") {
  const MhKernel k{[](double x) { return x > 0.0 ? 0.0 : -std::numeric_limits<double>::infinity(); },
                   random_walk_proposal(), 1.0};
  Rng rng = make_rng(2);
  int rejected_negative = 0;
  for (int i = 0; i < 2000; ++i) {
    const auto r = mh_step(0.01, k, rng);
    CHECK(r.value > 0.0);
    if (!r.accepted) ++rejected_negative;
  }
  CHECK(rejected_negative > 500);

  const MhKernel nan_target{[](double x) { return x == 1.0 ? 0.0 : std::nan(""); }, random_walk_proposal(), 1.0};
  CHECK_FALSE(mh_step(1.0, nan_target, rng).accepted);
}

TEST_CASE("mh_step random walk targets a standard normal") {
  const MhKernel k{[](double x) { return -0.5 * x * x; }, random_walk_proposal(), 2.4};
  Rng rng = make_rng(3);
  const int n = 100000;
  std::vector<double> xs, sq;
  double x = 0.0, lt = k.log_target(x);
  for (int i = 0; i < n; ++i) {
    const auto r = mh_step(x, lt, k, rng);
    x = r.value;
    lt = r.log_target;
    xs.push_back(x);
    sq.push_back(x * x);
  }
  CHECK(std::abs(mean(xs)) < 3 * mcmc_standard_error(xs));
  CHECK(std::abs(mean(sq) - 1.0) < 3 * mcmc_standard_error(sq));

  // Thinned well past the autocorrelation time, then binned.
  std::vector<double> thin;
  for (std::size_t i = 0; i < xs.size(); i += 10) thin.push_back(xs[i]);
  const int bins = 20;
  const auto obs = histogram(thin, -3.0, 3.0, bins);
  std::vector<double> observed, expected;
  for (int b = 0; b < bins; ++b) {
    const double lo = b == 0 ? -1e300 : -3.0 + 6.0 * b / bins;
    const double hi = b == bins - 1 ? 1e300 : -3.0 + 6.0 * (b + 1) / bins;
    observed.push_back(obs[static_cast<std::size_t>(b)] * static_cast<double>(thin.size()));
    expected.push_back((normal_cdf(hi) - normal_cdf(lo)) * static_cast<double>(thin.size()));
  }
  CHECK(chi_square_gof(observed, expected).p_value > 0.01);
}

TEST_CASE("mh_step applies the Hastings correction for log-scale proposals") {
  // Gamma(3, 1) target: mean 3, variance 3.
  const MhKernel k{[](double x) { return x > 0 ? 2.0 * std::log(x) - x : -std::numeric_limits<double>::infinity(); },
                   log_scale_proposal(), 0.8};
  Rng rng = make_rng(4);
  std::vector<double> xs;
  double x = 1.0;
  for (int i = 0; i < 100000; ++i) xs.push_back(x = mh_step(x, k, rng).value);
  CHECK(std::abs(mean(xs) - 3.0) < 3 * mcmc_standard_error(xs));
}

TEST_CASE("normal_normal_update") {
  Rng rng = make_rng(5);
  SUBCASE("no data gives the prior") {
    const NormalNormalPosterior p{0, 0.0, 1.0, 4.0, 1.5};
    CHECK(p.mean() == 1.5);
    CHECK(p.variance() == 0.25);
    std::vector<double> xs;
    for (int i = 0; i < 100000; ++i) xs.push_back(normal_normal_update(p, rng));
    CHECK(std::abs(mean(xs) - 1.5) < 3 * standard_error(xs));
  }
  SUBCASE("dogmatic prior") {
    const NormalNormalPosterior p{10, 3.0, 1.0, 1e12, 0.0};
    for (int i = 0; i < 1000; ++i) CHECK(std::abs(normal_normal_update(p, rng)) < 1e-5);
  }
  SUBCASE("grid oracle") {
    const NormalNormalPosterior p{100, 1.0, 1.0, 1.0, 0.0};
    CHECK(p.mean() == doctest::Approx(100.0 / 101.0).epsilon(1e-14));
    CHECK(p.variance() == doctest::Approx(1.0 / 101.0).epsilon(1e-14));
    const double sd = std::sqrt(1.0 / 101.0);
    const Grid grid{p.mean() - 8 * sd, p.mean() + 8 * sd, 16000};
    // Likelihood of 100 observations with mean 1 and unit variance, up to a constant.
    const auto g = grid_posterior([](double mu) { return -0.5 * mu * mu; },
                                  [](double mu) { return -0.5 * 100.0 * (1.0 - mu) * (1.0 - mu); }, grid);
    CHECK(std::abs(g.mean() - p.mean()) < g.step);
    std::vector<double> xs(4000000);
    for (auto& x : xs) x = normal_normal_update(p, rng);
    CHECK(total_variation(histogram(xs, grid.lo, grid.hi, 16), g.coarsen(16)) < 1e-3);
  }
  CHECK_THROWS_AS(normal_normal_update({1, 0.0, -1.0, 1.0, 0.0}, rng), Error);
}

TEST_CASE("inv_gamma_normal_update") {
  Rng rng = make_rng(6);
  const InvGammaParams prior{2.0, 1.0};
  SUBCASE("no data gives the prior") {
    const auto post = inv_gamma_normal_posterior(0.0, 0, prior);
    CHECK(post.shape == 2.0);
    CHECK(post.rate == 1.0);
  }
  SUBCASE("posterior shape 27, rate 26") {
    const auto post = inv_gamma_normal_posterior(50.0, 50, prior);
    CHECK(post.shape == 27.0);
    CHECK(post.rate == 26.0);
    std::vector<double> xs(100000);
    for (auto& x : xs) x = inv_gamma_normal_update(50.0, 50, prior, rng);
    const double m = 1.0;  // rate / (shape - 1)
    const double v = 1.0 / 25.0;
    CHECK(std::abs(mean(xs) - m) < 3 * standard_error(xs));
    // Kurtosis of invGamma(a): 3 + 6(5a - 11) / ((a - 3)(a - 4)).
    const double kurt = 3.0 + 6.0 * (5 * 27.0 - 11) / (24.0 * 23.0);
    CHECK(std::abs(variance(xs) - v) < 3 * v * std::sqrt((kurt - 1.0) / 100000.0));

    const Grid grid{0.3, 4.5, 21000};
    const auto g = grid_posterior([&](double s) { return inv_gamma_log_pdf(s, prior); },
                                  [](double s) { return -25.0 * std::log(s) - 25.0 / s; }, grid);
    std::vector<double> big(4000000);
    for (auto& x : big) x = inv_gamma_normal_update(50.0, 50, prior, rng);
    CHECK(total_variation(histogram(big, grid.lo, grid.hi, 20), g.coarsen(20)) < 1e-3);
  }
}

TEST_CASE("run_chain storage, burn-in and determinism") {
  Rng rng = make_rng(7);
  auto identity = [](Scalar&, SweepContext&) {};
  const auto c1 = run_chain(identity, Scalar{4.0}, 10, 9, rng);
  REQUIRE(c1.draws.size() == 1);
  CHECK(c1.draws[0].x == 4.0);

  const auto c2 = run_chain(identity, Scalar{2.5}, 50, 10, rng);
  CHECK(c2.draws.size() == 40);
  for (const auto& d : c2.draws) CHECK(d.x == 2.5);

  auto walk = [](Scalar& s, SweepContext& ctx) {
    const MhKernel k{[](double x) { return -0.5 * x * x; }, random_walk_proposal(), 1.0};
    const auto r = mh_step(s.x, k, ctx.rng);
    ctx.tally.record("x", r.accepted);
    s.x = r.value;
  };
  Rng a = make_rng(99), b = make_rng(99);
  const auto ca = run_chain(walk, Scalar{}, 500, 100, a);
  const auto cb = run_chain(walk, Scalar{}, 500, 100, b);
  REQUIRE(ca.draws.size() == cb.draws.size());
  for (std::size_t i = 0; i < ca.draws.size(); ++i) CHECK(ca.draws[i].x == cb.draws[i].x);
  CHECK(ca.acceptance.counts().at("x").proposed == 400);

  CHECK_THROWS_AS(run_chain(identity, Scalar{}, 10, 10, rng), Error);
  auto failing = [](Scalar&, SweepContext& ctx) {
    if (ctx.iteration == 3) throw Error(ErrorKind::numerical, "sigma_sq: bad");
  };
  try {
    run_chain(failing, Scalar{}, 10, 2, rng);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("iteration 3") != std::string::npos);
    CHECK(std::string(e.what()).find("sigma_sq") != std::string::npos);
  }
}

TEST_CASE("chain_summary") {
  Chain<Scalar> constant;
  constant.draws.assign(20, Scalar{1.25});
  const auto s = chain_summary(constant);
  REQUIRE(s.size() == 1);
  CHECK(s[0].mean == 1.25);
  CHECK(s[0].sd == 0.0);

  Chain<Scalar> two;
  two.draws = {Scalar{0.0}, Scalar{2.0}};
  CHECK(chain_summary(two)[0].mean == 1.0);

  Chain<Scalar> iid;
  Rng rng = make_rng(8);
  std::vector<double> xs;
  for (int i = 0; i < 100000; ++i) {
    iid.draws.push_back(Scalar{standard_normal(rng)});
    xs.push_back(iid.draws.back().x);
  }
  const auto si = chain_summary(iid);
  CHECK(std::abs(si[0].mean) < 3 * standard_error(xs));
  double mass = 0.0;
  for (double h : si[0].histogram) mass += h;
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-12));

  CHECK_THROWS_AS(chain_summary(Chain<Scalar>{}), Error);
}

TEST_CASE("AdaptiveScale moves toward the target rate") {
  AdaptiveScale up(1.0, 0.3), down(1.0, 0.3);
  for (int i = 0; i < 200; ++i) {
    up.update(true);
    down.update(false);
  }
  CHECK(up.value() > 1.0);
  CHECK(down.value() < 1.0);
}
