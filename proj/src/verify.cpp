#include "switchvol/verify.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "switchvol/analysis.hpp"
#include "switchvol/distributions.hpp"
#include "switchvol/error.hpp"
#include "switchvol/io.hpp"
#include "switchvol/mcmc.hpp"
#include "switchvol/pipeline.hpp"
#include "switchvol/regime.hpp"
#include "switchvol/stats.hpp"
#include "switchvol/synthetic.hpp"

namespace switchvol {

namespace fs = std::filesystem;

namespace {

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << "[fail] ";
    }
    detail << what << "; ";
  }
};

// --- 1 -----------------------------------------------------------------------

Outcome check_sym_gamma_moments(const VerifyOptions& o) {
  Outcome out;
  Rng rng = make_rng(o.seed + 1);
  const int n = 100000;
  const std::pair<int, double> cases[] = {{1, 1.0}, {2, 1.0}, {1, 30.0}, {2, 30.0}};
  std::vector<double> xs(n);
  for (const auto& [a, b] : cases) {
    const SymGammaParams p{a, b};
    for (auto& x : xs) x = sym_gamma_sample(p, rng);
    const double m = mean(xs);
    double m2 = 0.0;
    double m4 = 0.0;
    for (double x : xs) {
      const double d = (x - m) * (x - m);
      m2 += d;
      m4 += d * d;
    }
    m2 /= n;
    m4 /= n;
    const double s2 = variance(xs);
    const double se = std::sqrt((m4 - m2 * m2) / n);
    const double truth = a * (a + 1.0) / (b * b);
    out.require(std::abs(s2 - truth) <= 3.0 * se,
                "N=" + std::to_string(a) + " b=" + fmt("%g", b) + ": var " + fmt("%.5g", s2) + " vs " +
                    fmt("%.5g", truth) + " (" + fmt("%.2f", (s2 - truth) / se) + " SE)");
  }
  return out;
}

// --- 2 -----------------------------------------------------------------------

Outcome check_scale_mixture(const VerifyOptions& o) {
  Outcome out;
  Rng rng = make_rng(o.seed + 2);
  const int n = 100000;
  for (double alpha : {1.5, 1.9}) {
    std::vector<double> mixed(n);
    std::vector<double> direct(n);
    for (auto& x : mixed) x = std::sqrt(positive_stable_sample(alpha, rng)) * standard_normal(rng);
    const StableParams sp{alpha, 0.0, 1.0, 0.0};
    for (auto& x : direct) x = stable_sample(sp, rng);
    const auto ks = ks_two_sample(mixed, direct);
    out.require(ks.p_value > 0.01, "alpha=" + fmt("%g", alpha) + ": KS D=" + fmt("%.4g", ks.statistic) +
                                       " p=" + fmt("%.3g", ks.p_value));
  }
  return out;
}

// --- 3 -----------------------------------------------------------------------

TransitionMatrix random_transition(int M, Rng& rng) {
  std::vector<double> flat;
  for (int i = 0; i < M; ++i) {
    const auto row = dirichlet_sample({std::vector<double>(static_cast<std::size_t>(M), 1.0)}, rng);
    flat.insert(flat.end(), row.begin(), row.end());
  }
  for (int i = 0; i < M; ++i) {
    double s = 0.0;
    for (int j = 0; j < M; ++j) s += flat[static_cast<std::size_t>(i * M + j)];
    for (int j = 0; j < M; ++j) flat[static_cast<std::size_t>(i * M + j)] /= s;
  }
  return TransitionMatrix(M, flat);
}

Outcome check_filter_enumeration(const VerifyOptions& o) {
  Outcome out;
  Rng rng = make_rng(o.seed + 3);
  std::uniform_int_distribution<int> pick_T(1, 8);
  std::uniform_int_distribution<int> pick_M(1, 3);
  std::uniform_real_distribution<double> pick_log(-6.0, 1.0);
  double worst = 0.0;
  for (int inst = 0; inst < 50; ++inst) {
    const int T = pick_T(rng);
    const int M = pick_M(rng);
    EmissionTable em(T, M);
    for (auto& v : em.log_density) v = pick_log(rng);
    const auto P = random_transition(M, rng);
    auto pi = dirichlet_sample({std::vector<double>(static_cast<std::size_t>(M), 1.0)}, rng);
    double s = 0.0;
    for (double v : pi) s += v;
    for (auto& v : pi) v /= s;
    const InitialDistribution pi0{pi};
    const auto fast = hamilton_filter(em, P, pi0);
    const auto slow = enumerate_filtered(em, P, pi0);
    for (std::size_t k = 0; k < fast.probs.size(); ++k)
      worst = std::max(worst, std::abs(fast.probs[k] - slow.probs[k]));
  }
  out.require(worst <= 1e-10, "50 instances, max filtered difference " + fmt("%.2e", worst));

  // Fixed T=5, M=2 instance for backward path sampling.
  const int T = 5;
  const int M = 2;
  const double y[T] = {0.1, -1.2, 2.0, 0.3, -0.5};
  EmissionTable em(T, M);
  for (int t = 0; t < T; ++t) {
    em(t, 0) = normal_log_pdf(y[t], 0.0, 0.5);
    em(t, 1) = normal_log_pdf(y[t], 0.0, 3.0);
  }
  const TransitionMatrix P(2, {0.8, 0.2, 0.3, 0.7});
  const InitialDistribution pi0{{0.6, 0.4}};
  const auto exact = enumerate_path_posterior(em, P, pi0);
  const auto filtered = hamilton_filter(em, P, pi0);
  const int draws = 100000;
  std::vector<double> freq(exact.path_probs.size(), 0.0);
  for (int d = 0; d < draws; ++d) freq[exact.encode(sample_state_path(filtered, P, rng).states)] += 1.0;
  double worst_z = 0.0;
  int outside = 0;
  for (std::size_t k = 0; k < freq.size(); ++k) {
    const double p = exact.path_probs[k];
    const double se = std::sqrt(p * (1.0 - p) / draws);
    const double z = std::abs(freq[k] / draws - p) / se;
    worst_z = std::max(worst_z, z);
    if (z > 3.0) ++outside;
  }
  out.require(outside == 0, "T=5 M=2 path frequencies: " + std::to_string(outside) + " of " +
                                std::to_string(freq.size()) + " paths beyond 3 SE (max " +
                                fmt("%.2f", worst_z) + " SE)");
  return out;
}

// --- 4 -----------------------------------------------------------------------

// Samples binned directly on [lo, hi] without storing them.
template <class Draw>
std::vector<double> binned_draws(Draw&& draw, long n, double lo, double hi, int bins) {
  std::vector<double> counts(static_cast<std::size_t>(bins), 0.0);
  const double width = (hi - lo) / bins;
  for (long i = 0; i < n; ++i) {
    const double x = draw();
    auto b = static_cast<long>(std::floor((x - lo) / width));
    b = std::clamp(b, 0L, static_cast<long>(bins - 1));
    counts[static_cast<std::size_t>(b)] += 1.0;
  }
  for (auto& c : counts) c /= static_cast<double>(n);
  return counts;
}

Outcome check_conjugate_grids(const VerifyOptions& o) {
  Outcome out;
  Rng rng = make_rng(o.seed + 4);
  const long n_draws = 10000000;

  // Normal likelihood with known variance, Normal prior on the mean.
  {
    std::vector<double> data;
    Rng data_rng = make_rng(o.seed + 40);
    for (int i = 0; i < 20; ++i) data.push_back(0.4 + std::sqrt(2.0) * standard_normal(data_rng));
    const double sigma_sq = 2.0;
    const double k = 0.5;
    const double mu0 = -1.0;
    const NormalNormalPosterior post{static_cast<int>(data.size()), mean(data), sigma_sq, k, mu0};
    const double centre = post.mean();
    const double sd = std::sqrt(post.variance());
    const Grid grid{centre - 8.0 * sd, centre + 8.0 * sd, 16000};
    const auto g = grid_posterior(
        [&](double m) { return normal_log_pdf(m, mu0, 1.0 / k); },
        [&](double m) {
          double s = 0.0;
          for (double v : data) s += normal_log_pdf(v, m, sigma_sq);
          return s;
        },
        grid);
    const auto h = binned_draws([&] { return normal_normal_update(post, rng); }, n_draws, grid.lo, grid.hi, 16);
    const double tv = total_variation(h, g.coarsen(16));
    out.require(tv < 1e-3, "normal-normal TV " + fmt("%.2e", tv));
  }

  // Inverse Gamma prior on a Normal variance with known mean 0.
  {
    std::vector<double> data;
    Rng data_rng = make_rng(o.seed + 41);
    for (int i = 0; i < 30; ++i) data.push_back(0.3 * standard_normal(data_rng));
    double ss = 0.0;
    for (double v : data) ss += v * v;
    const InvGammaParams prior{2.0, 0.05};
    const auto post = inv_gamma_normal_posterior(ss, static_cast<int>(data.size()), prior);
    const double m = post.rate / (post.shape - 1.0);
    const Grid grid{0.2 * m, 7.0 * m, 20000};
    const auto g = grid_posterior(
        [&](double v) { return inv_gamma_log_pdf(v, prior); },
        [&](double v) {
          double s = 0.0;
          for (double x : data) s += normal_log_pdf(x, 0.0, v);
          return s;
        },
        grid);
    const auto h = binned_draws([&] { return inv_gamma_normal_update(ss, static_cast<int>(data.size()), prior, rng); },
                                n_draws, grid.lo, grid.hi, 20);
    const double tv = total_variation(h, g.coarsen(20));
    out.require(tv < 1e-3, "inverse-gamma-normal TV " + fmt("%.2e", tv));
  }
  return out;
}

// --- 5 -----------------------------------------------------------------------

double integrate_convolution(double mu, double sigma, int n, double b) {
  using boost::math::quadrature::gauss_kronrod;
  const double sn = std::sqrt(static_cast<double>(n));
  const double reach = 16.0 * sigma + (n + 40.0 + 12.0 * sn) / b;
  std::vector<double> cuts{mu - reach, mu + reach};
  for (double k : {0.0, 2.0, 8.0}) {
    cuts.push_back(mu - k * sigma);
    cuts.push_back(mu + k * sigma);
  }
  for (double t : {-3.0, 0.0, 3.0, 8.0}) {
    const double at = std::max(0.0, (n + t * sn) / b);
    cuts.push_back(mu - at);
    cuts.push_back(mu + at);
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
    total += gauss_kronrod<double, 31>::integrate(
        [&](double z) { return jump_convolved_pdf(z, mu, sigma, n, b); }, cuts[i], cuts[i + 1], 15, 1e-12);
  return total;
}

// N(mu, sigma^2) plus a Laplace variable with rate b.
double normal_laplace_pdf(double z, double mu, double sigma, double b) {
  const double x = z - mu;
  const double r2 = std::sqrt(2.0) * sigma;
  const double shift = 0.5 * b * b * sigma * sigma;
  return 0.25 * b *
         (std::exp(shift - b * x) * std::erfc((b * sigma * sigma - x) / r2) +
          std::exp(shift + b * x) * std::erfc((b * sigma * sigma + x) / r2));
}

Outcome check_convolution(const VerifyOptions&) {
  Outcome out;
  struct Case {
    int n;
    double b;
    double sigma;
  };
  for (const Case c : {Case{1, 1.0, 0.5}, Case{3, 40.0, 0.02}, Case{10, 40.0, 0.02}}) {
    const double mass = integrate_convolution(0.01, c.sigma, c.n, c.b);
    out.require(std::abs(mass - 1.0) <= 1e-6, "N=" + std::to_string(c.n) + " b=" + fmt("%g", c.b) +
                                                  ": mass-1 = " + fmt("%.2e", mass - 1.0));
  }
  for (const Case c : {Case{1, 1.0, 0.5}, Case{1, 40.0, 0.02}}) {
    const double mu = 0.01;
    const double spread = std::sqrt(c.sigma * c.sigma + 2.0 / (c.b * c.b));
    double worst = 0.0;
    for (int i = 0; i <= 20; ++i) {
      const double z = mu - 5.0 * spread + i * 0.5 * spread;
      worst = std::max(worst, std::abs(jump_convolved_pdf(z, mu, c.sigma, 1, c.b) -
                                       normal_laplace_pdf(z, mu, c.sigma, c.b)));
    }
    out.require(worst <= 1e-8, "normal-laplace b=" + fmt("%g", c.b) + ": max |diff| " + fmt("%.2e", worst));
  }
  return out;
}

// --- 6 -----------------------------------------------------------------------

Outcome check_durations(const VerifyOptions& o) {
  Outcome out;
  const double stay[3] = {0.3, 0.725, 0.9};
  std::vector<double> flat(9);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) flat[static_cast<std::size_t>(i * 3 + j)] = i == j ? stay[i] : 0.5 * (1.0 - stay[i]);
  const TransitionMatrix P(3, flat);
  const auto d = expected_durations(P);
  double worst = 0.0;
  for (int j = 0; j < 3; ++j) worst = std::max(worst, std::abs(d.durations[static_cast<std::size_t>(j)] * (1.0 - stay[j]) - 1.0));
  out.require(worst <= 1e-14, "formula: max relative error " + fmt("%.1e", worst));

  Rng rng = make_rng(o.seed + 6);
  const std::size_t need = 100000;
  std::vector<std::vector<double>> sojourns(3);
  int state = 0;
  double run = 1.0;
  auto done = [&] {
    return std::all_of(sojourns.begin(), sojourns.end(), [&](const auto& s) { return s.size() >= need; });
  };
  while (!done()) {
    const int next = sample_categorical(P.row(state), rng);
    if (next == state) {
      run += 1.0;
      continue;
    }
    if (sojourns[static_cast<std::size_t>(state)].size() < need) sojourns[static_cast<std::size_t>(state)].push_back(run);
    state = next;
    run = 1.0;
  }
  for (int j = 0; j < 3; ++j) {
    const auto& s = sojourns[static_cast<std::size_t>(j)];
    const double m = mean(s);
    const double se = standard_error(s);
    const double truth = 1.0 / (1.0 - stay[j]);
    out.require(std::abs(m - truth) <= 3.0 * se, "p=" + fmt("%g", stay[j]) + ": mean sojourn " + fmt("%.4f", m) +
                                                     " vs " + fmt("%.4f", truth) + " (" +
                                                     fmt("%.2f", (m - truth) / se) + " SE)");
  }
  return out;
}

// --- 7, 8 --------------------------------------------------------------------

double accuracy(const std::vector<int>& a, const std::vector<int>& b) {
  double hit = 0.0;
  for (std::size_t t = 0; t < a.size(); ++t) hit += a[t] == b[t] ? 1.0 : 0.0;
  return hit / static_cast<double>(a.size());
}

RunConfig recovery_config(const VerifyOptions& o, ModelKind model, std::uint64_t seed) {
  RunConfig cfg;
  cfg.resize_defaults(2);
  cfg.model = model;
  cfg.sampler.iterations = o.recovery_iterations;
  cfg.sampler.burn_in = o.recovery_burn_in;
  cfg.sampler.seed = seed;
  return cfg;
}

Outcome check_jump_recovery(const VerifyOptions& o) {
  Outcome out;
  JumpParams truth;
  truth.mu = {0.0, 0.0};
  // Large enough that the per-state jump variance N(N+1)/b^2 stays a few
  // percent of sigma_j^2; at weekly-return scale the two are confounded.
  truth.sigma1_sq = 0.04;
  truth.h_star = {10.0};
  truth.theta = {0.1, 2.0};
  truth.n_jumps = {0, 0};
  truth.b = 40.0;
  const TransitionMatrix P(2, {0.95, 0.05, 0.05, 0.95});
  const auto pi0 = InitialDistribution::uniform(2);

  int good = 0;
  std::ostringstream reps;
  for (int r = 0; r < o.replications; ++r) {
    const std::uint64_t seed = o.seed + 700 + static_cast<std::uint64_t>(r);
    Rng rng = make_rng(seed);
    const auto data = simulate_jump_model(truth, P, pi0, 500, rng);
    RunConfig cfg = recovery_config(o, ModelKind::jump, seed);
    cfg.jump.u = {0.5, 4.0};
    const ReturnSeries series{synthetic_dates(data.y.size()), data.y, "simulated"};
    const auto fit = fit_jump(cfg, series);
    const auto& s2 = fit.estimate("sigma_sq");
    bool ok = true;
    for (int j = 0; j < 2; ++j)
      ok = ok && std::abs(s2[static_cast<std::size_t>(j)] / truth.sigma_sq(j) - 1.0) <= 0.2;
    const double acc = accuracy(fit.argmax_states(), data.path.states);
    ok = ok && acc >= 0.7;
    good += ok ? 1 : 0;
    reps << (ok ? "" : "!") << fmt("%.2f", s2[0] / truth.sigma_sq(0)) << "/"
         << fmt("%.2f", s2[1] / truth.sigma_sq(1)) << "/" << fmt("%.2f", acc) << " ";
  }
  out.require(good >= 18, std::to_string(good) + " of " + std::to_string(o.replications) +
                              " replications recovered (ratio1/ratio2/accuracy: " + reps.str() + ")");
  return out;
}

Outcome check_stable_recovery(const VerifyOptions& o) {
  Outcome out;
  StableModelParams truth;
  truth.mu = {0.0, 0.0};
  truth.gamma1_sq = 1e-4;
  truth.h_star = {10.0};
  truth.alpha = 1.7;
  const TransitionMatrix P(2, {0.95, 0.05, 0.05, 0.95});
  const auto pi0 = InitialDistribution::uniform(2);

  int good = 0;
  int crashes = 0;
  double lambda_min = std::numeric_limits<double>::infinity();
  std::ostringstream reps;
  for (int r = 0; r < o.replications; ++r) {
    const std::uint64_t seed = o.seed + 800 + static_cast<std::uint64_t>(r);
    Rng rng = make_rng(seed);
    const auto data = simulate_stable_model(truth, P, pi0, 500, rng);
    RunConfig cfg = recovery_config(o, ModelKind::stable, seed);
    cfg.alpha = truth.alpha;
    const ReturnSeries series{synthetic_dates(data.y.size()), data.y, "simulated"};
    try {
      const auto fit = fit_stable(cfg, series);
      const auto& g = fit.estimate("gamma_sq");
      const double acc = accuracy(fit.argmax_states(), data.path.states);
      const bool ok = g[0] < g[1] && acc >= 0.7;
      const auto lam = std::find(fit.scalar_names.begin(), fit.scalar_names.end(), "lambda") - fit.scalar_names.begin();
      for (const auto& row : fit.chain_rows) lambda_min = std::min(lambda_min, row[static_cast<std::size_t>(lam)]);
      good += ok ? 1 : 0;
      reps << (ok ? "" : "!") << fmt("%.2f", g[1] / g[0]) << "/" << fmt("%.2f", acc) << " ";
    } catch (const Error& e) {
      ++crashes;
      reps << "crash(" << e.what() << ") ";
    }
  }
  out.require(crashes == 0, std::to_string(crashes) + " crashed runs, smallest retained lambda " + fmt("%.3g", lambda_min));

  // Control, not part of the verdict: the same fits on data drawn from the
  // model's own form, one lambda for the whole series and Gaussian given it.
  int control = 0;
  for (int r = 0; r < o.replications; ++r) {
    const std::uint64_t seed = o.seed + 900 + static_cast<std::uint64_t>(r);
    Rng rng = make_rng(seed);
    auto data = simulate_stable_model(truth, P, pi0, 500, rng);
    const double lambda = positive_stable_sample(truth.alpha, rng);
    for (std::size_t t = 0; t < data.y.size(); ++t)
      data.y[t] = std::sqrt(lambda * truth.gamma_sq(data.path.states[t])) * standard_normal(rng);
    RunConfig cfg = recovery_config(o, ModelKind::stable, seed);
    cfg.alpha = truth.alpha;
    try {
      const auto fit = fit_stable(cfg, ReturnSeries{synthetic_dates(data.y.size()), data.y, "simulated"});
      const auto& g = fit.estimate("gamma_sq");
      control += g[0] < g[1] && accuracy(fit.argmax_states(), data.path.states) >= 0.7 ? 1 : 0;
    } catch (const Error&) {
    }
  }
  out.require(good >= 18, std::to_string(good) + " of " + std::to_string(o.replications) +
                              " replications recovered (gamma ratio/accuracy: " + reps.str() + ")");
  out.detail << "control on single-lambda Gaussian data: " << control << " of " << o.replications
             << " recovered; ";
  return out;
}

// --- 9 -----------------------------------------------------------------------

const char* kPrices = "sp500_weekly_2007_2014.csv";
const char* kVix = "vix_weekly_2007_2014.csv";
const char* kProxy = "realized_vol_weekly_2007_2014.csv";

Outcome check_case_study(const VerifyOptions& o) {
  Outcome out;
  RunConfig cfg;
  cfg.sampler.seed = o.seed;
  cfg.data_path = (o.data_dir / kPrices).string();
  const auto returns = log_returns(load_prices_csv(cfg.data_path));

  const auto jump = fit_jump(cfg, returns);
  const auto stable = fit_stable(cfg, returns);

  const auto& s2 = jump.estimate("sigma_sq");
  bool increasing = true;
  std::string listing;
  for (std::size_t j = 0; j < s2.size(); ++j) {
    if (j > 0) increasing = increasing && s2[j] > s2[j - 1];
    listing += (j ? " " : "") + fmt("%.3g", s2[j]);
  }
  out.require(increasing, "(a) jump sigma_sq " + listing);

  const double mu_last = stable.estimate("mu").back();
  out.require(mu_last < 0.0, "(b) stable mu_" + std::to_string(cfg.states) + " = " + fmt("%.3g", mu_last));

  auto scores = [&](const DatedSeries& ref) {
    const auto a = compare_to_reference(jump.indicator, returns.dates, ref);
    const auto b = compare_to_reference(stable.indicator, returns.dates, ref);
    return std::pair{a.score, b.score};
  };
  const fs::path vix = o.data_dir / kVix;
  if (fs::exists(vix)) {
    const auto [sj, sa] = scores(load_reference_csv(vix));
    out.require(sj < sa, "(c) VIX: S^J " + fmt("%.4g", sj) + " vs S^alpha " + fmt("%.4g", sa));
  } else {
    out.require(false, std::string("(c) VIX reference ") + kVix + " is not bundled");
  }
  const fs::path proxy = o.data_dir / kProxy;
  if (fs::exists(proxy)) {
    const auto [sj, sa] = scores(load_reference_csv(proxy));
    out.detail << "supplementary realized-vol proxy: S^J " << fmt("%.4g", sj) << " vs S^alpha " << fmt("%.4g", sa)
               << (sj < sa ? " (ordering holds)" : " (ordering reversed)") << "; ";
  }
  return out;
}

// --- 10 ----------------------------------------------------------------------

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome check_determinism(const VerifyOptions& o) {
  Outcome out;
  const fs::path data = o.data_dir / kPrices;
  const fs::path runs[2] = {o.work_dir / "determinism_a", o.work_dir / "determinism_b"};
  for (const auto& dir : runs) {
    fs::remove_all(dir);
    if (!o.cli.empty()) {
      const std::string cmd = "\"" + o.cli + "\" fit-jump --data \"" + data.string() + "\" --seed " +
                              std::to_string(o.seed) + " --out \"" + dir.string() + "\" > \"" +
                              (dir.string() + ".log") + "\" 2>&1";
      fs::create_directories(o.work_dir);
      const int rc = std::system(cmd.c_str());
      if (rc != 0) throw Error(ErrorKind::io, "fit-jump exited with status " + std::to_string(rc));
    } else {
      RunConfig cfg;
      cfg.sampler.seed = o.seed;
      cfg.data_path = data.string();
      export_results(run_fit(cfg), dir);
    }
  }
  int files = 0;
  for (const auto& entry : fs::directory_iterator(runs[0])) {
    const auto name = entry.path().filename();
    const bool same = fs::exists(runs[1] / name) && slurp(entry.path()) == slurp(runs[1] / name);
    out.require(same, name.string() + (same ? " identical" : " differs"));
    ++files;
  }
  out.require(files >= 4, std::to_string(files) + " export files compared" + (o.cli.empty() ? " (in-process)" : ""));
  return out;
}

}  // namespace

std::string check_name(int id) {
  switch (id) {
    case 1: return "symmetric gamma moments";
    case 2: return "stable scale mixture";
    case 3: return "filter vs enumeration";
    case 4: return "conjugate updates vs grid";
    case 5: return "convolution density";
    case 6: return "expected durations";
    case 7: return "jump model recovery";
    case 8: return "stable model recovery";
    case 9: return "case study structure";
    case 10: return "export determinism";
    default: throw Error(ErrorKind::config, "no check with id " + std::to_string(id));
  }
}

CheckResult run_check(int id, const VerifyOptions& opts) {
  CheckResult r;
  r.id = id;
  r.name = check_name(id);
  const auto start = std::chrono::steady_clock::now();
  try {
    Outcome out;
    switch (id) {
      case 1: out = check_sym_gamma_moments(opts); break;
      case 2: out = check_scale_mixture(opts); break;
      case 3: out = check_filter_enumeration(opts); break;
      case 4: out = check_conjugate_grids(opts); break;
      case 5: out = check_convolution(opts); break;
      case 6: out = check_durations(opts); break;
      case 7: out = check_jump_recovery(opts); break;
      case 8: out = check_stable_recovery(opts); break;
      case 9: out = check_case_study(opts); break;
      case 10: out = check_determinism(opts); break;
    }
    r.pass = out.pass;
    r.detail = out.detail.str();
    if (r.detail.size() >= 2) r.detail.resize(r.detail.size() - 2);
  } catch (const std::exception& e) {
    r.pass = false;
    r.detail = std::string("error: ") + e.what();
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

std::string format_result(const CheckResult& r) {
  char head[96];
  std::snprintf(head, sizeof head, "%s %2d  %-26s (%.1f s)  ", r.pass ? "PASS" : "FAIL", r.id, r.name.c_str(),
                r.seconds);
  return head + r.detail;
}

}  // namespace switchvol
