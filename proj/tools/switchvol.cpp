#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "switchvol/config.hpp"
#include "switchvol/error.hpp"
#include "switchvol/io.hpp"
#include "switchvol/pipeline.hpp"
#include "switchvol/synthetic.hpp"
#include "switchvol/verify.hpp"

using namespace switchvol;
namespace fs = std::filesystem;

namespace {

struct Flags {
  std::optional<std::string> config;
  ConfigOverrides o;
  int length = 500;
  std::vector<int> checks;
  bool all = false;
};

void add_common(CLI::App* cmd, Flags& f, bool model_flag) {
  cmd->add_option("--config", f.config, "JSON configuration file");
  cmd->add_option("--data", f.o.data, "price CSV with header date,price");
  cmd->add_option("--reference", f.o.reference, "reference index CSV with header date,value");
  if (model_flag) cmd->add_option("--model", f.o.model, "jump or stable");
  cmd->add_option("--states", f.o.states, "number of states M");
  cmd->add_option("--iters", f.o.iterations, "total MCMC iterations N");
  cmd->add_option("--burnin", f.o.burn_in, "burn-in iterations J");
  cmd->add_option("--seed", f.o.seed, "RNG seed (required)");
  cmd->add_option("--out", f.o.out, "output directory");
  cmd->add_option("--b", f.o.b, "jump magnitude rate b (jump model)");
  cmd->add_option("--alpha", f.o.alpha, "stability index (stable model)");
}

RunConfig resolve(const Flags& f) {
  std::optional<fs::path> file;
  if (f.config) file = *f.config;
  return resolve_config(file, f.o);
}

void print_fit(const FitReport& r, const fs::path& dir) {
  std::printf("%s model, M=%d, %zu returns, %zu retained draws\n", model_name(r.config.model).c_str(), r.M,
              r.returns.size(), r.chain_rows.size());
  const char* scale = r.config.model == ModelKind::jump ? "sigma_sq" : "gamma_sq";
  const auto& s = r.estimate(scale);
  const auto& mu = r.estimate("mu");
  for (int j = 0; j < r.M; ++j)
    std::printf("  state %d: %s %.4g  mu %.4g  duration %.3f\n", j + 1, scale, s[static_cast<std::size_t>(j)],
                mu[static_cast<std::size_t>(j)], r.durations_of_mean.durations[static_cast<std::size_t>(j)]);
  if (r.comparison)
    std::printf("  score %.6g over %zu matched dates (%zu indicator, %zu reference dates dropped)\n",
                r.comparison->score, r.comparison->dates.size(), r.comparison->dropped_indicator,
                r.comparison->dropped_reference);
  std::printf("exports written to %s\n", dir.string().c_str());
}

int cmd_fit(const Flags& f, ModelKind model) {
  RunConfig cfg = resolve(f);
  cfg.model = model;
  const auto report = run_fit(cfg);
  export_results(report, cfg.out_dir);
  print_fit(report, cfg.out_dir);
  return 0;
}

int cmd_simulate(const Flags& f) {
  const RunConfig cfg = resolve(f);
  cfg.validate();
  if (f.length < 2) throw Error(ErrorKind::config, "--length must be at least 2");
  const int M = cfg.states;
  Rng rng = make_rng(cfg.seed());
  const auto P = TransitionMatrix::sticky(M, M == 1 ? 1.0 : 0.95);
  const auto pi0 = cfg.pi0.empty() ? InitialDistribution::uniform(M) : InitialDistribution{cfg.pi0};

  std::vector<double> y;
  StatePath path;
  std::vector<int> jumps;
  if (cfg.model == ModelKind::jump) {
    JumpParams p;
    p.mu.assign(static_cast<std::size_t>(M), 0.0);
    p.sigma1_sq = 2e-4;
    p.h_star.assign(static_cast<std::size_t>(M - 1), 2.0);
    for (int j = 0; j < M; ++j) p.theta.push_back(0.5 * (cfg.jump.theta_lower(j) + cfg.jump.theta_upper(j)));
    p.n_jumps.assign(static_cast<std::size_t>(M), 0);
    p.b = cfg.b;
    auto d = simulate_jump_model(p, P, pi0, f.length, rng);
    y = std::move(d.y);
    path = std::move(d.path);
    jumps = std::move(d.jumps);
  } else {
    StableModelParams p;
    p.mu.assign(static_cast<std::size_t>(M), 0.0);
    p.gamma1_sq = 1e-4;
    p.h_star.assign(static_cast<std::size_t>(M - 1), 2.0);
    p.alpha = cfg.alpha;
    auto d = simulate_stable_model(p, P, pi0, f.length, rng);
    y = std::move(d.y);
    path = std::move(d.path);
  }

  const auto dates = synthetic_dates(y.size() + 1);
  std::string prices = "date,price\n";
  std::string truth = cfg.model == ModelKind::jump ? "date,return,state,jumps\n" : "date,return,state\n";
  double price = 1000.0;
  prices += dates[0] + "," + format_double(price) + "\n";
  for (std::size_t t = 0; t < y.size(); ++t) {
    price *= std::exp(y[t]);
    prices += dates[t + 1] + "," + format_double(price) + "\n";
    truth += dates[t + 1] + "," + format_double(y[t]) + "," + std::to_string(path.states[t] + 1);
    if (!jumps.empty()) truth += "," + std::to_string(jumps[t]);
    truth += "\n";
  }
  std::error_code ec;
  fs::create_directories(cfg.out_dir, ec);
  write_text_file(fs::path(cfg.out_dir) / "simulated.csv", prices);
  write_text_file(fs::path(cfg.out_dir) / "truth.csv", truth);
  std::printf("%d %s-model returns written to %s\n", f.length, model_name(cfg.model).c_str(),
              (fs::path(cfg.out_dir) / "simulated.csv").string().c_str());
  return 0;
}

int cmd_analyze(const Flags& f) {
  const RunConfig cfg = resolve(f);
  if (cfg.reference_path.empty()) throw Error(ErrorKind::config, "analyze needs --reference");
  const fs::path dir = cfg.out_dir;
  const auto ind = load_csv_column(dir / "indicator.csv", "indicator");
  const auto ref = load_reference_csv(cfg.reference_path);
  IndicatorSeries series{ind.values, IndicatorKind::jump, std::nullopt};
  const auto c = compare_to_reference(series, ind.dates, ref);
  nlohmann::json j = {{"indicator", (dir / "indicator.csv").string()},
                      {"reference", cfg.reference_path},
                      {"matched", c.dates.size()},
                      {"dropped_indicator_dates", c.dropped_indicator},
                      {"dropped_reference_dates", c.dropped_reference},
                      {"alignment", {{"a", c.aligned.alignment->a}, {"c", c.aligned.alignment->c}}},
                      {"score", c.score}};
  write_text_file(dir / "analysis.json", j.dump(2) + "\n");
  std::printf("score %.6g over %zu matched dates (a=%.6g, c=%.6g)\n", c.score, c.dates.size(),
              c.aligned.alignment->a, c.aligned.alignment->c);
  return 0;
}

int cmd_compare(const Flags& f) {
  RunConfig cfg = resolve(f);
  if (cfg.reference_path.empty()) throw Error(ErrorKind::config, "compare needs --reference");
  const fs::path dir = cfg.out_dir;
  cfg.model = ModelKind::jump;
  const auto jump = run_fit(cfg);
  export_results(jump, dir / "jump");
  cfg.model = ModelKind::stable;
  const auto stable = run_fit(cfg);
  export_results(stable, dir / "stable");
  const double sj = jump.comparison->score;
  const double sa = stable.comparison->score;
  nlohmann::json j = {{"reference", cfg.reference_path},
                      {"matched", jump.comparison->dates.size()},
                      {"score_jump", sj},
                      {"score_stable", sa},
                      {"jump_lower", sj < sa}};
  write_text_file(dir / "compare.json", j.dump(2) + "\n");
  std::printf("S^J = %.6g  S^alpha = %.6g  (%s)\n", sj, sa,
              sj < sa ? "jump model closer" : "stable model closer");
  return 0;
}

int cmd_verify(const Flags& f) {
  VerifyOptions opts;
  if (f.o.seed) opts.seed = *f.o.seed;
  if (f.o.data) opts.data_dir = fs::path(*f.o.data);
  if (f.o.out) opts.work_dir = *f.o.out;
  std::vector<int> ids = f.checks;
  if (ids.empty())
    for (int i = 1; i <= (f.all ? kCheckCount : kOracleCheckCount); ++i) ids.push_back(i);
  bool ok = true;
  for (int id : ids) {
    const auto r = run_check(id, opts);
    std::cout << format_result(r) << std::endl;
    ok = ok && r.pass;
  }
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian Markov-switching volatility models"};
  app.require_subcommand(1);
  Flags f;

  auto* fj = app.add_subcommand("fit-jump", "fit the Gaussian jump model");
  add_common(fj, f, false);
  auto* fs_ = app.add_subcommand("fit-stable", "fit the alpha-stable scale-mixture model");
  add_common(fs_, f, false);
  auto* sim = app.add_subcommand("simulate", "write a synthetic price series and its latent truth");
  add_common(sim, f, true);
  sim->add_option("--length", f.length, "number of returns");
  auto* an = app.add_subcommand("analyze", "align an exported indicator to a reference and score it");
  add_common(an, f, false);
  auto* cmp = app.add_subcommand("compare", "fit both models and compare their scores");
  add_common(cmp, f, false);
  auto* ver = app.add_subcommand("verify", "run the oracle self-checks");
  ver->add_option("--seed", f.o.seed, "RNG seed");
  ver->add_option("--data", f.o.data, "directory holding the bundled data");
  ver->add_option("--out", f.o.out, "scratch directory");
  ver->add_option("--check", f.checks, "check ids to run (default 1-6)");
  ver->add_flag("--all", f.all, "run every check, including the slow fits");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*fj) return cmd_fit(f, ModelKind::jump);
    if (*fs_) return cmd_fit(f, ModelKind::stable);
    if (*sim) return cmd_simulate(f);
    if (*an) return cmd_analyze(f);
    if (*cmp) return cmd_compare(f);
    if (*ver) return cmd_verify(f);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 3;
  }
  return 2;
}
