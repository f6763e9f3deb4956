#include "switchvol/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

#include "json.hpp"
#include "switchvol/error.hpp"
#include "switchvol/numeric.hpp"
#include "switchvol/jump_model.hpp"
#include "switchvol/stable_model.hpp"

namespace switchvol {

namespace fs = std::filesystem;
using nlohmann::json;

const std::vector<double>& FitReport::estimate(const std::string& name) const {
  for (const auto& [key, values] : estimates)
    if (key == name) return values;
  throw Error(ErrorKind::domain, "no estimate named " + name);
}

std::vector<int> FitReport::argmax_states() const {
  std::vector<int> out(static_cast<std::size_t>(filtered.T));
  for (int t = 0; t < filtered.T; ++t) {
    const auto row = filtered.row(t);
    out[static_cast<std::size_t>(t)] =
        static_cast<int>(std::max_element(row.begin(), row.end()) - row.begin());
  }
  return out;
}

std::vector<std::string> synthetic_dates(std::size_t count) {
  using namespace std::chrono;
  std::vector<std::string> out;
  out.reserve(count);
  sys_days day = year{2000} / January / 3;
  char buf[16];
  for (std::size_t i = 0; i < count; ++i, day += days{7}) {
    const year_month_day ymd{day};
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
    out.emplace_back(buf);
  }
  return out;
}

namespace {

// Group observations by rank of |y - centre| into M equal bands and return
// their mean squares, forced to be increasing.
std::vector<double> banded_variances(std::span<const double> y, int M, double centre) {
  std::vector<std::size_t> order(y.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::abs(y[a] - centre) < std::abs(y[b] - centre);
  });
  std::vector<double> sum(static_cast<std::size_t>(M), 0.0);
  std::vector<double> cnt(static_cast<std::size_t>(M), 0.0);
  for (std::size_t r = 0; r < order.size(); ++r) {
    const auto band = std::min(r * static_cast<std::size_t>(M) / order.size(), static_cast<std::size_t>(M - 1));
    const double d = y[order[r]] - centre;
    sum[band] += d * d;
    cnt[band] += 1.0;
  }
  std::vector<double> var(static_cast<std::size_t>(M));
  for (std::size_t j = 0; j < var.size(); ++j) {
    var[j] = cnt[j] > 0 ? sum[j] / cnt[j] : 0.0;
    const double floor = j == 0 ? 1e-12 : var[j - 1] * 1.1;
    var[j] = std::max(var[j], floor);
  }
  return var;
}

// A few EM passes for a centred Gaussian scale mixture, started from the
// banded variances. Band variances are truncated and far too spread out.
std::vector<double> initial_variances(std::span<const double> y, int M, double centre) {
  auto var = banded_variances(y, M, centre);
  if (M == 1) return var;
  std::vector<double> w(static_cast<std::size_t>(M), 1.0 / M);
  std::vector<double> resp(static_cast<std::size_t>(M));
  for (int it = 0; it < 200; ++it) {
    std::vector<double> nk(static_cast<std::size_t>(M), 0.0);
    std::vector<double> sk(static_cast<std::size_t>(M), 0.0);
    for (double v : y) {
      const double d2 = (v - centre) * (v - centre);
      double mx = kNegInf;
      for (std::size_t j = 0; j < resp.size(); ++j) {
        resp[j] = std::log(w[j]) - 0.5 * std::log(var[j]) - 0.5 * d2 / var[j];
        mx = std::max(mx, resp[j]);
      }
      double z = 0.0;
      for (auto& r : resp) z += (r = std::exp(r - mx));
      for (std::size_t j = 0; j < resp.size(); ++j) {
        nk[j] += resp[j] / z;
        sk[j] += resp[j] / z * d2;
      }
    }
    for (std::size_t j = 0; j < var.size(); ++j) {
      // Keep every component alive; an emptied state keeps its variance.
      w[j] = std::max(nk[j] / static_cast<double>(y.size()), 1e-3);
      if (nk[j] > 1.0) var[j] = std::max(sk[j] / nk[j], 1e-12);
    }
  }
  std::sort(var.begin(), var.end());
  for (std::size_t j = 1; j < var.size(); ++j) var[j] = std::max(var[j], var[j - 1] * 1.1);
  return var;
}

std::vector<double> to_h_star(const std::vector<double>& var) {
  std::vector<double> h;
  for (std::size_t j = 1; j < var.size(); ++j) h.push_back(var[j] / var[j - 1]);
  return h;
}

InitialDistribution initial_distribution(const RunConfig& cfg) {
  return cfg.pi0.empty() ? InitialDistribution::uniform(cfg.states) : InitialDistribution{cfg.pi0};
}

// Accumulates everything the report needs from the retained draws.
struct Accumulator {
  int M = 0;
  std::size_t draws = 0;
  std::vector<double> P_sum, M_sum, dur_sum, filtered_sum;
  std::vector<std::string> names;
  std::vector<std::vector<double>> rows;

  Accumulator(int m, int T)
      : M(m),
        P_sum(static_cast<std::size_t>(m * m), 0.0),
        M_sum(static_cast<std::size_t>(m * m), 0.0),
        dur_sum(static_cast<std::size_t>(m), 0.0),
        filtered_sum(static_cast<std::size_t>(T * m), 0.0) {}

  void add(const TransitionMatrix& P, const StatePath& path, const FilteredProbs& f,
           const std::vector<std::pair<std::string, double>>& scalars) {
    ++draws;
    const auto counts = count_transitions(path, M);
    for (std::size_t k = 0; k < P_sum.size(); ++k) {
      P_sum[k] += P.flat()[k];
      M_sum[k] += static_cast<double>(counts.n[k]);
    }
    const auto d = expected_durations(P);
    for (std::size_t j = 0; j < dur_sum.size(); ++j) dur_sum[j] += d.durations[j];
    for (std::size_t k = 0; k < filtered_sum.size(); ++k) filtered_sum[k] += f.probs[k];
    if (names.empty())
      for (const auto& s : scalars) names.push_back(s.first);
    std::vector<double> row;
    row.reserve(scalars.size());
    for (const auto& s : scalars) row.push_back(s.second);
    rows.push_back(std::move(row));
  }

  void finish(FitReport& r, int T) const {
    const double n = static_cast<double>(draws);
    r.M = M;
    r.P_hat.resize(P_sum.size());
    r.M_hat.resize(M_sum.size());
    for (std::size_t k = 0; k < P_sum.size(); ++k) {
      r.P_hat[k] = P_sum[k] / n;
      r.M_hat[k] = M_sum[k] / n;
    }
    // Renormalize rows against accumulated rounding.
    for (int i = 0; i < M; ++i) {
      double s = 0.0;
      for (int j = 0; j < M; ++j) s += r.P_hat[static_cast<std::size_t>(i * M + j)];
      for (int j = 0; j < M; ++j) r.P_hat[static_cast<std::size_t>(i * M + j)] /= s;
    }
    r.durations_of_mean = expected_durations(TransitionMatrix(M, r.P_hat));
    r.durations_mean_of_draws.durations.resize(dur_sum.size());
    for (std::size_t j = 0; j < dur_sum.size(); ++j) r.durations_mean_of_draws.durations[j] = dur_sum[j] / n;
    r.filtered.T = T;
    r.filtered.M = M;
    r.filtered.probs.resize(filtered_sum.size());
    for (std::size_t k = 0; k < filtered_sum.size(); ++k) r.filtered.probs[k] = filtered_sum[k] / n;
    r.scalar_names = names;
    r.chain_rows = rows;

    std::vector<std::vector<std::pair<std::string, double>>> named;
    named.reserve(rows.size());
    for (const auto& row : rows) {
      std::vector<std::pair<std::string, double>> nr;
      for (std::size_t c = 0; c < row.size(); ++c) nr.emplace_back(names[c], row[c]);
      named.push_back(std::move(nr));
    }
    r.summary = summarize_scalars(named, r.acceptance);
  }

  double scalar_mean(const std::string& name) const {
    const auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end()) throw Error(ErrorKind::domain, "missing chain column " + name);
    const auto c = static_cast<std::size_t>(it - names.begin());
    double acc = 0.0;
    for (const auto& row : rows) acc += row[c];
    return acc / static_cast<double>(rows.size());
  }

  std::vector<double> column_mean(const std::string& prefix, int count, int first = 1) const {
    std::vector<double> out;
    for (int j = first; j < first + count; ++j) out.push_back(scalar_mean(prefix + "_" + std::to_string(j)));
    return out;
  }
};

void check_returns(const ReturnSeries& returns) {
  if (returns.size() < 2) throw Error(ErrorKind::config, "need at least two returns to fit");
  if (returns.dates.size() != returns.values.size())
    throw Error(ErrorKind::config, "return dates and values differ in length");
}

}  // namespace

FitReport fit_jump(const RunConfig& cfg_in, const ReturnSeries& returns) {
  check_returns(returns);
  RunConfig cfg = cfg_in;
  cfg.model = ModelKind::jump;
  cfg.validate();
  const int M = cfg.states;
  const int T = static_cast<int>(returns.size());

  JumpState init;
  auto& p = init.params;
  p.b = cfg.b;
  p.mu.assign(static_cast<std::size_t>(M), 0.0);
  double centre = 0.0;
  if (!cfg.jump.fix_mean_zero) {
    for (double y : returns.values) centre += y;
    centre /= T;
    p.mu.assign(static_cast<std::size_t>(M), centre);
  }
  const auto var = initial_variances(returns.values, M, centre);
  p.sigma1_sq = var[0];
  p.h_star = to_h_star(var);
  p.n_jumps.assign(static_cast<std::size_t>(M), 0);
  for (int j = 0; j < M; ++j)
    p.theta.push_back(0.5 * (cfg.jump.theta_lower(j) + cfg.jump.theta_upper(j)));
  init.P = TransitionMatrix::sticky(M, M == 1 ? 1.0 : 0.9);
  init.path.states.assign(static_cast<std::size_t>(T), 0);
  p.validate(&cfg.jump.u);

  JumpSampler sampler(returns.values, cfg.jump, initial_distribution(cfg));
  Rng rng = make_rng(cfg.seed());
  Accumulator acc(M, T);
  auto chain = run_chain(
      [&](JumpState& s, SweepContext& ctx) { sampler.sweep(s, ctx); }, init,
      cfg.sampler.iterations, cfg.sampler.burn_in, rng,
      [&](const JumpState& s, int) { acc.add(s.P, s.path, sampler.last_filtered(), s.scalars()); },
      false);

  FitReport r;
  r.config = cfg;
  r.returns = returns;
  r.acceptance = chain.acceptance;
  acc.finish(r, T);
  r.estimates = {{"mu", acc.column_mean("mu", M)},
                 {"sigma_sq", acc.column_mean("sigma_sq", M)},
                 {"h_star", acc.column_mean("h_star", M - 1, 2)},
                 {"theta", acc.column_mean("theta", M)},
                 {"n_jumps", acc.column_mean("n_jumps", M)}};
  r.indicator = indicator_jump(r.filtered, r.estimate("sigma_sq"), r.estimate("n_jumps"), cfg.b);
  return r;
}

FitReport fit_stable(const RunConfig& cfg_in, const ReturnSeries& returns) {
  check_returns(returns);
  RunConfig cfg = cfg_in;
  cfg.model = ModelKind::stable;
  cfg.validate();
  const int M = cfg.states;
  const int T = static_cast<int>(returns.size());

  StableState init;
  auto& p = init.params;
  p.alpha = cfg.alpha;
  double centre = 0.0;
  for (double y : returns.values) centre += y;
  centre /= T;
  if (cfg.stable.fix_mean_zero) centre = 0.0;
  p.mu.assign(static_cast<std::size_t>(M), centre);
  const auto var = initial_variances(returns.values, M, centre);
  p.lambda = 1.0;
  p.gamma1_sq = var[0];
  p.h_star = to_h_star(var);
  init.P = TransitionMatrix::sticky(M, M == 1 ? 1.0 : 0.9);
  init.path.states.assign(static_cast<std::size_t>(T), 0);
  p.validate(cfg.stable.lambda_floor);

  StableSampler sampler(returns.values, cfg.stable, initial_distribution(cfg));
  Rng rng = make_rng(cfg.seed());
  Accumulator acc(M, T);
  auto chain = run_chain(
      [&](StableState& s, SweepContext& ctx) { sampler.sweep(s, ctx); }, init,
      cfg.sampler.iterations, cfg.sampler.burn_in, rng,
      [&](const StableState& s, int) { acc.add(s.P, s.path, sampler.last_filtered(), s.scalars()); },
      false);

  FitReport r;
  r.config = cfg;
  r.returns = returns;
  r.acceptance = chain.acceptance;
  acc.finish(r, T);
  const double lam = acc.scalar_mean("lambda");
  r.estimates = {{"mu", acc.column_mean("mu", M)},
                 {"gamma_sq", acc.column_mean("gamma_sq", M)},
                 {"h_star", acc.column_mean("h_star", M - 1, 2)},
                 {"lambda", {lam}},
                 {"scale_sq", acc.column_mean("scale_sq", M)}};
  r.indicator = indicator_stable(r.filtered, lam, r.estimate("gamma_sq"));
  return r;
}

Comparison compare_to_reference(const IndicatorSeries& indicator,
                                const std::vector<std::string>& dates,
                                const DatedSeries& reference) {
  DatedSeries ind{dates, indicator.values, "indicator"};
  const auto joined = inner_join(ind, reference);
  if (joined.dates.size() < 2)
    throw Error(ErrorKind::config, "indicator and reference share fewer than two dates");
  Comparison c;
  c.dates = joined.dates;
  c.indicator = joined.left;
  c.reference = joined.right;
  c.dropped_indicator = joined.dropped_left;
  c.dropped_reference = joined.dropped_right;
  IndicatorSeries matched = indicator;
  matched.values = joined.left;
  c.aligned = affine_align(matched, joined.right);
  c.score = score(c.aligned.values, joined.right);
  return c;
}

FitReport run_fit(const RunConfig& cfg) {
  if (cfg.data_path.empty()) throw Error(ErrorKind::config, "no data file given (--data)");
  const auto prices = load_prices_csv(cfg.data_path);
  const auto returns = log_returns(prices);
  FitReport r = cfg.model == ModelKind::jump ? fit_jump(cfg, returns) : fit_stable(cfg, returns);
  if (!cfg.reference_path.empty()) {
    const auto ref = load_reference_csv(cfg.reference_path);
    r.comparison = compare_to_reference(r.indicator, r.returns.dates, ref);
  }
  return r;
}

namespace {

json matrix_json(const std::vector<double>& flat, int M) {
  json out = json::array();
  for (int i = 0; i < M; ++i) {
    json row = json::array();
    for (int j = 0; j < M; ++j) row.push_back(flat[static_cast<std::size_t>(i * M + j)]);
    out.push_back(row);
  }
  return out;
}

std::string csv_row(const std::vector<std::string>& cells) {
  std::string out;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out += ',';
    out += cells[i];
  }
  out += '\n';
  return out;
}

}  // namespace

void export_results(const FitReport& r, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir))
    throw Error(ErrorKind::io, "cannot create output directory " + dir.string());

  const int M = r.M;
  json s;
  s["model"] = model_name(r.config.model);
  s["states"] = M;
  s["observations"] = r.returns.size();
  s["data_source"] = r.returns.source;
  s["first_date"] = r.returns.dates.front();
  s["last_date"] = r.returns.dates.back();
  s["config"] = json::parse(config_to_json(r.config));
  s["retained_draws"] = r.chain_rows.size();

  json est = json::object();
  for (const auto& [name, values] : r.estimates) est[name] = values;
  s["estimates"] = est;
  s["P_hat"] = matrix_json(r.P_hat, M);
  s["M_hat"] = matrix_json(r.M_hat, M);
  s["durations"] = {{"of_mean_transition_matrix", r.durations_of_mean.durations},
                    {"mean_over_draws", r.durations_mean_of_draws.durations}};

  json acc = json::object();
  for (const auto& [name, c] : r.acceptance.counts())
    acc[name] = c.proposed ? static_cast<double>(c.accepted) / static_cast<double>(c.proposed) : 0.0;
  s["acceptance"] = acc;

  json params = json::array();
  for (const auto& p : r.summary) {
    json e = {{"name", p.name},
              {"mean", p.mean},
              {"sd", p.sd},
              {"histogram", {{"lo", p.hist_lo}, {"hi", p.hist_hi}, {"probs", p.histogram}}}};
    e["acceptance"] = p.acceptance ? json(*p.acceptance) : json(nullptr);
    params.push_back(e);
  }
  s["parameters"] = params;

  json ind = {{"kind", r.indicator.kind == IndicatorKind::jump ? "jump" : "stable"}};
  if (r.comparison) {
    const auto& c = *r.comparison;
    ind["reference"] = r.config.reference_path;
    ind["matched"] = c.dates.size();
    ind["dropped_indicator_dates"] = c.dropped_indicator;
    ind["dropped_reference_dates"] = c.dropped_reference;
    ind["alignment"] = {{"a", c.aligned.alignment->a}, {"c", c.aligned.alignment->c}};
    ind["score"] = c.score;
  }
  s["indicator"] = ind;
  write_text_file(dir / "summary.json", s.dump(2) + "\n");

  std::ostringstream chain;
  {
    std::vector<std::string> head{"draw"};
    head.insert(head.end(), r.scalar_names.begin(), r.scalar_names.end());
    chain << csv_row(head);
    for (std::size_t i = 0; i < r.chain_rows.size(); ++i) {
      std::vector<std::string> cells{std::to_string(i + 1)};
      for (double v : r.chain_rows[i]) cells.push_back(format_double(v));
      chain << csv_row(cells);
    }
  }
  write_text_file(dir / "chain.csv", chain.str());

  std::ostringstream indicator;
  {
    std::vector<std::string> head{"date", "return", "indicator"};
    if (r.comparison) {
      head.push_back("reference");
      head.push_back("aligned");
    }
    indicator << csv_row(head);
    std::size_t k = 0;
    for (std::size_t t = 0; t < r.returns.size(); ++t) {
      std::vector<std::string> cells{r.returns.dates[t], format_double(r.returns.values[t]),
                                     format_double(r.indicator.values[t])};
      if (r.comparison) {
        const auto& c = *r.comparison;
        if (k < c.dates.size() && c.dates[k] == r.returns.dates[t]) {
          cells.push_back(format_double(c.reference[k]));
          cells.push_back(format_double(c.aligned.values[k]));
          ++k;
        } else {
          cells.emplace_back();
          cells.emplace_back();
        }
      }
      indicator << csv_row(cells);
    }
  }
  write_text_file(dir / "indicator.csv", indicator.str());

  std::ostringstream filtered;
  {
    std::vector<std::string> head{"date"};
    for (int j = 1; j <= M; ++j) head.push_back("p_" + std::to_string(j));
    filtered << csv_row(head);
    for (int t = 0; t < r.filtered.T; ++t) {
      std::vector<std::string> cells{r.returns.dates[static_cast<std::size_t>(t)]};
      for (int j = 0; j < M; ++j) cells.push_back(format_double(r.filtered(t, j)));
      filtered << csv_row(cells);
    }
  }
  write_text_file(dir / "filtered.csv", filtered.str());
}

}  // namespace switchvol
