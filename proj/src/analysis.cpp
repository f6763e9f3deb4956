#include "switchvol/analysis.hpp"

#include <cmath>
#include <string>

#include "switchvol/error.hpp"

namespace switchvol {

DurationReport expected_durations(const TransitionMatrix& P) {
  DurationReport r;
  for (int j = 0; j < P.size(); ++j) {
    const double stay = P(j, j);
    if (!(stay < 1.0))
      throw Error(ErrorKind::domain,
                  "state " + std::to_string(j + 1) + " is absorbing: infinite duration");
    r.durations.push_back(1.0 / (1.0 - stay));
  }
  return r;
}

DurationReport mean_draw_durations(std::span<const TransitionMatrix> draws) {
  if (draws.empty()) throw Error(ErrorKind::domain, "durations from an empty chain");
  DurationReport acc;
  acc.durations.assign(static_cast<std::size_t>(draws.front().size()), 0.0);
  for (const auto& P : draws) {
    const auto d = expected_durations(P);
    for (std::size_t j = 0; j < d.durations.size(); ++j) acc.durations[j] += d.durations[j];
  }
  for (double& v : acc.durations) v /= static_cast<double>(draws.size());
  return acc;
}

IndicatorSeries indicator_jump(const FilteredProbs& filtered,
                               std::span<const double> sigma_sq_hat,
                               std::span<const double> n_hat, double b) {
  const auto M = static_cast<std::size_t>(filtered.M);
  if (sigma_sq_hat.size() != M || n_hat.size() != M)
    throw Error(ErrorKind::domain, "indicator: parameter vectors differ from M");
  if (!(b > 0.0)) throw Error(ErrorKind::domain, "indicator: b must be > 0");
  std::vector<double> var(M);
  for (std::size_t j = 0; j < M; ++j)
    var[j] = sigma_sq_hat[j] + n_hat[j] * (n_hat[j] + 1.0) / (b * b);
  IndicatorSeries out;
  out.kind = IndicatorKind::jump;
  out.values.resize(static_cast<std::size_t>(filtered.T));
  for (int t = 0; t < filtered.T; ++t) {
    double acc = 0.0;
    for (std::size_t j = 0; j < M; ++j) acc += filtered(t, static_cast<int>(j)) * var[j];
    out.values[static_cast<std::size_t>(t)] = std::sqrt(acc);
  }
  return out;
}

IndicatorSeries indicator_stable(const FilteredProbs& filtered, double lambda_hat,
                                 std::span<const double> gamma_sq_hat) {
  const auto M = static_cast<std::size_t>(filtered.M);
  if (gamma_sq_hat.size() != M)
    throw Error(ErrorKind::domain, "indicator: parameter vector differs from M");
  if (!(lambda_hat > 0.0)) throw Error(ErrorKind::domain, "indicator: lambda must be > 0");
  IndicatorSeries out;
  out.kind = IndicatorKind::stable;
  out.values.resize(static_cast<std::size_t>(filtered.T));
  for (int t = 0; t < filtered.T; ++t) {
    double acc = 0.0;
    for (std::size_t j = 0; j < M; ++j) acc += filtered(t, static_cast<int>(j)) * gamma_sq_hat[j];
    out.values[static_cast<std::size_t>(t)] = std::sqrt(lambda_hat * acc);
  }
  return out;
}

IndicatorSeries affine_align(const IndicatorSeries& indicator,
                             std::span<const double> reference) {
  const auto& x = indicator.values;
  if (x.size() != reference.size())
    throw Error(ErrorKind::domain, "alignment: indicator and reference differ in length");
  if (x.size() < 2) throw Error(ErrorKind::domain, "alignment: need at least two points");
  const double n = static_cast<double>(x.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t t = 0; t < x.size(); ++t) {
    mx += x[t];
    my += reference[t];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t t = 0; t < x.size(); ++t) {
    sxx += (x[t] - mx) * (x[t] - mx);
    sxy += (x[t] - mx) * (reference[t] - my);
  }
  if (!(sxx > 1e-300 * n) || sxx <= 1e-24 * mx * mx * n)
    throw Error(ErrorKind::numerical, "alignment: indicator has zero variance");
  Alignment fit;
  fit.a = sxy / sxx;
  fit.c = my - fit.a * mx;
  IndicatorSeries out = indicator;
  for (double& v : out.values) v = fit.a * v + fit.c;
  out.alignment = fit;
  return out;
}

double score(std::span<const double> indicator, std::span<const double> reference) {
  if (indicator.size() != reference.size())
    throw Error(ErrorKind::domain, "score: series differ in length");
  double acc = 0.0;
  for (std::size_t t = 0; t < indicator.size(); ++t) {
    const double d = indicator[t] - reference[t];
    acc += d * d;
  }
  return acc;
}

}  // namespace switchvol
