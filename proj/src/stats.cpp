#include "switchvol/stats.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/distributions/chi_squared.hpp>

#include "switchvol/error.hpp"

namespace switchvol {

double mean(std::span<const double> xs) {
  if (xs.empty()) throw Error(ErrorKind::domain, "mean of an empty sample");
  double acc = 0.0;
  for (double x : xs) acc += x;
  return acc / static_cast<double>(xs.size());
}

double variance(std::span<const double> xs) {
  if (xs.size() < 2) throw Error(ErrorKind::domain, "variance needs two values");
  const double m = mean(xs);
  double acc = 0.0;
  for (double x : xs) acc += (x - m) * (x - m);
  return acc / static_cast<double>(xs.size() - 1);
}

double standard_error(std::span<const double> xs) {
  return std::sqrt(variance(xs) / static_cast<double>(xs.size()));
}

double autocorrelation_time(std::span<const double> xs) {
  const std::size_t n = xs.size();
  if (n < 4) return 1.0;
  const double m = mean(xs);
  auto autocov = [&](std::size_t lag) {
    double acc = 0.0;
    for (std::size_t i = 0; i + lag < n; ++i) acc += (xs[i] - m) * (xs[i + lag] - m);
    return acc / static_cast<double>(n);
  };
  const double c0 = autocov(0);
  if (!(c0 > 0.0)) return 1.0;
  double tau = -1.0;
  for (std::size_t k = 0; 2 * k + 1 < n; ++k) {
    const double pair = (autocov(2 * k) + autocov(2 * k + 1)) / c0;
    if (pair <= 0.0) break;
    tau += 2.0 * pair;
  }
  return std::max(tau, 1.0);
}

double mcmc_standard_error(std::span<const double> xs) {
  return standard_error(xs) * std::sqrt(autocorrelation_time(xs));
}

double kolmogorov_q(double t) {
  if (t <= 0.0) return 1.0;
  if (t < 0.2) return 1.0;
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * t * t);
    sum += (k % 2 == 1 ? term : -term);
    if (term < 1e-16) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

namespace {

// Stephens' small-sample correction to the asymptotic statistic.
double ks_p_value(double d, double n_eff) {
  const double root = std::sqrt(n_eff);
  return kolmogorov_q((root + 0.12 + 0.11 / root) * d);
}

}  // namespace

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty())
    throw Error(ErrorKind::domain, "KS test needs non-empty samples");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == x) ++i;
    while (j < b.size() && b[j] == x) ++j;
    d = std::max(d, std::abs(i / na - j / nb));
  }
  return {d, ks_p_value(d, na * nb / (na + nb))};
}

KsResult ks_one_sample(std::vector<double> xs,
                       const std::function<double(double)>& cdf) {
  if (xs.empty()) throw Error(ErrorKind::domain, "KS test needs a sample");
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = cdf(xs[i]);
    d = std::max({d, (i + 1) / n - f, f - i / n});
  }
  return {d, ks_p_value(d, n)};
}

ChiSquareResult chi_square_gof(std::span<const double> observed,
                               std::span<const double> expected) {
  if (observed.size() != expected.size() || observed.empty())
    throw Error(ErrorKind::domain, "chi-square: count vectors differ in length");
  std::vector<double> obs;
  std::vector<double> exp;
  double o_acc = 0.0;
  double e_acc = 0.0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    o_acc += observed[i];
    e_acc += expected[i];
    if (e_acc >= 5.0) {
      obs.push_back(o_acc);
      exp.push_back(e_acc);
      o_acc = 0.0;
      e_acc = 0.0;
    }
  }
  if (e_acc > 0.0 || o_acc > 0.0) {
    if (exp.empty()) {
      obs.push_back(o_acc);
      exp.push_back(e_acc);
    } else {
      obs.back() += o_acc;
      exp.back() += e_acc;
    }
  }
  ChiSquareResult r;
  for (std::size_t i = 0; i < obs.size(); ++i) {
    const double d = obs[i] - exp[i];
    r.statistic += d * d / exp[i];
  }
  r.dof = static_cast<int>(obs.size()) - 1;
  if (r.dof < 1) return r;
  boost::math::chi_squared dist(r.dof);
  r.p_value = boost::math::cdf(boost::math::complement(dist, r.statistic));
  return r;
}

std::vector<double> histogram(std::span<const double> xs, double lo, double hi,
                              int bins) {
  if (bins < 1 || !(hi > lo))
    throw Error(ErrorKind::domain, "histogram: need bins >= 1 and hi > lo");
  std::vector<double> h(static_cast<std::size_t>(bins), 0.0);
  if (xs.empty()) return h;
  const double width = (hi - lo) / bins;
  for (double x : xs) {
    int k = static_cast<int>(std::floor((x - lo) / width));
    k = std::clamp(k, 0, bins - 1);
    h[static_cast<std::size_t>(k)] += 1.0;
  }
  for (double& v : h) v /= static_cast<double>(xs.size());
  return h;
}

double total_variation(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size())
    throw Error(ErrorKind::domain, "total variation: length mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) acc += std::abs(p[i] - q[i]);
  return 0.5 * acc;
}

double quantile(std::vector<double> xs, double q) {
  if (xs.empty()) throw Error(ErrorKind::domain, "quantile of an empty sample");
  std::sort(xs.begin(), xs.end());
  const double pos = q * static_cast<double>(xs.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, xs.size() - 1);
  const double w = pos - static_cast<double>(lo);
  return xs[lo] * (1.0 - w) + xs[hi] * w;
}

}  // namespace switchvol
