#include "switchvol/mcmc.hpp"

#include <algorithm>
#include <cmath>

#include "switchvol/numeric.hpp"

namespace switchvol {

Proposal random_walk_proposal() {
  Proposal p;
  p.draw = [](double current, double scale, Rng& rng) {
    return current + scale * standard_normal(rng);
  };
  p.log_density = [](double to, double from, double scale) {
    return normal_log_pdf(to, from, scale * scale);
  };
  return p;
}

Proposal log_scale_proposal(double lower) {
  Proposal p;
  p.draw = [lower](double current, double scale, Rng& rng) {
    return lower + (current - lower) * std::exp(scale * standard_normal(rng));
  };
  p.log_density = [lower](double to, double from, double scale) {
    if (!(to > lower) || !(from > lower)) return kNegInf;
    const double w = std::log(to - lower);
    return normal_log_pdf(w, std::log(from - lower), scale * scale) - w;
  };
  return p;
}

MhResult mh_step(double current, const MhKernel& kernel, Rng& rng) {
  return mh_step(current, kernel.log_target(current), kernel, rng);
}

MhResult mh_step(double current, double current_log_target,
                 const MhKernel& kernel, Rng& rng) {
  const double proposal = kernel.proposal.draw(current, kernel.step_scale, rng);
  // Draw the uniform unconditionally so the stream does not depend on
  // which branch is taken.
  const double u = uniform_open(rng);
  if (proposal == current) return {current, true, current_log_target};
  if (!std::isfinite(proposal)) return {current, false, current_log_target};

  const double proposed_log_target = kernel.log_target(proposal);
  if (!std::isfinite(proposed_log_target) || std::isnan(proposed_log_target))
    return {current, false, current_log_target};

  const double log_ratio =
      proposed_log_target - current_log_target +
      kernel.proposal.log_density(current, proposal, kernel.step_scale) -
      kernel.proposal.log_density(proposal, current, kernel.step_scale);
  if (std::isnan(log_ratio)) return {current, false, current_log_target};
  if (log_ratio >= 0.0 || std::log(u) < log_ratio)
    return {proposal, true, proposed_log_target};
  return {current, false, current_log_target};
}

// ---------------------------------------------------------------------------

void NormalNormalPosterior::validate() const {
  if (n < 0) throw Error(ErrorKind::domain, "normal-normal: n must be >= 0");
  if (!(sigma_sq > 0.0))
    throw Error(ErrorKind::domain, "normal-normal: sigma_sq must be > 0");
  if (!(k > 0.0)) throw Error(ErrorKind::domain, "normal-normal: k must be > 0");
}

double NormalNormalPosterior::mean() const {
  validate();
  return (n * ybar + mu0 * k * sigma_sq) / (n + k * sigma_sq);
}

double NormalNormalPosterior::variance() const {
  validate();
  return sigma_sq / (n + k * sigma_sq);
}

double normal_normal_update(const NormalNormalPosterior& p, Rng& rng) {
  return p.mean() + std::sqrt(p.variance()) * standard_normal(rng);
}

InvGammaParams inv_gamma_normal_posterior(double residual_sq_sum, int n,
                                          const InvGammaParams& prior) {
  prior.validate();
  if (n < 0 || !(residual_sq_sum >= 0.0))
    throw Error(ErrorKind::domain,
                "inverse Gamma-normal: need n >= 0 and a nonnegative sum");
  return {0.5 * n + prior.shape, 0.5 * residual_sq_sum + prior.rate};
}

double inv_gamma_normal_update(double residual_sq_sum, int n,
                               const InvGammaParams& prior, Rng& rng) {
  return inv_gamma_sample(inv_gamma_normal_posterior(residual_sq_sum, n, prior),
                          rng);
}

// ---------------------------------------------------------------------------

std::vector<ParamSummary> summarize_scalars(
    const std::vector<std::vector<std::pair<std::string, double>>>& rows,
    const AcceptanceTally& tally, int bins) {
  if (rows.empty()) throw Error(ErrorKind::domain, "summary of an empty chain");
  const std::size_t width = rows.front().size();
  std::vector<ParamSummary> out(width);
  for (std::size_t c = 0; c < width; ++c) {
    ParamSummary& s = out[c];
    s.name = rows.front()[c].first;
    double lo = rows.front()[c].second;
    double hi = lo;
    double acc = 0.0;
    for (const auto& r : rows) {
      const double v = r[c].second;
      acc += v;
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    const double n = static_cast<double>(rows.size());
    s.mean = acc / n;
    double ss = 0.0;
    for (const auto& r : rows) ss += (r[c].second - s.mean) * (r[c].second - s.mean);
    s.sd = rows.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;

    if (hi == lo) {
      lo -= 0.5;
      hi += 0.5;
    }
    s.hist_lo = lo;
    s.hist_hi = hi;
    s.histogram.assign(static_cast<std::size_t>(bins), 0.0);
    const double w = (hi - lo) / bins;
    for (const auto& r : rows) {
      int k = static_cast<int>((r[c].second - lo) / w);
      k = std::clamp(k, 0, bins - 1);
      s.histogram[static_cast<std::size_t>(k)] += 1.0 / n;
    }
    s.acceptance = tally.rate(s.name);
  }
  return out;
}

}  // namespace switchvol
