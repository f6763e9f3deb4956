#include "switchvol/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "switchvol/error.hpp"
#include "switchvol/numeric.hpp"

namespace switchvol {
namespace {

using std::numbers::pi;

[[noreturn]] void domain_error(const std::string& what) {
  throw Error(ErrorKind::domain, what);
}

template <class F>
double gk_integrate(F&& f, double lo, double hi, double tol, double* err) {
  using boost::math::quadrature::gauss_kronrod;
  // Integrate over [0, 1]: the error estimate does not converge on very
  // narrow intervals such as the small-lambda peak.
  const double width = hi - lo;
  auto g = [&](double t) { return f(lo + width * t); };
  const double v = gauss_kronrod<double, 31>::integrate(g, 0.0, 1.0, 15, tol, err);
  if (err) *err *= width;
  return width * v;
}

}  // namespace

void SymGammaParams::validate() const {
  if (alpha < 1) domain_error("symmetric Gamma: alpha must be >= 1");
  if (!(beta > 0.0) || !std::isfinite(beta))
    domain_error("symmetric Gamma: beta must be > 0");
}

void StableParams::validate() const {
  if (!(alpha > 0.0 && alpha <= 2.0))
    domain_error("stable: alpha must lie in (0, 2]");
  if (!(std::abs(beta) <= 1.0)) domain_error("stable: |beta| must be <= 1");
  if (!(gamma > 0.0) || !std::isfinite(gamma))
    domain_error("stable: gamma must be > 0");
  if (!std::isfinite(mu)) domain_error("stable: mu must be finite");
}

void InvGammaParams::validate() const {
  if (!(shape > 0.0) || !std::isfinite(shape))
    domain_error("inverse Gamma: shape must be > 0");
  if (!(rate > 0.0) || !std::isfinite(rate))
    domain_error("inverse Gamma: rate must be > 0");
}

double InvGammaParams::mean() const {
  if (shape <= 1.0) domain_error("inverse Gamma: mean needs shape > 1");
  return rate / (shape - 1.0);
}

void FrechetParams::validate() const {
  if (!(shape > 0.0) || !std::isfinite(shape))
    domain_error("Frechet: shape must be > 0");
  if (!(scale > 0.0) || !std::isfinite(scale))
    domain_error("Frechet: scale must be > 0");
  if (!std::isfinite(location)) domain_error("Frechet: location must be finite");
}

void DirichletParams::validate() const {
  if (concentration.empty()) domain_error("Dirichlet: empty concentration");
  for (double c : concentration) {
    if (!(c > 0.0) || !std::isfinite(c))
      domain_error("Dirichlet: concentrations must be > 0");
  }
}

double normal_log_pdf(double x, double mean, double variance) {
  const double d = x - mean;
  return -0.5 * (kLogTwoPi + std::log(variance) + d * d / variance);
}

double poisson_log_pmf(int n, double mean) {
  if (n < 0) return kNegInf;
  if (mean <= 0.0) return n == 0 ? 0.0 : kNegInf;
  return n * std::log(mean) - mean - std::lgamma(n + 1.0);
}

// ---------------------------------------------------------------------------

double sym_gamma_log_pdf(double x, const SymGammaParams& p) {
  p.validate();
  const double ax = std::abs(x);
  if (ax == 0.0) {
    return p.alpha == 1 ? std::log(0.5 * p.beta) : kNegInf;
  }
  return p.alpha * std::log(p.beta) - std::log(2.0) - std::lgamma(p.alpha) +
         (p.alpha - 1) * std::log(ax) - p.beta * ax;
}

double sym_gamma_pdf(double x, const SymGammaParams& p) {
  return std::exp(sym_gamma_log_pdf(x, p));
}

double sym_gamma_variance(const SymGammaParams& p) {
  p.validate();
  return p.alpha * (p.alpha + 1.0) / (p.beta * p.beta);
}

double sym_gamma_sample(const SymGammaParams& p, Rng& rng) {
  p.validate();
  const double magnitude = gamma_draw(p.alpha, p.beta, rng);
  std::bernoulli_distribution sign(0.5);
  return sign(rng) ? magnitude : -magnitude;
}

// ---------------------------------------------------------------------------

double stable_sample(const StableParams& p, Rng& rng) {
  p.validate();
  const double v = pi * (uniform_open(rng) - 0.5);
  const double w = exponential(1.0, rng);
  const double a = p.alpha;

  if (a == 1.0) {
    const double half_pi = 0.5 * pi;
    const double shifted = half_pi + p.beta * v;
    const double x =
        (shifted * std::tan(v) -
         p.beta * std::log(half_pi * w * std::cos(v) / shifted)) /
        half_pi;
    return p.gamma * x + p.beta * p.gamma * std::log(p.gamma) / half_pi + p.mu;
  }

  const double zeta = -p.beta * std::tan(0.5 * pi * a);
  const double xi = std::atan(-zeta) / a;
  const double x = std::pow(1.0 + zeta * zeta, 0.5 / a) *
                   std::sin(a * (v + xi)) / std::pow(std::cos(v), 1.0 / a) *
                   std::pow(std::cos(v - a * (v + xi)) / w, (1.0 - a) / a);
  return p.gamma * x + p.mu;
}

namespace {

void check_mixing_alpha(double alpha) {
  if (!(alpha > 1.0 && alpha < 2.0))
    domain_error("positive stable mixing law: alpha must lie in (1, 2)");
}

// lambda = 2 Z where Z has Laplace transform exp(-s^a), a = alpha / 2.
// Zolotarev's function for Z:
//   A(phi) = sin(a phi)^{a/(1-a)} sin((1-a) phi) / sin(phi)^{1/(1-a)},
// kept as log A(0+) plus the excess D(phi) = log A(phi) - log A(0+). The
// density multiplies A by a constant as large as e^45 for small lambda, so
// D must not lose digits near phi = 0.
double log_sinc(double x) {
  if (std::abs(x) < 0.2) {
    const double x2 = x * x;
    return -x2 * (1.0 / 6 + x2 * (1.0 / 180 + x2 * (1.0 / 2835 + x2 * (1.0 / 37800 + x2 / 467775))));
  }
  return std::log(std::sin(x) / x);
}

double zolotarev_log_a0(double a) {
  return a / (1.0 - a) * std::log(a) + std::log(1.0 - a);
}

double zolotarev_excess(double phi, double a) {
  return a / (1.0 - a) * log_sinc(a * phi) + log_sinc((1.0 - a) * phi) -
         log_sinc(phi) / (1.0 - a);
}

}  // namespace

double positive_stable_sample(double alpha, Rng& rng) {
  check_mixing_alpha(alpha);
  const StableParams p{0.5 * alpha, 1.0,
                       2.0 * std::pow(std::cos(0.25 * pi * alpha), 2.0 / alpha),
                       0.0};
  for (;;) {
    const double x = stable_sample(p, rng);
    if (x > 0.0 && std::isfinite(x)) return x;
  }
}

namespace {

// Large-argument series for the density of Z with E e^{-sZ} = e^{-s^a}:
//   f(x) = (1/pi) sum_k (-1)^{k+1} Gamma(ak+1)/k! sin(pi a k) x^{-ak-1}.
// It converges for every x > 0 when a < 1; beyond kSeriesFrom the terms
// fall off fast enough that cancellation costs nothing.
constexpr double kSeriesFrom = 4.0;

double positive_stable_tail_log_pdf(double x, double a) {
  const long double lx = std::log(static_cast<long double>(x));
  long double sum = 0.0L;
  for (int k = 1; k <= 400; ++k) {
    const long double log_mag = std::lgamma(a * k + 1.0L) - std::lgamma(k + 1.0L) - (a * k + 1.0L) * lx;
    const long double term = std::exp(log_mag) * std::sin(static_cast<long double>(pi) * a * k);
    sum += (k % 2 == 1) ? term : -term;
    if (k > 3 && std::exp(log_mag) < 1e-19L * std::fabs(sum)) break;
  }
  if (!(sum > 0.0L)) return kNegInf;
  return static_cast<double>(std::log(sum) - std::log(static_cast<long double>(pi)));
}

}  // namespace

double positive_stable_log_pdf(double lambda, double alpha) {
  check_mixing_alpha(alpha);
  if (!(lambda > 0.0)) return kNegInf;
  if (std::isinf(lambda)) return kNegInf;
  const double a = 0.5 * alpha;
  const double x = 0.5 * lambda;
  if (x >= kSeriesFrom) return positive_stable_tail_log_pdf(x, a) - std::log(2.0);
  const double log_k = -a / (1.0 - a) * std::log(x);
  const double log_a0 = zolotarev_log_a0(a);
  const double k0 = std::exp(log_a0 + log_k);

  // The integrand e^{u - k e^u} with u = log A(phi) increases from phi = 0
  // while k A < 1 and then decays, so it is unimodal. Its log relative to
  // the peak is rel(phi). Bracket the region within e^-40 of the peak by
  // bisection; for small lambda it is a sliver next to phi = 0.
  auto bisect = [&](double lo, double hi, auto&& above) {
    for (int i = 0; i < 200 && hi - lo > 1e-15 * pi; ++i) {
      const double mid = 0.5 * (lo + hi);
      (above(mid) ? hi : lo) = mid;
    }
    return 0.5 * (lo + hi);
  };
  double peak_phi = 0.0;
  double peak = log_a0 - k0;
  if (k0 < 1.0) {
    peak_phi = bisect(0.0, pi, [&](double phi) { return zolotarev_excess(phi, a) >= -log_a0 - log_k; });
    peak = -log_k - 1.0;
  }
  auto rel = [&](double phi) {
    const double d = zolotarev_excess(phi, a);
    if (peak_phi == 0.0) return d - k0 * std::expm1(d);
    return log_a0 + d - k0 * std::exp(d) - peak;
  };
  constexpr double kDrop = 40.0;
  const double lo_phi = peak_phi == 0.0 ? 0.0 : bisect(0.0, peak_phi, [&](double phi) { return rel(phi) >= -kDrop; });
  const double hi_phi = bisect(peak_phi, pi, [&](double phi) { return rel(phi) < -kDrop; });

  auto scaled = [&](double phi) {
    const double v = rel(phi);
    return std::isfinite(v) ? std::exp(std::min(v, 0.0)) : 0.0;
  };
  double err = 0.0;
  double integral = 0.0;
  if (peak_phi > lo_phi) integral += gk_integrate(scaled, lo_phi, peak_phi, 1e-12, &err);
  integral += gk_integrate(scaled, peak_phi, hi_phi, 1e-12, &err);
  if (!(integral > 0.0)) return kNegInf;

  return std::log(a / (1.0 - a)) - std::log(x) / (1.0 - a) - std::log(pi) +
         peak + std::log(integral) - std::log(2.0);
}

double positive_stable_cdf(double lambda, double alpha) {
  check_mixing_alpha(alpha);
  if (!(lambda > 0.0)) return 0.0;
  if (std::isinf(lambda)) return 1.0;
  const double a = 0.5 * alpha;
  const double k0 = std::exp(zolotarev_log_a0(a) - a / (1.0 - a) * std::log(0.5 * lambda));
  auto integrand = [&](double phi) { return std::exp(-k0 * std::exp(zolotarev_excess(phi, a))); };
  double err = 0.0;
  return gk_integrate(integrand, 0.0, pi, 1e-12, &err) / pi;
}

// ---------------------------------------------------------------------------

double inv_gamma_sample(const InvGammaParams& p, Rng& rng) {
  p.validate();
  return 1.0 / gamma_draw(p.shape, p.rate, rng);
}

double inv_gamma_log_pdf(double x, const InvGammaParams& p) {
  p.validate();
  if (!(x > 0.0)) return kNegInf;
  return p.shape * std::log(p.rate) - std::lgamma(p.shape) -
         (p.shape + 1.0) * std::log(x) - p.rate / x;
}

double inv_gamma_pdf(double x, const InvGammaParams& p) {
  return std::exp(inv_gamma_log_pdf(x, p));
}

double frechet_log_pdf(double h_star, const FrechetParams& p) {
  p.validate();
  if (!(h_star > p.location)) return kNegInf;
  const double u = (h_star - p.location) / p.scale;
  return std::log(p.shape / p.scale) - (1.0 + p.shape) * std::log(u) -
         std::pow(u, -p.shape);
}

double frechet_pdf(double h_star, const FrechetParams& p) {
  return std::exp(frechet_log_pdf(h_star, p));
}

double frechet_sample(const FrechetParams& p, Rng& rng) {
  p.validate();
  for (;;) {
    const double e = exponential(1.0, rng);
    const double h = p.location + p.scale * std::pow(e, -1.0 / p.shape);
    if (h > p.location && std::isfinite(h)) return h;
  }
}

std::vector<double> dirichlet_sample(const DirichletParams& p, Rng& rng) {
  p.validate();
  std::vector<double> out(p.concentration.size());
  double total = 0.0;
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = gamma_draw(p.concentration[i], 1.0, rng);
    total += out[i];
  }
  if (!(total > 0.0)) {
    // Every gamma draw underflowed (tiny concentrations): fall back to the
    // Dirichlet mean rather than dividing by zero.
    double c = 0.0;
    for (double v : p.concentration) c += v;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = p.concentration[i] / c;
    return out;
  }
  for (double& v : out) v /= total;
  return out;
}

// ---------------------------------------------------------------------------
// Convolution by quadrature

namespace {

void check_convolution_args(double sigma, int n, double b) {
  if (n < 0) domain_error("convolution: jump count must be >= 0");
  if (!(sigma > 0.0) || !std::isfinite(sigma))
    domain_error("convolution: sigma must be > 0");
  if (!(b > 0.0) || !std::isfinite(b)) domain_error("convolution: b must be > 0");
}

}  // namespace

double jump_convolved_pdf(double z, double mu, double sigma, int n, double b) {
  check_convolution_args(sigma, n, b);
  const double a = z - mu;
  if (n == 0) return std::exp(normal_log_pdf(a, 0.0, sigma * sigma));

  const double log_norm = n * std::log(b) - std::lgamma(n) - std::log(2.0) -
                          std::log(sigma) - 0.5 * kLogTwoPi;
  const double gamma_mean = n / b;
  const double gamma_sd = std::sqrt(static_cast<double>(n)) / b;
  const double upper =
      std::max(gamma_mean + 12.0 * gamma_sd, std::abs(a) + 12.0 * sigma);

  // Integrand over the jump magnitude y >= 0 for the branch with sign s:
  // |y|^{n-1} e^{-b|y|} phi((a - s y) / sigma).
  auto branch = [&](double sign) {
    auto f = [&](double y) {
      if (y <= 0.0) return n == 1 ? std::exp(log_norm - 0.5 * a * a / (sigma * sigma)) : 0.0;
      const double r = (a - sign * y) / sigma;
      return std::exp(log_norm + (n - 1) * std::log(y) - b * y - 0.5 * r * r);
    };
    // Break points around the Gaussian centre keep each panel smooth and
    // unimodal enough for the adaptive rule.
    std::vector<double> cuts{0.0};
    const double centre = sign * a;
    for (double c : {centre - 8.0 * sigma, centre, centre + 8.0 * sigma}) {
      if (c > cuts.back() && c < upper) cuts.push_back(c);
    }
    cuts.push_back(upper);

    std::pair<double, double> sum{0.0, 0.0};
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
      double err = 0.0;
      sum.first += gk_integrate(f, cuts[i], cuts[i + 1], 1e-11, &err);
      sum.second += err;
    }
    return sum;
  };

  // The error budget is relative to the whole density, so a far-tail branch
  // that contributes nothing cannot fail on its own.
  const auto [up, up_err] = branch(1.0);
  const auto [down, down_err] = branch(-1.0);
  const double total = up + down;
  const double total_err = up_err + down_err;
  if (!std::isfinite(total) || total_err > 1e-9 * total + 1e-300) {
    std::ostringstream msg;
    msg << "convolution quadrature did not converge: z=" << z << " mu=" << mu
        << " sigma=" << sigma << " n=" << n << " b=" << b
        << " estimate=" << total << " error=" << total_err;
    throw Error(ErrorKind::numerical, msg.str());
  }
  return total;
}

// ---------------------------------------------------------------------------
// Convolution in closed form
//
// With y = sigma t, the positive-jump branch is
//   g(a) = b^n sigma^{n-1} e^{-s b sigma + (b sigma)^2 / 2} Hh_{n-1}(x) / sqrt(2 pi)
// where s = a / sigma, x = b sigma - s and
//   Hh_m(x) = (1/m!) int_0^inf t^m e^{-(t + x)^2 / 2} dt
// is the repeated erfc integral, obeying m Hh_m = Hh_{m-2} - x Hh_{m-1},
// Hh_{-1}(x) = e^{-x^2/2}, Hh_0(x) = sqrt(pi/2) erfc(x / sqrt 2).
// The negative-jump branch is g(-a) and the density is (g(a) + g(-a)) / 2.

namespace {

// Writes log Hh_m(x) for m = 0 .. out.size() - 1.
void log_hh_sequence(double x, std::span<double> out) {
  const std::size_t count = out.size();
  if (count == 0) return;

  // The companion solution (-1)^m Hh_m(-x) outgrows Hh_m(x) for x > 0 by
  // roughly exp(2 sqrt(2m) x), so forward recurrence is only safe for small x.
  const double forward_limit = 4.0 / std::sqrt(static_cast<double>(count));
  if (x <= forward_limit) {
    double prev = std::exp(-0.5 * x * x);
    double cur = std::sqrt(0.5 * pi) * std::erfc(x / std::numbers::sqrt2);
    double offset = 0.0;
    out[0] = std::log(cur);
    for (std::size_t m = 1; m < count; ++m) {
      const double next = (prev - x * cur) / static_cast<double>(m);
      prev = cur;
      cur = next;
      if (cur > 1e200) {
        prev /= cur;
        offset += std::log(cur);
        cur = 1.0;
      }
      out[m] = std::log(cur) + offset;
    }
    return;
  }

  // Hh_m(x) is the minimal solution here. Run the ratio recurrence
  // r_m = Hh_m / Hh_{m-1} backwards from a depth where the start value no
  // longer matters, anchoring on Hh_{-1} = e^{-x^2/2}.
  const double root = std::sqrt(static_cast<double>(count)) + 14.0 / x + 3.0;
  const std::size_t depth = static_cast<std::size_t>(root * root);
  double r = 0.0;
  std::vector<double> ratios(count);
  for (std::size_t m = depth; m-- > 0;) {
    r = 1.0 / (x + static_cast<double>(m + 1) * r);
    if (m < count) ratios[m] = r;
  }
  double acc = -0.5 * x * x;
  for (std::size_t m = 0; m < count; ++m) {
    acc += std::log(ratios[m]);
    out[m] = acc;
  }
}

// log g for jump counts 1 .. out.size(); out[k - 1] holds count k.
void log_branch_all(double s, double b_sigma, double log_b, double log_sigma,
                    std::span<double> out) {
  log_hh_sequence(b_sigma - s, out);
  const double base = -s * b_sigma + 0.5 * b_sigma * b_sigma - 0.5 * kLogTwoPi;
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double n = static_cast<double>(i + 1);
    out[i] += base + n * log_b + (n - 1.0) * log_sigma;
  }
}

}  // namespace

void jump_convolved_log_pdf_all(double z, double mu, double sigma, double b,
                                std::span<double> out) {
  check_convolution_args(sigma, 0, b);
  if (out.empty()) return;
  const double a = z - mu;
  out[0] = normal_log_pdf(a, 0.0, sigma * sigma);
  if (out.size() == 1) return;

  const std::size_t jumps = out.size() - 1;
  const double s = a / sigma;
  const double b_sigma = b * sigma;
  const double log_b = std::log(b);
  const double log_sigma = std::log(sigma);

  thread_local std::vector<double> pos;
  thread_local std::vector<double> neg;
  pos.resize(jumps);
  neg.resize(jumps);
  log_branch_all(s, b_sigma, log_b, log_sigma, pos);
  log_branch_all(-s, b_sigma, log_b, log_sigma, neg);
  for (std::size_t i = 0; i < jumps; ++i) {
    out[i + 1] = log_add(pos[i], neg[i]) - std::log(2.0);
  }
}

double jump_convolved_log_pdf(double z, double mu, double sigma, int n,
                              double b) {
  check_convolution_args(sigma, n, b);
  thread_local std::vector<double> buf;
  buf.resize(static_cast<std::size_t>(n) + 1);
  jump_convolved_log_pdf_all(z, mu, sigma, b, buf);
  return buf[static_cast<std::size_t>(n)];
}

}  // namespace switchvol
