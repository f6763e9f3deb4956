#pragma once

// Densities and samplers for every distribution family used by the two
// regime models: symmetric Gamma jumps, alpha-stable laws (general and the
// totally skewed positive mixing law), inverse Gamma, shifted Frechet,
// Dirichlet, and the Normal + symmetric-Gamma convolution.

#include <span>
#include <vector>

#include "switchvol/random.hpp"

namespace switchvol {

/// Symmetric Gamma law: a Gamma(alpha, beta) magnitude (shape-rate) with an
/// independent fair sign. `alpha` is the jump count.
struct SymGammaParams {
  int alpha = 1;
  double beta = 1.0;

  void validate() const;
};

/// S_{alpha,beta}(gamma, mu) with the characteristic function
/// exp(-gamma^a |t|^a (1 - i beta sgn(t) tan(pi a / 2)) + i mu t), a != 1.
struct StableParams {
  double alpha = 2.0;
  double beta = 0.0;
  double gamma = 1.0;
  double mu = 0.0;

  void validate() const;
};

struct InvGammaParams {
  double shape = 1.0;
  double rate = 1.0;

  void validate() const;
  double mean() const;  // rate / (shape - 1), only for shape > 1
};

/// Frechet law shifted to live on (location, inf); location is 1 for h*.
struct FrechetParams {
  double location = 1.0;
  double shape = 2.0;
  double scale = 0.5;

  void validate() const;
};

struct DirichletParams {
  std::vector<double> concentration;

  void validate() const;
};

// ---------------------------------------------------------------------------
// Elementary log densities

double normal_log_pdf(double x, double mean, double variance);
double poisson_log_pmf(int n, double mean);

// ---------------------------------------------------------------------------
// Symmetric Gamma

double sym_gamma_pdf(double x, const SymGammaParams& p);
double sym_gamma_log_pdf(double x, const SymGammaParams& p);
double sym_gamma_variance(const SymGammaParams& p);
double sym_gamma_sample(const SymGammaParams& p, Rng& rng);

// ---------------------------------------------------------------------------
// Stable laws

/// Chambers-Mallows-Stuck draw.
double stable_sample(const StableParams& p, Rng& rng);

/// Draw of the variance-mixing variable lambda for a symmetric alpha-stable
/// law written as a Gaussian scale mixture:
///   lambda ~ S_{alpha/2, 1}(2 cos(pi alpha / 4)^{2/alpha}, 0),
///   y | lambda ~ N(mu, lambda gamma^2)  =>  y ~ S_{alpha,0}(gamma, mu).
/// Requires 1 < alpha < 2. The result is strictly positive.
double positive_stable_sample(double alpha, Rng& rng);

/// Log density of the mixing law above, evaluated through Zolotarev's
/// integral representation. Returns -inf where the density underflows.
double positive_stable_log_pdf(double lambda, double alpha);

/// Distribution function of the mixing law (Kanter's representation).
double positive_stable_cdf(double lambda, double alpha);

// ---------------------------------------------------------------------------
// Inverse Gamma, Frechet, Dirichlet

double inv_gamma_sample(const InvGammaParams& p, Rng& rng);
double inv_gamma_pdf(double x, const InvGammaParams& p);
double inv_gamma_log_pdf(double x, const InvGammaParams& p);

double frechet_pdf(double h_star, const FrechetParams& p);
double frechet_log_pdf(double h_star, const FrechetParams& p);
double frechet_sample(const FrechetParams& p, Rng& rng);

std::vector<double> dirichlet_sample(const DirichletParams& p, Rng& rng);

// ---------------------------------------------------------------------------
// Normal + symmetric Gamma convolution

/// Density of N(mu, sigma^2) + symGamma(n, b) by adaptive Gauss-Kronrod
/// quadrature, split at the kink y = 0. Throws a numerical Error when the
/// quadrature does not reach its tolerance.
double jump_convolved_pdf(double z, double mu, double sigma, int n, double b);

/// The same density in closed form: each signed branch reduces to a
/// repeated integral of the complementary error function, evaluated by
/// recurrence. n = 0 gives the plain Gaussian.
double jump_convolved_log_pdf(double z, double mu, double sigma, int n,
                              double b);

/// Fills out[k] with the log density for k jumps, k = 0 .. out.size() - 1.
/// One recurrence pass serves every k, so this costs about as much as a
/// single evaluation at k = out.size() - 1.
void jump_convolved_log_pdf_all(double z, double mu, double sigma, double b,
                                std::span<double> out);

}  // namespace switchvol
