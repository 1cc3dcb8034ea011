#pragma once

// Closed-form and quadrature evaluation of the bias and variance quantities
// of the two Combine constructions for scalar (K = 1) scenarios.
//
// Every quantity is assembled from four variance components of F(Y, S):
//
//   nominal_var      V[F(Y, nu)]
//   var_mean_given_y V[E[F(Y, S) | Y]]
//   mean_var_given_s E[V[F(Y, S) | S]]
//   var_mean_given_s V[E[F(Y, S) | S]]
//
// so that
//
//   psi    = nominal_var - var_mean_given_y       (current-construction bias)
//   phi    = mean_var_given_s - var_mean_given_y  (alternative-construction bias)
//   target = mean_var_given_s / J + var_mean_given_s  = V[mean_j F(Y_j, S)]

#include <cstddef>

#include "mcbias/error_models.hpp"
#include "mcbias/rng.hpp"

namespace mcbias {

/// Kernel, scalar data/error distributions and sample sizes.
struct ScalarScenario {
  ScalarKernel kernel = ScalarKernel::additive();
  DistSpec y_dist = DistSpec::normal1(0.0, 1.0);
  DistSpec s_dist = DistSpec::normal1(0.0, 1.0);
  std::size_t j = 2;
  std::size_t q = 1;

  /// J > 1, Q >= 1, both distributions scalar.
  void validate() const;
};

struct QuadratureOptions {
  /// Nodes per panel of the graded rule used for E[k(Y)] and V[k(Y)].
  std::size_t graded_order = 16;
  /// Geometric refinement levels toward the lower data endpoint.
  std::size_t graded_levels = 40;
  /// Gauss-Legendre order over the error range (smooth integrands).
  std::size_t error_order = 64;
  /// Gauss-Legendre order for smooth data integrals (phase, uniform Y).
  std::size_t smooth_order = 256;
};

struct VarianceComponents {
  double nominal_var = 0.0;
  double var_mean_given_y = 0.0;
  double mean_var_given_s = 0.0;
  double var_mean_given_s = 0.0;
};

/// True when the scenario's kernel/distribution pairing has a closed form
/// or quadrature route:
///   additive, multiplicative   any distributions
///   phase                      S ~ Unif(-delta, delta), Y two-point or uniform
///   exponential                Y ~ Unif[a, b] with 0 <= a < b,
///                              S ~ Unif[1 - alpha, 1 + alpha], 0 <= alpha <= 1
bool has_closed_form(const ScalarScenario& s);

/// Throws DomainError for unsupported pairings.
VarianceComponents variance_components(const ScalarScenario& s,
                                       const QuadratureOptions& opts = {});

double psi(const ScalarScenario& s);
double phi(const ScalarScenario& s);
double target_variance(const ScalarScenario& s);
/// (psi / J) / target. Throws DomainError when the target is zero.
double relbias_current(const ScalarScenario& s);
/// (phi / (J Q)) / target, which lies in [0, 1/Q].
double relbias_alternative(const ScalarScenario& s);
/// V[mean_q M^C_q] - V[mean_q M^A_q] = psi / (J Q) - phi / (J Q^2).
double mean_variance_gap(const ScalarScenario& s);

struct BiasReport {
  double psi = 0.0;
  double phi = 0.0;
  double target_var = 0.0;
  double relbias_current = 0.0;
  double relbias_alternative = 0.0;
  double mean_var_gap = 0.0;
};

BiasReport bias_report(const ScalarScenario& s);

/// Variance of the sample variance of N normal values with common variance
/// sigma2 around fixed means whose own sample variance is u2:
/// 2 sigma^4 / (N - 1) + 4 sigma^2 u^2 / (N - 1).
double var_of_sample_variance_normal(double sigma2, double u2, std::size_t n);

/// V[S^2 of the per-j replicate means] - V[S^2 of the nominals] for the
/// multiplicative kernel, from the data and error moments (zero for the
/// additive kernel). Other kernels throw DomainError.
double sample_variance_variance_gap(const ScalarScenario& s);

/// Large-Q approximation of V[S^2_{M^A}] - V[S^2_{M^C}]: the gap above
/// divided by J^2.
double vardiff_sample_variances(const ScalarScenario& s);

/// k(y) = E[y^S] for S ~ Unif[1 - alpha, 1 + alpha]:
/// y sinh(alpha ln y) / (alpha ln y), with a series near alpha ln y = 0.
double exponential_k(double y, double alpha);

struct KMoments {
  double mean = 0.0;
  double variance = 0.0;
};

/// Mean and variance of k(Y) for Y ~ Unif[a, b] by graded quadrature.
KMoments exponential_k_moments(double a, double b, double alpha,
                               const QuadratureOptions& opts = {});

/// Monte Carlo estimate with a standard error.
struct McValue {
  double value = 0.0;
  double std_error = 0.0;
};

struct McBiasTerms {
  McValue psi;
  McValue phi;
  McValue target;
  McValue relbias_current;
  McValue relbias_alternative;
  std::size_t draws = 0;
};

/// Brute-force Monte Carlo of psi, phi and the target variance for any
/// scalar scenario, including kernels without a closed form. Uses
/// Cov[F(Y,S), F(Y,S')] = V[E[F|Y]] and E[V[F|S]] = E[(F(Y,S) - F(Y',S))^2]/2
/// over independent (Y, Y', S, S') draws; standard errors come from `batches`
/// equal batches.
McBiasTerms estimate_bias_terms_mc(const ScalarScenario& s, std::size_t draws,
                                   RngStream& stream, std::size_t batches = 100);

}  // namespace mcbias
