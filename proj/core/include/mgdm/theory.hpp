#pragma once

#include <cstdint>
#include <functional>
#include <optional>

namespace mgdm::theory {

/// Marchenko-Pastur law at aspect ratio gamma = n/d: bulk support
/// [lambda_minus, lambda_plus] plus a point mass at zero when gamma < 1.
struct MPLaw {
  double gamma = 0.0;
  double lambda_minus = 0.0;
  double lambda_plus = 0.0;
  double atom_mass = 0.0;
};

MPLaw mp_law(double gamma);

/// Bulk density gamma * sqrt((lambda_plus - x)(x - lambda_minus)) / (2 pi x);
/// zero outside the bulk. The atom at zero is not included.
double mp_density(double x, double gamma);

/// E[f(lambda + sigma_reg^2)] with lambda Marchenko-Pastur distributed,
/// atom included. Adaptive quadrature on the trig-substituted bulk to
/// absolute tolerance 1e-9. Throws if the atom is present and f is
/// non-finite at the atom (the sigma=0, gamma<1 divergence).
double mp_expectation(const std::function<double(double)>& f, double gamma,
                      double sigma_reg);

/// Asymptotic convergence overlap (E sqrt(lambda + sigma^2))^2 / (1 + sigma^2).
double q_analytical(double gamma, double sigma_reg);

/// Asymptotic memorisation overlap sqrt(2 log n / (n (1 + sigma^2))).
/// Requires n >= 2.
double m_asymptotic(std::int64_t n, double sigma_reg);

/// BBP spike recovery: critical load gamma_c = beta^-2 and overlap delta
/// between the top sample eigenvector and the planted spike. q_theory is
/// delta^2, the predicted subspace overlap. beta = 0 is reported via
/// no_spike with delta = 0 rather than an error.
struct BBPResult {
  double gamma_c = 0.0;
  double delta = 0.0;
  double q_theory = 0.0;
  bool no_spike = false;
};

BBPResult bbp_overlap(double beta, double gamma);

/// nu = (lambda + sigma^2) / (1 + sigma^2); preserves E[nu] = 1.
double rescale_eigenvalue(double lambda, double sigma_reg);

/// Rescaled KL divergence between learnt and population Gaussians, with
/// closed-form bounds. upper_refined is the tighter gamma >= 1 variant and
/// is absent below gamma = 1. Requires sigma_reg > 0 or gamma >= 1;
/// otherwise the atom makes the divergence infinite and this throws.
struct KLResult {
  double d_exact = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  std::optional<double> upper_refined;
};

KLResult kl_divergence(double gamma, double sigma_reg);

/// Maximum-sliced distance between population and learnt covariances,
/// exact bulk/spike branches. lambda_spike is populated only at or above
/// the threshold beta >= 1 + gamma^{-1/2}.
struct MSResult {
  double lambda_bulk = 0.0;
  std::optional<double> lambda_spike;
  double beta_threshold = 0.0;
  double d_ms = 0.0;
};

MSResult ms_distance(double beta, double gamma);

/// Leading-order maximum-sliced distance as the subspace overlap Q -> 1:
/// (1/2) sqrt(beta (1 + beta)) sqrt(1 - Q).
double ms_asymptotic(double beta, double Q);

}  // namespace mgdm::theory
