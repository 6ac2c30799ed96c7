#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <string>

#include "mgdm/rng.hpp"

namespace mgdm::models {

// Ground truth N(0, I + beta u u^T): isotropic noise plus one planted
// direction u with signal-to-noise ratio beta.
struct SpikedModel {
  int d = 0;
  double beta = 0.0;
  Eigen::VectorXd spike;  // unit norm

  Eigen::MatrixXd population_covariance() const;
  // Closed form: sqrt(I + beta u u^T) = I + (sqrt(1+beta) - 1) u u^T.
  Eigen::MatrixXd population_sqrt() const;
};

// Ground truth with a power-law amplitude profile in an orthonormal basis F:
// Sigma* = F^T D (I + beta u u^T) D F with D = diag(amplitudes).
struct PowerLawModel {
  int d = 0;
  double alpha = 1.0;
  double beta = 0.0;
  Eigen::VectorXd spike;       // unit norm, in basis coordinates
  Eigen::MatrixXd basis;       // F, d x d orthogonal
  Eigen::VectorXd amplitudes;  // sigma_k ~ k^-alpha, sum of squares 1

  Eigen::MatrixXd population_covariance() const;
};

struct Dataset {
  Eigen::MatrixXd samples;  // n x d, rows are inputs
  std::string provenance;

  int n() const { return static_cast<int>(samples.rows()); }
  int d() const { return static_cast<int>(samples.cols()); }
};

// Spike direction drawn uniformly on the sphere (seeded), or supplied and
// normalised. Throws on beta < 0, non-finite beta, or a zero-norm vector.
SpikedModel make_spiked_model(int d, double beta, std::uint64_t spike_seed);
SpikedModel make_spiked_model(int d, double beta,
                              const Eigen::VectorXd& spike_direction);

// Amplitudes sigma_k proportional to k^-alpha, normalised so the sum of
// squares is exactly 1. Strictly decreasing and positive.
Eigen::VectorXd powerlaw_amplitudes(int d, double alpha);

enum class BasisChoice { haar, identity };

PowerLawModel make_powerlaw_model(int d, double alpha, double beta,
                                  BasisChoice basis_choice,
                                  std::uint64_t seed);
// Explicit-basis variant for constructed examples; basis must be orthogonal.
PowerLawModel make_powerlaw_model(int d, double alpha, double beta,
                                  const Eigen::MatrixXd& basis,
                                  const Eigen::VectorXd& spike_direction);

// n i.i.d. rows from N(0, Sigma*), deterministic given the seed. The spiked
// model applies its rank-one square root directly; the power-law model uses
// the factorisation x^T = z^T (I + alpha(beta) u u^T) D F.
Dataset sample_dataset(const SpikedModel& model, int n, std::uint64_t seed);
Dataset sample_dataset(const PowerLawModel& model, int n, std::uint64_t seed);

// Multiplies every Fourier coefficient by an independent uniform phase,
// preserving each entry's modulus exactly. Phases are drawn per sample and
// per coefficient in row-major order.
Eigen::MatrixXcd phase_randomize(const Eigen::MatrixXcd& fourier,
                                 std::uint64_t seed);

}  // namespace mgdm::models
