#include "mgdm/models.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <stdexcept>

namespace mgdm::models {

namespace {

void check_model_args(int d, double beta) {
  if (d < 1) throw std::invalid_argument("model dimension must be >= 1");
  if (!std::isfinite(beta) || beta < 0.0)
    throw std::invalid_argument("beta must be finite and >= 0");
}

std::string describe(const char* kind, int d, double beta, int n,
                     std::uint64_t seed) {
  char buf[128];
  std::snprintf(buf, sizeof(buf), "%s(d=%d,beta=%g,n=%d,seed=%llu)", kind, d,
                beta, n, static_cast<unsigned long long>(seed));
  return buf;
}

// alpha(beta) = sqrt(1+beta) - 1, the rank-one square-root coefficient.
double sqrt_coeff(double beta) { return std::sqrt(1.0 + beta) - 1.0; }

}  // namespace

Eigen::MatrixXd SpikedModel::population_covariance() const {
  Eigen::MatrixXd cov = Eigen::MatrixXd::Identity(d, d);
  cov.noalias() += beta * spike * spike.transpose();
  return cov;
}

Eigen::MatrixXd SpikedModel::population_sqrt() const {
  Eigen::MatrixXd root = Eigen::MatrixXd::Identity(d, d);
  root.noalias() += sqrt_coeff(beta) * spike * spike.transpose();
  return root;
}

Eigen::MatrixXd PowerLawModel::population_covariance() const {
  // Sigma* = M^T M + beta w w^T with M = D F and w = F^T (sigma .* u).
  Eigen::MatrixXd m = amplitudes.asDiagonal() * basis;
  Eigen::MatrixXd cov = m.transpose() * m;
  Eigen::VectorXd w = basis.transpose() * amplitudes.cwiseProduct(spike);
  cov.noalias() += beta * w * w.transpose();
  return cov;
}

SpikedModel make_spiked_model(int d, double beta, std::uint64_t spike_seed) {
  check_model_args(d, beta);
  rng::Stream stream(spike_seed, {0});
  return SpikedModel{d, beta, rng::sphere_point(d, stream)};
}

SpikedModel make_spiked_model(int d, double beta,
                              const Eigen::VectorXd& spike_direction) {
  check_model_args(d, beta);
  if (spike_direction.size() != d)
    throw std::invalid_argument("spike direction has wrong dimension");
  double norm = spike_direction.norm();
  if (norm == 0.0 || !std::isfinite(norm))
    throw std::invalid_argument("spike direction must have positive norm");
  return SpikedModel{d, beta, spike_direction / norm};
}

Eigen::VectorXd powerlaw_amplitudes(int d, double alpha) {
  if (d < 1) throw std::invalid_argument("powerlaw_amplitudes: d must be >= 1");
  if (!(alpha > 0.0))
    throw std::invalid_argument("powerlaw_amplitudes: alpha must be > 0");
  Eigen::VectorXd sigma(d);
  for (int k = 0; k < d; ++k) sigma(k) = std::pow(double(k + 1), -alpha);
  return sigma / sigma.norm();
}

PowerLawModel make_powerlaw_model(int d, double alpha, double beta,
                                  BasisChoice basis_choice,
                                  std::uint64_t seed) {
  check_model_args(d, beta);
  Eigen::VectorXd sigma = powerlaw_amplitudes(d, alpha);
  rng::Stream spike_stream(seed, {0});
  Eigen::VectorXd u = rng::sphere_point(d, spike_stream);
  Eigen::MatrixXd f;
  if (basis_choice == BasisChoice::haar) {
    rng::Stream basis_stream(seed, {1});
    f = rng::haar_orthogonal(d, basis_stream);
  } else {
    f = Eigen::MatrixXd::Identity(d, d);
  }
  return PowerLawModel{d, alpha, beta, std::move(u), std::move(f),
                       std::move(sigma)};
}

PowerLawModel make_powerlaw_model(int d, double alpha, double beta,
                                  const Eigen::MatrixXd& basis,
                                  const Eigen::VectorXd& spike_direction) {
  check_model_args(d, beta);
  if (basis.rows() != d || basis.cols() != d)
    throw std::invalid_argument("basis has wrong shape");
  double ortho_err =
      (basis.transpose() * basis - Eigen::MatrixXd::Identity(d, d))
          .cwiseAbs()
          .maxCoeff();
  if (ortho_err > 1e-10)
    throw std::invalid_argument("basis is not orthogonal");
  double norm = spike_direction.norm();
  if (norm == 0.0 || !std::isfinite(norm))
    throw std::invalid_argument("spike direction must have positive norm");
  return PowerLawModel{d,     alpha, beta, spike_direction / norm,
                       basis, powerlaw_amplitudes(d, alpha)};
}

Dataset sample_dataset(const SpikedModel& model, int n, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("sample_dataset: n must be >= 1");
  rng::Stream stream(seed, {2});
  Eigen::MatrixXd x = stream.gaussian_matrix(n, model.d);
  if (model.beta > 0.0) {
    Eigen::VectorXd proj = x * model.spike;  // <u, z> per row
    x.noalias() += sqrt_coeff(model.beta) * proj * model.spike.transpose();
  }
  return Dataset{std::move(x),
                 describe("spiked", model.d, model.beta, n, seed)};
}

Dataset sample_dataset(const PowerLawModel& model, int n, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("sample_dataset: n must be >= 1");
  rng::Stream stream(seed, {2});
  Eigen::MatrixXd z = stream.gaussian_matrix(n, model.d);
  if (model.beta > 0.0) {
    Eigen::VectorXd proj = z * model.spike;
    z.noalias() += sqrt_coeff(model.beta) * proj * model.spike.transpose();
  }
  z = z.array().rowwise() * model.amplitudes.transpose().array();
  Eigen::MatrixXd x = z * model.basis;
  return Dataset{std::move(x),
                 describe("powerlaw", model.d, model.beta, n, seed)};
}

Eigen::MatrixXcd phase_randomize(const Eigen::MatrixXcd& fourier,
                                 std::uint64_t seed) {
  rng::Stream stream(seed, {3});
  Eigen::MatrixXcd out(fourier.rows(), fourier.cols());
  for (Eigen::Index i = 0; i < fourier.rows(); ++i) {
    for (Eigen::Index j = 0; j < fourier.cols(); ++j) {
      double theta = stream.uniform(-std::numbers::pi, std::numbers::pi);
      out(i, j) = fourier(i, j) * std::polar(1.0, theta);
    }
  }
  return out;
}

}  // namespace mgdm::models
