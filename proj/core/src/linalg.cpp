#include "mgdm/linalg.hpp"

#include <cmath>
#include <stdexcept>

namespace mgdm::linalg {

namespace {

void require_symmetric(const Eigen::MatrixXd& a, const char* what) {
  if (a.rows() != a.cols()) throw std::invalid_argument(
      std::string(what) + ": matrix is not square");
  if (a.rows() == 0)
    throw std::invalid_argument(std::string(what) + ": empty matrix");
  double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  double asym = (a - a.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-10 * scale)
    throw std::invalid_argument(std::string(what) + ": matrix not symmetric");
}

void require_hermitian(const Eigen::MatrixXcd& a, const char* what) {
  if (a.rows() != a.cols()) throw std::invalid_argument(
      std::string(what) + ": matrix is not square");
  if (a.rows() == 0)
    throw std::invalid_argument(std::string(what) + ": empty matrix");
  double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  double asym = (a - a.adjoint()).cwiseAbs().maxCoeff();
  if (asym > 1e-10 * scale)
    throw std::invalid_argument(std::string(what) + ": matrix not Hermitian");
}

void sign_normalize(Eigen::VectorXd& v) {
  Eigen::Index idx = 0;
  v.cwiseAbs().maxCoeff(&idx);
  if (v(idx) < 0.0) v = -v;
}

void phase_normalize(Eigen::VectorXcd& v) {
  Eigen::Index idx = 0;
  v.cwiseAbs().maxCoeff(&idx);
  double mag = std::abs(v(idx));
  if (mag > 0.0) v *= std::conj(v(idx)) / mag;
}

}  // namespace

GenerativeModel::GenerativeModel(const Eigen::MatrixXd& samples,
                                 double sigma_reg)
    : sigma_reg_(sigma_reg) {
  if (samples.rows() < 1 || samples.cols() < 1)
    throw std::invalid_argument("empirical_covariance: empty dataset");
  if (!samples.allFinite())
    throw std::invalid_argument(
        "empirical_covariance: dataset has non-finite entries");
  if (!(sigma_reg >= 0.0) || !std::isfinite(sigma_reg))
    throw std::invalid_argument("empirical_covariance: bad sigma_reg");

  const auto n = samples.rows();
  const auto d = samples.cols();
  const double s2 = sigma_reg * sigma_reg;

  sigma_hat_.noalias() = samples.transpose() * samples / double(n);
  sigma_hat_.diagonal().array() += s2;

  if (n < d) {
    // Rank n < d: eigendecompose the n x n Gram matrix instead of the d x d
    // covariance; the nonzero spectrum is the same and the eigenvectors lift
    // as X^T q / sqrt(n lambda).
    Eigen::MatrixXd gram = samples * samples.transpose() / double(n);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram);
    if (es.info() != Eigen::Success)
      throw std::runtime_error("eigendecomposition failed");
    const Eigen::VectorXd& lam = es.eigenvalues();  // ascending
    double lam_max = std::max(lam(n - 1), 0.0);
    double cutoff = lam_max * 1e-12;
    std::vector<int> kept;  // descending eigenvalue order
    for (int i = int(n) - 1; i >= 0; --i)
      if (lam(i) > cutoff && lam(i) > 0.0) kept.push_back(i);
    Eigen::MatrixXd v(d, kept.size());
    Eigen::VectorXd w(kept.size());
    for (size_t k = 0; k < kept.size(); ++k) {
      int i = kept[k];
      v.col(k).noalias() =
          samples.transpose() * es.eigenvectors().col(i) /
          std::sqrt(double(n) * lam(i));
      w(k) = std::sqrt(lam(i) + s2) - sigma_reg;
    }
    sqrt_sigma_hat_.noalias() = v * w.asDiagonal() * v.transpose();
    sqrt_sigma_hat_.diagonal().array() += sigma_reg;
    if (!kept.empty()) {
      top_.value = lam(kept[0]) + s2;
      top_.vector = v.col(0);
    } else {
      top_.value = s2;
      top_.vector = Eigen::VectorXd::Unit(d, 0);
    }
  } else {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sigma_hat_);
    if (es.info() != Eigen::Success)
      throw std::runtime_error("eigendecomposition failed");
    Eigen::VectorXd roots = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    sqrt_sigma_hat_.noalias() =
        es.eigenvectors() * roots.asDiagonal() * es.eigenvectors().transpose();
    top_.value = es.eigenvalues()(d - 1);
    top_.vector = es.eigenvectors().col(d - 1);
  }
  // Exact-symmetry projection without a d x d temporary.
  sqrt_sigma_hat_ = sqrt_sigma_hat_.selfadjointView<Eigen::Lower>();
  sign_normalize(top_.vector);
}

Eigen::VectorXd GenerativeModel::generate(const Eigen::VectorXd& latent) const {
  if (latent.size() != sigma_hat_.rows())
    throw std::invalid_argument("generate: latent has wrong dimension");
  return sqrt_sigma_hat_ * latent;
}

GenerativeModel empirical_covariance(const models::Dataset& dataset,
                                     double sigma_reg) {
  return GenerativeModel(dataset.samples, sigma_reg);
}

Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& a) {
  require_symmetric(a, "psd_sqrt");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("psd_sqrt: eigendecomposition failed");
  const Eigen::VectorXd& lam = es.eigenvalues();
  double lam_max = std::max(lam(lam.size() - 1), 0.0);
  double clamp_floor = -1e-10 * lam_max;
  if (lam(0) < clamp_floor)
    throw std::domain_error("psd_sqrt: matrix is not positive semidefinite");
  Eigen::VectorXd roots = lam.cwiseMax(0.0).cwiseSqrt();
  Eigen::MatrixXd root =
      es.eigenvectors() * roots.asDiagonal() * es.eigenvectors().transpose();
  return ((root + root.transpose()) * 0.5).eval();
}

EigenPair leading_eigenpair(const Eigen::MatrixXd& a) {
  require_symmetric(a, "leading_eigenpair");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("leading_eigenpair: eigendecomposition failed");
  EigenPair pair;
  pair.value = es.eigenvalues()(a.rows() - 1);
  pair.vector = es.eigenvectors().col(a.rows() - 1);
  sign_normalize(pair.vector);
  return pair;
}

ComplexEigenPair leading_eigenpair(const Eigen::MatrixXcd& a) {
  require_hermitian(a, "leading_eigenpair");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(a);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("leading_eigenpair: eigendecomposition failed");
  ComplexEigenPair pair;
  pair.value = es.eigenvalues()(a.rows() - 1);
  pair.vector = es.eigenvectors().col(a.rows() - 1);
  phase_normalize(pair.vector);
  return pair;
}

Eigen::MatrixXd correlation_matrix(const Eigen::MatrixXd& samples,
                                   bool center) {
  if (samples.rows() < 1 || samples.cols() < 1)
    throw std::invalid_argument("correlation_matrix: empty input");
  const double n = double(samples.rows());
  Eigen::MatrixXd x = samples;
  if (center) x.rowwise() -= samples.colwise().mean();
  Eigen::VectorXd m2 = x.colwise().squaredNorm().transpose() / n;
  if (m2.minCoeff() <= 1e-12)
    throw std::runtime_error("correlation_matrix: zero-variance column");
  Eigen::VectorXd inv = m2.cwiseSqrt().cwiseInverse();
  Eigen::MatrixXd rho = x.transpose() * x / n;
  rho = inv.asDiagonal() * rho * inv.asDiagonal();
  rho = ((rho + rho.transpose()) * 0.5).eval();
  rho.diagonal().setOnes();
  return rho;
}

Eigen::MatrixXcd correlation_matrix(const Eigen::MatrixXcd& samples,
                                    bool center) {
  if (samples.rows() < 1 || samples.cols() < 1)
    throw std::invalid_argument("correlation_matrix: empty input");
  const double n = double(samples.rows());
  Eigen::MatrixXcd x = samples;
  if (center) x.rowwise() -= samples.colwise().mean();
  Eigen::VectorXd m2 = x.cwiseAbs2().colwise().sum().real().transpose() / n;
  if (m2.minCoeff() <= 1e-12)
    throw std::runtime_error("correlation_matrix: zero-variance column");
  Eigen::VectorXd inv = m2.cwiseSqrt().cwiseInverse();
  Eigen::MatrixXcd rho = x.adjoint() * x / n;
  rho = inv.asDiagonal() * rho * inv.asDiagonal();
  rho = ((rho + rho.adjoint()) * 0.5).eval();
  rho.diagonal().setOnes();
  return rho;
}

double spectral_norm(const Eigen::MatrixXd& a) {
  require_symmetric(a, "spectral_norm");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("spectral_norm: eigendecomposition failed");
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace mgdm::linalg
