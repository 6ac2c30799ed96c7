#pragma once

#include <Eigen/Dense>

#include "mgdm/models.hpp"

namespace mgdm::linalg {

// Sign-normalised eigenpair: the vector's largest-|component| entry is made
// positive (real case) or real-positive (complex case) so repeated runs give
// byte-identical output.
struct EigenPair {
  double value = 0.0;
  Eigen::VectorXd vector;
};

struct ComplexEigenPair {
  double value = 0.0;
  Eigen::VectorXcd vector;
};

// A trained generator: the regularised empirical covariance
// Sigma^ = (1/n) sum_mu x_mu x_mu^T + sigma^2 I (divisor n, no mean
// subtraction) together with its PSD square root, computed eagerly at
// construction. Sampling is x~(z) = sqrt(Sigma^) z. Immutable and safe to
// share across threads.
class GenerativeModel {
 public:
  GenerativeModel(const Eigen::MatrixXd& samples, double sigma_reg);

  int dim() const { return static_cast<int>(sigma_hat_.rows()); }
  double sigma_reg() const { return sigma_reg_; }
  const Eigen::MatrixXd& sigma_hat() const { return sigma_hat_; }
  const Eigen::MatrixXd& sqrt_sigma_hat() const { return sqrt_sigma_hat_; }
  // Leading eigenpair of sigma_hat, cached from construction.
  const EigenPair& top_eigenpair() const { return top_; }

  Eigen::VectorXd generate(const Eigen::VectorXd& latent) const;

 private:
  Eigen::MatrixXd sigma_hat_;
  Eigen::MatrixXd sqrt_sigma_hat_;
  double sigma_reg_;
  EigenPair top_;
};

GenerativeModel empirical_covariance(const models::Dataset& dataset,
                                     double sigma_reg);

// Symmetric PSD square root by eigendecomposition. Eigenvalues in
// [-1e-10 * lambda_max, 0) are clamped to 0; anything below that threshold
// signals a genuinely indefinite input and throws.
Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& a);

// Eigenpair with the maximal eigenvalue of a symmetric (resp. Hermitian)
// matrix, sign/phase normalised.
EigenPair leading_eigenpair(const Eigen::MatrixXd& a);
ComplexEigenPair leading_eigenpair(const Eigen::MatrixXcd& a);

// Correlation matrix rho_ij = S_ij / sqrt(S_ii S_jj) of the columns, where S
// is the second-moment matrix (after optional centering). Unit diagonal
// exactly; throws on a column with empirical second moment <= 1e-12.
Eigen::MatrixXd correlation_matrix(const Eigen::MatrixXd& samples,
                                   bool center);
Eigen::MatrixXcd correlation_matrix(const Eigen::MatrixXcd& samples,
                                    bool center);

// Operator norm of a symmetric matrix: max |eigenvalue|.
double spectral_norm(const Eigen::MatrixXd& a);

}  // namespace mgdm::linalg
