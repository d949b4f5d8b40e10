#include "hyperot/bures.hpp"

#include <string>

namespace hyperot {

void require_spd(const Matrix& sigma, const char* what) {
  if (sigma.rows() != sigma.cols())
    throw DimensionError(std::string(what) + ": matrix is not square");
  if ((sigma - sigma.transpose()).cwiseAbs().maxCoeff() > 1e-12)
    throw NumericalError(std::string(what) + ": matrix is not symmetric");
  Eigen::SelfAdjointEigenSolver<Matrix> eig(sigma);
  if (eig.eigenvalues().minCoeff() <= 0.0)
    throw NumericalError(std::string(what) + ": matrix is not positive definite");
}

namespace {

Matrix spd_power(const Matrix& sigma, double p) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (sigma + sigma.transpose()));
  Vector lam = eig.eigenvalues().cwiseMax(1e-12);
  Vector powered = lam.array().pow(p).matrix();
  return eig.eigenvectors() * powered.asDiagonal() * eig.eigenvectors().transpose();
}

}  // namespace

Matrix spd_sqrt(const Matrix& sigma) { return spd_power(sigma, 0.5); }
Matrix spd_inv_sqrt(const Matrix& sigma) { return spd_power(sigma, -0.5); }

Matrix bures_transport_matrix(const Matrix& sigma1, const Matrix& sigma2) {
  require_spd(sigma1, "bures_transport_matrix: sigma1");
  require_spd(sigma2, "bures_transport_matrix: sigma2");
  if (sigma1.rows() != sigma2.rows())
    throw DimensionError("bures_transport_matrix: covariance dimensions differ");
  const Matrix root = spd_sqrt(sigma1);
  const Matrix iroot = spd_inv_sqrt(sigma1);
  Matrix t = iroot * spd_sqrt(root * sigma2 * root) * iroot;
  return 0.5 * (t + t.transpose());
}

}  // namespace hyperot
