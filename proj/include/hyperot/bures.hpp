#ifndef HYPEROT_BURES_HPP
#define HYPEROT_BURES_HPP

#include "hyperot/ball.hpp"

namespace hyperot {

// Throws unless A is symmetric (1e-12) with strictly positive spectrum.
void require_spd(const Matrix& sigma, const char* what);

// Symmetric square root / inverse square root through the eigensystem,
// eigenvalues clamped at 1e-12 to absorb numerically semidefinite input.
Matrix spd_sqrt(const Matrix& sigma);
Matrix spd_inv_sqrt(const Matrix& sigma);

// T = S1^{-1/2} (S1^{1/2} S2 S1^{1/2})^{1/2} S1^{-1/2}: the SPD solution
// of the Riccati equation T S1 T = S2, i.e. the linear Monge map between
// centered Gaussians.
Matrix bures_transport_matrix(const Matrix& sigma1, const Matrix& sigma2);

}  // namespace hyperot

#endif  // HYPEROT_BURES_HPP
