#pragma once

// Dense complex kernels used by the transceiver design: SVD, Hermitian EVD,
// PSD square roots, permutation matrices and the geometric mean
// decomposition.

#include <complex>
#include <cstddef>
#include <span>

#include <Eigen/Dense>

namespace mbthp {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

struct SvdFactors {
  CMatrix u;      // rows x rows, unitary
  RVector sigma;  // min(rows, cols) values, descending
  CMatrix v;      // cols x cols, unitary
};

struct HermitianEigen {
  CMatrix vectors;  // columns are eigenvectors
  RVector values;   // descending
};

// a = q * r * p^H with r upper triangular and constant real diagonal.
struct GmdFactors {
  CMatrix q;
  CMatrix r;
  CMatrix p;
};

/// Full SVD with singular values sorted descending. Each left singular
/// vector is rotated so that its largest-magnitude entry is real positive;
/// the matching right singular vector receives the same phase.
SvdFactors svd(const CMatrix& a);

/// Eigendecomposition of a Hermitian matrix, eigenvalues descending, ties
/// kept in original index order. Throws ContractViolation when `a` is not
/// Hermitian within 1e-10 relative.
HermitianEigen evd_hermitian(const CMatrix& a);

/// B = a^{-1/2} for Hermitian positive definite a. Throws
/// SingularMatrixError when the smallest eigenvalue is <= 1e-12 times the
/// largest.
CMatrix inv_sqrt_psd(const CMatrix& a);

/// Hermitian square root of a PSD matrix. Negative round-off eigenvalues are
/// clamped to zero so near-singular covariances still work.
CMatrix sqrt_psd(const CMatrix& a);

/// Geometric mean decomposition of a square full-rank matrix, built from
/// its SVD by a sequence of 2x2 Givens-type rotations.
GmdFactors gmd(const CMatrix& a);

/// Permutation matrix T with T(i, perm[i]) = 1, so (T s)_i = s[perm[i]].
CMatrix permutation_matrix(std::span<const std::size_t> perm);

/// Relative Frobenius distance ||a - b|| / max(||b||, tiny).
double relative_error(const CMatrix& a, const CMatrix& b);

bool is_unitary(const CMatrix& a, double tol);

}  // namespace mbthp
