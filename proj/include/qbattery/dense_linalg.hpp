#pragma once

#include "qbattery/matrix.hpp"
#include "qbattery/tensor_core.hpp"

namespace qbattery {

/// Eigen-decomposition of a Hermitian matrix: ascending values, eigenvectors
/// as the columns of `vectors`.
struct HermitianEigen {
  RVector values;
  CMatrix vectors;
};

/// exp(scale * M) by scaling and squaring around a degree-13 Pade approximant.
/// Throws NumericRangeError when the result is not representable.
CMatrix matrix_exponential(const CMatrix& m, cplx scale = 1.0);
Operator matrix_exponential(const Operator& m, cplx scale);

/// Cyclic complex Jacobi. Requires ||M - M^dagger|| <= 1e-10 ||M||.
HermitianEigen hermitian_eig(const CMatrix& m);
inline HermitianEigen hermitian_eig(const Operator& m) { return hermitian_eig(m.matrix); }

/// Hessenberg reduction followed by single-shift complex QR (Wilkinson shift).
/// Throws ConvergenceError after 100*dim iterations.
CVector general_eigenvalues(const CMatrix& m);
inline CVector general_eigenvalues(const Operator& m) { return general_eigenvalues(m.matrix); }

/// True iff some eigenvalue cluster (single-linkage, pairwise gap < cluster_tol)
/// has geometric multiplicity below its size.
bool is_defective_at(const CMatrix& m, double cluster_tol);
inline bool is_defective_at(const Operator& m, double cluster_tol) {
  return is_defective_at(m.matrix, cluster_tol);
}

/// Numerical rank from column-pivoted Householder QR: number of |R_kk| > tol.
int numerical_rank(const CMatrix& m, double tol);

/// Solves A X = B by LU with partial pivoting.
CMatrix solve(const CMatrix& a, const CMatrix& b);

/// max |Im lambda| < 1e-8 * max(1, max |lambda|).
bool is_real_spectrum(const CVector& eigenvalues);
double max_imag(const CVector& eigenvalues);

}  // namespace qbattery
