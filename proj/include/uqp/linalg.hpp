#pragma once

#include "uqp/types.hpp"

namespace uqp {

/// Eigendecomposition of a Hermitian matrix: eigenvalues in descending order
/// with the matching orthonormal eigenvectors as columns.
struct EigenSystem {
    std::vector<double> values;
    ComplexMatrix vectors;
};

/// Full eigensystem H = V diag(values) V^H via cyclic Jacobi rotations.
/// Guarantees ||H v_i - values_i v_i||_2 <= 1e-9 * ||H||_F per pair and
/// ||V diag V^H - H||_F <= 1e-9 * (1 + ||H||_F).
EigenSystem hermitian_eig(const HermitianMatrix& h);

/// Largest eigenvalue.
double sigma_max(const HermitianMatrix& h);

/// Smallest eigenvalue.
double sigma_min(const HermitianMatrix& h);

/// Real value s^H R s of the quadratic form at a unit-modulus point.
double quadratic_form(const HermitianMatrix& r, const PhaseVector& s);

/// Elementwise (Hadamard) product.
ComplexMatrix hadamard(const ComplexMatrix& a, const ComplexMatrix& b);
HermitianMatrix hadamard(const HermitianMatrix& a, const HermitianMatrix& b);

/// A o B^T for Hermitian operands (entry (k,l) = A(k,l) * B(l,k)); the result
/// is Hermitian.
HermitianMatrix hadamard_transpose(const HermitianMatrix& a, const HermitianMatrix& b);

/// R + lambda * I. Shifts every unimodular objective value by lambda * n and
/// leaves the maximizer unchanged.
HermitianMatrix diagonal_load(const HermitianMatrix& r, double lambda);

/// || A - B ||_F.
double frobenius_distance(const HermitianMatrix& a, const HermitianMatrix& b);
double frobenius_distance(const ComplexMatrix& a, const ComplexMatrix& b);

/// Inverse of a nonsingular Hermitian matrix through its eigensystem.
/// Verifies || M M^{-1} - I ||_F <= 1e-9 * n and throws SingularMatrix when
/// the spectrum is numerically singular.
HermitianMatrix hermitian_inverse(const HermitianMatrix& m);

/// Orthonormal basis of the orthogonal complement of the (unit-norm)
/// direction u, returned as the columns of an n x (n-1) matrix.
ComplexMatrix orthonormal_complement(const std::vector<Complex>& u);

}  // namespace uqp
