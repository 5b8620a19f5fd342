#pragma once

#include "uqp/types.hpp"

namespace uqp {

/// Move a matrix between optimizer frames: R o (s0 s0^H) with
/// s0 = s1^* o s2, so membership "s1 globally optimal for R" maps to
/// "s2 globally optimal for the output".
HermitianMatrix transport(const HermitianMatrix& r, const PhaseVector& s1, const PhaseVector& s2);

/// Aligned-component matrix: entry (k,l) is |R(k,l)| cos(theta_kl - (phi_k - phi_l))
/// where the wrapped phase mismatch is strictly inside (-pi/2, pi/2), and 0
/// elsewhere. Real symmetric with nonnegative entries.
HermitianMatrix r_plus(const HermitianMatrix& r, const PhaseVector& s);

/// Smallest admissible floor for the flattening sequence: the largest
/// |R(k,l) cos(theta_kl - (phi_k - phi_l))| over entries outside the aligned
/// set (0 when the aligned set covers everything).
double rho_floor(const HermitianMatrix& r, const PhaseVector& s);

/// Two applications of the flattening update
/// R^(t+1) = R^(t) - (R_plus^(t) - rho * ones) o (s s^H).
struct ConeSequence {
    double rho = 0.0;
    PhaseVector s;
    /// R^(0), R^(1), R^(2).
    std::vector<HermitianMatrix> matrices;
    /// Aligned-set mask of R^(0) (row-major, true inside the set).
    std::vector<bool> theta_set;
};

/// Requires rho > rho_floor(R, s). By construction the update is idempotent
/// after two applications and R^(2) has s as an eigenvector with eigenvalue
/// n * rho when s is a fixed point of the power iteration on R.
ConeSequence cone_sequence(const HermitianMatrix& r, const PhaseVector& s, double rho);

/// Smallest rho making s the dominant eigenvector of R^(2): mu / n where mu
/// is the largest eigenvalue of R^(2) on the orthogonal complement of s.
double dominance_rho(const ConeSequence& seq);

/// Nearest matrix (Frobenius) of the form rho * I + P (R_Q - rho * I) P with
/// P = I - ones/n, over the admissible shifts rho >= rho_0: the projection
/// recipe for the dominant-eigenvector factor. Output satisfies
/// Q1 * ones = rho_star * ones and dominance of the all-ones direction.
/// Exact as a cone projection only while rho_0 <= H/n; project_q1_exact
/// removes that restriction.
HermitianMatrix project_q1(const HermitianMatrix& r_q);

/// Exact Frobenius projection onto the full dominant-ones cone
/// {Q : Q * ones = rho * ones, all other eigenvalues <= rho}. Splits R_Q
/// against the all-ones direction, clips the complementary eigenvalues at
/// rho, and water-fills rho between the ones-mean and the clipped mass.
/// Never farther from R_Q than project_q1.
HermitianMatrix project_q1_exact(const HermitianMatrix& r_q);

/// Exact projection onto the cone of real symmetric matrices with
/// nonnegative off-diagonal entries (diagonal unconstrained): keep
/// Re(R_P)(k,l) when nonnegative or on the diagonal, else 0.
HermitianMatrix project_p1(const HermitianMatrix& r_p);

}  // namespace uqp
