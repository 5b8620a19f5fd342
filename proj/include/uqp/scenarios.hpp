#pragma once

#include <cstdint>
#include <vector>

#include "uqp/types.hpp"

namespace uqp {

/// Disturbance-model parameters for the three clutter covariance families
/// plus the target steering used when embedding them into a design problem.
struct ClutterParams {
    /// Correlation coefficient of the exponentially shaped model (case 1).
    double eta = 0.8;
    /// Sea-clutter correlation, land-clutter correlation and sea-clutter
    /// Doppler shift (case 2).
    double eta1 = 0.8;
    double eta2 = 0.9;
    double rho_doppler = 0.2;
    /// Discrete-scatterer count, per-scatterer power and thermal-noise level
    /// (case 3; scatterer Dopplers are (k-1)/2 for k = 1..n_c).
    int n_c = 10;
    double eta_k = 1e3;
    double noise_eta = 1e-2;
    /// Normalized target Doppler for the steering vector paired with these
    /// models; chosen away from the case-3 scatterer Dopplers.
    double target_doppler = 0.25;
    /// Normalized pulse repetition time.
    double t_r = 1.0;
};

struct RandomSpec {
    int n = 0;
    /// Number of random rank-one terms; the result has rank min(d, n).
    int d = 0;
    std::uint64_t seed = 1;
};

/// R = sum_{k=1}^{d} x_k x_k^H with i.i.d. standard complex-normal factors
/// from a seeded generator. Positive semidefinite by construction.
HermitianMatrix random_hermitian(const RandomSpec& spec);

/// Doppler steering vector: phases (0, 2*pi*nu, ..., 2*pi*(n-1)*nu).
PhaseVector steering(int n, double nu);

/// SNR-optimization matrix R = M^{-1} o (p p^H)^* for disturbance
/// covariance M and target steering p.
HermitianMatrix snr_matrix(const HermitianMatrix& m, const PhaseVector& p);

/// Doppler-estimation accuracy matrix R' = M^{-1} o (p p^H)^* o (u u^H)^*
/// with u = (0, j*2*pi*T_r, ..., j*2*pi*(n-1)*T_r); its first row and column
/// vanish.
HermitianMatrix crlb_matrix(const HermitianMatrix& m, const PhaseVector& p, double t_r);

/// Disturbance covariance for the selected model (1, 2 or 3) at size n.
HermitianMatrix clutter_case(int which, int n, const ClutterParams& params);

/// Bordered matrix [[Q^H Q, -Q^H y], [-y^H Q, 0]] of size (n+1): minimizing
/// its quadratic form over unimodular vectors and reading the first n phases
/// relative to the last solves min_s ||y - Q s||_2 over unimodular s.
HermitianMatrix ml_embedding(const ComplexMatrix& q, const std::vector<Complex>& y);

/// Matrix R = U Sigma U^H whose leading eigenspace is spanned by the given
/// unimodular vectors; requires sigma descending with the first k values
/// equal, so that every given vector attains the global optimum n*sigma_1.
HermitianMatrix theorem2_construct(const std::vector<PhaseVector>& vectors, const std::vector<double>& sigma);

/// Legendre symbol (k/p) in {-1, 0, 1} for an odd prime p, via Euler's
/// criterion.
int legendre(std::int64_t k, std::int64_t p);

/// Bjorck code of prime length p = 1 (mod 4):
/// b(k) = exp(j * legendre(k, p) * arccos(1/(1+sqrt(p)))).
PhaseVector bjorck(int p);

}  // namespace uqp
