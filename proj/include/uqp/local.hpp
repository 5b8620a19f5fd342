#pragma once

#include "uqp/types.hpp"

namespace uqp {

struct LocalConfig {
    /// Stop when every per-entry phase movement is below this (radians).
    double phase_tolerance = 1e-10;
    /// Stop when the objective gain falls below
    /// objective_tolerance * (1 + |objective|); nonpositive disables this
    /// stop (useful when the objective scale makes gains indistinguishable
    /// from rounding noise).
    double objective_tolerance = 1e-12;
    /// Iteration cap; 0 selects the default 1000 * n.
    int max_iterations = 0;
    /// Callers that construct the matrix as a product of positive definite
    /// factors may skip the internal spectrum check.
    bool assume_positive_definite = false;
};

struct LocalTrace {
    /// s^H R s at the starting point followed by the value after every
    /// iteration (monotonically nondecreasing for positive definite R).
    std::vector<double> objectives;
    /// ||s_{t+1} - s_t||_2^2 between consecutive iterates.
    std::vector<double> gap;
    /// Number of fixed-point applications performed.
    int iterations = 0;
    bool converged = false;
    /// Diagonal load applied internally to restore positive definiteness
    /// (0 when none was needed). Objectives are reported for the input R.
    double applied_load = 0.0;
};

struct LocalResult {
    PhaseVector s;
    LocalTrace trace;
};

/// One fixed-point application s -> e^{j arg(R s)}. Requires R positive
/// definite for the ascent guarantee; throws DegeneratePhase when any entry
/// of R s has modulus below 1e-14.
PhaseVector power_step(const HermitianMatrix& r, const PhaseVector& s);

/// Ascend s^H R s from s0 by repeated power steps until the phase movement
/// and objective gain tolerances are met. Indefinite inputs are diagonally
/// loaded internally (maximizer unchanged); reported objectives always refer
/// to the input matrix.
LocalResult local_optimize(const HermitianMatrix& r, const PhaseVector& s0, const LocalConfig& cfg = {});

/// Whether arg((R s)_k) == phi_k for all k within tol (a fixed point of the
/// iteration).
bool is_hyper_point(const HermitianMatrix& r, const PhaseVector& s, double tol = 1e-8);

}  // namespace uqp
