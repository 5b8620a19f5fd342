#pragma once

#include <cstdint>
#include <functional>
#include <string>

#include "uqp/linalg.hpp"
#include "uqp/local.hpp"
#include "uqp/types.hpp"

namespace uqp {

struct MeritConfig {
    /// Decomposition residual target ||R' - (Q1+P1) o (s s^H)||_F.
    double eps0 = 1e-9;
    /// Initial alpha0 increment; 0 selects 0.1 * ||R||_F / n^2.
    double delta = 0.0;
    /// Bisection floor for the increment; 0 selects delta / 1024.
    double delta0 = 0.0;
    /// Cycle cap for each inner block-coordinate optimization.
    int max_outer = 5000;
    /// Independent random initializations; the best outcome is kept.
    int restarts = 1;
    std::uint64_t seed = 1;
    /// Settings for the power-iteration s-update inside each cycle.
    /// Inner s-step budget. The gain stop is disabled: near the fixed point
    /// surrogate gains sink under rounding noise long before the phases
    /// finish converging, so only phase movement is a meaningful stop.
    LocalConfig local{1e-12, 0.0, 100, false};
};

struct MeritReport {
    std::string method = "merit";
    int n = 0;
    /// s^H R s for the input matrix.
    double objective = 0.0;
    /// Sub-optimality certificate objective / (objective + alpha0 * n^2) for
    /// converged runs; for non-converged runs the certified ratio
    /// objective / upper_bound.
    double gamma = 1.0;
    double alpha0 = 0.0;
    /// Certified range for the optimum of the input problem.
    double lower_bound = 0.0;
    double upper_bound = 0.0;
    int outer_iterations = 0;
    bool converged = false;
    double residual_final = 0.0;
    PhaseVector s;
    std::uint64_t seed = 0;
    double elapsed_ms = 0.0;
    /// Residual after initialization and after every cycle.
    std::vector<double> residual_trace;
};

struct Bounds {
    double lower = 0.0;
    double upper = 0.0;
};

/// Certified optimum range from a decomposition R_s whose own maximizer is
/// s: with E = R' - R_s, the optimum of R' lies within
/// [s^H R_s s + n sigma_min(E), s^H R_s s + n sigma_max(E)].
Bounds suboptimality_bounds(const HermitianMatrix& r_prime, const HermitianMatrix& r_s, const PhaseVector& s);

struct SafeguardResult {
    HermitianMatrix loaded;
    double lambda = 0.0;
    /// ||R o (s s^H)^* - R1||_F at the time of the load.
    double eps0 = 0.0;
};

/// Diagonal load keeping the factors of the decomposition positive definite:
/// lambda = max(0, -sigma_min(R)) + eps0 + 1e-6 * (1 + ||R||_F), so an
/// already positive definite R is loaded by the mismatch and margin only.
SafeguardResult safeguard_load(const HermitianMatrix& r, const HermitianMatrix& r1, const PhaseVector& s);

/// Fixed-point ascent of s^H (R o R1^T) s (equivalently: descent of
/// ||R - R1 o (s s^H)||_F in s). Requires R o R1^T positive definite; a
/// degenerate phase read leaves s unchanged.
PhaseVector s_update(const HermitianMatrix& r, const HermitianMatrix& r1, const PhaseVector& s,
                     const LocalConfig& cfg);

/// Internal solver state threaded from the alpha0 = 0 stage into the
/// alpha0 > 0 stage.
struct MeritState {
    PhaseVector s;
    HermitianMatrix q1;
    HermitianMatrix p1;
    /// Input matrix plus the safeguard load (the matrix the decomposition
    /// actually runs on).
    HermitianMatrix r_work;
    double lambda = 0.0;
    double alpha0 = 0.0;
    double residual = 0.0;
    bool converged = false;
    int cycles = 0;
    std::vector<double> residual_trace;
    std::uint64_t seed = 0;
};

struct MeritDiagnostics {
    /// Cycles where keeping the incumbent Q1 beat the projection candidate
    /// (eigensolver rounding only).
    int q1_fallbacks = 0;
    int alpha_raises = 0;
    int restores = 0;
    /// Accepted extrapolation probes (each strictly lowered the residual).
    int probe_hits = 0;
    /// Largest residual increase across a cycle / across an alpha0 raise;
    /// both stay at rounding level by construction.
    double max_cycle_increase = 0.0;
    double max_raise_increase = 0.0;
};

struct MeritOutcome {
    MeritReport report;
    MeritState state;
    MeritDiagnostics diag;
};

/// Observer invoked after every cycle (diagnostics and tests).
using MeritObserver = std::function<void(const MeritState&)>;

/// Stage one: block-coordinate descent of ||R - (Q1+P1) o (s s^H)||_F from a
/// seeded random start. Stops at residual <= eps0, on stagnation, or at the
/// cycle cap.
MeritOutcome merit_zero(const HermitianMatrix& r, const MeritConfig& cfg, const MeritObserver& observer = {});

/// Stage two: when stage one stalls, grow alpha0 in R' = R + alpha0 s s^H by
/// delta until the decomposition closes, then bisect delta down to delta0.
MeritOutcome merit_positive(const HermitianMatrix& r, const MeritConfig& cfg, MeritState warm);

/// Full pipeline with restarts; the best outcome (objective, then gamma)
/// wins.
MeritOutcome merit_solve(const HermitianMatrix& r, const MeritConfig& cfg);

/// Serialize a report with the fixed key set {method, n, objective, gamma,
/// alpha0, lower_bound, upper_bound, outer_iterations, converged,
/// residual_final, s_phases, seed, elapsed_ms}. Certificate fields are null
/// for non-certifying methods (local, oracle).
std::string report_to_json(const MeritReport& report);

}  // namespace uqp
