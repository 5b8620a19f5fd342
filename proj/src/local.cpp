#include "uqp/local.hpp"

#include <cmath>

#include "uqp/linalg.hpp"

namespace uqp {

PhaseVector power_step(const HermitianMatrix& r, const PhaseVector& s) {
    if (r.size() != s.size()) throw DimensionMismatch("power step: size mismatch");
    const std::vector<Complex> y = r.matvec(s.unit());
    return PhaseVector::from_complex(y, 1e-14);
}

LocalResult local_optimize(const HermitianMatrix& r, const PhaseVector& s0, const LocalConfig& cfg) {
    if (r.size() != s0.size()) throw DimensionMismatch("local optimize: size mismatch");
    const int n = r.size();
    const int max_iter = cfg.max_iterations > 0 ? cfg.max_iterations : 1000 * n;

    // The ascent argument needs sigma_min(R) > 0; load just past the deficit
    // when the input is not positive definite. The shift moves every
    // objective value by the same lambda * n, so the iterates are unchanged
    // and objectives can be reported for the input matrix.
    HermitianMatrix work = r;
    double load = 0.0;
    if (!cfg.assume_positive_definite) {
        const double smin = sigma_min(r);
        if (smin <= 0.0) {
            load = -smin + 1e-6 * (1.0 + r.frobenius_norm());
            work = diagonal_load(r, load);
        }
    }

    LocalResult res;
    res.s = s0;
    res.trace.applied_load = load;
    res.trace.objectives.push_back(quadratic_form(r, res.s));

    for (int it = 0; it < max_iter; ++it) {
        const PhaseVector next = power_step(work, res.s);
        res.trace.iterations = it + 1;
        res.trace.gap.push_back(phase_gap_sq(next, res.s));
        const double delta = max_phase_delta(next, res.s);
        res.s = next;
        const double obj = quadratic_form(r, res.s);
        const double gain = obj - res.trace.objectives.back();
        res.trace.objectives.push_back(obj);
        if (delta <= cfg.phase_tolerance ||
            (cfg.objective_tolerance > 0.0 && gain <= cfg.objective_tolerance * (1.0 + std::abs(obj)))) {
            res.trace.converged = true;
            break;
        }
    }
    return res;
}

bool is_hyper_point(const HermitianMatrix& r, const PhaseVector& s, double tol) {
    if (r.size() != s.size()) throw DimensionMismatch("hyper point check: size mismatch");
    const std::vector<Complex> y = r.matvec(s.unit());
    for (int k = 0; k < r.size(); ++k) {
        const Complex yk = y[static_cast<size_t>(k)];
        if (std::abs(yk) < 1e-14)
            throw DegeneratePhase("hyper point check: (R s)_k has (near-)zero modulus");
        if (std::abs(wrap_to_pi(std::arg(yk) - s.phase(k))) > tol) return false;
    }
    return true;
}

}  // namespace uqp
