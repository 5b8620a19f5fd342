#include "uqp/merit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include <json.hpp>

#include "uqp/cone.hpp"
#include "uqp/rng.hpp"

namespace uqp {

namespace {

HermitianMatrix all_ones(int n) {
    HermitianMatrix m(n);
    for (int k = 0; k < n; ++k) {
        for (int l = k; l < n; ++l) m.set(k, l, Complex{1.0, 0.0});
    }
    return m;
}

/// Block-coordinate engine shared by both stages. All cycles run on the
/// loaded matrix r_work; alpha0 enters through the demodulated frame, where
/// alpha0 * s s^H becomes alpha0 * ones.
class Engine {
  public:
    Engine(const MeritConfig& cfg, MeritState state, MeritObserver observer)
        : cfg_(cfg), state_(std::move(state)), observer_(std::move(observer)),
          ones_(all_ones(state_.s.size())),
          sigma_min_r_(sigma_min(state_.r_work) - state_.lambda),
          margin_(1e-6 * (1.0 + diagonal_load(state_.r_work, -state_.lambda).frobenius_norm())) {}

    /// One full cycle: Q1 step, P1 step, s step. The residual never
    /// increases: each step minimizes (or at least does not worsen) the same
    /// squared distance over its own block. Every few cycles a guarded
    /// extrapolation along the recent phase drift probes past the slow
    /// contraction modes; probes are kept only when they lower the residual.
    void cycle() {
        const HermitianMatrix rbar = demodulated_frame();
        update_q1(rbar);
        state_.p1 = project_p1(rbar - state_.q1);
        update_s();

        double res = current_residual();
        diag_.max_cycle_increase = std::max(diag_.max_cycle_increase, res - state_.residual);
        state_.residual = res;

        if (state_.cycles >= next_probe_) {
            if (!phase_window_.empty()) {
                const double before = res;
                res = probe_extrapolation();
                // Back off while probes stop paying: at a slow-converging
                // floor the 200-iteration polish would otherwise dominate
                // the per-cycle cost for nothing.
                if (res > before * (1.0 - 1e-3)) {
                    probe_stride_ = std::min(probe_stride_ * 2, 256);
                } else {
                    probe_stride_ = kProbeEvery;
                }
            }
            next_probe_ = state_.cycles + probe_stride_;
            phase_window_ = state_.s.phases();
        }
        reanchor_load();

        state_.residual_trace.push_back(res);
        ++state_.cycles;
        if (observer_) observer_(state_);
    }

    /// Shrinks the definiteness load to track the (monotone) residual. The
    /// load moves between r_work and the free diagonal of P1, so the
    /// residual is bit-for-bit unchanged while sigma_min(r_work) stays a
    /// factor above every future residual. An oversized load left in place
    /// would damp the s step's fixed-point iteration to a crawl.
    void reanchor_load() {
        const double target = -sigma_min_r_ + 2.0 * state_.residual + margin_;
        const double drop = state_.lambda - target;
        if (drop <= 0.25 * (std::abs(state_.lambda) + margin_)) return;
        state_.r_work = diagonal_load(state_.r_work, -drop);
        state_.p1 = diagonal_load(state_.p1, -drop);
        state_.lambda = target;
    }

    /// Runs cycles until the residual target, stagnation, or the cycle cap.
    /// Returns true when the target was reached. The stall threshold is far
    /// below any productive descent rate: a window gaining less than this
    /// would need ~1e7 windows per residual decade.
    bool solve_inner(int max_cycles) {
        constexpr int kWindow = 25;
        constexpr double kRelStall = 1e-8;
        // Hopeless-pace cutoff: closing even one residual decade at less
        // than kSlowGain progress per kSlowWindow cycles would take millions
        // of cycles, so such a tail is treated as a stall too.
        constexpr int kSlowWindow = 200;
        constexpr double kSlowGain = 1e-4;
        const std::size_t start = state_.residual_trace.size();
        for (int it = 0; it < max_cycles; ++it) {
            if (state_.residual <= cfg_.eps0) return true;
            cycle();
            const std::size_t len = state_.residual_trace.size() - start;
            if (len > kWindow) {
                const double before = state_.residual_trace[state_.residual_trace.size() - 1 - kWindow];
                const double now = state_.residual_trace.back();
                if (before - now <= kRelStall * before) break;
            }
            if (len > kSlowWindow) {
                const double before = state_.residual_trace[state_.residual_trace.size() - 1 - kSlowWindow];
                const double now = state_.residual_trace.back();
                if (before - now <= kSlowGain * before) break;
            }
        }
        return state_.residual <= cfg_.eps0;
    }

    /// Raises alpha0 by delta while keeping the frame residual unchanged:
    /// the extra alpha0 * ones is absorbed into Q1, which stays feasible
    /// because adding delta * ones only grows its dominant direction.
    void raise_alpha(double delta) {
        const double before = state_.residual;
        state_.alpha0 += delta;
        state_.q1 = state_.q1 + delta * ones_;
        const double after = current_residual();
        diag_.max_raise_increase = std::max(diag_.max_raise_increase, after - before);
        state_.residual = after;
        state_.residual_trace.push_back(after);
        probe_stride_ = kProbeEvery;
        next_probe_ = state_.cycles + probe_stride_;
        ++diag_.alpha_raises;
    }

    /// Drops back to a saved state after a successful raise, keeping the
    /// cumulative cycle count and residual history.
    void restore_keeping_history(const MeritState& saved) {
        std::vector<double> trace = std::move(state_.residual_trace);
        const int cycles = state_.cycles;
        state_ = saved;
        state_.residual_trace = std::move(trace);
        state_.residual_trace.push_back(state_.residual);
        state_.cycles = cycles;
        phase_window_.clear();  // drift across a restore is meaningless
        probe_stride_ = kProbeEvery;
        next_probe_ = state_.cycles + probe_stride_;
        ++diag_.restores;
    }

    double current_residual() const {
        return frobenius_distance(demodulated_frame(), state_.q1 + state_.p1);
    }

    MeritState& state() { return state_; }
    MeritDiagnostics& diag() { return diag_; }

  private:
    /// R_work o (s s^H)^* + alpha0 * ones: the decomposition target in the
    /// frame where s is flattened to all-ones.
    HermitianMatrix demodulated_frame() const {
        HermitianMatrix rbar = demodulate(state_.r_work, state_.s);
        if (state_.alpha0 != 0.0) rbar = rbar + state_.alpha0 * ones_;
        return rbar;
    }

    /// Q1 block: exact projection of the current gap onto the dominant-ones
    /// cone. The incumbent is kept as a guard against eigensolver rounding,
    /// so the residual is monotone unconditionally.
    void update_q1(const HermitianMatrix& rbar) {
        const HermitianMatrix rq = rbar - state_.p1;
        const HermitianMatrix projected = project_q1_exact(rq);
        const double d_projected = frobenius_distance(rq, projected);
        const double d_incumbent = frobenius_distance(rq, state_.q1);
        if (d_projected <= d_incumbent + 1e-12 * (1.0 + d_incumbent)) {
            state_.q1 = projected;
        } else {
            ++diag_.q1_fallbacks;
        }
    }

    /// Re-projects the factors in the frame of a candidate s and adopts the
    /// whole move when it strictly lowers the residual.
    bool try_candidate(PhaseVector sc) {
        HermitianMatrix rbar = demodulate(state_.r_work, sc);
        if (state_.alpha0 != 0.0) rbar = rbar + state_.alpha0 * ones_;
        const HermitianMatrix qc = project_q1_exact(rbar - state_.p1);
        const HermitianMatrix pc = project_p1(rbar - qc);
        const double res = frobenius_distance(rbar, qc + pc);
        if (res >= state_.residual * (1.0 - 1e-12)) return false;
        state_.s = std::move(sc);
        state_.q1 = qc;
        state_.p1 = pc;
        state_.residual = res;
        ++diag_.probe_hits;
        return true;
    }

    /// Guarded long-step candidates past the slow contraction modes: steps of
    /// increasing length along the phase drift accumulated since the last
    /// probe, plus the aligned fixed point of r_work itself (a decomposable
    /// frame forces every row sum real, which is exactly that fixed point;
    /// the block cycle approaches it only through a biased surrogate).
    double probe_extrapolation() {
        const int n = state_.s.size();
        std::vector<double> drift(static_cast<size_t>(n));
        bool moving = false;
        for (int k = 0; k < n; ++k) {
            drift[static_cast<size_t>(k)] = wrap_to_pi(state_.s.phase(k) - phase_window_[static_cast<size_t>(k)]);
            if (std::abs(drift[static_cast<size_t>(k)]) > 1e-15) moving = true;
        }
        if (moving) {
            for (const double t : {256.0, 64.0, 16.0, 4.0}) {
                std::vector<double> phases(static_cast<size_t>(n));
                for (int k = 0; k < n; ++k)
                    phases[static_cast<size_t>(k)] = state_.s.phase(k) + t * drift[static_cast<size_t>(k)];
                if (try_candidate(PhaseVector{std::move(phases)})) break;
            }
        }

        LocalConfig polish;
        polish.phase_tolerance = 1e-15;
        polish.objective_tolerance = 0.0;
        polish.max_iterations = 200;
        polish.assume_positive_definite = true;  // r_work is loaded PD
        try {
            const PhaseVector sp = local_optimize(state_.r_work, state_.s, polish).s;
            // The iteration contracts linearly; one Aitken shot along the
            // step direction usually lands the fixed point that plain
            // iteration would need thousands of steps to reach.
            const PhaseVector s1 = power_step(state_.r_work, sp);
            const PhaseVector s2 = power_step(state_.r_work, s1);
            const int n = state_.s.size();
            double n1 = 0.0, n2 = 0.0;
            std::vector<double> step(static_cast<size_t>(n));
            for (int k = 0; k < n; ++k) {
                const double d1 = wrap_to_pi(s1.phase(k) - sp.phase(k));
                const double d2 = wrap_to_pi(s2.phase(k) - s1.phase(k));
                step[static_cast<size_t>(k)] = d2;
                n1 += d1 * d1;
                n2 += d2 * d2;
            }
            bool hit = false;
            if (n2 > 0.0 && n2 < n1) {
                const double rho = std::sqrt(n2 / n1);
                const double gain = rho / (1.0 - rho);
                std::vector<double> phases(static_cast<size_t>(n));
                for (int k = 0; k < n; ++k)
                    phases[static_cast<size_t>(k)] = s2.phase(k) + gain * step[static_cast<size_t>(k)];
                hit = try_candidate(PhaseVector{std::move(phases)});
            }
            if (!hit) try_candidate(s2);
        } catch (const DegeneratePhase&) {
        }
        return state_.residual;
    }

    /// s block: minimizing the residual over s is maximizing
    /// s^H (R' o R1^T) s with R' = r_work + alpha0 s s^H. Folding alpha0 and
    /// a definiteness load lambda' into both factors leaves the objective's
    /// maximizer unchanged.
    void update_s() {
        const HermitianMatrix r1 = state_.q1 + state_.p1;
        if (state_.alpha0 == 0.0) {
            // r1 stays positive definite here: the load keeps
            // sigma_min(r_work) above the (monotone) residual.
            LocalConfig local = cfg_.local;
            local.assume_positive_definite = true;
            state_.s = s_update(state_.r_work, r1, state_.s, local);
            return;
        }
        const HermitianMatrix m1 = r1 - state_.alpha0 * ones_;
        const double lp = std::max(0.0, -sigma_min(m1)) + 1e-6 * (1.0 + m1.frobenius_norm());
        LocalConfig local = cfg_.local;
        local.assume_positive_definite = true;
        state_.s = s_update(diagonal_load(state_.r_work, lp), diagonal_load(m1, lp), state_.s, local);
    }

    static constexpr int kProbeEvery = 8;

    MeritConfig cfg_;
    MeritState state_;
    MeritDiagnostics diag_;
    MeritObserver observer_;
    HermitianMatrix ones_;
    double sigma_min_r_ = 0.0;
    double margin_ = 0.0;
    std::vector<double> phase_window_;
    int probe_stride_ = kProbeEvery;
    int next_probe_ = kProbeEvery;
};

/// Bounds, objective and certificate for the current state, mapped back to
/// the unloaded input problem.
MeritReport finalize_report(const HermitianMatrix& r, const MeritState& state) {
    const int n = r.size();
    MeritReport report;
    report.method = "merit";
    report.n = n;
    report.s = state.s;
    report.seed = state.seed;
    report.alpha0 = state.alpha0;
    report.converged = state.converged;
    report.outer_iterations = state.cycles;
    report.residual_final = state.residual;
    report.residual_trace = state.residual_trace;
    report.objective = quadratic_form(r, state.s);

    // The decomposition certifies the loaded problem; subtracting the load
    // from P1 keeps the factor's maximizer at s (diagonal terms do not move
    // the phase fixed point) and certifies R + alpha0 s s^H directly.
    const HermitianMatrix r_s = modulate(state.q1 + diagonal_load(state.p1, -state.lambda), state.s);
    const HermitianMatrix r_prime = r + state.alpha0 * phase_outer(state.s);
    const Bounds b = suboptimality_bounds(r_prime, r_s, state.s);
    const double shift = state.alpha0 * double(n) * double(n);
    report.lower_bound = b.lower - shift;
    report.upper_bound = b.upper;

    const double denom_converged = report.objective + shift;
    if (state.converged) {
        report.gamma = std::abs(denom_converged) < 1e-300 ? 1.0 : report.objective / denom_converged;
    } else {
        const double denom = std::max(denom_converged, report.upper_bound);
        report.gamma = std::abs(denom) < 1e-300 ? 0.0 : report.objective / denom;
    }
    return report;
}

}  // namespace

Bounds suboptimality_bounds(const HermitianMatrix& r_prime, const HermitianMatrix& r_s, const PhaseVector& s) {
    if (r_prime.size() != r_s.size() || r_prime.size() != s.size()) {
        throw DimensionMismatch("suboptimality_bounds: size mismatch");
    }
    const HermitianMatrix error = r_prime - r_s;
    const EigenSystem eig = hermitian_eig(error);
    const double value = quadratic_form(r_s, s);
    const double n = double(r_prime.size());
    return Bounds{value + n * eig.values.back(), value + n * eig.values.front()};
}

SafeguardResult safeguard_load(const HermitianMatrix& r, const HermitianMatrix& r1, const PhaseVector& s) {
    if (r.size() != r1.size() || r.size() != s.size()) {
        throw DimensionMismatch("safeguard_load: size mismatch");
    }
    SafeguardResult out;
    out.eps0 = frobenius_distance(demodulate(r, s), r1);
    out.lambda = std::max(0.0, -sigma_min(r)) + out.eps0 + 1e-6 * (1.0 + r.frobenius_norm());
    out.loaded = diagonal_load(r, out.lambda);
    return out;
}

PhaseVector s_update(const HermitianMatrix& r, const HermitianMatrix& r1, const PhaseVector& s,
                     const LocalConfig& cfg) {
    if (r.size() != r1.size() || r.size() != s.size()) {
        throw DimensionMismatch("s_update: size mismatch");
    }
    const HermitianMatrix m = hadamard_transpose(r, r1);
    try {
        PhaseVector next = local_optimize(m, s, cfg).s;
        // Rounding can nick the surrogate by an ulp; the contract is
        // "decreases the distance or leaves it unchanged", so keep the
        // incumbent unless the move genuinely paid.
        if (quadratic_form(m, next) < quadratic_form(m, s)) return s;
        return next;
    } catch (const DegeneratePhase&) {
        return s;  // no safe direction to read; keep the current point
    }
}

MeritOutcome merit_zero(const HermitianMatrix& r, const MeritConfig& cfg, const MeritObserver& observer) {
    const int n = r.size();
    if (n < 1) throw ValidationError("merit_zero: empty matrix");
    if (cfg.eps0 <= 0.0) throw ValidationError("merit_zero: eps0 must be positive");

    Rng rng(cfg.seed);
    MeritState state;
    state.seed = cfg.seed;
    state.s = random_phases(n, rng);
    state.q1 = HermitianMatrix::identity(n);
    state.p1 = HermitianMatrix::identity(n);

    const SafeguardResult guard = safeguard_load(r, state.q1 + state.p1, state.s);
    state.r_work = guard.loaded;
    state.lambda = guard.lambda;
    // Absorbing the load into P1 keeps the demodulated-frame residual at its
    // unloaded value, so sigma_min(r_work) = eps0 + margin exceeds every
    // later residual and both factors stay positive definite.
    state.p1 = diagonal_load(state.p1, guard.lambda);
    state.alpha0 = 0.0;

    Engine engine(cfg, std::move(state), observer);
    engine.state().residual = engine.current_residual();
    engine.state().residual_trace.push_back(engine.state().residual);

    engine.state().converged = engine.solve_inner(cfg.max_outer);

    MeritOutcome out;
    out.state = std::move(engine.state());
    out.diag = engine.diag();
    out.report = finalize_report(r, out.state);
    return out;
}

MeritOutcome merit_positive(const HermitianMatrix& r, const MeritConfig& cfg, MeritState warm) {
    const int n = r.size();
    if (n != warm.s.size()) throw DimensionMismatch("merit_positive: warm state size mismatch");

    MeritOutcome out;
    if (warm.converged) {  // nothing to lift; certificate is already exact
        out.state = std::move(warm);
        out.report = finalize_report(r, out.state);
        return out;
    }

    double delta = cfg.delta > 0.0 ? cfg.delta : 0.1 * r.frobenius_norm() / (double(n) * double(n));
    const double delta0 = cfg.delta0 > 0.0 ? cfg.delta0 : delta / 1024.0;
    if (delta <= 0.0) {
        // A zero matrix has nothing to decompose beyond the load; report the
        // warm state as-is.
        out.state = std::move(warm);
        out.report = finalize_report(r, out.state);
        return out;
    }

    Engine engine(cfg, std::move(warm), MeritObserver{});
    // Total-cycle budget across all raises; exceeding it yields a sound but
    // non-converged certificate.
    const long budget = 64L * std::max(1, cfg.max_outer);
    long spent = 0;
    const auto run_inner = [&]() {
        const long room = budget - spent;
        if (room <= 0) return false;
        const int before = engine.state().cycles;
        const bool closed = engine.solve_inner(int(std::min<long>(room, 1L << 30)));
        spent += engine.state().cycles - before;
        return closed;
    };

    // Every visited state certifies a sound bound, so the run keeps whichever
    // state proved the most (best gamma, then objective) rather than the last
    // one: lifting alpha0 is not guaranteed to pay off.
    MeritState best_state;
    MeritReport best_report;
    best_report.gamma = -1.0;
    double floor_res = std::numeric_limits<double>::infinity();
    bool helped = false;
    const auto consider = [&]() {
        MeritReport cand = finalize_report(r, engine.state());
        if (cand.gamma > best_report.gamma + 1e-12 ||
            (cand.gamma > best_report.gamma - 1e-12 && cand.objective > best_report.objective)) {
            best_report = std::move(cand);
            best_state = engine.state();
            helped = true;
        }
        if (engine.state().residual < 0.99 * floor_res) {
            floor_res = engine.state().residual;
            helped = true;
        }
    };

    // Finish any descent the first stage left mid-flight before lifting:
    // converging here keeps the inherited alpha0 (and with it gamma).
    if (run_inner()) {
        engine.state().converged = true;
        out.state = std::move(engine.state());
        out.diag = engine.diag();
        out.report = finalize_report(r, out.state);
        return out;
    }
    consider();

    // Bisection on the smallest closing alpha0: a raise that converges is
    // rolled back and retried at half the step from the last stalled level; a
    // raise that stalls becomes the new base level. Raises that neither lower
    // the residual floor nor improve the certificate get cut off early.
    constexpr int kPatience = 6;
    int fruitless = 0;
    MeritState snapshot = engine.state();
    while (spent < budget) {
        engine.raise_alpha(delta);
        const bool closed = run_inner();

        helped = false;
        if (closed) {
            if (delta >= delta0) {
                engine.state().converged = true;
                consider();
                engine.state().converged = false;
                delta *= 0.5;
                engine.restore_keeping_history(snapshot);
            } else {
                engine.state().converged = true;
                consider();
                break;
            }
        } else {
            consider();
            snapshot = engine.state();  // accept the raise and keep climbing
        }
        fruitless = helped ? 0 : fruitless + 1;
        if (fruitless >= kPatience) break;
    }

    out.state = std::move(best_state);
    out.diag = engine.diag();
    out.report = std::move(best_report);
    // Work accounting and history reflect the whole run, not the kept state.
    out.state.residual_trace = engine.state().residual_trace;
    out.state.cycles = engine.state().cycles;
    out.report.outer_iterations = engine.state().cycles;
    out.report.residual_trace = out.state.residual_trace;
    return out;
}

MeritOutcome merit_solve(const HermitianMatrix& r, const MeritConfig& cfg) {
    const int restarts = std::max(1, cfg.restarts);
    MeritOutcome best;
    bool have = false;
    for (int trial = 0; trial < restarts; ++trial) {
        MeritConfig attempt = cfg;
        attempt.seed = restarts == 1 ? cfg.seed : mix_seed(cfg.seed, std::uint64_t(trial));
        MeritOutcome zero = merit_zero(r, attempt);
        MeritOutcome outcome = zero.state.converged
                                   ? std::move(zero)
                                   : merit_positive(r, attempt, std::move(zero.state));
        if (!have || outcome.report.gamma > best.report.gamma ||
            (outcome.report.gamma == best.report.gamma && outcome.report.objective > best.report.objective)) {
            best = std::move(outcome);
            have = true;
        }
    }
    return best;
}

std::string report_to_json(const MeritReport& report) {
    nlohmann::json j;
    j["method"] = report.method;
    j["n"] = report.n;
    j["objective"] = report.objective;
    const bool certifying = report.method == "merit";
    j["gamma"] = certifying ? nlohmann::json(report.gamma) : nlohmann::json(nullptr);
    j["alpha0"] = certifying ? nlohmann::json(report.alpha0) : nlohmann::json(nullptr);
    j["lower_bound"] = certifying ? nlohmann::json(report.lower_bound) : nlohmann::json(nullptr);
    j["upper_bound"] = certifying ? nlohmann::json(report.upper_bound) : nlohmann::json(nullptr);
    j["outer_iterations"] = report.outer_iterations;
    j["converged"] = report.converged;
    j["residual_final"] = certifying ? nlohmann::json(report.residual_final) : nlohmann::json(nullptr);
    nlohmann::json phases = nlohmann::json::array();
    for (int k = 0; k < report.s.size(); ++k) phases.push_back(report.s.phase(k));
    j["s_phases"] = phases;
    j["seed"] = report.seed;
    j["elapsed_ms"] = report.elapsed_ms;
    return j.dump(2) + "\n";
}

}  // namespace uqp
