#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>
#include <json.hpp>

#include <cmath>
#include <set>
#include <string>
#include <vector>

#include "test_util.hpp"
#include "uqp/linalg.hpp"
#include "uqp/local.hpp"
#include "uqp/merit.hpp"
#include "uqp/oracle.hpp"
#include "uqp/rng.hpp"
#include "uqp/scenarios.hpp"
#include "uqp/types.hpp"

using namespace uqp;
using testutil::random_indefinite;
using testutil::random_nonneg;

namespace {

HermitianMatrix random_pd(int n, Rng& rng) {
    HermitianMatrix r = random_hermitian(RandomSpec{n, n, rng.next_u64()});
    return diagonal_load(r, 0.1 * (1.0 + 1e-3 * r.frobenius_norm()));
}

/// Entrywise-nonnegative matrix modulated onto a random phase frame: the
/// frame itself is a global argmax and the exact decomposition exists.
HermitianMatrix rank_one_phase(int n, Rng& rng, PhaseVector* star_out = nullptr) {
    const PhaseVector star = random_phases(n, rng);
    if (star_out) *star_out = star;
    return modulate(random_nonneg(n, rng), star);
}

double decomposition_distance(const HermitianMatrix& r, const HermitianMatrix& r1, const PhaseVector& s) {
    return frobenius_distance(r, modulate(r1, s));
}

HermitianMatrix frustrated_triangle() {
    HermitianMatrix r(3);
    for (int k = 0; k < 3; ++k) r.set(k, k, Complex{1.0, 0.0});
    r.set(0, 1, Complex{-1.0, 0.0});
    r.set(0, 2, Complex{-1.0, 0.0});
    r.set(1, 2, Complex{-1.0, 0.0});
    return r;
}

}  // namespace

TEST_CASE("safeguard_load: positive definite input is loaded by mismatch and margin only") {
    Rng rng(211);
    const int n = 5;
    const HermitianMatrix r = random_pd(n, rng);
    const PhaseVector s = PhaseVector::ones(n);
    const SafeguardResult guard = safeguard_load(r, demodulate(r, s), s);
    CHECK(guard.eps0 == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(guard.lambda == doctest::Approx(1e-6 * (1.0 + r.frobenius_norm())).epsilon(1e-9));
    CHECK(frobenius_distance(guard.loaded, diagonal_load(r, guard.lambda)) < 1e-12);
}

TEST_CASE("safeguard_load: zero matrix against an identity factor") {
    const int n = 4;
    const HermitianMatrix zero(n);
    const SafeguardResult guard = safeguard_load(zero, HermitianMatrix::identity(n), PhaseVector::ones(n));
    CHECK(guard.eps0 == doctest::Approx(std::sqrt(double(n))).epsilon(1e-12));
    CHECK(guard.lambda == doctest::Approx(std::sqrt(double(n)) + 1e-6).epsilon(1e-9));
}

TEST_CASE("safeguard_load: indefinite input comes out positive definite") {
    Rng rng(223);
    for (int trial = 0; trial < 10; ++trial) {
        const int n = 3 + int(rng.uniform() * 6.0);
        const HermitianMatrix r = random_indefinite(n, rng);
        const PhaseVector s = random_phases(n, rng);
        const HermitianMatrix r1 = random_nonneg(n, rng);
        const SafeguardResult guard = safeguard_load(r, r1, s);
        CHECK(sigma_min(guard.loaded) > 0.0);
        CHECK(guard.lambda >= -sigma_min(r) + guard.eps0);
        CHECK(guard.eps0 == doctest::Approx(frobenius_distance(demodulate(r, s), r1)).epsilon(1e-10));
    }
}

TEST_CASE("s_update: ascends the surrogate and never widens the decomposition gap") {
    Rng rng(227);
    for (int trial = 0; trial < 10; ++trial) {
        const int n = 3 + int(rng.uniform() * 6.0);
        const HermitianMatrix r = random_pd(n, rng);
        const HermitianMatrix r1 = random_pd(n, rng);
        const PhaseVector s0 = random_phases(n, rng);
        LocalConfig cfg;
        cfg.phase_tolerance = 1e-12;
        cfg.objective_tolerance = 0.0;
        cfg.max_iterations = 50;
        const PhaseVector s1 = s_update(r, r1, s0, cfg);

        const HermitianMatrix surrogate = hadamard_transpose(r, r1);
        CHECK(quadratic_form(surrogate, s1) >=
              quadratic_form(surrogate, s0) - 1e-10 * (1.0 + std::abs(quadratic_form(surrogate, s0))));
        CHECK(decomposition_distance(r, r1, s1) <=
              decomposition_distance(r, r1, s0) + 1e-10 * (1.0 + r.frobenius_norm()));
    }
}

TEST_CASE("merit_zero: identity matrix certifies immediately") {
    MeritConfig cfg;
    cfg.seed = 5;
    const MeritOutcome out = merit_zero(HermitianMatrix::identity(6), cfg);
    CHECK(out.report.converged);
    CHECK(out.report.gamma == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(out.report.objective == doctest::Approx(6.0).epsilon(1e-12));
    CHECK(out.report.alpha0 == 0.0);
    CHECK(out.report.residual_final <= cfg.eps0);
    CHECK(out.report.lower_bound <= out.report.objective + 1e-9);
    CHECK(out.report.upper_bound >= out.report.objective - 1e-9);
    CHECK(out.report.upper_bound - out.report.lower_bound <= 1e-6);
}

TEST_CASE("merit pipeline: rank-one-phase instances end exactly certified and aligned") {
    Rng rng(229);
    for (int trial = 0; trial < 6; ++trial) {
        const int n = 4 + int(rng.uniform() * 9.0);
        PhaseVector star = PhaseVector::ones(n);
        const HermitianMatrix r = rank_one_phase(n, rng, &star);
        MeritConfig cfg;
        cfg.seed = rng.next_u64();
        cfg.restarts = 3;
        const MeritOutcome out = merit_solve(r, cfg);
        CHECK(out.report.converged);
        CHECK(out.report.gamma == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(out.report.objective == doctest::Approx(quadratic_form(r, star)).epsilon(1e-9));
        CHECK(aligned_phase_error(out.report.s, star) < 1e-6);
    }
}

TEST_CASE("merit_zero: closes the decomposition on most low-rank benchmark draws") {
    // The 20 matrices of the n=8, d=2 benchmark bank; the first stage alone
    // certifies gamma = 1 on a clear majority of them.
    int exact = 0;
    for (int t = 0; t < 20; ++t) {
        const HermitianMatrix r = random_hermitian(RandomSpec{8, 2, mix_seed(1, 0x4000 + std::uint64_t(t))});
        MeritConfig cfg;
        cfg.seed = mix_seed(1, std::uint64_t(t));
        const MeritOutcome out = merit_zero(r, cfg);
        if (out.report.converged && out.report.gamma >= 1.0 - 1e-12) ++exact;
        CHECK(out.report.residual_final >= 0.0);
    }
    CHECK(exact >= 12);
}

TEST_CASE("merit_positive: a converged warm state passes through untouched") {
    MeritConfig cfg;
    cfg.seed = 11;
    MeritOutcome zero = merit_zero(HermitianMatrix::identity(5), cfg);
    REQUIRE(zero.state.converged);
    const double residual = zero.state.residual;
    const MeritOutcome out = merit_positive(HermitianMatrix::identity(5), cfg, std::move(zero.state));
    CHECK(out.report.converged);
    CHECK(out.report.alpha0 == 0.0);
    CHECK(out.report.residual_final == doctest::Approx(residual).epsilon(1e-15));
    CHECK(out.report.gamma == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("merit pipeline: frustrated couplings keep a sound certificate around the splay optimum") {
    // Pairwise repulsion on a triangle: the optimum is the balanced
    // 120-degree splay scoring exactly 6.
    const HermitianMatrix r = frustrated_triangle();
    MeritConfig cfg;
    cfg.seed = 3;
    cfg.restarts = 2;
    const MeritOutcome out = merit_solve(r, cfg);

    const OracleResult coarse = brute_force(r, 64);
    const RefinedResult refined = refine(r, coarse);
    CHECK(refined.value == doctest::Approx(6.0).epsilon(1e-6));

    CHECK(out.report.objective == doctest::Approx(6.0).epsilon(1e-6));
    CHECK(out.report.lower_bound <= refined.value + 1e-6 * (1.0 + std::abs(refined.value)));
    CHECK(out.report.upper_bound >= refined.value - 1e-6 * (1.0 + std::abs(refined.value)));
    if (out.report.converged && out.report.alpha0 > 0.0) {
        const double n2 = 9.0;
        CHECK(out.report.gamma * (out.report.objective + out.report.alpha0 * n2) ==
              doctest::Approx(out.report.objective).epsilon(1e-9));
        CHECK(out.report.gamma < 1.0);
    }
    if (out.report.converged && out.report.alpha0 == 0.0) {
        CHECK(out.report.gamma == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("merit_positive: lifts the benchmark draws that stall at alpha0 = 0") {
    // Scan the n=8, d=2 benchmark bank for draws the first stage cannot
    // close, then check the lift produces sound, internally consistent
    // certificates on them.
    int lifted = 0;
    for (int t = 0; t < 20 && lifted < 2; ++t) {
        const HermitianMatrix r = random_hermitian(RandomSpec{8, 2, mix_seed(1, 0x4000 + std::uint64_t(t))});
        MeritConfig cfg;
        cfg.seed = mix_seed(1, std::uint64_t(t));
        MeritOutcome zero = merit_zero(r, cfg);
        if (zero.state.converged) continue;
        ++lifted;

        const MeritOutcome out = merit_positive(r, cfg, std::move(zero.state));
        CHECK(out.report.objective == doctest::Approx(quadratic_form(r, out.report.s)).epsilon(1e-9));
        CHECK(out.report.gamma > 0.0);
        CHECK(out.report.gamma <= 1.0 + 1e-12);
        CHECK(out.report.lower_bound <= out.report.upper_bound + 1e-9);
        CHECK(out.report.lower_bound <=
              out.report.objective + 1e-9 * (1.0 + std::abs(out.report.objective)));
        if (out.report.converged) {
            CHECK(out.report.residual_final <= cfg.eps0);
            CHECK(out.report.alpha0 > 0.0);
            const double n2 = 64.0;
            CHECK(out.report.gamma * (out.report.objective + out.report.alpha0 * n2) ==
                  doctest::Approx(out.report.objective).epsilon(1e-9));
        }
    }
    CHECK(lifted > 0);  // the bank is known to contain stalled draws
}

TEST_CASE("suboptimality_bounds: closed forms for zero and scalar mismatch") {
    Rng rng(233);
    const int n = 4;
    PhaseVector star = PhaseVector::ones(n);
    const HermitianMatrix r_s = rank_one_phase(n, rng, &star);

    const Bounds tight = suboptimality_bounds(r_s, r_s, star);
    const double at_star = quadratic_form(r_s, star);
    CHECK(tight.lower == doctest::Approx(at_star).epsilon(1e-12));
    CHECK(tight.upper == doctest::Approx(at_star).epsilon(1e-12));

    const double eps = 0.37;
    const HermitianMatrix r_prime = diagonal_load(r_s, eps);
    const Bounds shifted = suboptimality_bounds(r_prime, r_s, star);
    CHECK(shifted.lower == doctest::Approx(at_star + n * eps).epsilon(1e-12));
    CHECK(shifted.upper == doctest::Approx(at_star + n * eps).epsilon(1e-12));
    CHECK(shifted.lower == doctest::Approx(quadratic_form(r_prime, star)).epsilon(1e-12));
}

TEST_CASE("suboptimality_bounds: the certified range contains the exhaustive optimum") {
    Rng rng(239);
    for (int trial = 0; trial < 8; ++trial) {
        const int n = 4;
        PhaseVector star = PhaseVector::ones(n);
        const HermitianMatrix r_s = rank_one_phase(n, rng, &star);
        HermitianMatrix noise = random_indefinite(n, rng);
        const HermitianMatrix r_prime = r_s + 0.05 * noise;

        const Bounds bounds = suboptimality_bounds(r_prime, r_s, star);
        const RefinedResult opt = refine(r_prime, brute_force(r_prime, 32));
        const double tol = 1e-6 * (1.0 + std::abs(opt.value));
        CHECK(bounds.lower <= opt.value + tol);
        CHECK(bounds.upper >= opt.value - tol);
    }
}

TEST_CASE("merit_solve: residual never grows within a stage and certificates stay sound") {
    Rng rng(241);
    for (int trial = 0; trial < 6; ++trial) {
        const int n = 2 + trial % 3;
        const HermitianMatrix r = random_indefinite(n, rng);
        MeritConfig cfg;
        cfg.seed = rng.next_u64();
        cfg.restarts = 2;
        const MeritOutcome out = merit_solve(r, cfg);

        const double scale = 1e-7 * (1.0 + r.frobenius_norm());
        CHECK(out.diag.max_cycle_increase <= scale);
        CHECK(out.diag.max_raise_increase <= scale);
        CHECK(out.report.objective == doctest::Approx(quadratic_form(r, out.report.s)).epsilon(1e-9));
        CHECK(out.report.lower_bound <= out.report.objective + 1e-9 * (1.0 + std::abs(out.report.objective)));
        if (out.report.converged) CHECK(out.report.residual_final <= cfg.eps0);

        const RefinedResult opt = refine(r, brute_force(r, 32));
        const double tol = 1e-6 * (1.0 + std::abs(opt.value));
        CHECK(out.report.lower_bound <= opt.value + tol);
        CHECK(out.report.upper_bound >= opt.value - tol);
        if (out.report.gamma >= 1.0 - 1e-12) {
            CHECK(out.report.objective == doctest::Approx(opt.value).epsilon(1e-6));
        }
    }
}

TEST_CASE("merit_solve: deterministic for a fixed configuration") {
    Rng rng(251);
    const HermitianMatrix r = random_indefinite(5, rng);
    MeritConfig cfg;
    cfg.seed = 77;
    cfg.restarts = 2;
    const MeritOutcome a = merit_solve(r, cfg);
    const MeritOutcome b = merit_solve(r, cfg);
    CHECK(a.report.objective == b.report.objective);
    CHECK(a.report.gamma == b.report.gamma);
    CHECK(a.report.alpha0 == b.report.alpha0);
    REQUIRE(a.report.s.size() == b.report.s.size());
    for (int k = 0; k < a.report.s.size(); ++k) CHECK(a.report.s.phase(k) == b.report.s.phase(k));
}

TEST_CASE("report_to_json: fixed key set, null certificate fields for non-certifying methods") {
    MeritReport report;
    report.method = "merit";
    report.n = 3;
    report.objective = 5.5;
    report.gamma = 0.9;
    report.s = PhaseVector::ones(3);
    report.seed = 42;

    const std::set<std::string> expected = {"method",           "n",         "objective",      "gamma",
                                            "alpha0",           "lower_bound", "upper_bound",  "outer_iterations",
                                            "converged",        "residual_final", "s_phases",  "seed",
                                            "elapsed_ms"};
    const nlohmann::json j = nlohmann::json::parse(report_to_json(report));
    std::set<std::string> keys;
    for (auto it = j.begin(); it != j.end(); ++it) keys.insert(it.key());
    CHECK(keys == expected);
    CHECK(j["gamma"].get<double>() == doctest::Approx(0.9));
    CHECK(j["s_phases"].size() == 3);

    report.method = "local";
    const nlohmann::json jl = nlohmann::json::parse(report_to_json(report));
    CHECK(jl["gamma"].is_null());
    CHECK(jl["alpha0"].is_null());
    CHECK(jl["lower_bound"].is_null());
    CHECK(jl["upper_bound"].is_null());
    CHECK(jl["residual_final"].is_null());
    CHECK(jl["objective"].get<double>() == doctest::Approx(5.5));
}
