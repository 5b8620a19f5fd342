#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "test_util.hpp"
#include "uqp/linalg.hpp"
#include "uqp/local.hpp"
#include "uqp/rng.hpp"
#include "uqp/scenarios.hpp"
#include "uqp/types.hpp"

using namespace uqp;
using testutil::random_indefinite;

namespace {

HermitianMatrix random_pd(int n, Rng& rng) {
    const HermitianMatrix base = random_hermitian(RandomSpec{n, n, rng.next_u64()});
    return diagonal_load(base, 0.1 * (1.0 + base.frobenius_norm() * 1e-3));
}

}  // namespace

TEST_CASE("power_step: identity fixes every vector") {
    Rng rng(3);
    const PhaseVector s = random_phases(5, rng);
    const PhaseVector next = power_step(HermitianMatrix::identity(5), s);
    CHECK(max_phase_delta(s, next) < 1e-12);
}

TEST_CASE("power_step: the all-ones matrix sends everything to a uniform phase") {
    Rng rng(5);
    const int n = 4;
    HermitianMatrix ones(n);
    for (int k = 0; k < n; ++k)
        for (int l = k; l < n; ++l) ones.set(k, l, Complex{1.0, 0.0});
    const PhaseVector s = random_phases(n, rng);
    Complex sum{0.0, 0.0};
    for (const Complex& e : s.unit()) sum += e;
    const PhaseVector next = power_step(ones, s);
    for (int k = 0; k < n; ++k) CHECK(std::abs(wrap_to_pi(next.phase(k) - std::arg(sum))) < 1e-12);
}

TEST_CASE("power_step: strict ascent off fixed points for positive definite matrices") {
    Rng rng(7);
    for (int trial = 0; trial < 30; ++trial) {
        const int n = 2 + int(rng.uniform() * 7.0);
        const HermitianMatrix r = random_pd(n, rng);
        const PhaseVector s = random_phases(n, rng);
        const PhaseVector next = power_step(r, s);
        if (max_phase_delta(s, next) > 1e-9) {
            CHECK(quadratic_form(r, next) > quadratic_form(r, s));
        }
    }
}

TEST_CASE("power_step: zero rows raise DegeneratePhase") {
    HermitianMatrix ones(2);
    for (int k = 0; k < 2; ++k)
        for (int l = k; l < 2; ++l) ones.set(k, l, Complex{1.0, 0.0});
    // R s = 0 for the antipodal pair (1, -1).
    CHECK_THROWS_AS((void)power_step(ones, PhaseVector{{0.0, kPi}}), DegeneratePhase);
}

TEST_CASE("local_optimize: identity converges immediately") {
    Rng rng(11);
    const PhaseVector s0 = random_phases(6, rng);
    const LocalResult out = local_optimize(HermitianMatrix::identity(6), s0);
    CHECK(out.trace.converged);
    CHECK(out.trace.iterations <= 1);
    CHECK(max_phase_delta(out.s, s0) < 1e-12);
}

TEST_CASE("local_optimize: a nonnegative frame modulated to s~ is globally solved from s~") {
    Rng rng(13);
    const int n = 6;
    HermitianMatrix ones(n);
    for (int k = 0; k < n; ++k)
        for (int l = k; l < n; ++l) ones.set(k, l, Complex{1.0, 0.0});
    const PhaseVector tilde = random_phases(n, rng);
    const HermitianMatrix r = modulate(ones, tilde);
    const LocalResult out = local_optimize(r, tilde);
    CHECK(out.trace.converged);
    CHECK(out.trace.objectives.back() == doctest::Approx(double(n) * n).epsilon(1e-12));
    CHECK(aligned_phase_error(out.s, tilde) < 1e-10);
}

TEST_CASE("local_optimize: monotone objectives, gap bound and hyper-point fixed points") {
    Rng rng(17);
    for (int trial = 0; trial < 40; ++trial) {
        const int n = 2 + int(rng.uniform() * 11.0);
        const HermitianMatrix r = random_pd(n, rng);
        const PhaseVector s0 = random_phases(n, rng);
        LocalConfig cfg;
        cfg.phase_tolerance = 1e-10;
        cfg.objective_tolerance = 0.0;  // stop on phase movement only
        const LocalResult out = local_optimize(r, s0, cfg);
        REQUIRE(out.trace.converged);
        const std::vector<double>& obj = out.trace.objectives;
        REQUIRE(int(obj.size()) == out.trace.iterations + 1);
        REQUIRE(int(out.trace.gap.size()) == out.trace.iterations);
        const double sn = sigma_min(r);
        REQUIRE(sn > 0.0);
        for (int t = 0; t < out.trace.iterations; ++t) {
            const double gain = obj[static_cast<size_t>(t) + 1] - obj[static_cast<size_t>(t)];
            CHECK(gain >= -1e-10 * (1.0 + std::abs(obj[static_cast<size_t>(t)])));
            // Squared step length is controlled by the objective gain.
            CHECK(out.trace.gap[static_cast<size_t>(t)] <=
                  (2.0 / sn) * std::abs(gain) + 1e-9 * (1.0 + std::abs(obj[static_cast<size_t>(t)])));
        }
        CHECK(obj.back() >= obj.front() - 1e-12);
        CHECK(is_hyper_point(r, out.s, 1e-6));
        // A fixed point of the map stays fixed.
        CHECK(max_phase_delta(out.s, power_step(r, out.s)) < 1e-6);
    }
}

TEST_CASE("local_optimize: indefinite inputs are loaded internally and still ascend the input objective") {
    Rng rng(19);
    for (int trial = 0; trial < 10; ++trial) {
        const int n = 4;
        const HermitianMatrix r = random_indefinite(n, rng);
        const PhaseVector s0 = random_phases(n, rng);
        const LocalResult out = local_optimize(r, s0);
        if (sigma_min(r) <= 0.0) CHECK(out.trace.applied_load > 0.0);
        CHECK(out.trace.objectives.back() >=
              quadratic_form(r, s0) - 1e-9 * (1.0 + std::abs(out.trace.objectives.back())));
        CHECK(out.trace.objectives.back() == doctest::Approx(quadratic_form(r, out.s)).epsilon(1e-9));
    }
}

TEST_CASE("local_optimize: iteration cap flags non-convergence and returns the best iterate") {
    Rng rng(23);
    const HermitianMatrix r = random_pd(8, rng);
    LocalConfig cfg;
    cfg.max_iterations = 1;
    cfg.phase_tolerance = 1e-15;
    cfg.objective_tolerance = 0.0;
    const PhaseVector s0 = random_phases(8, rng);
    const LocalResult out = local_optimize(r, s0, cfg);
    CHECK_FALSE(out.trace.converged);
    CHECK(out.trace.iterations == 1);
    CHECK(out.trace.objectives.back() >= out.trace.objectives.front() - 1e-12);
}

TEST_CASE("is_hyper_point: hand-checked small matrices") {
    CHECK(is_hyper_point(HermitianMatrix::identity(3), PhaseVector{{0.3, 1.2, 4.0}}, 1e-10));

    HermitianMatrix m(2);
    m.set(0, 0, Complex{1.0, 0.0});
    m.set(0, 1, Complex{0.0, 1.0});
    m.set(1, 1, Complex{1.0, 0.0});
    // (R s)_1 = 1 + j has argument pi/4 != 0, so the all-ones vector fails.
    CHECK_FALSE(is_hyper_point(m, PhaseVector::ones(2), 1e-6));

    HermitianMatrix sym(2);
    sym.set(0, 0, Complex{2.0, 0.0});
    sym.set(0, 1, Complex{1.0, 0.0});
    sym.set(1, 1, Complex{2.0, 0.0});
    CHECK(is_hyper_point(sym, PhaseVector::ones(2), 1e-12));
}

TEST_CASE("is_hyper_point agrees with power_step fixed points on random instances") {
    Rng rng(29);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 3 + int(rng.uniform() * 5.0);
        const HermitianMatrix r = random_pd(n, rng);
        const PhaseVector s = local_optimize(r, random_phases(n, rng)).s;
        const bool hyper = is_hyper_point(r, s, 1e-7);
        const bool fixed = max_phase_delta(s, power_step(r, s)) <= 1e-7;
        CHECK(hyper == fixed);
    }
}
