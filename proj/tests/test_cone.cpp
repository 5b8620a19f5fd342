#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "test_util.hpp"
#include "uqp/cone.hpp"
#include "uqp/linalg.hpp"
#include "uqp/local.hpp"
#include "uqp/oracle.hpp"
#include "uqp/rng.hpp"
#include "uqp/scenarios.hpp"
#include "uqp/types.hpp"

using namespace uqp;
using testutil::random_indefinite;
using testutil::random_nonneg;

namespace {

HermitianMatrix all_ones(int n) {
    HermitianMatrix m(n);
    for (int k = 0; k < n; ++k)
        for (int l = k; l < n; ++l) m.set(k, l, Complex{1.0, 0.0});
    return m;
}

/// Row sums Q * ones; a dominant-ones cone member has them all equal.
std::vector<Complex> row_sums(const HermitianMatrix& q) {
    return q.matvec(PhaseVector::ones(q.size()).unit());
}

/// Largest eigenvalue of Q restricted to the complement of the ones
/// direction.
double complementary_top(const HermitianMatrix& q) {
    const int n = q.size();
    std::vector<Complex> u(static_cast<size_t>(n), Complex{1.0 / std::sqrt(double(n)), 0.0});
    const ComplexMatrix b = orthonormal_complement(u);
    const ComplexMatrix compressed = b.adjoint() * (q.to_matrix() * b);
    return sigma_max(HermitianMatrix::from_matrix(compressed));
}

/// Membership residuals for the dominant-ones cone: (row-sum spread,
/// dominance violation).
void check_q1_member(const HermitianMatrix& q, double tol) {
    const std::vector<Complex> sums = row_sums(q);
    const double rho = sums[0].real();
    for (const Complex& s : sums) CHECK(std::abs(s - Complex{rho, 0.0}) <= tol);
    CHECK(complementary_top(q) <= rho + tol);
}

/// A random member of the dominant-ones cone, for projection optimality
/// cross-checks.
HermitianMatrix random_q1_member(int n, Rng& rng) {
    const double rho = 3.0 * (rng.uniform() - 0.3);
    std::vector<Complex> u(static_cast<size_t>(n), Complex{1.0 / std::sqrt(double(n)), 0.0});
    const ComplexMatrix b = orthonormal_complement(u);
    HermitianMatrix w = random_indefinite(n - 1, rng);
    const double top = sigma_max(w);
    if (top > rho) w = diagonal_load(w, rho - top);  // clamp spectrum below rho
    const ComplexMatrix lifted = b * (w.to_matrix() * b.adjoint());
    HermitianMatrix out(n);
    for (int k = 0; k < n; ++k) {
        for (int l = k; l < n; ++l) out.set(k, l, lifted(k, l) + Complex{rho / n, 0.0});
    }
    return out;
}

}  // namespace

TEST_CASE("transport: equal frames are the identity map") {
    Rng rng(3);
    const HermitianMatrix r = random_indefinite(4, rng);
    const PhaseVector s = random_phases(4, rng);
    CHECK(frobenius_distance(transport(r, s, s), r) < 1e-14);
}

TEST_CASE("transport: objective identity over an exhaustive small grid") {
    Rng rng(5);
    const int n = 3;
    const int m = 4;
    const HermitianMatrix r = random_nonneg(n, rng);
    const PhaseVector s1 = random_phases(n, rng);
    const double reference = quadratic_form(r, s1);
    // Every grid point s2 receives the transported matrix with the same
    // objective value at s2.
    for (int code = 0; code < m * m * m; ++code) {
        std::vector<double> phases(static_cast<size_t>(n));
        int rem = code;
        for (int k = 0; k < n; ++k) {
            phases[static_cast<size_t>(k)] = kTwoPi * (rem % m) / m;
            rem /= m;
        }
        const PhaseVector s2{phases};
        const HermitianMatrix moved = transport(r, s1, s2);
        CHECK(quadratic_form(moved, s2) == doctest::Approx(reference).epsilon(1e-10));
    }
}

TEST_CASE("r_plus: aligned components survive, anti-aligned are zeroed") {
    Rng rng(7);
    const HermitianMatrix nn = random_nonneg(4, rng);
    CHECK(frobenius_distance(r_plus(nn, PhaseVector::ones(4)), nn) < 1e-14);

    HermitianMatrix anti(2);
    anti.set(0, 0, Complex{1.0, 0.0});
    anti.set(0, 1, Complex{-1.0, 0.0});
    anti.set(1, 1, Complex{1.0, 0.0});
    const HermitianMatrix plus = r_plus(anti, PhaseVector::ones(2));
    CHECK(std::abs(plus(0, 1)) < 1e-15);
    CHECK(plus(0, 0).real() == doctest::Approx(1.0));
    CHECK(plus(1, 1).real() == doctest::Approx(1.0));

    HermitianMatrix oblique(2);
    oblique.set(0, 0, Complex{1.0, 0.0});
    oblique.set(0, 1, 0.7 * std::polar(1.0, kPi / 4.0));
    oblique.set(1, 1, Complex{1.0, 0.0});
    const HermitianMatrix p2 = r_plus(oblique, PhaseVector::ones(2));
    CHECK(p2(0, 1).real() == doctest::Approx(0.7 * std::cos(kPi / 4.0)).epsilon(1e-12));
    CHECK(std::abs(p2(0, 1).imag()) < 1e-15);
}

TEST_CASE("rho_floor: zero when everything is aligned, else the largest excluded magnitude") {
    Rng rng(11);
    CHECK(rho_floor(random_nonneg(4, rng), PhaseVector::ones(4)) == doctest::Approx(0.0));

    HermitianMatrix anti(2);
    anti.set(0, 0, Complex{1.0, 0.0});
    anti.set(0, 1, Complex{-1.0, 0.0});
    anti.set(1, 1, Complex{1.0, 0.0});
    CHECK(rho_floor(anti, PhaseVector::ones(2)) == doctest::Approx(1.0));

    // Naive scan oracle on a random instance.
    const int n = 5;
    const HermitianMatrix r = random_indefinite(n, rng);
    const PhaseVector s = random_phases(n, rng);
    double want = 0.0;
    for (int k = 0; k < n; ++k) {
        for (int l = 0; l < n; ++l) {
            const double gap = wrap_to_pi(std::arg(r(k, l)) - (s.phase(k) - s.phase(l)));
            const double aligned = std::abs(r(k, l)) * std::cos(gap);
            if (!(std::abs(r(k, l)) > 0.0 && std::abs(gap) < kPi / 2.0)) want = std::max(want, std::abs(aligned));
        }
    }
    CHECK(rho_floor(r, s) == doctest::Approx(want).epsilon(1e-12));
}

TEST_CASE("cone_sequence: nonnegative frames flatten to rho times the ones matrix in one step") {
    Rng rng(13);
    const int n = 4;
    const HermitianMatrix r = random_nonneg(n, rng);
    const double rho = 0.5;
    const ConeSequence seq = cone_sequence(r, PhaseVector::ones(n), rho);
    REQUIRE(seq.matrices.size() == 3);
    CHECK(frobenius_distance(seq.matrices[1], rho * all_ones(n)) < 1e-12);
    CHECK(frobenius_distance(seq.matrices[2], rho * all_ones(n)) < 1e-12);
    const std::vector<Complex> sums = row_sums(seq.matrices[2]);
    for (const Complex& v : sums) CHECK(std::abs(v - Complex{double(n) * rho, 0.0}) < 1e-12);
}

TEST_CASE("cone_sequence: rejects rho at or below the admissible floor") {
    HermitianMatrix anti(2);
    anti.set(0, 0, Complex{1.0, 0.0});
    anti.set(0, 1, Complex{-1.0, 0.0});
    anti.set(1, 1, Complex{1.0, 0.0});
    CHECK_THROWS_AS((void)cone_sequence(anti, PhaseVector::ones(2), 0.5), ValidationError);
}

TEST_CASE("cone_sequence: two-step convergence, eigenpair, shift identity and reconstruction") {
    Rng rng(17);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 3 + int(rng.uniform() * 14.0);
        HermitianMatrix r = random_hermitian(RandomSpec{n, n, rng.next_u64()});
        r = diagonal_load(r, 0.2);
        LocalConfig tight;
        tight.phase_tolerance = 1e-13;  // the eigenpair check needs a sharp fixed point
        tight.objective_tolerance = 0.0;
        tight.max_iterations = 20000;
        const PhaseVector s = local_optimize(r, random_phases(n, rng), tight).s;
        const double rho = rho_floor(r, s) + 0.3 + rng.uniform();

        const ConeSequence seq = cone_sequence(r, s, rho);
        const HermitianMatrix& r2 = seq.matrices[2];
        const double scale = 1.0 + r2.frobenius_norm();

        // A third application changes nothing.
        const ConeSequence again = cone_sequence(r2, s, rho);
        CHECK(frobenius_distance(again.matrices[1], r2) <= 1e-12 * scale);

        // s is an eigenvector with eigenvalue n * rho.
        const std::vector<Complex> r2s = r2.matvec(s.unit());
        const std::vector<Complex> su = s.unit();
        double err = 0.0;
        for (int k = 0; k < n; ++k)
            err += std::norm(r2s[static_cast<size_t>(k)] - double(n) * rho * su[static_cast<size_t>(k)]);
        CHECK(std::sqrt(err) <= 1e-9 * scale);

        // Raising rho by one adds exactly the phase outer product.
        const ConeSequence shifted = cone_sequence(r, s, rho + 1.0);
        CHECK(frobenius_distance(shifted.matrices[2], r2 + phase_outer(s)) <= 1e-10 * scale);

        // The two flattening passes account for the whole matrix.
        const HermitianMatrix lhs = r + 2.0 * rho * phase_outer(s);
        const HermitianMatrix sum_plus = r_plus(seq.matrices[0], s) + r_plus(seq.matrices[1], s);
        const HermitianMatrix rhs = r2 + modulate(sum_plus, s);
        CHECK(frobenius_distance(lhs, rhs) <= 1e-10 * (1.0 + r.frobenius_norm()));
    }
}

TEST_CASE("dominance_rho: closed forms and the eigendecomposition oracle") {
    Rng rng(19);
    const int n = 4;
    const HermitianMatrix nn = random_nonneg(n, rng);
    const ConeSequence flat = cone_sequence(nn, PhaseVector::ones(n), 0.7);
    CHECK(dominance_rho(flat) == doctest::Approx(0.0).epsilon(1e-10));

    HermitianMatrix r = diagonal_load(random_hermitian(RandomSpec{n, n, 321}), 0.3);
    const PhaseVector s = local_optimize(r, random_phases(n, rng)).s;
    const double rho = rho_floor(r, s) + 0.5;
    const ConeSequence seq = cone_sequence(r, s, rho);

    // Oracle: deflate the s direction from R^(2) and take the top of the rest.
    const HermitianMatrix r2 = seq.matrices[2];
    const HermitianMatrix flattened = demodulate(r2, s);
    const double mu = complementary_top(flattened);
    CHECK(dominance_rho(seq) == doctest::Approx(mu / n).epsilon(1e-9));

    // Diagonal loading shifts mu (and the threshold) accordingly.
    ConeSequence loaded = seq;
    loaded.matrices[2] = diagonal_load(seq.matrices[2], 2.0);
    CHECK(dominance_rho(loaded) == doctest::Approx(mu / n + 2.0 / n).epsilon(1e-9));
}

TEST_CASE("project_q1: exact closed forms") {
    const int n = 4;
    const HermitianMatrix ones_scaled = 0.8 * all_ones(n);
    CHECK(frobenius_distance(project_q1(ones_scaled), ones_scaled) < 1e-12);
    CHECK(frobenius_distance(project_q1(HermitianMatrix::identity(n)), HermitianMatrix::identity(n)) < 1e-12);
}

TEST_CASE("project_q1: feasible perturbations never get closer") {
    Rng rng(23);
    for (int trial = 0; trial < 10; ++trial) {
        const int n = 4;
        const HermitianMatrix rq = random_indefinite(n, rng);
        const HermitianMatrix q = project_q1(rq);
        check_q1_member(q, 1e-8 * (1.0 + q.frobenius_norm()));
        const double base = frobenius_distance(rq, q);

        std::vector<Complex> u(static_cast<size_t>(n), Complex{1.0 / std::sqrt(double(n)), 0.0});
        const ComplexMatrix b = orthonormal_complement(u);
        int checked = 0;
        for (int p = 0; p < 40 && checked < 10; ++p) {
            // Perturbation directions keep the ones vector an eigenvector;
            // raising the row-sum eigenvalue and pushing the complementary
            // spectrum downward keeps the candidate inside the cone.
            const double delta = rng.uniform();
            HermitianMatrix w = random_indefinite(n - 1, rng);
            w = diagonal_load(w, -sigma_max(w));
            const ComplexMatrix lifted = b * (w.to_matrix() * b.adjoint());
            HermitianMatrix cand(n);
            for (int k = 0; k < n; ++k) {
                for (int l = k; l < n; ++l) {
                    cand.set(k, l, q(k, l) + 1e-3 * (lifted(k, l) + Complex{delta / n, 0.0}));
                }
            }
            const std::vector<Complex> sums = row_sums(cand);
            const double rho_cand = sums[0].real();
            if (complementary_top(cand) > rho_cand + 1e-12) continue;  // left the cone
            ++checked;
            CHECK(frobenius_distance(rq, cand) >= base - 1e-9);
        }
        CHECK(checked > 0);
    }
}

TEST_CASE("project_q1_exact: cone membership, idempotence and optimality against random members") {
    Rng rng(29);
    for (int trial = 0; trial < 12; ++trial) {
        const int n = 3 + int(rng.uniform() * 5.0);
        const HermitianMatrix rq = random_indefinite(n, rng);
        const HermitianMatrix q = project_q1_exact(rq);
        const double scale = 1.0 + rq.frobenius_norm();
        check_q1_member(q, 1e-8 * scale);

        // Projecting a member returns it unchanged.
        CHECK(frobenius_distance(project_q1_exact(q), q) <= 1e-8 * scale);

        // Never farther than the shifted-projector recipe.
        CHECK(frobenius_distance(rq, q) <= frobenius_distance(rq, project_q1(rq)) + 1e-10 * scale);

        // Optimality: no member of the (convex) cone is closer. The
        // supporting-hyperplane form <R - Q, C - Q> <= 0 is the sharp test.
        const ComplexMatrix gap = rq.to_matrix() - q.to_matrix();
        for (int p = 0; p < 10; ++p) {
            const HermitianMatrix member = random_q1_member(n, rng);
            check_q1_member(member, 1e-8 * (1.0 + member.frobenius_norm()));
            const ComplexMatrix dir = member.to_matrix() - q.to_matrix();
            Complex inner{0.0, 0.0};
            for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l) inner += std::conj(gap(k, l)) * dir(k, l);
            CHECK(inner.real() <= 1e-7 * scale * (1.0 + member.frobenius_norm()));
        }
    }
}

TEST_CASE("project_p1: keeps nonnegative real parts and the whole diagonal") {
    Rng rng(31);
    const HermitianMatrix nn = random_nonneg(4, rng);
    CHECK(frobenius_distance(project_p1(nn), nn) < 1e-14);

    const HermitianMatrix neg_i = -1.0 * HermitianMatrix::identity(3);
    CHECK(frobenius_distance(project_p1(neg_i), neg_i) < 1e-14);

    HermitianMatrix mixed(2);
    mixed.set(0, 0, Complex{1.0, 0.0});
    mixed.set(0, 1, Complex{-2.0, 1.0});
    mixed.set(1, 1, Complex{3.0, 0.0});
    const HermitianMatrix p = project_p1(mixed);
    CHECK(p(0, 0).real() == doctest::Approx(1.0));
    CHECK(p(1, 1).real() == doctest::Approx(3.0));
    CHECK(std::abs(p(0, 1)) < 1e-15);
}

TEST_CASE("project_p1: projection onto the nonnegative off-diagonal cone is exact") {
    Rng rng(37);
    const int n = 5;
    const HermitianMatrix rp = random_indefinite(n, rng);
    const HermitianMatrix p = project_p1(rp);
    // Member: real symmetric, nonnegative off the diagonal.
    for (int k = 0; k < n; ++k) {
        for (int l = 0; l < n; ++l) {
            CHECK(std::abs(p(k, l).imag()) < 1e-15);
            if (k != l) CHECK(p(k, l).real() >= 0.0);
        }
    }
    // Entrywise no member can do better; spot-check against perturbed members.
    const double base = frobenius_distance(rp, p);
    for (int t = 0; t < 10; ++t) {
        HermitianMatrix cand = p;
        const int k = int(rng.uniform() * n);
        const int l = int(rng.uniform() * n);
        const double bump = rng.uniform();
        cand.set(k, l, Complex{std::max(0.0, cand(k, l).real() + (k == l ? bump - 0.5 : bump)), 0.0});
        CHECK(frobenius_distance(rp, cand) >= base - 1e-12);
    }
}

TEST_CASE("solved frames with a shared argmax stay solved under conic combination") {
    // Two matrices maximized by the same grid vector keep that argmax under
    // nonnegative combination; verified exhaustively on a small grid.
    Rng rng(41);
    const int n = 3;
    const int m = 4;
    std::vector<double> phases(static_cast<size_t>(n));
    for (auto& p : phases) p = kTwoPi * double(int(rng.uniform() * m)) / m;
    const PhaseVector star{phases};
    const HermitianMatrix r1 = modulate(random_nonneg(n, rng), star);
    const HermitianMatrix r2 = modulate(random_nonneg(n, rng), star);
    const HermitianMatrix combo = 0.7 * r1 + 1.9 * r2;
    const OracleResult best = brute_force(combo, m);
    CHECK(quadratic_form(combo, best.s) == doctest::Approx(quadratic_form(combo, star)).epsilon(1e-10));
}
