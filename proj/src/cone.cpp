#include "uqp/cone.hpp"

#include <cmath>
#include <limits>

#include "uqp/linalg.hpp"

namespace uqp {

HermitianMatrix transport(const HermitianMatrix& r, const PhaseVector& s1, const PhaseVector& s2) {
    if (r.size() != s1.size() || r.size() != s2.size())
        throw DimensionMismatch("transport: size mismatch");
    std::vector<double> p(static_cast<size_t>(r.size()));
    for (int k = 0; k < r.size(); ++k) p[static_cast<size_t>(k)] = s2.phase(k) - s1.phase(k);
    return modulate(r, PhaseVector(std::move(p)));
}

HermitianMatrix r_plus(const HermitianMatrix& r, const PhaseVector& s) {
    if (r.size() != s.size()) throw DimensionMismatch("r_plus: size mismatch");
    const int n = r.size();
    HermitianMatrix out(n);
    for (int k = 0; k < n; ++k)
        for (int l = k; l < n; ++l) {
            const Complex v = r(k, l);
            const double mod = std::abs(v);
            const double gap = wrap_to_pi(std::arg(v) - (s.phase(k) - s.phase(l)));
            if (std::abs(gap) < kPi / 2.0) out.set(k, l, mod * std::cos(gap));
        }
    return out;
}

double rho_floor(const HermitianMatrix& r, const PhaseVector& s) {
    if (r.size() != s.size()) throw DimensionMismatch("rho_floor: size mismatch");
    double floor_v = 0.0;  // empty complement -> 0
    for (int k = 0; k < r.size(); ++k)
        for (int l = k; l < r.size(); ++l) {
            const Complex v = r(k, l);
            const double gap = wrap_to_pi(std::arg(v) - (s.phase(k) - s.phase(l)));
            if (std::abs(gap) >= kPi / 2.0)
                floor_v = std::max(floor_v, std::abs(std::abs(v) * std::cos(gap)));
        }
    return floor_v;
}

ConeSequence cone_sequence(const HermitianMatrix& r, const PhaseVector& s, double rho) {
    if (r.size() != s.size()) throw DimensionMismatch("cone sequence: size mismatch");
    const double floor_v = rho_floor(r, s);
    if (!(rho > floor_v))
        throw ValidationError("cone sequence: rho must exceed the admissible floor");

    const int n = r.size();
    ConeSequence seq;
    seq.rho = rho;
    seq.s = s;
    seq.matrices.reserve(3);
    seq.matrices.push_back(r);

    seq.theta_set.assign(static_cast<size_t>(n) * n, false);
    for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
            const double gap = wrap_to_pi(std::arg(r(k, l)) - (s.phase(k) - s.phase(l)));
            seq.theta_set[static_cast<size_t>(k) * n + l] = std::abs(gap) < kPi / 2.0;
        }

    HermitianMatrix ones(n);
    for (int k = 0; k < n; ++k)
        for (int l = k; l < n; ++l) ones.set(k, l, 1.0);

    for (int t = 0; t < 2; ++t) {
        const HermitianMatrix& cur = seq.matrices.back();
        const HermitianMatrix correction = modulate(r_plus(cur, s) - rho * ones, s);
        seq.matrices.push_back(cur - correction);
    }
    return seq;
}

double dominance_rho(const ConeSequence& seq) {
    if (seq.matrices.size() != 3) throw ValidationError("dominance_rho: sequence is incomplete");
    const HermitianMatrix& r2 = seq.matrices[2];
    const int n = r2.size();
    if (n == 1) return 0.0;  // no complementary spectrum

    // s is an eigenvector of R^(2); the complementary spectrum is exactly the
    // spectrum of the compression onto the orthogonal complement of s.
    std::vector<Complex> u = seq.s.unit();
    const double inv_norm = 1.0 / std::sqrt(static_cast<double>(n));
    for (Complex& x : u) x *= inv_norm;
    const ComplexMatrix basis = orthonormal_complement(u);
    const ComplexMatrix compressed = basis.adjoint() * (r2.to_matrix() * basis);
    const double mu = sigma_max(HermitianMatrix::from_matrix(compressed));
    return mu / n;
}

HermitianMatrix project_q1(const HermitianMatrix& r_q) {
    const int n = r_q.size();

    // H/n is the unconstrained optimum of the shift; rho_0 the largest
    // eigenvalue on the complement of the all-ones direction.
    double h = 0.0;
    for (int k = 0; k < n; ++k) {
        h += r_q(k, k).real();
        for (int l = k + 1; l < n; ++l) h += 2.0 * r_q(k, l).real();
    }

    double rho0 = -std::numeric_limits<double>::infinity();
    if (n > 1) {
        std::vector<Complex> u(static_cast<size_t>(n), Complex(1.0 / std::sqrt(static_cast<double>(n)), 0.0));
        const ComplexMatrix basis = orthonormal_complement(u);
        const ComplexMatrix compressed = basis.adjoint() * (r_q.to_matrix() * basis);
        rho0 = sigma_max(HermitianMatrix::from_matrix(compressed));
    }
    const double rho = std::max(h / n, rho0);

    // Q1(rho) = rho I + P (R_Q - rho I) P with P = I - ones/n, expanded per
    // entry: P A P = A - (row-means) - (col-means) + grand-mean.
    std::vector<Complex> row_mean(static_cast<size_t>(n), Complex(0.0, 0.0));
    for (int k = 0; k < n; ++k) {
        Complex acc = 0.0;
        for (int l = 0; l < n; ++l) acc += r_q(k, l);
        row_mean[static_cast<size_t>(k)] = (acc - Complex(rho, 0.0)) / static_cast<double>(n);
    }
    const double grand = (h - rho * n) / (static_cast<double>(n) * n);

    // The rho I outside and the -rho I inside P(.)P cancel on the diagonal,
    // leaving the same centered expression for every entry.
    HermitianMatrix q1(n);
    for (int k = 0; k < n; ++k)
        for (int l = k; l < n; ++l)
            q1.set(k, l, r_q(k, l) - row_mean[static_cast<size_t>(k)] -
                             std::conj(row_mean[static_cast<size_t>(l)]) + grand);
    return q1;
}

HermitianMatrix project_q1_exact(const HermitianMatrix& r_q) {
    const int n = r_q.size();
    if (n == 1) return r_q;  // the all-ones direction spans everything

    // Split against the all-ones direction. A cone member has no coupling
    // block, eigenvalue rho on the ones direction, and a complementary
    // spectrum capped at rho; the nearest one keeps the complementary
    // eigenvectors and clips their eigenvalues.
    const double inv_sqrt = 1.0 / std::sqrt(static_cast<double>(n));
    std::vector<Complex> u(static_cast<size_t>(n), Complex(inv_sqrt, 0.0));
    const ComplexMatrix basis = orthonormal_complement(u);
    const ComplexMatrix compressed = basis.adjoint() * (r_q.to_matrix() * basis);
    const EigenSystem eig = hermitian_eig(HermitianMatrix::from_matrix(compressed));

    double h = 0.0;
    for (int k = 0; k < n; ++k) {
        h += r_q(k, k).real();
        for (int l = k + 1; l < n; ++l) h += 2.0 * r_q(k, l).real();
    }
    const double mean = h / n;

    // Stationarity of (rho - mean)^2 + sum_i max(0, mu_i - rho)^2: grow the
    // clip set while the next eigenvalue still pokes above the water level.
    double rho = mean;
    double mass = mean;
    int clipped = 0;
    while (clipped < n - 1 && eig.values[static_cast<size_t>(clipped)] > rho) {
        mass += eig.values[static_cast<size_t>(clipped)];
        ++clipped;
        rho = mass / (1.0 + clipped);
    }

    const ComplexMatrix lifted = basis * eig.vectors;  // complement eigenvectors, original frame
    ComplexMatrix out(n, n);
    for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) out(k, l) = Complex(rho / n, 0.0);
    for (int i = 0; i < n - 1; ++i) {
        const double w = std::min(eig.values[static_cast<size_t>(i)], rho);
        if (w == 0.0) continue;
        for (int k = 0; k < n; ++k) {
            const Complex scaled = w * lifted(k, i);
            for (int l = 0; l < n; ++l) out(k, l) += scaled * std::conj(lifted(l, i));
        }
    }
    return HermitianMatrix::from_matrix(out);
}

HermitianMatrix project_p1(const HermitianMatrix& r_p) {
    const int n = r_p.size();
    HermitianMatrix p1(n);
    for (int k = 0; k < n; ++k) {
        p1.set(k, k, r_p(k, k).real());
        for (int l = k + 1; l < n; ++l) {
            const double re = r_p(k, l).real();
            if (re >= 0.0) p1.set(k, l, re);
        }
    }
    return p1;
}

}  // namespace uqp
