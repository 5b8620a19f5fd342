#include "uqp/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace uqp {

namespace {

double off_diagonal_norm(const ComplexMatrix& a) {
    double s = 0.0;
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j)
            if (i != j) s += std::norm(a(i, j));
    return std::sqrt(s);
}

}  // namespace

EigenSystem hermitian_eig(const HermitianMatrix& h) {
    const int n = h.size();
    ComplexMatrix a = h.to_matrix();
    ComplexMatrix v = ComplexMatrix::identity(n);

    const double fro = std::max(a.frobenius_norm(), 1e-300);
    const double stop = 1e-15 * fro;
    const int max_sweeps = 64;

    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        if (off_diagonal_norm(a) <= stop) break;
        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const Complex apq = a(p, q);
                const double mod = std::abs(apq);
                if (mod <= 1e-18 * fro) {
                    a(p, q) = 0.0;
                    a(q, p) = 0.0;
                    continue;
                }
                const double app = a(p, p).real();
                const double aqq = a(q, q).real();
                const Complex phase = apq / mod;  // e^{j beta}

                // Real Jacobi angle for the phase-stripped 2x2 block.
                const double tau = (aqq - app) / (2.0 * mod);
                double t;
                if (tau >= 0.0)
                    t = 1.0 / (tau + std::sqrt(1.0 + tau * tau));
                else
                    t = -1.0 / (-tau + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;

                // Unitary U = [[c, s],[-s e^{-j beta}, c e^{-j beta}]] acting on
                // columns/rows p and q.
                const Complex u12 = s;
                const Complex u21 = -s * std::conj(phase);
                const Complex u22 = c * std::conj(phase);

                for (int i = 0; i < n; ++i) {
                    const Complex aip = a(i, p);
                    const Complex aiq = a(i, q);
                    a(i, p) = c * aip + u21 * aiq;
                    a(i, q) = u12 * aip + u22 * aiq;
                }
                for (int j = 0; j < n; ++j) {
                    const Complex apj = a(p, j);
                    const Complex aqj = a(q, j);
                    a(p, j) = c * apj + std::conj(u21) * aqj;
                    a(q, j) = std::conj(u12) * apj + std::conj(u22) * aqj;
                }
                a(p, q) = 0.0;
                a(q, p) = 0.0;
                a(p, p) = Complex(a(p, p).real(), 0.0);
                a(q, q) = Complex(a(q, q).real(), 0.0);

                for (int i = 0; i < n; ++i) {
                    const Complex vip = v(i, p);
                    const Complex viq = v(i, q);
                    v(i, p) = c * vip + u21 * viq;
                    v(i, q) = u12 * vip + u22 * viq;
                }
            }
        }
    }

    std::vector<int> order(static_cast<size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&a](int i, int j) { return a(i, i).real() > a(j, j).real(); });

    EigenSystem sys;
    sys.values.resize(static_cast<size_t>(n));
    sys.vectors = ComplexMatrix(n, n);
    for (int j = 0; j < n; ++j) {
        sys.values[static_cast<size_t>(j)] = a(order[static_cast<size_t>(j)], order[static_cast<size_t>(j)]).real();
        for (int i = 0; i < n; ++i) sys.vectors(i, j) = v(i, order[static_cast<size_t>(j)]);
    }
    return sys;
}

double sigma_max(const HermitianMatrix& h) { return hermitian_eig(h).values.front(); }

double sigma_min(const HermitianMatrix& h) { return hermitian_eig(h).values.back(); }

double quadratic_form(const HermitianMatrix& r, const PhaseVector& s) {
    if (r.size() != s.size()) throw DimensionMismatch("quadratic form: size mismatch");
    const std::vector<Complex> u = s.unit();
    const std::vector<Complex> ru = r.matvec(u);
    Complex acc = 0.0;
    for (size_t k = 0; k < u.size(); ++k) acc += std::conj(u[k]) * ru[k];
    return acc.real();
}

ComplexMatrix hadamard(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) throw DimensionMismatch("hadamard: shape mismatch");
    ComplexMatrix c(a.rows(), a.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) c(i, j) = a(i, j) * b(i, j);
    return c;
}

HermitianMatrix hadamard(const HermitianMatrix& a, const HermitianMatrix& b) {
    if (a.size() != b.size()) throw DimensionMismatch("hadamard: size mismatch");
    HermitianMatrix c(a.size());
    for (int k = 0; k < a.size(); ++k)
        for (int l = k; l < a.size(); ++l) c.set(k, l, a(k, l) * b(k, l));
    return c;
}

HermitianMatrix hadamard_transpose(const HermitianMatrix& a, const HermitianMatrix& b) {
    if (a.size() != b.size()) throw DimensionMismatch("hadamard: size mismatch");
    HermitianMatrix c(a.size());
    for (int k = 0; k < a.size(); ++k)
        for (int l = k; l < a.size(); ++l) c.set(k, l, a(k, l) * b(l, k));
    return c;
}

HermitianMatrix diagonal_load(const HermitianMatrix& r, double lambda) {
    HermitianMatrix out = r;
    out.add_scaled_identity(lambda);
    return out;
}

double frobenius_distance(const HermitianMatrix& a, const HermitianMatrix& b) {
    return (a - b).frobenius_norm();
}

double frobenius_distance(const ComplexMatrix& a, const ComplexMatrix& b) {
    return (a - b).frobenius_norm();
}

HermitianMatrix hermitian_inverse(const HermitianMatrix& m) {
    const int n = m.size();
    const EigenSystem sys = hermitian_eig(m);
    double scale = 0.0;
    for (double v : sys.values) scale = std::max(scale, std::abs(v));
    for (double v : sys.values)
        if (std::abs(v) <= 1e-12 * (1.0 + scale))
            throw SingularMatrix("matrix is numerically singular");

    ComplexMatrix inv(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            Complex acc = 0.0;
            for (int k = 0; k < n; ++k)
                acc += sys.vectors(i, k) * std::conj(sys.vectors(j, k)) / sys.values[static_cast<size_t>(k)];
            inv(i, j) = acc;
        }

    HermitianMatrix out = HermitianMatrix::from_matrix(inv);
    const double residual = frobenius_distance(m.to_matrix() * out.to_matrix(), ComplexMatrix::identity(n));
    if (residual > 1e-9 * n)
        throw SingularMatrix("matrix inverse failed the residual check");
    return out;
}

ComplexMatrix orthonormal_complement(const std::vector<Complex>& u) {
    const int n = static_cast<int>(u.size());
    if (n < 1) throw ValidationError("complement basis needs a nonempty direction");

    // Householder reflection with H u = alpha e_1; columns 2..n of the
    // Hermitian unitary H are then an orthonormal basis of the complement.
    const double u1mod = std::abs(u[0]);
    const Complex alpha = (u1mod == 0.0) ? Complex(-1.0, 0.0) : Complex(-u[0] / u1mod);
    std::vector<Complex> w = u;
    w[0] -= alpha;
    double wn2 = 0.0;
    for (const Complex& x : w) wn2 += std::norm(x);

    ComplexMatrix basis(n, n - 1);
    for (int j = 1; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            Complex hij = (i == j) ? 1.0 : 0.0;
            if (wn2 > 0.0) hij -= 2.0 * w[static_cast<size_t>(i)] * std::conj(w[static_cast<size_t>(j)]) / wn2;
            basis(i, j - 1) = hij;
        }
    }
    return basis;
}

}  // namespace uqp
