#include "uqp/types.hpp"

#include <cmath>

namespace uqp {

double wrap_to_pi(double a) {
    double w = std::remainder(a, kTwoPi);  // (-pi, pi] up to sign of boundary
    if (w <= -kPi) w += kTwoPi;
    return w;
}

double wrap_to_2pi(double a) {
    double w = a - kTwoPi * std::floor(a / kTwoPi);
    if (w >= kTwoPi) w -= kTwoPi;
    if (w < 0.0) w = 0.0;
    return w;
}

ComplexMatrix ComplexMatrix::identity(int n) {
    ComplexMatrix m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

ComplexMatrix ComplexMatrix::adjoint() const {
    ComplexMatrix m(cols_, rows_);
    for (int i = 0; i < rows_; ++i)
        for (int j = 0; j < cols_; ++j) m(j, i) = std::conj((*this)(i, j));
    return m;
}

ComplexMatrix ComplexMatrix::transpose() const {
    ComplexMatrix m(cols_, rows_);
    for (int i = 0; i < rows_; ++i)
        for (int j = 0; j < cols_; ++j) m(j, i) = (*this)(i, j);
    return m;
}

ComplexMatrix ComplexMatrix::conj() const {
    ComplexMatrix m(rows_, cols_);
    for (int i = 0; i < rows_; ++i)
        for (int j = 0; j < cols_; ++j) m(i, j) = std::conj((*this)(i, j));
    return m;
}

std::vector<Complex> ComplexMatrix::matvec(const std::vector<Complex>& x) const {
    if (static_cast<int>(x.size()) != cols_) throw DimensionMismatch("matvec: vector length mismatch");
    std::vector<Complex> y(static_cast<size_t>(rows_));
    for (int i = 0; i < rows_; ++i) {
        Complex acc = 0.0;
        const Complex* row = data_.data() + static_cast<size_t>(i) * cols_;
        for (int j = 0; j < cols_; ++j) acc += row[j] * x[static_cast<size_t>(j)];
        y[static_cast<size_t>(i)] = acc;
    }
    return y;
}

double ComplexMatrix::frobenius_norm() const {
    double s = 0.0;
    for (const Complex& v : data_) s += std::norm(v);
    return std::sqrt(s);
}

ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.cols() != b.rows()) throw DimensionMismatch("matrix product: inner dimensions differ");
    ComplexMatrix c(a.rows(), b.cols());
    for (int i = 0; i < a.rows(); ++i) {
        for (int k = 0; k < a.cols(); ++k) {
            const Complex aik = a(i, k);
            if (aik == Complex(0.0, 0.0)) continue;
            for (int j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
        }
    }
    return c;
}

ComplexMatrix operator+(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) throw DimensionMismatch("matrix sum: shape mismatch");
    ComplexMatrix c(a.rows(), a.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) c(i, j) = a(i, j) + b(i, j);
    return c;
}

ComplexMatrix operator-(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) throw DimensionMismatch("matrix difference: shape mismatch");
    ComplexMatrix c(a.rows(), a.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) c(i, j) = a(i, j) - b(i, j);
    return c;
}

ComplexMatrix operator*(Complex c, const ComplexMatrix& a) {
    ComplexMatrix m(a.rows(), a.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) m(i, j) = c * a(i, j);
    return m;
}

HermitianMatrix HermitianMatrix::identity(int n) {
    HermitianMatrix m(n);
    for (int i = 0; i < n; ++i) m.set(i, i, 1.0);
    return m;
}

HermitianMatrix HermitianMatrix::from_entries(int n, const std::vector<Complex>& entries) {
    if (n <= 0) throw ValidationError("Hermitian matrix size must be positive");
    if (entries.size() != static_cast<size_t>(n) * n)
        throw DimensionMismatch("from_entries: expected n*n entries");

    double fro = 0.0;
    for (const Complex& v : entries) fro += std::norm(v);
    fro = std::sqrt(fro);

    double worst = 0.0;
    for (int k = 0; k < n; ++k)
        for (int l = k; l < n; ++l) {
            const Complex upper = entries[static_cast<size_t>(k) * n + l];
            const Complex lower = entries[static_cast<size_t>(l) * n + k];
            worst = std::max(worst, std::abs(upper - std::conj(lower)));
        }
    if (worst > 1e-12 * (1.0 + fro))
        throw ValidationError("matrix is not Hermitian within tolerance");

    HermitianMatrix m(n);
    for (int k = 0; k < n; ++k) {
        m.a_[static_cast<size_t>(k) * n + k] =
            Complex(entries[static_cast<size_t>(k) * n + k].real(), 0.0);
        for (int l = k + 1; l < n; ++l) {
            const Complex avg =
                0.5 * (entries[static_cast<size_t>(k) * n + l] +
                       std::conj(entries[static_cast<size_t>(l) * n + k]));
            m.a_[static_cast<size_t>(k) * n + l] = avg;
            m.a_[static_cast<size_t>(l) * n + k] = std::conj(avg);
        }
    }
    return m;
}

HermitianMatrix HermitianMatrix::from_matrix(const ComplexMatrix& m) {
    if (m.rows() != m.cols()) throw DimensionMismatch("from_matrix: matrix is not square");
    return from_entries(m.rows(), m.data());
}

void HermitianMatrix::set(int k, int l, Complex v) {
    if (k == l) {
        a_[static_cast<size_t>(k) * n_ + k] = Complex(v.real(), 0.0);
    } else {
        a_[static_cast<size_t>(k) * n_ + l] = v;
        a_[static_cast<size_t>(l) * n_ + k] = std::conj(v);
    }
}

void HermitianMatrix::add_scaled_identity(double lambda) {
    for (int i = 0; i < n_; ++i) {
        Complex& d = a_[static_cast<size_t>(i) * n_ + i];
        d = Complex(d.real() + lambda, 0.0);
    }
}

std::vector<Complex> HermitianMatrix::matvec(const std::vector<Complex>& x) const {
    if (static_cast<int>(x.size()) != n_) throw DimensionMismatch("matvec: vector length mismatch");
    std::vector<Complex> y(static_cast<size_t>(n_));
    for (int i = 0; i < n_; ++i) {
        Complex acc = 0.0;
        const Complex* row = a_.data() + static_cast<size_t>(i) * n_;
        for (int j = 0; j < n_; ++j) acc += row[j] * x[static_cast<size_t>(j)];
        y[static_cast<size_t>(i)] = acc;
    }
    return y;
}

double HermitianMatrix::trace() const {
    double t = 0.0;
    for (int i = 0; i < n_; ++i) t += a_[static_cast<size_t>(i) * n_ + i].real();
    return t;
}

double HermitianMatrix::frobenius_norm() const {
    double s = 0.0;
    for (const Complex& v : a_) s += std::norm(v);
    return std::sqrt(s);
}

ComplexMatrix HermitianMatrix::to_matrix() const {
    ComplexMatrix m(n_, n_);
    for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j) m(i, j) = (*this)(i, j);
    return m;
}

HermitianMatrix operator+(const HermitianMatrix& a, const HermitianMatrix& b) {
    if (a.size() != b.size()) throw DimensionMismatch("Hermitian sum: size mismatch");
    HermitianMatrix c(a.size());
    for (int k = 0; k < a.size(); ++k)
        for (int l = k; l < a.size(); ++l) c.set(k, l, a(k, l) + b(k, l));
    return c;
}

HermitianMatrix operator-(const HermitianMatrix& a, const HermitianMatrix& b) {
    if (a.size() != b.size()) throw DimensionMismatch("Hermitian difference: size mismatch");
    HermitianMatrix c(a.size());
    for (int k = 0; k < a.size(); ++k)
        for (int l = k; l < a.size(); ++l) c.set(k, l, a(k, l) - b(k, l));
    return c;
}

HermitianMatrix operator*(double c, const HermitianMatrix& a) {
    HermitianMatrix m(a.size());
    for (int k = 0; k < a.size(); ++k)
        for (int l = k; l < a.size(); ++l) m.set(k, l, c * a(k, l));
    return m;
}

PhaseVector::PhaseVector(std::vector<double> phases) : phases_(std::move(phases)) {
    if (phases_.empty()) throw ValidationError("phase vector must have positive length");
    for (double& p : phases_) {
        if (!std::isfinite(p)) throw ValidationError("phase vector entries must be finite");
        p = wrap_to_2pi(p);
    }
}

PhaseVector PhaseVector::ones(int n) {
    if (n <= 0) throw ValidationError("phase vector must have positive length");
    return PhaseVector(std::vector<double>(static_cast<size_t>(n), 0.0));
}

PhaseVector PhaseVector::from_complex(const std::vector<Complex>& v, double min_mod) {
    std::vector<double> phases(v.size());
    for (size_t k = 0; k < v.size(); ++k) {
        if (std::abs(v[k]) < min_mod)
            throw DegeneratePhase("phase undefined: complex entry has (near-)zero modulus");
        phases[k] = wrap_to_2pi(std::arg(v[k]));
    }
    return PhaseVector(std::move(phases));
}

std::vector<Complex> PhaseVector::unit() const {
    std::vector<Complex> v(phases_.size());
    for (size_t k = 0; k < phases_.size(); ++k) v[k] = std::polar(1.0, phases_[k]);
    return v;
}

namespace {

HermitianMatrix phase_product(const HermitianMatrix& r, const PhaseVector& s, double sign) {
    if (r.size() != s.size()) throw DimensionMismatch("phase modulation: size mismatch");
    const int n = r.size();
    HermitianMatrix out(n);
    const std::vector<Complex> u = s.unit();
    for (int k = 0; k < n; ++k) {
        out.set(k, k, r(k, k));
        for (int l = k + 1; l < n; ++l) {
            const Complex w = u[static_cast<size_t>(k)] * std::conj(u[static_cast<size_t>(l)]);
            out.set(k, l, r(k, l) * (sign > 0 ? w : std::conj(w)));
        }
    }
    return out;
}

}  // namespace

HermitianMatrix modulate(const HermitianMatrix& r, const PhaseVector& s) { return phase_product(r, s, +1.0); }

HermitianMatrix demodulate(const HermitianMatrix& r, const PhaseVector& s) { return phase_product(r, s, -1.0); }

HermitianMatrix phase_outer(const PhaseVector& s) {
    const int n = s.size();
    HermitianMatrix out(n);
    const std::vector<Complex> u = s.unit();
    for (int k = 0; k < n; ++k) {
        out.set(k, k, 1.0);
        for (int l = k + 1; l < n; ++l)
            out.set(k, l, u[static_cast<size_t>(k)] * std::conj(u[static_cast<size_t>(l)]));
    }
    return out;
}

double phase_gap_sq(const PhaseVector& a, const PhaseVector& b) {
    if (a.size() != b.size()) throw DimensionMismatch("phase gap: size mismatch");
    double s = 0.0;
    for (int k = 0; k < a.size(); ++k)
        s += std::norm(std::polar(1.0, a.phase(k)) - std::polar(1.0, b.phase(k)));
    return s;
}

double max_phase_delta(const PhaseVector& a, const PhaseVector& b) {
    if (a.size() != b.size()) throw DimensionMismatch("phase delta: size mismatch");
    double m = 0.0;
    for (int k = 0; k < a.size(); ++k)
        m = std::max(m, std::abs(wrap_to_pi(a.phase(k) - b.phase(k))));
    return m;
}

double aligned_phase_error(const PhaseVector& a, const PhaseVector& b) {
    if (a.size() != b.size()) throw DimensionMismatch("phase alignment: size mismatch");
    Complex acc = 0.0;
    for (int k = 0; k < a.size(); ++k) acc += std::polar(1.0, a.phase(k) - b.phase(k));
    // Optimal global offset maximizing Re{ e^{-j t} sum_k e^{j(a_k - b_k)} }.
    const double t = (std::abs(acc) == 0.0) ? 0.0 : std::arg(acc);
    double m = 0.0;
    for (int k = 0; k < a.size(); ++k)
        m = std::max(m, std::abs(wrap_to_pi(a.phase(k) - b.phase(k) - t)));
    return m;
}

}  // namespace uqp
