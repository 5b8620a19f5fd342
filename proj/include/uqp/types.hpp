#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace uqp {

using Complex = std::complex<double>;

inline constexpr double kPi = 3.141592653589793238462643383279502884;
inline constexpr double kTwoPi = 2.0 * kPi;

struct DimensionMismatch : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct ValidationError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Raised when a phase would be read off a complex value of (near-)zero modulus.
struct DegeneratePhase : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SingularMatrix : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Wrap an angle to (-pi, pi].
double wrap_to_pi(double a);

/// Wrap an angle to [0, 2*pi).
double wrap_to_2pi(double a);

/// Dense row-major complex matrix. General (not necessarily square) storage
/// used for eigenvector bases, pulse cross-ambiguity matrices and channel
/// matrices; the Hermitian objective matrices live in HermitianMatrix.
class ComplexMatrix {
public:
    ComplexMatrix() = default;
    ComplexMatrix(int rows, int cols) : rows_(rows), cols_(cols), data_(static_cast<size_t>(rows) * cols) {
        if (rows < 0 || cols < 0) throw ValidationError("matrix dimensions must be nonnegative");
    }

    static ComplexMatrix identity(int n);

    int rows() const { return rows_; }
    int cols() const { return cols_; }

    const Complex& operator()(int i, int j) const { return data_[static_cast<size_t>(i) * cols_ + j]; }
    Complex& operator()(int i, int j) { return data_[static_cast<size_t>(i) * cols_ + j]; }

    const std::vector<Complex>& data() const { return data_; }

    ComplexMatrix adjoint() const;
    ComplexMatrix transpose() const;
    ComplexMatrix conj() const;

    std::vector<Complex> matvec(const std::vector<Complex>& x) const;

    double frobenius_norm() const;

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<Complex> data_;
};

ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix operator+(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix operator-(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix operator*(Complex c, const ComplexMatrix& a);

/// Dense n-by-n complex Hermitian matrix. Storage keeps both triangles
/// exactly conjugate-consistent and the diagonal exactly real, so sums,
/// real scalings and Hadamard products of Hermitian operands remain
/// Hermitian bit-for-bit.
class HermitianMatrix {
public:
    HermitianMatrix() = default;
    explicit HermitianMatrix(int n) : n_(n), a_(static_cast<size_t>(n) * n) {
        if (n <= 0) throw ValidationError("Hermitian matrix size must be positive");
    }

    static HermitianMatrix identity(int n);

    /// Build from a full row-major entry list. Asymmetry up to
    /// 1e-12 * (1 + ||A||_F) is absorbed by (A + A^H)/2; anything larger is
    /// rejected as a genuinely non-Hermitian input.
    static HermitianMatrix from_entries(int n, const std::vector<Complex>& entries);

    static HermitianMatrix from_matrix(const ComplexMatrix& m);

    int size() const { return n_; }

    const Complex& operator()(int k, int l) const { return a_[static_cast<size_t>(k) * n_ + l]; }

    /// Assign entry (k,l) and its mirror (l,k) = conj(v); diagonal assignments
    /// keep only the real part.
    void set(int k, int l, Complex v);

    void add_scaled_identity(double lambda);

    std::vector<Complex> matvec(const std::vector<Complex>& x) const;

    double trace() const;
    double frobenius_norm() const;

    ComplexMatrix to_matrix() const;

private:
    int n_ = 0;
    std::vector<Complex> a_;
};

HermitianMatrix operator+(const HermitianMatrix& a, const HermitianMatrix& b);
HermitianMatrix operator-(const HermitianMatrix& a, const HermitianMatrix& b);
HermitianMatrix operator*(double c, const HermitianMatrix& a);

/// Unit-modulus complex vector stored as phases in [0, 2*pi). The implied
/// entries e^{j*phi_k} have unit modulus by construction.
class PhaseVector {
public:
    PhaseVector() = default;
    explicit PhaseVector(std::vector<double> phases);

    /// The all-ones vector (every phase zero).
    static PhaseVector ones(int n);

    /// Phases read off a complex vector; entries with modulus below min_mod
    /// raise DegeneratePhase.
    static PhaseVector from_complex(const std::vector<Complex>& v, double min_mod = 1e-14);

    int size() const { return static_cast<int>(phases_.size()); }
    const std::vector<double>& phases() const { return phases_; }
    double phase(int k) const { return phases_[static_cast<size_t>(k)]; }

    std::vector<Complex> unit() const;

private:
    std::vector<double> phases_;
};

/// R o (s s^H): entries R(k,l) * e^{j(phi_k - phi_l)}.
HermitianMatrix modulate(const HermitianMatrix& r, const PhaseVector& s);

/// R o (s s^H)^*: entries R(k,l) * e^{-j(phi_k - phi_l)}.
HermitianMatrix demodulate(const HermitianMatrix& r, const PhaseVector& s);

/// Rank-one phase matrix s s^H.
HermitianMatrix phase_outer(const PhaseVector& s);

/// Squared Euclidean distance || s1 - s2 ||_2^2 between the implied
/// unit-modulus vectors.
double phase_gap_sq(const PhaseVector& a, const PhaseVector& b);

/// Largest phase difference max_k |phi_a(k) - phi_b(k)| wrapped to (-pi, pi].
double max_phase_delta(const PhaseVector& a, const PhaseVector& b);

/// Largest wrapped per-entry phase error after removing the optimal global
/// phase offset between the two vectors.
double aligned_phase_error(const PhaseVector& a, const PhaseVector& b);

}  // namespace uqp
