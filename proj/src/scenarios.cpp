#include "uqp/scenarios.hpp"

#include <cmath>
#include <string>

#include "uqp/linalg.hpp"
#include "uqp/rng.hpp"

namespace uqp {

namespace {

bool is_prime(std::int64_t p) {
    if (p < 2) return false;
    for (std::int64_t q = 2; q * q <= p; ++q) {
        if (p % q == 0) return false;
    }
    return true;
}

std::int64_t mod_pow(std::int64_t base, std::int64_t exp, std::int64_t mod) {
    __int128 acc = 1;
    __int128 cur = base % mod;
    while (exp > 0) {
        if (exp & 1) acc = (acc * cur) % mod;
        cur = (cur * cur) % mod;
        exp >>= 1;
    }
    return std::int64_t(acc);
}

}  // namespace

HermitianMatrix random_hermitian(const RandomSpec& spec) {
    if (spec.n < 1) throw ValidationError("random_hermitian: n must be positive");
    if (spec.d < 1) throw ValidationError("random_hermitian: rank must be at least 1");
    if (spec.d > spec.n) throw ValidationError("random_hermitian: rank exceeds dimension");
    Rng rng(spec.seed);
    std::vector<std::vector<Complex>> factors(spec.d, std::vector<Complex>(spec.n));
    for (int k = 0; k < spec.d; ++k) {
        for (int i = 0; i < spec.n; ++i) factors[k][i] = rng.complex_normal();
    }
    HermitianMatrix r(spec.n);
    for (int a = 0; a < spec.n; ++a) {
        for (int b = a; b < spec.n; ++b) {
            Complex acc{0.0, 0.0};
            for (int k = 0; k < spec.d; ++k) acc += factors[k][a] * std::conj(factors[k][b]);
            r.set(a, b, acc);
        }
    }
    return r;
}

PhaseVector steering(int n, double nu) {
    if (n < 1) throw ValidationError("steering: n must be positive");
    std::vector<double> phases(static_cast<size_t>(n));
    for (int k = 0; k < n; ++k) phases[static_cast<size_t>(k)] = wrap_to_2pi(kTwoPi * nu * double(k));
    return PhaseVector(phases);
}

HermitianMatrix snr_matrix(const HermitianMatrix& m, const PhaseVector& p) {
    if (m.size() != p.size()) throw DimensionMismatch("snr_matrix: size mismatch");
    return demodulate(hermitian_inverse(m), p);
}

HermitianMatrix crlb_matrix(const HermitianMatrix& m, const PhaseVector& p, double t_r) {
    const int n = m.size();
    const HermitianMatrix snr = snr_matrix(m, p);
    // (u u^H)^* has real entries 4 pi^2 k l T_r^2 since u_k = j 2 pi k T_r.
    HermitianMatrix gain(n);
    const double scale = 4.0 * kPi * kPi * t_r * t_r;
    for (int k = 0; k < n; ++k) {
        for (int l = k; l < n; ++l) gain.set(k, l, Complex{scale * double(k) * double(l), 0.0});
    }
    return hadamard(snr, gain);
}

HermitianMatrix clutter_case(int which, int n, const ClutterParams& params) {
    if (n < 2) throw ValidationError("clutter_case: n must be at least 2");
    HermitianMatrix m(n);
    switch (which) {
        case 1: {
            if (params.eta <= 0.0 || params.eta >= 1.0) {
                throw ValidationError("clutter_case: eta must lie in (0, 1)");
            }
            for (int k = 0; k < n; ++k) {
                for (int l = k; l < n; ++l) {
                    m.set(k, l, Complex{std::pow(params.eta, double(l - k)), 0.0});
                }
            }
            return m;
        }
        case 2: {
            if (params.eta1 <= 0.0 || params.eta1 >= 1.0 || params.eta2 <= 0.0 || params.eta2 >= 1.0) {
                throw ValidationError("clutter_case: eta1 and eta2 must lie in (0, 1)");
            }
            for (int k = 0; k < n; ++k) {
                for (int l = k; l < n; ++l) {
                    const double gap = double(k - l);
                    const double sea = std::pow(params.eta1, double(l - k));
                    const Complex shift = std::polar(1.0, kTwoPi * params.rho_doppler * gap);
                    const double land = 10.0 * std::pow(params.eta2, double(l - k));
                    Complex v = sea * shift + Complex{land, 0.0};
                    if (k == l) v += Complex{1e-2, 0.0};
                    m.set(k, l, v);
                }
            }
            return m;
        }
        case 3: {
            if (params.n_c < 1) throw ValidationError("clutter_case: n_c must be at least 1");
            for (int k = 0; k < n; ++k) {
                for (int l = k; l < n; ++l) {
                    Complex acc{0.0, 0.0};
                    for (int c = 1; c <= params.n_c; ++c) {
                        const double doppler = double(c - 1) / 2.0;
                        acc += std::polar(params.eta_k, kTwoPi * doppler * double(k - l));
                    }
                    if (k == l) acc += Complex{params.noise_eta, 0.0};
                    m.set(k, l, acc);
                }
            }
            return m;
        }
        default:
            throw ValidationError("clutter_case: case must be 1, 2 or 3, got " + std::to_string(which));
    }
}

HermitianMatrix ml_embedding(const ComplexMatrix& q, const std::vector<Complex>& y) {
    const int n = q.cols();
    if (q.rows() != n) throw DimensionMismatch("ml_embedding: Q must be square");
    if (int(y.size()) != n) throw DimensionMismatch("ml_embedding: y length must match Q");
    HermitianMatrix b(n + 1);
    for (int k = 0; k < n; ++k) {
        for (int l = k; l < n; ++l) {
            Complex acc{0.0, 0.0};
            for (int i = 0; i < n; ++i) acc += std::conj(q(i, k)) * q(i, l);
            b.set(k, l, acc);
        }
    }
    for (int k = 0; k < n; ++k) {
        Complex acc{0.0, 0.0};
        for (int i = 0; i < n; ++i) acc += std::conj(q(i, k)) * y[static_cast<size_t>(i)];
        b.set(k, n, -acc);
    }
    b.set(n, n, Complex{0.0, 0.0});
    return b;
}

HermitianMatrix theorem2_construct(const std::vector<PhaseVector>& vectors, const std::vector<double>& sigma) {
    const int k = int(vectors.size());
    if (k < 1) throw ValidationError("theorem2_construct: need at least one vector");
    const int n = vectors.front().size();
    for (const PhaseVector& v : vectors) {
        if (v.size() != n) throw DimensionMismatch("theorem2_construct: vector length mismatch");
    }
    if (k > n) throw ValidationError("theorem2_construct: more vectors than dimensions");
    if (int(sigma.size()) != n) throw ValidationError("theorem2_construct: sigma must have length n");
    for (int i = 1; i < n; ++i) {
        if (sigma[static_cast<size_t>(i)] > sigma[static_cast<size_t>(i - 1)] + 1e-12) {
            throw ValidationError("theorem2_construct: sigma must be nonincreasing");
        }
    }
    const double head = sigma.front();
    for (int i = 1; i < k; ++i) {
        if (std::abs(sigma[static_cast<size_t>(i)] - head) > 1e-12 * (1.0 + std::abs(head))) {
            throw ValidationError("theorem2_construct: leading k sigma values must be equal");
        }
    }

    // Orthonormal basis whose first k columns span the given vectors, then a
    // canonical-basis completion; one re-orthogonalization pass keeps the
    // columns orthonormal to working precision.
    std::vector<std::vector<Complex>> basis;
    auto push_orthonormalized = [&](std::vector<Complex> cand, double dependence_tol) {
        for (int pass = 0; pass < 2; ++pass) {
            for (const std::vector<Complex>& u : basis) {
                Complex proj{0.0, 0.0};
                for (int i = 0; i < n; ++i) proj += std::conj(u[static_cast<size_t>(i)]) * cand[static_cast<size_t>(i)];
                for (int i = 0; i < n; ++i) cand[static_cast<size_t>(i)] -= proj * u[static_cast<size_t>(i)];
            }
        }
        double norm = 0.0;
        for (const Complex& c : cand) norm += std::norm(c);
        norm = std::sqrt(norm);
        if (norm <= dependence_tol) return false;
        for (Complex& c : cand) c /= norm;
        basis.push_back(std::move(cand));
        return true;
    };

    for (const PhaseVector& v : vectors) {
        std::vector<Complex> cand(static_cast<size_t>(n));
        for (int i = 0; i < n; ++i) cand[static_cast<size_t>(i)] = std::polar(1.0, v.phase(i));
        if (!push_orthonormalized(std::move(cand), 1e-10 * std::sqrt(double(n)))) {
            throw ValidationError("theorem2_construct: vectors are linearly dependent");
        }
    }
    for (int j = 0; j < n && int(basis.size()) < n; ++j) {
        std::vector<Complex> cand(static_cast<size_t>(n), Complex{0.0, 0.0});
        cand[static_cast<size_t>(j)] = Complex{1.0, 0.0};
        push_orthonormalized(std::move(cand), 1e-8);
    }
    if (int(basis.size()) != n) throw ValidationError("theorem2_construct: basis completion failed");

    HermitianMatrix r(n);
    for (int a = 0; a < n; ++a) {
        for (int b = a; b < n; ++b) {
            Complex acc{0.0, 0.0};
            for (int i = 0; i < n; ++i) {
                acc += sigma[static_cast<size_t>(i)] * basis[static_cast<size_t>(i)][static_cast<size_t>(a)] *
                       std::conj(basis[static_cast<size_t>(i)][static_cast<size_t>(b)]);
            }
            r.set(a, b, acc);
        }
    }
    return r;
}

int legendre(std::int64_t k, std::int64_t p) {
    if (p < 3 || p % 2 == 0) throw ValidationError("legendre: p must be an odd prime");
    std::int64_t a = k % p;
    if (a < 0) a += p;
    if (a == 0) return 0;
    const std::int64_t euler = mod_pow(a, (p - 1) / 2, p);
    return euler == 1 ? 1 : -1;
}

PhaseVector bjorck(int p) {
    if (!is_prime(p)) throw ValidationError("bjorck: length must be prime, got " + std::to_string(p));
    if (p % 4 != 1) throw ValidationError("bjorck: prime must be congruent to 1 mod 4");
    const double angle = std::acos(1.0 / (1.0 + std::sqrt(double(p))));
    std::vector<double> phases(static_cast<size_t>(p));
    for (int k = 0; k < p; ++k) phases[static_cast<size_t>(k)] = double(legendre(k, p)) * angle;
    return PhaseVector(phases);
}

}  // namespace uqp
