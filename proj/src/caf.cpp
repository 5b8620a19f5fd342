#include "uqp/caf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "uqp/linalg.hpp"
#include "uqp/rng.hpp"
#include "uqp/scenarios.hpp"

namespace uqp {

namespace {

double sinc(double z) { return z == 0.0 ? 1.0 : std::sin(z) / z; }

/// (J^H y)_k = sum_l conj(J(l,k)) y_l without materializing the adjoint.
std::vector<Complex> adjoint_matvec(const ComplexMatrix& j, const std::vector<Complex>& y) {
    std::vector<Complex> out(static_cast<size_t>(j.cols()), Complex{0.0, 0.0});
    for (int l = 0; l < j.rows(); ++l) {
        const Complex yl = y[static_cast<size_t>(l)];
        for (int k = 0; k < j.cols(); ++k) out[static_cast<size_t>(k)] += std::conj(j(l, k)) * yl;
    }
    return out;
}

Complex dot_conj(const std::vector<Complex>& a, const std::vector<Complex>& b) {
    Complex acc{0.0, 0.0};
    for (size_t i = 0; i < a.size(); ++i) acc += std::conj(a[i]) * b[i];
    return acc;
}

}  // namespace

ComplexMatrix j_matrix(double tau, double f, const PulseBasis& basis) {
    if (basis.n < 1) throw ValidationError("j_matrix: basis needs at least one pulse");
    if (basis.t_p <= 0.0) throw ValidationError("j_matrix: sub-pulse duration must be positive");
    const int n = basis.n;
    const double tp = basis.t_p;
    ComplexMatrix j(n, n);
    for (int r = 0; r < n; ++r) {      // filter pulse index (row)
        for (int c = 0; c < n; ++c) {  // code pulse index (column)
            const double a = std::max(double(c) * tp, double(r) * tp - tau);
            const double b = std::min(double(c + 1) * tp, double(r + 1) * tp - tau);
            if (b <= a) continue;
            const double len = b - a;
            // (1/t_p) * integral_a^b e^{j 2 pi f t} dt in a form with no
            // special case at f = 0.
            const double mag = (len / tp) * sinc(kPi * f * len);  // may be negative
            j(r, c) = mag * std::polar(1.0, kPi * f * (a + b));
        }
    }
    return j;
}

Complex caf_value(const PhaseVector& x, const std::vector<Complex>& y, double tau, double f,
                  const PulseBasis& basis) {
    if (x.size() != basis.n || int(y.size()) != basis.n) {
        throw DimensionMismatch("caf_value: vector lengths must match the basis");
    }
    const ComplexMatrix j = j_matrix(tau, f, basis);
    return dot_conj(y, j.matvec(x.unit()));
}

CafGrid make_thumbtack_grid(const PulseBasis& basis, int tau_count, int f_count) {
    if (basis.n < 1 || basis.t_p <= 0.0) throw ValidationError("make_thumbtack_grid: invalid basis");
    if (tau_count < 3 || f_count < 3) throw ValidationError("make_thumbtack_grid: need at least 3 points per axis");
    if (tau_count % 2 == 0 || f_count % 2 == 0) {
        throw ValidationError("make_thumbtack_grid: counts must be odd so the lattice contains the origin");
    }
    const double tp = basis.t_p;
    const double t_total = basis.total_duration();
    const double tau_max = 10.0 * tp;
    const double f_max = 2.0 / t_total;

    CafGrid grid;
    grid.tau_points.resize(static_cast<size_t>(tau_count));
    grid.f_points.resize(static_cast<size_t>(f_count));
    for (int a = 0; a < tau_count; ++a) {
        grid.tau_points[static_cast<size_t>(a)] = -tau_max + 2.0 * tau_max * double(a) / double(tau_count - 1);
    }
    for (int b = 0; b < f_count; ++b) {
        grid.f_points[static_cast<size_t>(b)] = -f_max + 2.0 * f_max * double(b) / double(f_count - 1);
    }
    // Force the central lattice point to the exact origin.
    grid.tau_points[static_cast<size_t>(tau_count / 2)] = 0.0;
    grid.f_points[static_cast<size_t>(f_count / 2)] = 0.0;

    grid.weights.assign(static_cast<size_t>(tau_count) * f_count, 1.0);
    grid.desired.assign(static_cast<size_t>(tau_count) * f_count, 0.0);
    const double edge = 1.0 - 1e-9;  // strict-interior test robust to lattice rounding
    for (int a = 0; a < tau_count; ++a) {
        const double tau = grid.tau_points[static_cast<size_t>(a)];
        for (int b = 0; b < f_count; ++b) {
            const double f = grid.f_points[static_cast<size_t>(b)];
            const bool in_box = std::abs(tau) < tp * edge && std::abs(f) < edge / t_total;
            const bool on_axes = tau == 0.0 || f == 0.0;
            if (in_box && !on_axes) grid.weights[static_cast<size_t>(grid.index(a, b))] = 0.0;
        }
    }
    grid.desired[static_cast<size_t>(grid.index(tau_count / 2, f_count / 2))] = double(basis.n);
    return grid;
}

CafSynthesizer::CafSynthesizer(PulseBasis basis, CafGrid grid) : basis_(std::move(basis)), grid_(std::move(grid)) {
    if (basis_.n < 1 || basis_.t_p <= 0.0) throw ValidationError("CafSynthesizer: invalid basis");
    const int points = grid_.point_count();
    if (points < 1) throw ValidationError("CafSynthesizer: empty grid");
    if (int(grid_.weights.size()) != points || int(grid_.desired.size()) != points) {
        throw ValidationError("CafSynthesizer: weights/desired must cover the lattice");
    }
    j_cache_.reserve(static_cast<size_t>(points));
    for (int a = 0; a < grid_.tau_count(); ++a) {
        for (int b = 0; b < grid_.f_count(); ++b) {
            j_cache_.push_back(j_matrix(grid_.tau_points[static_cast<size_t>(a)],
                                        grid_.f_points[static_cast<size_t>(b)], basis_));
        }
    }
    for (int i = 0; i < points; ++i) {
        if (grid_.weights[static_cast<size_t>(i)] > 0.0) weighted_.push_back(i);
        if (grid_.tau_points[static_cast<size_t>(i / grid_.f_count())] == 0.0 &&
            grid_.f_points[static_cast<size_t>(i % grid_.f_count())] == 0.0) {
            origin_ = i;
        }
    }
}

CafState CafSynthesizer::initial_state(const PhaseVector& x0, const std::vector<Complex>& y0) const {
    if (x0.size() != basis_.n || int(y0.size()) != basis_.n) {
        throw DimensionMismatch("initial_state: vector lengths must match the basis");
    }
    CafState state;
    state.x = x0;
    state.y = y0;
    state.phi.assign(static_cast<size_t>(grid_.point_count()), 0.0);
    const std::vector<Complex> xu = x0.unit();
    double g = 0.0;
    for (int i : weighted_) {
        const Complex chi = dot_conj(state.y, j_cache_[static_cast<size_t>(i)].matvec(xu));
        const double phi = std::arg(chi);
        state.phi[static_cast<size_t>(i)] = phi;
        const Complex target = std::polar(grid_.desired[static_cast<size_t>(i)], phi);
        g += grid_.weights[static_cast<size_t>(i)] * std::norm(target - chi);
    }
    state.g = g;
    return state;
}

double CafSynthesizer::criterion(const CafState& state) const {
    const std::vector<Complex> xu = state.x.unit();
    double g = 0.0;
    for (int i : weighted_) {
        const Complex chi = dot_conj(state.y, j_cache_[static_cast<size_t>(i)].matvec(xu));
        const Complex target =
            std::polar(grid_.desired[static_cast<size_t>(i)], state.phi[static_cast<size_t>(i)]);
        g += grid_.weights[static_cast<size_t>(i)] * std::norm(target - chi);
    }
    return g;
}

CafState CafSynthesizer::cycle(const CafState& state, const CafConfig& cfg) const {
    const int n = basis_.n;
    if (state.x.size() != n || int(state.y.size()) != n || int(state.phi.size()) != grid_.point_count()) {
        throw DimensionMismatch("caf cycle: state does not match the grid/basis");
    }
    if (int(weighted_.size()) < n) {
        throw ValidationError("caf cycle: need at least n weighted grid points");
    }

    const std::vector<Complex> xu = state.x.unit();
    const size_t m = weighted_.size();

    // Phase block: phi = arg(chi) pointwise (exact minimizer).
    std::vector<std::vector<Complex>> z(m);
    std::vector<double> phi(static_cast<size_t>(grid_.point_count()), 0.0);
    for (size_t t = 0; t < m; ++t) {
        z[t] = j_cache_[static_cast<size_t>(weighted_[t])].matvec(xu);
        phi[static_cast<size_t>(weighted_[t])] = std::arg(dot_conj(state.y, z[t]));
    }

    auto g_of_filter = [&](const std::vector<Complex>& y) {
        double g = 0.0;
        for (size_t t = 0; t < m; ++t) {
            const int i = weighted_[t];
            const Complex target = std::polar(grid_.desired[static_cast<size_t>(i)], phi[static_cast<size_t>(i)]);
            g += grid_.weights[static_cast<size_t>(i)] * std::norm(target - dot_conj(y, z[t]));
        }
        return g;
    };

    // Filter block: least squares y = (D1 + eps I)^{-1} b with
    // D1 = sum w z z^H and b = sum w d e^{-j phi} z; the incumbent is kept
    // if the regularization bias ever works against it.
    HermitianMatrix d1(n);
    std::vector<Complex> b(static_cast<size_t>(n), Complex{0.0, 0.0});
    for (size_t t = 0; t < m; ++t) {
        const int i = weighted_[t];
        const double w = grid_.weights[static_cast<size_t>(i)];
        for (int k = 0; k < n; ++k) {
            for (int l = k; l < n; ++l) {
                d1.set(k, l, d1(k, l) + w * z[t][static_cast<size_t>(k)] * std::conj(z[t][static_cast<size_t>(l)]));
            }
        }
        const Complex coeff =
            std::polar(w * grid_.desired[static_cast<size_t>(i)], -phi[static_cast<size_t>(i)]);
        for (int k = 0; k < n; ++k) b[static_cast<size_t>(k)] += coeff * z[t][static_cast<size_t>(k)];
    }
    const double eps = 1e-8 * d1.trace() / double(n);
    const std::vector<Complex> y_candidate = hermitian_inverse(diagonal_load(d1, eps)).matvec(b);
    const std::vector<Complex>& y = g_of_filter(y_candidate) <= g_of_filter(state.y) ? y_candidate : state.y;

    // Code block: minimizing g over unimodular x is the (n+1)-point
    // unimodular quadratic maximization of [[-D2, v],[v^H, 0]] with
    // D2 = sum w u u^H, v = sum w d e^{j phi} u, u = J^H y; the border
    // variable absorbs the global phase. Warm-started at the incumbent.
    HermitianMatrix embed(n + 1);
    for (size_t t = 0; t < m; ++t) {
        const int i = weighted_[t];
        const double w = grid_.weights[static_cast<size_t>(i)];
        const std::vector<Complex> u = adjoint_matvec(j_cache_[static_cast<size_t>(weighted_[t])], y);
        for (int k = 0; k < n; ++k) {
            for (int l = k; l < n; ++l) {
                embed.set(k, l, embed(k, l) - w * u[static_cast<size_t>(k)] * std::conj(u[static_cast<size_t>(l)]));
            }
        }
        const Complex coeff = std::polar(w * grid_.desired[static_cast<size_t>(i)], phi[static_cast<size_t>(i)]);
        for (int k = 0; k < n; ++k) embed.set(k, n, embed(k, n) + coeff * u[static_cast<size_t>(k)]);
    }

    std::vector<double> warm_phases = state.x.phases();
    warm_phases.push_back(0.0);
    const PhaseVector warm(warm_phases);
    PhaseVector best = warm;
    double best_value = quadratic_form(embed, warm);
    if (cfg.solver == CafSolver::local) {
        try {
            const LocalResult res = local_optimize(embed, warm, cfg.local);
            if (res.trace.objectives.back() > best_value) {
                best = res.s;
                best_value = res.trace.objectives.back();
            }
        } catch (const DegeneratePhase&) {
            // keep the incumbent
        }
    } else {
        MeritConfig mc = cfg.merit;
        mc.seed = mc.seed == 0 ? cfg.seed : mc.seed;
        const MeritOutcome outcome = merit_solve(embed, mc);
        if (outcome.report.objective > best_value) {
            best = outcome.report.s;
            best_value = outcome.report.objective;
        }
    }
    std::vector<double> x_phases(static_cast<size_t>(n));
    for (int k = 0; k < n; ++k) x_phases[static_cast<size_t>(k)] = best.phase(k) - best.phase(n);
    const PhaseVector x_new(x_phases);

    CafState next;
    next.x = x_new;
    next.y = y;
    next.phi = std::move(phi);
    next.g = criterion(next);
    // Every block is nonincreasing in exact arithmetic; refuse rounding-level
    // upticks so the reported trace is monotone outright.
    if (next.g > state.g) return state;
    return next;
}

double CafSynthesizer::sidelobe_level(const CafState& state) const {
    if (origin_ < 0) throw ValidationError("sidelobe_level: grid has no origin point");
    const std::vector<Complex> xu = state.x.unit();
    const Complex peak = dot_conj(state.y, j_cache_[static_cast<size_t>(origin_)].matvec(xu));
    double acc = 0.0;
    double count = 0.0;
    for (int i : weighted_) {
        if (i == origin_) continue;
        const Complex chi = dot_conj(state.y, j_cache_[static_cast<size_t>(i)].matvec(xu));
        acc += grid_.weights[static_cast<size_t>(i)] * std::norm(chi);
        count += grid_.weights[static_cast<size_t>(i)];
    }
    if (count <= 0.0) return 0.0;
    if (std::norm(peak) == 0.0) return std::numeric_limits<double>::infinity();
    return acc / count / std::norm(peak);
}

std::vector<Complex> CafSynthesizer::chi_all(const CafState& state) const {
    const std::vector<Complex> xu = state.x.unit();
    std::vector<Complex> chi(static_cast<size_t>(grid_.point_count()));
    for (int i = 0; i < grid_.point_count(); ++i) {
        chi[static_cast<size_t>(i)] = dot_conj(state.y, j_cache_[static_cast<size_t>(i)].matvec(xu));
    }
    return chi;
}

std::vector<double> CafSynthesizer::caf_map(const CafState& state) const {
    const std::vector<Complex> chi = chi_all(state);
    std::vector<double> out(chi.size());
    for (size_t i = 0; i < chi.size(); ++i) out[i] = std::abs(chi[i]);
    return out;
}

CafState caf_cycle(const CafState& state, const CafGrid& grid, const PulseBasis& basis, const CafConfig& cfg) {
    return CafSynthesizer(basis, grid).cycle(state, cfg);
}

CafResult caf_synthesize(const PulseBasis& basis, const CafGrid& grid, int iterations, const CafConfig& cfg) {
    if (iterations < 0) throw ValidationError("caf_synthesize: iterations must be nonnegative");
    const PhaseVector code = bjorck(basis.n);
    const CafSynthesizer synth(basis, grid);

    CafResult result;
    CafState state = synth.initial_state(code, code.unit());
    result.g_trace.push_back(state.g);
    result.sidelobe_initial = synth.sidelobe_level(state);
    for (int it = 0; it < iterations; ++it) {
        CafConfig step = cfg;
        if (step.solver == CafSolver::merit) {
            step.merit.seed = mix_seed(cfg.seed, std::uint64_t(it));
        }
        state = synth.cycle(state, step);
        result.g_trace.push_back(state.g);
    }
    result.sidelobe_final = synth.sidelobe_level(state);
    result.caf_abs = synth.caf_map(state);
    result.state = std::move(state);
    return result;
}

}  // namespace uqp
