#pragma once

#include <cstdint>
#include <vector>

#include "uqp/local.hpp"
#include "uqp/merit.hpp"
#include "uqp/types.hpp"

namespace uqp {

/// Unit-energy rectangular sub-pulses: pulse k occupies
/// [k*t_p, (k+1)*t_p) with amplitude 1/sqrt(t_p). Total duration n*t_p.
struct PulseBasis {
    int n = 0;
    double t_p = 0.0;

    double total_duration() const { return double(n) * t_p; }
};

/// Delay-Doppler design lattice with {0,1} weights and desired magnitudes,
/// stored row-major over (tau index, f index).
struct CafGrid {
    std::vector<double> tau_points;
    std::vector<double> f_points;
    std::vector<double> weights;
    std::vector<double> desired;

    int tau_count() const { return int(tau_points.size()); }
    int f_count() const { return int(f_points.size()); }
    int index(int a, int b) const { return a * f_count() + b; }
    int point_count() const { return tau_count() * f_count(); }
};

/// Lattice over [-10 t_p, 10 t_p] x [-2/T, 2/T] with weight zero strictly
/// inside the mainlobe box (-t_p, t_p) x (-1/T, 1/T) except on the axes, and
/// the desired response n at the origin, zero elsewhere. Counts must be odd
/// so the lattice contains the origin.
CafGrid make_thumbtack_grid(const PulseBasis& basis, int tau_count = 41, int f_count = 41);

/// One point of the synthesis iteration: unimodular code x, unconstrained
/// filter y, per-grid-point auxiliary phases and the matching criterion
/// g = sum w |d e^{j phi} - y^H J x|^2 evaluated at those phases.
struct CafState {
    PhaseVector x;
    std::vector<Complex> y;
    std::vector<double> phi;
    double g = 0.0;
};

enum class CafSolver { local, merit };

struct CafConfig {
    CafSolver solver = CafSolver::local;
    /// Settings for the code-update sub-solver (warm-started at the
    /// incumbent code).
    LocalConfig local{1e-10, 1e-12, 0, false};
    /// Used when solver == merit; the incumbent code is kept whenever it
    /// scores at least as well.
    MeritConfig merit;
    std::uint64_t seed = 1;
};

/// Cross-ambiguity coupling matrix: entry (l, k) is the cross-ambiguity of
/// pulse k against pulse l delayed by tau, so that y^H J x equals
/// chi(tau, f) = integral of u(t) v*(t+tau) e^{j 2 pi f t} dt.
ComplexMatrix j_matrix(double tau, double f, const PulseBasis& basis);

/// chi(tau, f) for code x and filter y via the bilinear form y^H J x.
Complex caf_value(const PhaseVector& x, const std::vector<Complex>& y, double tau, double f,
                  const PulseBasis& basis);

/// Grid-cached driver for the cyclic minimization; the J matrices for all
/// lattice points are computed once.
class CafSynthesizer {
  public:
    CafSynthesizer(PulseBasis basis, CafGrid grid);

    /// State with the given vectors and per-point phases already optimal.
    CafState initial_state(const PhaseVector& x0, const std::vector<Complex>& y0) const;

    /// One cycle of phase, filter and code updates; never increases g.
    CafState cycle(const CafState& state, const CafConfig& cfg) const;

    /// Criterion value for the state's own phases.
    double criterion(const CafState& state) const;

    /// Weighted mean of |chi|^2 over the weighted points excluding the
    /// origin, normalized by the origin response |chi(0,0)|^2.
    double sidelobe_level(const CafState& state) const;

    /// |chi| at every lattice point, row-major.
    std::vector<double> caf_map(const CafState& state) const;

    const PulseBasis& basis() const { return basis_; }
    const CafGrid& grid() const { return grid_; }

  private:
    std::vector<Complex> chi_all(const CafState& state) const;

    PulseBasis basis_;
    CafGrid grid_;
    std::vector<ComplexMatrix> j_cache_;
    std::vector<int> weighted_;  // indices with positive weight
    int origin_ = -1;
};

/// Single uncached cycle (small grids, tests).
CafState caf_cycle(const CafState& state, const CafGrid& grid, const PulseBasis& basis, const CafConfig& cfg);

struct CafResult {
    CafState state;
    /// g at initialization and after every cycle; nonincreasing.
    std::vector<double> g_trace;
    /// |chi| over the grid for the final state, row-major.
    std::vector<double> caf_abs;
    double sidelobe_initial = 0.0;
    double sidelobe_final = 0.0;
};

/// Runs the given number of cycles from the Bjorck initialization (requires
/// n prime and congruent to 1 mod 4) on the supplied grid.
CafResult caf_synthesize(const PulseBasis& basis, const CafGrid& grid, int iterations, const CafConfig& cfg);

}  // namespace uqp
