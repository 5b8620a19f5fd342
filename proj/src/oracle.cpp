#include "uqp/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <thread>

#include "uqp/linalg.hpp"

namespace uqp {

namespace {

struct Candidate {
    std::vector<int> levels;  // level indices of phases 2..n
    double value = 0.0;
    bool valid = false;
};

// True when a improves on b: strictly larger value beyond the tie margin, or
// a tie resolved toward the lexicographically smaller level tuple.
bool improves(const Candidate& a, const Candidate& b) {
    if (!b.valid) return true;
    const double margin = 1e-12 * (1.0 + std::abs(b.value));
    if (a.value > b.value + margin) return true;
    if (a.value < b.value - margin) return false;
    return std::lexicographical_compare(a.levels.begin(), a.levels.end(), b.levels.begin(), b.levels.end());
}

// Exhaustive scan with the leading free coordinate restricted to [lo, hi).
// The objective and R*s are maintained incrementally: an odometer step
// changes one coordinate per carry, each an O(n) update.
Candidate enumerate_range(const HermitianMatrix& r, int m, int lo, int hi) {
    const int n = r.size();
    const int free_coords = n - 1;

    std::vector<Complex> roots(static_cast<size_t>(m));
    for (int j = 0; j < m; ++j) roots[static_cast<size_t>(j)] = std::polar(1.0, kTwoPi * j / m);

    std::vector<int> levels(static_cast<size_t>(free_coords), 0);
    levels[0] = lo;
    std::vector<Complex> s(static_cast<size_t>(n), Complex(1.0, 0.0));
    s[1] = roots[static_cast<size_t>(lo)];

    std::vector<Complex> y = r.matvec(s);
    Complex obj_acc = 0.0;
    for (int i = 0; i < n; ++i) obj_acc += std::conj(s[static_cast<size_t>(i)]) * y[static_cast<size_t>(i)];
    double obj = obj_acc.real();

    const auto apply_change = [&](int coord, int new_level) {
        // coord is 1-based into s (coordinate 0 stays pinned at phase 0).
        const Complex delta = roots[static_cast<size_t>(new_level)] - s[static_cast<size_t>(coord)];
        obj += 2.0 * (std::conj(delta) * y[static_cast<size_t>(coord)]).real() +
               std::norm(delta) * r(coord, coord).real();
        for (int i = 0; i < n; ++i) y[static_cast<size_t>(i)] += r(i, coord) * delta;
        s[static_cast<size_t>(coord)] = roots[static_cast<size_t>(new_level)];
    };

    Candidate best;
    std::uint64_t since_resync = 0;
    while (true) {
        Candidate cur;
        cur.levels = levels;
        cur.value = obj;
        cur.valid = true;
        if (improves(cur, best)) best = std::move(cur);

        // Refresh the incremental state now and then so rounding drift does
        // not accumulate over very long scans.
        if (++since_resync == (1u << 20)) {
            since_resync = 0;
            y = r.matvec(s);
            Complex acc = 0.0;
            for (int i = 0; i < n; ++i) acc += std::conj(s[static_cast<size_t>(i)]) * y[static_cast<size_t>(i)];
            obj = acc.real();
        }

        // Odometer: rightmost coordinate fastest, leading coordinate bounded
        // by [lo, hi).
        int pos = free_coords - 1;
        while (pos > 0 && levels[static_cast<size_t>(pos)] == m - 1) {
            levels[static_cast<size_t>(pos)] = 0;
            apply_change(pos + 1, 0);
            --pos;
        }
        if (pos == 0 && levels[0] == hi - 1) break;
        ++levels[static_cast<size_t>(pos)];
        apply_change(pos + 1, levels[static_cast<size_t>(pos)]);
    }
    return best;
}

}  // namespace

OracleResult brute_force(const HermitianMatrix& r, int m) {
    if (m < 1) throw ValidationError("brute force: phase alphabet size must be positive");
    const int n = r.size();

    double total_d = 1.0;
    for (int i = 0; i < n - 1; ++i) {
        total_d *= m;
        if (total_d > 1e8) throw ValidationError("brute force: instance too large (m^(n-1) > 1e8)");
    }
    const std::uint64_t total = static_cast<std::uint64_t>(total_d);

    OracleResult out;
    out.levels = m;
    out.evaluations = total;

    if (n == 1) {
        out.s = PhaseVector::ones(1);
        out.value = r(0, 0).real();
        return out;
    }

    Candidate best;
    const std::uint64_t parallel_threshold = 4'000'000;
    unsigned workers = std::thread::hardware_concurrency();
    if (workers == 0) workers = 1;
    workers = std::min<unsigned>(workers, 8);

    if (total >= parallel_threshold && workers > 1 && m >= static_cast<int>(workers)) {
        std::vector<std::future<Candidate>> futs;
        const int chunk = (m + static_cast<int>(workers) - 1) / static_cast<int>(workers);
        for (int lo = 0; lo < m; lo += chunk) {
            const int hi = std::min(m, lo + chunk);
            futs.push_back(std::async(std::launch::async,
                                      [&r, m, lo, hi] { return enumerate_range(r, m, lo, hi); }));
        }
        for (auto& f : futs) {
            Candidate c = f.get();
            if (c.valid && improves(c, best)) best = std::move(c);
        }
    } else {
        best = enumerate_range(r, m, 0, m);
    }

    std::vector<double> phases(static_cast<size_t>(n), 0.0);
    for (int i = 0; i < n - 1; ++i)
        phases[static_cast<size_t>(i + 1)] = kTwoPi * best.levels[static_cast<size_t>(i)] / m;
    out.s = PhaseVector(std::move(phases));
    out.value = quadratic_form(r, out.s);  // exact re-evaluation of the winner
    return out;
}

RefinedResult refine(const HermitianMatrix& r, const OracleResult& coarse, const LocalConfig& cfg) {
    const LocalResult res = local_optimize(r, coarse.s, cfg);
    RefinedResult out;
    out.s = res.s;
    out.value = res.trace.objectives.back();
    return out;
}

}  // namespace uqp
