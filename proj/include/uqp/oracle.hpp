#pragma once

#include "uqp/local.hpp"
#include "uqp/types.hpp"

namespace uqp {

struct OracleResult {
    PhaseVector s;
    double value = 0.0;
    /// Phase alphabet size m of the search.
    int levels = 0;
    /// Total candidates examined (m^(n-1); the first phase is pinned by
    /// global-phase invariance).
    std::uint64_t evaluations = 0;
};

/// Exhaustive maximization of s^H R s over phases restricted to the m-th
/// roots of unity, with the first phase fixed to 0. The reported value is an
/// exact re-evaluation of the winning candidate; ties prefer the candidate
/// that is lexicographically smallest in its level indices. Rejects searches
/// with m^(n-1) > 1e8.
OracleResult brute_force(const HermitianMatrix& r, int m);

/// Polish the discrete argmax with the continuous local fixed-point ascent;
/// the refined value never falls below the discrete one.
struct RefinedResult {
    PhaseVector s;
    double value = 0.0;
};
RefinedResult refine(const HermitianMatrix& r, const OracleResult& coarse, const LocalConfig& cfg = {});

}  // namespace uqp
