#pragma once

#include <string>
#include <vector>

namespace uqp {

/// One benchmark table line: per-(n, scenario) aggregate over the trials.
struct BenchRow {
    int n = 0;
    std::string rank_or_case;
    int trials = 0;
    int count_gamma_one = 0;
    double avg_gamma = 0.0;
    double min_gamma = 0.0;
    double avg_seconds = 0.0;
};

/// Command-line driver (gen / solve / bench / caf). Takes the arguments
/// without the program name and returns the process exit code: 0 success,
/// 1 runtime or validation failure, 2 usage error.
int run(const std::vector<std::string>& args);

}  // namespace uqp
