#pragma once

#include <string>
#include <vector>

namespace cadlag {

// How a sequence of paths was observed to settle: in the uniform metric, only
// after time changes (J1), or not at all within the levels computed.
enum class ConvergenceMode { uniform, j1, divergent };

std::string mode_name(ConvergenceMode m);

// Per-level diagnostics produced by limit estimation. `distances` holds the
// J1 gaps the stopping rule looked at (consecutive levels, or to a fixed
// target when one is known); `uniform_distances` the sup-norm gaps.
struct ConvergenceReport {
    std::vector<int> levels;
    std::vector<double> distances;
    std::vector<double> uniform_distances;
    ConvergenceMode mode = ConvergenceMode::divergent;
    double tol = 0.0;

    bool converged() const { return mode != ConvergenceMode::divergent; }
};

// Shared stopping rule: the last min(3, size) entries are non-increasing and
// the final one is below tol. Equal entries count as non-increasing so that
// exactly-zero gap sequences pass.
bool gaps_converged(const std::vector<double>& gaps, double tol);

}  // namespace cadlag
