#include "cadlagqv/convergence.hpp"

#include <algorithm>

namespace cadlag {

std::string mode_name(ConvergenceMode m) {
    switch (m) {
    case ConvergenceMode::uniform: return "uniform";
    case ConvergenceMode::j1: return "j1";
    case ConvergenceMode::divergent: return "divergent";
    }
    return "?";
}

bool gaps_converged(const std::vector<double>& gaps, double tol) {
    if (gaps.empty()) return false;
    if (!(gaps.back() < tol)) return false;
    const std::size_t k = std::min<std::size_t>(3, gaps.size());
    for (std::size_t i = gaps.size() - k + 1; i < gaps.size(); ++i)
        if (gaps[i] > gaps[i - 1]) return false;
    return true;
}

}  // namespace cadlag
