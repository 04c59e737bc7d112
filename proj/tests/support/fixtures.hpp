#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "cadlagqv/path.hpp"

namespace cadlag::testing {

// Unit jump at t0: the indicator of [t0, horizon].
inline CadlagPath step_path(double t0, double horizon = 1.0) {
    return CadlagPath::single_jump(0.0, 1.0, t0, horizon);
}

// Jump of +1 at 0.25 and +2 at 0.75 on [0, 1].
inline CadlagPath two_jump_path() {
    return CadlagPath({0.0, 0.25, 0.25, 0.75, 0.75},
                      {0.0, 0.0, 1.0, 1.0, 3.0}, 1.0);
}

// f sampled on the uniform grid with `cells` cells over [0, horizon]. The
// declared jump set is empty, so the library treats the result as a
// continuous path no matter how wiggly the samples are.
inline CadlagPath sampled_path(const std::function<double(double)>& f,
                               std::size_t cells, double horizon = 1.0) {
    std::vector<double> t, v;
    t.reserve(cells + 1);
    v.reserve(cells + 1);
    for (std::size_t k = 0; k <= cells; ++k) {
        double tk = (static_cast<double>(k) * horizon) / static_cast<double>(cells);
        if (k == cells) tk = horizon;
        t.push_back(tk);
        v.push_back(f(tk));
    }
    return CadlagPath(t, v, horizon);
}

inline CadlagPath linear_path(std::size_t cells = 1024, double horizon = 1.0) {
    return sampled_path([](double t) { return t; }, cells, horizon);
}

// Step path from an initial value and ordered (time, new value) changes,
// each declared as a jump.
inline CadlagPath make_step(double v0,
                            const std::vector<std::pair<double, double>>& changes,
                            double horizon) {
    std::vector<double> t{0.0}, v{v0};
    for (const auto& [tk, vk] : changes) {
        t.push_back(tk);
        v.push_back(v.back());
        t.push_back(tk);
        v.push_back(vk);
    }
    return CadlagPath(std::move(t), std::move(v), horizon);
}

// Deterministic mix for fixture randomness, independent of any seeding the
// library itself does.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline double uniform01(std::uint64_t& state) {
    return static_cast<double>(splitmix64(state) >> 11) * 0x1.0p-53;
}

}  // namespace cadlag::testing
