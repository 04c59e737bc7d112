#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <utility>
#include <vector>

#include "cadlagqv/errors.hpp"
#include "cadlagqv/path.hpp"
#include "cadlagqv/skorokhod.hpp"
#include "doctest.h"
#include "support/fixtures.hpp"

namespace {

using cadlag::CadlagPath;
using cadlag::StepIncreasing;
using cadlag::TimeChange;
using cadlag::testing::make_step;
using cadlag::testing::splitmix64;
using cadlag::testing::uniform01;

// Literal re-statement of the matching walk the solver decides: place x's
// jumps one by one, consume y's jumps in order, and remember the earliest
// admissible time of the last event placed. Slow, eager about every
// constraint, and kept that way: the production kernels answer the same
// question with collapsed bookkeeping and are cross-checked against this.
struct StepsRef {
    std::vector<double> vals, jmp;
    double T = 0.0;
};

StepsRef steps_of(const CadlagPath& x, double T) {
    StepsRef s;
    s.T = T;
    const auto& ts = x.times();
    const auto& vs = x.values();
    s.vals.push_back(vs.front());
    for (std::size_t k = 1; k < ts.size() && ts[k] <= T; ++k) {
        if (vs[k] != s.vals.back()) {
            s.jmp.push_back(ts[k]);
            s.vals.push_back(vs[k]);
        }
    }
    return s;
}

bool reference_within(const CadlagPath& xp, const CadlagPath& yp, double T,
                      double eps) {
    const StepsRef X = steps_of(xp, T), Y = steps_of(yp, T);
    const std::size_t p = X.jmp.size(), q = Y.jmp.size();
    const double INF = std::numeric_limits<double>::infinity();
    auto free_ok = [&](std::size_t i, std::size_t j) {
        return std::fabs(X.vals[i] - Y.vals[j]) <= eps;
    };
    auto alo = [&](std::size_t i) {
        return X.jmp[i - 1] == T ? T : X.jmp[i - 1] - eps;
    };
    auto ahi = [&](std::size_t i) {
        return X.jmp[i - 1] == T ? T : X.jmp[i - 1] + eps;
    };
    auto match_ok = [&](double a, double b) {
        if (a == T || b == T) return a == b;
        return std::fabs(a - b) <= eps;
    };
    std::vector<std::vector<double>> m(p + 1, std::vector<double>(q + 1, INF));
    if (!free_ok(0, 0)) return false;
    m[0][0] = 0.0;
    for (std::size_t i = 0; i <= p; ++i) {
        for (std::size_t j = 0; j <= q; ++j) {
            if (i == 0 && j == 0) continue;
            if (!free_ok(i, j)) continue;
            double best = INF;
            const bool past_end_jump = j >= 1 && Y.jmp[j - 1] == T;
            if (i >= 1 && m[i - 1][j] < INF && !past_end_jump) {
                // x's jump i placed on its own, before y's next event. A
                // jump of y at the horizon is the last event of the clock;
                // no placement can land after it.
                const double t = std::max(m[i - 1][j], alo(i));
                const double cap = std::min(ahi(i), j < q ? Y.jmp[j] : T);
                if (t <= cap) best = std::min(best, t);
            }
            if (j >= 1 && m[i][j - 1] < INF && Y.jmp[j - 1] >= m[i][j - 1])
                best = std::min(best, Y.jmp[j - 1]);
            if (i >= 1 && j >= 1 && m[i - 1][j - 1] < INF &&
                match_ok(X.jmp[i - 1], Y.jmp[j - 1]) &&
                Y.jmp[j - 1] >= m[i - 1][j - 1])
                best = std::min(best, Y.jmp[j - 1]);
            m[i][j] = best;
        }
    }
    return m[p][q] < INF;
}

// Jump times on the 0.05 lattice and values on the 0.3 lattice, so none of
// the eps probes below can sit within rounding distance of a threshold.
CadlagPath random_step(std::uint64_t& st, int max_jumps, bool monotone,
                       bool allow_jump_at_end) {
    std::vector<int> slots;
    for (int k = 1; k <= 19; ++k) slots.push_back(k);
    for (std::size_t k = slots.size(); k > 1; --k)
        std::swap(slots[k - 1], slots[splitmix64(st) % k]);
    const int nj = static_cast<int>(uniform01(st) * (max_jumps + 1));
    slots.resize(static_cast<std::size_t>(nj));
    std::sort(slots.begin(), slots.end());
    std::vector<std::pair<double, double>> changes;
    double v = 0.3 * static_cast<double>(splitmix64(st) % 4);
    const double v0 = v;
    for (int s : slots) {
        double step = 0.3 * static_cast<double>(1 + splitmix64(st) % 3);
        if (!monotone && uniform01(st) < 0.5) step = -step;
        v += step;
        changes.emplace_back(0.05 * s, v);
    }
    if (allow_jump_at_end && uniform01(st) < 0.2) {
        double step = 0.3 * static_cast<double>(1 + splitmix64(st) % 3);
        if (!monotone && uniform01(st) < 0.5) step = -step;
        changes.emplace_back(1.0, v + step);
    }
    return make_step(v0, changes, 1.0);
}

const double kEpsProbes[] = {0.017, 0.049, 0.11, 0.26, 0.52, 0.93, 1.31, 2.2};

}  // namespace

TEST_SUITE("skorokhod") {

TEST_CASE("distance of a path to itself is zero with the identity witness") {
    const CadlagPath x = cadlag::testing::two_jump_path();
    const auto res = cadlag::j1_distance_compact(x, x, 1.0);
    CHECK(res.distance == 0.0);
    CHECK(res.lambda.anchors().size() == 2);
    CHECK(res.lambda.max_displacement() == 0.0);
    CHECK(cadlag::uniform_distance(x, x, 1.0) == 0.0);
}

TEST_CASE("unit jumps at 0.3 and 0.4 are a tenth apart") {
    const CadlagPath x = cadlag::testing::step_path(0.3);
    const CadlagPath y = cadlag::testing::step_path(0.4);
    const auto res = cadlag::j1_distance_compact(x, y, 1.0);
    CHECK(res.distance == doctest::Approx(0.1));
    CHECK(cadlag::j1_distance_compact(y, x, 1.0).distance ==
          doctest::Approx(0.1));
    CHECK(cadlag::uniform_distance(x, y, 1.0) == doctest::Approx(1.0));
    CHECK(cadlag::j1_within(x, y, 1.0, 0.11));
    CHECK_FALSE(cadlag::j1_within(x, y, 1.0, 0.09));
    CHECK(res.lambda.max_displacement() == doctest::Approx(0.1).epsilon(1e-4));
    CHECK(cadlag::evaluate_time_change_cost(x, y, 1.0, res.lambda) <=
          res.distance + 1e-6);
}

TEST_CASE("simultaneous jumps differing in size cost the value gap") {
    const CadlagPath x = CadlagPath::single_jump(0.0, 1.0, 0.5, 1.0);
    const CadlagPath y = CadlagPath::single_jump(0.0, 3.0, 0.5, 1.0);
    CHECK(cadlag::j1_distance_compact(x, y, 1.0).distance ==
          doctest::Approx(2.0));
}

TEST_CASE("a plateau cannot be threaded through a single jump of the other path") {
    // x walks 0 -> 1 -> 2 with a short plateau at 1; y jumps 0 -> 2 at once.
    // Sliding both of x's jumps next to 0.55 still leaves the plateau value 1
    // facing y's values {0, 2}, so the distance is the full unit, not the
    // 0.05 a bookkeeping shortcut that forgets intermediate states reports.
    const CadlagPath x = make_step(0.0, {{0.5, 1.0}, {0.6, 2.0}}, 1.0);
    const CadlagPath y = make_step(0.0, {{0.55, 2.0}}, 1.0);
    const auto res = cadlag::j1_distance_compact(x, y, 1.0);
    CHECK(res.distance == doctest::Approx(1.0));
    CHECK_FALSE(cadlag::j1_within(x, y, 1.0, 0.9));
    CHECK(cadlag::j1_within(x, y, 1.0, 1.0));
    CHECK(cadlag::j1_distance_oracle(x, y, 1.0) == doctest::Approx(1.0));
    CHECK(cadlag::evaluate_time_change_cost(x, y, 1.0, res.lambda) <=
          res.distance + 1e-6);
}

TEST_CASE("vertical shifts cannot be absorbed by a time change") {
    const CadlagPath x = cadlag::testing::two_jump_path();
    const CadlagPath shift = CadlagPath::constant(0.7, 1.0);
    const CadlagPath y = cadlag::pointwise_combine(x, shift, 1.0, 1.0);
    CHECK(cadlag::uniform_distance(x, y, 1.0) == doctest::Approx(0.7));
    CHECK(cadlag::j1_distance_compact(x, y, 1.0).distance ==
          doctest::Approx(0.7));
}

TEST_CASE("restriction drops events beyond the horizon") {
    const CadlagPath x = cadlag::testing::step_path(0.3);
    const CadlagPath y = cadlag::testing::step_path(0.4);
    // y has not jumped yet at 0.35, so x's unit jump is unmatched.
    CHECK(cadlag::j1_distance_compact(x, y, 0.35).distance ==
          doctest::Approx(1.0));
    // Same at 0.3 where x's jump sits exactly at the horizon.
    CHECK(cadlag::j1_distance_compact(x, y, 0.30).distance ==
          doctest::Approx(1.0));
    // Just before x's jump both restrictions are identically zero.
    CHECK(cadlag::j1_distance_compact(x, y, 0.29).distance == 0.0);
}

TEST_CASE("a jump at the horizon only matches a jump at the horizon") {
    const CadlagPath x = CadlagPath::single_jump(0.0, 1.0, 1.0, 1.0);
    const CadlagPath y = CadlagPath::single_jump(0.0, 1.0, 0.999, 1.0);
    // Time changes fix the endpoint, so the 0.001 offset cannot be bridged.
    CHECK(cadlag::j1_distance_compact(x, y, 1.0).distance ==
          doctest::Approx(1.0));
    CHECK(cadlag::j1_distance_compact(y, x, 1.0).distance ==
          doctest::Approx(1.0));
    const CadlagPath z = CadlagPath::single_jump(0.0, 1.2, 1.0, 1.0);
    CHECK(cadlag::j1_distance_compact(x, z, 1.0).distance ==
          doctest::Approx(0.2));
}

TEST_CASE("half line metric discounts unit horizons") {
    const CadlagPath x1 = cadlag::testing::step_path(0.3);
    const CadlagPath y1 = cadlag::testing::step_path(0.4);
    CHECK(cadlag::j1_distance_halfline(x1, y1) == doctest::Approx(0.05));

    // Equal before 1, apart by a unit jump afterwards: the first term is
    // saved by nudging the horizon off the jump, the second contributes 1/4.
    const CadlagPath x2 = CadlagPath::constant(0.0, 2.0);
    const CadlagPath y2 = CadlagPath::single_jump(0.0, 1.0, 1.0, 2.0);
    CHECK(cadlag::j1_distance_halfline(x2, y2) == doctest::Approx(0.25));

    CHECK(cadlag::j1_distance_halfline(x1, x1) == 0.0);
    CHECK_THROWS_AS(cadlag::j1_distance_halfline(x1, x2), cadlag::domain_error);
}

TEST_CASE("tiny value differences survive the bracket search") {
    const CadlagPath x = CadlagPath::constant(0.0, 1.0);
    const CadlagPath y = CadlagPath::constant(1e-9, 1.0);
    const auto res = cadlag::j1_distance_compact(x, y, 1.0);
    CHECK(res.distance == doctest::Approx(1e-9).epsilon(1e-6));
}

TEST_CASE("oracle pins the matched jump pair") {
    const CadlagPath x = cadlag::testing::step_path(0.3);
    const CadlagPath y = cadlag::testing::step_path(0.4);
    CHECK(cadlag::j1_distance_oracle(x, y, 1.0) == doctest::Approx(0.1));
    CHECK_THROWS_AS(
        cadlag::j1_distance_oracle(CadlagPath::single_jump(0.0, 1.0, 1.0, 1.0),
                                   y, 1.0),
        cadlag::domain_error);
}

TEST_CASE("oracle never undercuts the solver and stays close on spaced jumps") {
    std::uint64_t st = 0x5b1cull;
    for (int trial = 0; trial < 15; ++trial) {
        const bool mono = trial % 2 == 0;
        const CadlagPath x = random_step(st, 3, mono, false);
        const CadlagPath y = random_step(st, 3, mono, false);
        const double d = cadlag::j1_distance_compact(x, y, 1.0).distance;
        const double o = cadlag::j1_distance_oracle(x, y, 1.0);
        CAPTURE(trial);
        CHECK(o >= d - 1e-9);
        CHECK(o - d <= 2e-3);
    }
}

TEST_CASE("decision kernels agree with the reference walk") {
    std::uint64_t st = 0xfeedull;
    for (int trial = 0; trial < 60; ++trial) {
        const CadlagPath x = random_step(st, 6, false, true);
        const CadlagPath y = random_step(st, 6, false, true);
        for (double eps : kEpsProbes) {
            const bool want = reference_within(x, y, 1.0, eps);
            CAPTURE(trial);
            CAPTURE(eps);
            CHECK(cadlag::j1_within(x, y, 1.0, eps) == want);
            CHECK(cadlag::detail::j1_feasible(x, y, 1.0, eps, 1) == want);
        }
    }
}

TEST_CASE("interval kernel matches the bitset kernel on monotone paths") {
    std::uint64_t st = 0xabc1ull;
    for (int trial = 0; trial < 60; ++trial) {
        const CadlagPath x = random_step(st, 6, true, true);
        const CadlagPath y = random_step(st, 6, true, true);
        for (double eps : kEpsProbes) {
            const bool want = reference_within(x, y, 1.0, eps);
            CAPTURE(trial);
            CAPTURE(eps);
            CHECK(cadlag::detail::j1_feasible(x, y, 1.0, eps, 2) == want);
            CHECK(cadlag::detail::j1_feasible(x, y, 1.0, eps, 1) == want);
        }
    }
}

TEST_CASE("distance is a symmetric metric below the uniform bound") {
    std::uint64_t st = 0x77aaull;
    for (int trial = 0; trial < 25; ++trial) {
        const bool mono = trial % 3 == 0;
        const CadlagPath x = random_step(st, 5, mono, true);
        const CadlagPath y = random_step(st, 5, mono, true);
        const CadlagPath z = random_step(st, 5, mono, true);
        const double dxy = cadlag::j1_distance_compact(x, y, 1.0).distance;
        const double dyx = cadlag::j1_distance_compact(y, x, 1.0).distance;
        const double dxz = cadlag::j1_distance_compact(x, z, 1.0).distance;
        const double dyz = cadlag::j1_distance_compact(y, z, 1.0).distance;
        CAPTURE(trial);
        CHECK(dxy == doctest::Approx(dyx).epsilon(1e-12));
        CHECK(dxy <= cadlag::uniform_distance(x, y, 1.0) + 1e-12);
        CHECK(dxz <= dxy + dyz + 1e-9);
        CHECK(cadlag::j1_distance_compact(x, x, 1.0).distance == 0.0);
    }
}

TEST_CASE("witness time changes reproduce the distance") {
    std::uint64_t st = 0x1234ull;
    for (int trial = 0; trial < 20; ++trial) {
        const CadlagPath x = random_step(st, 5, trial % 2 == 0, true);
        const CadlagPath y = random_step(st, 5, trial % 2 == 0, true);
        const auto res = cadlag::j1_distance_compact(x, y, 1.0);
        const double replay =
            cadlag::evaluate_time_change_cost(x, y, 1.0, res.lambda);
        CAPTURE(trial);
        CHECK(replay <= res.distance + 1e-6);
        CHECK(replay >= res.distance - 1e-6);
    }
}

TEST_CASE("time change evaluation and inversion") {
    const TimeChange id = TimeChange::identity(2.0);
    CHECK(id(0.7) == doctest::Approx(0.7));
    CHECK(id.max_displacement() == 0.0);

    const TimeChange tc(
        {{0.0, 0.0}, {0.5, 0.6}, {1.0, 1.0}});
    CHECK(tc(0.25) == doctest::Approx(0.3));
    CHECK(tc(0.5) == doctest::Approx(0.6));
    CHECK(tc.inverse(0.6) == doctest::Approx(0.5));
    CHECK(tc.inverse(0.8) == doctest::Approx(0.75));
    CHECK(tc.max_displacement() == doctest::Approx(0.1));

    CHECK_THROWS_AS(TimeChange({{0.0, 0.0}, {0.5, 0.4}, {0.5, 0.6}, {1.0, 1.0}}),
                    cadlag::domain_error);
    CHECK_THROWS_AS(TimeChange({{0.1, 0.0}, {1.0, 1.0}}), cadlag::domain_error);
    CHECK_THROWS_AS(TimeChange({{0.0, 0.0}, {1.0, 0.9}}), cadlag::domain_error);
}

TEST_CASE("classification prefers the uniform mode and falls back to J1") {
    auto jump_seq = [](double size, double at) {
        return StepIncreasing(CadlagPath::single_jump(0.0, size, at, 1.0));
    };
    const StepIncreasing cand = jump_seq(1.0, 0.5);

    std::vector<StepIncreasing> uni;
    for (int k = 1; k <= 5; ++k) uni.push_back(jump_seq(1.0 + std::ldexp(1.0, -k - 6), 0.5));
    CHECK(cadlag::classify_convergence_mode(uni, cand, 1.0, 1e-2) ==
          cadlag::ConvergenceMode::uniform);

    // Jump times drift to 0.5 from the right: the sup norm gap stays one.
    std::vector<StepIncreasing> j1;
    for (int k = 1; k <= 5; ++k) j1.push_back(jump_seq(1.0, 0.5 + std::ldexp(1.0, -k - 6)));
    const auto rep = cadlag::classify_convergence(j1, cand, 1.0, 1e-2);
    CHECK(rep.mode == cadlag::ConvergenceMode::j1);
    CHECK(rep.uniform_distances.back() == doctest::Approx(1.0));
    CHECK(rep.distances.back() < 1e-2);

    std::vector<StepIncreasing> div;
    for (int k = 1; k <= 6; ++k) div.push_back(jump_seq(k % 2 == 0 ? 1.0 : 2.0, 0.5));
    CHECK(cadlag::classify_convergence_mode(div, cand, 1.0, 1e-2) ==
          cadlag::ConvergenceMode::divergent);

    std::vector<StepIncreasing> short_seq{cand, cand};
    CHECK_THROWS_AS(cadlag::classify_convergence(short_seq, cand, 1.0, 1e-2),
                    cadlag::domain_error);
}

TEST_CASE("functional limits evaluate along the sequence") {
    auto F = [](const StepIncreasing& f) { return f(1.0); };
    std::vector<StepIncreasing> seq;
    for (int k = 1; k <= 4; ++k)
        seq.push_back(StepIncreasing(
            CadlagPath::single_jump(0.0, 1.0 + std::ldexp(1.0, -k), 0.5, 1.0)));
    const StepIncreasing cand(CadlagPath::single_jump(0.0, 1.0, 0.5, 1.0));
    const auto rep = cadlag::functional_limit(F, seq, cand);
    CHECK(rep.candidate_value == doctest::Approx(1.0));
    REQUIRE(rep.values.size() == 4);
    CHECK(rep.gaps.back() == doctest::Approx(0.0625));
    CHECK(std::is_sorted(rep.gaps.rbegin(), rep.gaps.rend()));
}

}  // TEST_SUITE
