#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "cadlagqv/errors.hpp"
#include "cadlagqv/mc.hpp"
#include "cadlagqv/multidim.hpp"
#include "cadlagqv/partition.hpp"
#include "cadlagqv/path.hpp"
#include "cadlagqv/qv.hpp"
#include "doctest.h"

namespace {

using cadlag::CadlagPath;
using cadlag::CauchyReport;
using cadlag::domain_error;
using cadlag::Ensemble;
using cadlag::PartitionScheme;
using cadlag::ProcessModel;
using cadlag::VectorCadlagPath;

const PartitionScheme kDyadic = PartitionScheme::dyadic(1.0);

double min_jump_gap(const CadlagPath& x) {
    double gap = x.horizon();
    const auto& jumps = x.jumps();
    if (!jumps.empty()) gap = std::min(gap, jumps.front().first);
    for (std::size_t k = 1; k < jumps.size(); ++k)
        gap = std::min(gap, jumps[k].first - jumps[k - 1].first);
    return gap;
}

}  // namespace

TEST_SUITE("mc") {

TEST_CASE("sampling is reproducible and seed-separated") {
    const ProcessModel bm = ProcessModel::brownian(1.0, 1.0, 1u << 10);
    const CadlagPath a = cadlag::sample_path(bm, 42);
    const CadlagPath b = cadlag::sample_path(bm, 42);
    REQUIRE(a.times() == b.times());
    REQUIRE(a.values() == b.values());

    CHECK(cadlag::path_seed(7, 0) != cadlag::path_seed(7, 1));
    CHECK(cadlag::path_seed(7, 1) != cadlag::path_seed(8, 1));
    const CadlagPath c = cadlag::sample_path(bm, cadlag::path_seed(7, 0));
    const CadlagPath d = cadlag::sample_path(bm, cadlag::path_seed(7, 1));
    CHECK(c.values() != d.values());

    Ensemble e{ProcessModel::brownian(1.0, 1.0, 1u << 12), 10, 99};
    const CauchyReport r1 = cadlag::cauchy_in_probability(e, kDyadic, 5, 8, 0.3, 0.1);
    const CauchyReport r2 = cadlag::cauchy_in_probability(e, kDyadic, 5, 8, 0.3, 0.1);
    CHECK(r1.fractions == r2.fractions);
    CHECK(r1.pass == r2.pass);
}

TEST_CASE("zero-volatility brownian path is identically zero") {
    const CadlagPath x = cadlag::sample_path(ProcessModel::brownian(0.0, 1.0, 256), 5);
    REQUIRE(x.times().size() == 257);
    for (double v : x.values()) CHECK(v == 0.0);
    CHECK(x.jumps().empty());
    CHECK(cadlag::q_n(x, kDyadic.generate(5))(1.0) == 0.0);
}

TEST_CASE("poisson path has unit jumps and exact increment sum") {
    const ProcessModel pp = ProcessModel::poisson(2.0, 1.0, 1.0);
    const CadlagPath x = cadlag::sample_path(pp, 1007);
    REQUIRE(!x.jumps().empty());
    for (const auto& [u, size] : x.jumps()) {
        CHECK(u > 0.0);
        CHECK(u < 1.0);
        CHECK(size == 1.0);
    }
    // Arrivals in distinct level-10 cells make every squared increment
    // exactly 1; re-pin the seed if this draw ever crowds a cell.
    REQUIRE(min_jump_gap(x) > kDyadic.generate(10).mesh());
    const double total = cadlag::q_n(x, kDyadic.generate(10))(1.0);
    CHECK(total == static_cast<double>(x.jumps().size()));

    const ProcessModel cp = ProcessModel::compound_poisson(
        2.0, [](std::mt19937_64&) { return 3.0; }, 1.0);
    const CadlagPath y = cadlag::sample_path(cp, 1007);
    REQUIRE(min_jump_gap(y) > kDyadic.generate(10).mesh());
    CHECK(cadlag::q_n(y, kDyadic.generate(10))(1.0) ==
          9.0 * static_cast<double>(y.jumps().size()));
}

TEST_CASE("jump diffusion carries declared jumps on a diffusive grid") {
    const ProcessModel jd = ProcessModel::jump_diffusion(
        0.5, 3.0, [](std::mt19937_64& g) {
            return std::uniform_real_distribution<double>(0.5, 1.5)(g);
        },
        1.0, 1u << 10);
    const CadlagPath x = cadlag::sample_path(jd, 77);
    REQUIRE(!x.jumps().empty());
    for (const auto& [u, size] : x.jumps()) {
        CHECK(u > 0.0);
        CHECK(size >= 0.5);
        CHECK(size <= 1.5);
    }
    // Knot times must stay sorted with exactly one duplicate per jump.
    const auto& times = x.times();
    std::size_t dup = 0;
    for (std::size_t k = 1; k < times.size(); ++k) {
        REQUIRE(times[k] >= times[k - 1]);
        if (times[k] == times[k - 1]) ++dup;
    }
    CHECK(dup == x.jumps().size());
    // With the same seed the pure diffusion part matches brownian sampling.
    const CadlagPath bm =
        cadlag::sample_path(ProcessModel::brownian(0.5, 1.0, 1u << 10), 77);
    const double t_first = x.jumps().front().first;
    const int probe = static_cast<int>(t_first * 1024.0 * 0.5);
    const double tg = static_cast<double>(probe) / 1024.0;
    CHECK(x.evaluate(tg) == bm.evaluate(tg));
}

TEST_CASE("white noise ensemble never becomes cauchy") {
    Ensemble e{ProcessModel::white_noise(1.0, 1.0, 1u << 10), 20, 11};
    const CauchyReport rep = cadlag::cauchy_in_probability(e, kDyadic, 3, 6, 0.1, 0.05);
    REQUIRE(rep.fractions.size() == 3);
    for (double f : rep.fractions) CHECK(f == 1.0);
    CHECK(!rep.pass);
}

TEST_CASE("brownian ensemble passes the cauchy fraction rule") {
    Ensemble e{ProcessModel::brownian(1.0, 1.0, 1u << 12), 40, 2024};
    const CauchyReport rep = cadlag::cauchy_in_probability(e, kDyadic, 6, 10, 0.25, 0.05);
    REQUIRE(rep.pair_levels == std::vector<int>{6, 7, 8, 9});
    CHECK(rep.pass);
    CHECK(rep.fractions.back() <= 0.05);
}

TEST_CASE("poisson ensemble passes the cauchy fraction rule") {
    Ensemble e{ProcessModel::poisson(2.0, 1.0, 1.0), 30, 31337};
    const CauchyReport rep = cadlag::cauchy_in_probability(e, kDyadic, 5, 9, 0.05, 0.05);
    CHECK(rep.pass);
}

TEST_CASE("ucp verdict separates diffusion from off-grid jumps") {
    SUBCASE("brownian increment sums track t uniformly") {
        Ensemble e{ProcessModel::brownian(1.0, 1.0, 1u << 12), 30, 555};
        const auto target = [](std::size_t, const CadlagPath&) {
            return cadlag::linear_target(1.0, 1.0, 1024);
        };
        const auto rep = cadlag::ucp_vs_j1(e, kDyadic, 6, 10, target, 0.25);
        CHECK(rep.uniform_decays);
        CHECK(rep.verdict == "UCP");
    }
    SUBCASE("poisson increment sums converge only after time deformation") {
        Ensemble e{ProcessModel::poisson(2.0, 1.0, 1.0), 30, 777};
        const auto target = [](std::size_t, const CadlagPath& x) {
            return cadlag::squared_jump_target(x);
        };
        const auto rep = cadlag::ucp_vs_j1(e, kDyadic, 6, 10, target, 0.15);
        CHECK(!rep.uniform_decays);
        CHECK(rep.j1_decays);
        CHECK(rep.verdict == "J1-only");
    }
    SUBCASE("white noise matches no target at all") {
        Ensemble e{ProcessModel::white_noise(1.0, 1.0, 1u << 10), 20, 888};
        const auto target = [](std::size_t, const CadlagPath& x) {
            return cadlag::squared_jump_target(x);  // zero path: no jumps
        };
        const auto rep = cadlag::ucp_vs_j1(e, kDyadic, 3, 6, target, 0.25);
        CHECK(!rep.uniform_decays);
        CHECK(!rep.j1_decays);
        CHECK(rep.verdict == "neither");
    }
}

TEST_CASE("ensemble mean matches a serial recomputation") {
    Ensemble e{ProcessModel::poisson(2.0, 1.0, 1.0), 25, 4242};
    const std::vector<double> mean = cadlag::ensemble_mean_qv(e, kDyadic, 6, 9, 1.0);
    REQUIRE(mean.size() == 4);
    for (int level = 6; level <= 9; ++level) {
        double acc = 0.0;
        for (std::size_t i = 0; i < e.paths; ++i) {
            const CadlagPath x =
                cadlag::sample_path(e.model, cadlag::path_seed(e.base_seed, i));
            acc += cadlag::q_n(x, kDyadic.generate(level))(1.0);
        }
        CHECK(mean[static_cast<std::size_t>(level - 6)] ==
              acc / static_cast<double>(e.paths));
    }

    Ensemble flat{ProcessModel::brownian(0.0, 1.0, 1u << 12), 5, 1};
    for (double v : cadlag::ensemble_mean_qv(flat, kDyadic, 6, 9, 1.0))
        CHECK(v == 0.0);
}

TEST_CASE("componentwise reduction handles matrix increment sums") {
    const ProcessModel bm = ProcessModel::brownian(1.0, 1.0, 1u << 12);
    const auto independent = [&](std::uint64_t seed) {
        return VectorCadlagPath({cadlag::sample_path(bm, cadlag::path_seed(seed, 1)),
                                 cadlag::sample_path(bm, cadlag::path_seed(seed, 2))});
    };
    const auto rep =
        cadlag::componentwise_reduction(independent, 15, 909, kDyadic, 6, 10, 0.25, 0.1);
    REQUIRE(rep.dimension == 2);
    REQUIRE(rep.fractions.size() == 4);
    CHECK(rep.pass);
    for (char ok : rep.entry_pass) CHECK(ok);

    const ProcessModel wn = ProcessModel::white_noise(1.0, 1.0, 1u << 10);
    const auto tainted = [&](std::uint64_t seed) {
        return VectorCadlagPath({cadlag::sample_path(bm, cadlag::path_seed(seed, 1)),
                                 cadlag::sample_path(wn, cadlag::path_seed(seed, 2))});
    };
    const auto bad =
        cadlag::componentwise_reduction(tainted, 10, 909, kDyadic, 5, 8, 0.25, 0.1);
    CHECK(!bad.pass);
    CHECK(!bad.entry_pass[3]);  // the white-noise diagonal diverges

    const auto scalar = [&](std::uint64_t seed) {
        return VectorCadlagPath({cadlag::sample_path(bm, seed)});
    };
    CHECK_THROWS_AS(
        cadlag::componentwise_reduction(scalar, 5, 1, kDyadic, 5, 8, 0.25, 0.1),
        domain_error);
}

TEST_CASE("model and ensemble validation") {
    CHECK_THROWS_AS(ProcessModel::brownian(-1.0), domain_error);
    CHECK_THROWS_AS(ProcessModel::brownian(1.0, 0.0), domain_error);
    CHECK_THROWS_AS(ProcessModel::brownian(1.0, 1.0, 1), domain_error);
    CHECK_THROWS_AS(ProcessModel::poisson(-2.0), domain_error);
    CHECK_THROWS_AS(ProcessModel::compound_poisson(1.0, nullptr), domain_error);
    CHECK_THROWS_AS(
        ProcessModel::jump_diffusion(1.0, 1.0, nullptr), domain_error);
    CHECK_THROWS_AS(ProcessModel::white_noise(-0.5), domain_error);

    Ensemble empty{ProcessModel::brownian(1.0), 0, 1};
    CHECK_THROWS_AS(cadlag::cauchy_in_probability(empty, kDyadic, 4, 6, 0.1, 0.05),
                    domain_error);
    Ensemble e{ProcessModel::brownian(1.0, 1.0, 1u << 12), 5, 1};
    CHECK_THROWS_AS(cadlag::cauchy_in_probability(e, kDyadic, 4, 6, 0.0, 0.05),
                    domain_error);
    CHECK_THROWS_AS(cadlag::cauchy_in_probability(e, kDyadic, 6, 6, 0.1, 0.05),
                    domain_error);

    // 256 grid cells cannot feed level 8 partitions: 4 increments per cell
    // would need resolution 1024.
    Ensemble coarse{ProcessModel::brownian(1.0, 1.0, 256), 5, 1};
    CHECK_THROWS_AS(cadlag::cauchy_in_probability(coarse, kDyadic, 4, 8, 0.1, 0.05),
                    domain_error);

    Ensemble longer{ProcessModel::poisson(1.0, 1.0, 2.0), 5, 1};
    CHECK_THROWS_AS(cadlag::cauchy_in_probability(longer, kDyadic, 4, 6, 0.1, 0.05),
                    domain_error);

    const auto id_target = [](std::size_t, const CadlagPath& x) { return x; };
    CHECK_THROWS_AS(
        cadlag::prob_convergence_estimate(e, kDyadic, 4, 6, nullptr, 0.1),
        domain_error);
    CHECK_THROWS_AS(cadlag::ucp_vs_j1(e, kDyadic, 4, 6, id_target, 0.1, -0.1),
                    domain_error);
    CHECK_THROWS_AS(cadlag::linear_target(1.0, 1.0, 0), domain_error);
}

TEST_CASE("per-level exceedance fractions decrease toward the target") {
    Ensemble e{ProcessModel::poisson(2.0, 1.0, 1.0), 30, 606};
    const auto target = [](std::size_t, const CadlagPath& x) {
        return cadlag::squared_jump_target(x);
    };
    const auto rep = cadlag::prob_convergence_estimate(e, kDyadic, 4, 9, target, 0.1);
    REQUIRE(rep.levels == std::vector<int>{4, 5, 6, 7, 8, 9});
    CHECK(rep.fractions.front() >= rep.fractions.back());
    CHECK(rep.fractions.back() <= 0.1);
}

}
