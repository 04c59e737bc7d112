#include "doctest.h"

#include <cmath>
#include <vector>

#include "cadlagqv/errors.hpp"
#include "cadlagqv/partition.hpp"
#include "support/fixtures.hpp"

using cadlag::Partition;
using cadlag::PartitionScheme;

TEST_SUITE("partitions") {

TEST_CASE("dyadic and uniform generators hit the documented grids") {
    auto d1 = PartitionScheme::dyadic(1.0).generate(1);
    CHECK(d1.points() == std::vector<double>{0.0, 0.5, 1.0});
    auto d2 = PartitionScheme::dyadic(1.0).generate(2);
    CHECK(d2.points() == std::vector<double>{0.0, 0.25, 0.5, 0.75, 1.0});
    auto u3 = PartitionScheme::uniform(1.0).generate(3);
    CHECK(u3.points() == std::vector<double>{0.0, 0.25, 0.5, 0.75, 1.0});
}

TEST_CASE("dyadic grids on a non-dyadic horizon append the horizon") {
    auto p = PartitionScheme::dyadic(0.9).generate(1);
    CHECK(p.points() == std::vector<double>{0.0, 0.5, 0.9});
    CHECK(p.horizon() == 0.9);
}

TEST_CASE("mesh looks only at intervals meeting [0, T]") {
    CHECK(PartitionScheme::dyadic(1.0).generate(3).mesh() == 0.125);
    Partition p({0.0, 0.1, 1.0});
    CHECK(p.mesh(1.0) == 0.9);
    CHECK(p.mesh(0.05) == 0.1);
    CHECK(p.mesh(0.1) == 0.9);
    CHECK_THROWS_AS(p.mesh(1.5), cadlag::domain_error);
}

TEST_CASE("locating partition points around a time") {
    auto p = PartitionScheme::dyadic(1.0).generate(2);
    CHECK(p.last_at_or_before(0.7071) == 0.5);
    CHECK(p.last_at_or_before(0.25) == 0.25);
    CHECK(p.last_at_or_before(0.1) == 0.0);
    CHECK(p.last_strictly_before(0.25) == 0.0);
    CHECK(p.last_strictly_before(0.7071) == 0.5);
    CHECK(p.last_strictly_before(0.26) == 0.25);
    CHECK_THROWS_AS(p.last_strictly_before(0.0), cadlag::domain_error);
    CHECK_THROWS_AS(p.last_at_or_before(-0.5), cadlag::domain_error);
}

TEST_CASE("successor walks the grid and pins the last point to itself") {
    auto d1 = PartitionScheme::dyadic(1.0).generate(1);
    CHECK(d1.successor(0.5) == 1.0);
    CHECK(d1.successor(1.0) == 1.0);
    auto d3 = PartitionScheme::dyadic(1.0).generate(3);
    CHECK(d3.successor(0.125) == 0.25);
    CHECK_THROWS_AS(d3.successor(0.3), cadlag::domain_error);
}

TEST_CASE("dyadic mesh halves exactly and uniform mesh shrinks like 1/(n+1)") {
    auto s = PartitionScheme::dyadic(1.0);
    for (int n = 0; n < 12; ++n)
        CHECK(s.generate(n + 1).mesh() * 2.0 == s.generate(n).mesh());
    CHECK(s.generate(10).mesh() == std::ldexp(1.0, -10));

    auto s9 = PartitionScheme::dyadic(0.9);
    double prev = s9.generate(0).mesh();
    for (int n = 1; n < 10; ++n) {
        double m = s9.generate(n).mesh();
        CHECK(m <= prev);
        prev = m;
    }
    CHECK(prev <= std::ldexp(1.0, -9));

    auto u = PartitionScheme::uniform(1.0);
    for (int n = 0; n < 8; ++n)
        CHECK(u.generate(n).mesh() == doctest::Approx(1.0 / (n + 1)));
}

TEST_CASE("ordering relations between the locators") {
    auto p = PartitionScheme::dyadic(1.0).generate(3);
    std::uint64_t s = 42;
    for (int i = 0; i < 300; ++i) {
        double t = 1e-12 + (1.0 - 1e-12) * cadlag::testing::uniform01(s);
        double lab = p.last_at_or_before(t);
        double lsb = p.last_strictly_before(t);
        CHECK(lsb <= lab);
        CHECK(lab <= t);
        CHECK((lsb == lab) == !p.contains(t));
        CHECK(p.successor(lab) >= t);
    }
    CHECK(p.contains(0.75));
    CHECK(!p.contains(0.7071));
}

TEST_CASE("explicit level lists are validated") {
    std::vector<Partition> good{Partition({0.0, 0.5, 1.0}),
                                Partition({0.0, 0.25, 0.5, 1.0})};
    auto s = PartitionScheme::from_levels(good);
    CHECK(s.kind_name() == "explicit");
    CHECK(s.max_level() == 1);
    CHECK(s.generate(1).size() == 4);
    CHECK_THROWS_AS(s.generate(2), cadlag::domain_error);

    CHECK_THROWS_AS(PartitionScheme::from_levels(
                        {Partition({0.0, 1.0}), Partition({0.0, 0.5, 2.0})}),
                    cadlag::domain_error);

    CHECK_THROWS_AS(PartitionScheme::from_levels(
                        {Partition({0.0, 0.25, 0.5, 1.0}), Partition({0.0, 0.9, 1.0})}),
                    cadlag::domain_error);
}

TEST_CASE("partition construction errors") {
    CHECK_THROWS_AS(Partition({0.5, 1.0}), cadlag::domain_error);
    CHECK_THROWS_AS(Partition({0.0, 0.5, 0.5}), cadlag::domain_error);
    CHECK_THROWS_AS(Partition({0.0}), cadlag::domain_error);
    CHECK_THROWS_AS(PartitionScheme::dyadic(0.0), cadlag::domain_error);
    CHECK_THROWS_AS(PartitionScheme::dyadic(1.0).generate(-1), cadlag::domain_error);
    CHECK_THROWS_AS(PartitionScheme::uniform(1.0).generate(-1), cadlag::domain_error);
}

}
