#include <string>
#include <vector>

#include "cadlagqv/csv.hpp"
#include "cadlagqv/errors.hpp"
#include "cadlagqv/partition.hpp"
#include "cadlagqv/path.hpp"
#include "doctest.h"
#include "support/fixtures.hpp"

namespace {

using cadlag::CadlagPath;
using cadlag::format_error;
using cadlag::PartitionScheme;
using cadlag::VectorCadlagPath;
using cadlag::testing::two_jump_path;

}  // namespace

TEST_SUITE("csv") {

TEST_CASE("scalar path round-trips knot for knot") {
    const CadlagPath x({0.0, 0.25, 0.25, 0.75, 0.75, 1.0},
                       {0.0, 0.0, 1.0, 1.0, 3.0, 3.0}, 1.0);
    const CadlagPath back = cadlag::read_path_csv(cadlag::write_path_csv(x));
    CHECK(back.times() == x.times());
    CHECK(back.values() == x.values());
    CHECK(back.horizon() == x.horizon());
    CHECK(back.jumps() == x.jumps());

    // A path flat after its last knot keeps its horizon through one extra
    // row; the evaluations are untouched.
    const CadlagPath early = two_jump_path();
    const CadlagPath back2 = cadlag::read_path_csv(cadlag::write_path_csv(early));
    CHECK(back2.horizon() == early.horizon());
    CHECK(back2.jumps() == early.jumps());
    for (double t : {0.0, 0.25, 0.5, 0.75, 0.9, 1.0})
        CHECK(back2.evaluate(t) == early.evaluate(t));
}

TEST_CASE("repeated time decodes as left limit then value") {
    const std::string text =
        "t,v\n"
        "0,0\n"
        "0.25,0\n"
        "0.25,1\n"
        "1,1\n";
    const CadlagPath x = cadlag::read_path_csv(text);
    CHECK(x.left_limit(0.25) == 0.0);
    CHECK(x.evaluate(0.25) == 1.0);
    REQUIRE(x.jumps().size() == 1);
    CHECK(x.jumps().front() == std::pair<double, double>{0.25, 1.0});
    CHECK(x.horizon() == 1.0);
}

TEST_CASE("vector path round-trips through the union of knots") {
    const CadlagPath a = cadlag::testing::make_step(0.0, {{0.25, 1.0}}, 1.0);
    const CadlagPath b = cadlag::testing::make_step(2.0, {{0.75, -1.0}}, 1.0);
    const VectorCadlagPath v({a, b});
    const VectorCadlagPath back =
        cadlag::read_vector_path_csv(cadlag::write_vector_path_csv(v));
    REQUIRE(back.dimension() == 2);
    for (double t : {0.0, 0.2, 0.25, 0.5, 0.75, 1.0}) {
        CHECK(back.component(0).evaluate(t) == a.evaluate(t));
        CHECK(back.component(1).evaluate(t) == b.evaluate(t));
    }
    CHECK(back.component(0).jumps() == a.jumps());
    CHECK(back.component(1).jumps() == b.jumps());

    // The writer duplicates union knots; a component flat at the other's
    // jump time must not grow a spurious jump through the round trip.
    CHECK(back.jump_times() == std::vector<double>{0.25, 0.75});
}

TEST_CASE("header variants") {
    CHECK(cadlag::read_path_csv("t,v1\n0,3\n1,3\n").evaluate(0.5) == 3.0);
    CHECK(cadlag::read_vector_path_csv("t,v\n0,3\n1,3\n").dimension() == 1);
    CHECK(cadlag::read_vector_path_csv("t,v1,v2\n0,1,2\n1,1,2\n").dimension() == 2);
    CHECK_THROWS_AS(cadlag::read_path_csv("v,t\n0,0\n"), format_error);
    CHECK_THROWS_AS(cadlag::read_path_csv("t,v2\n0,0\n"), format_error);
    CHECK_THROWS_AS(cadlag::read_vector_path_csv("t,v2,v1\n0,0,0\n"), format_error);
    CHECK_THROWS_AS(cadlag::read_path_csv("t,v1,v2\n0,1,2\n1,1,2\n"), format_error);
}

TEST_CASE("malformed rows are format errors") {
    CHECK_THROWS_AS(cadlag::read_path_csv(""), format_error);
    CHECK_THROWS_AS(cadlag::read_path_csv("t,v\n"), format_error);
    CHECK_THROWS_AS(cadlag::read_path_csv("t,v\n0,abc\n"), format_error);
    CHECK_THROWS_AS(cadlag::read_path_csv("t,v\n0,1,2\n"), format_error);
    CHECK_THROWS_AS(cadlag::read_path_csv("t,v\n0,0\n0.5,1\n0.25,2\n"),
                    format_error);
    CHECK_THROWS_AS(
        cadlag::read_path_csv("t,v\n0,0\n0.5,1\n0.5,2\n0.5,3\n1,3\n"),
        format_error);
    // Path invariants violated by well-formed text also read as bad input.
    CHECK_THROWS_AS(cadlag::read_path_csv("t,v\n0.5,1\n1,1\n"), format_error);
    CHECK_THROWS_AS(cadlag::read_path_csv("t,v\n0,nan\n1,0\n"), format_error);
}

TEST_CASE("windows line endings and blank lines are tolerated") {
    const CadlagPath x =
        cadlag::read_path_csv("t,v\r\n0,0\r\n\r\n0.5,2\r\n1,2\r\n\r\n");
    CHECK(x.evaluate(0.75) == 2.0);
    CHECK(x.horizon() == 1.0);
}

TEST_CASE("scheme file reads one partition per line") {
    const std::string text =
        "0,0.5,1\n"
        "0,0.25,0.5,0.75,1\n";
    const PartitionScheme scheme = cadlag::read_scheme_csv(text);
    CHECK(scheme.horizon() == 1.0);
    CHECK(scheme.generate(0).size() == 3);
    CHECK(scheme.generate(1).mesh() == 0.25);

    CHECK_THROWS_AS(cadlag::read_scheme_csv(""), format_error);
    CHECK_THROWS_AS(cadlag::read_scheme_csv("0,1\n0,0.5,2\n"), format_error);
    CHECK_THROWS_AS(cadlag::read_scheme_csv("0,x,1\n"), format_error);
}

TEST_CASE("file helpers report unusable paths") {
    CHECK_THROWS_AS(cadlag::read_text_file("/nonexistent/no.csv"), format_error);
    CHECK_THROWS_AS(cadlag::write_text_file("/nonexistent/no.csv", "x"),
                    format_error);
}

}
