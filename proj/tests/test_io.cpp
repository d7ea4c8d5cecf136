// Tests for deterministic CSV emission and hashing.
#include <catch2/catch.hpp>

#include <cstdlib>
#include <string>

#include "decolab/io.hpp"

using decolab::CsvWriter;
using decolab::fnv1a64;
using decolab::format_double;
using decolab::to_hex;

TEST_CASE("format_double round-trips bit patterns", "[io]") {
    for (const double v : {0.0, 1.0, -1.0, 1.0 / 3.0, 6.02214076e23, -2.2250738585072014e-308,
                           3.141592653589793, 1e-300}) {
        const std::string s = format_double(v);
        REQUIRE(std::strtod(s.c_str(), nullptr) == v);
    }
}

TEST_CASE("fnv1a64 matches published vectors", "[io]") {
    REQUIRE(fnv1a64("") == 0xcbf29ce484222325ull);
    REQUIRE(fnv1a64("a") == 0xaf63dc4c8601ec8cull);
    REQUIRE(to_hex(0xcbf29ce484222325ull) == "cbf29ce484222325");
}

TEST_CASE("csv writer is deterministic and shape-checked", "[io]") {
    CsvWriter a({"time", "re", "im", "abs"});
    CsvWriter b({"time", "re", "im", "abs"});
    for (int i = 0; i < 5; ++i) {
        const double t = 0.1 * i;
        a.row({format_double(t), format_double(std::cos(t)), format_double(-std::sin(t)),
               format_double(1.0)});
        b.row({format_double(t), format_double(std::cos(t)), format_double(-std::sin(t)),
               format_double(1.0)});
    }
    REQUIRE(a.contents() == b.contents());
    REQUIRE(a.hash() == b.hash());
    REQUIRE(a.contents().substr(0, 15) == "time,re,im,abs\n");
    REQUIRE_THROWS_AS(a.row({"1", "2"}), std::invalid_argument);
}
