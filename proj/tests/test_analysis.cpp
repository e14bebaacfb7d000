// Copyright (c) LAF contributors.
// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include "laf/analysis.hpp"
#include "laf/semantics.hpp"

using namespace laf;

namespace {

std::string fixture(const std::string& name) { return std::string(LAF_FIXTURE_DIR) + "/" + name; }

const std::vector<std::optional<unsigned>> kLimits = {0U, 1U, 2U, std::nullopt};

}  // namespace

TEST_CASE("limit comparison") {
    SUBCASE("absolute value example gains an assertion at the unlimited setting") {
        Program p = load_program(fixture("fig1.while"), {});
        auto rows = compare_limits(p, kLimits, {});
        REQUIRE(rows.size() == kLimits.size());
        CHECK(rows.back().unproved < rows.front().unproved);
        CHECK(rows.front().refined == 0);
        for (std::size_t i = 1; i < rows.size(); ++i) {
            CHECK(rows[i].unproved <= rows[i - 1].unproved);
        }
    }
    SUBCASE("straight-line assertion is the same under every limit") {
        Program p = load_program_text("x := 2; y := x + 1; assert(y == 3);", "while", {});
        auto rows = compare_limits(p, kLimits, {});
        REQUIRE(rows.size() == 4);
        for (const auto& r : rows) {
            CHECK(r.unproved == 0);
            CHECK(r.refined == 0);
        }
    }
}

TEST_CASE("product statuses") {
    Program p = load_program(fixture("fig10.while"), {});
    Report r = analyze_program(p, domain_names(), {});
    REQUIRE(r.asserts.size() == 1);
    CHECK(r.asserts[0].status == Status::ProvedTrue);
    CHECK(r.asserts[0].decided_by == "relational");
    CHECK(r.asserts[0].per_domain.size() == domain_names().size());
    CHECK(exit_code(r) == 0);
    Report itv = analyze_program(p, {"interval"}, {});
    CHECK(exit_code(itv) == 1);
    CHECK(itv.times.size() == 1);
}

TEST_CASE("proved statuses agree with the oracle on the fixtures") {
    for (const char* name : {"fig1.while", "abs.while", "fig10.while", "refuted.while", "fig1.laf", "fig10.laf"}) {
        for (unsigned unroll : {0U, 2U}) {
            LoadOptions lo;
            lo.unroll = unroll;
            Program p = load_program(fixture(name), lo);
            Report r = analyze_program(p, domain_names(), {}, OracleWindow{-3, 3});
            CAPTURE(name);
            CAPTURE(unroll);
            for (const auto& a : r.asserts) {
                CAPTURE(a.name);
                REQUIRE(a.oracle.has_value());
                CHECK_FALSE(a.contradicts_oracle);
            }
        }
    }
}

TEST_CASE("load errors") {
    CHECK_THROWS_AS(load_program(fixture("bad.while"), {}), Error);
    CHECK_THROWS_AS(load_program(fixture("missing.while"), {}), Error);
    CHECK_THROWS_AS(make_domain("octagon", {}), Error);
}
