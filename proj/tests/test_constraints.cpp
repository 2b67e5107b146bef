#include <catch2/catch_amalgamated.hpp>

#include "mssc/constraints.hpp"

using namespace mssc;

TEST_CASE("must-link closure merges groups", "[constraints]") {
    auto cs = ConstraintSet::create(5, {{0, 1}, {1, 2}}, {});
    REQUIRE(cs.has_value());
    CHECK(cs->same_group(0, 2));
    CHECK_FALSE(cs->same_group(0, 3));
    CHECK(cs->group_count() == 3);
    const auto groups = cs->groups();
    CHECK(groups[0] == std::vector<int>{0, 1, 2});
}

TEST_CASE("cannot-link inside a merged group is infeasible", "[constraints]") {
    CHECK_FALSE(ConstraintSet::create(4, {{0, 1}, {1, 2}}, {{0, 2}}).has_value());
    CHECK_FALSE(ConstraintSet::create(4, {}, {{1, 1}}).has_value());
    // merge after the cannot-link is just as infeasible
    auto cs = ConstraintSet::create(4, {}, {{0, 2}});
    REQUIRE(cs.has_value());
    CHECK_FALSE(cs->with_must_link(0, 2).has_value());
    auto merged = cs->with_must_link(0, 1);
    REQUIRE(merged.has_value());
    CHECK_FALSE(merged->with_must_link(1, 2).has_value());
}

TEST_CASE("pair queries and decidedness", "[constraints]") {
    auto cs = ConstraintSet::create(4, {{0, 1}}, {{0, 2}}).value();
    CHECK(cs.decided(0, 1));
    CHECK(cs.decided(1, 2)); // via group-level cannot-link
    CHECK(cs.separated(1, 2));
    CHECK_FALSE(cs.decided(0, 3));
    CHECK_FALSE(cs.all_decided());

    auto full = ConstraintSet::create(3, {{0, 1}}, {{0, 2}}).value();
    CHECK(full.all_decided());
    CHECK(full.group_count() == 2);
}

TEST_CASE("satisfied_by checks labels pair by pair", "[constraints]") {
    const auto cs = ConstraintSet::create(4, {{0, 1}}, {{2, 3}}).value();
    CHECK(cs.satisfied_by({0, 0, 1, 0}));
    CHECK_FALSE(cs.satisfied_by({0, 1, 1, 0}));
    CHECK_FALSE(cs.satisfied_by({0, 0, 1, 1}));
}

TEST_CASE("pigeonhole clique detection", "[constraints]") {
    // four pairwise-separated points cannot fit in three clusters
    const auto cs =
        ConstraintSet::create(5, {}, {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}).value();
    CHECK(cs.has_cl_clique_exceeding(3));
    CHECK_FALSE(cs.has_cl_clique_exceeding(4));
}
