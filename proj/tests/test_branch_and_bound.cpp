#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "mssc/branch_and_bound.hpp"
#include "test_util.hpp"

using namespace mssc;
using Catch::Approx;

namespace {

Dataset unit_square() {
    Dataset d;
    d.points.resize(4, 2);
    d.points << 0, 0, 1, 0, 0, 1, 1, 1;
    return d;
}

SolverConfig quiet_config(std::uint64_t seed = 7) {
    SolverConfig cfg;
    cfg.rng_seed = seed;
    return cfg;
}

}  // namespace

TEST_CASE("unit square solves to the oracle optimum", "[bb]") {
    const SolveResult r = solve_exact(unit_square(), 2, quiet_config());
    CHECK(r.status == SolveStatus::optimal);
    CHECK(r.objective == Approx(1.0));
    CHECK(r.certified_gap <= 1e-6);
}

TEST_CASE("k equal to n returns singletons at the root", "[bb]") {
    const Dataset d = testutil::random_dataset(7, 2, 800);
    const SolveResult r = solve_exact(d, 7, quiet_config());
    CHECK(r.status == SolveStatus::optimal);
    CHECK(r.objective == 0.0);
    CHECK(r.nodes_explored == 1);
    CHECK(r.optimum.k == 7);
}

TEST_CASE("k out of range is rejected", "[bb]") {
    const Dataset d = testutil::random_dataset(5, 2, 801);
    CHECK_THROWS_AS(solve_exact(d, 6, quiet_config()), std::invalid_argument);
    CHECK_THROWS_AS(solve_exact(d, 1, quiet_config()), std::invalid_argument);
}

TEST_CASE("oracle equivalence on random instances", "[bb]") {
    for (std::uint64_t s = 0; s < 12; ++s) {
        const int n = 6 + static_cast<int>(s % 5);
        const int k = 2 + static_cast<int>(s % 2);
        const Dataset d = testutil::random_dataset(n, 2, 6000 + s);
        const BruteForceResult oracle = brute_force_optimum(d, k);
        const SolveResult r = solve_exact(d, k, quiet_config(s));
        REQUIRE(r.status == SolveStatus::optimal);
        REQUIRE(r.objective == Approx(oracle.objective).epsilon(1e-9).margin(1e-9));
    }
}

TEST_CASE("solve works with a forced deep search", "[bb]") {
    // tiny enumeration budget forces genuine SDP branching
    SolverConfig cfg = quiet_config(3);
    cfg.enumeration_budget = 1;
    const Dataset d = testutil::random_dataset(8, 2, 6100);
    const BruteForceResult oracle = brute_force_optimum(d, 2);
    const SolveResult r = solve_exact(d, 2, cfg);
    CHECK(r.status == SolveStatus::optimal);
    CHECK(r.objective == Approx(oracle.objective).epsilon(1e-9).margin(1e-9));
    CHECK(r.nodes_explored >= 1);
}

TEST_CASE("anytime soundness under a node limit", "[bb]") {
    SolverConfig cfg = quiet_config(4);
    cfg.node_limit = 2;
    cfg.enumeration_budget = 1;
    const Dataset d = testutil::random_dataset(9, 2, 6200);
    const BruteForceResult oracle = brute_force_optimum(d, 3);
    const SolveResult r = solve_exact(d, 3, cfg);
    // limits never misreport optimality, and the incumbent stays feasible
    if (r.status != SolveStatus::optimal) CHECK(r.certified_gap > cfg.gap_tol);
    CHECK(r.objective >= oracle.objective - 1e-9);
    CHECK(is_valid_assignment(r.optimum));
    CHECK(r.optimum.k == 3);
}

TEST_CASE("branching pair selection", "[bb]") {
    SECTION("genuine clustering has no ambiguous pair") {
        const Clustering c = testutil::random_clustering(6, 2, 6300);
        const ProjectorMatrix z = projector_from_clustering(c);
        CHECK_FALSE(branching_pair(z.Z, ConstraintSet(6)).has_value());
    }
    SECTION("single ambiguous pair is picked") {
        Eigen::MatrixXd z = Eigen::MatrixXd::Identity(3, 3);
        z(0, 0) = 0.5;
        z(1, 1) = 0.5;
        z(0, 1) = z(1, 0) = 0.25;
        ConstraintSet cs(3);
        cs = cs.with_cannot_link(0, 2).value();
        cs = cs.with_cannot_link(1, 2).value();
        const auto pick = branching_pair(z, cs);
        REQUIRE(pick.has_value());
        CHECK(*pick == IndexPair{0, 1});
    }
    SECTION("deterministic for identical input") {
        const Dataset d = testutil::random_dataset(7, 2, 6400);
        SdpProblem p{gram(d), 2, ConstraintSet(7), CutPool{}};
        const SdpResult r = solve_relaxation(p, 1e-6, 20000);
        const auto a = branching_pair(r.Z, ConstraintSet(7));
        const auto b = branching_pair(r.Z, ConstraintSet(7));
        CHECK(a == b);
    }
}

TEST_CASE("progress log is machine parsable", "[bb]") {
    std::ostringstream log;
    SolverConfig cfg = quiet_config(5);
    cfg.log = &log;
    const Dataset d = testutil::random_dataset(7, 2, 6500);
    solve_exact(d, 2, cfg);
    const std::string text = log.str();
    CHECK(text.find("event=done") != std::string::npos);
    CHECK(text.find("objective=") != std::string::npos);
}

TEST_CASE("incumbent equals objective of returned clustering", "[bb]") {
    for (std::uint64_t s = 0; s < 6; ++s) {
        const Dataset d = testutil::random_dataset(8, 3, 6600 + s);
        const SolveResult r = solve_exact(d, 3, quiet_config(s));
        CHECK(r.objective == Approx(mssc_objective(d, r.optimum)).epsilon(1e-12));
        CHECK(is_canonical(r.optimum));
    }
}
