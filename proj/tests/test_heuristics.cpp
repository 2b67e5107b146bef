#include <catch2/catch_amalgamated.hpp>

#include "mssc/kmeans.hpp"
#include "test_util.hpp"

using namespace mssc;
using Catch::Approx;

namespace {

Dataset two_blobs(int per_blob, std::uint64_t seed, double separation = 50.0) {
    Rng rng(seed);
    Dataset d;
    d.points.resize(2 * per_blob, 2);
    for (int i = 0; i < per_blob; ++i) {
        d.points(i, 0) = rng.normal();
        d.points(i, 1) = rng.normal();
        d.points(per_blob + i, 0) = separation + rng.normal();
        d.points(per_blob + i, 1) = rng.normal();
    }
    return d;
}

}  // namespace

TEST_CASE("kmeans++ seeding basics", "[heuristics]") {
    SECTION("k = n selects every point") {
        const Dataset d = testutil::random_dataset(6, 2, 4);
        const Centroids c = kmeans_pp_seed(d, 6, 9);
        for (Eigen::Index i = 0; i < 6; ++i) {
            bool found = false;
            for (int j = 0; j < 6; ++j)
                if ((c.c.row(j) - d.points.row(i)).norm() == 0.0) found = true;
            REQUIRE(found);
        }
    }
    SECTION("same seed gives identical centers") {
        const Dataset d = testutil::random_dataset(20, 3, 5);
        const Centroids a = kmeans_pp_seed(d, 4, 1234);
        const Centroids b = kmeans_pp_seed(d, 4, 1234);
        CHECK(a.c == b.c);
    }
    SECTION("far blobs each get a center almost surely") {
        const Dataset d = two_blobs(10, 17);
        int split = 0;
        for (std::uint64_t seed = 0; seed < 100; ++seed) {
            const Centroids c = kmeans_pp_seed(d, 2, seed);
            if (std::abs(c.c(0, 0) - c.c(1, 0)) > 25.0) ++split;
        }
        CHECK(split >= 99);
    }
}

TEST_CASE("lloyd fixed point and descent", "[heuristics]") {
    SECTION("initialized at a local optimum it stays put") {
        Dataset d;
        d.points.resize(4, 2);
        d.points << 0, 0, 1, 0, 0, 1, 1, 1;
        Centroids init;
        init.c.resize(2, 2);
        init.c << 0, 0.5, 1, 0.5;
        init.sizes = {2, 2};
        const HeuristicResult r = lloyd(d, init);
        CHECK(r.converged);
        CHECK(r.objective == Approx(1.0));
        CHECK(r.clustering.labels == std::vector<int>{0, 1, 0, 1});
    }
    SECTION("reaches the brute-force optimum on the unit square") {
        Dataset d;
        d.points.resize(4, 2);
        d.points << 0, 0, 1, 0, 0, 1, 1, 1;
        Centroids init;
        init.c.resize(2, 2);
        init.c << 0, 0.5, 1, 0.5;
        init.sizes = {2, 2};
        CHECK(lloyd(d, init).objective == Approx(1.0));
    }
    SECTION("objective never increases across restarts vs subsequent polish") {
        for (std::uint64_t seed = 0; seed < 100; ++seed) {
            const Dataset d = testutil::random_dataset(12, 2, 7000 + seed);
            const Centroids init = kmeans_pp_seed(d, 3, seed);
            const HeuristicResult first = lloyd(d, init, 1);
            const HeuristicResult full = lloyd(d, init, 300);
            REQUIRE(full.objective <= first.objective + 1e-9);
        }
    }
}

TEST_CASE("cop_kmeans honors constraints", "[heuristics]") {
    SECTION("empty constraints match plain restarted lloyd") {
        const Dataset d = testutil::random_dataset(15, 2, 42);
        const ConstraintSet cs(15);
        const auto cop = cop_kmeans(d, 3, cs, 10, 99);
        REQUIRE(cop.has_value());
        double best_plain = std::numeric_limits<double>::infinity();
        for (int r = 0; r < 10; ++r) {
            const Centroids init = kmeans_pp_seed(d, 3, Rng::derive(99, static_cast<std::uint64_t>(r)));
            best_plain = std::min(best_plain, lloyd(d, init).objective);
        }
        CHECK(cop->objective == Approx(best_plain));
    }
    SECTION("must-link across far blobs is enforced") {
        const Dataset d = two_blobs(6, 3);
        const auto cs = ConstraintSet::create(12, {{0, 6}}, {}).value();
        const auto r = cop_kmeans(d, 2, cs, 10, 7);
        REQUIRE(r.has_value());
        CHECK(r->clustering.labels[0] == r->clustering.labels[6]);
        CHECK(cs.satisfied_by(r->clustering.labels));
    }
    SECTION("pigeonhole infeasibility fails every restart") {
        const Dataset d = testutil::random_dataset(6, 2, 8);
        const auto cs = ConstraintSet::create(6, {}, {{0, 1}, {0, 2}, {1, 2}}).value();
        CHECK_FALSE(cop_kmeans(d, 2, cs, 20, 5).has_value());
    }
    SECTION("infeasible constraint sets are a construction failure, not a restart failure") {
        CHECK_FALSE(ConstraintSet::create(6, {{0, 1}}, {{0, 1}}).has_value());
    }
}

TEST_CASE("heuristic results are never better than the oracle", "[heuristics]") {
    int trials = 0;
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        const int n = 6 + static_cast<int>(seed % 4);
        const int k = 2 + static_cast<int>(seed % 2);
        const Dataset d = testutil::random_dataset(n, 2, 9000 + seed);
        const BruteForceResult oracle = brute_force_optimum(d, k);
        const auto ref = testutil::random_clustering(n, k, 9500 + seed);
        const ConstraintSet cs = testutil::random_feasible_constraints(ref, 1, 1, 9700 + seed);
        const auto r = cop_kmeans(d, k, cs, 5, seed);
        if (!r) continue;
        ++trials;
        REQUIRE(r->objective >= oracle.objective - 1e-9);
        REQUIRE(cs.satisfied_by(r->clustering.labels));
    }
    CHECK(trials >= 150);
}

TEST_CASE("cop_kmeans is deterministic", "[heuristics]") {
    const Dataset d = testutil::random_dataset(14, 3, 77);
    const auto ref = testutil::random_clustering(14, 3, 78);
    const ConstraintSet cs = testutil::random_feasible_constraints(ref, 2, 2, 79);
    const auto a = cop_kmeans(d, 3, cs, 8, 555);
    const auto b = cop_kmeans(d, 3, cs, 8, 555);
    REQUIRE(a.has_value());
    REQUIRE(b.has_value());
    CHECK(a->objective == b->objective);
    CHECK(a->clustering == b->clustering);
}
