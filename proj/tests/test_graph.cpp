#include <doctest.h>

#include <map>
#include <numeric>
#include <set>

#include "crb/errors.hpp"
#include "crb/graph.hpp"
#include "crb/rng.hpp"
#include "test_support.hpp"

using namespace crb;

TEST_CASE("topological sort orders an empty graph by index") {
    const Dag g({"a", "b", "c"}, {});
    CHECK(topological_sort(g).order == std::vector<int>{0, 1, 2});
}

TEST_CASE("topological sort of a chain") {
    const Dag g({"a", "b", "c"}, {{0, 1}, {1, 2}});
    CHECK(topological_sort(g).order == std::vector<int>{0, 1, 2});
}

TEST_CASE("topological sort breaks ties by ascending vertex index") {
    // a -> b <- d, b -> c; valid orders are adbc/dabc/..., the tie-break
    // selects a first, then d.
    const Dag g({"a", "b", "c", "d"}, {{0, 1}, {3, 1}, {1, 2}});
    CHECK(topological_sort(g).order == std::vector<int>{0, 3, 1, 2});
}

TEST_CASE("cycles are rejected") {
    CHECK_THROWS_AS(topological_sort(3, {{0, 1}, {1, 2}, {2, 0}}), Error);
    CHECK_THROWS_AS(Dag({"a", "b"}, {{0, 1}, {1, 0}}), Error);
}

TEST_CASE("dag construction validates input") {
    CHECK_THROWS_AS(Dag({"a", "a"}, {}), Error);           // duplicate name
    CHECK_THROWS_AS(Dag({"a", "b"}, {{0, 0}}), Error);     // self loop
    CHECK_THROWS_AS(Dag({"a", "b"}, {{0, 1}, {0, 1}}), Error);  // duplicate edge
    CHECK_THROWS_AS(Dag({"a", "b"}, {{0, 2}}), Error);     // out of range
}

TEST_CASE("partial graphs reject overlapping edge sets") {
    CHECK_THROWS_AS(Cpdag({"a", "b"}, {{0, 1}}, {{0, 1}}), Error);
    CHECK_THROWS_AS(Cpdag({"a", "b"}, {{1, 0}}, {{0, 1}}), Error);
    CHECK_THROWS_AS(Cpdag({"a", "b"}, {}, {{1, 1}}), Error);
    // normalization: undirected pairs are stored with the low index first
    const Cpdag g({"a", "b"}, {}, {{1, 0}});
    CHECK(g.has_undirected(0, 1));
    CHECK(g.has_undirected(1, 0));
}

TEST_CASE("single-vertex random graph has no edges") {
    const Dag g = random_er_dag(1, 0, 7);
    CHECK(g.n_vertices() == 1);
    CHECK(g.edges().empty());
}

TEST_CASE("full density yields the complete dag") {
    const Dag g = random_er_dag(10, 45, 3);
    CHECK(g.edges().size() == 45);
    CHECK_THROWS_AS(random_er_dag(10, 46, 3), Error);
}

TEST_CASE("expected edge count matches the requested density") {
    double total = 0.0;
    const int n_seeds = 10000;
    for (int s = 0; s < n_seeds; ++s) {
        total += static_cast<double>(random_er_dag(10, 10, static_cast<std::uint64_t>(s)).edges().size());
    }
    const double mean = total / n_seeds;
    CHECK(mean > 9.7);
    CHECK(mean < 10.3);
}

TEST_CASE("generated graphs are always acyclic") {
    for (int s = 0; s < 200; ++s) {
        const Dag g = random_er_dag(8, 12, 1000 + static_cast<std::uint64_t>(s));
        CHECK_NOTHROW(topological_sort(g));
    }
}

TEST_CASE("markov boundary on the chain") {
    const Dag g({"a", "b", "c"}, {{0, 1}, {1, 2}});
    CHECK(markov_boundary(g, 1) == std::vector<int>{0, 2});
    CHECK(markov_boundary(g, std::string("b")) == std::vector<int>{0, 2});
}

TEST_CASE("markov boundary includes co-parents") {
    const Dag g({"a", "b", "c", "d"}, {{0, 1}, {3, 1}, {1, 2}});
    CHECK(markov_boundary(g, 1) == std::vector<int>{0, 2, 3});
}

TEST_CASE("markov boundary of an isolated vertex is empty") {
    const Dag g({"a", "b"}, {});
    CHECK(markov_boundary(g, 0).empty());
    CHECK_THROWS_AS(markov_boundary(g, 5), Error);
}

TEST_CASE("markov boundary equals the minimal separating superset") {
    for (int s = 0; s < 25; ++s) {
        const Dag g = random_er_dag(6, 7, 500 + static_cast<std::uint64_t>(s));
        for (int target = 0; target < g.n_vertices(); ++target) {
            const std::vector<int> mb = markov_boundary(g, target);
            const auto minimal = testing::minimal_separating_supersets(g, target);
            REQUIRE(minimal.size() == 1);
            CHECK(minimal.front() == mb);
            CHECK(std::find(mb.begin(), mb.end(), target) == mb.end());
        }
    }
}

TEST_CASE("shd basic cases") {
    const std::vector<std::string> names{"a", "b"};
    const Cpdag empty(names, {}, {});
    const Cpdag undirected(names, {}, {{0, 1}});
    const Cpdag forward(names, {{0, 1}}, {});
    const Cpdag backward(names, {{1, 0}}, {});
    CHECK(shd(empty, empty) == 0);
    CHECK(shd(empty, undirected) == 1);
    CHECK(shd(forward, backward) == 1);
    CHECK(shd(forward, undirected) == 1);
    CHECK_THROWS_AS(shd(empty, Cpdag({"a", "x"}, {}, {})), Error);
}

TEST_CASE("shd is a metric on fixed vertex sets") {
    RngStream rng(99);
    for (int trial = 0; trial < 100; ++trial) {
        const Cpdag a = testing::random_cpdag(5, rng);
        const Cpdag b = testing::random_cpdag(5, rng);
        const Cpdag c = testing::random_cpdag(5, rng);
        CHECK(shd(a, a) == 0);
        CHECK(shd(a, b) == shd(b, a));
        CHECK(shd(a, c) <= shd(a, b) + shd(b, c));
    }
}

TEST_CASE("chain completes to an undirected skeleton") {
    const Dag g({"a", "b", "c"}, {{0, 1}, {1, 2}});
    const Cpdag completed = dag_to_cpdag(g);
    CHECK(completed.directed_edges().empty());
    CHECK(completed.undirected_edges() == std::vector<Edge>{{0, 1}, {1, 2}});
}

TEST_CASE("collider orientation survives completion") {
    const Dag g({"a", "b", "c"}, {{0, 2}, {1, 2}});
    const Cpdag completed = dag_to_cpdag(g);
    CHECK(completed.undirected_edges().empty());
    CHECK(completed.has_directed(0, 2));
    CHECK(completed.has_directed(1, 2));
}

TEST_CASE("single vertex completes to itself") {
    const Cpdag completed = dag_to_cpdag(Dag({"a"}, {}));
    CHECK(completed.n_vertices() == 1);
    CHECK(completed.directed_edges().empty());
    CHECK(completed.undirected_edges().empty());
}

TEST_CASE("completion is idempotent") {
    for (int s = 0; s < 40; ++s) {
        const Dag g = random_er_dag(6, 8, 900 + static_cast<std::uint64_t>(s));
        const Cpdag once = dag_to_cpdag(g);
        CHECK(meek_closure(once) == once);
    }
}

TEST_CASE("markov equivalent dags complete identically") {
    // exhaustive over all labelled DAGs on 4 vertices
    const auto dags = testing::all_dags(4, {"a", "b", "c", "d"});
    std::map<testing::MecSignature, Cpdag> representative;
    for (const auto& g : dags) {
        const auto sig = testing::mec_signature(g);
        const Cpdag completed = dag_to_cpdag(g);
        const auto it = representative.find(sig);
        if (it == representative.end()) {
            representative.emplace(sig, completed);
        } else {
            CHECK(it->second == completed);
        }
    }
    CHECK(representative.size() > 1);
}

TEST_CASE("d-separation matches the path-blocking oracle") {
    const Dag chain({"a", "b", "c"}, {{0, 1}, {1, 2}});
    CHECK(d_separated(chain, 0, 2, {1}));
    CHECK_FALSE(d_separated(chain, 0, 2, {}));

    const Dag collider({"a", "b", "c"}, {{0, 2}, {1, 2}});
    CHECK(d_separated(collider, 0, 1, {}));
    CHECK_FALSE(d_separated(collider, 0, 1, {2}));

    RngStream rng(7);
    for (int s = 0; s < 30; ++s) {
        const Dag g = random_er_dag(5, 6, 3000 + static_cast<std::uint64_t>(s));
        for (int x = 0; x < 5; ++x) {
            for (int y = x + 1; y < 5; ++y) {
                std::vector<int> candidates;
                for (int v = 0; v < 5; ++v) {
                    if (v != x && v != y) candidates.push_back(v);
                }
                for (std::uint32_t mask = 0; mask < 8; ++mask) {
                    std::vector<int> cond;
                    for (int k = 0; k < 3; ++k) {
                        if (mask & (1u << k)) cond.push_back(candidates[static_cast<std::size_t>(k)]);
                    }
                    CHECK(d_separated(g, x, y, cond) == testing::path_d_separated(g, x, y, cond));
                }
            }
        }
    }
}

TEST_CASE("d-separation enumeration finds the chain statement") {
    const Dag chain({"a", "b", "c"}, {{0, 1}, {1, 2}});
    const auto statements = enumerate_d_separations(chain, 2);
    REQUIRE(statements.size() == 1);
    CHECK(statements.front().i == 0);
    CHECK(statements.front().j == 2);
    CHECK(statements.front().conditioning == std::vector<int>{1});
}
