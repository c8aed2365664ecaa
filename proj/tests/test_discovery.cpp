#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <map>
#include <set>

#include "crb/bootstrap.hpp"
#include "crb/discovery.hpp"
#include "crb/errors.hpp"
#include "crb/rng.hpp"
#include "crb/scm.hpp"

using namespace crb;

namespace {

Dataset lingam_pair(int n, std::uint64_t seed) {
    // x2 = 0.8 x1 + centered uniform noise, x1 uniform
    Dag dag({"x1", "x2"}, {{0, 1}});
    std::map<Edge, double> weights{{{0, 1}, 0.8}};
    std::vector<NoiseSpec> noise{NoiseSpec::uniform(1.0), NoiseSpec::uniform(1.0)};
    return sample(LinearScm(dag, weights, noise), n, seed);
}

}  // namespace

TEST_CASE("duplicated columns are degenerate") {
    Eigen::MatrixXd values(100, 2);
    values.col(0).setLinSpaced(100, -1, 1);
    values.col(1) = values.col(0);
    const Dataset data({"a", "b"}, values);
    CHECK_THROWS_AS(partial_correlation_test(data, "a", "b", {}, {}), Error);
}

TEST_CASE("too few rows are rejected") {
    Eigen::MatrixXd values = Eigen::MatrixXd::Random(4, 3);
    const Dataset data({"a", "b", "c"}, values);
    CHECK_THROWS_AS(partial_correlation_test(data, "a", "b", {"c"}, {}), Error);
}

TEST_CASE("config validation") {
    CiTestConfig bad;
    bad.alpha = 1.5;
    CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("chain data separates a from c given b and not marginally") {
    int accepted_given_b = 0;
    int rejected_marginal = 0;
    const int n_seeds = 150;
    for (int s = 0; s < n_seeds; ++s) {
        const Dataset data = sample(make_unit_chain_scm(), 20000, 3000 + static_cast<std::uint64_t>(s));
        if (partial_correlation_test(data, "a", "c", {"b"}, {}).independent) ++accepted_given_b;
        if (!partial_correlation_test(data, "a", "c", {}, {}).independent) ++rejected_marginal;
    }
    // acceptance holds with probability 1 - alpha = 0.95 asymptotically
    CHECK(accepted_given_b >= static_cast<int>(0.90 * n_seeds));
    CHECK(rejected_marginal == n_seeds);
}

TEST_CASE("pc leaves independent columns unconnected") {
    // per pair the false-keep rate is alpha, so the empty-graph rate is
    // (1 - alpha)^3 up to higher-level corrections
    int empty_05 = 0;
    int empty_01 = 0;
    const int n_seeds = 100;
    for (int s = 0; s < n_seeds; ++s) {
        const Dag g({"a", "b", "c"}, {});
        const LinearScm scm(g, {}, std::vector<NoiseSpec>(3, NoiseSpec::gaussian(1.0)));
        const Dataset data = sample(scm, 20000, 4000 + static_cast<std::uint64_t>(s));
        const Cpdag at_05 = pc(data, {});
        CiTestConfig strict;
        strict.alpha = 0.01;
        const Cpdag at_01 = pc(data, strict);
        if (at_05.directed_edges().empty() && at_05.undirected_edges().empty()) ++empty_05;
        if (at_01.directed_edges().empty() && at_01.undirected_edges().empty()) ++empty_01;
    }
    CHECK(empty_05 >= static_cast<int>(0.78 * n_seeds));
    CHECK(empty_01 >= static_cast<int>(0.92 * n_seeds));
}

TEST_CASE("pc recovers the collider orientation") {
    Dag collider({"a", "b", "c"}, {{0, 2}, {1, 2}});
    std::map<Edge, double> weights{{{0, 2}, 1.0}, {{1, 2}, 1.0}};
    const LinearScm scm(collider, weights, std::vector<NoiseSpec>(3, NoiseSpec::gaussian(1.0)));
    int recovered = 0;
    const int n_seeds = 60;
    for (int s = 0; s < n_seeds; ++s) {
        const Dataset data = sample(scm, 20000, 5000 + static_cast<std::uint64_t>(s));
        const Cpdag result = pc(data, {});
        if (result.has_directed(0, 2) && result.has_directed(1, 2) &&
            !result.adjacent(0, 1)) {
            ++recovered;
        }
    }
    CHECK(recovered >= static_cast<int>(0.90 * n_seeds));
}

TEST_CASE("pc keeps the chain inside its equivalence class") {
    int undirected_chain = 0;
    const int n_seeds = 60;
    for (int s = 0; s < n_seeds; ++s) {
        const Dataset data = sample(make_unit_chain_scm(), 20000, 6000 + static_cast<std::uint64_t>(s));
        const Cpdag result = pc(data, {});
        if (result.has_undirected(0, 1) && result.has_undirected(1, 2) &&
            !result.adjacent(0, 2) && result.directed_edges().empty()) {
            ++undirected_chain;
        }
    }
    CHECK(undirected_chain >= static_cast<int>(0.90 * n_seeds));
}

TEST_CASE("pc is deterministic") {
    const Dataset data = sample(make_unit_chain_scm(), 5000, 7001);
    CHECK(pc(data, {}) == pc(data, {}));
}

TEST_CASE("level-zero removals are monotone in alpha") {
    CiTestConfig level0_strict;
    level0_strict.alpha = 0.01;
    level0_strict.max_cond_size = 0;
    CiTestConfig level0_loose;
    level0_loose.alpha = 0.05;
    level0_loose.max_cond_size = 0;
    for (int s = 0; s < 10; ++s) {
        const Dag g = random_er_dag(6, 6, 7100 + static_cast<std::uint64_t>(s));
        const LinearScm scm =
            random_linear_scm(g, 0.2, 1.0, NoiseSpec::gaussian(1.0), 7200 + static_cast<std::uint64_t>(s));
        const Dataset data = sample(scm, 500, 7300 + static_cast<std::uint64_t>(s));
        const Cpdag at_loose = pc(data, level0_loose);
        const Cpdag at_strict = pc(data, level0_strict);
        // every pair absent at alpha = 0.05 must be absent at alpha = 0.01
        for (int i = 0; i < 6; ++i) {
            for (int j = i + 1; j < 6; ++j) {
                if (!at_loose.adjacent(i, j)) CHECK_FALSE(at_strict.adjacent(i, j));
            }
        }
    }
}

TEST_CASE("single-column ordering is trivial") {
    Eigen::MatrixXd values(100, 1);
    values.col(0).setLinSpaced(100, -1, 1);
    const LingamResult result = direct_lingam(Dataset({"x"}, values));
    CHECK(result.causal_order == std::vector<int>{0});
    CHECK(result.b_matrix.cwiseAbs().maxCoeff() == 0.0);
    CHECK(result.graph.edges().empty());
}

TEST_CASE("constant columns cannot be ordered") {
    Eigen::MatrixXd values(100, 2);
    values.col(0).setLinSpaced(100, -1, 1);
    values.col(1).setConstant(2.0);
    CHECK_THROWS_AS(direct_lingam(Dataset({"a", "b"}, values)), Error);
}

TEST_CASE("an identifiable pair is oriented correctly") {
    int correct = 0;
    const int n_seeds = 60;
    for (int s = 0; s < n_seeds; ++s) {
        const Dataset data = lingam_pair(10000, 8000 + static_cast<std::uint64_t>(s));
        const LingamResult result = direct_lingam(data);
        if (result.causal_order == std::vector<int>{0, 1}) {
            ++correct;
            CHECK(result.b_matrix(1, 0) > 0.75);
            CHECK(result.b_matrix(1, 0) < 0.85);
        }
    }
    CHECK(correct >= static_cast<int>(0.95 * n_seeds));
}

TEST_CASE("ordering output is structurally valid") {
    const Dag g = random_er_dag(5, 6, 8101);
    const LinearScm scm = random_linear_scm(g, 0.5, 2.0, NoiseSpec::uniform(1.0), 8102);
    const Dataset data = sample(scm, 2000, 8103);
    const LingamResult result = direct_lingam(data);

    std::vector<int> sorted = result.causal_order;
    std::sort(sorted.begin(), sorted.end());
    CHECK(sorted == std::vector<int>{0, 1, 2, 3, 4});

    std::vector<int> position(5);
    for (int pos = 0; pos < 5; ++pos) {
        position[static_cast<std::size_t>(result.causal_order[static_cast<std::size_t>(pos)])] = pos;
    }
    for (int child = 0; child < 5; ++child) {
        for (int parent = 0; parent < 5; ++parent) {
            if (result.b_matrix(child, parent) != 0.0) {
                CHECK(position[static_cast<std::size_t>(parent)] <
                      position[static_cast<std::size_t>(child)]);
            }
        }
    }
    // threshold zero keeps every predecessor edge
    CHECK(result.graph.edges().size() == 10);
    const LingamResult pruned = direct_lingam(data, 0.1);
    CHECK(pruned.graph.edges().size() <= 10);

    const LingamResult again = direct_lingam(data);
    CHECK(again.causal_order == result.causal_order);
}

TEST_CASE("refit recovers true weights in the noiseless limit") {
    const Dag g = random_er_dag(4, 4, 8201);
    const LinearScm scm = random_linear_scm(g, 0.5, 2.0, NoiseSpec::uniform(1e-4), 8202);
    const Dataset data = sample(scm, 3000, 8203);
    const Eigen::MatrixXd refit = lingam_refit(data, topological_sort(g).order);
    for (const auto& [p, c] : g.edges()) {
        CHECK(refit(c, p) == doctest::Approx(scm.weight(p, c)).epsilon(0.02));
    }
}

TEST_CASE("shd curve at zero added points equals plain discovery") {
    const Dag truth = random_er_dag(5, 5, 8301);
    const LinearScm scm = random_linear_scm(truth, 0.5, 2.0, NoiseSpec::gaussian(1.0), 8302);
    const Dataset base = sample(scm, 1500, 8303);

    ShdCurveConfig cfg;
    cfg.replicates = 3;
    cfg.rng_seed = 8304;
    int invocations = 0;
    const Augmenter counting = [&](const Dataset& data, int m, std::uint64_t seed) {
        ++invocations;
        return augment(data, truth, RegressorSpec::ols(), m, seed, AugmentMode::Append);
    };
    const ShdCurve curve = shd_curve(truth, base, counting, {0, 200}, cfg);
    REQUIRE(curve.added_points == std::vector<int>{0, 200});
    CHECK(invocations == 3);  // only the augmented level invokes it

    const int direct = shd(pc(base, cfg.ci), dag_to_cpdag(truth));
    CHECK(curve.mean_shd[0] == doctest::Approx(static_cast<double>(direct)));
    CHECK(curve.std_shd[0] == doctest::Approx(0.0));
    CHECK(curve.replicates[0] == 3);

    CHECK_THROWS_AS(shd_curve(truth, base, counting, {200, 0}, cfg), Error);
}
