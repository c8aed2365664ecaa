#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <map>

#include "crb/dataset.hpp"
#include "crb/errors.hpp"
#include "crb/scm.hpp"

using namespace crb;

namespace {

Eigen::MatrixXd empirical_covariance(const Dataset& data) {
    const Eigen::RowVectorXd mean = data.values.colwise().mean();
    const Eigen::MatrixXd centered = data.values.rowwise() - mean;
    return centered.transpose() * centered / static_cast<double>(data.n_rows());
}

const Eigen::Matrix3d kUnitChainCovariance = [] {
    Eigen::Matrix3d sigma;
    sigma << 1, 1, 1, 1, 2, 2, 1, 2, 3;
    return sigma;
}();

}  // namespace

TEST_CASE("zero-coefficient chain samples independent standard columns") {
    Dag dag({"a", "b", "c"}, {{0, 1}, {1, 2}});
    std::map<Edge, double> weights{{{0, 1}, 0.0}, {{1, 2}, 0.0}};
    const LinearScm scm(dag, weights, std::vector<NoiseSpec>(3, NoiseSpec::gaussian(1.0)));
    const Dataset data = sample(scm, 50000, 11);
    for (Eigen::Index c = 0; c < 3; ++c) {
        CHECK(std::abs(data.values.col(c).mean()) < 0.02);
    }
    CHECK(std::abs(sample_correlation(data.values.col(0), data.values.col(1))) < 0.02);
    CHECK(std::abs(sample_correlation(data.values.col(0), data.values.col(2))) < 0.02);
    CHECK(std::abs(sample_correlation(data.values.col(1), data.values.col(2))) < 0.02);
}

TEST_CASE("unit chain covariance matches the symbolic expansion") {
    const Dataset data = sample(make_unit_chain_scm(), 200000, 5);
    const Eigen::MatrixXd cov = empirical_covariance(data);
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            CHECK(cov(i, j) == doctest::Approx(kUnitChainCovariance(i, j)).epsilon(0.02));
        }
    }
}

TEST_CASE("near-deterministic propagation") {
    Dag dag({"a", "b", "c"}, {{0, 1}, {1, 2}});
    std::map<Edge, double> weights{{{0, 1}, 1.0}, {{1, 2}, 1.0}};
    std::vector<NoiseSpec> noise{NoiseSpec::gaussian(1.0), NoiseSpec::gaussian(1e-9),
                                 NoiseSpec::gaussian(1e-9)};
    const Dataset data = sample(LinearScm(dag, weights, noise), 200, 3);
    for (Eigen::Index r = 0; r < data.n_rows(); ++r) {
        CHECK(std::abs(data.values(r, 1) - data.values(r, 0)) < 1e-6);
        CHECK(std::abs(data.values(r, 2) - data.values(r, 1)) < 1e-6);
    }
}

TEST_CASE("population covariance of an edgeless model is diagonal") {
    Dag dag({"a", "b"}, {});
    const LinearScm scm(dag, {}, {NoiseSpec::gaussian(0.5), NoiseSpec::gaussian(2.0)});
    const Eigen::MatrixXd sigma = scm_population_covariance(scm);
    CHECK(sigma(0, 0) == doctest::Approx(0.25));
    CHECK(sigma(1, 1) == doctest::Approx(4.0));
    CHECK(sigma(0, 1) == doctest::Approx(0.0));
}

TEST_CASE("population covariance of the unit chain") {
    const Eigen::MatrixXd sigma = scm_population_covariance(make_unit_chain_scm());
    CHECK((sigma - kUnitChainCovariance).norm() < 1e-12);
}

TEST_CASE("simulation agrees with the covariance formula") {
    const Dag dag = random_er_dag(5, 6, 21);
    const LinearScm scm = random_linear_scm(dag, 0.5, 2.0, NoiseSpec::gaussian(1.0), 22);
    const Eigen::MatrixXd expected = scm_population_covariance(scm);
    const Eigen::MatrixXd observed = empirical_covariance(sample(scm, 1000000, 23));
    CHECK((observed - expected).norm() / expected.norm() < 0.01);
}

TEST_CASE("population covariance is positive definite for random models") {
    for (int s = 0; s < 20; ++s) {
        const Dag dag = random_er_dag(6, 8, 400 + static_cast<std::uint64_t>(s));
        const LinearScm scm =
            random_linear_scm(dag, -1.5, 1.5, NoiseSpec::gaussian(0.7), 600 + static_cast<std::uint64_t>(s));
        const Eigen::MatrixXd sigma = scm_population_covariance(scm);
        CHECK((sigma - sigma.transpose()).norm() < 1e-12);
        Eigen::LLT<Eigen::MatrixXd> llt(sigma);
        CHECK(llt.info() == Eigen::Success);
    }
}

TEST_CASE("sampling is deterministic in the seed") {
    const LinearScm scm = make_unit_chain_scm();
    const Dataset a = sample(scm, 100, 42);
    const Dataset b = sample(scm, 100, 42);
    const Dataset c = sample(scm, 100, 43);
    CHECK((a.values.array() == b.values.array()).all());
    CHECK_FALSE((a.values.array() == c.values.array()).all());
}

TEST_CASE("linear scm validates coefficient keys and noise") {
    Dag dag({"a", "b"}, {{0, 1}});
    CHECK_THROWS_AS(LinearScm(dag, {}, std::vector<NoiseSpec>(2, NoiseSpec::gaussian(1.0))),
                    Error);
    std::map<Edge, double> weights{{{0, 1}, 1.0}};
    CHECK_THROWS_AS(LinearScm(dag, weights, std::vector<NoiseSpec>(1, NoiseSpec::gaussian(1.0))),
                    Error);
    CHECK_THROWS_AS(NoiseSpec::gaussian(0.0), Error);
    CHECK_THROWS_AS(NoiseSpec::uniform(-1.0), Error);
}

TEST_CASE("chain factory produces the documented mechanisms") {
    const MechanismScm linear = make_chain_scm(ChainKind::LinearGaussian, 1);
    CHECK(linear.mechanism_value(1, std::vector<double>{2.0}) == doctest::Approx(2.0));
    CHECK(linear.noise()[1].family == NoiseSpec::Family::Gaussian);

    const MechanismScm quadratic = make_chain_scm(ChainKind::QuadraticGaussian, 1);
    CHECK(quadratic.mechanism_value(1, std::vector<double>{2.0}) == doctest::Approx(4.0));

    const MechanismScm uniform = make_chain_scm(ChainKind::LinearUniform, 1);
    CHECK(uniform.noise()[1].family == NoiseSpec::Family::Uniform);
    // variance parity with the gaussian default
    CHECK(uniform.noise()[1].variance() == doctest::Approx(0.25));
}

TEST_CASE("relu chain mechanisms are deterministic in the seed") {
    const MechanismScm first = make_chain_scm(ChainKind::ReluGaussian, 9);
    const MechanismScm second = make_chain_scm(ChainKind::ReluGaussian, 9);
    const MechanismScm different = make_chain_scm(ChainKind::ReluGaussian, 10);
    bool any_difference = false;
    for (double x = -2.0; x <= 2.0; x += 0.25) {
        const std::vector<double> probe{x};
        CHECK(first.mechanism_value(1, probe) == second.mechanism_value(1, probe));
        CHECK(first.mechanism_value(2, probe) == second.mechanism_value(2, probe));
        if (first.mechanism_value(1, probe) != different.mechanism_value(1, probe)) {
            any_difference = true;
        }
    }
    CHECK(any_difference);
}

TEST_CASE("chain kind names round trip") {
    for (const auto kind : {ChainKind::LinearGaussian, ChainKind::LinearUniform,
                            ChainKind::QuadraticGaussian, ChainKind::ReluGaussian}) {
        CHECK(chain_kind_from_string(to_string(kind)) == kind);
    }
    CHECK_THROWS_AS(chain_kind_from_string("cubic"), Error);
}
