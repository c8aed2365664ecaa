#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "crb/errors.hpp"
#include "crb/regress.hpp"
#include "crb/rng.hpp"
#include "crb/scm.hpp"
#include "test_support.hpp"

using namespace crb;

TEST_CASE("regressor spec parsing") {
    CHECK(RegressorSpec::parse("ols").kind == RegressorSpec::Kind::Ols);
    CHECK(RegressorSpec::parse("poly:3").degree == 3);
    CHECK(RegressorSpec::parse("knn:7").k == 7);
    CHECK(RegressorSpec::parse("knn:7").to_string() == "knn:7");
    CHECK_THROWS_AS(RegressorSpec::parse("forest"), Error);
    CHECK_THROWS_AS(RegressorSpec::parse("poly:0"), Error);
    CHECK_THROWS_AS(RegressorSpec::parse("knn:x"), Error);
}

TEST_CASE("exact linear relation is recovered with zero residuals") {
    Eigen::MatrixXd x(5, 1);
    x << 1, 2, 3, 4, 5;
    const Eigen::VectorXd y = 2.0 * x.col(0);
    const FittedRegressor model = fit(RegressorSpec::ols(), x, y);
    CHECK(model.coefficients()(0) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(model.coefficients()(1) == doctest::Approx(2.0));
    CHECK(residuals(model, x, y).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(model.predict_one(Eigen::VectorXd::Constant(1, 3.0)) == doctest::Approx(6.0));
}

TEST_CASE("least squares matches the normal-equation oracle") {
    RngStream rng(17);
    for (int trial = 0; trial < 20; ++trial) {
        const int d = 1 + static_cast<int>(rng.next_index(3));
        const int n = d + 2 + static_cast<int>(rng.next_index(48 - d));
        Eigen::MatrixXd x(n, d);
        Eigen::VectorXd y(n);
        for (int r = 0; r < n; ++r) {
            for (int c = 0; c < d; ++c) x(r, c) = rng.next_gaussian();
            y(r) = rng.next_gaussian();
        }
        const FittedRegressor model = fit(RegressorSpec::ols(), x, y);
        const Eigen::VectorXd oracle = testing::normal_equation_ols(x, y);
        CHECK((model.coefficients() - oracle).cwiseAbs().maxCoeff() < 1e-8);
    }
}

TEST_CASE("slope consistency on chain data") {
    const Dataset data = sample(make_unit_chain_scm(), 100000, 29);
    const FittedRegressor model =
        fit(RegressorSpec::ols(), data.values.col(0), data.values.col(1));
    CHECK(model.coefficients()(1) > 0.99);
    CHECK(model.coefficients()(1) < 1.01);

    const Eigen::VectorXd resid = residuals(model, data.values.col(0), data.values.col(1));
    const double variance = resid.squaredNorm() / static_cast<double>(resid.size());
    CHECK(variance > 0.97);
    CHECK(variance < 1.03);
    // exact consequences of the normal equations
    CHECK(std::abs(resid.mean()) < 1e-9);
    CHECK(std::abs(resid.dot(data.values.col(0))) <
          1e-6 * resid.norm() * data.values.col(0).norm());
}

TEST_CASE("degree-2 polynomial interpolates a parabola") {
    Eigen::MatrixXd x(7, 1);
    x << -3, -2, -1, 0, 1, 2, 3;
    const Eigen::VectorXd y = x.col(0).cwiseProduct(x.col(0));
    const FittedRegressor model = fit(RegressorSpec::polynomial(2), x, y);
    REQUIRE(model.coefficients().size() == 3);
    CHECK(std::abs(model.coefficients()(0)) < 1e-8);
    CHECK(std::abs(model.coefficients()(1)) < 1e-8);
    CHECK(model.coefficients()(2) == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(model.predict_one(Eigen::VectorXd::Constant(1, -2.0)) == doctest::Approx(4.0));
    CHECK(residuals(model, x, y).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("multivariate polynomial expansion covers cross terms") {
    const auto terms = monomial_exponents(2, 2);
    // 1, x, y, x^2, xy, y^2
    CHECK(terms.size() == 6);
    CHECK(terms.front() == std::vector<int>{0, 0});
}

TEST_CASE("knn with one neighbour reproduces training targets") {
    Eigen::MatrixXd x(4, 1);
    x << 0, 1, 2, 3;
    Eigen::VectorXd y(4);
    y << 5, 6, 7, 8;
    const FittedRegressor model = fit(RegressorSpec::knn(1), x, y);
    for (int i = 0; i < 4; ++i) {
        CHECK(model.predict_one(x.row(i).transpose()) == doctest::Approx(y(i)));
    }
}

TEST_CASE("knn ties break by training index") {
    Eigen::MatrixXd x(4, 1);
    x << 1, -1, 1, -1;  // query at 0 is equidistant from all rows
    Eigen::VectorXd y(4);
    y << 10, 20, 30, 40;
    const FittedRegressor model = fit(RegressorSpec::knn(2), x, y);
    // rows 0 and 1 are the two lowest-index ties
    CHECK(model.predict_one(Eigen::VectorXd::Zero(1)) == doctest::Approx(15.0));
}

TEST_CASE("prediction is a pure function") {
    const Dataset data = sample(make_unit_chain_scm(), 500, 31);
    const FittedRegressor model =
        fit(RegressorSpec::knn(5), data.values.leftCols(2), data.values.col(2));
    const Eigen::VectorXd first = model.predict(data.values.leftCols(2));
    const Eigen::VectorXd second = model.predict(data.values.leftCols(2));
    CHECK((first.array() == second.array()).all());
}

TEST_CASE("failure modes are loud") {
    Eigen::MatrixXd x(2, 1);
    x << 1, 2;
    Eigen::VectorXd y(2);
    y << 1, 2;
    CHECK_THROWS_AS(fit(RegressorSpec::ols(), x, y), Error);  // needs 3 rows

    Eigen::MatrixXd duplicated(10, 2);
    for (int r = 0; r < 10; ++r) {
        duplicated(r, 0) = r;
        duplicated(r, 1) = r;  // collinear column
    }
    CHECK_THROWS_AS(fit(RegressorSpec::ols(), duplicated, Eigen::VectorXd::Ones(10)), Error);

    const FittedRegressor model = fit(RegressorSpec::ols(), x.topRows(2).replicate(3, 1),
                                      y.replicate(3, 1));
    Eigen::MatrixXd wrong(1, 2);
    wrong << 1, 2;
    CHECK_THROWS_AS(model.predict(wrong), Error);
    CHECK_THROWS_AS(fit(RegressorSpec::knn(5), x, y), Error);  // fewer than k rows
}
