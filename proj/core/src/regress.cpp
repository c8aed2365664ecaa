#include "crb/regress.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "crb/errors.hpp"

namespace crb {

RegressorSpec RegressorSpec::ols() { return {Kind::Ols, 1, 5}; }

RegressorSpec RegressorSpec::polynomial(int degree) {
    if (degree < 1) throw Error(ErrorKind::InvalidConfig, "polynomial degree must be >= 1");
    return {Kind::Polynomial, degree, 5};
}

RegressorSpec RegressorSpec::knn(int k) {
    if (k < 1) throw Error(ErrorKind::InvalidConfig, "knn neighbour count must be >= 1");
    return {Kind::Knn, 1, k};
}

RegressorSpec RegressorSpec::parse(const std::string& text) {
    if (text == "ols") return ols();
    const auto colon = text.find(':');
    if (colon != std::string::npos) {
        const std::string head = text.substr(0, colon);
        const std::string tail = text.substr(colon + 1);
        try {
            if (head == "poly") return polynomial(std::stoi(tail));
            if (head == "knn") return knn(std::stoi(tail));
        } catch (const std::exception&) {
            // fall through to the error below
        }
    }
    throw Error(ErrorKind::InvalidConfig,
                "unknown regressor '" + text + "' (expected ols, poly:<degree>, knn:<k>)");
}

std::string RegressorSpec::to_string() const {
    switch (kind) {
        case Kind::Ols: return "ols";
        case Kind::Polynomial: return "poly:" + std::to_string(degree);
        case Kind::Knn: return "knn:" + std::to_string(k);
    }
    return "unknown";
}

std::vector<std::vector<int>> monomial_exponents(int arity, int degree) {
    std::vector<std::vector<int>> terms;
    std::vector<int> current(arity, 0);
    // Enumerate exponent vectors grouped by total degree, lexicographic
    // within each group.
    std::function<void(int, int)> emit = [&](int position, int remaining) {
        if (position == arity) {
            if (remaining == 0) terms.push_back(current);
            return;
        }
        for (int e = remaining; e >= 0; --e) {
            current[position] = e;
            emit(position + 1, remaining - e);
        }
        current[position] = 0;
    };
    for (int total = 0; total <= degree; ++total) emit(0, total);
    return terms;
}

namespace {

Eigen::MatrixXd expand_design(const Eigen::MatrixXd& inputs,
                              const std::vector<std::vector<int>>& powers) {
    const Eigen::Index n = inputs.rows();
    Eigen::MatrixXd design(n, static_cast<Eigen::Index>(powers.size()));
    for (std::size_t t = 0; t < powers.size(); ++t) {
        Eigen::VectorXd col = Eigen::VectorXd::Ones(n);
        for (int j = 0; j < inputs.cols(); ++j) {
            for (int e = 0; e < powers[t][j]; ++e) col = col.cwiseProduct(inputs.col(j));
        }
        design.col(static_cast<Eigen::Index>(t)) = col;
    }
    return design;
}

}  // namespace

FittedRegressor fit(const RegressorSpec& spec, const Eigen::MatrixXd& inputs,
                    const Eigen::VectorXd& targets) {
    if (inputs.rows() != targets.size()) {
        throw Error(ErrorKind::ArityMismatch, "input rows and target length differ");
    }
    FittedRegressor model;
    model.spec_ = spec;
    model.arity_ = static_cast<int>(inputs.cols());

    if (spec.kind == RegressorSpec::Kind::Knn) {
        if (inputs.rows() < spec.k) {
            throw Error(ErrorKind::InsufficientData,
                        "knn requires at least k = " + std::to_string(spec.k) + " rows");
        }
        model.train_inputs_ = inputs;
        model.train_targets_ = targets;
        return model;
    }

    const int degree = spec.kind == RegressorSpec::Kind::Ols ? 1 : spec.degree;
    model.powers_ = monomial_exponents(model.arity_, degree);
    const auto n_terms = static_cast<Eigen::Index>(model.powers_.size());
    if (inputs.rows() < n_terms + 1) {
        throw Error(ErrorKind::InsufficientData,
                    "least squares needs at least " + std::to_string(n_terms + 1) + " rows, got " +
                        std::to_string(inputs.rows()));
    }
    const Eigen::MatrixXd design = expand_design(inputs, model.powers_);
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
    qr.setThreshold(1e-10);
    if (qr.rank() < n_terms) {
        throw Error(ErrorKind::RankDeficient, "design matrix is rank deficient");
    }
    model.coefficients_ = qr.solve(targets);
    return model;
}

Eigen::VectorXd FittedRegressor::predict(const Eigen::MatrixXd& inputs) const {
    if (inputs.cols() != arity_) {
        throw Error(ErrorKind::ArityMismatch,
                    "expected " + std::to_string(arity_) + " input columns, got " +
                        std::to_string(inputs.cols()));
    }
    if (spec_.kind != RegressorSpec::Kind::Knn) {
        return expand_design(inputs, powers_) * coefficients_;
    }

    const Eigen::Index n_train = train_inputs_.rows();
    const int k = spec_.k;
    Eigen::VectorXd out(inputs.rows());
    std::vector<std::pair<double, Eigen::Index>> dist(static_cast<std::size_t>(n_train));
    for (Eigen::Index m = 0; m < inputs.rows(); ++m) {
        for (Eigen::Index i = 0; i < n_train; ++i) {
            dist[static_cast<std::size_t>(i)] = {
                (train_inputs_.row(i) - inputs.row(m)).squaredNorm(), i};
        }
        // ties broken by training index
        std::nth_element(dist.begin(), dist.begin() + (k - 1), dist.end());
        std::sort(dist.begin(), dist.begin() + k);
        double acc = 0.0;
        for (int j = 0; j < k; ++j) acc += train_targets_(dist[static_cast<std::size_t>(j)].second);
        out(m) = acc / k;
    }
    return out;
}

double FittedRegressor::predict_one(const Eigen::VectorXd& input) const {
    return predict(input.transpose())(0);
}

Eigen::VectorXd predict(const FittedRegressor& model, const Eigen::MatrixXd& inputs) {
    return model.predict(inputs);
}

Eigen::VectorXd residuals(const FittedRegressor& model, const Eigen::MatrixXd& inputs,
                          const Eigen::VectorXd& targets) {
    if (inputs.rows() != targets.size()) {
        throw Error(ErrorKind::ArityMismatch, "input rows and target length differ");
    }
    return targets - model.predict(inputs);
}

}  // namespace crb
