#ifndef CRB_REGRESS_HPP
#define CRB_REGRESS_HPP

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace crb {

// The model class used both for structural mechanisms and as the downstream
// predictor in the chain study. Every least-squares member carries an
// intercept so residual pools are mean zero by construction.
struct RegressorSpec {
    enum class Kind { Ols, Polynomial, Knn };

    Kind kind = Kind::Ols;
    int degree = 1;  // polynomial
    int k = 5;       // knn

    static RegressorSpec ols();
    static RegressorSpec polynomial(int degree);
    static RegressorSpec knn(int k);

    // "ols", "poly:<degree>", "knn:<k>"
    static RegressorSpec parse(const std::string& text);
    std::string to_string() const;
};

class FittedRegressor {
public:
    const RegressorSpec& spec() const { return spec_; }
    int arity() const { return arity_; }

    Eigen::VectorXd predict(const Eigen::MatrixXd& inputs) const;
    double predict_one(const Eigen::VectorXd& input) const;

    // Least-squares coefficients in expansion-term order (intercept first);
    // empty for knn.
    const Eigen::VectorXd& coefficients() const { return coefficients_; }

private:
    friend FittedRegressor fit(const RegressorSpec&, const Eigen::MatrixXd&,
                               const Eigen::VectorXd&);

    RegressorSpec spec_;
    int arity_ = 0;
    Eigen::VectorXd coefficients_;           // ols / polynomial
    std::vector<std::vector<int>> powers_;   // monomial exponents per term
    Eigen::MatrixXd train_inputs_;           // knn
    Eigen::VectorXd train_targets_;          // knn
};

// Least squares via column-pivoted QR (rank tolerance 1e-10 relative);
// knn stores the training pairs. Throws RankDeficient or InsufficientData.
FittedRegressor fit(const RegressorSpec& spec, const Eigen::MatrixXd& inputs,
                    const Eigen::VectorXd& targets);

Eigen::VectorXd predict(const FittedRegressor& model, const Eigen::MatrixXd& inputs);

// targets - predictions.
Eigen::VectorXd residuals(const FittedRegressor& model, const Eigen::MatrixXd& inputs,
                          const Eigen::VectorXd& targets);

// All monomial exponent vectors over `arity` inputs with total degree
// <= degree, graded-lexicographic, constant term first.
std::vector<std::vector<int>> monomial_exponents(int arity, int degree);

}  // namespace crb

#endif
