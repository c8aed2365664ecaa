#ifndef CRB_DATASET_HPP
#define CRB_DATASET_HPP

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace crb {

// Column-named numeric matrix; the exchange object between every module.
struct Dataset {
    std::vector<std::string> columns;
    Eigen::MatrixXd values;  // n_rows x n_cols

    Dataset() = default;
    Dataset(std::vector<std::string> names, Eigen::MatrixXd data);

    Eigen::Index n_rows() const { return values.rows(); }
    Eigen::Index n_cols() const { return values.cols(); }

    // Throws MissingColumn when the name is absent.
    Eigen::Index column_index(const std::string& name) const;
    bool has_column(const std::string& name) const;

    Eigen::VectorXd column(const std::string& name) const;

    // Columns in the given order as an n_rows x names.size() matrix.
    Eigen::MatrixXd select(const std::vector<std::string>& names) const;

    // Throws if any entry is NaN or infinite.
    void require_finite(const std::string& context) const;

    // this and other stacked row-wise; columns must match by name and order.
    Dataset vstack(const Dataset& other) const;
};

double sample_mean(const Eigen::VectorXd& v);
// 1/n divisor (maximum-likelihood convention).
double sample_variance(const Eigen::VectorXd& v);
double sample_correlation(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

}  // namespace crb

#endif
