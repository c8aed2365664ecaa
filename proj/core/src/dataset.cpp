#include "crb/dataset.hpp"

#include <cmath>
#include <unordered_set>

#include "crb/errors.hpp"

namespace crb {

Dataset::Dataset(std::vector<std::string> names, Eigen::MatrixXd data)
    : columns(std::move(names)), values(std::move(data)) {
    if (static_cast<Eigen::Index>(columns.size()) != values.cols()) {
        throw Error(ErrorKind::InvalidConfig, "dataset column count does not match matrix width");
    }
    std::unordered_set<std::string> seen;
    for (const auto& name : columns) {
        if (!seen.insert(name).second) {
            throw Error(ErrorKind::InvalidConfig, "duplicate dataset column '" + name + "'");
        }
    }
}

Eigen::Index Dataset::column_index(const std::string& name) const {
    for (std::size_t i = 0; i < columns.size(); ++i) {
        if (columns[i] == name) return static_cast<Eigen::Index>(i);
    }
    throw Error(ErrorKind::MissingColumn, "dataset has no column '" + name + "'");
}

bool Dataset::has_column(const std::string& name) const {
    for (const auto& c : columns) {
        if (c == name) return true;
    }
    return false;
}

Eigen::VectorXd Dataset::column(const std::string& name) const {
    return values.col(column_index(name));
}

Eigen::MatrixXd Dataset::select(const std::vector<std::string>& names) const {
    Eigen::MatrixXd out(values.rows(), static_cast<Eigen::Index>(names.size()));
    for (std::size_t i = 0; i < names.size(); ++i) {
        out.col(static_cast<Eigen::Index>(i)) = values.col(column_index(names[i]));
    }
    return out;
}

void Dataset::require_finite(const std::string& context) const {
    if (!values.allFinite()) {
        throw Error(ErrorKind::ParseError, context + ": dataset contains non-finite values");
    }
}

Dataset Dataset::vstack(const Dataset& other) const {
    if (columns != other.columns) {
        throw Error(ErrorKind::VertexMismatch, "cannot stack datasets with different columns");
    }
    Eigen::MatrixXd stacked(values.rows() + other.values.rows(), values.cols());
    stacked.topRows(values.rows()) = values;
    stacked.bottomRows(other.values.rows()) = other.values;
    return Dataset(columns, std::move(stacked));
}

double sample_mean(const Eigen::VectorXd& v) { return v.mean(); }

double sample_variance(const Eigen::VectorXd& v) {
    const double mu = v.mean();
    return (v.array() - mu).square().sum() / static_cast<double>(v.size());
}

double sample_correlation(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    const double ma = a.mean();
    const double mb = b.mean();
    const double cov = ((a.array() - ma) * (b.array() - mb)).sum();
    const double va = (a.array() - ma).square().sum();
    const double vb = (b.array() - mb).square().sum();
    return cov / std::sqrt(va * vb);
}

const char* error_kind_name(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::InvalidConfig: return "InvalidConfig";
        case ErrorKind::InvalidDensity: return "InvalidDensity";
        case ErrorKind::PreconditionViolated: return "PreconditionViolated";
        case ErrorKind::ParseError: return "ParseError";
        case ErrorKind::MissingColumn: return "MissingColumn";
        case ErrorKind::UnknownVertex: return "UnknownVertex";
        case ErrorKind::VertexMismatch: return "VertexMismatch";
        case ErrorKind::CycleDetected: return "CycleDetected";
        case ErrorKind::InsufficientData: return "InsufficientData";
        case ErrorKind::InsufficientSamples: return "InsufficientSamples";
        case ErrorKind::ArityMismatch: return "ArityMismatch";
        case ErrorKind::InsufficientVariation: return "InsufficientVariation";
        case ErrorKind::RankDeficient: return "RankDeficient";
        case ErrorKind::NotPositiveDefinite: return "NotPositiveDefinite";
        case ErrorKind::SingularSystem: return "SingularSystem";
        case ErrorKind::ZeroResidualVariance: return "ZeroResidualVariance";
        case ErrorKind::SingularFeatureBlock: return "SingularFeatureBlock";
        case ErrorKind::DegenerateCorrelation: return "DegenerateCorrelation";
        case ErrorKind::AllGapsNonpositive: return "AllGapsNonpositive";
    }
    return "Unknown";
}

}  // namespace crb
