#ifndef CRB_GAUSSIAN_HPP
#define CRB_GAUSSIAN_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "crb/dataset.hpp"
#include "crb/graph.hpp"
#include "crb/scm.hpp"

namespace crb {

enum class CovDivisor { MaximumLikelihood, Unbiased };  // 1/N vs 1/(N-1)

// Multivariate Gaussian estimate together with the unit-triangular
// factorization of its precision matrix. All matrices are expressed in
// `names` order: the dataset column order for unconstrained fits, the
// graph's topological order for constrained ones.
struct GaussianFit {
    enum class Provenance { Unconstrained, DagConstrained };

    std::vector<std::string> names;
    Eigen::VectorXd mean;
    Eigen::MatrixXd covariance;  // Sigma
    Eigen::MatrixXd precision;   // Omega = Sigma^-1
    Eigen::MatrixXd factor_u;    // unit upper-triangular, U D U^T = Omega
    Eigen::VectorXd factor_d;    // positive diagonal
    Provenance provenance = Provenance::Unconstrained;
    std::optional<Dag> graph;    // set when DAG-constrained

    Eigen::Index dim() const { return covariance.rows(); }
    Eigen::Index name_index(const std::string& name) const;

    // Sigma permuted into the requested name order.
    Eigen::MatrixXd covariance_in(const std::vector<std::string>& order) const;
};

// Empirical mean and covariance, with precision and UDU factors derived from
// them. Throws NotPositiveDefinite when the smallest eigenvalue is at or
// below 1e-10 times the largest.
GaussianFit fit_unconstrained(const Dataset& data,
                              CovDivisor divisor = CovDivisor::MaximumLikelihood);

// Per-vertex least squares of each variable on its graph parents (with
// intercept); the coefficients fill the unit-triangular factor and the
// residual mean squares fill the diagonal, which is exactly the maximum
// likelihood estimate in the DAG-restricted Gaussian family. Every non-edge
// entry of the factor is zero by construction.
GaussianFit fit_constrained(const Dataset& data, const Dag& g,
                            CovDivisor divisor = CovDivisor::MaximumLikelihood);

// Back-to-front recursion producing unit upper-triangular U and positive D
// with U D U^T = omega. Throws NotPositiveDefinite when a pivot is not
// strictly positive.
struct UduFactors {
    Eigen::MatrixXd u;
    Eigen::VectorXd d;
};
UduFactors udu_decompose(const Eigen::MatrixXd& omega);

// Linear predictor read off a Gaussian fit.
struct BetaModel {
    std::string target;
    std::vector<std::string> features;
    Eigen::VectorXd beta;
    double intercept = 0.0;
    double noise_variance = 0.0;
};

// beta = Sigma_XX^-1 Sigma_XY, intercept from the means, noise variance
// Sigma_YY - beta' Sigma_XY.
BetaModel regression_coefficients(const GaussianFit& fit, const std::string& target,
                                  const std::vector<std::string>& features);

// Mean squared prediction error of the linear model over the test rows.
double prediction_mse(const BetaModel& model, const Dataset& test);

// Ordinary least squares of the target on its Markov boundary only, with
// coefficients of everything else pinned at zero. Reads the graph solely
// through markov_boundary(g, target).
BetaModel mb_regression(const Dataset& data, const Dag& g, const std::string& target);

struct MseGapResult {
    std::vector<int> sizes;
    std::vector<double> mse_full;        // mean over replicates
    std::vector<double> mse_dag;
    std::vector<double> gap;             // mse_full - mse_dag (paired means)
    std::vector<double> ci_half_width;   // 95% normal half-width of the mean gap
    std::vector<int> replicates_used;    // cells that completed per size
    double c_constant = 0.0;             // gap ~ C / N^slope
    double slope = 0.0;
};

// Monte Carlo comparison of unconstrained vs DAG-constrained prediction:
// per (size, replicate) cell a training set is drawn, both estimators are
// fitted, and both predictors are scored on a fresh test set. Failed cells
// (e.g. rank-deficient draws) are skipped and counted. The trailing fit is
// log(gap) = log(C) - slope * log(N) over sizes with positive mean gap;
// throws AllGapsNonpositive when no size qualifies.
MseGapResult run_mse_gap_experiment(const LinearScm& scm, const std::string& target,
                                    const std::vector<std::string>& features,
                                    const std::vector<int>& sizes, int replicates,
                                    int test_size, std::uint64_t rng_seed, int threads = 1);

struct MbIrrelevanceReport {
    std::vector<int> sizes;
    int replicates = 0;
    bool identical = false;            // bitwise-equal coefficient vectors
    double max_coefficient_delta = 0.0;
    double max_mse_delta = 0.0;
};

// Verifies that two graphs differing only outside the target's Markov
// boundary produce bitwise identical boundary-regression predictors and
// identical test error. Throws PreconditionViolated when the graphs disagree
// on the boundary or on edges incident to it.
MbIrrelevanceReport markov_boundary_irrelevance_check(
    const Dag& g_base, const Dag& g_extra, const LinearScm& scm, const std::string& target,
    const std::vector<int>& sizes, int replicates, std::uint64_t rng_seed);

}  // namespace crb

#endif
