#ifndef CRB_DISCOVERY_HPP
#define CRB_DISCOVERY_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "crb/dataset.hpp"
#include "crb/graph.hpp"

namespace crb {

struct CiTestConfig {
    double alpha = 0.05;
    int max_cond_size = -1;  // -1: up to d - 2

    void validate() const;
};

struct CiTestResult {
    double statistic = 0.0;  // Fisher z
    double p_value = 1.0;
    bool independent = false;
};

// Partial correlation of columns i and j given the conditioning columns,
// Fisher z-transformed with sqrt(N - |S| - 3) scaling and a two-sided normal
// p-value. Throws InsufficientSamples when N <= |S| + 3 and
// DegenerateCorrelation when the correlation rounds to +-1.
CiTestResult partial_correlation_test(const Dataset& data, const std::string& i,
                                      const std::string& j,
                                      const std::vector<std::string>& conditioning,
                                      const CiTestConfig& cfg);

// Order-independent (stable) skeleton search: conditioning sets are drawn
// from the neighborhoods frozen at the start of each level and removals are
// applied only when the level completes. V-structures come from the recorded
// separating sets; conflicting orientation demands cancel and the edge stays
// undirected; Meek rules close the orientation.
Cpdag pc(const Dataset& data, const CiTestConfig& cfg);

struct LingamResult {
    std::vector<int> causal_order;   // most exogenous first
    Eigen::MatrixXd b_matrix;        // b(j, i): effect of column i on column j
    Dag graph;
    bool small_sample = false;       // fewer than 10 * d rows
};

// Pairwise likelihood-ratio (log-cosh and gaussian-moment contrast) search
// for the most exogenous variable, recursively regressing it out; the weight
// matrix is re-estimated on the original data along the found order. With
// prune_threshold 0 every predecessor edge is kept (no pruning); a positive
// threshold drops edges with |weight| <= threshold.
LingamResult direct_lingam(const Dataset& data, double prune_threshold = 0.0);

// Least squares of each variable on all its predecessors under the given
// order; strictly lower triangular after permuting by the order.
Eigen::MatrixXd lingam_refit(const Dataset& data, const std::vector<int>& order);

enum class DiscoveryAlgorithm { Pc, Lingam };
DiscoveryAlgorithm discovery_algorithm_from_string(const std::string& name);
std::string to_string(DiscoveryAlgorithm algorithm);

// Returns the augmented dataset (original rows plus m generated rows).
using Augmenter = std::function<Dataset(const Dataset&, int, std::uint64_t)>;

struct ShdCurve {
    std::vector<int> added_points;
    std::vector<double> mean_shd;
    std::vector<double> std_shd;
    std::vector<int> replicates;
};

struct ShdCurveConfig {
    DiscoveryAlgorithm algorithm = DiscoveryAlgorithm::Pc;
    CiTestConfig ci;                  // pc only
    double lingam_prune_threshold = 0.0;
    int replicates = 1;
    std::uint64_t rng_seed = 0;
    int threads = 1;
};

// Structure preservation curve: per replicate and per added-point count the
// base data is augmented, discovery runs on the result, and the structural
// Hamming distance to the completed true graph is recorded. added = 0 skips
// the augmenter entirely.
ShdCurve shd_curve(const Dag& truth, const Dataset& base, const Augmenter& augmenter,
                   const std::vector<int>& added_points, const ShdCurveConfig& cfg);

}  // namespace crb

#endif
