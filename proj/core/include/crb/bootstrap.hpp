#ifndef CRB_BOOTSTRAP_HPP
#define CRB_BOOTSTRAP_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <vector>

#include "crb/dataset.hpp"
#include "crb/graph.hpp"
#include "crb/regress.hpp"

namespace crb {

// Learned state of causal residual bootstrapping: per root vertex the stored
// observation vector, per non-root vertex a fitted mechanism and its
// residual pool. Immutable after fitting.
struct CrbModel {
    struct Node {
        bool is_root = false;
        Eigen::VectorXd marginal;                // roots: full observed column
        std::optional<FittedRegressor> mechanism;  // non-roots
        Eigen::VectorXd residual_pool;           // non-roots: length n_train
        // positions (within the parent list) of the non-constant parents the
        // mechanism was fitted on; constant columns carry no signal and would
        // only make the design collinear with the intercept
        std::vector<int> active_parents;
    };

    Dag dag;
    TopologicalOrder order;
    std::vector<Node> nodes;  // indexed by vertex
    Eigen::Index n_train = 0;
};

// Learning phase: topological sort, then per non-root vertex fit the
// regressor on the parent columns and keep the residuals; per root vertex
// keep the observed column. Throws MissingColumn when the data does not
// cover the graph; regressor errors are annotated with the vertex.
CrbModel crb_fit(const Dag& g, const Dataset& data, const RegressorSpec& spec);

// Generation phase: m rows, vertices filled in topological order; roots are
// drawn with replacement from the stored marginal, non-roots are mechanism
// predictions on the already generated parents plus a residual drawn with
// replacement from the vertex pool. Each draw uses a stream derived from
// (seed, vertex, row), so output is deterministic and loop order free.
Dataset crb_generate(const CrbModel& model, int m, std::uint64_t rng_seed);

enum class AugmentMode { Append, GeneratedOnly };

AugmentMode augment_mode_from_string(const std::string& name);
std::string to_string(AugmentMode mode);

// Fit on data, generate m rows, and either append them to the original rows
// or return them alone.
Dataset augment(const Dataset& data, const Dag& g, const RegressorSpec& spec, int m,
                std::uint64_t rng_seed, AugmentMode mode);

// Negative control: every column bootstrapped independently, destroying all
// cross-column dependence while preserving marginals.
Dataset shuffle_generate(const Dataset& data, int m, std::uint64_t rng_seed);
Dataset shuffle_augment(const Dataset& data, int m, std::uint64_t rng_seed, AugmentMode mode);

}  // namespace crb

#endif
