#ifndef CRB_SCM_HPP
#define CRB_SCM_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "crb/dataset.hpp"
#include "crb/graph.hpp"

namespace crb {

struct NoiseSpec {
    enum class Family { Gaussian, Uniform };

    Family family = Family::Gaussian;
    double scale = 1.0;  // sigma for gaussian, half-width for centered uniform

    static NoiseSpec gaussian(double sigma);
    static NoiseSpec uniform(double half_width);

    double variance() const;
    double draw(class RngStream& rng) const;
};

// Linear additive-noise model: each variable is a weighted sum of its graph
// parents plus independent centered noise.
class LinearScm {
public:
    LinearScm(Dag dag, const std::map<Edge, double>& edge_weights,
              std::vector<NoiseSpec> noise);

    const Dag& dag() const { return dag_; }
    const std::vector<NoiseSpec>& noise() const { return noise_; }
    double weight(int parent, int child) const;

    // B with B(child, parent) = weight; strictly lower triangular under any
    // topological order of the graph.
    Eigen::MatrixXd coefficient_matrix() const;

private:
    Dag dag_;
    std::vector<double> weights_;  // aligned with dag_.edges()
    std::vector<NoiseSpec> noise_;
};

// General additive-noise model with arbitrary deterministic mechanisms.
class MechanismScm {
public:
    using Mechanism = std::function<double(std::span<const double>)>;

    MechanismScm(Dag dag, std::vector<Mechanism> mechanisms, std::vector<NoiseSpec> noise);

    static MechanismScm from_linear(const LinearScm& scm);

    const Dag& dag() const { return dag_; }
    const std::vector<NoiseSpec>& noise() const { return noise_; }
    double mechanism_value(int vertex, std::span<const double> parent_values) const;

private:
    Dag dag_;
    std::vector<Mechanism> mechanisms_;
    std::vector<NoiseSpec> noise_;
};

// Forward simulation, node by node in topological order; never inverts the
// coefficient system. Column order of the result is the vertex order.
Dataset sample(const MechanismScm& scm, int n, std::uint64_t rng_seed);
Dataset sample(const LinearScm& scm, int n, std::uint64_t rng_seed);

// (I - B)^-1 Sigma_eps (I - B)^-T via triangular solves; the population-level
// oracle the simulator is tested against.
Eigen::MatrixXd scm_population_covariance(const LinearScm& scm);

enum class ChainKind { LinearGaussian, LinearUniform, QuadraticGaussian, ReluGaussian };

ChainKind chain_kind_from_string(const std::string& name);
std::string to_string(ChainKind kind);

// Three-node chain A -> B -> C with the named mechanism family. Defaults:
// edge coefficient 1.0, gaussian sigma 0.5, uniform half-width 0.8660254
// (variance parity). The relu kind draws a fixed random two-hidden-layer
// width-4 piecewise-linear function per edge from the seed.
MechanismScm make_chain_scm(ChainKind kind, std::uint64_t rng_seed,
                            double coefficient = 1.0, double noise_scale = 0.5);

// Chain with beta = 1, sigma = 1: population covariance
// [[1,1,1],[1,2,2],[1,2,3]]. Fixture for the estimation-theory checks.
LinearScm make_unit_chain_scm();

// A -> B <- D, B -> C with unit weights and unit gaussian noise.
LinearScm make_unit_confounded_scm();

// Random linear SCM on the given DAG: weights uniform on
// [weight_min, weight_max], gaussian noise with the given sigma.
LinearScm random_linear_scm(const Dag& dag, double weight_min, double weight_max,
                            NoiseSpec node_noise, std::uint64_t rng_seed);

}  // namespace crb

#endif
