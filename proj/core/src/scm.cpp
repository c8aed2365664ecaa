#include "crb/scm.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "crb/errors.hpp"
#include "crb/rng.hpp"

namespace crb {

NoiseSpec NoiseSpec::gaussian(double sigma) {
    if (!(sigma > 0.0)) {
        throw Error(ErrorKind::InvalidConfig, "gaussian noise needs sigma > 0");
    }
    return {Family::Gaussian, sigma};
}

NoiseSpec NoiseSpec::uniform(double half_width) {
    if (!(half_width > 0.0)) {
        throw Error(ErrorKind::InvalidConfig, "uniform noise needs half-width > 0");
    }
    return {Family::Uniform, half_width};
}

double NoiseSpec::variance() const {
    return family == Family::Gaussian ? scale * scale : scale * scale / 3.0;
}

double NoiseSpec::draw(RngStream& rng) const {
    return family == Family::Gaussian ? scale * rng.next_gaussian()
                                      : rng.next_uniform(-scale, scale);
}

LinearScm::LinearScm(Dag dag, const std::map<Edge, double>& edge_weights,
                     std::vector<NoiseSpec> noise)
    : dag_(std::move(dag)), noise_(std::move(noise)) {
    if (static_cast<int>(noise_.size()) != dag_.n_vertices()) {
        throw Error(ErrorKind::InvalidConfig, "one noise spec per vertex required");
    }
    if (edge_weights.size() != dag_.edges().size()) {
        throw Error(ErrorKind::InvalidConfig, "coefficient keys must equal the edge set");
    }
    weights_.reserve(dag_.edges().size());
    for (const auto& edge : dag_.edges()) {
        auto it = edge_weights.find(edge);
        if (it == edge_weights.end()) {
            throw Error(ErrorKind::InvalidConfig,
                        "missing coefficient for edge " + dag_.name(edge.first) + " -> " +
                            dag_.name(edge.second));
        }
        weights_.push_back(it->second);
    }
}

double LinearScm::weight(int parent, int child) const {
    const auto& edges = dag_.edges();
    const auto it = std::lower_bound(edges.begin(), edges.end(), Edge{parent, child});
    if (it == edges.end() || *it != Edge{parent, child}) {
        throw Error(ErrorKind::UnknownVertex, "no such edge in the model");
    }
    return weights_[static_cast<std::size_t>(it - edges.begin())];
}

Eigen::MatrixXd LinearScm::coefficient_matrix() const {
    const int d = dag_.n_vertices();
    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(d, d);
    for (std::size_t k = 0; k < dag_.edges().size(); ++k) {
        const auto& [p, c] = dag_.edges()[k];
        b(c, p) = weights_[k];
    }
    return b;
}

MechanismScm::MechanismScm(Dag dag, std::vector<Mechanism> mechanisms,
                           std::vector<NoiseSpec> noise)
    : dag_(std::move(dag)), mechanisms_(std::move(mechanisms)), noise_(std::move(noise)) {
    if (static_cast<int>(mechanisms_.size()) != dag_.n_vertices() ||
        static_cast<int>(noise_.size()) != dag_.n_vertices()) {
        throw Error(ErrorKind::InvalidConfig, "one mechanism and noise spec per vertex required");
    }
}

MechanismScm MechanismScm::from_linear(const LinearScm& scm) {
    const Dag& dag = scm.dag();
    std::vector<Mechanism> mechanisms;
    mechanisms.reserve(dag.n_vertices());
    for (int v = 0; v < dag.n_vertices(); ++v) {
        std::vector<double> weights;
        for (int p : dag.parents(v)) weights.push_back(scm.weight(p, v));
        mechanisms.push_back([weights](std::span<const double> parents) {
            double acc = 0.0;
            for (std::size_t i = 0; i < weights.size(); ++i) acc += weights[i] * parents[i];
            return acc;
        });
    }
    return MechanismScm(dag, std::move(mechanisms), scm.noise());
}

double MechanismScm::mechanism_value(int vertex, std::span<const double> parent_values) const {
    return mechanisms_.at(vertex)(parent_values);
}

Dataset sample(const MechanismScm& scm, int n, std::uint64_t rng_seed) {
    if (n < 1) throw Error(ErrorKind::InvalidConfig, "sample size must be at least 1");
    const Dag& dag = scm.dag();
    const int d = dag.n_vertices();
    const TopologicalOrder topo = topological_sort(dag);

    Eigen::MatrixXd values(n, d);
    std::vector<double> parent_values;
    for (int row = 0; row < n; ++row) {
        for (int v : topo.order) {
            parent_values.clear();
            for (int p : dag.parents(v)) parent_values.push_back(values(row, p));
            RngStream rng(rng_seed, static_cast<std::uint64_t>(v),
                          static_cast<std::uint64_t>(row));
            values(row, v) = scm.mechanism_value(v, parent_values) + scm.noise()[v].draw(rng);
        }
    }
    Dataset data(dag.vertices(), std::move(values));
    data.require_finite("sample");
    return data;
}

Dataset sample(const LinearScm& scm, int n, std::uint64_t rng_seed) {
    return sample(MechanismScm::from_linear(scm), n, rng_seed);
}

Eigen::MatrixXd scm_population_covariance(const LinearScm& scm) {
    const int d = scm.dag().n_vertices();
    const Eigen::MatrixXd b = scm.coefficient_matrix();
    Eigen::MatrixXd system = Eigen::MatrixXd::Identity(d, d) - b;
    Eigen::FullPivLU<Eigen::MatrixXd> lu(system);
    if (!lu.isInvertible()) {
        throw Error(ErrorKind::SingularSystem, "coefficient system is singular");
    }
    Eigen::VectorXd noise_var(d);
    for (int v = 0; v < d; ++v) noise_var(v) = scm.noise()[v].variance();
    const Eigen::MatrixXd inv = lu.inverse();
    Eigen::MatrixXd sigma = inv * noise_var.asDiagonal() * inv.transpose();
    return (sigma + sigma.transpose()) / 2.0;  // enforce exact symmetry
}

ChainKind chain_kind_from_string(const std::string& name) {
    if (name == "linear-gaussian") return ChainKind::LinearGaussian;
    if (name == "linear-uniform") return ChainKind::LinearUniform;
    if (name == "quadratic-gaussian") return ChainKind::QuadraticGaussian;
    if (name == "relu-gaussian") return ChainKind::ReluGaussian;
    throw Error(ErrorKind::InvalidConfig, "unknown chain kind '" + name + "'");
}

std::string to_string(ChainKind kind) {
    switch (kind) {
        case ChainKind::LinearGaussian: return "linear-gaussian";
        case ChainKind::LinearUniform: return "linear-uniform";
        case ChainKind::QuadraticGaussian: return "quadratic-gaussian";
        case ChainKind::ReluGaussian: return "relu-gaussian";
    }
    return "unknown";
}

namespace {

// Fixed random two-hidden-layer [4, 4] network with relu activations,
// weights i.i.d. standard normal from the stream.
MechanismScm::Mechanism make_relu_mechanism(RngStream& rng) {
    constexpr int kWidth = 4;
    std::array<double, kWidth> w1;
    std::array<double, kWidth> b1;
    std::array<std::array<double, kWidth>, kWidth> w2;
    std::array<double, kWidth> b2;
    std::array<double, kWidth> w3;
    double b3 = rng.next_gaussian();
    for (auto& w : w1) w = rng.next_gaussian();
    for (auto& b : b1) b = rng.next_gaussian();
    for (auto& row : w2) {
        for (auto& w : row) w = rng.next_gaussian();
    }
    for (auto& b : b2) b = rng.next_gaussian();
    for (auto& w : w3) w = rng.next_gaussian();

    return [=](std::span<const double> parents) {
        const double x = parents[0];
        std::array<double, kWidth> h1;
        for (int i = 0; i < kWidth; ++i) h1[i] = std::max(0.0, w1[i] * x + b1[i]);
        std::array<double, kWidth> h2;
        for (int i = 0; i < kWidth; ++i) {
            double acc = b2[i];
            for (int j = 0; j < kWidth; ++j) acc += w2[i][j] * h1[j];
            h2[i] = std::max(0.0, acc);
        }
        double out = b3;
        for (int i = 0; i < kWidth; ++i) out += w3[i] * h2[i];
        return out;
    };
}

}  // namespace

MechanismScm make_chain_scm(ChainKind kind, std::uint64_t rng_seed, double coefficient,
                            double noise_scale) {
    Dag dag({"a", "b", "c"}, {{0, 1}, {1, 2}});
    const bool uniform = kind == ChainKind::LinearUniform;
    // sqrt(3) factor keeps the uniform variance equal to the gaussian one
    const NoiseSpec node_noise = uniform ? NoiseSpec::uniform(noise_scale * std::sqrt(3.0))
                                         : NoiseSpec::gaussian(noise_scale);
    std::vector<NoiseSpec> noise(3, node_noise);

    std::vector<MechanismScm::Mechanism> mechanisms;
    mechanisms.push_back([](std::span<const double>) { return 0.0; });
    switch (kind) {
        case ChainKind::LinearGaussian:
        case ChainKind::LinearUniform:
            for (int i = 0; i < 2; ++i) {
                mechanisms.push_back([coefficient](std::span<const double> p) {
                    return coefficient * p[0];
                });
            }
            break;
        case ChainKind::QuadraticGaussian:
            for (int i = 0; i < 2; ++i) {
                mechanisms.push_back([coefficient](std::span<const double> p) {
                    return coefficient * p[0] * p[0];
                });
            }
            break;
        case ChainKind::ReluGaussian: {
            RngStream edge1(rng_seed, 0x72656c75ULL, 1);
            RngStream edge2(rng_seed, 0x72656c75ULL, 2);
            mechanisms.push_back(make_relu_mechanism(edge1));
            mechanisms.push_back(make_relu_mechanism(edge2));
            break;
        }
    }
    return MechanismScm(std::move(dag), std::move(mechanisms), std::move(noise));
}

LinearScm make_unit_chain_scm() {
    Dag dag({"a", "b", "c"}, {{0, 1}, {1, 2}});
    std::map<Edge, double> weights{{{0, 1}, 1.0}, {{1, 2}, 1.0}};
    return LinearScm(std::move(dag), weights, std::vector<NoiseSpec>(3, NoiseSpec::gaussian(1.0)));
}

LinearScm make_unit_confounded_scm() {
    Dag dag({"a", "b", "c", "d"}, {{0, 1}, {1, 2}, {3, 1}});
    std::map<Edge, double> weights{{{0, 1}, 1.0}, {{1, 2}, 1.0}, {{3, 1}, 1.0}};
    return LinearScm(std::move(dag), weights, std::vector<NoiseSpec>(4, NoiseSpec::gaussian(1.0)));
}

LinearScm random_linear_scm(const Dag& dag, double weight_min, double weight_max,
                            NoiseSpec node_noise, std::uint64_t rng_seed) {
    RngStream rng(rng_seed, 0x7363776eULL);
    std::map<Edge, double> weights;
    for (const auto& edge : dag.edges()) {
        weights[edge] = rng.next_uniform(weight_min, weight_max);
    }
    return LinearScm(dag, weights,
                     std::vector<NoiseSpec>(static_cast<std::size_t>(dag.n_vertices()), node_noise));
}

}  // namespace crb
