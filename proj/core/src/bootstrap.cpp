#include "crb/bootstrap.hpp"

#include "crb/errors.hpp"
#include "crb/rng.hpp"

namespace crb {

CrbModel crb_fit(const Dag& g, const Dataset& data, const RegressorSpec& spec) {
    CrbModel model;
    model.dag = g;
    model.order = topological_sort(g);
    model.n_train = data.n_rows();
    model.nodes.resize(static_cast<std::size_t>(g.n_vertices()));

    for (int v = 0; v < g.n_vertices(); ++v) {
        (void)data.column_index(g.name(v));  // MissingColumn before any fit
    }
    for (int v = 0; v < g.n_vertices(); ++v) {
        auto& node = model.nodes[static_cast<std::size_t>(v)];
        const Eigen::VectorXd target = data.column(g.name(v));
        if (g.parents(v).empty()) {
            node.is_root = true;
            node.marginal = target;
            continue;
        }
        std::vector<std::string> parent_names;
        for (int p : g.parents(v)) parent_names.push_back(g.name(p));
        const Eigen::MatrixXd all_inputs = data.select(parent_names);
        for (Eigen::Index c = 0; c < all_inputs.cols(); ++c) {
            if (all_inputs.col(c).minCoeff() != all_inputs.col(c).maxCoeff()) {
                node.active_parents.push_back(static_cast<int>(c));
            }
        }
        Eigen::MatrixXd inputs(all_inputs.rows(),
                               static_cast<Eigen::Index>(node.active_parents.size()));
        for (std::size_t c = 0; c < node.active_parents.size(); ++c) {
            inputs.col(static_cast<Eigen::Index>(c)) = all_inputs.col(node.active_parents[c]);
        }
        try {
            node.mechanism = fit(spec, inputs, target);
        } catch (const Error& e) {
            throw Error(e.kind(), "fitting vertex '" + g.name(v) + "': " + e.what());
        }
        node.residual_pool = residuals(*node.mechanism, inputs, target);
    }
    return model;
}

Dataset crb_generate(const CrbModel& model, int m, std::uint64_t rng_seed) {
    if (m < 1) throw Error(ErrorKind::InvalidConfig, "generation count must be at least 1");
    const Dag& dag = model.dag;
    const int d = dag.n_vertices();
    Eigen::MatrixXd values(m, d);
    Eigen::VectorXd parent_values;
    for (int row = 0; row < m; ++row) {
        for (int v : model.order.order) {
            const auto& node = model.nodes[static_cast<std::size_t>(v)];
            RngStream rng(rng_seed, static_cast<std::uint64_t>(v),
                          static_cast<std::uint64_t>(row));
            if (node.is_root) {
                values(row, v) = node.marginal(static_cast<Eigen::Index>(
                    rng.next_index(static_cast<std::size_t>(node.marginal.size()))));
                continue;
            }
            const auto& parents = dag.parents(v);
            parent_values.resize(static_cast<Eigen::Index>(node.active_parents.size()));
            for (std::size_t i = 0; i < node.active_parents.size(); ++i) {
                parent_values(static_cast<Eigen::Index>(i)) =
                    values(row, parents[static_cast<std::size_t>(node.active_parents[i])]);
            }
            const double drawn = node.residual_pool(static_cast<Eigen::Index>(
                rng.next_index(static_cast<std::size_t>(node.residual_pool.size()))));
            values(row, v) = node.mechanism->predict_one(parent_values) + drawn;
        }
    }
    return Dataset(dag.vertices(), std::move(values));
}

AugmentMode augment_mode_from_string(const std::string& name) {
    if (name == "append") return AugmentMode::Append;
    if (name == "generated-only") return AugmentMode::GeneratedOnly;
    throw Error(ErrorKind::InvalidConfig, "unknown augment mode '" + name + "'");
}

std::string to_string(AugmentMode mode) {
    return mode == AugmentMode::Append ? "append" : "generated-only";
}

Dataset augment(const Dataset& data, const Dag& g, const RegressorSpec& spec, int m,
                std::uint64_t rng_seed, AugmentMode mode) {
    if (m == 0) {
        if (mode == AugmentMode::Append) return data;
        return Dataset(data.columns, Eigen::MatrixXd(0, data.n_cols()));
    }
    const CrbModel model = crb_fit(g, data, spec);
    Dataset generated = crb_generate(model, m, rng_seed);
    if (mode == AugmentMode::GeneratedOnly) return generated;

    // Keep the caller's column order; generation follows the graph's.
    Eigen::MatrixXd reordered(generated.n_rows(), data.n_cols());
    for (Eigen::Index c = 0; c < data.n_cols(); ++c) {
        reordered.col(c) = generated.column(data.columns[static_cast<std::size_t>(c)]);
    }
    return data.vstack(Dataset(data.columns, std::move(reordered)));
}

Dataset shuffle_generate(const Dataset& data, int m, std::uint64_t rng_seed) {
    if (m < 1) throw Error(ErrorKind::InvalidConfig, "generation count must be at least 1");
    const auto n = static_cast<std::size_t>(data.n_rows());
    Eigen::MatrixXd values(m, data.n_cols());
    for (Eigen::Index c = 0; c < data.n_cols(); ++c) {
        for (int row = 0; row < m; ++row) {
            RngStream rng(rng_seed, static_cast<std::uint64_t>(c) ^ 0x73687566ULL,
                          static_cast<std::uint64_t>(row));
            values(row, c) = data.values(static_cast<Eigen::Index>(rng.next_index(n)), c);
        }
    }
    return Dataset(data.columns, std::move(values));
}

Dataset shuffle_augment(const Dataset& data, int m, std::uint64_t rng_seed, AugmentMode mode) {
    if (m == 0) {
        if (mode == AugmentMode::Append) return data;
        return Dataset(data.columns, Eigen::MatrixXd(0, data.n_cols()));
    }
    Dataset generated = shuffle_generate(data, m, rng_seed);
    if (mode == AugmentMode::GeneratedOnly) return generated;
    return data.vstack(generated);
}

}  // namespace crb
