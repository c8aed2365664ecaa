// Command line front end: augment, experiment, fit-gaussian, discover,
// simulate. Exit statuses: 0 success, 2 usage/config, 3 data/schema,
// 4 numeric failure.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <variant>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "crb/bootstrap.hpp"
#include "crb/dataset.hpp"
#include "crb/discovery.hpp"
#include "crb/errors.hpp"
#include "crb/experiments.hpp"
#include "crb/gaussian.hpp"
#include "crb/io.hpp"
#include "crb/parallel.hpp"
#include "crb/version.hpp"

namespace {

using nlohmann::json;

// Only the output directory may come from the environment.
std::optional<std::string> env_out_dir() {
    const char* value = std::getenv("CRB_OUT_DIR");
    if (value && *value) return std::string(value);
    return std::nullopt;
}

std::string resolve_out_dir(const std::string& flag_value, const std::string& config_value) {
    if (!flag_value.empty()) return flag_value;
    if (const auto env = env_out_dir()) return *env;
    return config_value;
}

int run_augment(const std::string& data_path, const std::string& dag_path,
                const std::string& regressor, int m, const std::string& mode,
                std::uint64_t seed, const std::string& out_path) {
    const crb::Dataset data = crb::read_csv(data_path);
    const crb::Dag dag = crb::read_dag(dag_path);
    const crb::RegressorSpec spec = crb::RegressorSpec::parse(regressor);
    const crb::AugmentMode augment_mode = crb::augment_mode_from_string(mode);

    const crb::CrbModel model = crb::crb_fit(dag, data, spec);
    crb::Dataset out = data;
    if (m > 0) {
        crb::Dataset generated = crb::crb_generate(model, m, seed);
        Eigen::MatrixXd reordered(generated.n_rows(), data.n_cols());
        for (Eigen::Index c = 0; c < data.n_cols(); ++c) {
            reordered.col(c) = generated.column(data.columns[static_cast<std::size_t>(c)]);
        }
        crb::Dataset aligned(data.columns, std::move(reordered));
        out = augment_mode == crb::AugmentMode::Append ? data.vstack(aligned) : aligned;
    } else if (augment_mode == crb::AugmentMode::GeneratedOnly) {
        out = crb::Dataset(data.columns, Eigen::MatrixXd(0, data.n_cols()));
    }
    crb::write_csv(out, out_path);

    std::cout << "rows_in=" << data.n_rows() << " generated=" << m
              << " rows_out=" << out.n_rows() << "\n";
    for (int v = 0; v < dag.n_vertices(); ++v) {
        const auto& node = model.nodes[static_cast<std::size_t>(v)];
        if (node.is_root) {
            std::cout << "node " << dag.name(v) << ": root marginal n=" << node.marginal.size()
                      << "\n";
        } else {
            std::cout << "node " << dag.name(v) << ": pool_size=" << node.residual_pool.size()
                      << " mean=" << crb::format_double(node.residual_pool.mean())
                      << " variance="
                      << crb::format_double(crb::sample_variance(node.residual_pool)) << "\n";
        }
    }
    return 0;
}

int run_fit_gaussian(const std::string& data_path, const std::string& dag_path,
                     const std::string& out_dir, const std::string& divisor_name) {
    const crb::Dataset data = crb::read_csv(data_path);
    const crb::CovDivisor divisor = divisor_name == "n-1" ? crb::CovDivisor::Unbiased
                                                          : crb::CovDivisor::MaximumLikelihood;
    crb::GaussianFit fit;
    if (dag_path.empty()) {
        fit = crb::fit_unconstrained(data, divisor);
    } else {
        fit = crb::fit_constrained(data, crb::read_dag(dag_path), divisor);
    }
    std::filesystem::create_directories(out_dir);
    const auto in_dir = [&](const std::string& name) {
        return (std::filesystem::path(out_dir) / name).string();
    };
    crb::write_matrix_csv(fit.covariance, fit.names, in_dir("sigma.csv"));
    crb::write_matrix_csv(fit.precision, fit.names, in_dir("omega.csv"));
    crb::write_matrix_csv(fit.factor_u, fit.names, in_dir("factor_u.csv"));
    crb::write_matrix_csv(fit.factor_d.transpose(), fit.names, in_dir("factor_d.csv"));

    json meta;
    meta["provenance"] = fit.provenance == crb::GaussianFit::Provenance::DagConstrained
                             ? "dag-constrained"
                             : "unconstrained";
    meta["n_rows"] = data.n_rows();
    meta["d"] = fit.dim();
    meta["variable_order"] = fit.names;
    meta["cov_divisor"] = divisor_name;
    meta["version"] = crb::kVersion;
    crb::write_text_file(in_dir("meta.json"), meta.dump(2) + "\n");

    std::cout << "wrote sigma.csv omega.csv factor_u.csv factor_d.csv meta.json to " << out_dir
              << "\n";
    return 0;
}

int run_discover(const std::string& data_path, const std::string& algorithm_name, double alpha,
                 int max_cond, double prune_threshold, const std::string& truth_path,
                 const std::string& out_path) {
    const crb::Dataset data = crb::read_csv(data_path);
    const crb::DiscoveryAlgorithm algorithm =
        crb::discovery_algorithm_from_string(algorithm_name);

    crb::Cpdag estimate;   // written to the output file
    crb::Cpdag completed;  // equivalence-class form used for the SHD report
    if (algorithm == crb::DiscoveryAlgorithm::Pc) {
        crb::CiTestConfig cfg;
        cfg.alpha = alpha;
        cfg.max_cond_size = max_cond;
        estimate = crb::pc(data, cfg);
        completed = estimate;
    } else {
        const crb::LingamResult result = crb::direct_lingam(data, prune_threshold);
        if (result.small_sample) {
            std::cerr << "warning: fewer than 10*d rows; the causal order may be unstable\n";
        }
        estimate = crb::cpdag_from_dag_edges(result.graph);
        completed = crb::dag_to_cpdag(result.graph);
    }
    if (!out_path.empty()) crb::write_cpdag(estimate, out_path);
    std::cout << "directed_edges=" << estimate.directed_edges().size()
              << " undirected_edges=" << estimate.undirected_edges().size() << "\n";
    if (!truth_path.empty()) {
        const crb::Dag truth = crb::read_dag(truth_path);
        std::cout << "shd=" << crb::shd(completed, crb::dag_to_cpdag(truth)) << "\n";
    }
    return 0;
}

int run_simulate(const std::string& scm_path, int n, std::uint64_t seed,
                 const std::string& out_path) {
    const crb::AnyScm scm = crb::read_scm(scm_path);
    const crb::Dataset data = std::visit(
        [&](const auto& model) { return crb::sample(model, n, seed); }, scm);
    crb::write_csv(data, out_path);
    std::cout << "rows=" << data.n_rows() << " columns=" << data.n_cols() << "\n";
    return 0;
}

int run_experiment_cmd(const std::string& config_path, std::optional<std::uint64_t> seed_flag,
                       const std::string& out_flag, int threads_flag) {
    json doc;
    try {
        doc = json::parse(crb::read_text_file(config_path));
    } catch (const json::exception& e) {
        throw crb::Error(crb::ErrorKind::InvalidConfig, config_path + ": " + e.what());
    }
    // flags override file values; the environment may override the directory
    if (seed_flag) doc["seed"] = *seed_flag;
    doc["out_dir"] = resolve_out_dir(out_flag, doc.value("out_dir", std::string{}));
    if (threads_flag > 0) doc["threads"] = threads_flag;

    const crb::ExperimentConfig cfg = crb::ExperimentConfig::from_json(doc);
    const json report = crb::run_experiment(cfg);
    std::cout << "experiment=" << report["config"]["experiment"].get<std::string>()
              << " out_dir=" << cfg.out_dir << "\n";
    std::cout << report["summary"].dump(2) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"causal residual bootstrap augmentation toolkit"};
    app.set_version_flag("--version", crb::kVersion);
    app.require_subcommand(1);

    // augment
    auto* augment_cmd = app.add_subcommand("augment", "fit a bootstrap model and write augmented data");
    std::string data_path, dag_path, out_path, regressor = "ols", mode = "append";
    int m = 0;
    std::uint64_t seed = 0;
    bool seed_set = false;
    augment_cmd->add_option("--data", data_path, "input CSV")->required();
    augment_cmd->add_option("--dag", dag_path, "graph file (edge list or JSON)")->required();
    augment_cmd->add_option("--regressor", regressor, "ols | poly:<degree> | knn:<k>");
    augment_cmd->add_option("--m", m, "number of generated rows")->required();
    augment_cmd->add_option("--mode", mode, "append | generated-only");
    augment_cmd->add_option("--seed", seed, "RNG seed")->each([&](const std::string&) { seed_set = true; });
    augment_cmd->add_option("--out", out_path, "output CSV")->required();

    // experiment
    auto* experiment_cmd = app.add_subcommand("experiment", "run a configured study");
    std::string config_path, exp_out;
    std::uint64_t exp_seed = 0;
    bool exp_seed_set = false;
    int threads = 0;
    experiment_cmd->add_option("--config", config_path, "flat JSON config")->required();
    experiment_cmd->add_option("--seed", exp_seed, "override the config seed")
        ->each([&](const std::string&) { exp_seed_set = true; });
    experiment_cmd->add_option("--out", exp_out, "override the output directory");
    experiment_cmd->add_option("--threads", threads, "worker count (default: hardware)");

    // fit-gaussian
    auto* fit_cmd = app.add_subcommand("fit-gaussian", "write Sigma, Omega and the UDU factors");
    std::string fit_data, fit_dag, fit_out, divisor = "n";
    fit_cmd->add_option("--data", fit_data, "input CSV")->required();
    fit_cmd->add_option("--dag", fit_dag, "graph file; omit for the unconstrained fit");
    fit_cmd->add_option("--out", fit_out, "output directory");
    fit_cmd->add_option("--cov-divisor", divisor, "n (maximum likelihood) | n-1")
        ->check(CLI::IsMember({"n", "n-1"}));

    // discover
    auto* discover_cmd = app.add_subcommand("discover", "run causal discovery on a CSV");
    std::string disc_data, algorithm = "pc", truth_path, disc_out;
    double alpha = 0.05, prune_threshold = 0.0;
    int max_cond = -1;
    discover_cmd->add_option("--data", disc_data, "input CSV")->required();
    discover_cmd->add_option("--algorithm", algorithm, "pc | lingam");
    discover_cmd->add_option("--alpha", alpha, "test significance level");
    discover_cmd->add_option("--max-cond", max_cond, "largest conditioning set (-1: d-2)");
    discover_cmd->add_option("--prune-threshold", prune_threshold,
                             "|weight| pruning threshold (0: keep all edges)");
    discover_cmd->add_option("--truth", truth_path, "true DAG for an SHD report");
    discover_cmd->add_option("--out", disc_out, "output edge-list file");

    // simulate
    auto* simulate_cmd = app.add_subcommand("simulate", "sample a model to CSV");
    std::string scm_path, sim_out;
    int n_rows = 0;
    std::uint64_t sim_seed = 0;
    bool sim_seed_set = false;
    simulate_cmd->add_option("--scm", scm_path, "model JSON")->required();
    simulate_cmd->add_option("--n", n_rows, "number of rows")->required();
    simulate_cmd->add_option("--seed", sim_seed, "RNG seed")
        ->each([&](const std::string&) { sim_seed_set = true; });
    simulate_cmd->add_option("--out", sim_out, "output CSV")->required();

    try {
        app.parse(argc, argv);
        if (augment_cmd->parsed()) {
            if (!seed_set) {
                throw crb::Error(crb::ErrorKind::InvalidConfig, "augment requires --seed");
            }
            return run_augment(data_path, dag_path, regressor, m, mode, seed, out_path);
        }
        if (experiment_cmd->parsed()) {
            return run_experiment_cmd(config_path,
                                      exp_seed_set ? std::optional<std::uint64_t>(exp_seed)
                                                   : std::nullopt,
                                      exp_out, threads);
        }
        if (fit_cmd->parsed()) {
            return run_fit_gaussian(fit_data, fit_dag,
                                    resolve_out_dir(fit_out, "gaussian-fit"), divisor);
        }
        if (discover_cmd->parsed()) {
            return run_discover(disc_data, algorithm, alpha, max_cond, prune_threshold,
                                truth_path, disc_out);
        }
        if (simulate_cmd->parsed()) {
            if (!sim_seed_set) {
                throw crb::Error(crb::ErrorKind::InvalidConfig, "simulate requires --seed");
            }
            return run_simulate(scm_path, n_rows, sim_seed, sim_out);
        }
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    } catch (const crb::Error& e) {
        std::cerr << "error (" << crb::error_kind_name(e.kind()) << "): " << e.what() << "\n";
        return e.exit_code();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    }
    return 0;
}
