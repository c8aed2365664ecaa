#include "crb/experiments.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>

#include "crb/errors.hpp"
#include "crb/io.hpp"
#include "crb/parallel.hpp"
#include "crb/rng.hpp"
#include "crb/version.hpp"

namespace crb {

using nlohmann::json;

ExperimentKind experiment_kind_from_string(const std::string& name) {
    if (name == "mse-gap") return ExperimentKind::MseGap;
    if (name == "shd-preservation") return ExperimentKind::ShdPreservation;
    if (name == "lingam-preservation") return ExperimentKind::LingamPreservation;
    if (name == "chain-study") return ExperimentKind::ChainStudy;
    if (name == "augment-only") return ExperimentKind::AugmentOnly;
    throw Error(ErrorKind::InvalidConfig, "unknown experiment kind '" + name + "'");
}

std::string to_string(ExperimentKind kind) {
    switch (kind) {
        case ExperimentKind::MseGap: return "mse-gap";
        case ExperimentKind::ShdPreservation: return "shd-preservation";
        case ExperimentKind::LingamPreservation: return "lingam-preservation";
        case ExperimentKind::ChainStudy: return "chain-study";
        case ExperimentKind::AugmentOnly: return "augment-only";
    }
    return "unknown";
}

ExperimentConfig ExperimentConfig::from_json(const json& doc) {
    ExperimentConfig cfg;
    if (!doc.contains("experiment")) {
        throw Error(ErrorKind::InvalidConfig, "config needs an 'experiment' field");
    }
    cfg.kind = experiment_kind_from_string(doc["experiment"].get<std::string>());
    if (!doc.contains("seed")) {
        throw Error(ErrorKind::InvalidConfig, "config needs an explicit 'seed'");
    }
    cfg.seed = doc["seed"].get<std::uint64_t>();
    cfg.out_dir = doc.value("out_dir", std::string{});
    cfg.threads = doc.value("threads", 0);

    cfg.structure = doc.value("structure", cfg.structure);
    cfg.target = doc.value("target", cfg.target);
    cfg.features = doc.value("features", cfg.features);
    cfg.sizes = doc.value("sizes", cfg.sizes);
    cfg.replicates = doc.value("replicates", cfg.replicates);
    cfg.test_size = doc.value("test_size", cfg.test_size);

    cfg.n_scms = doc.value("n_scms", cfg.n_scms);
    cfg.n_vertices = doc.value("n_vertices", cfg.n_vertices);
    cfg.expected_edges = doc.value("expected_edges", cfg.expected_edges);
    cfg.weight_min = doc.value("weight_min", cfg.weight_min);
    cfg.weight_max = doc.value("weight_max", cfg.weight_max);
    cfg.noise_family = doc.value("noise_family", cfg.noise_family);
    cfg.noise_scale = doc.value("noise_scale", cfg.noise_scale);
    cfg.base_rows = doc.value("base_rows", cfg.base_rows);
    cfg.added_points = doc.value("added_points", cfg.added_points);
    cfg.augmenter = doc.value("augmenter", cfg.augmenter);
    cfg.alpha = doc.value("alpha", cfg.alpha);
    cfg.max_cond_size = doc.value("max_cond_size", cfg.max_cond_size);
    cfg.lingam_prune_threshold = doc.value("lingam_prune_threshold", cfg.lingam_prune_threshold);

    cfg.chain_kind = doc.value("chain_kind", cfg.chain_kind);
    cfg.generated_points = doc.value("generated_points", cfg.generated_points);

    cfg.data_path = doc.value("data_path", cfg.data_path);
    cfg.dag_path = doc.value("dag_path", cfg.dag_path);
    cfg.mode = doc.value("mode", cfg.mode);
    cfg.regressor = doc.value("regressor", cfg.regressor);
    cfg.validate();
    return cfg;
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
    json doc;
    try {
        doc = json::parse(read_text_file(path));
    } catch (const json::exception& e) {
        throw Error(ErrorKind::InvalidConfig, path + ": " + e.what());
    }
    return from_json(doc);
}

void ExperimentConfig::validate() const {
    if (replicates < 1) throw Error(ErrorKind::InvalidConfig, "replicates must be >= 1");
    if (test_size < 1) throw Error(ErrorKind::InvalidConfig, "test_size must be >= 1");
    RegressorSpec::parse(regressor);
    if (kind == ExperimentKind::AugmentOnly) {
        if (data_path.empty() || dag_path.empty()) {
            throw Error(ErrorKind::InvalidConfig, "augment-only needs data_path and dag_path");
        }
        if (!std::filesystem::exists(data_path)) {
            throw Error(ErrorKind::InvalidConfig, "data file '" + data_path + "' does not exist");
        }
        if (!std::filesystem::exists(dag_path)) {
            throw Error(ErrorKind::InvalidConfig, "graph file '" + dag_path + "' does not exist");
        }
        augment_mode_from_string(mode);
    }
    if (kind == ExperimentKind::ChainStudy) chain_kind_from_string(chain_kind);
    if (kind == ExperimentKind::ShdPreservation || kind == ExperimentKind::LingamPreservation) {
        if (noise_family != "gaussian" && noise_family != "uniform") {
            throw Error(ErrorKind::InvalidConfig, "noise_family must be gaussian or uniform");
        }
        if (augmenter != "crb" && augmenter != "shuffle") {
            throw Error(ErrorKind::InvalidConfig, "augmenter must be crb or shuffle");
        }
    }
    if (kind == ExperimentKind::MseGap && structure != "chain" && structure != "confounded") {
        if (!std::filesystem::exists(structure)) {
            throw Error(ErrorKind::InvalidConfig,
                        "structure must be chain, confounded, or an existing SCM file");
        }
    }
}

json ExperimentConfig::echo() const {
    json doc;
    doc["experiment"] = to_string(kind);
    doc["seed"] = seed;
    doc["out_dir"] = out_dir;
    doc["threads"] = threads;
    doc["regressor"] = regressor;
    switch (kind) {
        case ExperimentKind::MseGap:
            doc["structure"] = structure;
            doc["target"] = target;
            doc["features"] = features;
            doc["sizes"] = sizes;
            doc["replicates"] = replicates;
            doc["test_size"] = test_size;
            break;
        case ExperimentKind::ShdPreservation:
        case ExperimentKind::LingamPreservation:
            doc["n_scms"] = n_scms;
            doc["n_vertices"] = n_vertices;
            doc["expected_edges"] = expected_edges;
            doc["weight_min"] = weight_min;
            doc["weight_max"] = weight_max;
            doc["noise_family"] = noise_family;
            doc["noise_scale"] = noise_scale;
            doc["base_rows"] = base_rows;
            doc["added_points"] = added_points;
            doc["augmenter"] = augmenter;
            doc["alpha"] = alpha;
            doc["max_cond_size"] = max_cond_size;
            doc["lingam_prune_threshold"] = lingam_prune_threshold;
            break;
        case ExperimentKind::ChainStudy:
            doc["chain_kind"] = chain_kind;
            doc["sizes"] = sizes;
            doc["replicates"] = replicates;
            doc["test_size"] = test_size;
            doc["generated_points"] = generated_points;
            break;
        case ExperimentKind::AugmentOnly:
            doc["data_path"] = data_path;
            doc["dag_path"] = dag_path;
            doc["mode"] = mode;
            doc["generated_points"] = generated_points;
            break;
    }
    return doc;
}

namespace {

int effective_threads(const ExperimentConfig& cfg) {
    return cfg.threads > 0 ? cfg.threads : default_thread_count();
}

LinearScm scm_for_structure(const ExperimentConfig& cfg) {
    if (cfg.structure == "chain") return make_unit_chain_scm();
    if (cfg.structure == "confounded") return make_unit_confounded_scm();
    AnyScm any = read_scm(cfg.structure);
    if (auto* linear = std::get_if<LinearScm>(&any)) return *linear;
    throw Error(ErrorKind::InvalidConfig,
                "mse-gap needs a linear model; '" + cfg.structure + "' is not one");
}

}  // namespace

MseGapRun run_mse_gap(const ExperimentConfig& cfg) {
    const LinearScm scm = scm_for_structure(cfg);
    std::vector<std::string> features = cfg.features;
    if (features.empty()) {
        for (const auto& v : scm.dag().vertices()) {
            if (v != cfg.target) features.push_back(v);
        }
    }
    MseGapRun run;
    run.result = run_mse_gap_experiment(scm, cfg.target, features, cfg.sizes, cfg.replicates,
                                        cfg.test_size, cfg.seed, effective_threads(cfg));
    run.summary = {{"C", run.result.c_constant},
                   {"slope", run.result.slope},
                   {"completed_replicates", run.result.replicates_used}};
    return run;
}

PreservationRun run_structure_preservation(const ExperimentConfig& cfg) {
    const bool use_lingam = cfg.kind == ExperimentKind::LingamPreservation;
    const RegressorSpec spec = RegressorSpec::parse(cfg.regressor);
    const NoiseSpec node_noise =
        cfg.noise_family == "gaussian"
            ? NoiseSpec::gaussian(cfg.noise_scale)
            : NoiseSpec::uniform(cfg.noise_scale * std::sqrt(3.0));

    PreservationRun run;
    run.per_model.resize(static_cast<std::size_t>(cfg.n_scms));
    std::vector<char> ok(static_cast<std::size_t>(cfg.n_scms), 0);

    parallel_for(static_cast<std::size_t>(cfg.n_scms), effective_threads(cfg),
                 [&](std::size_t model_index) {
        const std::uint64_t model_seed = derive_seed(cfg.seed, 31, model_index);
        const Dag dag = random_er_dag(cfg.n_vertices, cfg.expected_edges,
                                      derive_seed(model_seed, 1));
        const LinearScm scm = random_linear_scm(dag, cfg.weight_min, cfg.weight_max, node_noise,
                                                derive_seed(model_seed, 2));
        const Dataset base = sample(scm, cfg.base_rows, derive_seed(model_seed, 3));

        Augmenter augmenter;
        if (cfg.augmenter == "crb") {
            augmenter = [&dag, spec](const Dataset& data, int m, std::uint64_t seed) {
                return augment(data, dag, spec, m, seed, AugmentMode::Append);
            };
        } else {
            augmenter = [](const Dataset& data, int m, std::uint64_t seed) {
                return shuffle_augment(data, m, seed, AugmentMode::Append);
            };
        }
        ShdCurveConfig curve_cfg;
        curve_cfg.algorithm = use_lingam ? DiscoveryAlgorithm::Lingam : DiscoveryAlgorithm::Pc;
        curve_cfg.ci.alpha = cfg.alpha;
        curve_cfg.ci.max_cond_size = cfg.max_cond_size;
        curve_cfg.lingam_prune_threshold = cfg.lingam_prune_threshold;
        curve_cfg.replicates = 1;
        curve_cfg.rng_seed = derive_seed(model_seed, 4);
        curve_cfg.threads = 1;
        try {
            run.per_model[model_index] =
                shd_curve(dag, base, augmenter, cfg.added_points, curve_cfg);
            ok[model_index] = 1;
        } catch (const Error&) {
            // degenerate model: skipped, reported through the replicate count
        }
    });

    run.curve.added_points = cfg.added_points;
    for (std::size_t c = 0; c < cfg.added_points.size(); ++c) {
        double sum = 0.0;
        double sum_sq = 0.0;
        int used = 0;
        for (int m = 0; m < cfg.n_scms; ++m) {
            if (!ok[static_cast<std::size_t>(m)]) continue;
            const double value = run.per_model[static_cast<std::size_t>(m)].mean_shd[c];
            sum += value;
            sum_sq += value * value;
            ++used;
        }
        if (used == 0) {
            throw Error(ErrorKind::InsufficientData, "every sampled model failed");
        }
        const double mean = sum / used;
        const double var = used > 1 ? std::max(0.0, (sum_sq - used * mean * mean) / (used - 1)) : 0.0;
        run.curve.mean_shd.push_back(mean);
        run.curve.std_shd.push_back(std::sqrt(var));
        run.curve.replicates.push_back(used);
    }
    run.summary = {{"algorithm", use_lingam ? "lingam" : "pc"},
                   {"augmenter", cfg.augmenter},
                   {"baseline_mean_shd", run.curve.mean_shd.front()},
                   {"max_added_mean_shd", run.curve.mean_shd.back()}};
    return run;
}

ChainStudyRun run_chain_study(const ExperimentConfig& cfg) {
    const ChainKind kind = chain_kind_from_string(cfg.chain_kind);
    const RegressorSpec spec = RegressorSpec::parse(cfg.regressor);
    const Dag chain_dag({"a", "b", "c"}, {{0, 1}, {1, 2}});
    const std::vector<std::string> features{"a", "c"};
    const std::string target = "b";

    struct Cell {
        double mse_original = 0.0;
        double mse_augmented = 0.0;
        bool ok = false;
    };
    const std::size_t n_sizes = cfg.sizes.size();
    std::vector<Cell> cells(n_sizes * static_cast<std::size_t>(cfg.replicates));

    parallel_for(cells.size(), effective_threads(cfg), [&](std::size_t cell_index) {
        const std::size_t size_index = cell_index / static_cast<std::size_t>(cfg.replicates);
        const int n = cfg.sizes[size_index];
        const MechanismScm scm = make_chain_scm(kind, derive_seed(cfg.seed, 41));
        try {
            const Dataset train = sample(scm, n, derive_seed(cfg.seed, 42, cell_index));
            const Dataset test =
                sample(scm, cfg.test_size, derive_seed(cfg.seed, 43, cell_index));
            const Eigen::MatrixXd test_x = test.select(features);
            const Eigen::VectorXd test_y = test.column(target);

            auto downstream_mse = [&](const Dataset& training) {
                const FittedRegressor model =
                    fit(spec, training.select(features), training.column(target));
                return (test_y - model.predict(test_x)).squaredNorm() /
                       static_cast<double>(test.n_rows());
            };
            auto& cell = cells[cell_index];
            cell.mse_original = downstream_mse(train);
            const Dataset augmented = augment(train, chain_dag, spec, cfg.generated_points,
                                              derive_seed(cfg.seed, 44, cell_index),
                                              AugmentMode::Append);
            cell.mse_augmented = downstream_mse(augmented);
            cell.ok = true;
        } catch (const Error&) {
            // degenerate replicate (tiny n with an unlucky draw): skip
        }
    });

    ChainStudyRun run;
    run.sizes = cfg.sizes;
    for (std::size_t s = 0; s < n_sizes; ++s) {
        double sum_orig = 0.0;
        double sum_aug = 0.0;
        double sum_diff = 0.0;
        double sum_diff_sq = 0.0;
        int used = 0;
        for (int r = 0; r < cfg.replicates; ++r) {
            const auto& cell =
                cells[s * static_cast<std::size_t>(cfg.replicates) + static_cast<std::size_t>(r)];
            if (!cell.ok) continue;
            ++used;
            sum_orig += cell.mse_original;
            sum_aug += cell.mse_augmented;
            const double diff = cell.mse_original - cell.mse_augmented;
            sum_diff += diff;
            sum_diff_sq += diff * diff;
        }
        if (used < 2) {
            throw Error(ErrorKind::InsufficientData,
                        "fewer than 2 completed replicates at size " +
                            std::to_string(cfg.sizes[s]));
        }
        const double mean_diff = sum_diff / used;
        const double var_diff = std::max(0.0, (sum_diff_sq - used * mean_diff * mean_diff) /
                                                  (used - 1));
        run.mse_original.push_back(sum_orig / used);
        run.mse_augmented.push_back(sum_aug / used);
        run.mean_diff.push_back(mean_diff);
        run.ci_half_width.push_back(1.96 * std::sqrt(var_diff / used));
        run.replicates_used.push_back(used);
    }
    run.summary = {{"chain_kind", cfg.chain_kind},
                   {"regressor", cfg.regressor},
                   {"generated_points", cfg.generated_points}};
    return run;
}

std::string mse_gap_csv(const MseGapResult& result) {
    std::string out = "N,mse_full,mse_dag,gap,ci_half_width\n";
    for (std::size_t i = 0; i < result.sizes.size(); ++i) {
        out += std::to_string(result.sizes[i]) + ',' + format_double(result.mse_full[i]) + ',' +
               format_double(result.mse_dag[i]) + ',' + format_double(result.gap[i]) + ',' +
               format_double(result.ci_half_width[i]) + '\n';
    }
    return out;
}

std::string shd_curve_csv(const ShdCurve& curve) {
    std::string out = "added_points,mean_shd,std_shd,replicates\n";
    for (std::size_t i = 0; i < curve.added_points.size(); ++i) {
        out += std::to_string(curve.added_points[i]) + ',' + format_double(curve.mean_shd[i]) +
               ',' + format_double(curve.std_shd[i]) + ',' +
               std::to_string(curve.replicates[i]) + '\n';
    }
    return out;
}

std::string chain_study_csv(const ChainStudyRun& run) {
    std::string out = "N,mse_original,mse_augmented,mean_diff,ci_half_width,replicates\n";
    for (std::size_t i = 0; i < run.sizes.size(); ++i) {
        out += std::to_string(run.sizes[i]) + ',' + format_double(run.mse_original[i]) + ',' +
               format_double(run.mse_augmented[i]) + ',' + format_double(run.mean_diff[i]) + ',' +
               format_double(run.ci_half_width[i]) + ',' +
               std::to_string(run.replicates_used[i]) + '\n';
    }
    return out;
}

json run_experiment(const ExperimentConfig& cfg) {
    const auto start = std::chrono::steady_clock::now();
    if (cfg.out_dir.empty()) {
        throw Error(ErrorKind::InvalidConfig, "an output directory is required");
    }
    std::filesystem::create_directories(cfg.out_dir);
    const auto path_in_out = [&](const std::string& file) {
        return (std::filesystem::path(cfg.out_dir) / file).string();
    };

    json summary;
    switch (cfg.kind) {
        case ExperimentKind::MseGap: {
            const MseGapRun run = run_mse_gap(cfg);
            write_text_file(path_in_out("mse_gap.csv"), mse_gap_csv(run.result));
            summary = run.summary;
            break;
        }
        case ExperimentKind::ShdPreservation:
        case ExperimentKind::LingamPreservation: {
            const PreservationRun run = run_structure_preservation(cfg);
            write_text_file(path_in_out("shd_curve.csv"), shd_curve_csv(run.curve));
            summary = run.summary;
            break;
        }
        case ExperimentKind::ChainStudy: {
            const ChainStudyRun run = run_chain_study(cfg);
            write_text_file(path_in_out("chain_study.csv"), chain_study_csv(run));
            summary = run.summary;
            break;
        }
        case ExperimentKind::AugmentOnly: {
            const Dataset data = read_csv(cfg.data_path);
            const Dag dag = read_dag(cfg.dag_path);
            const Dataset out =
                augment(data, dag, RegressorSpec::parse(cfg.regressor), cfg.generated_points,
                        cfg.seed, augment_mode_from_string(cfg.mode));
            write_csv(out, path_in_out("augmented.csv"));
            summary = {{"rows_in", data.n_rows()},
                       {"rows_out", out.n_rows()},
                       {"generated_points", cfg.generated_points}};
            break;
        }
    }
    write_text_file(path_in_out("summary.json"), summary.dump(2) + "\n");

    const auto elapsed = std::chrono::duration<double>(
        std::chrono::steady_clock::now() - start);
    json report;
    report["config"] = cfg.echo();
    report["version"] = kVersion;
    report["seed"] = cfg.seed;
    report["duration_seconds"] = elapsed.count();
    report["summary"] = summary;
    write_text_file(path_in_out("report.json"), report.dump(2) + "\n");
    return report;
}

}  // namespace crb
