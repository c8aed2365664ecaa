#ifndef CRB_EXPERIMENTS_HPP
#define CRB_EXPERIMENTS_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "crb/bootstrap.hpp"
#include "crb/discovery.hpp"
#include "crb/gaussian.hpp"
#include "crb/scm.hpp"

namespace crb {

enum class ExperimentKind { MseGap, ShdPreservation, LingamPreservation, ChainStudy, AugmentOnly };

ExperimentKind experiment_kind_from_string(const std::string& name);
std::string to_string(ExperimentKind kind);

// Flat JSON document driving `experiment` runs. Flags override file values;
// the seed is mandatory (no wall-clock defaults).
struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::MseGap;
    std::uint64_t seed = 0;
    std::string out_dir;
    int threads = 0;  // 0: hardware concurrency

    // mse-gap
    std::string structure = "chain";  // chain | confounded | <scm path>
    std::string target = "b";
    std::vector<std::string> features;  // empty: all remaining variables
    std::vector<int> sizes{25, 50, 100, 200, 400, 800};
    int replicates = 500;
    int test_size = 10000;

    // shd / lingam preservation
    int n_scms = 30;
    int n_vertices = 10;
    double expected_edges = 10.0;
    double weight_min = 0.5;
    double weight_max = 2.0;
    std::string noise_family = "gaussian";  // gaussian | uniform
    double noise_scale = 1.0;
    int base_rows = 2000;
    std::vector<int> added_points{0, 500, 1000, 2000};
    std::string augmenter = "crb";  // crb | shuffle
    double alpha = 0.05;
    int max_cond_size = -1;
    double lingam_prune_threshold = 0.0;

    // chain study
    std::string chain_kind = "linear-gaussian";
    int generated_points = 1000;

    // augment-only
    std::string data_path;
    std::string dag_path;
    std::string mode = "append";

    std::string regressor = "ols";

    static ExperimentConfig from_json(const nlohmann::json& doc);
    static ExperimentConfig from_file(const std::string& path);
    nlohmann::json echo() const;
    void validate() const;
};

struct MseGapRun {
    MseGapResult result;
    nlohmann::json summary;  // {"C": ..., "slope": ...}
};

struct PreservationRun {
    ShdCurve curve;                       // aggregated across models
    std::vector<ShdCurve> per_model;
    nlohmann::json summary;
};

struct ChainStudyRun {
    std::vector<int> sizes;
    std::vector<double> mse_original;
    std::vector<double> mse_augmented;
    std::vector<double> mean_diff;       // original - augmented, paired
    std::vector<double> ci_half_width;   // 95% half-width of the paired mean
    std::vector<int> replicates_used;
    nlohmann::json summary;
};

MseGapRun run_mse_gap(const ExperimentConfig& cfg);
PreservationRun run_structure_preservation(const ExperimentConfig& cfg);
ChainStudyRun run_chain_study(const ExperimentConfig& cfg);

// Dispatches on the config kind, writes the CSV tables, summary.json and
// report.json under out_dir, and returns the report document.
nlohmann::json run_experiment(const ExperimentConfig& cfg);

// CSV table renderers with fixed header strings (golden-tested).
std::string mse_gap_csv(const MseGapResult& result);
std::string shd_curve_csv(const ShdCurve& curve);
std::string chain_study_csv(const ChainStudyRun& run);

}  // namespace crb

#endif
