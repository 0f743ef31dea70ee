#pragma once

#include "aggstream/engine.hpp"

#include <CLI11.hpp>

#include <string>
#include <vector>

namespace aggstream::cli {

/// Flag values shared by the pipeline subcommands; converted to a
/// PipelineConfig after parsing.
struct PipelineOptions {
    std::vector<std::string> inputs;
    double rate = 0.0;
    std::string classifier = "ht";
    int classes = 3;
    std::string preprocess = "on";
    std::string normalize = "minmax-no-outliers";
    std::string adaptive_bow = "on";
    int workers = 1;
    size_t batch_size = 1024;
    int batch_interval_ms = 0;
    double alert_threshold = 0.5;
    double sample_rate = 0.0;
    double boost_factor = 10.0;
    uint64_t seed = 1;
    std::string lexicon_dir = "data";
    std::vector<std::string> disable_features;
    std::string stats_file;
    size_t eval_window = 1000;
    uint64_t sample_period = 500;

    // model hyperparameters
    std::string split_criterion = "infogain";
    double split_confidence = 0.01;
    double tie_threshold = 0.05;
    int grace_period = 200;
    int max_depth = 20;
    int ensemble_size = 10;
    double poisson_lambda = 6.0;
    double learning_rate = 0.1;
    std::string regularizer = "l2";
    double regularization = 0.01;

    void register_flags(CLI::App& cmd, bool with_inputs = true);
    PipelineConfig to_config() const; // throws ConfigError
};

int run_eval(const PipelineOptions& opts, const std::string& metrics_path,
             const std::string& save_model);
int run_live(const PipelineOptions& opts, const std::string& alerts_path,
             const std::string& samples_path, const std::string& metrics_path,
             const std::string& save_model, const std::string& load_model,
             const std::string& batch_log_path);
int run_bench(const PipelineOptions& opts, const std::string& workers_list,
              uint64_t synthetic_n, double labeled_fraction, const std::string& out_path);
int run_gen(uint64_t n, const std::string& priors, double labeled_fraction, uint64_t seed,
            uint64_t drift_at, const std::string& out_path);
int run_tune(const PipelineOptions& opts, const std::string& grid_path);

} // namespace aggstream::cli
