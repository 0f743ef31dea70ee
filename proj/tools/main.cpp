#include "options.hpp"

#include "aggstream/error.hpp"

#include <CLI11.hpp>

#include <iostream>

using namespace aggstream;
using namespace aggstream::cli;

// Exit codes: 0 success, 1 config error, 2 I/O error, 3 internal invariant
// violation.
int main(int argc, char** argv) {
    CLI::App app{"aggstream: streaming abusive-text classification engine"};
    app.require_subcommand(1);
    app.fallthrough(); // parent flags like --config may follow the subcommand
    app.set_config("--config", "", "TOML config file; flags override file values");
    app.get_config_formatter_base()->comment('#');

    PipelineOptions eval_opts, run_opts, bench_opts, tune_opts;
    std::string eval_metrics, eval_save_model;
    std::string run_alerts, run_samples, run_metrics, run_save_model, run_load_model,
        run_batch_log;
    std::string bench_workers = "1,2,4,8", bench_out;
    uint64_t bench_synth = 0;
    double bench_labeled_fraction = 0.3;
    uint64_t gen_n = 1000, gen_seed = 1, gen_drift_at = 0;
    std::string gen_priors, gen_out;
    double gen_labeled_fraction = 1.0;
    std::string tune_grid;

    CLI::App* eval_cmd =
        app.add_subcommand("eval", "prequential evaluation of a labeled stream");
    eval_opts.register_flags(*eval_cmd);
    eval_cmd->add_option("--metrics", eval_metrics, "metrics CSV path (default: stdout)");
    eval_cmd->add_option("--save-model", eval_save_model, "write the final model here");

    CLI::App* run_cmd = app.add_subcommand("run", "classify a live or replayed stream");
    run_opts.register_flags(*run_cmd);
    run_cmd->add_option("--alerts", run_alerts, "alerts JSON-lines path (default: stdout)");
    run_cmd->add_option("--samples", run_samples, "boosted labeling sample JSON-lines path");
    run_cmd->add_option("--metrics", run_metrics, "metrics CSV path");
    run_cmd->add_option("--save-model", run_save_model, "write the final model here");
    run_cmd->add_option("--load-model", run_load_model, "start from a serialized model");
    run_cmd->add_option("--batch-log", run_batch_log, "per-batch throughput CSV path");

    CLI::App* bench_cmd =
        app.add_subcommand("bench", "throughput across worker counts on a finite stream");
    bench_opts.register_flags(*bench_cmd);
    bench_cmd->add_option("--workers-list", bench_workers, "comma-separated worker counts");
    bench_cmd->add_option("--synthetic", bench_synth, "generate N synthetic tweets instead of --input");
    bench_cmd->add_option("--labeled-fraction", bench_labeled_fraction,
                          "labeled share of the synthetic stream")
        ->check(CLI::Range(0.0, 1.0));
    bench_cmd->add_option("--out", bench_out, "benchmark CSV path (default: stdout)");

    CLI::App* gen_cmd = app.add_subcommand("gen", "emit a synthetic labeled JSON-lines stream");
    gen_cmd->add_option("--n", gen_n, "number of tweets")->check(CLI::PositiveNumber);
    gen_cmd->add_option("--priors", gen_priors, "class priors, e.g. 0.6,0.3,0.1");
    gen_cmd->add_option("--labeled-fraction", gen_labeled_fraction, "labeled share")
        ->check(CLI::Range(0.0, 1.0));
    gen_cmd->add_option("--seed", gen_seed, "generator seed");
    gen_cmd->add_option("--drift-at", gen_drift_at,
                        "index where generator parameters switch (0 = no drift)");
    gen_cmd->add_option("-o,--out", gen_out, "output path (default: stdout)");

    CLI::App* tune_cmd =
        app.add_subcommand("tune", "grid search over hyperparameters on a labeled stream");
    tune_opts.register_flags(*tune_cmd);
    tune_cmd->add_option("--grid", tune_grid,
                         "JSON grid file: {\"parameter\": [values...]}; empty grid runs defaults");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n";
        return 1;
    }

    try {
        if (eval_cmd->parsed()) return run_eval(eval_opts, eval_metrics, eval_save_model);
        if (run_cmd->parsed()) {
            return run_live(run_opts, run_alerts, run_samples, run_metrics, run_save_model,
                            run_load_model, run_batch_log);
        }
        if (bench_cmd->parsed()) {
            return run_bench(bench_opts, bench_workers, bench_synth, bench_labeled_fraction,
                             bench_out);
        }
        if (gen_cmd->parsed()) {
            return run_gen(gen_n, gen_priors, gen_labeled_fraction, gen_seed, gen_drift_at,
                           gen_out);
        }
        if (tune_cmd->parsed()) return run_tune(tune_opts, tune_grid);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const IoError& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 3;
    }
    return 1;
}
