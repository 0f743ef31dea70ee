#include "options.hpp"

#include "aggstream/error.hpp"
#include "aggstream/evaluate.hpp"
#include "aggstream/synth.hpp"

#include <nlohmann/json.hpp>

#include <atomic>
#include <chrono>
#include <csignal>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

namespace aggstream::cli {
namespace {

std::atomic<bool> g_stop{false};

void handle_signal(int) { g_stop.store(true); }

void install_signal_handlers() {
    std::signal(SIGINT, handle_signal);
    std::signal(SIGTERM, handle_signal);
}

std::string on_off(std::string_view what, const std::string& value) {
    if (value != "on" && value != "off") {
        throw ConfigError(std::string(what) + " must be 'on' or 'off'");
    }
    return value;
}

RecordStream open_stream(const PipelineOptions& opts) {
    if (opts.inputs.empty()) throw ConfigError("no --input given");
    std::vector<std::unique_ptr<RecordSource>> sources;
    for (const std::string& uri : opts.inputs) sources.push_back(open_record_source(uri));
    return RecordStream(std::move(sources), opts.rate);
}

void print_summary(std::ostream& out, const Engine& engine) {
    const PrequentialEvaluator& eval = engine.evaluator();
    out << "records: " << engine.run_log().total_records
        << "  labeled: " << eval.labeled_seen() << "  unlabeled: " << eval.unlabeled_seen()
        << "  batches: " << engine.batches_processed()
        << "  alerts: " << engine.alerts_emitted();
    if (!engine.run_log().alerts_by_user.empty()) {
        out << " (" << engine.run_log().alerts_by_user.size() << " distinct authors)";
    }
    out << "\n";
    if (eval.labeled_seen() > 0) {
        Metrics m = compute_metrics(eval.cumulative());
        out << std::fixed << std::setprecision(4);
        out << "cumulative: accuracy " << m.accuracy << "  precision " << m.weighted_precision
            << "  recall " << m.weighted_recall << "  f1 " << m.weighted_f1 << "\n";
        for (int c = 0; c < eval.cumulative().classes(); ++c) {
            out << "  class " << effective_class_name(c, engine.config().scheme) << ": precision "
                << m.precision[static_cast<size_t>(c)] << "  recall "
                << m.recall[static_cast<size_t>(c)] << "  f1 " << m.f1[static_cast<size_t>(c)]
                << "\n";
        }
    }
    out << "throughput: " << std::fixed << std::setprecision(1) << engine.run_log().overall_tps()
        << " tweets/s\n";
    out.unsetf(std::ios::floatfield);
}

} // namespace

void PipelineOptions::register_flags(CLI::App& cmd, bool with_inputs) {
    if (with_inputs) {
        cmd.add_option("-i,--input", inputs,
                       "input stream: file path, '-' (stdin) or tcp://:PORT (repeatable)");
        cmd.add_option("--rate", rate, "replay rate in tweets/s (0 = unthrottled)")
            ->check(CLI::NonNegativeNumber);
    }
    cmd.add_option("--classifier", classifier, "classifier: ht, arf or slr")
        ->check(CLI::IsMember({"ht", "arf", "slr"}));
    cmd.add_option("--classes", classes, "2 (normal/aggressive) or 3 (normal/abusive/hateful)")
        ->check(CLI::IsMember({2, 3}));
    cmd.add_option("--preprocess", preprocess, "text cleaning on/off")
        ->check(CLI::IsMember({"on", "off"}));
    cmd.add_option("--normalize", normalize,
                   "off, minmax, minmax-no-outliers or zscore")
        ->check(CLI::IsMember({"off", "minmax", "minmax-no-outliers", "zscore"}));
    cmd.add_option("--adaptive-bow", adaptive_bow, "adaptive bag-of-words on/off")
        ->check(CLI::IsMember({"on", "off"}));
    cmd.add_option("--workers", workers, "parallel workers per micro-batch")
        ->check(CLI::PositiveNumber);
    cmd.add_option("--batch-size", batch_size, "records per micro-batch (count mode)");
    cmd.add_option("--batch-interval-ms", batch_interval_ms,
                   "micro-batch interval in ms (time mode; overrides --batch-size)");
    cmd.add_option("--alert-threshold", alert_threshold, "minimum confidence for alerts")
        ->check(CLI::Range(0.0, 1.0));
    cmd.add_option("--sample-rate", sample_rate, "base probability for the labeling sample")
        ->check(CLI::Range(0.0, 1.0));
    cmd.add_option("--boost-factor", boost_factor,
                   "sampling boost for predicted-aggressive tweets");
    cmd.add_option("--seed", seed, "run seed");
    cmd.add_option("--lexicon-dir", lexicon_dir,
                   "directory with swear_seed.txt, sentiment.tsv, pos.tsv");
    cmd.add_option("--disable-features", disable_features,
                   "feature names to disable (repeatable)");
    cmd.add_option("--stats-file", stats_file,
                   "JSON normalization statistics; disables online statistics");
    cmd.add_option("--window", eval_window, "sliding evaluation window size");
    cmd.add_option("--sample-period", sample_period, "labeled instances between metric rows");

    cmd.add_option("--split-criterion", split_criterion, "gini or infogain")
        ->check(CLI::IsMember({"gini", "infogain"}));
    cmd.add_option("--split-confidence", split_confidence, "Hoeffding bound delta");
    cmd.add_option("--tie-threshold", tie_threshold, "tie-break epsilon");
    cmd.add_option("--grace-period", grace_period, "instances between split attempts");
    cmd.add_option("--max-depth", max_depth, "tree depth cap");
    cmd.add_option("--ensemble-size", ensemble_size, "ARF ensemble size");
    cmd.add_option("--poisson-lambda", poisson_lambda, "ARF online-bagging lambda");
    cmd.add_option("--lambda,--learning-rate", learning_rate, "SLR step size");
    cmd.add_option("--regularizer", regularizer, "zero, l1 or l2")
        ->check(CLI::IsMember({"zero", "l1", "l2"}));
    cmd.add_option("--regularization", regularization, "SLR regularization strength");
}

PipelineConfig PipelineOptions::to_config() const {
    PipelineConfig config;
    auto kind = parse_classifier_kind(classifier);
    if (!kind) throw ConfigError("unknown classifier: " + classifier);
    config.classifier = *kind;
    config.scheme = classes == 2 ? ClassScheme::TwoClass : ClassScheme::ThreeClass;
    config.preprocess = on_off("--preprocess", preprocess) == "on";
    auto mode = parse_normalization_mode(normalize);
    if (!mode) throw ConfigError("unknown normalization mode: " + normalize);
    config.normalization = *mode;
    config.adaptive_bow = on_off("--adaptive-bow", adaptive_bow) == "on";
    config.workers = workers;
    if (batch_interval_ms > 0) {
        config.batch_interval_ms = batch_interval_ms;
        config.batch_size = 0;
    } else {
        config.batch_size = batch_size;
    }
    config.alert_threshold = alert_threshold;
    config.sample_rate = sample_rate;
    config.boost_factor = boost_factor;
    config.seed = seed;
    config.layout = FeatureLayout::without(disable_features);
    config.eval_window = eval_window;
    config.sample_period = sample_period;

    config.ht.split_criterion =
        split_criterion == "gini" ? SplitCriterion::Gini : SplitCriterion::InfoGain;
    config.ht.split_confidence = split_confidence;
    config.ht.tie_threshold = tie_threshold;
    config.ht.grace_period = grace_period;
    config.ht.max_depth = max_depth;
    config.arf.tree = config.ht;
    config.arf.ensemble_size = ensemble_size;
    config.arf.poisson_lambda = poisson_lambda;
    config.slr.learning_rate = learning_rate;
    config.slr.regularization = regularization;
    config.slr.regularizer = regularizer == "zero"
                                 ? Regularizer::None
                                 : (regularizer == "l1" ? Regularizer::L1 : Regularizer::L2);

    if (!stats_file.empty()) {
        config.preloaded_stats = load_stats_file(
            stats_file, static_cast<size_t>(config.layout.active_count()));
    }
    config.validate();
    return config;
}

int run_eval(const PipelineOptions& opts, const std::string& metrics_path,
             const std::string& save_model) {
    PipelineConfig config = opts.to_config();
    Lexicons lexicons = Lexicons::load_dir(opts.lexicon_dir);
    RecordStream stream = open_stream(opts);
    Engine engine(std::move(config), std::move(lexicons));

    install_signal_handlers();
    engine.run(stream, {}, &g_stop);

    if (stream.stats().emitted == 0) throw IoError("input stream produced no records");
    if (engine.evaluator().labeled_seen() == 0) {
        throw IoError("prequential evaluation needs labeled records");
    }

    if (metrics_path.empty()) {
        engine.evaluator().write_csv(std::cout, engine.config().scheme);
        print_summary(std::cerr, engine);
    } else {
        std::ofstream out(metrics_path);
        if (!out) throw IoError("cannot write metrics file: " + metrics_path);
        engine.evaluator().write_csv(out, engine.config().scheme);
        print_summary(std::cout, engine);
        std::cout << "metrics: " << metrics_path << "\n";
    }
    if (!save_model.empty()) save_model_file(engine.model(), save_model);

    ParseStats stats = stream.stats();
    if (stats.skipped > 0) {
        std::cerr << "skipped " << stats.skipped << " malformed record(s) of " << stats.lines
                  << " line(s)\n";
    }
    return 0;
}

int run_live(const PipelineOptions& opts, const std::string& alerts_path,
             const std::string& samples_path, const std::string& metrics_path,
             const std::string& save_model, const std::string& load_model,
             const std::string& batch_log_path) {
    PipelineConfig config = opts.to_config();
    Lexicons lexicons = Lexicons::load_dir(opts.lexicon_dir);
    RecordStream stream = open_stream(opts);
    Engine engine(std::move(config), std::move(lexicons));
    if (!load_model.empty()) {
        engine.load_model(load_model_file(load_model));
    }

    std::ofstream alerts_file, samples_file;
    EngineSinks sinks;
    if (alerts_path.empty() || alerts_path == "-") {
        sinks.alerts = &std::cout;
    } else {
        alerts_file.open(alerts_path);
        if (!alerts_file) throw IoError("cannot write alerts file: " + alerts_path);
        sinks.alerts = &alerts_file;
    }
    if (!samples_path.empty()) {
        samples_file.open(samples_path);
        if (!samples_file) throw IoError("cannot write samples file: " + samples_path);
        sinks.samples = &samples_file;
    }

    install_signal_handlers();
    engine.run(stream, sinks, &g_stop);

    if (!metrics_path.empty()) {
        std::ofstream out(metrics_path);
        if (!out) throw IoError("cannot write metrics file: " + metrics_path);
        engine.evaluator().write_csv(out, engine.config().scheme);
    }
    if (!batch_log_path.empty()) {
        std::ofstream out(batch_log_path);
        if (!out) throw IoError("cannot write batch log: " + batch_log_path);
        throughput_report(engine.run_log(), out);
    }
    if (!save_model.empty()) save_model_file(engine.model(), save_model);
    print_summary(std::cerr, engine);
    return 0;
}

int run_bench(const PipelineOptions& opts, const std::string& workers_list,
              uint64_t synthetic_n, double labeled_fraction, const std::string& out_path) {
    if (opts.rate > 0.0) {
        std::cerr << "warning: bench mode measures raw throughput; --rate ignored\n";
    }
    std::vector<int> worker_counts;
    {
        std::stringstream parse(workers_list);
        std::string part;
        while (std::getline(parse, part, ',')) {
            if (part.empty()) continue;
            int k = 0;
            try {
                k = std::stoi(part);
            } catch (const std::exception&) {
                throw ConfigError("bad worker count in --workers-list: " + part);
            }
            if (k < 1) throw ConfigError("worker counts must be >= 1");
            worker_counts.push_back(k);
        }
    }
    if (worker_counts.empty()) throw ConfigError("--workers-list is empty");

    // materialize the stream once so every run replays identical records
    std::vector<TweetRecord> records;
    if (synthetic_n > 0) {
        SyntheticConfig config = SyntheticConfig::defaults(synthetic_n);
        config.labeled_fraction = labeled_fraction;
        records = generate_synthetic(config, opts.seed);
    } else {
        if (opts.inputs.empty()) throw ConfigError("bench needs --input or --synthetic");
        PipelineOptions copy = opts;
        copy.rate = 0.0;
        RecordStream stream = open_stream(copy);
        TweetRecord record;
        while (stream.next(record, -1) == PullStatus::Ready) records.push_back(std::move(record));
        if (records.empty()) throw IoError("input stream produced no records");
    }

    Lexicons lexicons = Lexicons::load_dir(opts.lexicon_dir);

    std::ostream* out = &std::cout;
    std::ofstream file;
    if (!out_path.empty()) {
        file.open(out_path);
        if (!file) throw IoError("cannot write bench output: " + out_path);
        out = &file;
    }

    *out << "workers,records,seconds,tweets_per_s,speedup\n";
    double baseline_tps = 0.0;
    for (int k : worker_counts) {
        PipelineOptions run_opts = opts;
        run_opts.workers = k;
        PipelineConfig config = run_opts.to_config();
        Engine engine(std::move(config), lexicons);
        std::vector<std::unique_ptr<RecordSource>> sources;
        sources.push_back(std::make_unique<VectorRecordSource>(records));
        RecordStream stream(std::move(sources), 0.0);

        auto start = std::chrono::steady_clock::now();
        engine.run(stream);
        double seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        double tps = seconds > 0.0 ? static_cast<double>(records.size()) / seconds : 0.0;
        if (baseline_tps == 0.0) baseline_tps = tps;
        *out << k << ',' << records.size() << ',' << std::fixed << std::setprecision(3) << seconds
             << ',' << std::setprecision(1) << tps << ',' << std::setprecision(2)
             << (baseline_tps > 0.0 ? tps / baseline_tps : 0.0) << "\n";
        out->unsetf(std::ios::floatfield);
    }
    return 0;
}

int run_gen(uint64_t n, const std::string& priors, double labeled_fraction, uint64_t seed,
            uint64_t drift_at, const std::string& out_path) {
    SyntheticConfig config =
        drift_at > 0 ? SyntheticConfig::with_drift(n, drift_at) : SyntheticConfig::defaults(n);
    config.labeled_fraction = labeled_fraction;
    if (!priors.empty()) {
        std::stringstream parse(priors);
        std::string part;
        std::vector<double> values;
        while (std::getline(parse, part, ',')) {
            try {
                values.push_back(std::stod(part));
            } catch (const std::exception&) {
                throw ConfigError("bad prior value: " + part);
            }
        }
        if (values.size() != 3) throw ConfigError("--priors needs three comma-separated values");
        config.class_priors = {values[0], values[1], values[2]};
    }
    config.validate();

    std::ostream* out = &std::cout;
    std::ofstream file;
    if (!out_path.empty() && out_path != "-") {
        file.open(out_path);
        if (!file) throw IoError("cannot write output file: " + out_path);
        out = &file;
    }
    SyntheticStream stream(config, seed);
    TweetRecord record;
    while (stream.next(record, -1) == PullStatus::Ready) {
        *out << serialize_tweet(record) << "\n";
    }
    return 0;
}

int run_tune(const PipelineOptions& opts, const std::string& grid_path) {
    // parameter grid: JSON object, parameter -> list of values
    std::vector<std::pair<std::string, std::vector<nlohmann::json>>> grid;
    if (!grid_path.empty()) {
        std::ifstream in(grid_path);
        if (!in) throw IoError("cannot open grid file: " + grid_path);
        nlohmann::json doc;
        try {
            in >> doc;
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError(std::string("bad grid file: ") + e.what());
        }
        if (!doc.is_object()) throw ConfigError("grid file must be a JSON object");
        for (auto& [key, values] : doc.items()) {
            if (!values.is_array() || values.empty()) {
                throw ConfigError("grid entry must be a non-empty array: " + key);
            }
            grid.emplace_back(key, std::vector<nlohmann::json>(values.begin(), values.end()));
        }
    }

    auto apply = [](PipelineOptions& target, const std::string& name, const nlohmann::json& v) {
        if (name == "split_confidence") {
            target.split_confidence = v.get<double>();
        } else if (name == "tie_threshold") {
            target.tie_threshold = v.get<double>();
        } else if (name == "grace_period") {
            target.grace_period = v.get<int>();
        } else if (name == "max_depth") {
            target.max_depth = v.get<int>();
        } else if (name == "split_criterion") {
            target.split_criterion = v.get<std::string>();
        } else if (name == "ensemble_size") {
            target.ensemble_size = v.get<int>();
        } else if (name == "poisson_lambda") {
            target.poisson_lambda = v.get<double>();
        } else if (name == "lambda" || name == "learning_rate") {
            target.learning_rate = v.get<double>();
        } else if (name == "regularization") {
            target.regularization = v.get<double>();
        } else if (name == "regularizer") {
            target.regularizer = v.get<std::string>();
        } else {
            throw ConfigError("unknown grid parameter: " + name);
        }
    };

    // read the labeled stream once; every configuration replays it
    std::vector<TweetRecord> records;
    {
        RecordStream stream = open_stream(opts);
        TweetRecord record;
        while (stream.next(record, -1) == PullStatus::Ready) records.push_back(std::move(record));
    }
    if (records.empty()) throw IoError("input stream produced no records");

    Lexicons lexicons = Lexicons::load_dir(opts.lexicon_dir);

    struct Row {
        std::string label;
        double f1 = 0.0;
        double accuracy = 0.0;
    };
    std::vector<Row> rows;

    std::vector<size_t> cursor(grid.size(), 0);
    while (true) {
        PipelineOptions combo = opts;
        combo.workers = 1; // replays are sequential and deterministic
        std::string label;
        for (size_t i = 0; i < grid.size(); ++i) {
            apply(combo, grid[i].first, grid[i].second[cursor[i]]);
            if (!label.empty()) label += ' ';
            label += grid[i].first + "=" + grid[i].second[cursor[i]].dump();
        }
        if (label.empty()) label = "(defaults)";

        Engine engine(combo.to_config(), lexicons);
        std::vector<std::unique_ptr<RecordSource>> sources;
        sources.push_back(std::make_unique<VectorRecordSource>(records));
        RecordStream stream(std::move(sources), 0.0);
        engine.run(stream);
        Row row;
        row.label = label;
        if (engine.evaluator().labeled_seen() == 0) {
            throw IoError("tune needs labeled records");
        }
        Metrics m = compute_metrics(engine.evaluator().cumulative());
        row.f1 = m.weighted_f1;
        row.accuracy = m.accuracy;
        rows.push_back(std::move(row));

        // advance the cartesian product
        size_t level = 0;
        for (; level < grid.size(); ++level) {
            if (++cursor[level] < grid[level].second.size()) break;
            cursor[level] = 0;
        }
        if (level == grid.size()) break;
    }

    std::stable_sort(rows.begin(), rows.end(),
                     [](const Row& a, const Row& b) { return a.f1 > b.f1; });
    std::cout << "rank,configuration,f1,accuracy,best\n";
    std::cout << std::fixed << std::setprecision(6);
    for (size_t i = 0; i < rows.size(); ++i) {
        std::cout << (i + 1) << ",\"" << rows[i].label << "\"," << rows[i].f1 << ','
                  << rows[i].accuracy << ',' << (i == 0 ? "*" : "") << "\n";
    }
    return 0;
}

} // namespace aggstream::cli
