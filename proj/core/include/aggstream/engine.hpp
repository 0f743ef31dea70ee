#pragma once

#include "aggstream/evaluate.hpp"
#include "aggstream/features.hpp"
#include "aggstream/ingest.hpp"
#include "aggstream/learners/classifier.hpp"
#include "aggstream/learners/params.hpp"
#include "aggstream/normalize.hpp"
#include "aggstream/types.hpp"

#include <atomic>
#include <functional>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <vector>

namespace aggstream {

struct PipelineConfig {
    ClassifierKind classifier = ClassifierKind::HoeffdingTree;
    ClassScheme scheme = ClassScheme::ThreeClass;
    bool preprocess = true;
    NormalizationMode normalization = NormalizationMode::MinMaxNoOutliers;
    bool adaptive_bow = true;
    int workers = 1;
    size_t batch_size = 1024;   // count-based batches (default)
    int batch_interval_ms = 0;  // time-based batches; exactly one of the two
    double alert_threshold = 0.5;
    double sample_rate = 0.0;
    double boost_factor = 10.0;
    uint64_t seed = 1;

    FeatureLayout layout;
    HoeffdingTreeParams ht;
    ForestParams arf;
    LogisticParams slr;
    AdaptiveBow::Params bow;
    size_t eval_window = 1000;
    uint64_t sample_period = 500;
    std::optional<StatsSnapshot> preloaded_stats; // fixed stats; disables online learning

    void validate() const; // throws ConfigError
};

/// One record after the classify pass of a batch.
struct ClassifiedInstance {
    size_t batch_index = 0;
    TweetRecord record;
    Instance instance;
    ClassDistribution prediction;
};

/// Seeded balanced assignment: partition sizes differ by at most one, the
/// union is the whole batch, and every partition keeps batch order.
std::vector<std::vector<size_t>> partition_indices(size_t n, int partitions, uint64_t seed);

/// Alert iff the argmax class is non-Normal and its probability clears the
/// threshold.
std::optional<Alert> make_alert(const ClassifiedInstance& classified, double threshold,
                                ClassScheme scheme, TimestampMs now);

/// Keeps each instance independently: predicted-Normal with probability
/// sample_rate, predicted-aggressive with min(1, boost_factor * sample_rate).
std::vector<size_t> boosted_sample_indices(const std::vector<ClassifiedInstance>& classified,
                                           double sample_rate, double boost_factor,
                                           uint64_t seed);

struct BatchLogEntry {
    uint64_t seq = 0;
    size_t records = 0;
    size_t labeled = 0;
    double duration_s = 0.0;
    double tps = 0.0;
};

struct RunLog {
    std::vector<BatchLogEntry> batches;
    uint64_t total_records = 0;
    double total_seconds = 0.0;
    /// Alerts per author id (ids the feed provided); input for any future
    /// repeat-offender policy, no suspension logic here.
    std::map<std::string, uint64_t> alerts_by_user;

    double overall_tps() const {
        return total_seconds > 0.0 ? static_cast<double>(total_records) / total_seconds : 0.0;
    }
};

/// CSV throughput series: one row per batch plus an "overall" row.
void throughput_report(const RunLog& log, std::ostream& out);

struct EngineSinks {
    std::ostream* alerts = nullptr;  // JSON-lines
    std::ostream* samples = nullptr; // JSON-lines, original record + prediction
};

/// Micro-batch executor: partition -> map (clean/extract/normalize) ->
/// parallel local training (test-then-train per worker) -> barrier merge of
/// model replicas, statistics, BoW counts and evaluation -> alert/sample ->
/// publish snapshots for the next batch.
///
/// Workers share nothing mutable: each gets the previous barrier's immutable
/// snapshots (model fork, stats, BoW lexicon) and returns deltas. The
/// coordinator is the only writer of global state; a batch that fails in a
/// worker is retried once from its immutable input before giving up.
class Engine {
public:
    Engine(PipelineConfig config, Lexicons lexicons);

    /// Pulls records from the stream until it ends (or *stop flips true),
    /// batching by count or interval per config.
    void run(RecordStream& stream, const EngineSinks& sinks = {},
             const std::atomic<bool>* stop = nullptr);

    /// Feeds one prepared batch through the pipeline (test path).
    void process_batch(std::vector<TweetRecord> batch, const EngineSinks& sinks = {});

    /// Continues from a previously serialized model. Must match the
    /// configured classifier, scheme and feature count.
    void load_model(std::unique_ptr<Classifier> model);

    const Classifier& model() const { return *model_; }
    const PrequentialEvaluator& evaluator() const { return evaluator_; }
    PrequentialEvaluator& evaluator() { return evaluator_; }
    const RunLog& run_log() const { return run_log_; }
    const AdaptiveBow& bow() const { return bow_; }
    const StatsSnapshot& stats_snapshot() const { return snapshot_; }
    const PipelineConfig& config() const { return config_; }
    uint64_t batches_processed() const { return batch_seq_; }
    uint64_t alerts_emitted() const { return alerts_emitted_; }

    /// Test seam and tooling tap: called for every classified instance at the
    /// barrier, in batch order.
    std::function<void(const ClassifiedInstance&)> on_classified;
    /// Called after each barrier.
    std::function<void(uint64_t batch_seq)> on_batch_end;
    /// Fault injection for the retry path: return true to fail that worker.
    std::function<bool(uint64_t batch_seq, int worker, int attempt)> worker_fault;

private:
    struct WorkerOutput {
        std::vector<ClassifiedInstance> classified;
        std::unique_ptr<Classifier> replica;
        RunningStats local_stats;
        AdaptiveBow::Delta bow_delta;

        explicit WorkerOutput(size_t features) : local_stats(features) {}
    };

    std::unique_ptr<Classifier> make_model() const;
    WorkerOutput run_worker(const std::vector<TweetRecord>& batch,
                            const std::vector<size_t>& indices, int worker, int attempt);
    void barrier(std::vector<WorkerOutput> outputs, size_t batch_size,
                 const EngineSinks& sinks);

    PipelineConfig config_;
    Lexicons lexicons_;
    std::unique_ptr<Classifier> model_;
    RunningStats stats_;
    StatsSnapshot snapshot_;
    AdaptiveBow bow_;
    std::shared_ptr<const std::unordered_set<std::string>> bow_snapshot_;
    PrequentialEvaluator evaluator_;
    RunLog run_log_;
    uint64_t batch_seq_ = 0;
    uint64_t alerts_emitted_ = 0;
    bool stats_warned_ = false;
};

/// Builds the classifier a config describes (the engine's factory, exposed
/// for the tune command and tests).
std::unique_ptr<Classifier> make_classifier(const PipelineConfig& config);

} // namespace aggstream
