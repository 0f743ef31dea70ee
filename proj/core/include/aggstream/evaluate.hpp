#pragma once

#include "aggstream/types.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace aggstream {

/// K x K counts; rows are actual classes, columns predicted.
class ConfusionMatrix {
public:
    explicit ConfusionMatrix(int classes = 2);

    void add(int actual, int predicted, uint64_t count = 1);
    /// Removes one previously added pair (window eviction).
    void remove(int actual, int predicted);
    void merge(const ConfusionMatrix& other);

    uint64_t at(int actual, int predicted) const;
    uint64_t total() const;
    uint64_t trace() const;
    uint64_t row_sum(int actual) const;    // support of a class
    uint64_t column_sum(int predicted) const;
    int classes() const { return classes_; }

    bool operator==(const ConfusionMatrix& other) const = default;

private:
    int classes_;
    std::vector<uint64_t> counts_;
};

struct Metrics {
    double accuracy = 0.0;
    std::vector<double> precision; // per class; 0 when the column is empty
    std::vector<double> recall;    // per class; 0 when the row is empty
    std::vector<double> f1;        // harmonic mean; 0 when p + r == 0
    double weighted_precision = 0.0; // support-weighted averages
    double weighted_recall = 0.0;
    double weighted_f1 = 0.0;
};

/// Throws ContractViolation when the matrix is empty (metrics undefined).
Metrics compute_metrics(const ConfusionMatrix& cm);

double f1_score(double precision, double recall);

/// Test-then-train bookkeeping: cumulative confusion matrix, a sliding
/// window of the last W (pred, actual) pairs for windowed curves, the
/// predicted-label distribution over unlabeled instances, and a metric
/// history row every S labeled instances.
class PrequentialEvaluator {
public:
    struct ReportRow {
        uint64_t instances_seen = 0; // labeled
        Metrics cumulative;
        Metrics windowed;
        std::vector<double> predicted_distribution; // over unlabeled; empty if none seen
        double throughput_tps = 0.0;
        bool has_metrics = false;
    };

    PrequentialEvaluator(int classes, size_t window = 1000, uint64_t sample_period = 500);

    /// Record one labeled instance, tested before the model trained on it.
    void preq_step(int predicted, int actual);
    /// Record the prediction for an unlabeled instance.
    void observe_unlabeled(int predicted);

    /// Engine sets this; sampled into rows as they are emitted.
    void set_throughput_hint(double tps) { throughput_tps_ = tps; }

    const ConfusionMatrix& cumulative() const { return cumulative_; }
    ConfusionMatrix windowed_matrix() const;
    uint64_t labeled_seen() const { return labeled_seen_; }
    uint64_t unlabeled_seen() const { return unlabeled_seen_; }
    std::vector<double> predicted_distribution() const;

    const std::vector<ReportRow>& history() const { return history_; }

    /// One CSV row per sampling point; when the whole run saw zero labeled
    /// instances a single summary row carries only the predicted-label
    /// distribution.
    void write_csv(std::ostream& out) const;
    static std::string csv_header(int classes, ClassScheme scheme);
    void write_csv(std::ostream& out, ClassScheme scheme) const;

private:
    ReportRow make_row() const;

    int classes_;
    size_t window_limit_;
    uint64_t sample_period_;
    ConfusionMatrix cumulative_;
    ConfusionMatrix window_counts_;
    std::vector<std::pair<uint8_t, uint8_t>> window_; // ring: (pred, actual)
    size_t window_pos_ = 0;
    uint64_t labeled_seen_ = 0;
    uint64_t unlabeled_seen_ = 0;
    std::vector<uint64_t> unlabeled_pred_counts_;
    double throughput_tps_ = 0.0;
    std::vector<ReportRow> history_;
};

} // namespace aggstream
