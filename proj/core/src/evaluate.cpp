#include "aggstream/evaluate.hpp"

#include "aggstream/error.hpp"

#include <algorithm>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace aggstream {

ConfusionMatrix::ConfusionMatrix(int classes)
    : classes_(classes), counts_(static_cast<size_t>(classes) * static_cast<size_t>(classes), 0) {}

void ConfusionMatrix::add(int actual, int predicted, uint64_t count) {
    if (actual < 0 || actual >= classes_ || predicted < 0 || predicted >= classes_) {
        throw ContractViolation("confusion matrix index out of range");
    }
    counts_[static_cast<size_t>(actual) * static_cast<size_t>(classes_) +
            static_cast<size_t>(predicted)] += count;
}

void ConfusionMatrix::remove(int actual, int predicted) {
    uint64_t& cell = counts_[static_cast<size_t>(actual) * static_cast<size_t>(classes_) +
                             static_cast<size_t>(predicted)];
    if (cell == 0) throw ContractViolation("confusion matrix underflow");
    --cell;
}

void ConfusionMatrix::merge(const ConfusionMatrix& other) {
    if (other.classes_ != classes_) throw ContractViolation("confusion matrix size mismatch");
    for (size_t i = 0; i < counts_.size(); ++i) counts_[i] += other.counts_[i];
}

uint64_t ConfusionMatrix::at(int actual, int predicted) const {
    return counts_[static_cast<size_t>(actual) * static_cast<size_t>(classes_) +
                   static_cast<size_t>(predicted)];
}

uint64_t ConfusionMatrix::total() const {
    uint64_t t = 0;
    for (uint64_t c : counts_) t += c;
    return t;
}

uint64_t ConfusionMatrix::trace() const {
    uint64_t t = 0;
    for (int c = 0; c < classes_; ++c) t += at(c, c);
    return t;
}

uint64_t ConfusionMatrix::row_sum(int actual) const {
    uint64_t t = 0;
    for (int p = 0; p < classes_; ++p) t += at(actual, p);
    return t;
}

uint64_t ConfusionMatrix::column_sum(int predicted) const {
    uint64_t t = 0;
    for (int a = 0; a < classes_; ++a) t += at(a, predicted);
    return t;
}

double f1_score(double precision, double recall) {
    double denom = precision + recall;
    if (denom <= 0.0) return 0.0;
    return 2.0 * precision * recall / denom;
}

Metrics compute_metrics(const ConfusionMatrix& cm) {
    const uint64_t total = cm.total();
    if (total == 0) throw ContractViolation("metrics undefined on an empty confusion matrix");

    const int k = cm.classes();
    Metrics m;
    m.accuracy = static_cast<double>(cm.trace()) / static_cast<double>(total);
    m.precision.resize(static_cast<size_t>(k), 0.0);
    m.recall.resize(static_cast<size_t>(k), 0.0);
    m.f1.resize(static_cast<size_t>(k), 0.0);
    for (int c = 0; c < k; ++c) {
        uint64_t col = cm.column_sum(c);
        uint64_t row = cm.row_sum(c);
        double diag = static_cast<double>(cm.at(c, c));
        double precision = col > 0 ? diag / static_cast<double>(col) : 0.0;
        double recall = row > 0 ? diag / static_cast<double>(row) : 0.0;
        m.precision[static_cast<size_t>(c)] = precision;
        m.recall[static_cast<size_t>(c)] = recall;
        m.f1[static_cast<size_t>(c)] = f1_score(precision, recall);

        double weight = static_cast<double>(row) / static_cast<double>(total);
        m.weighted_precision += weight * precision;
        m.weighted_recall += weight * recall;
        m.weighted_f1 += weight * m.f1[static_cast<size_t>(c)];
    }
    return m;
}

PrequentialEvaluator::PrequentialEvaluator(int classes, size_t window, uint64_t sample_period)
    : classes_(classes), window_limit_(std::max<size_t>(window, 1)),
      sample_period_(sample_period), cumulative_(classes), window_counts_(classes),
      unlabeled_pred_counts_(static_cast<size_t>(classes), 0) {}

void PrequentialEvaluator::preq_step(int predicted, int actual) {
    cumulative_.add(actual, predicted);
    ++labeled_seen_;

    auto pair = std::make_pair(static_cast<uint8_t>(predicted), static_cast<uint8_t>(actual));
    if (window_.size() < window_limit_) {
        window_.push_back(pair);
        window_counts_.add(actual, predicted);
    } else {
        // evict the oldest pair beyond W
        auto& slot = window_[window_pos_];
        window_counts_.remove(slot.second, slot.first);
        slot = pair;
        window_counts_.add(actual, predicted);
        window_pos_ = (window_pos_ + 1) % window_limit_;
    }

    if (sample_period_ > 0 && labeled_seen_ % sample_period_ == 0) {
        history_.push_back(make_row());
    }
}

void PrequentialEvaluator::observe_unlabeled(int predicted) {
    if (predicted < 0 || predicted >= classes_) {
        throw ContractViolation("predicted class out of range");
    }
    ++unlabeled_seen_;
    ++unlabeled_pred_counts_[static_cast<size_t>(predicted)];
}

ConfusionMatrix PrequentialEvaluator::windowed_matrix() const { return window_counts_; }

std::vector<double> PrequentialEvaluator::predicted_distribution() const {
    std::vector<double> dist;
    if (unlabeled_seen_ == 0) return dist;
    dist.resize(static_cast<size_t>(classes_));
    for (int c = 0; c < classes_; ++c) {
        dist[static_cast<size_t>(c)] = static_cast<double>(unlabeled_pred_counts_[static_cast<size_t>(c)]) /
                                       static_cast<double>(unlabeled_seen_);
    }
    return dist;
}

PrequentialEvaluator::ReportRow PrequentialEvaluator::make_row() const {
    ReportRow row;
    row.instances_seen = labeled_seen_;
    if (labeled_seen_ > 0) {
        row.cumulative = compute_metrics(cumulative_);
        row.windowed = compute_metrics(window_counts_);
        row.has_metrics = true;
    }
    row.predicted_distribution = predicted_distribution();
    row.throughput_tps = throughput_tps_;
    return row;
}

std::string PrequentialEvaluator::csv_header(int classes, ClassScheme scheme) {
    std::ostringstream out;
    out << "instances_seen,cum_accuracy,cum_precision,cum_recall,cum_f1,"
           "win_accuracy,win_precision,win_recall,win_f1";
    for (int c = 0; c < classes; ++c) out << ",f1_" << effective_class_name(c, scheme);
    for (int c = 0; c < classes; ++c) out << ",pred_" << effective_class_name(c, scheme);
    out << ",throughput_tps";
    return out.str();
}

void PrequentialEvaluator::write_csv(std::ostream& out, ClassScheme scheme) const {
    out << csv_header(classes_, scheme) << "\n";
    auto write_row = [&](const ReportRow& row) {
        out << row.instances_seen;
        auto metric_cells = [&](const Metrics& m) {
            out << ',' << m.accuracy << ',' << m.weighted_precision << ',' << m.weighted_recall
                << ',' << m.weighted_f1;
        };
        if (row.has_metrics) {
            metric_cells(row.cumulative);
            metric_cells(row.windowed);
            for (int c = 0; c < classes_; ++c) out << ',' << row.cumulative.f1[static_cast<size_t>(c)];
        } else {
            for (int i = 0; i < 8 + classes_; ++i) out << ',';
        }
        if (row.predicted_distribution.empty()) {
            for (int c = 0; c < classes_; ++c) out << ',';
        } else {
            for (int c = 0; c < classes_; ++c) out << ',' << row.predicted_distribution[static_cast<size_t>(c)];
        }
        out << ',' << row.throughput_tps << "\n";
    };

    out << std::setprecision(17);
    for (const ReportRow& row : history_) write_row(row);
    if (labeled_seen_ == 0) {
        // metrics are undefined; emit the predicted-label distribution only
        write_row(make_row());
    }
}

void PrequentialEvaluator::write_csv(std::ostream& out) const {
    write_csv(out, classes_ == 2 ? ClassScheme::TwoClass : ClassScheme::ThreeClass);
}

} // namespace aggstream
