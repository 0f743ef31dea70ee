#pragma once

#include "aggstream/learners/classifier.hpp"
#include "aggstream/learners/params.hpp"

#include <cmath>
#include <vector>

namespace aggstream {

/// Online logistic regression trained by SGD with a constant step size,
/// one-vs-rest head per effective class. Prediction normalizes per-head
/// sigmoid scores to a distribution. Replicas count the instances they
/// trained on; merging takes the instance-count-weighted average of replica
/// weights (unchanged when no replica trained).
class StreamingLogisticRegression final : public Classifier {
public:
    StreamingLogisticRegression(ClassScheme scheme, int feature_count, LogisticParams params);

    void train_one(const Instance& instance) override;
    ClassDistribution predict(const Instance& instance) const override;
    std::unique_ptr<Classifier> fork_replica(uint64_t salt) const override;
    void merge_replicas(std::vector<std::unique_ptr<Classifier>> replicas) override;
    ClassifierKind kind() const override { return ClassifierKind::Logistic; }

    const LogisticParams& params() const { return params_; }
    uint64_t instances_seen() const { return instances_seen_; }
    uint64_t replica_instances() const { return replica_instances_; }

    /// Head weights/bias, exposed for merge verification.
    std::span<const double> weights(int head) const { return heads_[static_cast<size_t>(head)].w; }
    double bias(int head) const { return heads_[static_cast<size_t>(head)].b; }

    /// Regularized log-loss of one (instance, head target) pair at given
    /// weights; the observable the SGD step descends.
    static double head_loss(std::span<const double> w, double b, std::span<const double> x,
                            double y, const LogisticParams& params);

    static std::unique_ptr<StreamingLogisticRegression> load_payload(ClassScheme scheme,
                                                                     int feature_count,
                                                                     BinaryReader& in);

private:
    struct Head {
        std::vector<double> w;
        double b = 0.0;
    };

    void save_payload(BinaryWriter& out) const override;
    double raw_score(const Head& head, std::span<const double> x) const;

    LogisticParams params_;
    std::vector<Head> heads_;
    uint64_t instances_seen_ = 0;
    uint64_t replica_instances_ = 0; // instances this replica trained on
};

inline double sigmoid(double z) {
    if (z >= 0.0) {
        return 1.0 / (1.0 + std::exp(-z));
    }
    double e = std::exp(z);
    return e / (1.0 + e);
}

} // namespace aggstream
