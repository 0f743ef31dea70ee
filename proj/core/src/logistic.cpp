#include "aggstream/learners/logistic.hpp"

#include "aggstream/error.hpp"

#include <cmath>

namespace aggstream {

StreamingLogisticRegression::StreamingLogisticRegression(ClassScheme scheme, int feature_count,
                                                         LogisticParams params)
    : Classifier(scheme, feature_count), params_(params) {
    heads_.resize(static_cast<size_t>(num_effective_classes()));
    for (Head& head : heads_) head.w.assign(static_cast<size_t>(feature_count), 0.0);
}

double StreamingLogisticRegression::raw_score(const Head& head, std::span<const double> x) const {
    double z = head.b;
    for (size_t i = 0; i < head.w.size(); ++i) z += head.w[i] * x[i];
    return z;
}

void StreamingLogisticRegression::train_one(const Instance& instance) {
    int label = require_label(instance);
    check_features(instance);
    const std::span<const double> x(instance.features);
    const double lr = params_.learning_rate;
    const double reg = params_.regularization;

    for (size_t c = 0; c < heads_.size(); ++c) {
        Head& head = heads_[c];
        double y = static_cast<int>(c) == label ? 1.0 : 0.0;
        double p = sigmoid(raw_score(head, x));
        double g = p - y;
        for (size_t i = 0; i < head.w.size(); ++i) {
            double penalty = 0.0;
            switch (params_.regularizer) {
                case Regularizer::L2: penalty = reg * head.w[i]; break;
                case Regularizer::L1:
                    penalty = head.w[i] > 0.0 ? reg : (head.w[i] < 0.0 ? -reg : 0.0);
                    break;
                case Regularizer::None: break;
            }
            head.w[i] -= lr * (g * x[i] + penalty);
        }
        head.b -= lr * g;
    }
    ++instances_seen_;
    if (is_replica_) ++replica_instances_;
}

ClassDistribution StreamingLogisticRegression::predict(const Instance& instance) const {
    check_features(instance);
    ClassDistribution dist;
    dist.probs.resize(heads_.size());
    double total = 0.0;
    for (size_t c = 0; c < heads_.size(); ++c) {
        dist.probs[c] = sigmoid(raw_score(heads_[c], instance.features));
        total += dist.probs[c];
    }
    if (total <= 0.0) {
        double uniform = 1.0 / static_cast<double>(heads_.size());
        for (double& p : dist.probs) p = uniform;
        return dist;
    }
    for (double& p : dist.probs) p /= total;
    return dist;
}

std::unique_ptr<Classifier> StreamingLogisticRegression::fork_replica(uint64_t /*salt*/) const {
    auto replica = std::make_unique<StreamingLogisticRegression>(*this);
    replica->is_replica_ = true;
    replica->parent_version_ = version_;
    replica->replica_instances_ = 0;
    return replica;
}

void StreamingLogisticRegression::merge_replicas(
    std::vector<std::unique_ptr<Classifier>> replicas) {
    if (is_replica_) throw ContractViolation("merge_replicas called on a replica");
    std::vector<StreamingLogisticRegression*> typed;
    uint64_t total_instances = 0;
    for (auto& base : replicas) {
        auto* replica = dynamic_cast<StreamingLogisticRegression*>(base.get());
        if (replica == nullptr || !replica->is_replica_) {
            throw ContractViolation("merge: not a logistic replica");
        }
        if (replica->parent_version_ != version_) {
            throw ContractViolation("merge: replica forked from a different model version");
        }
        typed.push_back(replica);
        total_instances += replica->replica_instances_;
    }
    if (total_instances == 0) return; // nothing trained; weights stay put

    const double denom = static_cast<double>(total_instances);
    for (size_t c = 0; c < heads_.size(); ++c) {
        Head merged;
        merged.w.assign(static_cast<size_t>(feature_count_), 0.0);
        for (StreamingLogisticRegression* replica : typed) {
            double weight = static_cast<double>(replica->replica_instances_);
            if (weight == 0.0) continue;
            const Head& head = replica->heads_[c];
            for (size_t i = 0; i < merged.w.size(); ++i) merged.w[i] += weight * head.w[i];
            merged.b += weight * head.b;
        }
        for (size_t i = 0; i < merged.w.size(); ++i) merged.w[i] /= denom;
        merged.b /= denom;
        heads_[c] = std::move(merged);
    }
    instances_seen_ += total_instances;
    ++version_;
}

double StreamingLogisticRegression::head_loss(std::span<const double> w, double b,
                                              std::span<const double> x, double y,
                                              const LogisticParams& params) {
    double z = b;
    for (size_t i = 0; i < w.size(); ++i) z += w[i] * x[i];
    // numerically stable -[y log p + (1-y) log(1-p)]
    double loss = std::max(z, 0.0) - y * z + std::log1p(std::exp(-std::abs(z)));
    double penalty = 0.0;
    for (double wi : w) {
        if (params.regularizer == Regularizer::L2) {
            penalty += 0.5 * params.regularization * wi * wi;
        } else if (params.regularizer == Regularizer::L1) {
            penalty += params.regularization * std::abs(wi);
        }
    }
    return loss + penalty;
}

void StreamingLogisticRegression::save_payload(BinaryWriter& out) const {
    out.f64(params_.learning_rate);
    out.u8(static_cast<uint8_t>(params_.regularizer));
    out.f64(params_.regularization);
    out.u64(instances_seen_);
    for (const Head& head : heads_) {
        for (double w : head.w) out.f64(w);
        out.f64(head.b);
    }
}

std::unique_ptr<StreamingLogisticRegression> StreamingLogisticRegression::load_payload(
    ClassScheme scheme, int feature_count, BinaryReader& in) {
    LogisticParams params;
    params.learning_rate = in.f64();
    uint8_t reg = in.u8();
    if (reg > 2) throw DecodeError("bad regularizer");
    params.regularizer = static_cast<Regularizer>(reg);
    params.regularization = in.f64();
    auto model = std::make_unique<StreamingLogisticRegression>(scheme, feature_count, params);
    model->instances_seen_ = in.u64();
    for (Head& head : model->heads_) {
        for (double& w : head.w) w = in.f64();
        head.b = in.f64();
    }
    return model;
}

} // namespace aggstream
