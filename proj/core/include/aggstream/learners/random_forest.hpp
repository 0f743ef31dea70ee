#pragma once

#include "aggstream/learners/classifier.hpp"
#include "aggstream/learners/hoeffding_tree.hpp"
#include "aggstream/learners/params.hpp"

#include <memory>
#include <random>
#include <vector>

namespace aggstream {

/// Online-bagging ensemble of Hoeffding trees.
///
/// Each member trains every labeled instance k ~ Poisson(lambda) times
/// (k = 0 skips), restricts split candidates to its own random feature
/// subset (floor(sqrt(M)) + 1 by default), and carries a sliding-window
/// error monitor. A window error rate above the member's long-run rate by
/// warning_sigmas standard deviations starts a background tree; above
/// drift_sigmas the member is replaced (by the background tree when one is
/// ready, otherwise a fresh one) with a new subset and RNG substream.
/// Prediction is the unweighted mean of member distributions.
///
/// Replicas train member trees in deferred-split mode and record prequential
/// outcomes per member; the barrier merge folds tree deltas, replays the
/// outcome counts into the monitors in partition order, and only then
/// evaluates warning/drift transitions.
class AdaptiveRandomForest final : public Classifier {
public:
    AdaptiveRandomForest(ClassScheme scheme, int feature_count, ForestParams params,
                         uint64_t seed);

    void train_one(const Instance& instance) override;
    ClassDistribution predict(const Instance& instance) const override;
    std::unique_ptr<Classifier> fork_replica(uint64_t salt) const override;
    void merge_replicas(std::vector<std::unique_ptr<Classifier>> replicas) override;
    ClassifierKind kind() const override { return ClassifierKind::AdaptiveRandomForest; }

    const ForestParams& params() const { return params_; }
    int ensemble_size() const { return static_cast<int>(members_.size()); }
    const HoeffdingTree& member_tree(int i) const { return *members_[static_cast<size_t>(i)].tree; }
    const std::vector<int>& member_subset(int i) const {
        return members_[static_cast<size_t>(i)].feature_subset;
    }
    uint64_t total_resets() const;

    int subspace_size() const;

    static std::unique_ptr<AdaptiveRandomForest> load_payload(ClassScheme scheme,
                                                              int feature_count,
                                                              BinaryReader& in);

private:
    struct Monitor {
        uint64_t seen = 0;   // long-run outcomes
        uint64_t errors = 0;
        std::vector<uint8_t> window; // ring buffer of recent outcomes (1 = error)
        size_t window_pos = 0;
        uint64_t window_errors = 0;

        void push(bool error, size_t capacity);
        double window_error_rate() const;
        double long_run_rate() const;
        bool window_full(size_t capacity) const { return window.size() >= capacity; }
        void reset();
    };

    struct Member {
        std::unique_ptr<HoeffdingTree> tree;
        std::vector<int> feature_subset;
        std::mt19937_64 rng;
        uint64_t member_seed = 0;
        uint64_t resets = 0;
        Monitor monitor;
        bool warning = false;
        std::unique_ptr<HoeffdingTree> background;

        // replica-side accumulation, replayed into the monitor at the barrier
        std::vector<uint8_t> pending_outcomes;
    };

    Member make_member(uint64_t member_seed) const;
    std::vector<int> draw_subset(std::mt19937_64& rng) const;
    void apply_drift_transitions(Member& member);
    void train_member(Member& member, const Instance& instance, int label);

    void save_payload(BinaryWriter& out) const override;

    ForestParams params_;
    uint64_t seed_;
    std::vector<Member> members_;
};

} // namespace aggstream
