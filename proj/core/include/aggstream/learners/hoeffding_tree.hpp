#pragma once

#include "aggstream/learners/classifier.hpp"
#include "aggstream/learners/params.hpp"

#include <vector>

namespace aggstream {

/// Incremental decision tree for numeric features.
///
/// Leaves keep per-class counts plus one Gaussian summary (n, mean, M2) per
/// (feature, class) and per-feature observed min/max. Every grace_period
/// instances a leaf evaluates candidate splits: `split_points` thresholds
/// spanning the observed range per candidate feature, scored by information
/// gain (bits) or Gini reduction; the leaf splits when the top two features'
/// merits differ by more than the Hoeffding bound, or the bound falls below
/// the tie threshold. Split children start with fresh statistics.
///
/// Replicas (fork_replica) train deferred: they accumulate leaf-statistic
/// deltas and never restructure; merge_replicas sums class counts, merges
/// Gaussian summaries with the parallel-moments rule, then runs the pending
/// split attempts once, centrally.
class HoeffdingTree final : public Classifier {
public:
    HoeffdingTree(ClassScheme scheme, int feature_count, HoeffdingTreeParams params,
                  std::vector<int> candidate_features = {});

    void train_one(const Instance& instance) override;
    ClassDistribution predict(const Instance& instance) const override;
    std::unique_ptr<Classifier> fork_replica(uint64_t salt) const override;
    void merge_replicas(std::vector<std::unique_ptr<Classifier>> replicas) override;
    ClassifierKind kind() const override { return ClassifierKind::HoeffdingTree; }

    const HoeffdingTreeParams& params() const { return params_; }
    /// Split-candidate features; empty means all features.
    const std::vector<int>& candidate_features() const { return candidate_features_; }

    // introspection for tests and reports
    int node_count() const { return static_cast<int>(nodes_.size()); }
    int leaf_count() const;
    int depth() const;
    struct LeafView {
        int node = 0;
        int depth = 0;
        std::vector<double> class_counts;
        double seen_since_attempt = 0.0;
        // flattened observers, feature-major: n, mean, m2 per (feature, class)
        std::vector<double> observer_moments;
    };
    std::vector<LeafView> leaf_views() const;
    /// Root split (feature, threshold) when the root is internal.
    std::optional<std::pair<int, double>> root_split() const;

    /// Restores a tree written by save_payload; used by deserialize_model.
    static std::unique_ptr<HoeffdingTree> load_payload(ClassScheme scheme, int feature_count,
                                                       BinaryReader& in);

private:
    struct Gaussian {
        double n = 0.0;
        double mean = 0.0;
        double m2 = 0.0;

        void add(double value);
        void merge(const Gaussian& other);
        double sample_std() const;
        /// Mass expected at or below `threshold` under the summary.
        double mass_below(double threshold) const;
    };

    /// Statistics a leaf accumulates; also the shape of a replica's delta.
    struct LeafData {
        std::vector<double> class_counts;            // K
        std::vector<Gaussian> observers;             // M*K, feature-major
        std::vector<double> feature_min, feature_max; // M
        double seen_since_attempt = 0.0;

        void init(int classes, int features);
        void observe(std::span<const double> x, int label);
        void merge(const LeafData& other);
        double total() const;
    };

    struct Node {
        bool is_leaf = true;
        int split_feature = -1;
        double threshold = 0.0;
        int left = -1;
        int right = -1;
        int depth = 0;
        LeafData leaf;
    };

    int route(std::span<const double> x) const;
    void attempt_split(int node_index);
    struct SplitCandidate {
        double merit = 0.0;
        int feature = -1;
        double threshold = 0.0;
    };
    SplitCandidate best_split_for_feature(const LeafData& leaf, int feature) const;
    double merit_of_split(const LeafData& leaf, int feature, double threshold) const;
    double impurity(std::span<const double> dist) const;
    double criterion_range() const;

    void save_payload(BinaryWriter& out) const override;

    HoeffdingTreeParams params_;
    std::vector<int> candidate_features_; // empty: all features are candidates
    std::vector<Node> nodes_;
    std::vector<LeafData> delta_; // replica mode: per-node accumulation

    friend class AdaptiveRandomForest;
};

} // namespace aggstream
