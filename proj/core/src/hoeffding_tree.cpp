#include "aggstream/learners/hoeffding_tree.hpp"

#include "aggstream/error.hpp"

#include <algorithm>
#include <cmath>

namespace aggstream {

namespace {
constexpr double kSigmaFloor = 1e-12;
} // namespace

void HoeffdingTree::Gaussian::add(double value) {
    n += 1.0;
    double delta = value - mean;
    mean += delta / n;
    m2 += delta * (value - mean);
}

void HoeffdingTree::Gaussian::merge(const Gaussian& other) {
    if (other.n <= 0.0) return;
    if (n <= 0.0) {
        *this = other;
        return;
    }
    double total = n + other.n;
    double delta = other.mean - mean;
    mean += delta * (other.n / total);
    m2 += other.m2 + delta * delta * (n * other.n / total);
    n = total;
}

double HoeffdingTree::Gaussian::sample_std() const {
    if (n < 2.0) return 0.0;
    return std::sqrt(std::max(0.0, m2 / (n - 1.0)));
}

double HoeffdingTree::Gaussian::mass_below(double threshold) const {
    if (n <= 0.0) return 0.0;
    double sd = sample_std();
    if (sd < kSigmaFloor) return mean <= threshold ? n : 0.0;
    double z = (threshold - mean) / sd;
    return n * 0.5 * std::erfc(-z / std::sqrt(2.0));
}

void HoeffdingTree::LeafData::init(int classes, int features) {
    class_counts.assign(static_cast<size_t>(classes), 0.0);
    observers.assign(static_cast<size_t>(features) * static_cast<size_t>(classes), Gaussian{});
    feature_min.assign(static_cast<size_t>(features), 0.0);
    feature_max.assign(static_cast<size_t>(features), 0.0);
    seen_since_attempt = 0.0;
}

void HoeffdingTree::LeafData::observe(std::span<const double> x, int label) {
    const size_t classes = class_counts.size();
    bool first = total() == 0.0;
    class_counts[static_cast<size_t>(label)] += 1.0;
    for (size_t f = 0; f < feature_min.size(); ++f) {
        double v = x[f];
        if (first) {
            feature_min[f] = feature_max[f] = v;
        } else {
            feature_min[f] = std::min(feature_min[f], v);
            feature_max[f] = std::max(feature_max[f], v);
        }
        observers[f * classes + static_cast<size_t>(label)].add(v);
    }
    seen_since_attempt += 1.0;
}

void HoeffdingTree::LeafData::merge(const LeafData& other) {
    if (other.total() == 0.0 && other.seen_since_attempt == 0.0) return;
    bool self_empty = total() == 0.0;
    for (size_t c = 0; c < class_counts.size(); ++c) class_counts[c] += other.class_counts[c];
    for (size_t i = 0; i < observers.size(); ++i) observers[i].merge(other.observers[i]);
    for (size_t f = 0; f < feature_min.size(); ++f) {
        if (other.total() == 0.0) continue;
        if (self_empty) {
            feature_min[f] = other.feature_min[f];
            feature_max[f] = other.feature_max[f];
        } else {
            feature_min[f] = std::min(feature_min[f], other.feature_min[f]);
            feature_max[f] = std::max(feature_max[f], other.feature_max[f]);
        }
    }
    seen_since_attempt += other.seen_since_attempt;
}

double HoeffdingTree::LeafData::total() const {
    double t = 0.0;
    for (double c : class_counts) t += c;
    return t;
}

HoeffdingTree::HoeffdingTree(ClassScheme scheme, int feature_count, HoeffdingTreeParams params,
                             std::vector<int> candidate_features)
    : Classifier(scheme, feature_count), params_(params),
      candidate_features_(std::move(candidate_features)) {
    Node root;
    root.leaf.init(num_effective_classes(), feature_count);
    nodes_.push_back(std::move(root));
}

int HoeffdingTree::route(std::span<const double> x) const {
    int index = 0;
    while (!nodes_[static_cast<size_t>(index)].is_leaf) {
        const Node& node = nodes_[static_cast<size_t>(index)];
        index = x[static_cast<size_t>(node.split_feature)] <= node.threshold ? node.left
                                                                             : node.right;
    }
    return index;
}

void HoeffdingTree::train_one(const Instance& instance) {
    int label = require_label(instance);
    check_features(instance);
    int index = route(instance.features);

    if (is_replica_) {
        // deferred-split mode: accumulate into the delta, never restructure
        delta_[static_cast<size_t>(index)].observe(instance.features, label);
        return;
    }

    Node& node = nodes_[static_cast<size_t>(index)];
    node.leaf.observe(instance.features, label);
    if (node.leaf.seen_since_attempt >= params_.grace_period) {
        attempt_split(index);
    }
}

ClassDistribution HoeffdingTree::predict(const Instance& instance) const {
    check_features(instance);
    int index = route(instance.features);
    const LeafData& leaf = nodes_[static_cast<size_t>(index)].leaf;

    const int k = num_effective_classes();
    ClassDistribution dist;
    dist.probs.resize(static_cast<size_t>(k));
    double total = leaf.total();
    double delta_total = 0.0;
    const LeafData* delta = nullptr;
    if (is_replica_) {
        delta = &delta_[static_cast<size_t>(index)];
        delta_total = delta->total();
    }
    // Laplace-smoothed leaf frequencies
    double denom = total + delta_total + static_cast<double>(k);
    for (int c = 0; c < k; ++c) {
        double count = leaf.class_counts[static_cast<size_t>(c)];
        if (delta) count += delta->class_counts[static_cast<size_t>(c)];
        dist.probs[static_cast<size_t>(c)] = (count + 1.0) / denom;
    }
    return dist;
}

double HoeffdingTree::impurity(std::span<const double> dist) const {
    double total = 0.0;
    for (double d : dist) total += d;
    if (total <= 0.0) return 0.0;
    if (params_.split_criterion == SplitCriterion::InfoGain) {
        double h = 0.0;
        for (double d : dist) {
            if (d <= 0.0) continue;
            double p = d / total;
            h -= p * std::log2(p);
        }
        return h;
    }
    double gini = 1.0;
    for (double d : dist) {
        double p = d / total;
        gini -= p * p;
    }
    return gini;
}

double HoeffdingTree::criterion_range() const {
    if (params_.split_criterion == SplitCriterion::InfoGain) {
        return std::log2(static_cast<double>(num_effective_classes()));
    }
    return 1.0;
}

double HoeffdingTree::merit_of_split(const LeafData& leaf, int feature, double threshold) const {
    const size_t k = leaf.class_counts.size();
    std::vector<double> left(k, 0.0), right(k, 0.0);
    double left_total = 0.0, right_total = 0.0;
    for (size_t c = 0; c < k; ++c) {
        const Gaussian& g = leaf.observers[static_cast<size_t>(feature) * k + c];
        double below = g.mass_below(threshold);
        left[c] = below;
        right[c] = g.n - below;
        left_total += left[c];
        right_total += right[c];
    }
    double total = left_total + right_total;
    if (total <= 0.0 || left_total <= 0.0 || right_total <= 0.0) return 0.0;
    double parent = impurity(leaf.class_counts);
    double post = (left_total / total) * impurity(left) + (right_total / total) * impurity(right);
    return parent - post;
}

HoeffdingTree::SplitCandidate HoeffdingTree::best_split_for_feature(const LeafData& leaf,
                                                                    int feature) const {
    SplitCandidate best;
    best.feature = feature;
    double lo = leaf.feature_min[static_cast<size_t>(feature)];
    double hi = leaf.feature_max[static_cast<size_t>(feature)];
    if (!(hi > lo)) return best;
    const int points = params_.split_points;
    for (int j = 1; j <= points; ++j) {
        double t = lo + (hi - lo) * static_cast<double>(j) / static_cast<double>(points + 1);
        double merit = merit_of_split(leaf, feature, t);
        if (merit > best.merit) {
            best.merit = merit;
            best.threshold = t;
        }
    }
    return best;
}

void HoeffdingTree::attempt_split(int node_index) {
    Node& node = nodes_[static_cast<size_t>(node_index)];
    node.leaf.seen_since_attempt = 0.0;
    if (node.depth >= params_.max_depth) return;

    SplitCandidate best, second;
    auto consider = [&](int feature) {
        SplitCandidate cand = best_split_for_feature(node.leaf, feature);
        if (cand.merit > best.merit) {
            second = best;
            best = cand;
        } else if (cand.merit > second.merit) {
            second = cand;
        }
    };
    if (candidate_features_.empty()) {
        for (int f = 0; f < feature_count_; ++f) consider(f);
    } else {
        for (int f : candidate_features_) consider(f);
    }
    if (best.merit <= 0.0) return;

    double epsilon = hoeffding_bound(criterion_range(), params_.split_confidence,
                                     static_cast<uint64_t>(node.leaf.total()));
    if (best.merit - second.merit > epsilon || epsilon < params_.tie_threshold) {
        Node left_child, right_child;
        left_child.depth = right_child.depth = node.depth + 1;
        left_child.leaf.init(num_effective_classes(), feature_count_);
        right_child.leaf.init(num_effective_classes(), feature_count_);

        node.is_leaf = false;
        node.split_feature = best.feature;
        node.threshold = best.threshold;
        node.leaf = LeafData{}; // internal nodes carry no statistics
        int left_index = static_cast<int>(nodes_.size());
        node.left = left_index;
        node.right = left_index + 1;
        nodes_.push_back(std::move(left_child));
        nodes_.push_back(std::move(right_child));
    }
}

std::unique_ptr<Classifier> HoeffdingTree::fork_replica(uint64_t /*salt*/) const {
    auto replica = std::make_unique<HoeffdingTree>(*this);
    replica->is_replica_ = true;
    replica->parent_version_ = version_;
    replica->delta_.resize(nodes_.size());
    for (size_t i = 0; i < nodes_.size(); ++i) {
        if (nodes_[i].is_leaf) {
            replica->delta_[i].init(num_effective_classes(), feature_count_);
        }
    }
    return replica;
}

void HoeffdingTree::merge_replicas(std::vector<std::unique_ptr<Classifier>> replicas) {
    if (is_replica_) throw ContractViolation("merge_replicas called on a replica");
    bool changed = false;
    for (auto& base : replicas) {
        auto* replica = dynamic_cast<HoeffdingTree*>(base.get());
        if (replica == nullptr || !replica->is_replica_) {
            throw ContractViolation("merge: not a HoeffdingTree replica");
        }
        if (replica->parent_version_ != version_) {
            throw ContractViolation("merge: replica forked from a different model version");
        }
        if (replica->nodes_.size() != nodes_.size()) {
            throw ContractViolation("merge: replica tree structure diverged");
        }
        for (size_t i = 0; i < nodes_.size(); ++i) {
            if (!nodes_[i].is_leaf) continue;
            const LeafData& delta = replica->delta_[i];
            if (delta.total() > 0.0 || delta.seen_since_attempt > 0.0) changed = true;
            nodes_[i].leaf.merge(delta);
        }
    }

    // pending split attempts run once, centrally, over the merged statistics
    const size_t existing = nodes_.size();
    for (size_t i = 0; i < existing; ++i) {
        if (nodes_[i].is_leaf && nodes_[i].leaf.seen_since_attempt >= params_.grace_period) {
            attempt_split(static_cast<int>(i));
        }
    }
    if (changed) ++version_;
}

int HoeffdingTree::leaf_count() const {
    int count = 0;
    for (const Node& node : nodes_) count += node.is_leaf ? 1 : 0;
    return count;
}

int HoeffdingTree::depth() const {
    int depth = 0;
    for (const Node& node : nodes_) depth = std::max(depth, node.depth);
    return depth;
}

std::vector<HoeffdingTree::LeafView> HoeffdingTree::leaf_views() const {
    std::vector<LeafView> views;
    for (size_t i = 0; i < nodes_.size(); ++i) {
        const Node& node = nodes_[i];
        if (!node.is_leaf) continue;
        LeafView view;
        view.node = static_cast<int>(i);
        view.depth = node.depth;
        view.class_counts = node.leaf.class_counts;
        view.seen_since_attempt = node.leaf.seen_since_attempt;
        view.observer_moments.reserve(node.leaf.observers.size() * 3);
        for (const Gaussian& g : node.leaf.observers) {
            view.observer_moments.push_back(g.n);
            view.observer_moments.push_back(g.mean);
            view.observer_moments.push_back(g.m2);
        }
        views.push_back(std::move(view));
    }
    return views;
}

std::optional<std::pair<int, double>> HoeffdingTree::root_split() const {
    if (nodes_.empty() || nodes_[0].is_leaf) return std::nullopt;
    return std::make_pair(nodes_[0].split_feature, nodes_[0].threshold);
}

void HoeffdingTree::save_payload(BinaryWriter& out) const {
    out.u8(static_cast<uint8_t>(params_.split_criterion));
    out.f64(params_.split_confidence);
    out.f64(params_.tie_threshold);
    out.i32(params_.grace_period);
    out.i32(params_.max_depth);
    out.i32(params_.split_points);
    out.u32(static_cast<uint32_t>(candidate_features_.size()));
    for (int f : candidate_features_) out.i32(f);

    out.u32(static_cast<uint32_t>(nodes_.size()));
    for (const Node& node : nodes_) {
        out.u8(node.is_leaf ? 1 : 0);
        out.i32(node.depth);
        if (!node.is_leaf) {
            out.i32(node.split_feature);
            out.f64(node.threshold);
            out.i32(node.left);
            out.i32(node.right);
            continue;
        }
        for (double c : node.leaf.class_counts) out.f64(c);
        for (const Gaussian& g : node.leaf.observers) {
            out.f64(g.n);
            out.f64(g.mean);
            out.f64(g.m2);
        }
        for (double v : node.leaf.feature_min) out.f64(v);
        for (double v : node.leaf.feature_max) out.f64(v);
        out.f64(node.leaf.seen_since_attempt);
    }
}

std::unique_ptr<HoeffdingTree> HoeffdingTree::load_payload(ClassScheme scheme, int feature_count,
                                                           BinaryReader& in) {
    HoeffdingTreeParams params;
    uint8_t criterion = in.u8();
    if (criterion > 1) throw DecodeError("bad split criterion");
    params.split_criterion = static_cast<SplitCriterion>(criterion);
    params.split_confidence = in.f64();
    params.tie_threshold = in.f64();
    params.grace_period = in.i32();
    params.max_depth = in.i32();
    params.split_points = in.i32();
    uint32_t n_candidates = in.u32();
    std::vector<int> candidates;
    candidates.reserve(n_candidates);
    for (uint32_t i = 0; i < n_candidates; ++i) candidates.push_back(in.i32());

    auto tree = std::make_unique<HoeffdingTree>(scheme, feature_count, params,
                                                std::move(candidates));
    uint32_t n_nodes = in.u32();
    if (n_nodes == 0) throw DecodeError("tree has no nodes");
    tree->nodes_.clear();
    tree->nodes_.reserve(n_nodes);
    const int k = num_classes(scheme);
    for (uint32_t i = 0; i < n_nodes; ++i) {
        Node node;
        node.is_leaf = in.u8() != 0;
        node.depth = in.i32();
        if (!node.is_leaf) {
            node.split_feature = in.i32();
            node.threshold = in.f64();
            node.left = in.i32();
            node.right = in.i32();
            if (node.split_feature < 0 || node.split_feature >= feature_count ||
                node.left < 0 || node.right < 0 ||
                static_cast<uint32_t>(node.left) >= n_nodes ||
                static_cast<uint32_t>(node.right) >= n_nodes) {
                throw DecodeError("bad internal node");
            }
        } else {
            node.leaf.init(k, feature_count);
            for (double& c : node.leaf.class_counts) c = in.f64();
            for (Gaussian& g : node.leaf.observers) {
                g.n = in.f64();
                g.mean = in.f64();
                g.m2 = in.f64();
            }
            for (double& v : node.leaf.feature_min) v = in.f64();
            for (double& v : node.leaf.feature_max) v = in.f64();
            node.leaf.seen_since_attempt = in.f64();
        }
        tree->nodes_.push_back(std::move(node));
    }
    return tree;
}

} // namespace aggstream
