#include "aggstream/learners/random_forest.hpp"

#include "aggstream/error.hpp"
#include "aggstream/rng.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace aggstream {

void AdaptiveRandomForest::Monitor::push(bool error, size_t capacity) {
    ++seen;
    if (error) ++errors;
    uint8_t bit = error ? 1 : 0;
    if (window.size() < capacity) {
        window.push_back(bit);
        window_errors += bit;
        return;
    }
    window_errors -= window[window_pos];
    window[window_pos] = bit;
    window_errors += bit;
    window_pos = (window_pos + 1) % capacity;
}

double AdaptiveRandomForest::Monitor::window_error_rate() const {
    if (window.empty()) return 0.0;
    return static_cast<double>(window_errors) / static_cast<double>(window.size());
}

double AdaptiveRandomForest::Monitor::long_run_rate() const {
    if (seen == 0) return 0.0;
    return static_cast<double>(errors) / static_cast<double>(seen);
}

void AdaptiveRandomForest::Monitor::reset() {
    seen = errors = 0;
    window.clear();
    window_pos = 0;
    window_errors = 0;
}

AdaptiveRandomForest::AdaptiveRandomForest(ClassScheme scheme, int feature_count,
                                           ForestParams params, uint64_t seed)
    : Classifier(scheme, feature_count), params_(params), seed_(seed) {
    if (params_.ensemble_size < 1) throw ConfigError("ensemble_size must be >= 1");
    members_.reserve(static_cast<size_t>(params_.ensemble_size));
    for (int i = 0; i < params_.ensemble_size; ++i) {
        members_.push_back(make_member(rng::mix(seed_, 0xa5f0000ULL + static_cast<uint64_t>(i))));
    }
}

int AdaptiveRandomForest::subspace_size() const {
    int m = feature_count_;
    int size = params_.subspace_size > 0
                   ? params_.subspace_size
                   : static_cast<int>(std::floor(std::sqrt(static_cast<double>(m)))) + 1;
    return std::min(size, m);
}

std::vector<int> AdaptiveRandomForest::draw_subset(std::mt19937_64& rng_state) const {
    int take = subspace_size();
    std::vector<int> all(static_cast<size_t>(feature_count_));
    for (int i = 0; i < feature_count_; ++i) all[static_cast<size_t>(i)] = i;
    if (take >= feature_count_) return all;
    // partial Fisher-Yates, then sorted for deterministic split scans
    std::vector<int> subset;
    subset.reserve(static_cast<size_t>(take));
    for (int i = 0; i < take; ++i) {
        size_t j = static_cast<size_t>(i) +
                   static_cast<size_t>(rng::below(rng_state, all.size() - static_cast<size_t>(i)));
        std::swap(all[static_cast<size_t>(i)], all[j]);
        subset.push_back(all[static_cast<size_t>(i)]);
    }
    std::sort(subset.begin(), subset.end());
    return subset;
}

AdaptiveRandomForest::Member AdaptiveRandomForest::make_member(uint64_t member_seed) const {
    Member member;
    member.member_seed = member_seed;
    member.rng.seed(member_seed);
    member.feature_subset = draw_subset(member.rng);
    member.tree = std::make_unique<HoeffdingTree>(scheme_, feature_count_, params_.tree,
                                                  member.feature_subset);
    return member;
}

void AdaptiveRandomForest::train_member(Member& member, const Instance& instance, int label) {
    int k = params_.bagging ? rng::poisson(member.rng, params_.poisson_lambda) : 1;
    bool error = member.tree->predict(instance).argmax() != label;

    if (k > 0) {
        for (int i = 0; i < k; ++i) member.tree->train_one(instance);
        if (member.background) {
            for (int i = 0; i < k; ++i) member.background->train_one(instance);
        }
    }

    if (!params_.drift_detection) return;
    if (is_replica_) {
        member.pending_outcomes.push_back(error ? 1 : 0);
        return;
    }
    member.monitor.push(error, static_cast<size_t>(params_.drift_window));
    apply_drift_transitions(member);
}

void AdaptiveRandomForest::apply_drift_transitions(Member& member) {
    const size_t capacity = static_cast<size_t>(params_.drift_window);
    if (!member.monitor.window_full(capacity)) return;
    double longrun = member.monitor.long_run_rate();
    double sigma = std::sqrt(longrun * (1.0 - longrun) / static_cast<double>(capacity));
    double rate = member.monitor.window_error_rate();

    if (rate > longrun + params_.drift_sigmas * sigma) {
        // drift: replace with the background tree when one is ready
        ++member.resets;
        uint64_t next_seed = rng::mix(member.member_seed, member.resets);
        member.rng.seed(next_seed);
        std::vector<int> subset = draw_subset(member.rng);
        if (member.background) {
            member.tree = std::move(member.background);
            member.feature_subset = member.tree->candidate_features();
        } else {
            member.feature_subset = subset;
            member.tree = std::make_unique<HoeffdingTree>(scheme_, feature_count_, params_.tree,
                                                          member.feature_subset);
        }
        member.background.reset();
        member.warning = false;
        member.monitor.reset();
        return;
    }
    if (!member.warning && rate > longrun + params_.warning_sigmas * sigma) {
        member.warning = true;
        // background tree grows on its own fresh subset
        std::vector<int> subset = draw_subset(member.rng);
        member.background =
            std::make_unique<HoeffdingTree>(scheme_, feature_count_, params_.tree, subset);
    }
}

void AdaptiveRandomForest::train_one(const Instance& instance) {
    int label = require_label(instance);
    check_features(instance);
    for (Member& member : members_) train_member(member, instance, label);
}

ClassDistribution AdaptiveRandomForest::predict(const Instance& instance) const {
    check_features(instance);
    const int k = num_effective_classes();
    ClassDistribution dist;
    dist.probs.assign(static_cast<size_t>(k), 0.0);
    for (const Member& member : members_) {
        ClassDistribution part = member.tree->predict(instance);
        for (int c = 0; c < k; ++c) dist.probs[static_cast<size_t>(c)] += part.probs[static_cast<size_t>(c)];
    }
    double scale = 1.0 / static_cast<double>(members_.size());
    for (double& p : dist.probs) p *= scale;
    return dist;
}

std::unique_ptr<Classifier> AdaptiveRandomForest::fork_replica(uint64_t salt) const {
    auto replica = std::make_unique<AdaptiveRandomForest>(scheme_, feature_count_, params_, seed_);
    replica->is_replica_ = true;
    replica->parent_version_ = version_;
    replica->version_ = version_;
    replica->members_.clear();
    replica->members_.reserve(members_.size());
    for (size_t i = 0; i < members_.size(); ++i) {
        const Member& source = members_[i];
        Member copy;
        copy.member_seed = source.member_seed;
        copy.resets = source.resets;
        copy.feature_subset = source.feature_subset;
        copy.monitor = source.monitor;
        copy.warning = source.warning;
        // replica RNG substream depends only on (member, salt): reproducible
        copy.rng.seed(rng::mix(source.member_seed, salt, i));
        auto tree_replica = source.tree->fork_replica(0);
        copy.tree.reset(static_cast<HoeffdingTree*>(tree_replica.release()));
        if (source.background) {
            auto bg_replica = source.background->fork_replica(0);
            copy.background.reset(static_cast<HoeffdingTree*>(bg_replica.release()));
        }
        replica->members_.push_back(std::move(copy));
    }
    return replica;
}

void AdaptiveRandomForest::merge_replicas(std::vector<std::unique_ptr<Classifier>> replicas) {
    if (is_replica_) throw ContractViolation("merge_replicas called on a replica");
    std::vector<AdaptiveRandomForest*> typed;
    for (auto& base : replicas) {
        auto* replica = dynamic_cast<AdaptiveRandomForest*>(base.get());
        if (replica == nullptr || !replica->is_replica_) {
            throw ContractViolation("merge: not a forest replica");
        }
        if (replica->parent_version_ != version_) {
            throw ContractViolation("merge: replica forked from a different model version");
        }
        if (replica->members_.size() != members_.size()) {
            throw ContractViolation("merge: ensemble size diverged");
        }
        typed.push_back(replica);
    }

    bool changed = false;
    for (size_t m = 0; m < members_.size(); ++m) {
        Member& member = members_[m];
        std::vector<std::unique_ptr<Classifier>> tree_replicas;
        std::vector<std::unique_ptr<Classifier>> background_replicas;
        for (AdaptiveRandomForest* replica : typed) {
            Member& source = replica->members_[m];
            if (!source.pending_outcomes.empty()) changed = true;
            tree_replicas.push_back(std::move(source.tree));
            if (member.background && source.background) {
                background_replicas.push_back(std::move(source.background));
            }
        }
        uint64_t tree_version_before = member.tree->version();
        member.tree->merge_replicas(std::move(tree_replicas));
        if (member.tree->version() != tree_version_before) changed = true;
        if (member.background) {
            member.background->merge_replicas(std::move(background_replicas));
        }

        if (params_.drift_detection) {
            // replay prequential outcomes in partition order, then decide
            for (AdaptiveRandomForest* replica : typed) {
                for (uint8_t error : replica->members_[m].pending_outcomes) {
                    member.monitor.push(error != 0, static_cast<size_t>(params_.drift_window));
                }
                replica->members_[m].pending_outcomes.clear();
            }
            apply_drift_transitions(member);
        }
    }
    if (changed) ++version_;
}

uint64_t AdaptiveRandomForest::total_resets() const {
    uint64_t total = 0;
    for (const Member& member : members_) total += member.resets;
    return total;
}

void AdaptiveRandomForest::save_payload(BinaryWriter& out) const {
    out.u8(static_cast<uint8_t>(params_.tree.split_criterion));
    out.f64(params_.tree.split_confidence);
    out.f64(params_.tree.tie_threshold);
    out.i32(params_.tree.grace_period);
    out.i32(params_.tree.max_depth);
    out.i32(params_.tree.split_points);
    out.i32(params_.ensemble_size);
    out.i32(params_.subspace_size);
    out.f64(params_.poisson_lambda);
    out.u8(params_.bagging ? 1 : 0);
    out.u8(params_.drift_detection ? 1 : 0);
    out.i32(params_.drift_window);
    out.f64(params_.warning_sigmas);
    out.f64(params_.drift_sigmas);
    out.u64(seed_);

    out.u32(static_cast<uint32_t>(members_.size()));
    for (const Member& member : members_) {
        out.u64(member.member_seed);
        out.u64(member.resets);
        out.u8(member.warning ? 1 : 0);
        out.u32(static_cast<uint32_t>(member.feature_subset.size()));
        for (int f : member.feature_subset) out.i32(f);
        std::ostringstream rng_state;
        rng_state << member.rng;
        out.str(rng_state.str());
        out.u64(member.monitor.seen);
        out.u64(member.monitor.errors);
        out.u64(member.monitor.window_errors);
        out.u64(static_cast<uint64_t>(member.monitor.window_pos));
        out.u32(static_cast<uint32_t>(member.monitor.window.size()));
        for (uint8_t b : member.monitor.window) out.u8(b);

        BinaryWriter tree_payload;
        member.tree->save_payload(tree_payload);
        out.u32(static_cast<uint32_t>(tree_payload.bytes().size()));
        for (uint8_t b : tree_payload.bytes()) out.u8(b);

        out.u8(member.background ? 1 : 0);
        if (member.background) {
            BinaryWriter bg_payload;
            member.background->save_payload(bg_payload);
            out.u32(static_cast<uint32_t>(bg_payload.bytes().size()));
            for (uint8_t b : bg_payload.bytes()) out.u8(b);
        }
    }
}

std::unique_ptr<AdaptiveRandomForest> AdaptiveRandomForest::load_payload(ClassScheme scheme,
                                                                         int feature_count,
                                                                         BinaryReader& in) {
    ForestParams params;
    uint8_t criterion = in.u8();
    if (criterion > 1) throw DecodeError("bad split criterion");
    params.tree.split_criterion = static_cast<SplitCriterion>(criterion);
    params.tree.split_confidence = in.f64();
    params.tree.tie_threshold = in.f64();
    params.tree.grace_period = in.i32();
    params.tree.max_depth = in.i32();
    params.tree.split_points = in.i32();
    params.ensemble_size = in.i32();
    params.subspace_size = in.i32();
    params.poisson_lambda = in.f64();
    params.bagging = in.u8() != 0;
    params.drift_detection = in.u8() != 0;
    params.drift_window = in.i32();
    params.warning_sigmas = in.f64();
    params.drift_sigmas = in.f64();
    uint64_t seed = in.u64();
    if (params.ensemble_size < 1 || params.ensemble_size > 10000) {
        throw DecodeError("bad ensemble size");
    }

    auto model = std::make_unique<AdaptiveRandomForest>(scheme, feature_count, params, seed);
    uint32_t n_members = in.u32();
    if (n_members != static_cast<uint32_t>(params.ensemble_size)) {
        throw DecodeError("member count mismatch");
    }
    model->members_.clear();
    for (uint32_t i = 0; i < n_members; ++i) {
        Member member;
        member.member_seed = in.u64();
        member.resets = in.u64();
        member.warning = in.u8() != 0;
        uint32_t subset_size = in.u32();
        member.feature_subset.reserve(subset_size);
        for (uint32_t j = 0; j < subset_size; ++j) {
            int f = in.i32();
            if (f < 0 || f >= feature_count) throw DecodeError("bad subset feature");
            member.feature_subset.push_back(f);
        }
        std::istringstream rng_state(in.str());
        rng_state >> member.rng;
        if (!rng_state) throw DecodeError("bad member rng state");
        member.monitor.seen = in.u64();
        member.monitor.errors = in.u64();
        member.monitor.window_errors = in.u64();
        member.monitor.window_pos = static_cast<size_t>(in.u64());
        uint32_t window_size = in.u32();
        member.monitor.window.reserve(window_size);
        for (uint32_t j = 0; j < window_size; ++j) member.monitor.window.push_back(in.u8());

        uint32_t tree_bytes = in.u32();
        (void)tree_bytes;
        member.tree = HoeffdingTree::load_payload(scheme, feature_count, in);
        if (in.u8() != 0) {
            uint32_t bg_bytes = in.u32();
            (void)bg_bytes;
            member.background = HoeffdingTree::load_payload(scheme, feature_count, in);
        }
        model->members_.push_back(std::move(member));
    }
    return model;
}

} // namespace aggstream
