#pragma once

#include "aggstream/learners/binary_io.hpp"
#include "aggstream/types.hpp"

#include <filesystem>
#include <memory>
#include <span>
#include <string_view>
#include <vector>

namespace aggstream {

enum class ClassifierKind : uint8_t { HoeffdingTree = 1, AdaptiveRandomForest = 2, Logistic = 3 };

std::string_view to_string(ClassifierKind kind);
std::optional<ClassifierKind> parse_classifier_kind(std::string_view text);

/// Incremental classifier contract shared by all three model families:
/// train-one, predict, fork-replica, merge, serialize.
///
/// A global model is read-only between barriers. fork_replica() produces a
/// single-owner copy that trains in deferred mode (tree replicas update leaf
/// statistics but never restructure; logistic replicas count their
/// instances). merge_replicas() folds the replicas' accumulated state back
/// into the global model and bumps its version; replicas forked from an
/// older version are rejected.
class Classifier {
public:
    virtual ~Classifier() = default;

    /// Test-then-train callers must predict before calling this.
    /// Throws ContractViolation for unlabeled instances or non-finite features.
    virtual void train_one(const Instance& instance) = 0;

    virtual ClassDistribution predict(const Instance& instance) const = 0;

    /// Deep copy flagged as a replica of the current version. `salt` seeds
    /// any randomness the replica consumes, so a (run seed, batch, partition)
    /// derivation reproduces byte-identical training.
    virtual std::unique_ptr<Classifier> fork_replica(uint64_t salt) const = 0;

    virtual void merge_replicas(std::vector<std::unique_ptr<Classifier>> replicas) = 0;

    virtual ClassifierKind kind() const = 0;

    ClassScheme scheme() const { return scheme_; }
    int num_effective_classes() const { return num_classes(scheme_); }
    int feature_count() const { return feature_count_; }
    uint64_t version() const { return version_; }
    bool is_replica() const { return is_replica_; }

protected:
    Classifier(ClassScheme scheme, int feature_count)
        : scheme_(scheme), feature_count_(feature_count) {}

    /// Effective class index of a labeled instance; validates the contract.
    int require_label(const Instance& instance) const;
    void check_features(const Instance& instance) const;

    ClassScheme scheme_;
    int feature_count_;
    uint64_t version_ = 0;
    bool is_replica_ = false;
    uint64_t parent_version_ = 0;

    friend std::vector<uint8_t> serialize_model(const Classifier& model);
    friend std::unique_ptr<Classifier> deserialize_model(std::span<const uint8_t> bytes);

    virtual void save_payload(BinaryWriter& out) const = 0;
};

/// Versioned self-describing binary model format.
std::vector<uint8_t> serialize_model(const Classifier& model);
std::unique_ptr<Classifier> deserialize_model(std::span<const uint8_t> bytes);

void save_model_file(const Classifier& model, const std::filesystem::path& file);
std::unique_ptr<Classifier> load_model_file(const std::filesystem::path& file);

/// Hoeffding bound ε = sqrt(R² · ln(1/δ) / (2n)).
double hoeffding_bound(double range, double confidence, uint64_t n);

} // namespace aggstream
