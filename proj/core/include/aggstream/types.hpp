#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace aggstream {

/// Epoch milliseconds, UTC.
using TimestampMs = int64_t;

constexpr double kMsPerDay = 86'400'000.0;

/// Earliest plausible tweet timestamp (2006-01-01T00:00:00Z).
constexpr TimestampMs kMinTweetTimestampMs = 1'136'073'600'000LL;

enum class ClassLabel : uint8_t { Normal = 0, Abusive = 1, Hateful = 2 };

/// TwoClass folds Abusive and Hateful into a single Aggressive class.
enum class ClassScheme : uint8_t { TwoClass, ThreeClass };

constexpr int num_classes(ClassScheme s) {
    return s == ClassScheme::TwoClass ? 2 : 3;
}

/// Effective class index of a base label under a scheme. ThreeClass is the
/// identity; TwoClass maps Normal->0 and both aggressive labels->1.
constexpr int effective_label(ClassLabel label, ClassScheme scheme) {
    if (scheme == ClassScheme::ThreeClass) return static_cast<int>(label);
    return label == ClassLabel::Normal ? 0 : 1;
}

/// Index of the Normal class; identical under both schemes.
constexpr int kNormalClass = 0;

std::string_view to_string(ClassLabel label);
std::optional<ClassLabel> parse_class_label(std::string_view text);

/// Display name of an effective class index ("normal", "abusive", "hateful"
/// or "normal", "aggressive").
std::string_view effective_class_name(int index, ClassScheme scheme);

struct UserProfile {
    std::string id; // optional author identifier; empty when the feed omits it
    TimestampMs account_created_at = 0;
    int64_t statuses_count = 0;  // posts made
    int64_t listed_count = 0;    // lists subscribed to
    int64_t followers_count = 0; // in-degree centrality
    int64_t friends_count = 0;   // out-degree centrality
};

/// One parsed input post. `label` is set when the record came from the
/// labeled stream. Immutable value object once parsed.
struct TweetRecord {
    std::string id;
    std::string text;
    TimestampMs created_at = 0;
    bool is_retweet = false; // metadata only, feeds no feature
    bool is_reply = false;
    UserProfile user;
    std::optional<ClassLabel> label;

    bool labeled() const { return label.has_value(); }
};

/// Fixed-order numeric feature vector. Length always equals the number of
/// enabled features in the pipeline's layout.
struct Instance {
    std::vector<double> features;
    std::optional<ClassLabel> label;
    std::string source_id;
};

/// Per-effective-class probabilities; entries sum to 1.
struct ClassDistribution {
    std::vector<double> probs;

    int argmax() const;
    double max_prob() const;
    double sum() const;
};

struct Alert {
    std::string source_id;
    int predicted_class = 0; // effective index, never kNormalClass
    std::string predicted_name;
    double confidence = 0.0;
    TimestampMs emitted_at = 0;
};

} // namespace aggstream
