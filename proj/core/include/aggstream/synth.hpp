#pragma once

#include "aggstream/ingest.hpp"
#include "aggstream/types.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace aggstream {

/// Per-class text generator knobs. Tokens are drawn from word pools (neutral,
/// swear-seed, emergent, positive, negative) so every downstream feature is
/// exercised; decorations (hashtags, URLs, mentions, digit runs) attach per
/// tweet.
struct ClassTextParams {
    double swear_prob = 0.05;
    double emergent_prob = 0.0;
    double negative_prob = 0.05;
    double positive_prob = 0.10;
    double uppercase_prob = 0.05;
    int words_per_sentence_min = 4;
    int words_per_sentence_max = 18;
    int sentences_min = 1;
    int sentences_max = 3;
    double hashtag_prob = 0.2;
    double url_prob = 0.2;
    double mention_prob = 0.25;
    double digit_prob = 0.2;
};

struct ClassProfileParams {
    double account_age_mean_days = 1400.0;
    double account_age_jitter_days = 800.0; // uniform +-
    double statuses_mean = 5000.0;          // exponential means
    double listed_mean = 25.0;
    double followers_mean = 500.0;
    double friends_mean = 400.0;
};

struct ClassParams {
    ClassTextParams text;
    ClassProfileParams profile;
};

/// Generator parameters active from start_index on (phases sorted ascending,
/// first at 0). A drift point is just a second phase.
struct GeneratorPhase {
    uint64_t start_index = 0;
    std::array<ClassParams, 3> classes; // indexed by ClassLabel
};

struct SyntheticConfig {
    uint64_t n_tweets = 1000;
    std::array<double, 3> class_priors = {0.6, 0.3, 0.1};
    double labeled_fraction = 1.0;
    std::vector<GeneratorPhase> phases;
    std::vector<std::string> emergent_pool;

    /// Class-separated defaults: aggressive classes swear more, shout more,
    /// read more negative and come from younger accounts.
    static SyntheticConfig defaults(uint64_t n);
    /// defaults() plus a phase switch at drift_index where new abuse
    /// vocabulary (the emergent pool) enters aggressive tweets.
    static SyntheticConfig with_drift(uint64_t n, uint64_t drift_index);

    /// Throws ConfigError on bad priors (must sum to 1 within 1e-9), n == 0,
    /// or unsorted phases.
    void validate() const;
};

/// Deterministic finite stream of synthetic tweets: a fixed seed yields a
/// byte-identical stream.
class SyntheticStream final : public RecordSource {
public:
    SyntheticStream(SyntheticConfig config, uint64_t seed);

    PullStatus next(TweetRecord& record, int timeout_ms) override;
    const ParseStats& stats() const override { return stats_; }

private:
    TweetRecord generate(uint64_t index);
    const ClassParams& params_for(uint64_t index, int label) const;

    SyntheticConfig config_;
    std::mt19937_64 rng_;
    uint64_t index_ = 0;
    ParseStats stats_;
};

/// Convenience: materialize the whole stream.
std::vector<TweetRecord> generate_synthetic(const SyntheticConfig& config, uint64_t seed);

} // namespace aggstream
