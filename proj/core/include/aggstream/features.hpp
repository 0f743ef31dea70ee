#pragma once

#include "aggstream/lexicons.hpp"
#include "aggstream/textprep.hpp"
#include "aggstream/types.hpp"

#include <array>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace aggstream {

/// Canonical feature slots. The layout is fixed when a pipeline starts;
/// indices are stable for the whole run.
enum class FeatureId : int {
    AccountAgeDays = 0,
    StatusesCount = 1,
    ListedCount = 2,
    HashtagCount = 3,
    UrlCount = 4,
    UppercaseWordCount = 5,
    AdjRelFreq = 6,
    AdvRelFreq = 7,
    VerbRelFreq = 8,
    MeanWordsPerSentence = 9,
    MeanWordLength = 10,
    SentimentPos = 11,
    SentimentNeg = 12,
    SwearCount = 13,
    FollowersCount = 14,
    FriendsCount = 15,
};

constexpr int kFeatureSlots = 16;

std::string_view feature_name(FeatureId id);
std::optional<FeatureId> parse_feature_name(std::string_view name);

/// Maps enabled canonical slots to dense vector indices. Instance vectors
/// contain only the enabled features, in canonical order.
class FeatureLayout {
public:
    /// All 16 features enabled.
    FeatureLayout();
    explicit FeatureLayout(const std::array<bool, kFeatureSlots>& enabled);

    /// Layout with the named features disabled.
    static FeatureLayout without(const std::vector<std::string>& disabled_names);

    bool is_enabled(FeatureId id) const { return enabled_[static_cast<size_t>(id)]; }
    int active_count() const { return static_cast<int>(dense_to_slot_.size()); }

    /// Dense index of a slot, or -1 when disabled.
    int dense_index(FeatureId id) const { return slot_to_dense_[static_cast<size_t>(id)]; }
    FeatureId slot_of(int dense_index) const { return dense_to_slot_[static_cast<size_t>(dense_index)]; }

private:
    std::array<bool, kFeatureSlots> enabled_;
    std::array<int, kFeatureSlots> slot_to_dense_;
    std::vector<FeatureId> dense_to_slot_;
};

// --- counting helpers (pure) -----------------------------------------------

/// Tokens whose ASCII letters are all uppercase and number at least two.
int count_uppercase_words(std::span<const std::string> tokens);

struct PosFreqs {
    double adj = 0.0, adv = 0.0, verb = 0.0;
};
/// Tagged-token count over total token count; (0,0,0) for no tokens.
PosFreqs pos_rel_freqs(std::span<const std::string> tokens, const PosLexicon& lexicon);

struct StylisticStats {
    double mean_words_per_sentence = 0.0;
    double mean_word_length = 0.0;
};
/// Means over raw-text sentences and cleaned tokens; 0 for empty input.
StylisticStats stylistic(const CleanedText& text);

struct SentimentScore {
    double pos = 1.0; // strongest positive token score, floor 1
    double neg = -1.0; // strongest negative token score, ceiling -1
};
SentimentScore sentiment(std::span<const std::string> tokens, const SentimentLexicon& lexicon);

/// Token occurrences (lowercased) contained in the lexicon.
int swear_count(std::span<const std::string> tokens,
                const std::unordered_set<std::string>& lexicon);

/// Hashtag tokens / URL matches counted on the RAW text (cleaning removes both).
int hashtag_count(std::string_view raw);
int url_count(std::string_view raw);

// --- adaptive bag of words ---------------------------------------------------

/// Evolving swear-word lexicon. Per refresh period it accumulates, for the
/// aggressive (abusive or hateful) and normal label groups, the number of
/// tweets each word appeared in. At refresh, words enriched in aggressive
/// tweets enter the lexicon and words that drifted normal leave it, then the
/// period counters reset. Readers take an immutable snapshot of the lexicon;
/// in the parallel engine, workers record count deltas that the coordinator
/// absorbs at the batch barrier, where refresh also runs.
class AdaptiveBow {
public:
    struct Params {
        uint64_t refresh_period = 1000; // labeled tweets between refreshes
        double rate_threshold = 0.005;  // minimum aggressive tweet rate to add
        double ratio_threshold = 5.0;   // aggressive rate must be this x normal rate
        uint64_t min_count = 10;        // occurrence floor for add/remove evidence
    };

    /// Per-worker count accumulation for one micro-batch.
    struct Delta {
        std::unordered_map<std::string, uint64_t> aggressive;
        std::unordered_map<std::string, uint64_t> normal;
        uint64_t tweets_aggressive = 0;
        uint64_t tweets_normal = 0;

        /// Counts each distinct lowercase letters-only token once per tweet.
        void observe(std::span<const std::string> tokens, bool aggressive_tweet);
    };

    struct RefreshResult {
        std::vector<std::string> added;   // sorted
        std::vector<std::string> removed; // sorted
    };

    AdaptiveBow(std::unordered_set<std::string> seed, Params params);

    /// Current lexicon as a shareable immutable snapshot.
    std::shared_ptr<const std::unordered_set<std::string>> snapshot() const { return lexicon_; }
    const std::unordered_set<std::string>& lexicon() const { return *lexicon_; }

    /// Sequential path: observe one labeled tweet's tokens directly.
    void observe(std::span<const std::string> tokens, bool aggressive_tweet);

    /// Parallel path: fold one worker's counts in at the barrier.
    void absorb(const Delta& delta);

    bool refresh_due() const;
    RefreshResult refresh();

    uint64_t tweets_aggressive() const { return counts_.tweets_aggressive; }
    uint64_t tweets_normal() const { return counts_.tweets_normal; }
    uint64_t labeled_since_refresh() const;
    const Params& params() const { return params_; }

private:
    Params params_;
    std::unordered_set<std::string> seed_;
    std::shared_ptr<const std::unordered_set<std::string>> lexicon_;
    Delta counts_; // current period
};

/// Maps one tweet to the dense Instance vector for the given layout.
/// Pure function of its inputs: identical inputs produce identical vectors.
Instance extract(const TweetRecord& tweet, const CleanedText& text,
                 const std::unordered_set<std::string>& bow_lexicon,
                 const Lexicons& lexicons, const FeatureLayout& layout);

} // namespace aggstream
