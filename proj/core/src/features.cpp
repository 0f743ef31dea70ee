#include "aggstream/features.hpp"

#include "aggstream/error.hpp"

#include <algorithm>
#include <cctype>

namespace aggstream {
namespace {

constexpr std::array<std::string_view, kFeatureSlots> kFeatureNames = {
    "account_age_days",  "statuses_count",   "listed_count",
    "hashtag_count",     "url_count",        "uppercase_word_count",
    "adj_rel_freq",      "adv_rel_freq",     "verb_rel_freq",
    "mean_words_per_sentence", "mean_word_length", "sentiment_pos",
    "sentiment_neg",     "swear_count",      "followers_count",
    "friends_count",
};

std::string lowercase_ascii(const std::string& word) {
    std::string out = word;
    for (char& c : out) {
        c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    return out;
}

bool letters_only(const std::string& word) {
    return std::all_of(word.begin(), word.end(),
                       [](unsigned char c) { return is_letter_byte(c); });
}

} // namespace

std::string_view feature_name(FeatureId id) {
    return kFeatureNames[static_cast<size_t>(id)];
}

std::optional<FeatureId> parse_feature_name(std::string_view name) {
    for (int i = 0; i < kFeatureSlots; ++i) {
        if (kFeatureNames[static_cast<size_t>(i)] == name) return static_cast<FeatureId>(i);
    }
    return std::nullopt;
}

FeatureLayout::FeatureLayout() {
    enabled_.fill(true);
    slot_to_dense_.fill(-1);
    for (int i = 0; i < kFeatureSlots; ++i) {
        slot_to_dense_[static_cast<size_t>(i)] = i;
        dense_to_slot_.push_back(static_cast<FeatureId>(i));
    }
}

FeatureLayout::FeatureLayout(const std::array<bool, kFeatureSlots>& enabled) : enabled_(enabled) {
    slot_to_dense_.fill(-1);
    for (int i = 0; i < kFeatureSlots; ++i) {
        if (!enabled_[static_cast<size_t>(i)]) continue;
        slot_to_dense_[static_cast<size_t>(i)] = static_cast<int>(dense_to_slot_.size());
        dense_to_slot_.push_back(static_cast<FeatureId>(i));
    }
    if (dense_to_slot_.empty()) throw ConfigError("all features disabled");
}

FeatureLayout FeatureLayout::without(const std::vector<std::string>& disabled_names) {
    std::array<bool, kFeatureSlots> enabled;
    enabled.fill(true);
    for (const std::string& name : disabled_names) {
        auto id = parse_feature_name(name);
        if (!id) throw ConfigError("unknown feature name: " + name);
        enabled[static_cast<size_t>(*id)] = false;
    }
    return FeatureLayout(enabled);
}

int count_uppercase_words(std::span<const std::string> tokens) {
    int count = 0;
    for (const std::string& token : tokens) {
        int letters = 0;
        bool all_upper = true;
        for (unsigned char c : token) {
            if (c >= 'a' && c <= 'z') {
                all_upper = false;
                break;
            }
            if (c >= 'A' && c <= 'Z') ++letters;
        }
        if (all_upper && letters >= 2) ++count;
    }
    return count;
}

PosFreqs pos_rel_freqs(std::span<const std::string> tokens, const PosLexicon& lexicon) {
    PosFreqs freqs;
    if (tokens.empty()) return freqs;
    int adj = 0, adv = 0, verb = 0;
    for (const std::string& token : tokens) {
        auto tag = lexicon.tag(lowercase_ascii(token));
        if (!tag) continue;
        switch (*tag) {
            case PosTag::Adjective: ++adj; break;
            case PosTag::Adverb: ++adv; break;
            case PosTag::Verb: ++verb; break;
        }
    }
    double total = static_cast<double>(tokens.size());
    freqs.adj = adj / total;
    freqs.adv = adv / total;
    freqs.verb = verb / total;
    return freqs;
}

StylisticStats stylistic(const CleanedText& text) {
    StylisticStats stats;
    // a text that cleans to nothing is degenerate even if the raw text
    // segments (e.g. "12 34!!"), so both features stay 0 together
    if (!text.sentences.empty() && !text.tokens.empty()) {
        size_t words = 0;
        for (const auto& sentence : text.sentences) words += sentence.size();
        stats.mean_words_per_sentence =
            static_cast<double>(words) / static_cast<double>(text.sentences.size());
    }
    if (!text.tokens.empty()) {
        size_t chars = 0;
        for (const std::string& token : text.tokens) chars += token.size();
        stats.mean_word_length =
            static_cast<double>(chars) / static_cast<double>(text.tokens.size());
    }
    return stats;
}

SentimentScore sentiment(std::span<const std::string> tokens, const SentimentLexicon& lexicon) {
    SentimentScore score; // dual-scale baseline (1, -1)
    for (const std::string& token : tokens) {
        int s = lexicon.score(lowercase_ascii(token));
        if (s > 0) score.pos = std::max(score.pos, static_cast<double>(s));
        if (s < 0) score.neg = std::min(score.neg, static_cast<double>(s));
    }
    return score;
}

int swear_count(std::span<const std::string> tokens,
                const std::unordered_set<std::string>& lexicon) {
    int count = 0;
    for (const std::string& token : tokens) {
        if (lexicon.count(lowercase_ascii(token)) > 0) ++count;
    }
    return count;
}

int hashtag_count(std::string_view raw) {
    auto is_space = [](unsigned char c) { return std::isspace(c) != 0; };
    int count = 0;
    bool at_token_start = true;
    for (size_t i = 0; i < raw.size(); ++i) {
        unsigned char c = raw[i];
        if (at_token_start && c == '#' && i + 1 < raw.size() &&
            !is_space(static_cast<unsigned char>(raw[i + 1]))) {
            ++count;
        }
        at_token_start = is_space(c);
    }
    return count;
}

int url_count(std::string_view raw) {
    int count = 0;
    bool at_token_start = true;
    for (size_t i = 0; i < raw.size(); ++i) {
        unsigned char c = raw[i];
        if (raw.compare(i, 7, "http://") == 0 || raw.compare(i, 8, "https://") == 0) {
            ++count;
            // skip the token so "https://t.co/x" counts once
            while (i < raw.size() && !std::isspace(static_cast<unsigned char>(raw[i]))) ++i;
            at_token_start = true;
            continue;
        }
        if (at_token_start && raw.compare(i, 5, "t.co/") == 0) {
            ++count;
            while (i < raw.size() && !std::isspace(static_cast<unsigned char>(raw[i]))) ++i;
            at_token_start = true;
            continue;
        }
        at_token_start = std::isspace(c) != 0;
    }
    return count;
}

void AdaptiveBow::Delta::observe(std::span<const std::string> tokens, bool aggressive_tweet) {
    auto& counts = aggressive_tweet ? aggressive : normal;
    std::unordered_set<std::string> seen;
    for (const std::string& token : tokens) {
        std::string word = lowercase_ascii(token);
        if (word.empty() || !letters_only(word)) continue;
        if (seen.insert(word).second) ++counts[word];
    }
    if (aggressive_tweet) {
        ++tweets_aggressive;
    } else {
        ++tweets_normal;
    }
}

AdaptiveBow::AdaptiveBow(std::unordered_set<std::string> seed, Params params)
    : params_(params), seed_(std::move(seed)),
      lexicon_(std::make_shared<const std::unordered_set<std::string>>(seed_)) {}

void AdaptiveBow::observe(std::span<const std::string> tokens, bool aggressive_tweet) {
    counts_.observe(tokens, aggressive_tweet);
}

void AdaptiveBow::absorb(const Delta& delta) {
    for (const auto& [word, n] : delta.aggressive) counts_.aggressive[word] += n;
    for (const auto& [word, n] : delta.normal) counts_.normal[word] += n;
    counts_.tweets_aggressive += delta.tweets_aggressive;
    counts_.tweets_normal += delta.tweets_normal;
}

uint64_t AdaptiveBow::labeled_since_refresh() const {
    return counts_.tweets_aggressive + counts_.tweets_normal;
}

bool AdaptiveBow::refresh_due() const {
    return labeled_since_refresh() >= params_.refresh_period;
}

AdaptiveBow::RefreshResult AdaptiveBow::refresh() {
    RefreshResult result;
    const double t_aggr = static_cast<double>(counts_.tweets_aggressive);
    const double t_norm = static_cast<double>(counts_.tweets_normal);

    auto rate = [](uint64_t count, double total) {
        return total > 0.0 ? static_cast<double>(count) / total : 0.0;
    };
    auto normal_count = [&](const std::string& word) -> uint64_t {
        auto it = counts_.normal.find(word);
        return it == counts_.normal.end() ? 0 : it->second;
    };
    auto aggressive_count = [&](const std::string& word) -> uint64_t {
        auto it = counts_.aggressive.find(word);
        return it == counts_.aggressive.end() ? 0 : it->second;
    };

    std::unordered_set<std::string> next = *lexicon_;

    // additions: frequent in aggressive tweets, not high-occurring in normal ones
    for (const auto& [word, count] : counts_.aggressive) {
        if (next.count(word) > 0) continue;
        if (count < params_.min_count) continue;
        double r_a = rate(count, t_aggr);
        double r_n = rate(normal_count(word), t_norm);
        if (r_a >= params_.rate_threshold && r_a >= params_.ratio_threshold * r_n) {
            result.added.push_back(word);
        }
    }

    // removals (seed words included): now more frequent in normal tweets
    for (const std::string& word : *lexicon_) {
        uint64_t n_count = normal_count(word);
        if (n_count < params_.min_count) continue;
        double r_n = rate(n_count, t_norm);
        double r_a = rate(aggressive_count(word), t_aggr);
        if (r_n > r_a) result.removed.push_back(word);
    }

    std::sort(result.added.begin(), result.added.end());
    std::sort(result.removed.begin(), result.removed.end());
    for (const std::string& word : result.added) next.insert(word);
    for (const std::string& word : result.removed) next.erase(word);

    lexicon_ = std::make_shared<const std::unordered_set<std::string>>(std::move(next));
    counts_ = Delta{}; // period statistics roll over
    return result;
}

Instance extract(const TweetRecord& tweet, const CleanedText& text,
                 const std::unordered_set<std::string>& bow_lexicon,
                 const Lexicons& lexicons, const FeatureLayout& layout) {
    std::array<double, kFeatureSlots> slots{};

    double age_ms = static_cast<double>(tweet.created_at - tweet.user.account_created_at);
    slots[static_cast<size_t>(FeatureId::AccountAgeDays)] = std::max(0.0, age_ms / kMsPerDay);
    slots[static_cast<size_t>(FeatureId::StatusesCount)] =
        static_cast<double>(tweet.user.statuses_count);
    slots[static_cast<size_t>(FeatureId::ListedCount)] =
        static_cast<double>(tweet.user.listed_count);
    slots[static_cast<size_t>(FeatureId::FollowersCount)] =
        static_cast<double>(tweet.user.followers_count);
    slots[static_cast<size_t>(FeatureId::FriendsCount)] =
        static_cast<double>(tweet.user.friends_count);

    slots[static_cast<size_t>(FeatureId::HashtagCount)] = hashtag_count(text.raw);
    slots[static_cast<size_t>(FeatureId::UrlCount)] = url_count(text.raw);
    slots[static_cast<size_t>(FeatureId::UppercaseWordCount)] =
        count_uppercase_words(text.tokens);

    PosFreqs pos = pos_rel_freqs(text.tokens, lexicons.pos);
    slots[static_cast<size_t>(FeatureId::AdjRelFreq)] = pos.adj;
    slots[static_cast<size_t>(FeatureId::AdvRelFreq)] = pos.adv;
    slots[static_cast<size_t>(FeatureId::VerbRelFreq)] = pos.verb;

    StylisticStats style = stylistic(text);
    slots[static_cast<size_t>(FeatureId::MeanWordsPerSentence)] = style.mean_words_per_sentence;
    slots[static_cast<size_t>(FeatureId::MeanWordLength)] = style.mean_word_length;

    SentimentScore senti = sentiment(text.tokens, lexicons.sentiment);
    slots[static_cast<size_t>(FeatureId::SentimentPos)] = senti.pos;
    slots[static_cast<size_t>(FeatureId::SentimentNeg)] = senti.neg;

    slots[static_cast<size_t>(FeatureId::SwearCount)] = swear_count(text.tokens, bow_lexicon);

    Instance instance;
    instance.source_id = tweet.id;
    instance.label = tweet.label;
    instance.features.reserve(static_cast<size_t>(layout.active_count()));
    for (int dense = 0; dense < layout.active_count(); ++dense) {
        instance.features.push_back(slots[static_cast<size_t>(layout.slot_of(dense))]);
    }
    return instance;
}

} // namespace aggstream
