#include "aggstream/synth.hpp"

#include "aggstream/error.hpp"
#include "aggstream/rng.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

namespace aggstream {
namespace {

// 2021-03-01T00:00:00Z
constexpr TimestampMs kStreamEpochMs = 1'614'556'800'000LL;

// Pools overlap the shipped lexicon files on purpose: swear words are in
// data/swear_seed.txt, sentiment words in sentiment.tsv, and the neutral pool
// mixes plain words with tagged adjectives/adverbs/verbs from pos.tsv.
const std::vector<std::string>& neutral_pool() {
    static const std::vector<std::string> pool = {
        "the",    "a",       "to",      "and",    "of",      "in",     "on",
        "for",    "with",    "about",   "today",  "again",   "people", "friend",
        "game",   "coffee",  "morning", "news",   "weather", "music",  "team",
        "city",   "road",    "house",   "water",  "phone",   "photo",  "video",
        "story",  "week",    "night",   "dinner", "train",   "market", "garden",
        "red",    "big",     "small",   "quick",  "quiet",   "bright", "early",
        "run",    "walk",    "talk",    "write",  "read",    "play",   "work",
        "slowly", "quickly", "really",  "always", "never",   "often",  "maybe",
        "here",   "there",   "home",    "school", "office",  "street", "river",
    };
    return pool;
}

const std::vector<std::string>& positive_pool() {
    static const std::vector<std::string> pool = {
        "good", "great", "happy", "love", "awesome", "nice", "beautiful",
        "win",  "best",  "fun",   "cool", "amazing", "super", "sweet",
    };
    return pool;
}

const std::vector<std::string>& negative_pool() {
    static const std::vector<std::string> pool = {
        "bad",   "awful", "hate",  "terrible", "horrible", "worst", "ugly",
        "angry", "sick",  "stupid", "dumb",    "gross",    "trash", "pathetic",
    };
    return pool;
}

const std::vector<std::string>& swear_pool() {
    static const std::vector<std::string> pool = {
        "damn",    "hell",     "crap",    "bastard", "bitch",  "asshole",
        "shit",    "fuck",     "douche",  "prick",   "moron",  "idiot",
        "scumbag", "dirtbag",  "jackass", "wanker",  "tosser", "twat",
    };
    return pool;
}

ClassParams normal_defaults() {
    ClassParams p;
    p.text.swear_prob = 0.01;
    p.text.negative_prob = 0.04;
    p.text.positive_prob = 0.12;
    p.text.uppercase_prob = 0.04;
    p.text.words_per_sentence_min = 6;
    p.text.words_per_sentence_max = 24;
    p.text.hashtag_prob = 0.3;
    p.text.url_prob = 0.25;
    p.text.mention_prob = 0.3;
    p.text.digit_prob = 0.2;
    p.profile.account_age_mean_days = 1480.0;
    p.profile.statuses_mean = 5000.0;
    p.profile.listed_mean = 30.0;
    p.profile.followers_mean = 700.0;
    p.profile.friends_mean = 400.0;
    return p;
}

ClassParams abusive_defaults() {
    ClassParams p;
    p.text.swear_prob = 0.30;
    p.text.negative_prob = 0.25;
    p.text.positive_prob = 0.03;
    p.text.uppercase_prob = 0.14;
    p.text.words_per_sentence_min = 4;
    p.text.words_per_sentence_max = 14;
    p.text.hashtag_prob = 0.12;
    p.text.url_prob = 0.08;
    p.text.mention_prob = 0.4;
    p.text.digit_prob = 0.12;
    p.profile.account_age_mean_days = 1290.0;
    p.profile.statuses_mean = 8000.0;
    p.profile.listed_mean = 12.0;
    p.profile.followers_mean = 350.0;
    p.profile.friends_mean = 450.0;
    return p;
}

ClassParams hateful_defaults() {
    ClassParams p;
    p.text.swear_prob = 0.22;
    p.text.negative_prob = 0.20;
    p.text.positive_prob = 0.04;
    p.text.uppercase_prob = 0.11;
    p.text.words_per_sentence_min = 5;
    p.text.words_per_sentence_max = 18;
    p.text.hashtag_prob = 0.15;
    p.text.url_prob = 0.1;
    p.text.mention_prob = 0.35;
    p.text.digit_prob = 0.12;
    p.profile.account_age_mean_days = 1380.0;
    p.profile.statuses_mean = 7000.0;
    p.profile.listed_mean = 12.0;
    p.profile.followers_mean = 320.0;
    p.profile.friends_mean = 380.0;
    return p;
}

const std::string& pick(const std::vector<std::string>& pool, std::mt19937_64& g) {
    return pool[static_cast<size_t>(rng::below(g, pool.size()))];
}

int64_t exponential_count(std::mt19937_64& g, double mean) {
    double u = rng::uniform01(g);
    double v = -mean * std::log(1.0 - u);
    return static_cast<int64_t>(std::max(0.0, v));
}

} // namespace

SyntheticConfig SyntheticConfig::defaults(uint64_t n) {
    SyntheticConfig config;
    config.n_tweets = n;
    GeneratorPhase phase;
    phase.start_index = 0;
    phase.classes = {normal_defaults(), abusive_defaults(), hateful_defaults()};
    config.phases.push_back(phase);
    config.emergent_pool = {"glorp", "zynx", "craggle", "vexnit", "drubble"};
    return config;
}

SyntheticConfig SyntheticConfig::with_drift(uint64_t n, uint64_t drift_index) {
    SyntheticConfig config = defaults(n);
    GeneratorPhase drifted = config.phases[0];
    drifted.start_index = drift_index;
    // new abuse vocabulary appears; part of the old one fades
    for (int label : {1, 2}) {
        auto& text = drifted.classes[static_cast<size_t>(label)].text;
        text.emergent_prob = 0.18;
        text.swear_prob *= 0.5;
    }
    config.phases.push_back(drifted);
    return config;
}

void SyntheticConfig::validate() const {
    if (n_tweets == 0) throw ConfigError("synthetic stream needs n_tweets > 0");
    double sum = class_priors[0] + class_priors[1] + class_priors[2];
    if (std::abs(sum - 1.0) > 1e-9) throw ConfigError("class priors must sum to 1");
    for (double p : class_priors) {
        if (p < 0.0) throw ConfigError("class priors must be non-negative");
    }
    if (labeled_fraction < 0.0 || labeled_fraction > 1.0) {
        throw ConfigError("labeled_fraction must be in [0,1]");
    }
    if (phases.empty() || phases.front().start_index != 0) {
        throw ConfigError("generator needs a phase starting at index 0");
    }
    for (size_t i = 1; i < phases.size(); ++i) {
        if (phases[i].start_index <= phases[i - 1].start_index) {
            throw ConfigError("generator phases must be sorted");
        }
    }
}

SyntheticStream::SyntheticStream(SyntheticConfig config, uint64_t seed)
    : config_(std::move(config)), rng_(seed) {
    config_.validate();
}

const ClassParams& SyntheticStream::params_for(uint64_t index, int label) const {
    const GeneratorPhase* phase = &config_.phases.front();
    for (const GeneratorPhase& p : config_.phases) {
        if (p.start_index <= index) phase = &p;
    }
    return phase->classes[static_cast<size_t>(label)];
}

TweetRecord SyntheticStream::generate(uint64_t index) {
    // class from priors
    double u = rng::uniform01(rng_);
    int label = 0;
    double cum = 0.0;
    for (int c = 0; c < 3; ++c) {
        cum += config_.class_priors[static_cast<size_t>(c)];
        if (u < cum) {
            label = c;
            break;
        }
        label = c;
    }
    const ClassParams& params = params_for(index, label);
    const ClassTextParams& text = params.text;

    std::string body;
    int sentences = text.sentences_min +
                    static_cast<int>(rng::below(
                        rng_, static_cast<uint64_t>(text.sentences_max - text.sentences_min + 1)));
    for (int s = 0; s < sentences; ++s) {
        int words = text.words_per_sentence_min +
                    static_cast<int>(rng::below(
                        rng_, static_cast<uint64_t>(text.words_per_sentence_max -
                                                    text.words_per_sentence_min + 1)));
        for (int w = 0; w < words; ++w) {
            double pick_u = rng::uniform01(rng_);
            const std::string* word = nullptr;
            if (pick_u < text.swear_prob) {
                word = &pick(swear_pool(), rng_);
            } else if (pick_u < text.swear_prob + text.emergent_prob &&
                       !config_.emergent_pool.empty()) {
                word = &pick(config_.emergent_pool, rng_);
            } else if (pick_u < text.swear_prob + text.emergent_prob + text.negative_prob) {
                word = &pick(negative_pool(), rng_);
            } else if (pick_u <
                       text.swear_prob + text.emergent_prob + text.negative_prob + text.positive_prob) {
                word = &pick(positive_pool(), rng_);
            } else {
                word = &pick(neutral_pool(), rng_);
            }
            std::string token = *word;
            if (rng::uniform01(rng_) < text.uppercase_prob) {
                for (char& c : token) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
            } else if (w == 0) {
                token[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(token[0])));
            }
            if (!body.empty()) body.push_back(' ');
            body += token;
        }
        const char* enders[3] = {".", "!", "?"};
        body += enders[rng::below(rng_, 3)];
        if (s + 1 < sentences) body.push_back(' ');
    }

    if (rng::uniform01(rng_) < text.mention_prob) {
        body = "@user" + std::to_string(rng::below(rng_, 5000)) + " " + body;
    }
    if (rng::uniform01(rng_) < text.digit_prob) {
        body += " " + std::to_string(100 + rng::below(rng_, 9900));
    }
    if (rng::uniform01(rng_) < text.hashtag_prob) {
        body += " #" + pick(neutral_pool(), rng_) + std::to_string(rng::below(rng_, 100));
    }
    if (rng::uniform01(rng_) < text.url_prob) {
        static const char* alphabet = "abcdefghijklmnopqrstuvwxyz0123456789";
        std::string slug;
        for (int i = 0; i < 8; ++i) slug.push_back(alphabet[rng::below(rng_, 36)]);
        body += " https://t.co/" + slug;
    }

    TweetRecord record;
    record.id = "synth-" + std::to_string(index);
    record.text = std::move(body);
    record.created_at = kStreamEpochMs + static_cast<int64_t>(index) * 1000;
    const ClassProfileParams& profile = params.profile;
    double age_days = profile.account_age_mean_days +
                      (rng::uniform01(rng_) * 2.0 - 1.0) * profile.account_age_jitter_days;
    age_days = std::max(1.0, age_days);
    record.user.account_created_at =
        record.created_at - static_cast<int64_t>(age_days * kMsPerDay);
    record.user.statuses_count = exponential_count(rng_, profile.statuses_mean);
    record.user.listed_count = exponential_count(rng_, profile.listed_mean);
    record.user.followers_count = exponential_count(rng_, profile.followers_mean);
    record.user.friends_count = exponential_count(rng_, profile.friends_mean);

    if (rng::uniform01(rng_) < config_.labeled_fraction) {
        record.label = static_cast<ClassLabel>(label);
    }
    record.user.id = "u" + std::to_string(rng::below(rng_, 2000));
    return record;
}

PullStatus SyntheticStream::next(TweetRecord& record, int /*timeout_ms*/) {
    if (index_ >= config_.n_tweets) return PullStatus::End;
    record = generate(index_++);
    ++stats_.lines;
    ++stats_.emitted;
    return PullStatus::Ready;
}

std::vector<TweetRecord> generate_synthetic(const SyntheticConfig& config, uint64_t seed) {
    SyntheticStream stream(config, seed);
    std::vector<TweetRecord> records;
    records.reserve(config.n_tweets);
    TweetRecord record;
    while (stream.next(record, -1) == PullStatus::Ready) records.push_back(record);
    return records;
}

} // namespace aggstream
