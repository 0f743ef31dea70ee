#include "aggstream/synth.hpp"

#include "aggstream/error.hpp"
#include "aggstream/ingest.hpp"

#include <doctest.h>

#include <cmath>
#include <set>

using namespace aggstream;

TEST_CASE("degenerate priors produce a single class") {
    SyntheticConfig config = SyntheticConfig::defaults(500);
    config.class_priors = {1.0, 0.0, 0.0};
    for (const TweetRecord& record : generate_synthetic(config, 5)) {
        REQUIRE(record.labeled());
        CHECK(*record.label == ClassLabel::Normal);
    }
}

TEST_CASE("the same seed yields a byte-identical stream") {
    SyntheticConfig config = SyntheticConfig::defaults(400);
    config.labeled_fraction = 0.7;
    auto a = generate_synthetic(config, 99);
    auto b = generate_synthetic(config, 99);
    REQUIRE(a.size() == b.size());
    for (size_t i = 0; i < a.size(); ++i) {
        CHECK(serialize_tweet(a[i]) == serialize_tweet(b[i]));
    }
    auto c = generate_synthetic(config, 100);
    bool all_same = true;
    for (size_t i = 0; i < a.size(); ++i) {
        if (serialize_tweet(a[i]) != serialize_tweet(c[i])) all_same = false;
    }
    CHECK_FALSE(all_same);
}

TEST_CASE("class counts stay within three sigma of the multinomial expectation") {
    const uint64_t n = 10000;
    SyntheticConfig config = SyntheticConfig::defaults(n);
    config.class_priors = {0.6, 0.3, 0.1};
    std::array<uint64_t, 3> counts{};
    for (const TweetRecord& record : generate_synthetic(config, 1234)) {
        ++counts[static_cast<size_t>(*record.label)];
    }
    for (size_t c = 0; c < 3; ++c) {
        double p = config.class_priors[c];
        double expectation = static_cast<double>(n) * p;
        double sigma = std::sqrt(static_cast<double>(n) * p * (1.0 - p));
        CHECK(std::abs(static_cast<double>(counts[c]) - expectation) <= 3.0 * sigma);
    }
}

TEST_CASE("labeled fraction controls label presence") {
    SyntheticConfig config = SyntheticConfig::defaults(4000);
    config.labeled_fraction = 0.25;
    uint64_t labeled = 0;
    for (const TweetRecord& record : generate_synthetic(config, 6)) {
        labeled += record.labeled() ? 1 : 0;
    }
    double p = 0.25;
    double sigma = std::sqrt(4000.0 * p * (1 - p));
    CHECK(std::abs(static_cast<double>(labeled) - 1000.0) <= 3.0 * sigma);
}

TEST_CASE("generated records parse under the wire schema") {
    SyntheticConfig config = SyntheticConfig::defaults(100);
    for (const TweetRecord& record : generate_synthetic(config, 8)) {
        CHECK_FALSE(record.text.empty());
        CHECK(record.created_at >= kMinTweetTimestampMs);
        CHECK(record.user.account_created_at <= record.created_at);
        auto parsed = parse_tweet(serialize_tweet(record));
        CHECK(parsed.has_value());
    }
}

TEST_CASE("drift switches generator parameters at the drift point") {
    SyntheticConfig config = SyntheticConfig::with_drift(4000, 2000);
    auto records = generate_synthetic(config, 77);
    auto emergent_hits = [&](size_t from, size_t to) {
        std::set<std::string> pool(config.emergent_pool.begin(), config.emergent_pool.end());
        size_t hits = 0;
        for (size_t i = from; i < to; ++i) {
            if (!records[i].labeled() || *records[i].label == ClassLabel::Normal) continue;
            std::istringstream words(records[i].text);
            std::string word;
            while (words >> word) {
                std::string lower;
                for (char c : word) {
                    if (std::isalpha(static_cast<unsigned char>(c))) {
                        lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
                    }
                }
                if (pool.count(lower) > 0) {
                    ++hits;
                    break;
                }
            }
        }
        return hits;
    };
    CHECK(emergent_hits(0, 2000) == 0);
    CHECK(emergent_hits(2000, 4000) > 100);
}

TEST_CASE("invalid configurations are rejected") {
    SyntheticConfig bad = SyntheticConfig::defaults(10);
    bad.class_priors = {0.5, 0.2, 0.2};
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    SyntheticConfig zero = SyntheticConfig::defaults(0);
    CHECK_THROWS_AS(zero.validate(), ConfigError);
    SyntheticConfig unsorted = SyntheticConfig::with_drift(100, 50);
    unsorted.phases[1].start_index = 0;
    CHECK_THROWS_AS(unsorted.validate(), ConfigError);
}
