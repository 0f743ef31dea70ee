#include "aggstream/features.hpp"

#include "aggstream/error.hpp"
#include "aggstream/textprep.hpp"

#include <doctest.h>

#include <cctype>
#include <random>

using namespace aggstream;

namespace {

std::vector<std::string> tokens(std::initializer_list<const char*> words) {
    return {words.begin(), words.end()};
}

Lexicons tiny_lexicons() {
    Lexicons lex;
    lex.pos.set("red", PosTag::Adjective);
    lex.pos.set("run", PosTag::Verb);
    lex.pos.set("quickly", PosTag::Adverb);
    lex.sentiment.set("good", 2);
    lex.sentiment.set("awful", -3);
    lex.swear_seed = {"damn", "fool"};
    return lex;
}

} // namespace

TEST_CASE("uppercase word counting needs two letters all uppercase") {
    auto t1 = tokens({"THIS", "IS", "bad"});
    CHECK(count_uppercase_words(t1) == 2);
    CHECK(count_uppercase_words({}) == 0);
    auto t2 = tokens({"I", "am", "OK"});
    CHECK(count_uppercase_words(t2) == 1); // "I" has a single letter
    auto t3 = tokens({"McDONALD", "ABc"});
    CHECK(count_uppercase_words(t3) == 0); // lowercase letters disqualify
}

TEST_CASE("pos relative frequencies") {
    Lexicons lex = tiny_lexicons();
    auto t = tokens({"red", "run", "quickly", "ball"});
    PosFreqs freqs = pos_rel_freqs(t, lex.pos);
    CHECK(freqs.adj == doctest::Approx(0.25));
    CHECK(freqs.adv == doctest::Approx(0.25));
    CHECK(freqs.verb == doctest::Approx(0.25));

    PosFreqs empty = pos_rel_freqs({}, lex.pos);
    CHECK(empty.adj == 0.0);
    CHECK(empty.adv == 0.0);
    CHECK(empty.verb == 0.0);

    auto unknown = tokens({"zz", "qq"});
    PosFreqs none = pos_rel_freqs(unknown, lex.pos);
    CHECK(none.adj == 0.0);
    CHECK(none.verb == 0.0);
}

TEST_CASE("stylistic means over raw sentences and cleaned tokens") {
    CleanedText two = clean("Hi there. Go away.");
    StylisticStats stats = stylistic(two);
    CHECK(stats.mean_words_per_sentence == doctest::Approx(2.0));

    CleanedText one = clean("one two three");
    CHECK(stylistic(one).mean_words_per_sentence == doctest::Approx(3.0));

    CleanedText empty = clean("");
    CHECK(stylistic(empty).mean_words_per_sentence == 0.0);
    CHECK(stylistic(empty).mean_word_length == 0.0);

    CleanedText words = clean("ab abcd");
    CHECK(stylistic(words).mean_word_length == doctest::Approx(3.0));
}

TEST_CASE("sentiment uses the dual-scale max/min convention") {
    Lexicons lex = tiny_lexicons();
    SentimentScore base = sentiment({}, lex.sentiment);
    CHECK(base.pos == doctest::Approx(1.0));
    CHECK(base.neg == doctest::Approx(-1.0));

    auto good = tokens({"good"});
    SentimentScore g = sentiment(good, lex.sentiment);
    CHECK(g.pos == doctest::Approx(2.0));
    CHECK(g.neg == doctest::Approx(-1.0));

    auto awful = tokens({"awful", "awful"});
    SentimentScore a = sentiment(awful, lex.sentiment);
    CHECK(a.pos == doctest::Approx(1.0));
    CHECK(a.neg == doctest::Approx(-3.0));
}

TEST_CASE("swear counting is case-insensitive and counts occurrences") {
    Lexicons lex = tiny_lexicons();
    auto t1 = tokens({"you", "damn", "fool"});
    CHECK(swear_count(t1, lex.swear_seed) == 2);
    CHECK(swear_count({}, lex.swear_seed) == 0);
    auto t2 = tokens({"DAMN"});
    CHECK(swear_count(t2, lex.swear_seed) == 1);
    auto t3 = tokens({"damn", "damn"});
    CHECK(swear_count(t3, lex.swear_seed) == 2); // occurrences, not distinct words
}

TEST_CASE("swear counting with a fixed lexicon equals brute-force membership counting") {
    Lexicons lex = tiny_lexicons();
    std::mt19937_64 g(11);
    std::vector<std::string> pool = {"damn", "Fool", "dog", "cat", "FOOL", "x"};
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<std::string> toks;
        for (size_t i = 0; i < g() % 10; ++i) toks.push_back(pool[g() % pool.size()]);
        int brute = 0;
        for (std::string w : toks) {
            for (char& c : w) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
            if (lex.swear_seed.count(w) > 0) ++brute;
        }
        CHECK(swear_count(toks, lex.swear_seed) == brute);
    }
}

TEST_CASE("hashtag and url counts run on the raw text") {
    CHECK(hashtag_count("a #x #y http://t.co/z") == 2);
    CHECK(url_count("a #x #y http://t.co/z") == 1);
    CHECK(hashtag_count("") == 0);
    CHECK(url_count("x t.co/ab and https://b.c plus http://d.e") == 3);
    CHECK(hashtag_count("#a#b # c") == 1); // only token-leading hashtags
}

TEST_CASE("feature layout compacts disabled slots") {
    FeatureLayout all;
    CHECK(all.active_count() == kFeatureSlots);
    CHECK(all.dense_index(FeatureId::FriendsCount) == 15);

    FeatureLayout trimmed = FeatureLayout::without({"statuses_count", "url_count"});
    CHECK(trimmed.active_count() == kFeatureSlots - 2);
    CHECK(trimmed.dense_index(FeatureId::StatusesCount) == -1);
    CHECK(trimmed.dense_index(FeatureId::AccountAgeDays) == 0);
    CHECK(trimmed.dense_index(FeatureId::ListedCount) == 1);
    CHECK(trimmed.slot_of(1) == FeatureId::ListedCount);
    CHECK_THROWS_AS(FeatureLayout::without({"no_such_feature"}), ConfigError);
}

TEST_CASE("extract fills the canonical vector") {
    Lexicons lex = tiny_lexicons();
    FeatureLayout layout;

    TweetRecord tweet;
    tweet.id = "t1";
    tweet.text = "DAMN fool ran #x #y http://t.co/z. Good day.";
    tweet.created_at = 1'600'000'000'000;
    tweet.user.account_created_at = tweet.created_at - static_cast<int64_t>(10 * kMsPerDay);
    tweet.user.statuses_count = 42;
    tweet.user.listed_count = 3;
    tweet.user.followers_count = 99;
    tweet.user.friends_count = 7;

    CleanedText text = clean(tweet.text);
    Instance inst = extract(tweet, text, lex.swear_seed, lex, layout);
    REQUIRE(inst.features.size() == static_cast<size_t>(kFeatureSlots));
    CHECK(inst.features[0] == doctest::Approx(10.0)); // account age in days
    CHECK(inst.features[1] == 42.0);
    CHECK(inst.features[2] == 3.0);
    CHECK(inst.features[3] == 2.0); // hashtags, counted on raw text
    CHECK(inst.features[4] == 1.0); // urls
    CHECK(inst.features[5] == 1.0); // DAMN
    CHECK(inst.features[11] == 2.0);  // good
    CHECK(inst.features[12] == -1.0); // no negative word
    CHECK(inst.features[13] == 2.0);  // damn + fool
    CHECK(inst.features[14] == 99.0);
    CHECK(inst.features[15] == 7.0);
    CHECK(inst.source_id == "t1");

    // degenerate text: counting features zero, sentiment at baseline
    TweetRecord bare = tweet;
    bare.text = "#x";
    CleanedText bare_text = clean(bare.text);
    Instance bare_inst = extract(bare, bare_text, lex.swear_seed, lex, layout);
    CHECK(bare_inst.features[5] == 0.0);
    CHECK(bare_inst.features[9] == 0.0);
    CHECK(bare_inst.features[10] == 0.0);
    CHECK(bare_inst.features[11] == 1.0);
    CHECK(bare_inst.features[12] == -1.0);
    CHECK(bare_inst.features[13] == 0.0);
}

TEST_CASE("extract is a pure function of its inputs") {
    Lexicons lex = tiny_lexicons();
    FeatureLayout layout;
    TweetRecord tweet;
    tweet.id = "t";
    tweet.text = "damn GOOD run. Quickly!";
    tweet.created_at = 1'600'000'000'000;
    tweet.user.account_created_at = tweet.created_at - 86'400'000;
    CleanedText text = clean(tweet.text);
    Instance a = extract(tweet, text, lex.swear_seed, lex, layout);
    Instance b = extract(tweet, text, lex.swear_seed, lex, layout);
    CHECK(a.features == b.features);

    // relative frequencies stay in [0,1], counts non-negative
    for (int slot : {6, 7, 8}) CHECK(a.features[static_cast<size_t>(slot)] <= 1.0);
    for (int slot : {3, 4, 5, 13}) CHECK(a.features[static_cast<size_t>(slot)] >= 0.0);
}

TEST_CASE("account age clamps to zero when profile postdates the tweet") {
    Lexicons lex = tiny_lexicons();
    FeatureLayout layout;
    TweetRecord tweet;
    tweet.id = "t";
    tweet.text = "x";
    tweet.created_at = 1'600'000'000'000;
    tweet.user.account_created_at = tweet.created_at + 1000;
    CleanedText text = clean(tweet.text);
    Instance inst = extract(tweet, text, lex.swear_seed, lex, layout);
    CHECK(inst.features[0] == 0.0);
}
