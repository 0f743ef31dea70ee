#include "aggstream/features.hpp"

#include <doctest.h>

#include <algorithm>
#include <random>

using namespace aggstream;

namespace {

AdaptiveBow::Params defaults() {
    return AdaptiveBow::Params{}; // U=1000, tau=0.005, rho=5, c_min=10
}

std::vector<std::string> tokens(std::initializer_list<const char*> words) {
    return {words.begin(), words.end()};
}

} // namespace

TEST_CASE("observe counts distinct lowercase tokens once per tweet") {
    AdaptiveBow bow({"seed"}, defaults());
    auto t = tokens({"bad", "bad", "dog"});
    bow.observe(t, true);
    CHECK(bow.tweets_aggressive() == 1);
    CHECK(bow.tweets_normal() == 0);

    auto empty = tokens({});
    bow.observe(empty, false);
    CHECK(bow.tweets_normal() == 1);

    // counts visible through a refresh decision: "bad" appeared in 1 of 1
    // aggressive tweets, so with min_count=1 it qualifies
    AdaptiveBow::Params eager = defaults();
    eager.min_count = 1;
    AdaptiveBow small({"seed"}, eager);
    small.observe(t, true);
    auto result = small.refresh();
    CHECK(std::find(result.added.begin(), result.added.end(), "bad") != result.added.end());
    CHECK(std::find(result.added.begin(), result.added.end(), "dog") != result.added.end());
}

TEST_CASE("observe normalizes case and skips non-letter tokens") {
    AdaptiveBow::Params eager = defaults();
    eager.min_count = 1;
    AdaptiveBow bow({}, eager);
    auto t = tokens({"ZORK", "zork", "a1b", "x!"});
    bow.observe(t, true);
    auto result = bow.refresh();
    REQUIRE(result.added.size() == 1);
    CHECK(result.added[0] == "zork");
}

TEST_CASE("refresh add rule follows the threshold arithmetic") {
    // "zork": 20 of 100 aggressive tweets, 0 of 200 normal -> added
    AdaptiveBow bow({"seed"}, defaults());
    auto with_word = tokens({"zork"});
    auto without = tokens({"filler"});
    for (int i = 0; i < 100; ++i) bow.observe(i < 20 ? with_word : without, true);
    for (int i = 0; i < 200; ++i) bow.observe(without, false);
    auto result = bow.refresh();
    CHECK(std::find(result.added.begin(), result.added.end(), "zork") != result.added.end());
    CHECK(bow.lexicon().count("zork") == 1);
    // "filler" appears in 80% of aggressive tweets but 100% of normal: not added
    CHECK(bow.lexicon().count("filler") == 0);
}

TEST_CASE("refresh with no labeled tweets keeps the seed set") {
    AdaptiveBow bow({"a", "b"}, defaults());
    auto result = bow.refresh();
    CHECK(result.added.empty());
    CHECK(result.removed.empty());
    CHECK(bow.lexicon().size() == 2);
}

TEST_CASE("refresh removes drifted words including seed words") {
    AdaptiveBow bow({"seed", "quiet"}, defaults());
    auto with_seed = tokens({"seed"});
    auto without = tokens({"filler"});
    // "seed" shows up in 50 of 100 normal tweets and 1 of 50 aggressive
    for (int i = 0; i < 100; ++i) bow.observe(i < 50 ? with_seed : without, false);
    for (int i = 0; i < 50; ++i) bow.observe(i < 1 ? with_seed : without, true);
    auto result = bow.refresh();
    REQUIRE(result.removed.size() == 1);
    CHECK(result.removed[0] == "seed");
    CHECK(bow.lexicon().count("seed") == 0);
    CHECK(bow.lexicon().count("quiet") == 1); // never seen: stays
}

TEST_CASE("add and remove sets are disjoint and words are letters-only") {
    std::mt19937_64 g(99);
    std::vector<std::string> pool = {"alpha", "beta", "gamma", "delta", "seed"};
    AdaptiveBow::Params params = defaults();
    params.min_count = 2;
    AdaptiveBow bow({"seed"}, params);
    for (int period = 0; period < 5; ++period) {
        for (int i = 0; i < 300; ++i) {
            std::vector<std::string> toks;
            for (size_t k = 0; k < 1 + g() % 3; ++k) toks.push_back(pool[g() % pool.size()]);
            bow.observe(toks, (g() & 1) != 0);
        }
        auto result = bow.refresh();
        for (const std::string& added : result.added) {
            CHECK(std::find(result.removed.begin(), result.removed.end(), added) ==
                  result.removed.end());
            CHECK(std::all_of(added.begin(), added.end(), [](unsigned char c) {
                return is_letter_byte(c);
            }));
        }
    }
}

TEST_CASE("refresh_due fires on the period boundary and counters roll over") {
    AdaptiveBow::Params params = defaults();
    params.refresh_period = 10;
    AdaptiveBow bow({}, params);
    auto t = tokens({"word"});
    for (int i = 0; i < 9; ++i) bow.observe(t, i % 2 == 0);
    CHECK_FALSE(bow.refresh_due());
    bow.observe(t, true);
    CHECK(bow.refresh_due());
    bow.refresh();
    CHECK(bow.labeled_since_refresh() == 0);
    CHECK_FALSE(bow.refresh_due());
}

TEST_CASE("snapshots stay immutable while counts evolve") {
    AdaptiveBow::Params params = defaults();
    params.min_count = 1;
    AdaptiveBow bow({"seed"}, params);
    auto snapshot = bow.snapshot();
    CHECK(snapshot->count("seed") == 1);

    auto zork = tokens({"zork"});
    for (int i = 0; i < 50; ++i) bow.observe(zork, true);
    bow.refresh();
    // the old snapshot is untouched; a fresh one sees the addition
    CHECK(snapshot->count("zork") == 0);
    CHECK(bow.snapshot()->count("zork") == 1);
}

TEST_CASE("worker deltas absorb like direct observation") {
    AdaptiveBow::Params params = defaults();
    params.min_count = 5;
    AdaptiveBow direct({}, params);
    AdaptiveBow merged({}, params);
    AdaptiveBow::Delta d1, d2;

    auto zork = tokens({"zork"});
    auto filler = tokens({"filler"});
    for (int i = 0; i < 30; ++i) {
        direct.observe(zork, true);
        (i % 2 == 0 ? d1 : d2).observe(zork, true);
    }
    for (int i = 0; i < 40; ++i) {
        direct.observe(filler, false);
        (i % 2 == 0 ? d1 : d2).observe(filler, false);
    }
    merged.absorb(d1);
    merged.absorb(d2);
    CHECK(merged.tweets_aggressive() == direct.tweets_aggressive());
    CHECK(merged.tweets_normal() == direct.tweets_normal());
    auto r1 = direct.refresh();
    auto r2 = merged.refresh();
    CHECK(r1.added == r2.added);
    CHECK(r1.removed == r2.removed);
}
