#include "aggstream/ingest.hpp"

#include "aggstream/synth.hpp"

#include <doctest.h>

#include <chrono>

using namespace aggstream;

// Timing test: 1000 records at 100/s should take 10s within 5%.
TEST_CASE("throttled replay holds the target rate" * doctest::timeout(25)) {
    auto records = generate_synthetic(SyntheticConfig::defaults(1000), 55);
    std::vector<std::unique_ptr<RecordSource>> sources;
    sources.push_back(std::make_unique<VectorRecordSource>(records));
    RecordStream stream(std::move(sources), 100.0);

    auto start = std::chrono::steady_clock::now();
    TweetRecord record;
    size_t emitted = 0;
    while (stream.next(record, -1) == PullStatus::Ready) ++emitted;
    double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    CHECK(emitted == 1000);
    CHECK(seconds > 10.0 * 0.95);
    CHECK(seconds < 10.0 * 1.05);
}
