#include "aggstream/ingest.hpp"

#include "aggstream/error.hpp"
#include "aggstream/synth.hpp"

#include <doctest.h>

#include <fstream>
#include <random>
#include <thread>

#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

using namespace aggstream;

TEST_CASE("parse_tweet reads the wire schema") {
    auto record = parse_tweet(
        R"({"id":"1","text":"hi","created_at":"2021-01-02T03:04:05Z","user":)"
        R"({"created_at":"2020-01-02T03:04:05Z","statuses_count":10,"listed_count":1,)"
        R"("followers_count":5,"friends_count":2}})");
    REQUIRE(record.has_value());
    CHECK(record->id == "1");
    CHECK(record->text == "hi");
    CHECK_FALSE(record->labeled());
    CHECK(record->user.statuses_count == 10);
    CHECK(record->user.followers_count == 5);
    // one year and a day apart
    CHECK(record->created_at - record->user.account_created_at == 366LL * 86'400'000);
}

TEST_CASE("malformed json is a parse error") {
    ParseIssue issue;
    CHECK_FALSE(parse_tweet("{", &issue).has_value());
    CHECK(issue.kind == ParseIssue::Kind::BadJson);
    CHECK_FALSE(parse_tweet("42", &issue).has_value());
    CHECK(issue.kind == ParseIssue::Kind::BadJson);
}

TEST_CASE("missing text or id is a schema error") {
    ParseIssue issue;
    CHECK_FALSE(parse_tweet(R"({"id":"1","created_at":"2021-01-01T00:00:00Z"})", &issue));
    CHECK(issue.kind == ParseIssue::Kind::Schema);
    CHECK_FALSE(parse_tweet(R"({"text":"x","created_at":"2021-01-01T00:00:00Z"})", &issue));
    CHECK(issue.kind == ParseIssue::Kind::Schema);
    CHECK_FALSE(parse_tweet(R"({"id":"1","text":"","created_at":"2021-01-01T00:00:00Z"})", &issue));
    CHECK(issue.kind == ParseIssue::Kind::Schema);
}

TEST_CASE("a valid label attribute makes the record labeled") {
    auto labeled = parse_tweet(
        R"({"id":"1","text":"hi","created_at":"2021-01-01T00:00:00Z","label":"abusive"})");
    REQUIRE(labeled.has_value());
    REQUIRE(labeled->labeled());
    CHECK(*labeled->label == ClassLabel::Abusive);

    // unknown label value: record stays unlabeled, counted as a warning
    uint64_t warnings = 0;
    auto odd = parse_tweet(
        R"({"id":"1","text":"hi","created_at":"2021-01-01T00:00:00Z","label":"spam"})", nullptr,
        &warnings);
    REQUIRE(odd.has_value());
    CHECK_FALSE(odd->labeled());
    CHECK(warnings > 0);
}

TEST_CASE("twitter-format timestamps parse") {
    auto ms = parse_timestamp("Wed Oct 10 20:19:24 +0000 2018");
    REQUIRE(ms.has_value());
    CHECK(*ms == 1539202764000LL);
    // offsets shift to UTC
    auto offset = parse_timestamp("Wed Oct 10 20:19:24 +0200 2018");
    REQUIRE(offset.has_value());
    CHECK(*offset == *ms - 2 * 3'600'000);
    CHECK(parse_timestamp("2018-10-10T20:19:24Z") == *ms);
    CHECK(parse_timestamp("2018-10-10T22:19:24+02:00") == *ms);
    CHECK(parse_timestamp("2018-10-10T20:19:24.123Z") == *ms + 123);
    CHECK_FALSE(parse_timestamp("not a date").has_value());
}

TEST_CASE("timestamps before 2006 are schema errors") {
    ParseIssue issue;
    CHECK_FALSE(parse_tweet(
        R"({"id":"1","text":"x","created_at":"2005-12-31T23:59:59Z"})", &issue));
    CHECK(issue.kind == ParseIssue::Kind::Schema);
}

TEST_CASE("ragged profiles default with warnings instead of failing") {
    uint64_t warnings = 0;
    auto no_user = parse_tweet(
        R"({"id":"1","text":"x","created_at":"2021-01-01T00:00:00Z"})", nullptr, &warnings);
    REQUIRE(no_user.has_value());
    CHECK(no_user->user.statuses_count == 0);
    CHECK(no_user->user.account_created_at == no_user->created_at);
    CHECK(warnings == 1);

    warnings = 0;
    auto partial = parse_tweet(
        R"({"id":"1","text":"x","created_at":"2021-01-01T00:00:00Z","user":)"
        R"({"statuses_count":-5,"followers_count":3}})",
        nullptr, &warnings);
    REQUIRE(partial.has_value());
    CHECK(partial->user.statuses_count == 0);  // negative clamps
    CHECK(partial->user.followers_count == 3);
    CHECK(warnings > 0);

    // account created after the tweet clamps to the tweet time
    warnings = 0;
    auto future = parse_tweet(
        R"({"id":"1","text":"x","created_at":"2021-01-01T00:00:00Z","user":)"
        R"({"created_at":"2022-01-01T00:00:00Z"}})",
        nullptr, &warnings);
    REQUIRE(future.has_value());
    CHECK(future->user.account_created_at == future->created_at);
    CHECK(warnings > 0);
}

TEST_CASE("serialize then parse round-trips every feature-relevant field") {
    std::mt19937_64 g(13);
    SyntheticConfig config = SyntheticConfig::defaults(200);
    config.labeled_fraction = 0.5;
    for (const TweetRecord& record : generate_synthetic(config, 17)) {
        (void)g;
        std::string line = serialize_tweet(record);
        auto parsed = parse_tweet(line);
        REQUIRE(parsed.has_value());
        CHECK(parsed->id == record.id);
        CHECK(parsed->text == record.text);
        CHECK(parsed->created_at == record.created_at);
        CHECK(parsed->label == record.label);
        CHECK(parsed->user.id == record.user.id);
        CHECK(parsed->user.account_created_at == record.user.account_created_at);
        CHECK(parsed->user.statuses_count == record.user.statuses_count);
        CHECK(parsed->user.listed_count == record.user.listed_count);
        CHECK(parsed->user.followers_count == record.user.followers_count);
        CHECK(parsed->user.friends_count == record.user.friends_count);
        CHECK(parsed->is_retweet == record.is_retweet);
        CHECK(parsed->is_reply == record.is_reply);
    }
}

TEST_CASE("parse_tweet never crashes on arbitrary bytes") {
    std::mt19937_64 g(404);
    std::string soup = R"({}[]",:truefalsenull0123456789.-+eE \t text id user created_at)";
    for (int trial = 0; trial < 2000; ++trial) {
        std::string line;
        size_t n = g() % 64;
        for (size_t i = 0; i < n; ++i) {
            if ((g() & 7) == 0) {
                line.push_back(static_cast<char>(g() & 0xFF)); // raw byte
            } else {
                line.push_back(soup[g() % soup.size()]);
            }
        }
        uint64_t warnings = 0;
        auto parsed = parse_tweet(line, nullptr, &warnings); // must not throw
        if (parsed) {
            CHECK_FALSE(parsed->text.empty());
            CHECK(parsed->created_at >= kMinTweetTimestampMs);
        }
    }
}

TEST_CASE("skipped plus emitted equals total lines") {
    auto path = std::filesystem::temp_directory_path() / "aggstream_ingest_test.jsonl";
    {
        std::ofstream out(path);
        out << R"({"id":"1","text":"ok","created_at":"2021-01-01T00:00:00Z"})" << "\n";
        out << "{" << "\n"; // malformed
        out << R"({"id":"2","created_at":"2021-01-01T00:00:00Z"})" << "\n"; // schema
        out << R"({"id":"3","text":"ok","created_at":"2021-01-01T00:00:00Z"})" << "\n";
        out << "\n"; // blank
    }
    LineRecordSource source(std::make_unique<FileLineSource>(path));
    TweetRecord record;
    size_t emitted = 0;
    while (source.next(record, -1) == PullStatus::Ready) ++emitted;
    CHECK(emitted == 2);
    CHECK(source.stats().emitted == 2);
    CHECK(source.stats().skipped == 3);
    CHECK(source.stats().emitted + source.stats().skipped == source.stats().lines);
    std::filesystem::remove(path);
}

TEST_CASE("missing files raise IoError at open time") {
    CHECK_THROWS_AS(FileLineSource("/nonexistent/stream.jsonl"), IoError);
    CHECK_THROWS_AS(open_record_source("/nonexistent/stream.jsonl"), IoError);
}

TEST_CASE("empty file produces an empty stream with clean termination") {
    auto path = std::filesystem::temp_directory_path() / "aggstream_empty.jsonl";
    std::ofstream(path).close();
    LineRecordSource source(std::make_unique<FileLineSource>(path));
    TweetRecord record;
    CHECK(source.next(record, -1) == PullStatus::End);
    CHECK(source.stats().lines == 0);
    std::filesystem::remove(path);
}

TEST_CASE("unthrottled replay preserves order") {
    auto path = std::filesystem::temp_directory_path() / "aggstream_order.jsonl";
    {
        std::ofstream out(path);
        for (int i = 0; i < 1000; ++i) {
            out << R"({"id":")" << i << R"(","text":"x","created_at":"2021-01-01T00:00:00Z"})"
                << "\n";
        }
    }
    std::vector<std::unique_ptr<RecordSource>> sources;
    sources.push_back(std::make_unique<LineRecordSource>(std::make_unique<FileLineSource>(path)));
    RecordStream stream(std::move(sources), 0.0);
    TweetRecord record;
    int expected = 0;
    while (stream.next(record, -1) == PullStatus::Ready) {
        CHECK(record.id == std::to_string(expected));
        ++expected;
    }
    CHECK(expected == 1000);
    std::filesystem::remove(path);
}

TEST_CASE("multiplexing merges sources in arrival order") {
    std::vector<TweetRecord> a, b;
    SyntheticConfig config = SyntheticConfig::defaults(10);
    auto all = generate_synthetic(config, 3);
    a.assign(all.begin(), all.begin() + 5);
    b.assign(all.begin() + 5, all.end());
    std::vector<std::unique_ptr<RecordSource>> sources;
    sources.push_back(std::make_unique<VectorRecordSource>(a));
    sources.push_back(std::make_unique<VectorRecordSource>(b));
    RecordStream stream(std::move(sources), 0.0);
    TweetRecord record;
    std::vector<std::string> ids;
    while (stream.next(record, -1) == PullStatus::Ready) ids.push_back(record.id);
    REQUIRE(ids.size() == 10);
    // fair round-robin: a0 b0 a1 b1 ...
    CHECK(ids[0] == all[0].id);
    CHECK(ids[1] == all[5].id);
    CHECK(ids[2] == all[1].id);
}

TEST_CASE("tcp source reads newline-delimited json from a client") {
    auto tcp = std::make_unique<TcpLineSource>(0); // ephemeral port
    uint16_t port = tcp->port();
    ssize_t sent = -1;
    std::thread client([port, &sent] {
        int fd = ::socket(AF_INET, SOCK_STREAM, 0);
        if (fd < 0) return; // sent stays -1 and the main thread reports it
        sockaddr_in addr{};
        addr.sin_family = AF_INET;
        addr.sin_port = htons(port);
        addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
        for (int i = 0; i < 50 && ::connect(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0;
             ++i) {
            std::this_thread::sleep_for(std::chrono::milliseconds(10));
        }
        std::string payload;
        for (int i = 0; i < 3; ++i) {
            payload += R"({"id":")" + std::to_string(i) +
                       R"(","text":"hi","created_at":"2021-01-01T00:00:00Z"})" + "\n";
        }
        sent = ::write(fd, payload.data(), payload.size());
        ::close(fd);
    });

    LineRecordSource source(std::move(tcp));
    TweetRecord record;
    int got = 0;
    while (source.next(record, 2000) == PullStatus::Ready) ++got;
    client.join();
    CHECK(sent > 0);
    CHECK(got == 3);
}
