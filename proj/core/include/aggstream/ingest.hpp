#pragma once

#include "aggstream/types.hpp"

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace aggstream {

// --- wire format --------------------------------------------------------------
//
// Input is JSON-lines, one tweet per line, a flattened subset of the Twitter
// v1.1 payload: top-level "id", "text", "created_at", optional "label",
// optional "is_retweet"/"is_reply", and a nested "user" object with
// "created_at", "statuses_count", "listed_count", "followers_count",
// "friends_count". Timestamps are accepted in Twitter's
// "EEE MMM dd HH:mm:ss Z yyyy" form, in ISO-8601, or as epoch milliseconds.

struct ParseIssue {
    enum class Kind : uint8_t { BadJson, Schema };
    Kind kind = Kind::BadJson;
    std::string detail;
};

/// Parses one JSON line. Returns the record, labeled when a valid "label"
/// attribute is present. Missing or raggedy profile fields default to 0 and
/// bump *warnings rather than failing the record.
std::optional<TweetRecord> parse_tweet(std::string_view json_line,
                                       ParseIssue* issue = nullptr,
                                       uint64_t* warnings = nullptr);

/// Serializes a record back to the wire schema (one line, no newline).
std::string serialize_tweet(const TweetRecord& record);

std::optional<TimestampMs> parse_timestamp(std::string_view text);
std::string format_timestamp_iso(TimestampMs ms);

// --- sources -------------------------------------------------------------------

enum class PullStatus : uint8_t { Ready, Timeout, End };

/// Producer of raw newline-delimited payloads; single-threaded.
class LineSource {
public:
    virtual ~LineSource() = default;
    /// timeout_ms < 0 blocks until a line or end of stream.
    virtual PullStatus next_line(std::string& line, int timeout_ms) = 0;
};

class FileLineSource final : public LineSource {
public:
    explicit FileLineSource(const std::filesystem::path& path);
    PullStatus next_line(std::string& line, int timeout_ms) override;

private:
    std::unique_ptr<std::istream> in_;
    std::filesystem::path path_;
};

class IstreamLineSource final : public LineSource {
public:
    explicit IstreamLineSource(std::istream& in) : in_(&in) {}
    PullStatus next_line(std::string& line, int timeout_ms) override;

private:
    std::istream* in_;
};

/// Listens on a TCP port and reads newline-delimited JSON from one client.
class TcpLineSource final : public LineSource {
public:
    explicit TcpLineSource(uint16_t port);
    ~TcpLineSource() override;
    TcpLineSource(const TcpLineSource&) = delete;
    TcpLineSource& operator=(const TcpLineSource&) = delete;

    PullStatus next_line(std::string& line, int timeout_ms) override;
    uint16_t port() const { return port_; }

private:
    bool accept_client(int timeout_ms);

    int listen_fd_ = -1;
    int client_fd_ = -1;
    uint16_t port_ = 0;
    std::string buffer_;
    bool client_done_ = false;
};

struct ParseStats {
    uint64_t emitted = 0;
    uint64_t skipped = 0;  // malformed or schema-failing lines
    uint64_t warnings = 0; // defaulted/clamped fields
    uint64_t lines = 0;

    void merge(const ParseStats& other) {
        emitted += other.emitted;
        skipped += other.skipped;
        warnings += other.warnings;
        lines += other.lines;
    }
};

/// Producer of parsed records.
class RecordSource {
public:
    virtual ~RecordSource() = default;
    virtual PullStatus next(TweetRecord& record, int timeout_ms) = 0;
    virtual const ParseStats& stats() const = 0;
};

/// Parses records off a LineSource, skipping bad lines (counted).
class LineRecordSource final : public RecordSource {
public:
    explicit LineRecordSource(std::unique_ptr<LineSource> lines)
        : lines_(std::move(lines)) {}
    PullStatus next(TweetRecord& record, int timeout_ms) override;
    const ParseStats& stats() const override { return stats_; }

private:
    std::unique_ptr<LineSource> lines_;
    ParseStats stats_;
};

/// In-memory source; used by tests and the bench replayer.
class VectorRecordSource final : public RecordSource {
public:
    explicit VectorRecordSource(std::vector<TweetRecord> records)
        : records_(std::move(records)) {}
    PullStatus next(TweetRecord& record, int timeout_ms) override;
    const ParseStats& stats() const override { return stats_; }

private:
    std::vector<TweetRecord> records_;
    size_t pos_ = 0;
    ParseStats stats_;
};

/// Multiplexes several sources into one stream in arrival order (fair
/// round-robin pull for always-ready sources) and optionally paces emission.
/// replay_rate is records/second; 0 means unthrottled.
class RecordStream {
public:
    explicit RecordStream(std::vector<std::unique_ptr<RecordSource>> sources,
                          double replay_rate = 0.0);

    PullStatus next(TweetRecord& record, int timeout_ms = -1);
    /// Totals across all sources.
    ParseStats stats() const;
    uint64_t emitted() const { return emitted_; }

private:
    std::vector<std::unique_ptr<RecordSource>> sources_;
    std::vector<bool> done_;
    size_t next_source_ = 0;
    double replay_rate_;
    bool started_ = false;
    std::chrono::steady_clock::time_point start_;
    uint64_t emitted_ = 0;
};

/// "-" is standard input, "tcp://[host]:PORT" listens on PORT, anything else
/// is a file path.
std::unique_ptr<RecordSource> open_record_source(const std::string& uri);

} // namespace aggstream
