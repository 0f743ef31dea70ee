#include "aggstream/ingest.hpp"

#include "aggstream/error.hpp"

#include <nlohmann/json.hpp>

#include <netinet/in.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

namespace aggstream {
namespace {

using nlohmann::json;

// Howard Hinnant's days-from-civil; avoids timezone/locale machinery.
int64_t days_from_civil(int64_t y, unsigned m, unsigned d) {
    y -= m <= 2;
    const int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<int64_t>(doe) - 719468;
}

void civil_from_days(int64_t z, int64_t* y, unsigned* m, unsigned* d) {
    z += 719468;
    const int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const int64_t year = static_cast<int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    *d = doy - (153 * mp + 2) / 5 + 1;
    *m = mp + (mp < 10 ? 3 : -9);
    *y = year + (*m <= 2);
}

std::optional<int> month_from_name(std::string_view name) {
    static constexpr std::array<std::string_view, 12> kMonths = {
        "Jan", "Feb", "Mar", "Apr", "May", "Jun",
        "Jul", "Aug", "Sep", "Oct", "Nov", "Dec"};
    for (size_t i = 0; i < kMonths.size(); ++i) {
        if (kMonths[i] == name) return static_cast<int>(i) + 1;
    }
    return std::nullopt;
}

bool parse_int(std::string_view text, int* out) {
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), *out);
    return ec == std::errc() && ptr == text.data() + text.size();
}

// "Wed Oct 10 20:19:24 +0000 2018"
std::optional<TimestampMs> parse_twitter_timestamp(std::string_view text) {
    std::vector<std::string_view> parts;
    size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && text[i] == ' ') ++i;
        size_t start = i;
        while (i < text.size() && text[i] != ' ') ++i;
        if (i > start) parts.push_back(text.substr(start, i - start));
    }
    if (parts.size() != 6) return std::nullopt;
    auto month = month_from_name(parts[1]);
    if (!month) return std::nullopt;
    int day = 0, year = 0;
    if (!parse_int(parts[2], &day) || !parse_int(parts[5], &year)) return std::nullopt;
    std::string_view clock = parts[3];
    if (clock.size() != 8 || clock[2] != ':' || clock[5] != ':') return std::nullopt;
    int hh = 0, mm = 0, ss = 0;
    if (!parse_int(clock.substr(0, 2), &hh) || !parse_int(clock.substr(3, 2), &mm) ||
        !parse_int(clock.substr(6, 2), &ss)) {
        return std::nullopt;
    }
    std::string_view zone = parts[4];
    if (zone.size() != 5 || (zone[0] != '+' && zone[0] != '-')) return std::nullopt;
    int zh = 0, zm = 0;
    if (!parse_int(zone.substr(1, 2), &zh) || !parse_int(zone.substr(3, 2), &zm)) {
        return std::nullopt;
    }
    int64_t offset_min = (zone[0] == '-' ? -1 : 1) * (zh * 60 + zm);
    int64_t days = days_from_civil(year, static_cast<unsigned>(*month),
                                   static_cast<unsigned>(day));
    int64_t seconds = days * 86400 + hh * 3600 + mm * 60 + ss - offset_min * 60;
    return seconds * 1000;
}

// ISO-8601: "2018-10-10T20:19:24Z", optional ".SSS", optional +HH:MM offset,
// ' ' accepted in place of 'T'.
std::optional<TimestampMs> parse_iso_timestamp(std::string_view text) {
    if (text.size() < 19) return std::nullopt;
    int year = 0, month = 0, day = 0, hh = 0, mm = 0, ss = 0;
    if (text[4] != '-' || text[7] != '-' || (text[10] != 'T' && text[10] != ' ') ||
        text[13] != ':' || text[16] != ':') {
        return std::nullopt;
    }
    if (!parse_int(text.substr(0, 4), &year) || !parse_int(text.substr(5, 2), &month) ||
        !parse_int(text.substr(8, 2), &day) || !parse_int(text.substr(11, 2), &hh) ||
        !parse_int(text.substr(14, 2), &mm) || !parse_int(text.substr(17, 2), &ss)) {
        return std::nullopt;
    }
    if (month < 1 || month > 12 || day < 1 || day > 31) return std::nullopt;
    size_t pos = 19;
    int64_t millis = 0;
    if (pos < text.size() && text[pos] == '.') {
        ++pos;
        size_t start = pos;
        while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
        if (pos == start) return std::nullopt;
        std::string frac(text.substr(start, std::min<size_t>(3, pos - start)));
        while (frac.size() < 3) frac.push_back('0');
        int frac_value = 0;
        if (!parse_int(frac, &frac_value)) return std::nullopt;
        millis = frac_value;
    }
    int64_t offset_min = 0;
    if (pos < text.size()) {
        char c = text[pos];
        if (c == 'Z') {
            ++pos;
        } else if (c == '+' || c == '-') {
            ++pos;
            if (pos + 2 > text.size()) return std::nullopt;
            int zh = 0, zm = 0;
            if (!parse_int(text.substr(pos, 2), &zh)) return std::nullopt;
            pos += 2;
            if (pos < text.size() && text[pos] == ':') ++pos;
            if (pos + 2 <= text.size()) {
                if (!parse_int(text.substr(pos, 2), &zm)) return std::nullopt;
                pos += 2;
            }
            offset_min = (c == '-' ? -1 : 1) * (zh * 60 + zm);
        } else {
            return std::nullopt;
        }
    }
    if (pos != text.size()) return std::nullopt;
    int64_t days = days_from_civil(year, static_cast<unsigned>(month),
                                   static_cast<unsigned>(day));
    int64_t seconds = days * 86400 + hh * 3600 + mm * 60 + ss - offset_min * 60;
    return seconds * 1000 + millis;
}

std::optional<TimestampMs> timestamp_from_json(const json& value) {
    if (value.is_number_integer()) return value.get<int64_t>();
    if (value.is_number_unsigned()) return static_cast<int64_t>(value.get<uint64_t>());
    if (value.is_string()) return parse_timestamp(value.get_ref<const std::string&>());
    return std::nullopt;
}

int64_t count_field(const json& user, const char* name, uint64_t* warnings) {
    auto it = user.find(name);
    if (it == user.end() || !it->is_number()) {
        if (warnings != nullptr) ++*warnings;
        return 0;
    }
    int64_t v = it->is_number_float() ? static_cast<int64_t>(std::llround(it->get<double>()))
                                      : it->get<int64_t>();
    if (v < 0) {
        if (warnings != nullptr) ++*warnings;
        return 0;
    }
    return v;
}

} // namespace

std::optional<TimestampMs> parse_timestamp(std::string_view text) {
    if (auto iso = parse_iso_timestamp(text)) return iso;
    return parse_twitter_timestamp(text);
}

std::string format_timestamp_iso(TimestampMs ms) {
    int64_t seconds = ms / 1000;
    int64_t millis = ms % 1000;
    if (millis < 0) {
        millis += 1000;
        --seconds;
    }
    int64_t days = seconds / 86400;
    int64_t rem = seconds % 86400;
    if (rem < 0) {
        rem += 86400;
        --days;
    }
    int64_t year = 0;
    unsigned month = 0, day = 0;
    civil_from_days(days, &year, &month, &day);
    char buf[40];
    if (millis != 0) {
        std::snprintf(buf, sizeof buf, "%04lld-%02u-%02uT%02lld:%02lld:%02lld.%03lldZ",
                      static_cast<long long>(year), month, day,
                      static_cast<long long>(rem / 3600),
                      static_cast<long long>(rem / 60 % 60),
                      static_cast<long long>(rem % 60), static_cast<long long>(millis));
    } else {
        std::snprintf(buf, sizeof buf, "%04lld-%02u-%02uT%02lld:%02lld:%02lldZ",
                      static_cast<long long>(year), month, day,
                      static_cast<long long>(rem / 3600),
                      static_cast<long long>(rem / 60 % 60),
                      static_cast<long long>(rem % 60));
    }
    return buf;
}

std::optional<TweetRecord> parse_tweet(std::string_view json_line, ParseIssue* issue,
                                       uint64_t* warnings) {
    auto fail = [&](ParseIssue::Kind kind, std::string detail) -> std::optional<TweetRecord> {
        if (issue != nullptr) *issue = {kind, std::move(detail)};
        return std::nullopt;
    };

    json doc = json::parse(json_line, nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) {
        return fail(ParseIssue::Kind::BadJson, "malformed JSON");
    }

    TweetRecord record;

    auto id_it = doc.find("id");
    if (id_it == doc.end()) return fail(ParseIssue::Kind::Schema, "missing id");
    if (id_it->is_string()) {
        record.id = id_it->get<std::string>();
    } else if (id_it->is_number_unsigned()) {
        record.id = std::to_string(id_it->get<uint64_t>());
    } else if (id_it->is_number_integer()) {
        record.id = std::to_string(id_it->get<int64_t>());
    } else {
        return fail(ParseIssue::Kind::Schema, "bad id type");
    }

    auto text_it = doc.find("text");
    if (text_it == doc.end() || !text_it->is_string()) {
        return fail(ParseIssue::Kind::Schema, "missing text");
    }
    record.text = text_it->get<std::string>();
    if (record.text.empty()) return fail(ParseIssue::Kind::Schema, "empty text");

    auto created_it = doc.find("created_at");
    if (created_it == doc.end()) return fail(ParseIssue::Kind::Schema, "missing created_at");
    auto created = timestamp_from_json(*created_it);
    if (!created) return fail(ParseIssue::Kind::Schema, "unparseable created_at");
    if (*created < kMinTweetTimestampMs) {
        return fail(ParseIssue::Kind::Schema, "created_at before 2006");
    }
    record.created_at = *created;

    if (auto it = doc.find("label"); it != doc.end() && it->is_string()) {
        record.label = parse_class_label(it->get_ref<const std::string&>());
        if (!record.label && warnings != nullptr) ++*warnings; // unknown label: unlabeled
    }
    if (auto it = doc.find("is_retweet"); it != doc.end() && it->is_boolean()) {
        record.is_retweet = it->get<bool>();
    }
    if (auto it = doc.find("is_reply"); it != doc.end() && it->is_boolean()) {
        record.is_reply = it->get<bool>();
    }

    auto user_it = doc.find("user");
    if (user_it == doc.end() || !user_it->is_object()) {
        // ragged input: profile defaults to zeros, account age 0
        if (warnings != nullptr) ++*warnings;
        record.user.account_created_at = record.created_at;
        return record;
    }
    const json& user = *user_it;
    if (auto it = user.find("id"); it != user.end()) {
        if (it->is_string()) {
            record.user.id = it->get<std::string>();
        } else if (it->is_number_unsigned()) {
            record.user.id = std::to_string(it->get<uint64_t>());
        } else if (it->is_number_integer()) {
            record.user.id = std::to_string(it->get<int64_t>());
        }
    }
    record.user.statuses_count = count_field(user, "statuses_count", warnings);
    record.user.listed_count = count_field(user, "listed_count", warnings);
    record.user.followers_count = count_field(user, "followers_count", warnings);
    record.user.friends_count = count_field(user, "friends_count", warnings);

    std::optional<TimestampMs> account_created;
    if (auto it = user.find("created_at"); it != user.end()) {
        account_created = timestamp_from_json(*it);
    }
    if (!account_created) {
        if (warnings != nullptr) ++*warnings;
        account_created = record.created_at;
    }
    if (*account_created > record.created_at) {
        if (warnings != nullptr) ++*warnings;
        account_created = record.created_at; // account cannot postdate the tweet
    }
    record.user.account_created_at = *account_created;
    return record;
}

std::string serialize_tweet(const TweetRecord& record) {
    json doc;
    doc["id"] = record.id;
    doc["text"] = record.text;
    doc["created_at"] = format_timestamp_iso(record.created_at);
    if (record.label) doc["label"] = std::string(to_string(*record.label));
    doc["is_retweet"] = record.is_retweet;
    doc["is_reply"] = record.is_reply;
    doc["user"] = {
        {"created_at", format_timestamp_iso(record.user.account_created_at)},
        {"statuses_count", record.user.statuses_count},
        {"listed_count", record.user.listed_count},
        {"followers_count", record.user.followers_count},
        {"friends_count", record.user.friends_count},
    };
    if (!record.user.id.empty()) doc["user"]["id"] = record.user.id;
    return doc.dump();
}

// --- line sources ---------------------------------------------------------------

FileLineSource::FileLineSource(const std::filesystem::path& path) : path_(path) {
    auto file = std::make_unique<std::ifstream>(path);
    if (!*file) throw IoError("cannot open input file: " + path.string());
    in_ = std::move(file);
}

PullStatus FileLineSource::next_line(std::string& line, int /*timeout_ms*/) {
    if (std::getline(*in_, line)) return PullStatus::Ready;
    return PullStatus::End;
}

PullStatus IstreamLineSource::next_line(std::string& line, int /*timeout_ms*/) {
    if (std::getline(*in_, line)) return PullStatus::Ready;
    return PullStatus::End;
}

TcpLineSource::TcpLineSource(uint16_t port) {
    listen_fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
    if (listen_fd_ < 0) throw IoError("socket() failed");
    int enable = 1;
    ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &enable, sizeof enable);
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_addr.s_addr = htonl(INADDR_ANY);
    addr.sin_port = htons(port);
    if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0) {
        ::close(listen_fd_);
        throw IoError("cannot bind tcp port " + std::to_string(port));
    }
    if (::listen(listen_fd_, 1) != 0) {
        ::close(listen_fd_);
        throw IoError("listen() failed");
    }
    socklen_t len = sizeof addr;
    ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&addr), &len);
    port_ = ntohs(addr.sin_port);
}

TcpLineSource::~TcpLineSource() {
    if (client_fd_ >= 0) ::close(client_fd_);
    if (listen_fd_ >= 0) ::close(listen_fd_);
}

bool TcpLineSource::accept_client(int timeout_ms) {
    pollfd pfd{listen_fd_, POLLIN, 0};
    int rc = ::poll(&pfd, 1, timeout_ms);
    if (rc <= 0) return false;
    client_fd_ = ::accept(listen_fd_, nullptr, nullptr);
    return client_fd_ >= 0;
}

PullStatus TcpLineSource::next_line(std::string& line, int timeout_ms) {
    while (true) {
        size_t newline = buffer_.find('\n');
        if (newline != std::string::npos) {
            line = buffer_.substr(0, newline);
            buffer_.erase(0, newline + 1);
            if (!line.empty() && line.back() == '\r') line.pop_back();
            return PullStatus::Ready;
        }
        if (client_done_) {
            if (!buffer_.empty()) {
                line = std::move(buffer_);
                buffer_.clear();
                return PullStatus::Ready;
            }
            return PullStatus::End;
        }
        if (client_fd_ < 0 && !accept_client(timeout_ms)) return PullStatus::Timeout;

        pollfd pfd{client_fd_, POLLIN, 0};
        int rc = ::poll(&pfd, 1, timeout_ms);
        if (rc == 0) return PullStatus::Timeout;
        if (rc < 0) return PullStatus::End;
        char chunk[4096];
        ssize_t got = ::read(client_fd_, chunk, sizeof chunk);
        if (got <= 0) {
            client_done_ = true;
            continue;
        }
        buffer_.append(chunk, static_cast<size_t>(got));
    }
}

// --- record sources --------------------------------------------------------------

PullStatus LineRecordSource::next(TweetRecord& record, int timeout_ms) {
    std::string line;
    while (true) {
        PullStatus status = lines_->next_line(line, timeout_ms);
        if (status != PullStatus::Ready) return status;
        ++stats_.lines;
        if (line.empty()) {
            ++stats_.skipped;
            continue;
        }
        auto parsed = parse_tweet(line, nullptr, &stats_.warnings);
        if (!parsed) {
            ++stats_.skipped;
            continue;
        }
        record = std::move(*parsed);
        ++stats_.emitted;
        return PullStatus::Ready;
    }
}

PullStatus VectorRecordSource::next(TweetRecord& record, int /*timeout_ms*/) {
    if (pos_ >= records_.size()) return PullStatus::End;
    record = records_[pos_++];
    ++stats_.lines;
    ++stats_.emitted;
    return PullStatus::Ready;
}

RecordStream::RecordStream(std::vector<std::unique_ptr<RecordSource>> sources,
                           double replay_rate)
    : sources_(std::move(sources)), done_(sources_.size(), false), replay_rate_(replay_rate) {}

PullStatus RecordStream::next(TweetRecord& record, int timeout_ms) {
    if (!started_) {
        started_ = true;
        start_ = std::chrono::steady_clock::now();
    }
    size_t alive = 0;
    size_t timeouts = 0;
    for (size_t scanned = 0; scanned < sources_.size(); ++scanned) {
        size_t index = (next_source_ + scanned) % sources_.size();
        if (done_[index]) continue;
        ++alive;
        PullStatus status = sources_[index]->next(record, timeout_ms);
        if (status == PullStatus::End) {
            done_[index] = true;
            --alive;
            continue;
        }
        if (status == PullStatus::Timeout) {
            ++timeouts;
            continue;
        }
        next_source_ = (index + 1) % sources_.size();
        if (replay_rate_ > 0.0) {
            auto due = start_ + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                                    std::chrono::duration<double>(
                                        static_cast<double>(emitted_) / replay_rate_));
            std::this_thread::sleep_until(due);
        }
        ++emitted_;
        return PullStatus::Ready;
    }
    if (alive == 0) return PullStatus::End;
    return PullStatus::Timeout;
}

ParseStats RecordStream::stats() const {
    ParseStats total;
    for (const auto& source : sources_) total.merge(source->stats());
    return total;
}

std::unique_ptr<RecordSource> open_record_source(const std::string& uri) {
    if (uri == "-") {
        return std::make_unique<LineRecordSource>(std::make_unique<IstreamLineSource>(std::cin));
    }
    if (uri.rfind("tcp://", 0) == 0) {
        std::string rest = uri.substr(6);
        size_t colon = rest.rfind(':');
        if (colon == std::string::npos) throw ConfigError("tcp source needs a port: " + uri);
        int port = 0;
        if (!parse_int(rest.substr(colon + 1), &port) || port < 0 || port > 65535) {
            throw ConfigError("bad tcp port in: " + uri);
        }
        return std::make_unique<LineRecordSource>(
            std::make_unique<TcpLineSource>(static_cast<uint16_t>(port)));
    }
    return std::make_unique<LineRecordSource>(std::make_unique<FileLineSource>(uri));
}

} // namespace aggstream
