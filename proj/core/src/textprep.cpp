#include "aggstream/textprep.hpp"

#include <cctype>

namespace aggstream {
namespace {

bool is_space_byte(unsigned char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

std::vector<std::string> split_whitespace(std::string_view text) {
    std::vector<std::string> out;
    size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && is_space_byte(text[i])) ++i;
        size_t start = i;
        while (i < text.size() && !is_space_byte(text[i])) ++i;
        if (i > start) out.emplace_back(text.substr(start, i - start));
    }
    return out;
}

bool starts_url(std::string_view text, size_t pos, size_t* len) {
    auto match = [&](std::string_view prefix) {
        return text.substr(pos, prefix.size()) == prefix;
    };
    bool hit = match("http://") || match("https://");
    if (!hit && match("t.co/")) {
        // t.co shortener: only when it starts a token, so "at.co/x" survives
        hit = pos == 0 || is_space_byte(text[pos - 1]);
    }
    if (!hit) return false;
    size_t end = pos;
    while (end < text.size() && !is_space_byte(text[end])) ++end;
    *len = end - pos;
    return true;
}

std::string remove_urls(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    size_t i = 0;
    while (i < text.size()) {
        size_t len = 0;
        if (starts_url(text, i, &len)) {
            i += len;
        } else {
            out.push_back(text[i]);
            ++i;
        }
    }
    return out;
}

std::vector<std::string> segment_sentences(std::string_view raw) {
    std::vector<std::string> parts;
    std::string current;
    for (char c : raw) {
        if (c == '.' || c == '!' || c == '?') {
            if (!current.empty()) parts.push_back(std::move(current));
            current.clear();
        } else {
            current.push_back(c);
        }
    }
    if (!current.empty()) parts.push_back(std::move(current));
    return parts;
}

std::vector<std::vector<std::string>> sentence_tokens(std::string_view raw) {
    std::vector<std::vector<std::string>> out;
    for (const std::string& part : segment_sentences(raw)) {
        std::vector<std::string> words = split_whitespace(part);
        if (!words.empty()) out.push_back(std::move(words));
    }
    return out;
}

} // namespace

CleanedText clean(std::string_view text) {
    CleanedText result;
    result.raw.assign(text);
    result.sentences = sentence_tokens(text);

    std::vector<std::string> raw_tokens = split_whitespace(remove_urls(text));

    std::string cleaned;
    cleaned.reserve(text.size());
    bool at_start = true;
    for (const std::string& token : raw_tokens) {
        if (token[0] == '@' || token[0] == '#') continue;
        if (at_start && token == "RT") continue;

        std::string kept;
        for (unsigned char c : token) {
            if (is_letter_byte(c)) kept.push_back(static_cast<char>(c));
        }
        if (kept.empty()) continue;

        if (!cleaned.empty()) cleaned.push_back(' ');
        cleaned += kept;
        result.tokens.push_back(std::move(kept));
        at_start = false;
    }
    result.cleaned = std::move(cleaned);
    return result;
}

CleanedText passthrough(std::string_view text) {
    CleanedText result;
    result.raw.assign(text);
    result.cleaned.assign(text);
    result.tokens = split_whitespace(text);
    result.sentences = sentence_tokens(text);
    return result;
}

} // namespace aggstream
