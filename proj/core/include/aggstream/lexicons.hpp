#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>

namespace aggstream {

/// Word -> sentiment score on the [-5,5] scale, zero excluded.
class SentimentLexicon {
public:
    SentimentLexicon() = default;

    /// Loads "word<TAB>score" lines. '#' comments and blank lines skipped.
    static SentimentLexicon load(const std::filesystem::path& file);

    void set(std::string word, int score);
    /// Score of a (lowercase) word, 0 when absent.
    int score(const std::string& word) const;
    size_t size() const { return scores_.size(); }

private:
    std::unordered_map<std::string, int> scores_;
};

enum class PosTag : uint8_t { Adjective, Adverb, Verb };

/// Word -> part-of-speech tag; words absent are untagged.
class PosLexicon {
public:
    PosLexicon() = default;

    /// Loads "word<TAB>tag" lines with tag in {adjective, adverb, verb}.
    static PosLexicon load(const std::filesystem::path& file);

    void set(std::string word, PosTag tag);
    std::optional<PosTag> tag(const std::string& word) const;
    size_t size() const { return tags_.size(); }

private:
    std::unordered_map<std::string, PosTag> tags_;
};

/// One lowercase word per line; '#' comments and blank lines skipped.
std::unordered_set<std::string> load_word_list(const std::filesystem::path& file);

/// The three data files the feature extractor needs, loaded together.
struct Lexicons {
    SentimentLexicon sentiment;
    PosLexicon pos;
    std::unordered_set<std::string> swear_seed;

    /// Loads swear_seed.txt, sentiment.tsv and pos.tsv from a directory.
    static Lexicons load_dir(const std::filesystem::path& dir);
};

} // namespace aggstream
