#include "aggstream/lexicons.hpp"

#include "aggstream/error.hpp"

#include <fstream>

namespace aggstream {
namespace {

std::ifstream open_or_throw(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw IoError("cannot open lexicon file: " + file.string());
    return in;
}

bool skip_line(const std::string& line) {
    return line.empty() || line[0] == '#';
}

// "word<TAB>value"; returns false for comment/blank lines
bool split_tsv(const std::string& line, std::string* word, std::string* value,
               const std::filesystem::path& file) {
    if (skip_line(line)) return false;
    size_t tab = line.find('\t');
    if (tab == std::string::npos || tab == 0 || tab + 1 >= line.size()) {
        throw IoError("malformed lexicon line in " + file.string() + ": " + line);
    }
    *word = line.substr(0, tab);
    *value = line.substr(tab + 1);
    return true;
}

} // namespace

SentimentLexicon SentimentLexicon::load(const std::filesystem::path& file) {
    std::ifstream in = open_or_throw(file);
    SentimentLexicon lex;
    std::string line, word, value;
    while (std::getline(in, line)) {
        if (!split_tsv(line, &word, &value, file)) continue;
        int score = 0;
        try {
            score = std::stoi(value);
        } catch (const std::exception&) {
            throw IoError("bad sentiment score in " + file.string() + ": " + line);
        }
        if (score == 0 || score < -5 || score > 5) {
            throw IoError("sentiment score out of [-5,5]\\{0} in " + file.string() + ": " + line);
        }
        lex.set(word, score);
    }
    return lex;
}

void SentimentLexicon::set(std::string word, int score) {
    scores_[std::move(word)] = score;
}

int SentimentLexicon::score(const std::string& word) const {
    auto it = scores_.find(word);
    return it == scores_.end() ? 0 : it->second;
}

PosLexicon PosLexicon::load(const std::filesystem::path& file) {
    std::ifstream in = open_or_throw(file);
    PosLexicon lex;
    std::string line, word, value;
    while (std::getline(in, line)) {
        if (!split_tsv(line, &word, &value, file)) continue;
        if (value == "adjective") {
            lex.set(word, PosTag::Adjective);
        } else if (value == "adverb") {
            lex.set(word, PosTag::Adverb);
        } else if (value == "verb") {
            lex.set(word, PosTag::Verb);
        } else {
            throw IoError("unknown POS tag in " + file.string() + ": " + line);
        }
    }
    return lex;
}

void PosLexicon::set(std::string word, PosTag tag) {
    tags_[std::move(word)] = tag;
}

std::optional<PosTag> PosLexicon::tag(const std::string& word) const {
    auto it = tags_.find(word);
    if (it == tags_.end()) return std::nullopt;
    return it->second;
}

std::unordered_set<std::string> load_word_list(const std::filesystem::path& file) {
    std::ifstream in = open_or_throw(file);
    std::unordered_set<std::string> words;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (skip_line(line)) continue;
        words.insert(line);
    }
    return words;
}

Lexicons Lexicons::load_dir(const std::filesystem::path& dir) {
    Lexicons lex;
    lex.swear_seed = load_word_list(dir / "swear_seed.txt");
    lex.sentiment = SentimentLexicon::load(dir / "sentiment.tsv");
    lex.pos = PosLexicon::load(dir / "pos.tsv");
    return lex;
}

} // namespace aggstream
