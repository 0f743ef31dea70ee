#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace aggstream {

/// A tweet text after the cleaning pass.
///
/// `sentences` is segmented from the RAW text (splitting on . ! ?) before any
/// symbol removal, so sentence-level stylistic features survive cleaning.
/// `tokens` is the whitespace split of `cleaned`.
struct CleanedText {
    std::string raw;
    std::string cleaned;
    std::vector<std::string> tokens;
    std::vector<std::vector<std::string>> sentences;
};

/// Cleans tweet text. Applies, in order: URL removal (http(s):// and t.co
/// shorteners), @mention removal, #hashtag removal, leading standalone "RT"
/// removal, digit removal, removal of every character outside letters and
/// spaces, whitespace condensation, trim. Case is preserved; bytes >= 0x80
/// are treated as letters. Total and idempotent.
CleanedText clean(std::string_view text);

/// Identity counterpart used when preprocessing is disabled: `cleaned` is the
/// raw text, tokens are its whitespace split, sentences segmented as in clean().
CleanedText passthrough(std::string_view text);

/// A letter for cleaning purposes: ASCII alphabetic or any non-ASCII byte.
inline bool is_letter_byte(unsigned char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c >= 0x80;
}

} // namespace aggstream
