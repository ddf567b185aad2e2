#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>

namespace markerscan {

namespace detail {

struct CodepointRange {
    uint32_t lo;
    uint32_t hi;
};

struct FoldPair {
    uint32_t from;
    uint32_t to;
};

extern const CodepointRange kLetterRanges[];
extern const std::size_t kLetterRangeCount;
extern const FoldPair kFoldPairs[];
extern const std::size_t kFoldPairCount;

}  // namespace detail

// True for every codepoint with Unicode general category L*.
bool is_letter(char32_t cp);

// Simple one-to-one case folding (single-codepoint lowercase mapping).
// Codepoints without such a mapping are returned unchanged.
char32_t fold(char32_t cp);

// Decodes one UTF-8 sequence starting at text[pos]. On success stores the
// codepoint and returns the sequence length. Returns 0 for invalid input
// (the caller should treat the byte as a separator and advance by one).
std::size_t decode_utf8(std::string_view text, std::size_t pos, char32_t& cp);

// Appends the UTF-8 encoding of cp to out.
void append_utf8(std::string& out, char32_t cp);

}  // namespace markerscan
