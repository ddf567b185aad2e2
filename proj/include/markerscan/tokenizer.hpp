#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "markerscan/unicode.hpp"

namespace markerscan {

// Streams the tokens of `text` into `fn(std::string_view token)`.
//
// A token is a maximal run of letters, case-folded. Everything else --
// digits, hyphens, apostrophes, punctuation, whitespace, invalid UTF-8
// bytes -- separates tokens. `buf` holds the folded bytes of the current
// token; the view passed to fn is only valid during the call.
template <typename Fn>
void for_each_token(std::string_view text, std::string& buf, Fn&& fn) {
    buf.clear();
    const std::size_t n = text.size();
    std::size_t i = 0;
    while (i < n) {
        unsigned char c = static_cast<unsigned char>(text[i]);
        if (c < 0x80) {
            if (c >= 'a' && c <= 'z') {
                buf.push_back(static_cast<char>(c));
                ++i;
                continue;
            }
            if (c >= 'A' && c <= 'Z') {
                buf.push_back(static_cast<char>(c + 32));
                ++i;
                continue;
            }
            ++i;
        } else {
            char32_t cp;
            std::size_t len = decode_utf8(text, i, cp);
            if (len == 0) {
                ++i;
            } else if (is_letter(cp)) {
                append_utf8(buf, fold(cp));
                i += len;
                continue;
            } else {
                i += len;
            }
        }
        if (!buf.empty()) {
            fn(std::string_view(buf));
            buf.clear();
        }
    }
    if (!buf.empty()) {
        fn(std::string_view(buf));
        buf.clear();
    }
}

// Convenience form returning materialized tokens.
std::vector<std::string> tokenize(std::string_view text);

// True when `word` is a single token that tokenizes to itself, i.e. it is
// entirely letters and already case-folded.
bool is_canonical_token(std::string_view word);

}  // namespace markerscan
