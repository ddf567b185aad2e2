#include "markerscan/unicode.hpp"

#include <algorithm>

namespace markerscan {

bool is_letter(char32_t cp) {
    if (cp < 0x80) {
        return (cp >= 'a' && cp <= 'z') || (cp >= 'A' && cp <= 'Z');
    }
    const auto* begin = detail::kLetterRanges;
    const auto* end = begin + detail::kLetterRangeCount;
    const auto* it = std::upper_bound(begin, end, static_cast<uint32_t>(cp),
                                      [](uint32_t v, const detail::CodepointRange& r) {
                                          return v < r.lo;
                                      });
    return it != begin && cp <= (it - 1)->hi;
}

char32_t fold(char32_t cp) {
    if (cp < 0x80) {
        return (cp >= 'A' && cp <= 'Z') ? cp + 32 : cp;
    }
    const auto* begin = detail::kFoldPairs;
    const auto* end = begin + detail::kFoldPairCount;
    const auto* it = std::lower_bound(begin, end, static_cast<uint32_t>(cp),
                                      [](const detail::FoldPair& p, uint32_t v) {
                                          return p.from < v;
                                      });
    if (it != end && it->from == cp) {
        return it->to;
    }
    return cp;
}

std::size_t decode_utf8(std::string_view text, std::size_t pos, char32_t& cp) {
    const auto byte = [&](std::size_t i) { return static_cast<unsigned char>(text[i]); };
    unsigned char b0 = byte(pos);
    if (b0 < 0x80) {
        cp = b0;
        return 1;
    }
    std::size_t len;
    char32_t acc;
    if ((b0 & 0xE0) == 0xC0) {
        len = 2;
        acc = b0 & 0x1F;
    } else if ((b0 & 0xF0) == 0xE0) {
        len = 3;
        acc = b0 & 0x0F;
    } else if ((b0 & 0xF8) == 0xF0) {
        len = 4;
        acc = b0 & 0x07;
    } else {
        return 0;
    }
    if (pos + len > text.size()) {
        return 0;
    }
    for (std::size_t i = 1; i < len; ++i) {
        unsigned char b = byte(pos + i);
        if ((b & 0xC0) != 0x80) {
            return 0;
        }
        acc = (acc << 6) | (b & 0x3F);
    }
    if (acc > 0x10FFFF || (acc >= 0xD800 && acc <= 0xDFFF)) {
        return 0;
    }
    // Reject overlong encodings.
    static constexpr char32_t kMin[5] = {0, 0, 0x80, 0x800, 0x10000};
    if (acc < kMin[len]) {
        return 0;
    }
    cp = acc;
    return len;
}

void append_utf8(std::string& out, char32_t cp) {
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

}  // namespace markerscan
