#include "markerscan/tokenizer.hpp"

namespace markerscan {

std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> out;
    std::string buf;
    for_each_token(text, buf, [&](std::string_view tok) { out.emplace_back(tok); });
    return out;
}

bool is_canonical_token(std::string_view word) {
    if (word.empty()) {
        return false;
    }
    std::string buf;
    std::size_t count = 0;
    bool same = true;
    for_each_token(word, buf, [&](std::string_view tok) {
        ++count;
        if (tok != word) {
            same = false;
        }
    });
    return count == 1 && same;
}

}  // namespace markerscan
