#include "cornerforge/textsearch.hpp"

#include <algorithm>
#include <cctype>

namespace cornerforge {

TokenStream tokenize(std::string_view text) {
    TokenStream tokens;
    std::string current;
    for (char raw : text) {
        const auto c = static_cast<unsigned char>(raw);
        if (std::isalnum(c)) {
            current += static_cast<char>(std::tolower(c));
        } else if (!current.empty()) {
            tokens.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty()) tokens.push_back(std::move(current));
    return tokens;
}

int edit_distance(std::string_view a, std::string_view b) {
    const std::size_t n = a.size();
    const std::size_t m = b.size();
    if (n == 0) return static_cast<int>(m);
    if (m == 0) return static_cast<int>(n);

    std::vector<int> previous(m + 1);
    std::vector<int> current(m + 1);
    for (std::size_t j = 0; j <= m; ++j) previous[j] = static_cast<int>(j);

    for (std::size_t i = 1; i <= n; ++i) {
        current[0] = static_cast<int>(i);
        for (std::size_t j = 1; j <= m; ++j) {
            const int substitution = previous[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
            current[j] = std::min({previous[j] + 1, current[j - 1] + 1, substitution});
        }
        std::swap(previous, current);
    }
    return previous[m];
}

namespace {

constexpr std::string_view kNegationTokens[] = {"no", "not", "without"};
constexpr std::size_t kNegationWindow = 2;

bool negated(const TokenStream& tokens, std::size_t index) {
    const std::size_t first = index >= kNegationWindow ? index - kNegationWindow : 0;
    for (std::size_t i = first; i < index; ++i) {
        for (std::string_view negation : kNegationTokens) {
            if (tokens[i] == negation) return true;
        }
    }
    return false;
}

} // namespace

bool keyword_match(const TokenStream& tokens, std::string_view keyword, int max_dist) {
    if (keyword.empty()) return false;
    const int effective_dist = keyword.size() < 4 ? 0 : max_dist;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        const std::string& token = tokens[i];
        if (token.empty() || token.front() != keyword.front()) continue;
        if (edit_distance(token, keyword) > effective_dist) continue;
        if (negated(tokens, i)) continue;
        return true;
    }
    return false;
}

} // namespace cornerforge
