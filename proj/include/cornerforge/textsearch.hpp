#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace cornerforge {

// Ordered lowercase tokens: maximal runs of ASCII alphanumerics.
using TokenStream = std::vector<std::string>;

TokenStream tokenize(std::string_view text);

// Unit-cost Levenshtein distance.
int edit_distance(std::string_view a, std::string_view b);

// True iff some token matches the keyword under all three rules:
//   - edit distance <= max_dist, tightened to 0 for keywords shorter than 4 chars
//   - first characters equal
//   - the token is not negated (no/not/without within the 2 preceding tokens)
// The keyword must already be lowercase.
bool keyword_match(const TokenStream& tokens, std::string_view keyword, int max_dist);

} // namespace cornerforge
