#ifndef SEQLAB_MINING_SUBSEQUENCE_H_
#define SEQLAB_MINING_SUBSEQUENCE_H_

#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

namespace seqlab {

// Strictly increasing 0-based positions m with seq[m[i]] == pattern[i].
using MatchPositions = std::vector<size_t>;

// Gap limit between consecutive matched positions: m[i+1] - m[i] - 1 must not
// exceed it. 0 means the match is contiguous; nullopt means unlimited.
using MaxGap = std::optional<size_t>;

// Returns the lexicographically smallest embedding of pattern into seq that
// respects max_gap, or nullopt when none exists. The empty pattern matches
// everything with an empty witness.
std::optional<MatchPositions> FindLeftmostMatch(std::string_view pattern,
                                                std::string_view seq,
                                                MaxGap max_gap = std::nullopt);

inline bool IsSubsequence(std::string_view pattern, std::string_view seq,
                          MaxGap max_gap = std::nullopt) {
  return FindLeftmostMatch(pattern, seq, max_gap).has_value();
}

// Every embedding, in lexicographic order. Exponential in the worst case;
// meant for inspection and small inputs.
std::vector<MatchPositions> FindAllMatches(std::string_view pattern,
                                           std::string_view seq,
                                           MaxGap max_gap = std::nullopt);

}  // namespace seqlab

#endif  // SEQLAB_MINING_SUBSEQUENCE_H_
