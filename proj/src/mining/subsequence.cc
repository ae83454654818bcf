#include "seqlab/mining/subsequence.h"

#include <algorithm>

namespace seqlab {

namespace {

// feasible[i][p]: pattern[i..] can be matched with pattern[i] at seq[p].
std::vector<std::vector<char>> FeasibilityTable(std::string_view pattern,
                                                std::string_view seq,
                                                MaxGap max_gap) {
  const size_t k = pattern.size();
  const size_t n = seq.size();
  std::vector<std::vector<char>> feasible(k, std::vector<char>(n, 0));
  if (k == 0) return feasible;
  for (size_t p = 0; p < n; ++p) feasible[k - 1][p] = seq[p] == pattern[k - 1];
  for (size_t i = k - 1; i-- > 0;) {
    // suffix[q]: number of feasible positions for pattern[i+1] in [q, n).
    std::vector<size_t> suffix(n + 1, 0);
    for (size_t q = n; q-- > 0;) {
      suffix[q] = suffix[q + 1] + (feasible[i + 1][q] ? 1 : 0);
    }
    for (size_t p = 0; p < n; ++p) {
      if (seq[p] != pattern[i]) continue;
      size_t lo = p + 1;
      size_t hi = max_gap ? std::min(n, p + 2 + *max_gap) : n;
      if (lo < hi && suffix[lo] > suffix[hi]) feasible[i][p] = 1;
    }
  }
  return feasible;
}

}  // namespace

std::optional<MatchPositions> FindLeftmostMatch(std::string_view pattern,
                                                std::string_view seq,
                                                MaxGap max_gap) {
  if (pattern.empty()) return MatchPositions{};
  if (pattern.size() > seq.size()) return std::nullopt;

  // Without a gap limit greedy earliest matching is already leftmost.
  if (!max_gap) {
    MatchPositions m;
    size_t p = 0;
    for (char c : pattern) {
      while (p < seq.size() && seq[p] != c) ++p;
      if (p == seq.size()) return std::nullopt;
      m.push_back(p++);
    }
    return m;
  }

  auto feasible = FeasibilityTable(pattern, seq, max_gap);
  MatchPositions m;
  size_t lo = 0;
  size_t hi = seq.size();
  for (size_t i = 0; i < pattern.size(); ++i) {
    size_t p = lo;
    while (p < hi && !feasible[i][p]) ++p;
    if (p >= hi) return std::nullopt;
    m.push_back(p);
    lo = p + 1;
    hi = std::min(seq.size(), p + 2 + *max_gap);
  }
  return m;
}

std::vector<MatchPositions> FindAllMatches(std::string_view pattern,
                                           std::string_view seq,
                                           MaxGap max_gap) {
  std::vector<MatchPositions> out;
  MatchPositions current;
  auto recurse = [&](auto &self, size_t i, size_t lo, size_t hi) -> void {
    if (i == pattern.size()) {
      out.push_back(current);
      return;
    }
    for (size_t p = lo; p < hi; ++p) {
      if (seq[p] != pattern[i]) continue;
      current.push_back(p);
      size_t next_hi = max_gap ? std::min(seq.size(), p + 2 + *max_gap)
                               : seq.size();
      self(self, i + 1, p + 1, next_hi);
      current.pop_back();
    }
  };
  recurse(recurse, 0, 0, seq.size());
  return out;
}

}  // namespace seqlab
