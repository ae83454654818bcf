#ifndef SEQLAB_TESTS_BRUTE_FORCE_H_
#define SEQLAB_TESTS_BRUTE_FORCE_H_

// Slow reference implementations used as test oracles. They share no code
// with the library.

#include <algorithm>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace seqlab::testing {

// Every index tuple of seq spelling pattern, by exhaustive recursion.
inline void AllEmbeddings(const std::string &pattern, const std::string &seq,
                          std::optional<size_t> max_gap, size_t from,
                          std::vector<size_t> &cur,
                          std::vector<std::vector<size_t>> &out) {
  if (cur.size() == pattern.size()) {
    out.push_back(cur);
    return;
  }
  for (size_t j = from; j < seq.size(); ++j) {
    if (!cur.empty() && max_gap && j - cur.back() - 1 > *max_gap) break;
    if (seq[j] != pattern[cur.size()]) continue;
    cur.push_back(j);
    AllEmbeddings(pattern, seq, max_gap, j + 1, cur, out);
    cur.pop_back();
  }
}

inline std::vector<std::vector<size_t>> AllEmbeddings(
    const std::string &pattern, const std::string &seq,
    std::optional<size_t> max_gap) {
  std::vector<std::vector<size_t>> out;
  std::vector<size_t> cur;
  AllEmbeddings(pattern, seq, max_gap, 0, cur, out);
  return out;
}

// All distinct subsequences (as index subsets) of s that respect the gap,
// with lengths in [1, max_len].
inline void CollectSubsequences(const std::string &s, size_t max_len,
                                std::optional<size_t> max_gap,
                                std::set<std::string> &out) {
  const size_t n = s.size();
  // Enumerate index subsets by bitmask; corpora are tiny (length <= 8).
  for (unsigned mask = 1; mask < (1u << n); ++mask) {
    std::string sub;
    int prev = -1;
    bool ok = true;
    for (size_t i = 0; i < n && ok; ++i) {
      if (!(mask >> i & 1u)) continue;
      if (prev >= 0 && max_gap && i - static_cast<size_t>(prev) - 1 > *max_gap) {
        ok = false;
      }
      prev = static_cast<int>(i);
      sub += s[i];
    }
    if (ok && sub.size() <= max_len) out.insert(sub);
  }
}

// pattern -> support, for every pattern meeting the constraints.
inline std::map<std::string, size_t> BruteForceMine(
    const std::vector<std::string> &corpus, size_t min_support,
    size_t min_length, size_t max_length, std::optional<size_t> max_gap) {
  std::map<std::string, size_t> support;
  for (const std::string &s : corpus) {
    std::set<std::string> subs;
    CollectSubsequences(s, max_length, max_gap, subs);
    for (const std::string &p : subs) ++support[p];
  }
  std::map<std::string, size_t> out;
  for (const auto &[p, n] : support) {
    if (n >= min_support && p.size() >= min_length) out[p] = n;
  }
  return out;
}

// Levenshtein distance by the textbook full table.
inline size_t Levenshtein(const std::string &a, const std::string &b) {
  std::vector<std::vector<size_t>> d(a.size() + 1,
                                     std::vector<size_t>(b.size() + 1));
  for (size_t i = 0; i <= a.size(); ++i) d[i][0] = i;
  for (size_t j = 0; j <= b.size(); ++j) d[0][j] = j;
  for (size_t i = 1; i <= a.size(); ++i) {
    for (size_t j = 1; j <= b.size(); ++j) {
      d[i][j] = std::min({d[i - 1][j] + 1, d[i][j - 1] + 1,
                          d[i - 1][j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1)});
    }
  }
  return d[a.size()][b.size()];
}

inline bool ContainsSubsequence(const std::string &s, const std::string &p) {
  size_t k = 0;
  for (char c : s) {
    if (k < p.size() && c == p[k]) ++k;
  }
  return k == p.size();
}

// Exhaustive MinDL optimum over member representatives: every set partition
// of the sequences; each block's representative is whichever member
// (containing the seed) gives the block its lowest cost. This is a lower
// bound on the optimum under any member-based selection rule. Blocks without
// a member that contains the seed are infeasible. Subset DP over bitmasks,
// O(3^n).
inline double ExhaustiveMinDL(const std::vector<std::string> &seqs,
                              const std::string &seed, double alpha,
                              double lambda) {
  const size_t n = seqs.size();
  const unsigned full = (1u << n) - 1;
  std::vector<std::vector<size_t>> dist(n, std::vector<size_t>(n));
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = 0; j < n; ++j) dist[i][j] = Levenshtein(seqs[i], seqs[j]);
  }
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> block(full + 1, inf);
  for (unsigned m = 1; m <= full; ++m) {
    for (size_t r = 0; r < n; ++r) {
      if (!(m >> r & 1u) || !ContainsSubsequence(seqs[r], seed)) continue;
      size_t edits = 0;
      for (size_t i = 0; i < n; ++i) {
        if (m >> i & 1u) edits += dist[r][i];
      }
      double cost = static_cast<double>(seqs[r].size()) +
                    alpha * static_cast<double>(edits) + lambda;
      block[m] = std::min(block[m], cost);
    }
  }
  std::vector<double> best(full + 1, inf);
  best[0] = 0.0;
  for (unsigned m = 1; m <= full; ++m) {
    // Fix the lowest element in the first block to avoid recounting.
    const unsigned low = m & (~m + 1u);
    const unsigned rest = m ^ low;
    for (unsigned sub = rest;; sub = (sub - 1) & rest) {
      const unsigned b = sub | low;
      if (block[b] < inf && best[m ^ b] < inf) {
        best[m] = std::min(best[m], block[b] + best[m ^ b]);
      }
      if (sub == 0) break;
    }
  }
  return best[full];
}

}  // namespace seqlab::testing

#endif  // SEQLAB_TESTS_BRUTE_FORCE_H_
