#ifndef SEQLAB_MINING_MINER_H_
#define SEQLAB_MINING_MINER_H_

#include <string>
#include <string_view>
#include <vector>

#include "seqlab/core/dataset.h"
#include "seqlab/labels/label_store.h"
#include "seqlab/mining/subsequence.h"

namespace seqlab {

struct MiningConstraints {
  size_t min_support = 5;
  size_t min_length = 2;
  size_t max_length = 6;
  MaxGap max_gap;

  // Throws InvalidArgument when a bound is out of range.
  void Validate() const;
};

// A sequential pattern and the number of distinct sequences containing it.
struct Pattern {
  SymbolString symbols;
  size_t support = 0;

  bool operator==(const Pattern &) const = default;
};

// Canonical pattern order: length ascending, then lexicographic.
bool PatternBefore(const Pattern &a, const Pattern &b);

// Enumerates every pattern whose support under the constraints is at least
// min_support and whose length lies in [min_length, max_length]. Output is
// sorted canonically and identical for any worker count.
std::vector<Pattern> Mine(const std::vector<SymbolString> &corpus,
                          const MiningConstraints &constraints,
                          unsigned workers = 1);
std::vector<Pattern> Mine(const Dataset &dataset,
                          const MiningConstraints &constraints,
                          unsigned workers = 1);

// Number of sequences that contain the pattern under the gap limit.
size_t Support(const std::vector<SymbolString> &corpus,
               std::string_view pattern, MaxGap max_gap = std::nullopt);

// Ids of the videos matching a pattern, split by label presence.
struct Coverage {
  std::vector<std::string> labeled;
  std::vector<std::string> unlabeled;
};

Coverage Covered(const Dataset &dataset, std::string_view pattern,
                 const MiningConstraints &constraints,
                 const LabelState &labels);

// Looks up an arbitrary pattern regardless of the support threshold. Throws
// InvalidArgument for an empty query or unregistered symbols.
Pattern SearchTemplate(std::string_view query, const Dataset &dataset,
                       const MiningConstraints &constraints);

}  // namespace seqlab

#endif  // SEQLAB_MINING_MINER_H_
