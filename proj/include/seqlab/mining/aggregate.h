#ifndef SEQLAB_MINING_AGGREGATE_H_
#define SEQLAB_MINING_AGGREGATE_H_

#include <string>
#include <vector>

#include "seqlab/mining/miner.h"

namespace seqlab {

enum class AggregationMode { kPrefix, kDegree, kSet };

// Throws InvalidArgument for names other than prefix, degree, set.
AggregationMode ParseAggregationMode(const std::string &name);
std::string ToString(AggregationMode mode);

// Node of the prefix tree. A template is placed under the longest proper
// prefix that is itself in the list, or at the root.
struct TemplateNode {
  Pattern pattern;
  std::vector<TemplateNode> children;
};

// Flat group for the degree and set modes.
struct TemplateGroup {
  // Pattern length for degree; sorted symbol multiset for set.
  std::string key;
  std::vector<Pattern> members;
};

struct TemplateAggregation {
  AggregationMode mode = AggregationMode::kPrefix;
  std::vector<TemplateNode> roots;    // prefix mode
  std::vector<TemplateGroup> groups;  // degree and set modes

  bool empty() const { return roots.empty() && groups.empty(); }
};

TemplateAggregation Aggregate(std::vector<Pattern> templates,
                              AggregationMode mode);

}  // namespace seqlab

#endif  // SEQLAB_MINING_AGGREGATE_H_
