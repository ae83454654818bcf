#include "seqlab/mining/aggregate.h"

#include <algorithm>
#include <map>

#include "seqlab/core/error.h"

namespace seqlab {

AggregationMode ParseAggregationMode(const std::string &name) {
  if (name == "prefix") return AggregationMode::kPrefix;
  if (name == "degree") return AggregationMode::kDegree;
  if (name == "set") return AggregationMode::kSet;
  throw InvalidArgument("unknown aggregation mode '" + name + "'");
}

std::string ToString(AggregationMode mode) {
  switch (mode) {
    case AggregationMode::kPrefix:
      return "prefix";
    case AggregationMode::kDegree:
      return "degree";
    case AggregationMode::kSet:
      return "set";
  }
  return "prefix";
}

namespace {

bool Insert(std::vector<TemplateNode> &level, const Pattern &p) {
  for (TemplateNode &node : level) {
    const std::string &s = node.pattern.symbols;
    if (p.symbols.size() > s.size() && p.symbols.compare(0, s.size(), s) == 0) {
      if (!Insert(node.children, p)) node.children.push_back({p, {}});
      return true;
    }
  }
  return false;
}

}  // namespace

TemplateAggregation Aggregate(std::vector<Pattern> templates,
                              AggregationMode mode) {
  std::sort(templates.begin(), templates.end(), PatternBefore);
  TemplateAggregation agg;
  agg.mode = mode;
  switch (mode) {
    case AggregationMode::kPrefix:
      // Shorter patterns come first, so every prefix is placed before any
      // extension of it.
      for (const Pattern &p : templates) {
        if (!Insert(agg.roots, p)) agg.roots.push_back({p, {}});
      }
      break;
    case AggregationMode::kDegree:
    case AggregationMode::kSet: {
      std::map<std::string, std::vector<Pattern>> groups;
      for (const Pattern &p : templates) {
        std::string key;
        if (mode == AggregationMode::kDegree) {
          key = std::to_string(p.symbols.size());
        } else {
          key = p.symbols;
          std::sort(key.begin(), key.end());
        }
        groups[key].push_back(p);
      }
      std::vector<std::pair<std::string, std::vector<Pattern>>> ordered(
          groups.begin(), groups.end());
      if (mode == AggregationMode::kDegree) {
        std::sort(ordered.begin(), ordered.end(), [](auto &a, auto &b) {
          return std::stoul(a.first) < std::stoul(b.first);
        });
      }
      for (auto &[key, members] : ordered) {
        agg.groups.push_back({key, std::move(members)});
      }
      break;
    }
  }
  return agg;
}

}  // namespace seqlab
