#include "seqlab/mining/template_metrics.h"

#include <algorithm>

#include "seqlab/core/error.h"

namespace seqlab {

TemplateMetrics ComputeTemplateMetrics(const Coverage &coverage,
                                       const LabelState &labels,
                                       const PredictionMap *predictions) {
  TemplateMetrics m;
  m.unlabeled_count = coverage.unlabeled.size();
  m.labeled_count = coverage.labeled.size();
  size_t predicted = 0;
  size_t correct = 0;
  for (const std::string &id : coverage.labeled) {
    const std::string &cls = labels.current.at(id);
    ++m.class_counts[cls];
    if (labels.IsNewlyLabeled(id)) ++m.newly_labeled_counts[cls];
    if (predictions) {
      auto it = predictions->find(id);
      if (it != predictions->end()) {
        ++predicted;
        if (it->second == cls) ++correct;
      }
    }
  }
  size_t best = 0;
  for (const auto &[cls, count] : m.class_counts) {
    if (count > best) {
      best = count;
      m.majority_class = cls;
    }
  }
  if (m.labeled_count > 0) {
    m.purity = static_cast<double>(best) / static_cast<double>(m.labeled_count);
  }
  if (predicted > 0) {
    m.accuracy = static_cast<double>(correct) / static_cast<double>(predicted);
  }
  return m;
}

TemplateMetrics ComputeTemplateMetrics(const Dataset &dataset,
                                       std::string_view pattern,
                                       const MiningConstraints &constraints,
                                       const LabelState &labels,
                                       const PredictionMap *predictions) {
  return ComputeTemplateMetrics(
      Covered(dataset, pattern, constraints, labels), labels, predictions);
}

TemplateSortKey ParseTemplateSortKey(const std::string &name) {
  if (name == "purity") return TemplateSortKey::kPurity;
  if (name == "accuracy") return TemplateSortKey::kAccuracy;
  if (name == "unlabeled") return TemplateSortKey::kUnlabeled;
  if (name == "support") return TemplateSortKey::kSupport;
  throw InvalidArgument("unknown sort key '" + name + "'");
}

void SortTemplates(std::vector<TemplateRow> &rows, TemplateSortKey key,
                   bool descending) {
  auto value = [key](const TemplateRow &r) -> std::optional<double> {
    switch (key) {
      case TemplateSortKey::kPurity:
        return r.metrics.purity;
      case TemplateSortKey::kAccuracy:
        return r.metrics.accuracy;
      case TemplateSortKey::kUnlabeled:
        return static_cast<double>(r.metrics.unlabeled_count);
      case TemplateSortKey::kSupport:
        return static_cast<double>(r.pattern.support);
    }
    return std::nullopt;
  };
  std::stable_sort(rows.begin(), rows.end(),
                   [&](const TemplateRow &a, const TemplateRow &b) {
                     auto va = value(a);
                     auto vb = value(b);
                     if (va.has_value() != vb.has_value()) {
                       return va.has_value();
                     }
                     if (va && *va != *vb) {
                       return descending ? *va > *vb : *va < *vb;
                     }
                     return PatternBefore(a.pattern, b.pattern);
                   });
}

}  // namespace seqlab
