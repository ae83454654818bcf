#ifndef SEQLAB_MINING_TEMPLATE_METRICS_H_
#define SEQLAB_MINING_TEMPLATE_METRICS_H_

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "seqlab/core/dataset.h"
#include "seqlab/labels/label_store.h"
#include "seqlab/mining/miner.h"

namespace seqlab {

// Predicted class per video, as produced by the current classifier.
using PredictionMap = std::map<std::string, std::string>;

struct TemplateMetrics {
  // Labeled covered videos per class.
  std::map<std::string, size_t> class_counts;
  // Subset of class_counts whose label came from programming, not seeding.
  std::map<std::string, size_t> newly_labeled_counts;
  // Largest class share among labeled covered videos; 0 when none are
  // labeled.
  double purity = 0.0;
  // Share of labeled covered videos whose prediction matches the label.
  // Unset when there are no predictions for them.
  std::optional<double> accuracy;
  size_t unlabeled_count = 0;
  size_t labeled_count = 0;
  // Class with the largest count (smallest id on ties); empty if none.
  std::string majority_class;
};

TemplateMetrics ComputeTemplateMetrics(
    const Coverage &coverage, const LabelState &labels,
    const PredictionMap *predictions = nullptr);

TemplateMetrics ComputeTemplateMetrics(
    const Dataset &dataset, std::string_view pattern,
    const MiningConstraints &constraints, const LabelState &labels,
    const PredictionMap *predictions = nullptr);

// A mined template together with its metrics.
struct TemplateRow {
  Pattern pattern;
  TemplateMetrics metrics;
};

enum class TemplateSortKey { kPurity, kAccuracy, kUnlabeled, kSupport };

// Throws InvalidArgument for names other than purity, accuracy, unlabeled,
// support.
TemplateSortKey ParseTemplateSortKey(const std::string &name);

// Stable sort with canonical pattern order as the final tie-break.
// Templates with undefined accuracy sort after every defined value.
void SortTemplates(std::vector<TemplateRow> &rows, TemplateSortKey key,
                   bool descending);

}  // namespace seqlab

#endif  // SEQLAB_MINING_TEMPLATE_METRICS_H_
