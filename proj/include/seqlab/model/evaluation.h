#ifndef SEQLAB_MODEL_EVALUATION_H_
#define SEQLAB_MODEL_EVALUATION_H_

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "seqlab/model/classifier.h"
#include "seqlab/model/features.h"

namespace seqlab {

// Rows are ground-truth classes, columns predicted classes, both in
// classes order.
struct ConfusionMatrix {
  std::vector<std::string> classes;
  std::vector<std::vector<size_t>> counts;

  size_t RowSum(size_t r) const;
  size_t ColSum(size_t c) const;
};

// Mean per-class F1 = 2tp / (2tp + fp + fn) over every class that occurs in
// the truth or the predictions.
double MacroF1(const ConfusionMatrix &matrix);

struct IterationRecord {
  int iteration = 0;
  size_t labeled_count = 0;
  // diag / row sum, for classes present in the test truth.
  std::map<std::string, double> per_class_accuracy;
  double overall_f1 = 0.0;
  ConfusionMatrix confusion;
  int64_t timestamp_ms = 0;
};

// Builds the confusion matrix and metrics for paired truth/prediction lists.
// Labels outside classes are rejected.
IterationRecord EvaluatePredictions(const std::vector<std::string> &classes,
                                    const std::vector<std::string> &truth,
                                    const std::vector<std::string> &predicted);

// Throws InvalidArgument on an empty test set or a test id without truth.
IterationRecord Evaluate(const Classifier &model,
                         const std::vector<std::string> &test_ids,
                         const std::map<std::string, std::string> &truth,
                         const FeatureSpace &space,
                         const std::vector<std::string> &classes);

std::string RecordToJson(const IterationRecord &record);
IterationRecord RecordFromJson(const std::string &line);

// Plot-ready table: iteration,labeled_count,f1,<one accuracy column per
// class>.
void WriteRecordTable(std::ostream &out,
                      const std::vector<IterationRecord> &records,
                      const std::vector<std::string> &classes);

}  // namespace seqlab

#endif  // SEQLAB_MODEL_EVALUATION_H_
