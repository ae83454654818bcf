#ifndef SEQLAB_MODEL_RETRAIN_H_
#define SEQLAB_MODEL_RETRAIN_H_

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "seqlab/labels/label_store.h"
#include "seqlab/model/classifier.h"
#include "seqlab/model/evaluation.h"
#include "seqlab/model/features.h"

namespace seqlab {

// Held-out videos with ground truth. When empty, evaluation falls back to
// the training labels themselves.
struct EvaluationSet {
  std::vector<std::string> ids;
  std::map<std::string, std::string> truth;

  bool empty() const { return ids.empty(); }
};

struct RetrainOutcome {
  Classifier model;
  IterationRecord record;
};

// Fires a retrain once the number of labels applied since the previous
// retrain reaches the batch threshold. Each retrain appends an
// IterationRecord and advances the label store to the next iteration.
class RetrainController {
 public:
  // Throws InvalidArgument when threshold is 0.
  explicit RetrainController(size_t threshold = 32);

  // Restores a controller from persisted records. last_sequence is the log
  // size at the most recent retrain.
  RetrainController(size_t threshold, std::vector<IterationRecord> records,
                    uint64_t last_sequence);

  size_t threshold() const { return threshold_; }
  size_t PendingLabels(const LabelStore &store) const;

  // Retrains when forced or when the threshold is reached; returns nullopt
  // otherwise. Training uses every labeled video outside the evaluation
  // set.
  std::optional<RetrainOutcome> MaybeRetrain(
      LabelStore &store, const FeatureSpace &space,
      const std::vector<std::string> &classes, const EvaluationSet &eval,
      const TrainingConfig &config, bool force = false,
      const std::function<int64_t()> &clock = {});

  const std::vector<IterationRecord> &records() const { return records_; }
  uint64_t last_sequence() const { return last_sequence_; }

 private:
  size_t threshold_;
  std::vector<IterationRecord> records_;
  uint64_t last_sequence_ = 0;
};

}  // namespace seqlab

#endif  // SEQLAB_MODEL_RETRAIN_H_
