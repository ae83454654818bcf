#include "seqlab/model/retrain.h"

#include <algorithm>
#include <chrono>

#include "seqlab/core/error.h"

namespace seqlab {

RetrainController::RetrainController(size_t threshold)
    : threshold_(threshold) {
  if (threshold_ == 0) throw InvalidArgument("batch threshold must be >= 1");
}

RetrainController::RetrainController(size_t threshold,
                                     std::vector<IterationRecord> records,
                                     uint64_t last_sequence)
    : RetrainController(threshold) {
  records_ = std::move(records);
  last_sequence_ = last_sequence;
}

size_t RetrainController::PendingLabels(const LabelStore &store) const {
  return store.CountNewSince(last_sequence_);
}

std::optional<RetrainOutcome> RetrainController::MaybeRetrain(
    LabelStore &store, const FeatureSpace &space,
    const std::vector<std::string> &classes, const EvaluationSet &eval,
    const TrainingConfig &config, bool force,
    const std::function<int64_t()> &clock) {
  if (!force && PendingLabels(store) < threshold_) return std::nullopt;

  const LabelState &state = store.state();
  std::vector<std::string> train_ids;
  for (const auto &[id, cls] : state.current) {
    if (!eval.truth.count(id)) train_ids.push_back(id);
  }
  Classifier model = TrainOnVideos(train_ids, state.current, space, config);

  IterationRecord record;
  if (eval.empty()) {
    record = Evaluate(model, train_ids, state.current, space, classes);
  } else {
    record = Evaluate(model, eval.ids, eval.truth, space, classes);
  }
  record.iteration = static_cast<int>(records_.size()) + 1;
  record.labeled_count = train_ids.size();
  record.timestamp_ms =
      clock ? clock()
            : std::chrono::duration_cast<std::chrono::milliseconds>(
                  std::chrono::system_clock::now().time_since_epoch())
                  .count();
  records_.push_back(record);
  last_sequence_ = store.log().size();
  store.BeginIteration(std::max(store.iteration(), record.iteration + 1));
  return RetrainOutcome{std::move(model), std::move(record)};
}

}  // namespace seqlab
