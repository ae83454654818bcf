#ifndef SEQLAB_MODEL_SIMULATION_H_
#define SEQLAB_MODEL_SIMULATION_H_

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "seqlab/core/dataset.h"
#include "seqlab/mining/miner.h"
#include "seqlab/model/classifier.h"
#include "seqlab/model/features.h"

namespace seqlab {

enum class SimulationStrategy { kTemplate, kUncertainty, kRandom };

std::string ToString(SimulationStrategy strategy);
// Throws InvalidArgument for names other than template, uncertainty,
// random.
SimulationStrategy ParseSimulationStrategy(const std::string &name);

struct SimulationConfig {
  SimulationStrategy strategy = SimulationStrategy::kTemplate;
  double target_f1 = 0.85;
  size_t batch_size = 10;
  // Oracle labels budget including the initial ones; 0 means the whole
  // pool.
  size_t max_labels = 0;
  // Labeled videos per class before the first query.
  size_t initial_per_class = 1;
  // Stratified share of videos held out for evaluation.
  double test_fraction = 0.3;
  uint64_t seed = 7;
  // Template strategy: mining constraints over the pool.
  MiningConstraints mining{20, 2, 4, std::nullopt};
  TrainingConfig training;
};

struct CurvePoint {
  int iteration = 0;
  size_t labeled_count = 0;
  double f1 = 0.0;
  std::map<std::string, double> per_class_accuracy;
};

struct SimulationRound {
  std::vector<std::string> queried;
  // Template the batch came from; empty for other strategies or fallback.
  std::string template_symbols;
};

struct SimulationResult {
  SimulationStrategy strategy = SimulationStrategy::kTemplate;
  std::vector<CurvePoint> curve;
  std::vector<SimulationRound> rounds;
  bool reached = false;
  // Oracle labels spent when the target was first reached.
  std::optional<size_t> labels_to_target;
  std::vector<std::string> test_ids;
  std::vector<std::string> initial_ids;
};

// Runs the label-retrain loop against a hidden oracle. The test split and
// the initial labels depend only on config.seed, so every strategy starts
// from the same state. After each labeled batch the model is retrained and
// scored by macro F1 on the test split. The loop stops at target_f1 or when
// the budget runs out. Throws InvalidArgument if the oracle
// misses a video or parameters are out of range.
SimulationResult Simulate(const Dataset &dataset,
                          const std::map<std::string, std::string> &oracle,
                          const SimulationConfig &config);

// The batch_size unlabeled videos with the highest predictive entropy
// (ties by id).
std::vector<std::string> SelectByUncertainty(
    const Classifier &model, const FeatureSpace &space,
    const std::vector<std::string> &unlabeled, size_t batch_size);

// Curve as a table: iteration,labeled_count,f1,<per-class accuracy>.
void WriteCurve(std::ostream &out, const SimulationResult &result,
                const std::vector<std::string> &classes);

}  // namespace seqlab

#endif  // SEQLAB_MODEL_SIMULATION_H_
