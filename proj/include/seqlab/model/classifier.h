#ifndef SEQLAB_MODEL_CLASSIFIER_H_
#define SEQLAB_MODEL_CLASSIFIER_H_

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "seqlab/model/features.h"

namespace seqlab {

struct TrainingConfig {
  double learning_rate = 0.05;
  int epochs = 300;
  double l2 = 1e-3;
  uint64_t seed = 7;
};

// Row-major K x F weights followed by K biases.
struct SoftmaxParams {
  size_t num_classes = 0;
  size_t num_features = 0;
  std::vector<double> values;

  double &W(size_t k, size_t f) { return values[k * num_features + f]; }
  double W(size_t k, size_t f) const { return values[k * num_features + f]; }
  double &B(size_t k) { return values[num_classes * num_features + k]; }
  double B(size_t k) const { return values[num_classes * num_features + k]; }
};

// Class probabilities for one (already standardized) feature row.
std::vector<double> Softmax(const SoftmaxParams &params,
                            const std::vector<double> &x);

// Mean cross-entropy over the rows plus (l2 / 2) * ||W||^2, and its
// gradient with respect to params.values. Biases are not regularized.
double SoftmaxLoss(const SoftmaxParams &params,
                   const std::vector<std::vector<double>> &x,
                   const std::vector<size_t> &y, double l2,
                   std::vector<double> *gradient);

// Multinomial logistic regression over standardized features. Training is
// full-batch Adam from a seeded initialization, so a fixed seed and input
// order give bit-identical weights.
class Classifier {
 public:
  Classifier() = default;

  // Throws InvalidArgument when fewer than two classes are present or the
  // inputs are inconsistent.
  static Classifier Train(const std::vector<FeatureVector> &features,
                          const std::vector<std::string> &labels,
                          const TrainingConfig &config);

  const std::vector<std::string> &classes() const { return classes_; }
  const SoftmaxParams &params() const { return params_; }

  // Probabilities in classes() order; they sum to 1.
  std::vector<double> PredictProba(const FeatureVector &features) const;
  std::string Predict(const FeatureVector &features) const;
  double ProbabilityOf(const FeatureVector &features,
                       const std::string &class_id) const;

  void Save(std::ostream &out) const;
  static Classifier Load(std::istream &in);

  bool operator==(const Classifier &other) const;

 private:
  std::vector<double> Standardize(const FeatureVector &features) const;

  std::vector<std::string> classes_;
  std::vector<double> mean_;
  std::vector<double> scale_;
  SoftmaxParams params_;
};

// Convenience: trains on the given labeled videos.
Classifier TrainOnVideos(const std::vector<std::string> &video_ids,
                         const std::map<std::string, std::string> &labels,
                         const FeatureSpace &space,
                         const TrainingConfig &config);

// Shannon entropy of a probability vector (natural log).
double Entropy(const std::vector<double> &probabilities);

}  // namespace seqlab

#endif  // SEQLAB_MODEL_CLASSIFIER_H_
