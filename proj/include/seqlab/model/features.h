#ifndef SEQLAB_MODEL_FEATURES_H_
#define SEQLAB_MODEL_FEATURES_H_

#include <string>
#include <vector>

#include "seqlab/core/dataset.h"

namespace seqlab {

using FeatureVector = std::vector<double>;

// Layout of the feature vector for one dataset:
//
//   [0, A)            event-type counts in alphabet order
//   [A, A + A*A)      adjacent bigram counts, row = first symbol
//   [A + A*A, ...)    embedding, only when every video has one
//
// where A is the registry alphabet size.
class FeatureSpace {
 public:
  explicit FeatureSpace(const Dataset &dataset);

  size_t dimension() const { return dimension_; }
  size_t alphabet_size() const { return alphabet_.size(); }
  bool uses_embeddings() const { return embedding_dim_ > 0; }

  FeatureVector Featurize(const EventSequence &seq) const;
  FeatureVector Featurize(const std::string &video_id) const;

 private:
  const Dataset *dataset_;
  std::string alphabet_;
  int code_[256];
  size_t embedding_dim_ = 0;
  size_t dimension_ = 0;
};

}  // namespace seqlab

#endif  // SEQLAB_MODEL_FEATURES_H_
