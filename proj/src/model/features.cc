#include "seqlab/model/features.h"

#include <algorithm>

namespace seqlab {

FeatureSpace::FeatureSpace(const Dataset &dataset)
    : dataset_(&dataset), alphabet_(dataset.registry().Alphabet()) {
  std::fill(std::begin(code_), std::end(code_), -1);
  for (size_t i = 0; i < alphabet_.size(); ++i) {
    code_[static_cast<unsigned char>(alphabet_[i])] = static_cast<int>(i);
  }
  if (dataset.fully_embedded()) embedding_dim_ = dataset.embedding_dim();
  const size_t a = alphabet_.size();
  dimension_ = a + a * a + embedding_dim_;
}

FeatureVector FeatureSpace::Featurize(const EventSequence &seq) const {
  const size_t a = alphabet_.size();
  FeatureVector f(dimension_, 0.0);
  int prev = -1;
  for (const EventInstance &e : seq.events) {
    int c = code_[static_cast<unsigned char>(e.type)];
    if (c < 0) {
      prev = -1;
      continue;
    }
    f[c] += 1.0;
    if (prev >= 0) f[a + static_cast<size_t>(prev) * a + c] += 1.0;
    prev = c;
  }
  if (embedding_dim_ > 0) {
    const std::vector<double> *emb = dataset_->Embedding(seq.video_id);
    if (emb) std::copy(emb->begin(), emb->end(), f.begin() + a + a * a);
  }
  return f;
}

FeatureVector FeatureSpace::Featurize(const std::string &video_id) const {
  return Featurize(dataset_->Get(video_id));
}

}  // namespace seqlab
