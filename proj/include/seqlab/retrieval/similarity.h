#ifndef SEQLAB_RETRIEVAL_SIMILARITY_H_
#define SEQLAB_RETRIEVAL_SIMILARITY_H_

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "seqlab/core/dataset.h"

namespace seqlab {

// Blend weight between sequence similarity (w) and embedding similarity
// (1 - w).
class SimilarityWeights {
 public:
  // Throws InvalidArgument unless 0 <= w <= 1.
  explicit SimilarityWeights(double w = 0.5);

  double w() const { return w_; }

 private:
  double w_;
};

// 1 - editDistance(a, b) / max(|a|, |b|); 1 for two empty strings.
double SequenceSimilarity(std::string_view a, std::string_view b);

// Cosine similarity with negative values clamped to 0. Throws
// InvalidArgument on a dimension mismatch or a zero vector.
double EmbeddingSimilarity(std::span<const double> u,
                           std::span<const double> v);

// w * sequence similarity + (1 - w) * embedding similarity. Embeddings are
// not consulted when w == 1. Throws InvalidArgument on unknown ids or a
// missing embedding with w < 1.
double TotalSimilarity(std::string_view a_id, std::string_view b_id,
                       const Dataset &dataset,
                       const SimilarityWeights &weights);

enum class AnchorAggregation { kMax, kMean };

struct RetrievalHit {
  std::string video_id;
  double sim_total = 0.0;
  double sim_e = 0.0;
  double sim_v = 0.0;
  // Anchor with the highest sim_total (smallest id on ties).
  std::string best_anchor_id;
};

struct RetrievalOptions {
  SimilarityWeights weights;
  std::optional<size_t> top_k;
  AnchorAggregation aggregation = AnchorAggregation::kMax;
};

// Scores every candidate against the anchors and ranks by descending score,
// ascending id on ties. With kMax a candidate's score is its best anchor's
// score; with kMean the mean over anchors (sim_e and sim_v likewise).
// Throws InvalidArgument for an empty anchor set, overlapping sets or
// unknown ids.
std::vector<RetrievalHit> Retrieve(const std::vector<std::string> &anchors,
                                   const std::vector<std::string> &candidates,
                                   const Dataset &dataset,
                                   const RetrievalOptions &options);

}  // namespace seqlab

#endif  // SEQLAB_RETRIEVAL_SIMILARITY_H_
