#include "seqlab/retrieval/similarity.h"

#include <algorithm>
#include <cmath>
#include <set>

#include "seqlab/core/error.h"
#include "seqlab/mindl/edit_distance.h"

namespace seqlab {

SimilarityWeights::SimilarityWeights(double w) : w_(w) {
  if (!(w >= 0.0 && w <= 1.0)) {
    throw InvalidArgument("similarity weight must lie in [0, 1]");
  }
}

double SequenceSimilarity(std::string_view a, std::string_view b) {
  const size_t longest = std::max(a.size(), b.size());
  if (longest == 0) return 1.0;
  return 1.0 - static_cast<double>(EditDistanceCost(a, b)) /
                   static_cast<double>(longest);
}

double EmbeddingSimilarity(std::span<const double> u,
                           std::span<const double> v) {
  if (u.size() != v.size()) {
    throw InvalidArgument("embedding dimension mismatch");
  }
  double dot = 0.0, nu = 0.0, nv = 0.0;
  for (size_t i = 0; i < u.size(); ++i) {
    dot += u[i] * v[i];
    nu += u[i] * u[i];
    nv += v[i] * v[i];
  }
  if (nu == 0.0 || nv == 0.0) throw InvalidArgument("zero embedding vector");
  return std::clamp(dot / (std::sqrt(nu) * std::sqrt(nv)), 0.0, 1.0);
}

namespace {

struct PairScore {
  double total;
  double e;
  double v;
};

PairScore Score(std::string_view a_id, std::string_view b_id,
                const Dataset &dataset, double w) {
  PairScore s{};
  s.e = SequenceSimilarity(dataset.Symbols(a_id), dataset.Symbols(b_id));
  if (w == 1.0) {
    s.total = s.e;
    return s;
  }
  const std::vector<double> *u = dataset.Embedding(a_id);
  const std::vector<double> *v = dataset.Embedding(b_id);
  if (!u || !v) {
    throw InvalidArgument("missing embedding for '" +
                          std::string(u ? b_id : a_id) +
                          "' with similarity weight < 1");
  }
  s.v = EmbeddingSimilarity(*u, *v);
  s.total = w * s.e + (1.0 - w) * s.v;
  return s;
}

}  // namespace

double TotalSimilarity(std::string_view a_id, std::string_view b_id,
                       const Dataset &dataset,
                       const SimilarityWeights &weights) {
  return Score(a_id, b_id, dataset, weights.w()).total;
}

std::vector<RetrievalHit> Retrieve(const std::vector<std::string> &anchors,
                                   const std::vector<std::string> &candidates,
                                   const Dataset &dataset,
                                   const RetrievalOptions &options) {
  if (anchors.empty()) throw InvalidArgument("empty anchor set");
  std::set<std::string> anchor_set(anchors.begin(), anchors.end());
  std::set<std::string> candidate_set(candidates.begin(), candidates.end());
  for (const std::string &id : anchor_set) {
    if (!dataset.Contains(id)) {
      throw InvalidArgument("unknown anchor '" + id + "'");
    }
  }
  for (const std::string &id : candidate_set) {
    if (!dataset.Contains(id)) {
      throw InvalidArgument("unknown candidate '" + id + "'");
    }
    if (anchor_set.count(id)) {
      throw InvalidArgument("'" + id + "' is both anchor and candidate");
    }
  }

  const double w = options.weights.w();
  std::vector<RetrievalHit> hits;
  hits.reserve(candidate_set.size());
  for (const std::string &cand : candidate_set) {
    RetrievalHit hit;
    hit.video_id = cand;
    bool first = true;
    double sum_t = 0.0, sum_e = 0.0, sum_v = 0.0;
    for (const std::string &anchor : anchor_set) {
      PairScore s = Score(anchor, cand, dataset, w);
      sum_t += s.total;
      sum_e += s.e;
      sum_v += s.v;
      if (first || s.total > hit.sim_total) {
        hit.sim_total = s.total;
        hit.sim_e = s.e;
        hit.sim_v = s.v;
        hit.best_anchor_id = anchor;
        first = false;
      }
    }
    if (options.aggregation == AnchorAggregation::kMean) {
      const double n = static_cast<double>(anchor_set.size());
      hit.sim_total = sum_t / n;
      hit.sim_e = sum_e / n;
      hit.sim_v = sum_v / n;
    }
    hits.push_back(std::move(hit));
  }
  std::sort(hits.begin(), hits.end(),
            [](const RetrievalHit &a, const RetrievalHit &b) {
              if (a.sim_total != b.sim_total) return a.sim_total > b.sim_total;
              return a.video_id < b.video_id;
            });
  if (options.top_k && hits.size() > *options.top_k) {
    hits.resize(*options.top_k);
  }
  return hits;
}

}  // namespace seqlab
