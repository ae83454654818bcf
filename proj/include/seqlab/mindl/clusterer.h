#ifndef SEQLAB_MINDL_CLUSTERER_H_
#define SEQLAB_MINDL_CLUSTERER_H_

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "seqlab/core/dataset.h"
#include "seqlab/mindl/edit_distance.h"
#include "seqlab/mindl/lsh.h"

namespace seqlab {

struct ClusterMember {
  std::string video_id;
  // Transforms the representative into this member's symbol string.
  EditScript script;
};

struct Cluster {
  SymbolString representative;
  SymbolString seed_template;
  std::vector<ClusterMember> members;

  size_t EditCost() const;
};

// Clusters of one template's matching sequences, each summarized by a
// representative that contains the seed template. total_dl is the
// description length
//
//   sum of representative lengths
//   + alpha * sum of member edit costs
//   + lambda * number of clusters
struct ClusterPartition {
  std::vector<Cluster> clusters;
  double alpha = 0.8;
  double lambda = 0.0;
  double total_dl = 0.0;
};

// Recomputes the description length from the partition's parts.
double DescriptionLength(const ClusterPartition &partition);

struct ClusterOptions {
  double alpha = 0.8;
  double lambda = 0.0;
  // When set, merges are only considered between clusters that share an
  // LSH bucket.
  std::optional<LshParams> lsh;
};

using NamedSequence = std::pair<std::string, SymbolString>;

// Greedy agglomerative MinDL clustering. Starts from singletons and applies
// the merge with the largest description-length decrease until none
// decreases it. Members are then moved to their closest representative
// whenever that lowers the total, and the two phases alternate until
// neither helps. Each representative is the member that minimizes its
// cluster's share of the description length, len(r) + alpha * summed edit
// distance (then smaller summed distance, then the lexicographically
// smaller string). Being a member, it contains the seed template. The result
// is never worse than the single-cluster partition.
//
// Throws InvalidArgument if a sequence does not contain the seed template
// (all offending ids are listed) or if alpha/lambda are out of range.
ClusterPartition ClusterSequences(const std::vector<NamedSequence> &sequences,
                                  const SymbolString &seed_template,
                                  const ClusterOptions &options = {});

// Convenience wrapper over the dataset's matching sequences.
ClusterPartition ClusterTemplate(const Dataset &dataset,
                                 const std::vector<std::string> &video_ids,
                                 const SymbolString &seed_template,
                                 const ClusterOptions &options = {});

}  // namespace seqlab

#endif  // SEQLAB_MINDL_CLUSTERER_H_
