#include "seqlab/mindl/clusterer.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <tuple>

#include "seqlab/core/error.h"
#include "seqlab/mining/subsequence.h"

namespace seqlab {

size_t Cluster::EditCost() const {
  size_t cost = 0;
  for (const ClusterMember &m : members) cost += m.script.cost();
  return cost;
}

double DescriptionLength(const ClusterPartition &partition) {
  size_t length = 0;
  size_t edits = 0;
  for (const Cluster &c : partition.clusters) {
    length += c.representative.size();
    edits += c.EditCost();
  }
  return static_cast<double>(length) +
         partition.alpha * static_cast<double>(edits) +
         partition.lambda * static_cast<double>(partition.clusters.size());
}

namespace {

// Working state of the agglomerative search. Strings are deduplicated and
// sorted, so a smaller index means a lexicographically smaller string.
class GreedyMerger {
 public:
  GreedyMerger(std::vector<SymbolString> distinct,
               const std::vector<size_t> &input_index,
               const ClusterOptions &options)
      : strings_(std::move(distinct)), options_(options) {
    const size_t u = strings_.size();
    dist_.assign(u * u, 0);
    for (size_t a = 0; a < u; ++a) {
      for (size_t b = a + 1; b < u; ++b) {
        uint32_t d =
            static_cast<uint32_t>(EditDistanceCost(strings_[a], strings_[b]));
        dist_[a * u + b] = d;
        dist_[b * u + a] = d;
      }
    }
    if (options_.lsh) {
      string_buckets_ = BucketsPerSequence(
          ComputeLshBuckets(strings_, *options_.lsh), u);
    }
    for (size_t idx : input_index) {
      State s;
      s.counts = {{idx, 1}};
      s.rep = idx;
      s.size = 1;
      if (options_.lsh) s.buckets = string_buckets_[idx];
      s.row_sums = RowSums(s.counts);
      clusters_.push_back(std::move(s));
    }
  }

  uint32_t Dist(size_t a, size_t b) const {
    return dist_[a * strings_.size() + b];
  }

  // Runs merges to a local optimum and returns the surviving clusters as
  // (representative, member string indices with multiplicity) pairs.
  std::vector<std::pair<size_t, std::vector<std::pair<size_t, size_t>>>>
  Run() {
    // Merging and reassignment alternate; each accepted step strictly
    // lowers the description length, so the loop terminates.
    do {
      queue_.clear();
      for (size_t a = 0; a < clusters_.size(); ++a) {
        if (!clusters_[a].alive) continue;
        for (size_t b = a + 1; b < clusters_.size(); ++b) {
          if (clusters_[b].alive) Consider(a, b);
        }
      }
      while (!queue_.empty()) {
        Candidate best = *queue_.begin();
        queue_.erase(queue_.begin());
        if (!clusters_[best.a].alive || !clusters_[best.b].alive) continue;
        size_t merged = Merge(best.a, best.b);
        for (size_t x = 0; x < merged; ++x) {
          if (clusters_[x].alive) Consider(x, merged);
        }
      }
    } while (Reassign());
    std::vector<std::pair<size_t, std::vector<std::pair<size_t, size_t>>>>
        out;
    for (const State &s : clusters_) {
      if (s.alive) out.emplace_back(s.rep, s.counts);
    }
    return out;
  }

  // Representative and summed distance of a multiset of strings.
  std::pair<size_t, uint64_t> Representative(
      const std::vector<std::pair<size_t, size_t>> &counts) const {
    auto sums = RowSums(counts);
    size_t best = SIZE_MAX;
    for (const auto &[idx, n] : counts) {
      if (best == SIZE_MAX || Better(idx, sums[idx], best, sums[best])) best = idx;
    }
    return {best, sums[best]};
  }

 private:
  struct State {
    std::vector<std::pair<size_t, size_t>> counts;  // string idx -> multiplicity
    size_t rep = 0;
    size_t size = 0;
    bool alive = true;
    std::vector<uint64_t> buckets;
    // row_sums[c]: sum over members m of multiplicity * dist(c, m).
    std::vector<uint64_t> row_sums;
  };

  struct Candidate {
    double delta;
    size_t rep_lo, rep_hi;  // representative string indices
    size_t a, b;            // cluster ids, a < b
    bool operator<(const Candidate &o) const {
      return std::tie(delta, rep_lo, rep_hi, a, b) <
             std::tie(o.delta, o.rep_lo, o.rep_hi, o.a, o.b);
    }
  };

  std::vector<uint64_t> RowSums(
      const std::vector<std::pair<size_t, size_t>> &counts) const {
    const size_t u = strings_.size();
    std::vector<uint64_t> sums(u, 0);
    for (const auto &[m, n] : counts) {
      const uint32_t *row = &dist_[m * u];
      for (size_t c = 0; c < u; ++c) sums[c] += n * row[c];
    }
    return sums;
  }

  double Cost(size_t rep, uint64_t edits) const {
    return static_cast<double>(strings_[rep].size()) +
           options_.alpha * static_cast<double>(edits);
  }

  // Whether candidate c (summed distance sc) beats b (summed distance sb):
  // lower cluster cost, then lower summed distance, then the smaller string.
  bool Better(size_t c, uint64_t sc, size_t b, uint64_t sb) const {
    const double cc = Cost(c, sc), cb = Cost(b, sb);
    if (cc != cb) return cc < cb;
    if (sc != sb) return sc < sb;
    return c < b;
  }

  static bool SharesBucket(const std::vector<uint64_t> &x,
                           const std::vector<uint64_t> &y) {
    auto i = x.begin();
    auto j = y.begin();
    while (i != x.end() && j != y.end()) {
      if (*i == *j) return true;
      if (*i < *j) ++i; else ++j;
    }
    return false;
  }

  void Consider(size_t a, size_t b) {
    const State &x = clusters_[a];
    const State &y = clusters_[b];
    if (options_.lsh && !SharesBucket(x.buckets, y.buckets)) return;
    // Merged representative from the cached row sums.
    size_t best = SIZE_MAX;
    uint64_t best_sum = 0;
    auto visit = [&](size_t c) {
      uint64_t s = x.row_sums[c] + y.row_sums[c];
      if (best == SIZE_MAX || Better(c, s, best, best_sum)) {
        best = c;
        best_sum = s;
      }
    };
    for (const auto &[c, n] : x.counts) visit(c);
    for (const auto &[c, n] : y.counts) visit(c);
    const double before = Cost(x.rep, x.row_sums[x.rep]) +
                          Cost(y.rep, y.row_sums[y.rep]);
    const double delta = Cost(best, best_sum) - before - options_.lambda;
    if (!(delta < 0.0)) return;
    queue_.insert({delta, std::min(x.rep, y.rep),
                   std::max(x.rep, y.rep), a, b});
  }

  double TotalCost(const std::vector<size_t> &ids) const {
    double cost = 0.0;
    for (size_t id : ids) {
      const State &c = clusters_[id];
      cost += Cost(c.rep, c.row_sums[c.rep]) + options_.lambda;
    }
    return cost;
  }

  // Moves every string to the cluster whose representative is closest
  // (staying put on ties), then re-picks representatives. Under LSH a
  // string may only move to a cluster it shares a bucket with. Keeps the
  // result and returns true only when the description length drops.
  bool Reassign() {
    std::vector<size_t> alive;
    for (size_t id = 0; id < clusters_.size(); ++id) {
      if (clusters_[id].alive) alive.push_back(id);
    }
    if (alive.size() < 2) return false;
    std::vector<std::map<size_t, size_t>> moved(alive.size());
    bool changed = false;
    for (size_t i = 0; i < alive.size(); ++i) {
      for (const auto &[c, n] : clusters_[alive[i]].counts) {
        size_t target = i;
        uint32_t best = Dist(clusters_[alive[i]].rep, c);
        for (size_t j = 0; j < alive.size(); ++j) {
          const State &other = clusters_[alive[j]];
          const uint32_t d = Dist(other.rep, c);
          if (d >= best) continue;
          if (options_.lsh && !SharesBucket(string_buckets_[c], other.buckets)) {
            continue;
          }
          best = d;
          target = j;
        }
        moved[target][c] += n;
        changed = changed || target != i;
      }
    }
    if (!changed) return false;
    std::vector<State> fresh;
    for (const auto &counts : moved) {
      if (counts.empty()) continue;
      State s;
      s.counts.assign(counts.begin(), counts.end());
      for (const auto &[c, n] : s.counts) {
        s.size += n;
        if (options_.lsh) {
          s.buckets.insert(s.buckets.end(), string_buckets_[c].begin(),
                           string_buckets_[c].end());
        }
      }
      std::sort(s.buckets.begin(), s.buckets.end());
      s.buckets.erase(std::unique(s.buckets.begin(), s.buckets.end()),
                      s.buckets.end());
      s.row_sums = RowSums(s.counts);
      s.rep = s.counts.front().first;
      for (const auto &[c, n] : s.counts) {
        if (Better(c, s.row_sums[c], s.rep, s.row_sums[s.rep])) {
          s.rep = c;
        }
      }
      fresh.push_back(std::move(s));
    }
    double after = 0.0;
    for (const State &s : fresh) {
      after += Cost(s.rep, s.row_sums[s.rep]) + options_.lambda;
    }
    if (!(after < TotalCost(alive) - 1e-9)) return false;
    for (size_t id : alive) {
      clusters_[id].alive = false;
      clusters_[id].row_sums.clear();
    }
    for (State &s : fresh) clusters_.push_back(std::move(s));
    return true;
  }

  size_t Merge(size_t a, size_t b) {
    State merged;
    std::map<size_t, size_t> counts;
    for (size_t id : {a, b}) {
      State &s = clusters_[id];
      for (const auto &[c, n] : s.counts) counts[c] += n;
      merged.size += s.size;
      merged.buckets.insert(merged.buckets.end(), s.buckets.begin(),
                            s.buckets.end());
      s.alive = false;
      s.row_sums.clear();
      s.row_sums.shrink_to_fit();
    }
    std::sort(merged.buckets.begin(), merged.buckets.end());
    merged.buckets.erase(
        std::unique(merged.buckets.begin(), merged.buckets.end()),
        merged.buckets.end());
    merged.counts.assign(counts.begin(), counts.end());
    merged.row_sums = RowSums(merged.counts);
    merged.rep = merged.counts.front().first;
    for (const auto &[c, n] : merged.counts) {
      if (Better(c, merged.row_sums[c], merged.rep,
                 merged.row_sums[merged.rep])) {
        merged.rep = c;
      }
    }
    clusters_.push_back(std::move(merged));
    return clusters_.size() - 1;
  }

  std::vector<SymbolString> strings_;
  ClusterOptions options_;
  std::vector<uint32_t> dist_;
  std::vector<std::vector<uint64_t>> string_buckets_;
  std::vector<State> clusters_;
  std::set<Candidate> queue_;
};

}  // namespace

ClusterPartition ClusterSequences(const std::vector<NamedSequence> &sequences,
                                  const SymbolString &seed_template,
                                  const ClusterOptions &options) {
  if (!(options.alpha > 0.0 && options.alpha <= 1.0)) {
    throw InvalidArgument("alpha must lie in (0, 1]");
  }
  if (!(options.lambda >= 0.0) || !std::isfinite(options.lambda)) {
    throw InvalidArgument("lambda must be >= 0");
  }
  std::vector<std::string> missing;
  std::set<std::string> seen;
  for (const auto &[id, symbols] : sequences) {
    if (!seen.insert(id).second) {
      throw InvalidArgument("duplicate video_id '" + id + "'");
    }
    if (!IsSubsequence(seed_template, symbols)) missing.push_back(id);
  }
  if (!missing.empty()) {
    std::string message = "sequences lacking seed template '" +
                          seed_template + "':";
    for (const std::string &id : missing) message += " " + id;
    throw InvalidArgument(message);
  }

  ClusterPartition partition;
  partition.alpha = options.alpha;
  partition.lambda = options.lambda;
  if (sequences.empty()) return partition;

  std::vector<SymbolString> distinct;
  for (const auto &[id, symbols] : sequences) distinct.push_back(symbols);
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()),
                 distinct.end());
  std::vector<size_t> input_index;
  for (const auto &[id, symbols] : sequences) {
    input_index.push_back(static_cast<size_t>(
        std::lower_bound(distinct.begin(), distinct.end(), symbols) -
        distinct.begin()));
  }

  GreedyMerger merger(distinct, input_index, options);
  auto groups = merger.Run();

  // Compare against the single-cluster partition.
  std::map<size_t, size_t> all_counts;
  for (size_t idx : input_index) ++all_counts[idx];
  std::vector<std::pair<size_t, size_t>> all(all_counts.begin(),
                                             all_counts.end());
  auto [all_rep, all_sum] = merger.Representative(all);
  double greedy_cost = 0.0;
  {
    size_t length = 0;
    uint64_t edits = 0;
    for (const auto &[rep, counts] : groups) {
      length += distinct[rep].size();
      for (const auto &[c, n] : counts) edits += n * merger.Dist(rep, c);
    }
    greedy_cost = static_cast<double>(length) +
                  options.alpha * static_cast<double>(edits) +
                  options.lambda * static_cast<double>(groups.size());
  }
  double single_cost = static_cast<double>(distinct[all_rep].size()) +
                       options.alpha * static_cast<double>(all_sum) +
                       options.lambda;
  if (single_cost < greedy_cost) {
    groups.assign(1, {all_rep, all});
  }

  // Materialize clusters with per-member scripts. Identical strings may sit
  // in different clusters, so members are dealt out by remaining
  // multiplicity in group order.
  std::vector<std::map<size_t, size_t>> remaining(groups.size());
  for (size_t g = 0; g < groups.size(); ++g) {
    for (const auto &[c, n] : groups[g].second) remaining[g][c] = n;
  }
  partition.clusters.resize(groups.size());
  for (size_t g = 0; g < groups.size(); ++g) {
    partition.clusters[g].representative = distinct[groups[g].first];
    partition.clusters[g].seed_template = seed_template;
  }
  std::vector<NamedSequence> ordered = sequences;
  std::sort(ordered.begin(), ordered.end());
  for (const auto &[id, symbols] : ordered) {
    size_t idx = static_cast<size_t>(
        std::lower_bound(distinct.begin(), distinct.end(), symbols) -
        distinct.begin());
    size_t g = 0;
    while (remaining[g][idx] == 0) ++g;
    --remaining[g][idx];
    Cluster &cluster = partition.clusters[g];
    cluster.members.push_back(
        {id, EditDistance(cluster.representative, symbols).script});
  }
  std::sort(partition.clusters.begin(), partition.clusters.end(),
            [](const Cluster &a, const Cluster &b) {
              return std::tie(a.representative, a.members.front().video_id) <
                     std::tie(b.representative, b.members.front().video_id);
            });
  partition.total_dl = DescriptionLength(partition);
  return partition;
}

ClusterPartition ClusterTemplate(const Dataset &dataset,
                                 const std::vector<std::string> &video_ids,
                                 const SymbolString &seed_template,
                                 const ClusterOptions &options) {
  std::vector<NamedSequence> sequences;
  sequences.reserve(video_ids.size());
  for (const std::string &id : video_ids) {
    sequences.emplace_back(id, dataset.Symbols(id));
  }
  return ClusterSequences(sequences, seed_template, options);
}

}  // namespace seqlab
