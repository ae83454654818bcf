#ifndef SEQLAB_MINDL_LSH_H_
#define SEQLAB_MINDL_LSH_H_

#include <cstdint>
#include <map>
#include <vector>

#include "seqlab/core/dataset.h"

namespace seqlab {

// MinHash banding over symbol n-gram shingles. A sequence shorter than the
// shingle size contributes its whole string as a single shingle.
struct LshParams {
  size_t shingle_size = 2;
  size_t bands = 8;
  size_t rows_per_band = 2;
  uint64_t seed = 0x5eed;
};

// Bucket key -> indices of the sequences hashed into it. Each sequence lands
// in exactly one bucket per band.
using LshBuckets = std::map<uint64_t, std::vector<size_t>>;

LshBuckets ComputeLshBuckets(const std::vector<SymbolString> &sequences,
                             const LshParams &params);

// Bucket keys of each sequence, sorted ascending.
std::vector<std::vector<uint64_t>> BucketsPerSequence(
    const LshBuckets &buckets, size_t num_sequences);

}  // namespace seqlab

#endif  // SEQLAB_MINDL_LSH_H_
