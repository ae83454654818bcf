#include "seqlab/mindl/lsh.h"

#include <algorithm>
#include <limits>
#include <set>
#include <string_view>

#include "seqlab/core/error.h"

namespace seqlab {

namespace {

uint64_t SplitMix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

uint64_t HashShingle(std::string_view s) {
  // FNV-1a, then mixed.
  uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return SplitMix64(h);
}

}  // namespace

LshBuckets ComputeLshBuckets(const std::vector<SymbolString> &sequences,
                             const LshParams &params) {
  if (params.shingle_size == 0 || params.bands == 0 ||
      params.rows_per_band == 0) {
    throw InvalidArgument("LSH parameters must be positive");
  }
  const size_t num_hashes = params.bands * params.rows_per_band;
  std::vector<uint64_t> salts(num_hashes);
  for (size_t h = 0; h < num_hashes; ++h) {
    salts[h] = SplitMix64(params.seed + 0x1000 * (h + 1));
  }

  LshBuckets buckets;
  for (size_t idx = 0; idx < sequences.size(); ++idx) {
    const SymbolString &s = sequences[idx];
    std::set<uint64_t> shingles;
    if (s.size() < params.shingle_size) {
      shingles.insert(HashShingle(s));
    } else {
      for (size_t p = 0; p + params.shingle_size <= s.size(); ++p) {
        shingles.insert(
            HashShingle(std::string_view(s).substr(p, params.shingle_size)));
      }
    }
    std::vector<uint64_t> signature(num_hashes,
                                    std::numeric_limits<uint64_t>::max());
    for (uint64_t sh : shingles) {
      for (size_t h = 0; h < num_hashes; ++h) {
        signature[h] = std::min(signature[h], SplitMix64(sh ^ salts[h]));
      }
    }
    for (size_t b = 0; b < params.bands; ++b) {
      uint64_t key = SplitMix64(b + 1);
      for (size_t r = 0; r < params.rows_per_band; ++r) {
        key = SplitMix64(key ^ signature[b * params.rows_per_band + r]);
      }
      buckets[key].push_back(idx);
    }
  }
  return buckets;
}

std::vector<std::vector<uint64_t>> BucketsPerSequence(
    const LshBuckets &buckets, size_t num_sequences) {
  std::vector<std::vector<uint64_t>> out(num_sequences);
  for (const auto &[key, members] : buckets) {
    for (size_t idx : members) out[idx].push_back(key);
  }
  for (auto &keys : out) {
    std::sort(keys.begin(), keys.end());
    keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
  }
  return out;
}

}  // namespace seqlab
