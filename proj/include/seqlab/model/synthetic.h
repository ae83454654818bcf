#ifndef SEQLAB_MODEL_SYNTHETIC_H_
#define SEQLAB_MODEL_SYNTHETIC_H_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "seqlab/core/dataset.h"

namespace seqlab {

// Generative model: every sequence is one of its class's planted patterns
// with uniformly drawn noise events inserted at uniform positions, so that
// about noise_rate of all events are noise. Embeddings are the class
// centroid plus isotropic Gaussian noise.
struct SyntheticConfig {
  size_t num_sequences = 1000;
  // One or more planted patterns per class; class i is named "c<i+1>".
  std::vector<std::vector<std::string>> class_patterns;
  std::string alphabet = "ABCDEFGH";
  double noise_rate = 0.2;
  size_t embedding_dim = 8;
  double centroid_scale = 1.0;
  double embedding_noise = 1.0;
  // Videos per class whose labels are included as seed labels.
  size_t seed_labels_per_class = 0;
  uint64_t seed = 1;
};

// Four classes over "ABCDEFGH" whose patterns differ in symbol order.
std::vector<std::vector<std::string>> DefaultClassPatterns();

struct SyntheticData {
  Dataset dataset;
  // Ground truth for every video.
  std::map<std::string, std::string> oracle;
  // The planted pattern each video was generated from.
  std::map<std::string, std::string> planted;
};

// Throws InvalidArgument for degenerate parameters: no classes, an empty
// pattern, symbols outside the alphabet, noise_rate outside [0, 1) or
// num_sequences == 0.
SyntheticData GenerateSynthetic(const SyntheticConfig &config);

}  // namespace seqlab

#endif  // SEQLAB_MODEL_SYNTHETIC_H_
