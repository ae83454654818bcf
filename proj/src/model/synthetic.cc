#include "seqlab/model/synthetic.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>

#include "seqlab/core/error.h"

namespace seqlab {

std::vector<std::vector<std::string>> DefaultClassPatterns() {
  return {{"ABCD"}, {"DCBA"}, {"BADC"}, {"CDAB"}};
}

namespace {

const char *kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                          "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};

std::string VideoId(size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "v%05zu", i);
  return buf;
}

}  // namespace

SyntheticData GenerateSynthetic(const SyntheticConfig &config) {
  if (config.class_patterns.empty()) {
    throw InvalidArgument("synthetic data needs at least one class");
  }
  if (config.num_sequences == 0) {
    throw InvalidArgument("num_sequences must be positive");
  }
  if (!(config.noise_rate >= 0.0 && config.noise_rate < 1.0)) {
    throw InvalidArgument("noise_rate must lie in [0, 1)");
  }
  if (config.alphabet.empty()) throw InvalidArgument("empty alphabet");
  for (const auto &patterns : config.class_patterns) {
    if (patterns.empty()) throw InvalidArgument("class without patterns");
    for (const std::string &p : patterns) {
      if (p.empty()) throw InvalidArgument("empty planted pattern");
      for (char c : p) {
        if (config.alphabet.find(c) == std::string::npos) {
          throw InvalidArgument(std::string("pattern symbol '") + c +
                                "' not in alphabet");
        }
      }
    }
  }

  std::mt19937_64 rng(config.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const size_t k = config.class_patterns.size();

  EventRegistry registry;
  for (char c : config.alphabet) {
    registry.Add({c, std::string("event ") + c, ""});
  }
  std::vector<ClassInfo> classes;
  for (size_t c = 0; c < k; ++c) {
    std::string id = "c" + std::to_string(c + 1);
    classes.push_back({id, "class " + std::to_string(c + 1),
                       kPalette[c % (sizeof(kPalette) / sizeof(*kPalette))]});
  }
  std::vector<std::vector<double>> centroids(
      k, std::vector<double>(config.embedding_dim));
  for (auto &centroid : centroids) {
    for (double &x : centroid) x = config.centroid_scale * gauss(rng);
  }

  SyntheticData out;
  std::vector<EventSequence> sequences;
  std::map<std::string, std::vector<double>> embeddings;
  std::vector<std::vector<std::string>> ids_by_class(k);
  for (size_t i = 0; i < config.num_sequences; ++i) {
    const size_t cls = i % k;
    const auto &patterns = config.class_patterns[cls];
    const std::string &pattern =
        patterns[std::uniform_int_distribution<size_t>(
            0, patterns.size() - 1)(rng)];

    // Noise count with expectation len * r / (1 - r).
    const double expected = static_cast<double>(pattern.size()) *
                            config.noise_rate / (1.0 - config.noise_rate);
    size_t noise = static_cast<size_t>(std::floor(expected));
    if (unit(rng) < expected - std::floor(expected)) ++noise;

    std::string symbols = pattern;
    for (size_t n = 0; n < noise; ++n) {
      char c = config.alphabet[std::uniform_int_distribution<size_t>(
          0, config.alphabet.size() - 1)(rng)];
      size_t pos =
          std::uniform_int_distribution<size_t>(0, symbols.size())(rng);
      symbols.insert(symbols.begin() + static_cast<std::ptrdiff_t>(pos), c);
    }

    EventSequence seq;
    seq.video_id = VideoId(i);
    seq.duration = static_cast<double>(symbols.size()) + 1.0;
    for (size_t p = 0; p < symbols.size(); ++p) {
      double t = static_cast<double>(p);
      seq.events.push_back({symbols[p], t, t + 0.5});
    }

    if (config.embedding_dim > 0) {
      std::vector<double> emb(config.embedding_dim);
      for (size_t j = 0; j < emb.size(); ++j) {
        emb[j] = centroids[cls][j] + config.embedding_noise * gauss(rng);
      }
      embeddings.emplace(seq.video_id, std::move(emb));
    }
    out.oracle[seq.video_id] = classes[cls].id;
    out.planted[seq.video_id] = pattern;
    ids_by_class[cls].push_back(seq.video_id);
    sequences.push_back(std::move(seq));
  }

  std::map<std::string, std::string> seeds;
  for (size_t c = 0; c < k; ++c) {
    std::vector<std::string> pool = ids_by_class[c];
    std::shuffle(pool.begin(), pool.end(), rng);
    for (size_t s = 0; s < config.seed_labels_per_class && s < pool.size();
         ++s) {
      seeds[pool[s]] = classes[c].id;
    }
  }

  out.dataset = Dataset::Create(std::move(registry), std::move(sequences),
                                std::move(classes), std::move(embeddings),
                                std::move(seeds));
  return out;
}

}  // namespace seqlab
