#include "seqlab/mining/miner.h"

#include <algorithm>
#include <atomic>
#include <thread>

#include "seqlab/core/error.h"

namespace seqlab {

void MiningConstraints::Validate() const {
  if (min_support < 1) throw InvalidArgument("min_support must be >= 1");
  if (min_length < 1) throw InvalidArgument("min_length must be >= 1");
  if (max_length < 1) throw InvalidArgument("max_length must be >= 1");
  if (min_length > max_length) {
    throw InvalidArgument("min_length exceeds max_length");
  }
}

bool PatternBefore(const Pattern &a, const Pattern &b) {
  if (a.symbols.size() != b.symbols.size()) {
    return a.symbols.size() < b.symbols.size();
  }
  return a.symbols < b.symbols;
}

namespace {

// Prefix-projection miner. A projected database holds, for each sequence
// that contains the current prefix, the positions where an embedding of the
// prefix can end. Without a gap limit only the earliest end matters.
class ProjectionMiner {
 public:
  ProjectionMiner(const std::vector<SymbolString> &corpus,
                  const MiningConstraints &constraints)
      : corpus_(corpus), constraints_(constraints) {
    for (const SymbolString &s : corpus) {
      for (char c : s) {
        if (std::find(alphabet_.begin(), alphabet_.end(), c) ==
            alphabet_.end()) {
          alphabet_.push_back(c);
        }
      }
    }
    std::sort(alphabet_.begin(), alphabet_.end());
    for (size_t i = 0; i < alphabet_.size(); ++i) {
      code_[static_cast<unsigned char>(alphabet_[i])] = static_cast<int>(i);
    }
    // next_[s][p * A + c]: first position >= p holding symbol c, or len.
    const size_t a = alphabet_.size();
    next_.resize(corpus.size());
    for (size_t s = 0; s < corpus.size(); ++s) {
      const SymbolString &seq = corpus[s];
      const size_t n = seq.size();
      std::vector<uint32_t> table((n + 1) * a, static_cast<uint32_t>(n));
      for (size_t p = n; p-- > 0;) {
        std::copy(table.begin() + (p + 1) * a, table.begin() + (p + 2) * a,
                  table.begin() + p * a);
        table[p * a + Code(seq[p])] = static_cast<uint32_t>(p);
      }
      next_[s] = std::move(table);
    }
  }

  const std::string &alphabet() const { return alphabet_; }

  // Mines every pattern starting with alphabet()[first].
  std::vector<Pattern> MineBranch(size_t first) const {
    std::vector<Pattern> out;
    Projection proj;
    const char c = alphabet_[first];
    for (size_t s = 0; s < corpus_.size(); ++s) {
      Entry entry{static_cast<uint32_t>(s), {}};
      const SymbolString &seq = corpus_[s];
      for (size_t p = 0; p < seq.size(); ++p) {
        if (seq[p] != c) continue;
        entry.ends.push_back(static_cast<uint32_t>(p));
        if (!constraints_.max_gap) break;
      }
      if (!entry.ends.empty()) proj.push_back(std::move(entry));
    }
    SymbolString prefix(1, c);
    Grow(prefix, proj, out);
    return out;
  }

 private:
  struct Entry {
    uint32_t seq;
    std::vector<uint32_t> ends;
  };
  using Projection = std::vector<Entry>;

  int Code(char c) const { return code_[static_cast<unsigned char>(c)]; }

  void Grow(SymbolString &prefix, const Projection &proj,
            std::vector<Pattern> &out) const {
    if (proj.size() < constraints_.min_support) return;
    if (prefix.size() >= constraints_.min_length) {
      out.push_back({prefix, proj.size()});
    }
    if (prefix.size() >= constraints_.max_length) return;

    const size_t a = alphabet_.size();
    std::vector<Projection> extended(a);
    for (const Entry &entry : proj) {
      const SymbolString &seq = corpus_[entry.seq];
      const std::vector<uint32_t> &table = next_[entry.seq];
      const size_t n = seq.size();
      if (!constraints_.max_gap) {
        size_t start = entry.ends.front() + 1;
        if (start >= n) continue;
        for (size_t c = 0; c < a; ++c) {
          uint32_t q = table[start * a + c];
          if (q < n) extended[c].push_back({entry.seq, {q}});
        }
        continue;
      }
      const size_t gap = *constraints_.max_gap;
      // Collect reachable positions per symbol; ends are ascending, so the
      // windows are visited left to right and a high-water mark dedups.
      std::vector<std::vector<uint32_t>> reach(a);
      size_t covered_until = 0;
      for (uint32_t p : entry.ends) {
        size_t lo = std::max<size_t>(p + 1, covered_until);
        size_t hi = std::min(n, p + 2 + gap);
        for (size_t q = lo; q < hi; ++q) {
          reach[Code(seq[q])].push_back(static_cast<uint32_t>(q));
        }
        covered_until = std::max(covered_until, hi);
      }
      for (size_t c = 0; c < a; ++c) {
        if (!reach[c].empty()) {
          extended[c].push_back({entry.seq, std::move(reach[c])});
        }
      }
    }
    for (size_t c = 0; c < a; ++c) {
      if (extended[c].size() < constraints_.min_support) continue;
      prefix.push_back(alphabet_[c]);
      Grow(prefix, extended[c], out);
      prefix.pop_back();
    }
  }

  const std::vector<SymbolString> &corpus_;
  const MiningConstraints &constraints_;
  std::string alphabet_;
  int code_[256] = {};
  std::vector<std::vector<uint32_t>> next_;
};

}  // namespace

std::vector<Pattern> Mine(const std::vector<SymbolString> &corpus,
                          const MiningConstraints &constraints,
                          unsigned workers) {
  constraints.Validate();
  ProjectionMiner miner(corpus, constraints);
  const size_t branches = miner.alphabet().size();
  std::vector<std::vector<Pattern>> results(branches);

  workers = std::max(1u, std::min<unsigned>(workers, branches));
  if (workers <= 1) {
    for (size_t b = 0; b < branches; ++b) results[b] = miner.MineBranch(b);
  } else {
    std::atomic<size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (size_t b = next++; b < branches; b = next++) {
          results[b] = miner.MineBranch(b);
        }
      });
    }
    for (std::thread &t : pool) t.join();
  }

  std::vector<Pattern> patterns;
  for (auto &r : results) {
    patterns.insert(patterns.end(), std::make_move_iterator(r.begin()),
                    std::make_move_iterator(r.end()));
  }
  std::sort(patterns.begin(), patterns.end(), PatternBefore);
  return patterns;
}

std::vector<Pattern> Mine(const Dataset &dataset,
                          const MiningConstraints &constraints,
                          unsigned workers) {
  if (dataset.empty()) throw InvalidArgument("cannot mine an empty dataset");
  std::vector<SymbolString> corpus;
  corpus.reserve(dataset.size());
  for (const EventSequence &s : dataset.sequences()) {
    corpus.push_back(ToSymbolString(s));
  }
  return Mine(corpus, constraints, workers);
}

size_t Support(const std::vector<SymbolString> &corpus,
               std::string_view pattern, MaxGap max_gap) {
  size_t support = 0;
  for (const SymbolString &s : corpus) {
    if (IsSubsequence(pattern, s, max_gap)) ++support;
  }
  return support;
}

Coverage Covered(const Dataset &dataset, std::string_view pattern,
                 const MiningConstraints &constraints,
                 const LabelState &labels) {
  Coverage coverage;
  if (pattern.empty()) return coverage;
  for (const EventSequence &s : dataset.sequences()) {
    if (!IsSubsequence(pattern, dataset.Symbols(s.video_id),
                       constraints.max_gap)) {
      continue;
    }
    if (labels.IsLabeled(s.video_id)) {
      coverage.labeled.push_back(s.video_id);
    } else {
      coverage.unlabeled.push_back(s.video_id);
    }
  }
  return coverage;
}

Pattern SearchTemplate(std::string_view query, const Dataset &dataset,
                       const MiningConstraints &constraints) {
  if (query.empty()) throw InvalidArgument("empty template query");
  std::string unknown;
  for (char c : query) {
    if (!dataset.registry().Contains(c) &&
        unknown.find(c) == std::string::npos) {
      unknown.push_back(c);
    }
  }
  if (!unknown.empty()) {
    std::string message = "unregistered symbol(s) in query:";
    for (char c : unknown) message += std::string(" '") + c + "'";
    throw InvalidArgument(message);
  }
  Pattern p;
  p.symbols = std::string(query);
  for (const EventSequence &s : dataset.sequences()) {
    if (IsSubsequence(query, dataset.Symbols(s.video_id),
                      constraints.max_gap)) {
      ++p.support;
    }
  }
  return p;
}

}  // namespace seqlab
