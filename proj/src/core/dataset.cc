#include "seqlab/core/dataset.h"

#include <algorithm>
#include <cctype>
#include <set>
#include <tuple>

#include "seqlab/core/error.h"

namespace seqlab {

void EventRegistry::Add(EventType type) {
  if (!std::isprint(static_cast<unsigned char>(type.code)) ||
      type.code == ' ') {
    throw InvalidArgument("event code must be a single printable symbol");
  }
  if (types_.count(type.code)) {
    throw InvalidArgument(std::string("duplicate event code '") + type.code +
                          "'");
  }
  types_.emplace(type.code, std::move(type));
}

bool EventRegistry::Contains(char code) const { return types_.count(code); }

const EventType &EventRegistry::Get(char code) const {
  auto it = types_.find(code);
  if (it == types_.end()) {
    throw InvalidArgument(std::string("unknown event code '") + code + "'");
  }
  return it->second;
}

std::string EventRegistry::Alphabet() const {
  std::string alphabet;
  for (const auto &[code, type] : types_) alphabet.push_back(code);
  return alphabet;
}

bool EventBefore(const EventInstance &a, const EventInstance &b) {
  return std::tie(a.t_start, a.t_end, a.type) <
         std::tie(b.t_start, b.t_end, b.type);
}

SymbolString ToSymbolString(const EventSequence &seq) {
  SymbolString symbols;
  symbols.reserve(seq.events.size());
  for (const EventInstance &e : seq.events) symbols.push_back(e.type);
  return symbols;
}

Dataset Dataset::Create(EventRegistry registry,
                        std::vector<EventSequence> sequences,
                        std::vector<ClassInfo> classes,
                        std::map<std::string, std::vector<double>> embeddings,
                        std::map<std::string, std::string> seed_labels) {
  std::vector<Issue> issues;
  auto report = [&issues](const std::string &record, std::string message) {
    issues.push_back(Issue{"", 0, record, std::move(message)});
  };

  std::set<std::string> class_ids;
  for (const ClassInfo &c : classes) {
    if (c.id.empty()) report("", "empty class id");
    if (!class_ids.insert(c.id).second) {
      report(c.id, "duplicate class id");
    }
  }

  std::set<std::string> ids;
  for (EventSequence &seq : sequences) {
    if (seq.video_id.empty()) report("", "empty video_id");
    if (!ids.insert(seq.video_id).second) {
      report(seq.video_id, "duplicate video_id");
    }
    if (!(seq.duration > 0.0)) report(seq.video_id, "duration must be > 0");
    std::string unknown;
    for (const EventInstance &e : seq.events) {
      if (!registry.Contains(e.type) &&
          unknown.find(e.type) == std::string::npos) {
        unknown.push_back(e.type);
      }
      if (!(e.t_start >= 0.0)) {
        report(seq.video_id, "event t_start must be >= 0");
      }
      if (!(e.t_start <= e.t_end)) {
        report(seq.video_id, "event t_start exceeds t_end");
      }
      if (!(e.t_end <= seq.duration)) {
        report(seq.video_id, "event t_end exceeds video duration");
      }
    }
    for (char code : unknown) {
      report(seq.video_id,
             std::string("unknown event code '") + code + "'");
    }
    std::stable_sort(seq.events.begin(), seq.events.end(), EventBefore);
  }

  size_t dim = 0;
  for (const auto &[id, vec] : embeddings) {
    if (!ids.count(id)) report(id, "embedding for unknown video_id");
    if (vec.empty()) report(id, "empty embedding");
    if (dim == 0) dim = vec.size();
    if (vec.size() != dim) {
      report(id, "embedding dimension " + std::to_string(vec.size()) +
                     " differs from " + std::to_string(dim));
    }
  }

  for (const auto &[id, cls] : seed_labels) {
    if (!ids.count(id)) report(id, "seed label for unknown video_id");
    if (!class_ids.count(cls)) {
      report(id, "seed label uses unknown class '" + cls + "'");
    }
  }

  if (!issues.empty()) throw ValidationError(std::move(issues));

  std::sort(sequences.begin(), sequences.end(),
            [](const EventSequence &a, const EventSequence &b) {
              return a.video_id < b.video_id;
            });

  Dataset d;
  d.registry_ = std::move(registry);
  d.sequences_ = std::move(sequences);
  d.symbols_.reserve(d.sequences_.size());
  for (const EventSequence &seq : d.sequences_) {
    d.symbols_.push_back(ToSymbolString(seq));
  }
  d.classes_ = std::move(classes);
  d.embeddings_ = std::move(embeddings);
  d.seed_labels_ = std::move(seed_labels);
  d.embedding_dim_ = dim;
  return d;
}

bool Dataset::fully_embedded() const {
  return embedding_dim_ > 0 && embeddings_.size() == sequences_.size();
}

size_t Dataset::IndexOf(std::string_view video_id) const {
  auto it = std::lower_bound(
      sequences_.begin(), sequences_.end(), video_id,
      [](const EventSequence &s, std::string_view id) {
        return s.video_id < id;
      });
  if (it == sequences_.end() || it->video_id != video_id) {
    return sequences_.size();
  }
  return static_cast<size_t>(it - sequences_.begin());
}

bool Dataset::Contains(std::string_view video_id) const {
  return IndexOf(video_id) < sequences_.size();
}

const EventSequence &Dataset::Get(std::string_view video_id) const {
  size_t i = IndexOf(video_id);
  if (i == sequences_.size()) {
    throw InvalidArgument("unknown video_id '" + std::string(video_id) + "'");
  }
  return sequences_[i];
}

const SymbolString &Dataset::Symbols(std::string_view video_id) const {
  size_t i = IndexOf(video_id);
  if (i == sequences_.size()) {
    throw InvalidArgument("unknown video_id '" + std::string(video_id) + "'");
  }
  return symbols_[i];
}

const std::vector<double> *Dataset::Embedding(std::string_view video_id) const {
  auto it = embeddings_.find(std::string(video_id));
  return it == embeddings_.end() ? nullptr : &it->second;
}

bool Dataset::HasClass(std::string_view class_id) const {
  return ClassIndex(class_id) >= 0;
}

int Dataset::ClassIndex(std::string_view class_id) const {
  for (size_t i = 0; i < classes_.size(); ++i) {
    if (classes_[i].id == class_id) return static_cast<int>(i);
  }
  return -1;
}

std::vector<std::string> Dataset::VideoIds() const {
  std::vector<std::string> ids;
  ids.reserve(sequences_.size());
  for (const EventSequence &s : sequences_) ids.push_back(s.video_id);
  return ids;
}

bool Dataset::operator==(const Dataset &other) const {
  return registry_ == other.registry_ && sequences_ == other.sequences_ &&
         classes_ == other.classes_ && embeddings_ == other.embeddings_ &&
         seed_labels_ == other.seed_labels_;
}

}  // namespace seqlab
