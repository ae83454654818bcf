#ifndef SEQLAB_CORE_DATASET_H_
#define SEQLAB_CORE_DATASET_H_

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace seqlab {

// Ordered event-type codes of one video with timestamps dropped. One char
// per event.
using SymbolString = std::string;

// One entry of the event-code registry.
struct EventType {
  char code = 0;
  std::string name;
  std::string description;

  bool operator==(const EventType &) const = default;
};

// The set of known event codes. Codes are single printable ASCII characters
// and unique within a registry.
class EventRegistry {
 public:
  EventRegistry() = default;

  // Adds an event type. Throws InvalidArgument on a duplicate or
  // non-printable code.
  void Add(EventType type);

  bool Contains(char code) const;
  const EventType &Get(char code) const;

  // Codes in ascending order. This is the canonical alphabet order used by
  // featurization and synthetic generation.
  std::string Alphabet() const;

  const std::map<char, EventType> &types() const { return types_; }
  size_t size() const { return types_.size(); }

  bool operator==(const EventRegistry &) const = default;

 private:
  std::map<char, EventType> types_;
};

struct EventInstance {
  char type = 0;
  double t_start = 0.0;
  double t_end = 0.0;

  bool operator==(const EventInstance &) const = default;
};

// Canonical ordering of events inside a sequence: by start time, then end
// time, then code.
bool EventBefore(const EventInstance &a, const EventInstance &b);

struct EventSequence {
  std::string video_id;
  double duration = 0.0;
  std::vector<EventInstance> events;
  std::optional<std::string> thumbnail;

  bool operator==(const EventSequence &) const = default;
};

SymbolString ToSymbolString(const EventSequence &seq);

struct ClassInfo {
  std::string id;
  std::string display_name;
  std::string color;

  bool operator==(const ClassInfo &) const = default;
};

// An immutable, validated collection of event sequences plus optional
// embeddings and seed labels. Sequences are kept sorted by video id, so
// iteration order never depends on ingestion order.
class Dataset {
 public:
  Dataset() = default;

  // Validates and assembles a dataset. Throws ValidationError listing every
  // violated invariant.
  static Dataset Create(EventRegistry registry,
                        std::vector<EventSequence> sequences,
                        std::vector<ClassInfo> classes,
                        std::map<std::string, std::vector<double>> embeddings,
                        std::map<std::string, std::string> seed_labels);

  const EventRegistry &registry() const { return registry_; }
  const std::vector<EventSequence> &sequences() const { return sequences_; }
  const std::vector<ClassInfo> &classes() const { return classes_; }
  const std::map<std::string, std::vector<double>> &embeddings() const {
    return embeddings_;
  }
  const std::map<std::string, std::string> &seed_labels() const {
    return seed_labels_;
  }

  size_t size() const { return sequences_.size(); }
  bool empty() const { return sequences_.empty(); }

  // Embedding dimension, 0 when the dataset carries no embeddings.
  size_t embedding_dim() const { return embedding_dim_; }
  // True when every sequence has an embedding.
  bool fully_embedded() const;

  bool Contains(std::string_view video_id) const;
  // Throws InvalidArgument for an unknown id.
  const EventSequence &Get(std::string_view video_id) const;
  const SymbolString &Symbols(std::string_view video_id) const;
  const std::vector<double> *Embedding(std::string_view video_id) const;

  bool HasClass(std::string_view class_id) const;
  // Position of the class in classes(), or -1.
  int ClassIndex(std::string_view class_id) const;

  std::vector<std::string> VideoIds() const;

  bool operator==(const Dataset &other) const;

 private:
  size_t IndexOf(std::string_view video_id) const;

  EventRegistry registry_;
  std::vector<EventSequence> sequences_;
  std::vector<SymbolString> symbols_;
  std::vector<ClassInfo> classes_;
  std::map<std::string, std::vector<double>> embeddings_;
  std::map<std::string, std::string> seed_labels_;
  size_t embedding_dim_ = 0;
};

}  // namespace seqlab

#endif  // SEQLAB_CORE_DATASET_H_
