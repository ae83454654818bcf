#ifndef SEQLAB_LABELS_LABEL_STORE_H_
#define SEQLAB_LABELS_LABEL_STORE_H_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "seqlab/core/dataset.h"

namespace seqlab {

enum class LabelSourceKind { kSeed, kTemplate, kManual };

struct LabelSource {
  LabelSourceKind kind = LabelSourceKind::kManual;
  // Template symbols for kTemplate, empty otherwise.
  std::string template_symbols;

  static LabelSource Seed() { return {LabelSourceKind::kSeed, ""}; }
  static LabelSource Manual() { return {LabelSourceKind::kManual, ""}; }
  static LabelSource Template(std::string symbols) {
    return {LabelSourceKind::kTemplate, std::move(symbols)};
  }

  bool operator==(const LabelSource &) const = default;
};

std::string ToString(LabelSourceKind kind);
// Throws InvalidArgument for anything but seed, template or manual.
LabelSourceKind ParseLabelSourceKind(const std::string &name);

struct LabelEvent {
  uint64_t sequence = 0;  // position in the log, starting at 0
  std::string video_id;
  std::string class_id;
  LabelSource source;
  int iteration = 0;
  int64_t timestamp_ms = 0;
  std::string actor;
  // Set on events appended by ResolveConflict.
  bool resolution = false;

  bool operator==(const LabelEvent &) const = default;
};

// The view derived from a log prefix.
struct LabelState {
  // Latest-wins class per labeled video.
  std::map<std::string, std::string> current;
  // Source of the event that produced the current class.
  std::map<std::string, LabelSource> current_source;
  // Iteration of the event that produced the current class.
  std::map<std::string, int> current_iteration;
  // Videos with two or more distinct classes in the log and no resolution
  // since the last disagreement.
  std::set<std::string> conflicts;

  bool IsLabeled(const std::string &id) const { return current.count(id); }
  // True when the current label came from programming rather than seeding.
  bool IsNewlyLabeled(const std::string &id) const;

  bool operator==(const LabelState &) const = default;
};

struct ApplyResult {
  size_t applied = 0;
  // Ids whose new class disagreed with their previous class.
  std::vector<std::string> conflicts_raised;
};

// Append-only labeling ledger. The current view and the conflict set are a
// pure fold over the event log, so replaying the log into an empty store
// reproduces the live state exactly.
//
// Not thread-safe: callers serialize writers (see service::Session).
class LabelStore {
 public:
  using Clock = std::function<int64_t()>;

  // Creates a store for the dataset's ids and classes and appends the
  // dataset's seed labels at iteration 0. Labeling then starts at
  // iteration 1.
  explicit LabelStore(const Dataset &dataset, Clock clock = {});

  // Rebuilds a store from an existing log. Throws ValidationError when an
  // event references unknown ids or classes or breaks iteration order.
  static LabelStore Replay(const Dataset &dataset,
                           const std::vector<LabelEvent> &events,
                           Clock clock = {});

  // Appends one event per id. iteration defaults to the current iteration
  // and may not go backwards. Seed events are only accepted at iteration 0.
  ApplyResult ApplyLabels(const std::vector<std::string> &ids,
                          const std::string &class_id,
                          const LabelSource &source,
                          std::optional<int> iteration = std::nullopt,
                          const std::string &actor = "user");

  // Appends a resolution event for a conflicted video. Throws StateError if
  // the id is not in the conflict set.
  const LabelState &ResolveConflict(const std::string &video_id,
                                    const std::string &class_id,
                                    const std::string &actor);

  // State as of the end of the given iteration (or the live state). Throws
  // StateError for a future iteration.
  LabelState Snapshot(std::optional<int> iteration = std::nullopt) const;

  // Moves the store to a new iteration; later labels are tagged with it.
  void BeginIteration(int iteration);

  const LabelState &state() const { return state_; }
  const std::vector<LabelEvent> &log() const { return log_; }
  int iteration() const { return iteration_; }

  // Events recorded for one video, oldest first.
  std::vector<LabelEvent> History(const std::string &video_id) const;

  // Number of non-seed events appended after the given log position.
  size_t CountNewSince(uint64_t sequence) const;

  // Attaches a log file; every later batch is appended and fsynced. When
  // write_existing is set the current log is written first.
  void AttachLog(const std::filesystem::path &path, bool write_existing);

 private:
  LabelStore(const Dataset &dataset, Clock clock, bool seed);

  void Append(LabelEvent event);
  void Flush(size_t first);
  void Validate(const LabelEvent &event) const;

  std::set<std::string> ids_;
  std::set<std::string> classes_;
  Clock clock_;
  std::vector<LabelEvent> log_;
  LabelState state_;
  int iteration_ = 0;
  std::optional<std::filesystem::path> log_path_;
};

// Folds one event into a state. Exposed so the replay property can be
// checked against an independent loop.
void FoldEvent(LabelState &state, const LabelEvent &event);

// Log records, one JSON object per line.
std::string EventToJson(const LabelEvent &event);
LabelEvent EventFromJson(const std::string &line);
std::vector<LabelEvent> ReadLog(std::istream &in);
std::vector<LabelEvent> ReadLogFile(const std::filesystem::path &path);
void WriteLog(std::ostream &out, const std::vector<LabelEvent> &events);

// Current view in the labels file format with the source field widened to
// seed, template or manual.
void WriteCurrentView(std::ostream &out, const LabelState &state);

}  // namespace seqlab

#endif  // SEQLAB_LABELS_LABEL_STORE_H_
