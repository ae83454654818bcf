#include "seqlab/labels/label_store.h"

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <chrono>
#include <cstring>
#include <fstream>

#include "json.hpp"
#include "seqlab/core/error.h"

namespace seqlab {

using json = nlohmann::json;

namespace {

int64_t SystemClockMs() {
  return std::chrono::duration_cast<std::chrono::milliseconds>(
             std::chrono::system_clock::now().time_since_epoch())
      .count();
}

}  // namespace

std::string ToString(LabelSourceKind kind) {
  switch (kind) {
    case LabelSourceKind::kSeed:
      return "seed";
    case LabelSourceKind::kTemplate:
      return "template";
    case LabelSourceKind::kManual:
      return "manual";
  }
  return "manual";
}

LabelSourceKind ParseLabelSourceKind(const std::string &name) {
  if (name == "seed") return LabelSourceKind::kSeed;
  if (name == "template") return LabelSourceKind::kTemplate;
  if (name == "manual") return LabelSourceKind::kManual;
  throw InvalidArgument("unknown label source '" + name + "'");
}

bool LabelState::IsNewlyLabeled(const std::string &id) const {
  auto it = current_source.find(id);
  return it != current_source.end() &&
         it->second.kind != LabelSourceKind::kSeed;
}

void FoldEvent(LabelState &state, const LabelEvent &event) {
  const std::string &id = event.video_id;
  auto it = state.current.find(id);
  if (event.resolution) {
    state.conflicts.erase(id);
  } else if (it != state.current.end() && it->second != event.class_id) {
    state.conflicts.insert(id);
  }
  state.current[id] = event.class_id;
  state.current_source[id] = event.source;
  state.current_iteration[id] = event.iteration;
}

LabelStore::LabelStore(const Dataset &dataset, Clock clock)
    : LabelStore(dataset, std::move(clock), true) {}

LabelStore::LabelStore(const Dataset &dataset, Clock clock, bool seed)
    : clock_(clock ? std::move(clock) : Clock(SystemClockMs)) {
  for (const EventSequence &s : dataset.sequences()) ids_.insert(s.video_id);
  for (const ClassInfo &c : dataset.classes()) classes_.insert(c.id);
  if (!seed) return;
  for (const auto &[id, cls] : dataset.seed_labels()) {
    LabelEvent e;
    e.video_id = id;
    e.class_id = cls;
    e.source = LabelSource::Seed();
    e.iteration = 0;
    e.timestamp_ms = clock_();
    e.actor = "seed";
    Append(std::move(e));
  }
  iteration_ = 1;
}

LabelStore LabelStore::Replay(const Dataset &dataset,
                              const std::vector<LabelEvent> &events,
                              Clock clock) {
  LabelStore store(dataset, std::move(clock), false);
  store.iteration_ = 1;
  std::vector<Issue> issues;
  for (const LabelEvent &e : events) {
    try {
      if (e.sequence != store.log_.size()) {
        throw InvalidArgument("log sequence " + std::to_string(e.sequence) +
                              " out of order");
      }
      store.Validate(e);
    } catch (const InvalidArgument &err) {
      issues.push_back({"", static_cast<int>(e.sequence) + 1, e.video_id,
                        err.what()});
      continue;
    }
    store.iteration_ = std::max(store.iteration_, e.iteration);
    store.Append(e);
  }
  if (!issues.empty()) throw ValidationError(std::move(issues));
  return store;
}

void LabelStore::Validate(const LabelEvent &e) const {
  if (!ids_.count(e.video_id)) {
    throw InvalidArgument("unknown video_id '" + e.video_id + "'");
  }
  if (!classes_.count(e.class_id)) {
    throw InvalidArgument("unknown class '" + e.class_id + "'");
  }
  if (e.source.kind == LabelSourceKind::kSeed && e.iteration != 0) {
    throw InvalidArgument("seed labels are only allowed at iteration 0");
  }
  if (e.iteration < 0) throw InvalidArgument("negative iteration");
  if (!log_.empty() && e.iteration < log_.back().iteration) {
    throw InvalidArgument("iteration " + std::to_string(e.iteration) +
                          " precedes logged iteration " +
                          std::to_string(log_.back().iteration));
  }
}

void LabelStore::Append(LabelEvent event) {
  event.sequence = log_.size();
  FoldEvent(state_, event);
  log_.push_back(std::move(event));
}

ApplyResult LabelStore::ApplyLabels(const std::vector<std::string> &ids,
                                    const std::string &class_id,
                                    const LabelSource &source,
                                    std::optional<int> iteration,
                                    const std::string &actor) {
  int iter = iteration.value_or(iteration_);
  if (iter < iteration_) {
    throw InvalidArgument("iteration " + std::to_string(iter) +
                          " is before the current iteration " +
                          std::to_string(iteration_));
  }
  // Validate the whole batch before appending anything.
  std::vector<LabelEvent> batch;
  batch.reserve(ids.size());
  int64_t now = ids.empty() ? 0 : clock_();
  for (const std::string &id : ids) {
    LabelEvent e;
    e.video_id = id;
    e.class_id = class_id;
    e.source = source;
    e.iteration = iter;
    e.timestamp_ms = now;
    e.actor = actor;
    Validate(e);
    batch.push_back(std::move(e));
  }

  ApplyResult result;
  if (batch.empty()) return result;
  iteration_ = iter;
  size_t first = log_.size();
  for (LabelEvent &e : batch) {
    auto it = state_.current.find(e.video_id);
    if (it != state_.current.end() && it->second != e.class_id) {
      result.conflicts_raised.push_back(e.video_id);
    }
    Append(std::move(e));
    ++result.applied;
  }
  Flush(first);
  return result;
}

const LabelState &LabelStore::ResolveConflict(const std::string &video_id,
                                              const std::string &class_id,
                                              const std::string &actor) {
  if (!state_.conflicts.count(video_id)) {
    throw StateError("video '" + video_id + "' is not in conflict");
  }
  LabelEvent e;
  e.video_id = video_id;
  e.class_id = class_id;
  e.source = LabelSource::Manual();
  e.iteration = iteration_;
  e.timestamp_ms = clock_();
  e.actor = actor;
  e.resolution = true;
  Validate(e);
  size_t first = log_.size();
  Append(std::move(e));
  Flush(first);
  return state_;
}

LabelState LabelStore::Snapshot(std::optional<int> iteration) const {
  if (!iteration) return state_;
  if (*iteration > iteration_) {
    throw StateError("iteration " + std::to_string(*iteration) +
                     " is in the future (current " +
                     std::to_string(iteration_) + ")");
  }
  LabelState state;
  for (const LabelEvent &e : log_) {
    if (e.iteration > *iteration) break;
    FoldEvent(state, e);
  }
  return state;
}

void LabelStore::BeginIteration(int iteration) {
  if (iteration < iteration_) {
    throw InvalidArgument("iteration may not decrease");
  }
  iteration_ = iteration;
}

std::vector<LabelEvent> LabelStore::History(const std::string &video_id) const {
  std::vector<LabelEvent> out;
  for (const LabelEvent &e : log_) {
    if (e.video_id == video_id) out.push_back(e);
  }
  return out;
}

size_t LabelStore::CountNewSince(uint64_t sequence) const {
  size_t n = 0;
  for (size_t i = sequence; i < log_.size(); ++i) {
    if (log_[i].source.kind != LabelSourceKind::kSeed) ++n;
  }
  return n;
}

void LabelStore::AttachLog(const std::filesystem::path &path,
                           bool write_existing) {
  log_path_ = path;
  if (write_existing) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw Error("cannot write label log " + path.string());
    out.close();
    Flush(0);
  }
}

void LabelStore::Flush(size_t first) {
  if (!log_path_ || first >= log_.size()) return;
  std::string buffer;
  for (size_t i = first; i < log_.size(); ++i) {
    buffer += EventToJson(log_[i]);
    buffer += '\n';
  }
  int fd = ::open(log_path_->c_str(), O_WRONLY | O_CREAT | O_APPEND, 0644);
  if (fd < 0) {
    throw Error("cannot open label log " + log_path_->string() + ": " +
                std::strerror(errno));
  }
  const char *p = buffer.data();
  size_t left = buffer.size();
  while (left > 0) {
    ssize_t n = ::write(fd, p, left);
    if (n < 0) {
      if (errno == EINTR) continue;
      ::close(fd);
      throw Error("write to label log failed: " +
                  std::string(std::strerror(errno)));
    }
    p += n;
    left -= static_cast<size_t>(n);
  }
  ::fsync(fd);
  ::close(fd);
}

std::string EventToJson(const LabelEvent &e) {
  json r;
  r["seq"] = e.sequence;
  r["video_id"] = e.video_id;
  r["class"] = e.class_id;
  r["source"] = ToString(e.source.kind);
  if (e.source.kind == LabelSourceKind::kTemplate) {
    r["template"] = e.source.template_symbols;
  }
  r["iteration"] = e.iteration;
  r["timestamp_ms"] = e.timestamp_ms;
  r["actor"] = e.actor;
  if (e.resolution) r["resolution"] = true;
  return r.dump();
}

LabelEvent EventFromJson(const std::string &line) {
  try {
    json r = json::parse(line);
    LabelEvent e;
    e.sequence = r.at("seq").get<uint64_t>();
    e.video_id = r.at("video_id").get<std::string>();
    e.class_id = r.at("class").get<std::string>();
    e.source.kind = ParseLabelSourceKind(r.at("source").get<std::string>());
    if (e.source.kind == LabelSourceKind::kTemplate) {
      e.source.template_symbols = r.value("template", "");
    }
    e.iteration = r.at("iteration").get<int>();
    e.timestamp_ms = r.value("timestamp_ms", int64_t{0});
    e.actor = r.value("actor", "");
    e.resolution = r.value("resolution", false);
    return e;
  } catch (const json::exception &err) {
    throw InvalidArgument(std::string("bad label log record: ") + err.what());
  }
}

std::vector<LabelEvent> ReadLog(std::istream &in) {
  std::vector<LabelEvent> events;
  std::vector<Issue> issues;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      events.push_back(EventFromJson(line));
    } catch (const InvalidArgument &err) {
      issues.push_back({"label log", line_no, "", err.what()});
    }
  }
  if (!issues.empty()) throw ValidationError(std::move(issues));
  return events;
}

std::vector<LabelEvent> ReadLogFile(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open label log " + path.string());
  return ReadLog(in);
}

void WriteLog(std::ostream &out, const std::vector<LabelEvent> &events) {
  for (const LabelEvent &e : events) out << EventToJson(e) << "\n";
}

void WriteCurrentView(std::ostream &out, const LabelState &state) {
  for (const auto &[id, cls] : state.current) {
    const LabelSource &source = state.current_source.at(id);
    json r{{"video_id", id},
           {"class", cls},
           {"source", ToString(source.kind)},
           {"iteration", state.current_iteration.at(id)}};
    if (source.kind == LabelSourceKind::kTemplate) {
      r["template"] = source.template_symbols;
    }
    out << r.dump() << "\n";
  }
}

}  // namespace seqlab
