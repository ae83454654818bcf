#include "seqlab/core/dataset_io.h"

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "seqlab/core/error.h"

namespace seqlab {

using json = nlohmann::json;

namespace {

std::string Trim(std::string_view s) {
  size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return "";
  size_t e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

bool Blank(const std::string &line) {
  return line.find_first_not_of(" \t\r\n") == std::string::npos;
}

// Reads a newline-delimited JSON file, calling fn(record, line_number) for
// every non-blank line. Parse errors are collected into issues.
template <typename Fn>
void ForEachJsonLine(std::istream &in, const std::string &name,
                     std::vector<Issue> &issues, Fn fn) {
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (Blank(line)) continue;
    json record;
    try {
      record = json::parse(line);
    } catch (const json::parse_error &e) {
      issues.push_back({name, line_no, "", std::string("malformed JSON: ") +
                                               e.what()});
      continue;
    }
    if (!record.is_object()) {
      issues.push_back({name, line_no, "", "record is not an object"});
      continue;
    }
    try {
      fn(record, line_no);
    } catch (const json::exception &e) {
      issues.push_back({name, line_no, "", std::string("bad field: ") +
                                               e.what()});
    }
  }
}

std::string RecordId(const json &record, const char *key) {
  auto it = record.find(key);
  if (it != record.end() && it->is_string()) return it->get<std::string>();
  return "";
}

struct LocatedSequence {
  EventSequence seq;
  int line = 0;
};

std::vector<LocatedSequence> ParseEventsLocated(std::istream &in,
                                                const std::string &name,
                                                std::vector<Issue> &issues) {
  std::vector<LocatedSequence> out;
  ForEachJsonLine(in, name, issues, [&](const json &r, int line) {
    std::string id = RecordId(r, "video_id");
    auto fail = [&](std::string message) {
      issues.push_back({name, line, id, std::move(message)});
    };
    if (!r.contains("video_id") || !r["video_id"].is_string()) {
      return fail("missing string field 'video_id'");
    }
    if (!r.contains("duration") || !r["duration"].is_number()) {
      return fail("missing numeric field 'duration'");
    }
    if (!r.contains("events") || !r["events"].is_array()) {
      return fail("missing array field 'events'");
    }
    LocatedSequence ls;
    ls.line = line;
    ls.seq.video_id = id;
    ls.seq.duration = r["duration"].get<double>();
    if (r.contains("thumbnail") && !r["thumbnail"].is_null()) {
      if (!r["thumbnail"].is_string()) return fail("thumbnail must be string");
      ls.seq.thumbnail = r["thumbnail"].get<std::string>();
    }
    for (const json &e : r["events"]) {
      if (!e.is_object() || !e.contains("type") || !e["type"].is_string() ||
          !e.contains("t_start") || !e["t_start"].is_number() ||
          !e.contains("t_end") || !e["t_end"].is_number()) {
        return fail("event needs string 'type' and numeric 't_start', "
                    "'t_end'");
      }
      std::string type = e["type"].get<std::string>();
      if (type.size() != 1) {
        return fail("event type '" + type + "' is not a single symbol");
      }
      ls.seq.events.push_back(
          {type[0], e["t_start"].get<double>(), e["t_end"].get<double>()});
    }
    out.push_back(std::move(ls));
  });
  return out;
}

std::vector<std::string> SplitCsv(const std::string &line) {
  std::vector<std::string> fields;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) fields.push_back(Trim(field));
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

bool ParseDouble(const std::string &s, double *out) {
  const char *begin = s.data();
  const char *end = s.data() + s.size();
  if (begin != end && *begin == '+') ++begin;
  auto [ptr, ec] = std::from_chars(begin, end, *out);
  return ec == std::errc() && ptr == end;
}

template <typename T, typename Fn>
T ParseOrThrow(std::istream &in, const std::string &name, Fn parse) {
  std::vector<Issue> issues;
  T value = parse(in, name, issues);
  if (!issues.empty()) throw ValidationError(std::move(issues));
  return value;
}

EventRegistry ParseRegistryImpl(std::istream &in, const std::string &name,
                                std::vector<Issue> &issues) {
  EventRegistry registry;
  ForEachJsonLine(in, name, issues, [&](const json &r, int line) {
    std::string code = RecordId(r, "code");
    if (code.size() != 1) {
      issues.push_back({name, line, code, "code must be a single symbol"});
      return;
    }
    EventType type;
    type.code = code[0];
    type.name = r.value("name", "");
    type.description = r.value("description", "");
    try {
      registry.Add(std::move(type));
    } catch (const InvalidArgument &e) {
      issues.push_back({name, line, code, e.what()});
    }
  });
  return registry;
}

std::vector<ClassInfo> ParseClassesImpl(std::istream &in,
                                        const std::string &name,
                                        std::vector<Issue> &issues) {
  std::vector<ClassInfo> classes;
  std::set<std::string> seen;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string trimmed = Trim(line);
    if (trimmed.empty() || trimmed[0] == '#') continue;
    size_t eq = trimmed.find('=');
    if (eq == std::string::npos) {
      issues.push_back({name, line_no, "", "expected 'id = name, color'"});
      continue;
    }
    ClassInfo info;
    info.id = Trim(trimmed.substr(0, eq));
    std::string value = Trim(trimmed.substr(eq + 1));
    size_t comma = value.rfind(',');
    if (comma == std::string::npos) {
      info.display_name = value;
    } else {
      info.display_name = Trim(value.substr(0, comma));
      info.color = Trim(value.substr(comma + 1));
    }
    if (info.id.empty()) {
      issues.push_back({name, line_no, "", "empty class id"});
      continue;
    }
    if (!seen.insert(info.id).second) {
      issues.push_back({name, line_no, info.id, "duplicate class id"});
      continue;
    }
    classes.push_back(std::move(info));
  }
  return classes;
}

std::map<std::string, std::vector<double>> ParseEmbeddingsImpl(
    std::istream &in, const std::string &name, std::vector<Issue> &issues) {
  std::map<std::string, std::vector<double>> out;
  std::string line;
  int line_no = 0;
  size_t dim = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (Blank(line)) continue;
    std::vector<std::string> fields = SplitCsv(Trim(line));
    if (!header_seen) {
      header_seen = true;
      bool ok = fields.size() >= 2 && fields[0] == "video_id";
      for (size_t i = 1; ok && i < fields.size(); ++i) {
        ok = fields[i] == "d" + std::to_string(i - 1);
      }
      if (!ok) {
        issues.push_back(
            {name, line_no, "", "header must be video_id,d0,...,d{D-1}"});
        return out;
      }
      dim = fields.size() - 1;
      continue;
    }
    const std::string &id = fields[0];
    if (fields.size() != dim + 1) {
      issues.push_back({name, line_no, id,
                        "embedding dimension " +
                            std::to_string(fields.size() - 1) +
                            " does not match header dimension " +
                            std::to_string(dim)});
      continue;
    }
    std::vector<double> vec(dim);
    bool ok = true;
    for (size_t i = 0; i < dim; ++i) {
      if (!ParseDouble(fields[i + 1], &vec[i])) {
        issues.push_back({name, line_no, id,
                          "bad float '" + fields[i + 1] + "'"});
        ok = false;
        break;
      }
    }
    if (!ok) continue;
    if (!out.emplace(id, std::move(vec)).second) {
      issues.push_back({name, line_no, id, "duplicate video_id"});
    }
  }
  if (!header_seen) issues.push_back({name, 0, "", "missing header"});
  return out;
}

std::map<std::string, std::string> ParseSeedLabelsImpl(
    std::istream &in, const std::string &name, std::vector<Issue> &issues) {
  std::map<std::string, std::string> labels;
  ForEachJsonLine(in, name, issues, [&](const json &r, int line) {
    std::string id = RecordId(r, "video_id");
    std::string cls = RecordId(r, "class");
    if (id.empty() || cls.empty()) {
      issues.push_back(
          {name, line, id, "label needs string 'video_id' and 'class'"});
      return;
    }
    if (r.contains("source") && r["source"] != "seed") {
      issues.push_back({name, line, id, "label source must be 'seed'"});
      return;
    }
    if (!labels.emplace(id, cls).second) {
      issues.push_back({name, line, id, "duplicate video_id"});
    }
  });
  return labels;
}

std::ifstream OpenOrReport(const std::filesystem::path &path,
                           std::vector<Issue> &issues) {
  std::ifstream in(path);
  if (!in) issues.push_back({path.string(), 0, "", "cannot open file"});
  return in;
}

}  // namespace

EventRegistry ParseRegistry(std::istream &in, const std::string &name) {
  return ParseOrThrow<EventRegistry>(in, name, ParseRegistryImpl);
}

std::vector<ClassInfo> ParseClasses(std::istream &in,
                                    const std::string &name) {
  return ParseOrThrow<std::vector<ClassInfo>>(in, name, ParseClassesImpl);
}

std::vector<EventSequence> ParseEvents(std::istream &in,
                                       const std::string &name) {
  std::vector<Issue> issues;
  auto located = ParseEventsLocated(in, name, issues);
  if (!issues.empty()) throw ValidationError(std::move(issues));
  std::vector<EventSequence> out;
  for (auto &ls : located) out.push_back(std::move(ls.seq));
  return out;
}

std::map<std::string, std::vector<double>> ParseEmbeddings(
    std::istream &in, const std::string &name) {
  return ParseOrThrow<std::map<std::string, std::vector<double>>>(
      in, name, ParseEmbeddingsImpl);
}

std::map<std::string, std::string> ParseSeedLabels(std::istream &in,
                                                   const std::string &name) {
  return ParseOrThrow<std::map<std::string, std::string>>(
      in, name, ParseSeedLabelsImpl);
}

Dataset IngestDataset(const DatasetPaths &paths) {
  std::vector<Issue> issues;

  EventRegistry registry;
  if (auto in = OpenOrReport(paths.registry, issues)) {
    registry = ParseRegistryImpl(in, paths.registry.string(), issues);
  }
  std::vector<ClassInfo> classes;
  if (auto in = OpenOrReport(paths.classes, issues)) {
    classes = ParseClassesImpl(in, paths.classes.string(), issues);
  }
  std::vector<LocatedSequence> located;
  if (auto in = OpenOrReport(paths.events, issues)) {
    located = ParseEventsLocated(in, paths.events.string(), issues);
  }
  std::map<std::string, std::vector<double>> embeddings;
  if (paths.embeddings) {
    if (auto in = OpenOrReport(*paths.embeddings, issues)) {
      embeddings =
          ParseEmbeddingsImpl(in, paths.embeddings->string(), issues);
    }
  }
  std::map<std::string, std::string> labels;
  if (paths.labels) {
    if (auto in = OpenOrReport(*paths.labels, issues)) {
      labels = ParseSeedLabelsImpl(in, paths.labels->string(), issues);
    }
  }

  // Record-level checks that need line numbers; Dataset::Create repeats the
  // invariant checks without location info.
  const std::string events_name = paths.events.string();
  std::set<std::string> ids;
  for (const LocatedSequence &ls : located) {
    const EventSequence &seq = ls.seq;
    if (!ids.insert(seq.video_id).second) {
      issues.push_back({events_name, ls.line, seq.video_id,
                        "duplicate video_id"});
    }
    std::string unknown;
    for (const EventInstance &e : seq.events) {
      if (!registry.Contains(e.type) &&
          unknown.find(e.type) == std::string::npos) {
        unknown.push_back(e.type);
      }
    }
    for (char code : unknown) {
      issues.push_back({events_name, ls.line, seq.video_id,
                        std::string("unknown event code '") + code + "'"});
    }
  }
  if (!issues.empty()) throw ValidationError(std::move(issues));

  std::vector<EventSequence> sequences;
  sequences.reserve(located.size());
  for (auto &ls : located) sequences.push_back(std::move(ls.seq));
  return Dataset::Create(std::move(registry), std::move(sequences),
                         std::move(classes), std::move(embeddings),
                         std::move(labels));
}

std::string FormatDouble(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

void WriteRegistry(std::ostream &out, const EventRegistry &registry) {
  for (const auto &[code, type] : registry.types()) {
    json r;
    r["code"] = std::string(1, code);
    r["name"] = type.name;
    r["description"] = type.description;
    out << r.dump() << "\n";
  }
}

void WriteClasses(std::ostream &out, const std::vector<ClassInfo> &classes) {
  out << "# class id = display name, color\n";
  for (const ClassInfo &c : classes) {
    out << c.id << " = " << c.display_name << ", " << c.color << "\n";
  }
}

void WriteEvents(std::ostream &out, const Dataset &dataset) {
  for (const EventSequence &seq : dataset.sequences()) {
    json r;
    r["video_id"] = seq.video_id;
    r["duration"] = seq.duration;
    json events = json::array();
    for (const EventInstance &e : seq.events) {
      events.push_back({{"type", std::string(1, e.type)},
                        {"t_start", e.t_start},
                        {"t_end", e.t_end}});
    }
    r["events"] = std::move(events);
    if (seq.thumbnail) r["thumbnail"] = *seq.thumbnail;
    out << r.dump() << "\n";
  }
}

void WriteEmbeddings(std::ostream &out, const Dataset &dataset) {
  out << "video_id";
  for (size_t i = 0; i < dataset.embedding_dim(); ++i) out << ",d" << i;
  out << "\n";
  for (const auto &[id, vec] : dataset.embeddings()) {
    out << id;
    for (double v : vec) out << "," << FormatDouble(v);
    out << "\n";
  }
}

void WriteSeedLabels(std::ostream &out, const Dataset &dataset) {
  for (const auto &[id, cls] : dataset.seed_labels()) {
    json r{{"video_id", id}, {"class", cls}, {"source", "seed"}};
    out << r.dump() << "\n";
  }
}

DatasetPaths SaveDataset(const Dataset &dataset,
                         const std::filesystem::path &dir) {
  std::filesystem::create_directories(dir);
  DatasetPaths paths;
  paths.events = dir / "events.jsonl";
  paths.registry = dir / "registry.jsonl";
  paths.classes = dir / "classes.conf";
  auto write = [](const std::filesystem::path &p, auto fn) {
    std::ofstream out(p);
    if (!out) throw Error("cannot write " + p.string());
    fn(out);
  };
  write(paths.events, [&](std::ostream &o) { WriteEvents(o, dataset); });
  write(paths.registry,
        [&](std::ostream &o) { WriteRegistry(o, dataset.registry()); });
  write(paths.classes,
        [&](std::ostream &o) { WriteClasses(o, dataset.classes()); });
  if (!dataset.embeddings().empty()) {
    paths.embeddings = dir / "embeddings.csv";
    write(*paths.embeddings,
          [&](std::ostream &o) { WriteEmbeddings(o, dataset); });
  }
  if (!dataset.seed_labels().empty()) {
    paths.labels = dir / "labels.jsonl";
    write(*paths.labels,
          [&](std::ostream &o) { WriteSeedLabels(o, dataset); });
  }
  return paths;
}

}  // namespace seqlab
