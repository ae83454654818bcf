#ifndef SEQLAB_CORE_DATASET_IO_H_
#define SEQLAB_CORE_DATASET_IO_H_

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "seqlab/core/dataset.h"

namespace seqlab {

// Locations of the files that make up a dataset on disk.
//
//   events      one JSON record per line: video_id, duration, events, thumbnail
//   registry    one JSON record per line: code, name, description
//   classes     key-value lines "class_id = display name, color"
//   embeddings  CSV with header video_id,d0,...,d{D-1}
//   labels      one JSON record per line: video_id, class, source
struct DatasetPaths {
  std::filesystem::path events;
  std::filesystem::path registry;
  std::filesystem::path classes;
  std::optional<std::filesystem::path> embeddings;
  std::optional<std::filesystem::path> labels;
};

// Reads and validates a dataset. Throws ValidationError carrying every
// problem found (with file and line) and never returns a partial dataset.
Dataset IngestDataset(const DatasetPaths &paths);

// Stream-level parsers. The name argument is used in issue reports.
EventRegistry ParseRegistry(std::istream &in, const std::string &name);
std::vector<ClassInfo> ParseClasses(std::istream &in, const std::string &name);
std::vector<EventSequence> ParseEvents(std::istream &in,
                                       const std::string &name);
std::map<std::string, std::vector<double>> ParseEmbeddings(
    std::istream &in, const std::string &name);
std::map<std::string, std::string> ParseSeedLabels(std::istream &in,
                                                   const std::string &name);

// Writers producing the formats read above. Floats are written in shortest
// round-trip form so that ingest(serialize(d)) == d.
void WriteRegistry(std::ostream &out, const EventRegistry &registry);
void WriteClasses(std::ostream &out, const std::vector<ClassInfo> &classes);
void WriteEvents(std::ostream &out, const Dataset &dataset);
void WriteEmbeddings(std::ostream &out, const Dataset &dataset);
void WriteSeedLabels(std::ostream &out, const Dataset &dataset);

// Writes every component of the dataset under dir and returns the paths.
// Embeddings and labels are written only when present.
DatasetPaths SaveDataset(const Dataset &dataset,
                         const std::filesystem::path &dir);

// Shortest decimal representation that parses back to the same double.
std::string FormatDouble(double value);

}  // namespace seqlab

#endif  // SEQLAB_CORE_DATASET_IO_H_
