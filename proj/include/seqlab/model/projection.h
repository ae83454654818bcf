#ifndef SEQLAB_MODEL_PROJECTION_H_
#define SEQLAB_MODEL_PROJECTION_H_

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "seqlab/core/dataset.h"
#include "seqlab/labels/label_store.h"
#include "seqlab/model/classifier.h"
#include "seqlab/model/features.h"

namespace seqlab {

struct ProjectedPoint {
  std::string video_id;
  double x = 0.0;
  double y = 0.0;
  // 1 - p(true class) for labeled videos, 1 - max p otherwise. Unset
  // without a model.
  std::optional<double> error;
};

using ProjectionMap = std::vector<ProjectedPoint>;

struct ProjectionInputs {
  // Coordinates used verbatim when present.
  std::optional<std::map<std::string, std::pair<double, double>>> precomputed;
  const Classifier *model = nullptr;
  const FeatureSpace *space = nullptr;
  const LabelState *labels = nullptr;
};

// Points in video-id order. Coordinates are the precomputed ones when
// supplied, else the first two principal components of the embeddings.
// Throws InvalidArgument when neither is available or precomputed ids are
// unknown.
ProjectionMap Project(const Dataset &dataset, const ProjectionInputs &inputs);

// Reads "video_id,x,y" with that header.
std::map<std::string, std::pair<double, double>> ReadProjectionFile(
    const std::filesystem::path &path);
void WriteProjection(std::ostream &out, const ProjectionMap &projection);

}  // namespace seqlab

#endif  // SEQLAB_MODEL_PROJECTION_H_
