#ifndef SEQLAB_SERVICE_SESSION_H_
#define SEQLAB_SERVICE_SESSION_H_

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "seqlab/core/dataset.h"
#include "seqlab/core/dataset_io.h"
#include "seqlab/labels/label_store.h"
#include "seqlab/mindl/clusterer.h"
#include "seqlab/mining/aggregate.h"
#include "seqlab/mining/miner.h"
#include "seqlab/mining/template_metrics.h"
#include "seqlab/model/classifier.h"
#include "seqlab/model/features.h"
#include "seqlab/model/projection.h"
#include "seqlab/model/retrain.h"
#include "seqlab/retrieval/similarity.h"

namespace seqlab {

struct SessionConfig {
  // Directory holding label_log.jsonl, iterations.jsonl, model.json and
  // retrain.json. Without one the session lives in memory only.
  std::optional<std::filesystem::path> workspace;
  MiningConstraints mining;
  double default_w = 0.5;
  size_t batch_threshold = 32;
  TrainingConfig training;
  // Held-out ground truth used for evaluation (ids are never trained on).
  std::optional<std::filesystem::path> eval_labels;
  // Precomputed projection coordinates (video_id,x,y).
  std::optional<std::filesystem::path> projection;
  unsigned workers = 1;
};

struct TemplateQuery {
  std::optional<TemplateSortKey> sort;
  bool descending = true;
  // Filters applied on top of the mined set.
  size_t min_support = 0;
  std::optional<size_t> degree;
  std::optional<AggregationMode> aggregate;
  // Exact template lookup; the result may fall below the support threshold.
  std::optional<std::string> search;
  // Keep only templates that cover at least one of these videos.
  std::optional<std::set<std::string>> covering;
};

struct VideoQuery {
  std::optional<std::string> template_symbols;
  std::optional<size_t> cluster;  // needs template_symbols
  std::optional<bool> labeled;
};

struct RetrieveRequest {
  std::vector<std::string> anchors;
  std::optional<double> w;
  std::optional<size_t> top_k;
  // Defaults to every unlabeled video that is not an anchor.
  std::optional<std::vector<std::string>> candidates;
};

struct RetrainReply {
  bool retrained = false;
  size_t pending = 0;
  size_t threshold = 0;
  std::optional<IterationRecord> record;
};

// Text readers for the ground-truth format {"video_id": .., "class": ..}.
std::map<std::string, std::string> ParseTruth(std::istream &in,
                                              const std::string &name);
std::map<std::string, std::string> ReadTruthFile(
    const std::filesystem::path &path);
void WriteTruth(std::ostream &out,
                const std::map<std::string, std::string> &truth);

// The state behind both the service and the CLI. It owns the dataset and
// the label store, along with mined templates and the latest model.
// Mining results do not depend on labels and are computed once; every
// label-dependent number is recomputed from current state on each call.
// Not thread-safe; HttpService adds the locking.
class Session {
 public:
  Session(Dataset dataset, SessionConfig config);
  Session(const Session &) = delete;
  Session &operator=(const Session &) = delete;

  const Dataset &dataset() const { return *dataset_; }
  const SessionConfig &config() const { return config_; }
  const LabelStore &labels() const { return store_; }
  const std::optional<Classifier> &model() const { return model_; }
  const std::vector<IterationRecord> &records() const {
    return controller_.records();
  }
  const std::vector<Pattern> &mined() const { return mined_; }

  std::vector<TemplateRow> Templates(const TemplateQuery &query) const;
  TemplateAggregation AggregateTemplates(const TemplateQuery &query) const;
  // Clusters over every video covered by the template.
  ClusterPartition Clusters(const std::string &symbols,
                            std::optional<double> alpha = std::nullopt,
                            std::optional<double> lambda = std::nullopt) const;
  std::vector<RetrievalHit> RetrieveSimilar(const RetrieveRequest &req) const;
  ApplyResult Label(const std::vector<std::string> &ids,
                    const std::string &class_id, const LabelSource &source,
                    const std::string &actor = "user");
  void Resolve(const std::string &video_id, const std::string &class_id,
               const std::string &actor = "user");
  RetrainReply Retrain(bool force);
  ProjectionMap Projection() const;

  // Wire bodies: newline-delimited JSON unless noted.
  std::string TemplatesBody(const TemplateQuery &query) const;
  std::string ClustersBody(const std::string &symbols,
                           std::optional<double> alpha = std::nullopt,
                           std::optional<double> lambda = std::nullopt) const;
  std::string VideosBody(const VideoQuery &query) const;
  std::string RetrieveBody(const RetrieveRequest &req) const;
  std::string HistoryBody(const std::optional<std::string> &video_id) const;
  std::string MetricsBody() const;
  std::string ProjectionBody() const;  // video_id,x,y,error table

 private:
  void Restore();
  void PersistModel() const;
  PredictionMap Predictions() const;
  std::vector<std::string> CoveredIds(const std::string &symbols) const;
  TemplateRow MakeRow(const Pattern &pattern,
                      const std::vector<std::string> &covered,
                      const PredictionMap *predictions) const;

  std::unique_ptr<Dataset> dataset_;
  SessionConfig config_;
  FeatureSpace space_;
  LabelStore store_;
  RetrainController controller_;
  EvaluationSet eval_;
  std::optional<Classifier> model_;
  std::vector<Pattern> mined_;
  std::vector<std::vector<std::string>> covered_;  // parallel to mined_
};

// JSON encodings shared by the CLI and the HTTP service.
std::string TemplateRowJson(const TemplateRow &row);
std::string AggregationJson(const TemplateAggregation &aggregation);
std::string PartitionJson(const ClusterPartition &partition,
                          const Dataset &dataset);
std::string HitJson(const RetrievalHit &hit);

}  // namespace seqlab

#endif  // SEQLAB_SERVICE_SESSION_H_
