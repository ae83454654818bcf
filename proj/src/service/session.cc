#include "seqlab/service/session.h"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "seqlab/core/error.h"
#include "seqlab/mindl/roles.h"
#include "seqlab/mining/subsequence.h"
#include "seqlab/model/evaluation.h"

namespace seqlab {

using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

const char kLabelLog[] = "label_log.jsonl";
const char kIterations[] = "iterations.jsonl";
const char kModel[] = "model.json";
const char kRetrainState[] = "retrain.json";

// Write to a sibling temp file and rename, so readers never see a torn file.
void WriteAtomically(const fs::path &path, const std::string &content) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc | std::ios::binary);
    if (!out) throw Error("cannot write " + tmp.string());
    out << content;
    if (!out.flush()) throw Error("write failed for " + tmp.string());
  }
  fs::rename(tmp, path);
}

json OpJson(const EditOp &op) {
  json j;
  switch (op.kind) {
    case EditOp::Kind::kInsert:
      j["op"] = "insert";
      break;
    case EditOp::Kind::kDelete:
      j["op"] = "delete";
      break;
    case EditOp::Kind::kReplace:
      j["op"] = "replace";
      break;
  }
  j["position"] = op.position;
  if (op.kind != EditOp::Kind::kDelete) j["symbol"] = std::string(1, op.symbol);
  return j;
}

std::string RolesString(const std::vector<EventRole> &roles) {
  std::string out;
  for (EventRole r : roles) {
    out += r == EventRole::kCore ? 'C' : r == EventRole::kFocus ? 'F' : 'X';
  }
  return out;
}

}  // namespace

std::map<std::string, std::string> ParseTruth(std::istream &in,
                                              const std::string &name) {
  std::map<std::string, std::string> out;
  std::vector<Issue> issues;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      json j = json::parse(line);
      std::string id = j.at("video_id").get<std::string>();
      std::string cls = j.at("class").get<std::string>();
      if (!out.emplace(id, cls).second) {
        issues.push_back({name, line_no, id, "duplicate video_id"});
      }
    } catch (const json::exception &e) {
      issues.push_back({name, line_no, "", e.what()});
    }
  }
  if (!issues.empty()) throw ValidationError(std::move(issues));
  return out;
}

std::map<std::string, std::string> ReadTruthFile(const fs::path &path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  return ParseTruth(in, path.string());
}

void WriteTruth(std::ostream &out,
                const std::map<std::string, std::string> &truth) {
  for (const auto &[id, cls] : truth) {
    out << json{{"video_id", id}, {"class", cls}}.dump() << "\n";
  }
}

Session::Session(Dataset dataset, SessionConfig config)
    : dataset_(std::make_unique<Dataset>(std::move(dataset))),
      config_(std::move(config)),
      space_(*dataset_),
      store_(*dataset_),
      controller_(config_.batch_threshold) {
  config_.mining.Validate();
  SimilarityWeights{config_.default_w};  // throws when out of range
  Restore();
  mined_ = Mine(*dataset_, config_.mining, config_.workers);
  covered_.reserve(mined_.size());
  for (const Pattern &p : mined_) covered_.push_back(CoveredIds(p.symbols));
}

void Session::Restore() {
  if (config_.eval_labels) {
    eval_.truth = ReadTruthFile(*config_.eval_labels);
    std::vector<Issue> issues;
    for (const auto &[id, cls] : eval_.truth) {
      if (!dataset_->Contains(id)) {
        issues.push_back({config_.eval_labels->string(), 0, id,
                          "unknown video_id"});
      } else if (!dataset_->HasClass(cls)) {
        issues.push_back({config_.eval_labels->string(), 0, id,
                          "unknown class '" + cls + "'"});
      }
      eval_.ids.push_back(id);
    }
    if (!issues.empty()) throw ValidationError(std::move(issues));
  }
  if (!config_.workspace) return;

  const fs::path &ws = *config_.workspace;
  fs::create_directories(ws);
  const fs::path log = ws / kLabelLog;
  if (fs::exists(log)) {
    store_ = LabelStore::Replay(*dataset_, ReadLogFile(log));
    store_.AttachLog(log, false);
  } else {
    store_.AttachLog(log, true);
  }

  std::vector<IterationRecord> records;
  if (std::ifstream in(ws / kIterations); in) {
    std::string line;
    while (std::getline(in, line)) {
      if (!line.empty()) records.push_back(RecordFromJson(line));
    }
  }
  uint64_t last_sequence = 0;
  if (std::ifstream in(ws / kRetrainState); in) {
    last_sequence = json::parse(in).at("last_sequence").get<uint64_t>();
  }
  if (!records.empty()) {
    store_.BeginIteration(
        std::max(store_.iteration(), records.back().iteration + 1));
  }
  controller_ = RetrainController(config_.batch_threshold, std::move(records),
                                  last_sequence);
  if (std::ifstream in(ws / kModel); in) model_ = Classifier::Load(in);
}

std::vector<std::string> Session::CoveredIds(const std::string &symbols) const {
  std::vector<std::string> out;
  for (const EventSequence &s : dataset_->sequences()) {
    if (IsSubsequence(symbols, dataset_->Symbols(s.video_id),
                      config_.mining.max_gap)) {
      out.push_back(s.video_id);
    }
  }
  return out;
}

PredictionMap Session::Predictions() const {
  PredictionMap out;
  if (!model_) return out;
  for (const EventSequence &s : dataset_->sequences()) {
    out[s.video_id] = model_->Predict(space_.Featurize(s));
  }
  return out;
}

TemplateRow Session::MakeRow(const Pattern &pattern,
                             const std::vector<std::string> &covered,
                             const PredictionMap *predictions) const {
  Coverage coverage;
  const LabelState &state = store_.state();
  for (const std::string &id : covered) {
    (state.IsLabeled(id) ? coverage.labeled : coverage.unlabeled).push_back(id);
  }
  return {pattern, ComputeTemplateMetrics(coverage, state, predictions)};
}

std::vector<TemplateRow> Session::Templates(const TemplateQuery &query) const {
  PredictionMap predictions = Predictions();
  const PredictionMap *pred = model_ ? &predictions : nullptr;
  std::vector<TemplateRow> rows;
  auto keep = [&](const Pattern &p, const std::vector<std::string> &covered) {
    if (p.support < query.min_support) return false;
    if (query.degree && p.symbols.size() != *query.degree) return false;
    if (query.covering) {
      return std::any_of(covered.begin(), covered.end(),
                         [&](const std::string &id) {
                           return query.covering->count(id) > 0;
                         });
    }
    return true;
  };
  if (query.search) {
    Pattern p = SearchTemplate(*query.search, *dataset_, config_.mining);
    std::vector<std::string> covered = CoveredIds(p.symbols);
    if (keep(p, covered)) rows.push_back(MakeRow(p, covered, pred));
  } else {
    for (size_t i = 0; i < mined_.size(); ++i) {
      if (keep(mined_[i], covered_[i])) {
        rows.push_back(MakeRow(mined_[i], covered_[i], pred));
      }
    }
  }
  if (query.sort) SortTemplates(rows, *query.sort, query.descending);
  return rows;
}

TemplateAggregation Session::AggregateTemplates(
    const TemplateQuery &query) const {
  std::vector<Pattern> patterns;
  for (const TemplateRow &row : Templates(query)) patterns.push_back(row.pattern);
  return Aggregate(std::move(patterns),
                   query.aggregate.value_or(AggregationMode::kPrefix));
}

ClusterPartition Session::Clusters(const std::string &symbols,
                                   std::optional<double> alpha,
                                   std::optional<double> lambda) const {
  if (symbols.empty()) throw InvalidArgument("empty template");
  ClusterOptions options;
  if (alpha) options.alpha = *alpha;
  if (lambda) options.lambda = *lambda;
  std::vector<std::string> ids = CoveredIds(symbols);
  if (ids.empty()) {
    throw InvalidArgument("template '" + symbols + "' covers no videos");
  }
  return ClusterTemplate(*dataset_, ids, symbols, options);
}

std::vector<RetrievalHit> Session::RetrieveSimilar(
    const RetrieveRequest &req) const {
  double w = req.w.value_or(config_.default_w);
  // Without embeddings only the edit similarity is meaningful.
  if (!dataset_->fully_embedded()) w = 1.0;
  std::vector<std::string> candidates;
  if (req.candidates) {
    candidates = *req.candidates;
  } else {
    std::set<std::string> anchors(req.anchors.begin(), req.anchors.end());
    for (const EventSequence &s : dataset_->sequences()) {
      if (!anchors.count(s.video_id) && !store_.state().IsLabeled(s.video_id)) {
        candidates.push_back(s.video_id);
      }
    }
  }
  RetrievalOptions options{SimilarityWeights(w), req.top_k,
                           AnchorAggregation::kMax};
  return Retrieve(req.anchors, candidates, *dataset_, options);
}

ApplyResult Session::Label(const std::vector<std::string> &ids,
                           const std::string &class_id,
                           const LabelSource &source,
                           const std::string &actor) {
  return store_.ApplyLabels(ids, class_id, source, std::nullopt, actor);
}

void Session::Resolve(const std::string &video_id, const std::string &class_id,
                      const std::string &actor) {
  store_.ResolveConflict(video_id, class_id, actor);
}

RetrainReply Session::Retrain(bool force) {
  RetrainReply reply;
  reply.threshold = controller_.threshold();
  reply.pending = controller_.PendingLabels(store_);
  std::vector<std::string> classes;
  for (const ClassInfo &c : dataset_->classes()) classes.push_back(c.id);
  auto outcome = controller_.MaybeRetrain(store_, space_, classes, eval_,
                                          config_.training, force);
  if (!outcome) return reply;
  model_ = std::move(outcome->model);
  reply.retrained = true;
  reply.record = outcome->record;
  reply.pending = controller_.PendingLabels(store_);
  PersistModel();
  return reply;
}

void Session::PersistModel() const {
  if (!config_.workspace || !model_) return;
  const fs::path &ws = *config_.workspace;
  std::ostringstream model;
  model_->Save(model);
  WriteAtomically(ws / kModel, model.str());
  std::string records;
  for (const IterationRecord &r : controller_.records()) {
    records += RecordToJson(r) + "\n";
  }
  WriteAtomically(ws / kIterations, records);
  WriteAtomically(ws / kRetrainState,
                  json{{"last_sequence", controller_.last_sequence()}}.dump() +
                      "\n");
}

ProjectionMap Session::Projection() const {
  ProjectionInputs inputs;
  if (config_.projection) inputs.precomputed = ReadProjectionFile(*config_.projection);
  if (model_) {
    inputs.model = &*model_;
    inputs.space = &space_;
    inputs.labels = &store_.state();
  }
  return Project(*dataset_, inputs);
}

std::string Session::TemplatesBody(const TemplateQuery &query) const {
  if (query.aggregate) return AggregationJson(AggregateTemplates(query)) + "\n";
  std::string out;
  for (const TemplateRow &row : Templates(query)) {
    out += TemplateRowJson(row) + "\n";
  }
  return out;
}

std::string Session::ClustersBody(const std::string &symbols,
                                  std::optional<double> alpha,
                                  std::optional<double> lambda) const {
  return PartitionJson(Clusters(symbols, alpha, lambda), *dataset_) + "\n";
}

std::string Session::VideosBody(const VideoQuery &query) const {
  if (query.cluster && !query.template_symbols) {
    throw InvalidArgument("cluster filter needs a template");
  }
  const LabelState &state = store_.state();
  // Videos in scope, with their cluster when a template is given.
  std::vector<std::string> ids;
  std::map<std::string, const Cluster *> cluster_of;
  std::optional<ClusterPartition> partition;
  if (query.template_symbols) {
    partition = Clusters(*query.template_symbols);
    if (query.cluster && *query.cluster >= partition->clusters.size()) {
      throw InvalidArgument("cluster index out of range");
    }
    for (size_t c = 0; c < partition->clusters.size(); ++c) {
      if (query.cluster && *query.cluster != c) continue;
      for (const ClusterMember &m : partition->clusters[c].members) {
        cluster_of[m.video_id] = &partition->clusters[c];
        ids.push_back(m.video_id);
      }
    }
    std::sort(ids.begin(), ids.end());
  } else {
    ids = dataset_->VideoIds();
  }

  std::string out;
  for (const std::string &id : ids) {
    const bool labeled = state.IsLabeled(id);
    if (query.labeled && *query.labeled != labeled) continue;
    const EventSequence &seq = dataset_->Get(id);
    json j;
    j["video_id"] = id;
    j["duration"] = seq.duration;
    j["symbols"] = dataset_->Symbols(id);
    json events = json::array();
    for (const EventInstance &e : seq.events) {
      events.push_back({{"type", std::string(1, e.type)},
                        {"t_start", e.t_start},
                        {"t_end", e.t_end}});
    }
    j["events"] = std::move(events);
    if (seq.thumbnail) j["thumbnail"] = *seq.thumbnail;
    if (labeled) {
      j["class"] = state.current.at(id);
      j["source"] = ToString(state.current_source.at(id).kind);
      j["iteration"] = state.current_iteration.at(id);
    } else {
      j["class"] = nullptr;
    }
    j["conflict"] = state.conflicts.count(id) > 0;
    if (model_) j["predicted"] = model_->Predict(space_.Featurize(seq));
    auto it = cluster_of.find(id);
    if (it != cluster_of.end()) {
      j["representative"] = it->second->representative;
      j["roles"] = RolesString(AssignRoles(dataset_->Symbols(id), *it->second));
    }
    out += j.dump() + "\n";
  }
  return out;
}

std::string Session::RetrieveBody(const RetrieveRequest &req) const {
  std::string out;
  for (const RetrievalHit &hit : RetrieveSimilar(req)) out += HitJson(hit) + "\n";
  return out;
}

std::string Session::HistoryBody(
    const std::optional<std::string> &video_id) const {
  std::ostringstream out;
  if (video_id) {
    if (!dataset_->Contains(*video_id)) {
      throw InvalidArgument("unknown video '" + *video_id + "'");
    }
    WriteLog(out, store_.History(*video_id));
  } else {
    WriteLog(out, store_.log());
  }
  return out.str();
}

std::string Session::MetricsBody() const {
  std::string out;
  for (const IterationRecord &r : controller_.records()) {
    out += RecordToJson(r) + "\n";
  }
  return out;
}

std::string Session::ProjectionBody() const {
  std::ostringstream out;
  WriteProjection(out, Projection());
  return out.str();
}

std::string TemplateRowJson(const TemplateRow &row) {
  const TemplateMetrics &m = row.metrics;
  json metrics;
  metrics["purity"] = m.purity;
  metrics["accuracy"] = m.accuracy ? json(*m.accuracy) : json(nullptr);
  metrics["labeled"] = m.labeled_count;
  metrics["unlabeled"] = m.unlabeled_count;
  metrics["majority"] = m.majority_class;
  metrics["class_counts"] = m.class_counts;
  metrics["new_counts"] = m.newly_labeled_counts;
  json j;
  j["symbols"] = row.pattern.symbols;
  j["support"] = row.pattern.support;
  j["metrics"] = std::move(metrics);
  return j.dump();
}

namespace {

json NodeJson(const TemplateNode &node) {
  json children = json::array();
  for (const TemplateNode &c : node.children) children.push_back(NodeJson(c));
  return {{"symbols", node.pattern.symbols},
          {"support", node.pattern.support},
          {"children", std::move(children)}};
}

}  // namespace

std::string AggregationJson(const TemplateAggregation &aggregation) {
  json j;
  j["mode"] = ToString(aggregation.mode);
  if (aggregation.mode == AggregationMode::kPrefix) {
    json roots = json::array();
    for (const TemplateNode &n : aggregation.roots) roots.push_back(NodeJson(n));
    j["roots"] = std::move(roots);
  } else {
    json groups = json::array();
    for (const TemplateGroup &g : aggregation.groups) {
      json members = json::array();
      for (const Pattern &p : g.members) {
        members.push_back({{"symbols", p.symbols}, {"support", p.support}});
      }
      groups.push_back({{"key", g.key}, {"members", std::move(members)}});
    }
    j["groups"] = std::move(groups);
  }
  return j.dump();
}

std::string PartitionJson(const ClusterPartition &partition,
                          const Dataset &dataset) {
  json j;
  j["template"] =
      partition.clusters.empty() ? "" : partition.clusters[0].seed_template;
  j["alpha"] = partition.alpha;
  j["lambda"] = partition.lambda;
  j["total_dl"] = partition.total_dl;
  json clusters = json::array();
  for (size_t k = 0; k < partition.clusters.size(); ++k) {
    const Cluster &c = partition.clusters[k];
    json members = json::array();
    json member_ids = json::array();
    json edit_costs = json::array();
    for (const ClusterMember &m : c.members) {
      member_ids.push_back(m.video_id);
      edit_costs.push_back(m.script.cost());
      json ops = json::array();
      for (const EditOp &op : m.script.ops) ops.push_back(OpJson(op));
      members.push_back(
          {{"video_id", m.video_id},
           {"cost", m.script.cost()},
           {"ops", std::move(ops)},
           {"roles", RolesString(AssignRoles(dataset.Symbols(m.video_id), c))}});
    }
    clusters.push_back({{"cluster_id", k},
                        {"representative", c.representative},
                        {"member_ids", std::move(member_ids)},
                        {"edit_costs", std::move(edit_costs)},
                        {"size", c.members.size()},
                        {"edit_cost", c.EditCost()},
                        {"members", std::move(members)}});
  }
  j["clusters"] = std::move(clusters);
  return j.dump();
}

std::string HitJson(const RetrievalHit &hit) {
  return json{{"video_id", hit.video_id},
              {"sim_total", hit.sim_total},
              {"sim_e", hit.sim_e},
              {"sim_v", hit.sim_v},
              {"anchor", hit.best_anchor_id}}
      .dump();
}

}  // namespace seqlab
