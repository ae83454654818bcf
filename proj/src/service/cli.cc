#include "seqlab/service/cli.h"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "seqlab/core/dataset_io.h"
#include "seqlab/core/error.h"
#include "seqlab/model/evaluation.h"
#include "seqlab/model/simulation.h"
#include "seqlab/model/synthetic.h"
#include "seqlab/service/http_service.h"
#include "seqlab/service/session.h"

namespace seqlab {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

// Flags shared by every subcommand that opens a dataset.
struct DataFlags {
  std::string data;
  std::string events, registry, classes, embeddings, labels;
  std::string workspace;
  std::string eval;
  std::string projection;
  size_t min_support = 5;
  size_t min_length = 2;
  size_t max_length = 6;
  long max_gap = -1;
  size_t threshold = 32;
  double w = 0.5;
  uint64_t seed = 7;
  unsigned workers = 1;

  void Attach(CLI::App *cmd) {
    cmd->add_option("--data", data,
                    "directory with events.jsonl, registry.jsonl, "
                    "classes.conf and optional embeddings.csv, labels.jsonl")
        ->envname("SEQLAB_DATA");
    cmd->add_option("--events", events, "events file");
    cmd->add_option("--registry", registry, "event registry file");
    cmd->add_option("--classes", classes, "class list file");
    cmd->add_option("--embeddings", embeddings, "embeddings table");
    cmd->add_option("--labels", labels, "seed labels file");
    cmd->add_option("--workspace", workspace,
                    "state directory (default <data>/workspace)")
        ->envname("SEQLAB_WORKSPACE");
    cmd->add_option("--eval", eval,
                    "held-out truth for evaluation (default <data>/eval.jsonl "
                    "when present)");
    cmd->add_option("--projection", projection, "precomputed video_id,x,y");
    cmd->add_option("--min-support", min_support, "mining min support")
        ->envname("SEQLAB_MIN_SUPPORT");
    cmd->add_option("--min-length", min_length, "mining min length");
    cmd->add_option("--max-length", max_length, "mining max length");
    cmd->add_option("--max-gap", max_gap, "mining max gap (-1 = none)");
    cmd->add_option("--threshold", threshold, "retrain batch threshold")
        ->envname("SEQLAB_THRESHOLD");
    cmd->add_option("--default-w", w, "default similarity weight")
        ->envname("SEQLAB_DEFAULT_W");
    cmd->add_option("--seed", seed, "training seed")->envname("SEQLAB_SEED");
    cmd->add_option("--workers", workers, "mining threads");
  }

  DatasetPaths Paths() const {
    DatasetPaths p;
    auto pick = [&](const std::string &flag, const char *name) -> fs::path {
      if (!flag.empty()) return flag;
      if (data.empty()) {
        throw InvalidArgument(std::string("need --data or --") + name);
      }
      return fs::path(data) / name;
    };
    p.events = pick(events, "events.jsonl");
    p.registry = pick(registry, "registry.jsonl");
    p.classes = pick(classes, "classes.conf");
    auto optional = [&](const std::string &flag,
                        const char *name) -> std::optional<fs::path> {
      if (!flag.empty()) return fs::path(flag);
      if (!data.empty() && fs::exists(fs::path(data) / name)) {
        return fs::path(data) / name;
      }
      return std::nullopt;
    };
    p.embeddings = optional(embeddings, "embeddings.csv");
    p.labels = optional(labels, "labels.jsonl");
    return p;
  }

  Dataset Load() const { return IngestDataset(Paths()); }

  SessionConfig Config() const {
    SessionConfig c;
    if (!workspace.empty()) {
      c.workspace = fs::path(workspace);
    } else if (!data.empty()) {
      c.workspace = fs::path(data) / "workspace";
    } else {
      throw InvalidArgument("need --workspace or --data");
    }
    c.mining = Mining();
    c.default_w = w;
    c.batch_threshold = threshold;
    c.training.seed = seed;
    if (!eval.empty()) {
      c.eval_labels = fs::path(eval);
    } else if (!data.empty() && fs::exists(fs::path(data) / "eval.jsonl")) {
      c.eval_labels = fs::path(data) / "eval.jsonl";
    }
    if (!projection.empty()) c.projection = fs::path(projection);
    c.workers = workers;
    return c;
  }

  MiningConstraints Mining() const {
    MiningConstraints m{min_support, min_length, max_length, std::nullopt};
    if (max_gap >= 0) m.max_gap = static_cast<size_t>(max_gap);
    return m;
  }
};

std::vector<std::string> SplitList(const std::vector<std::string> &items) {
  std::vector<std::string> out;
  for (const std::string &item : items) {
    std::stringstream ss(item);
    std::string part;
    while (std::getline(ss, part, ',')) {
      if (!part.empty()) out.push_back(part);
    }
  }
  return out;
}

// Ids from a file: one per line, or JSON lines carrying "video_id" (so the
// output of `retrieve` can be fed straight into `label`).
std::vector<std::string> ReadIds(const fs::path &path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  std::vector<std::string> ids;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.front() == '{') {
      ids.push_back(json::parse(line).at("video_id").get<std::string>());
    } else {
      ids.push_back(line);
    }
  }
  return ids;
}

// Writes to the named file, or to out when the name is empty.
void Emit(const std::string &file, const std::string &content,
          std::ostream &out) {
  if (file.empty()) {
    out << content;
    return;
  }
  std::ofstream f(file, std::ios::trunc);
  if (!f) throw Error("cannot write " + file);
  f << content;
  if (!f.flush()) throw Error("write failed for " + file);
}

size_t CountLines(const std::string &text) {
  return static_cast<size_t>(std::count(text.begin(), text.end(), '\n'));
}

// Stratified held-out split that never takes seed-labeled videos.
std::map<std::string, std::string> EvalSplit(
    const Dataset &dataset, const std::map<std::string, std::string> &oracle,
    double fraction, uint64_t seed) {
  std::map<std::string, std::vector<std::string>> by_class;
  for (const auto &[id, cls] : oracle) {
    if (!dataset.seed_labels().count(id)) by_class[cls].push_back(id);
  }
  std::mt19937_64 rng(seed);
  std::map<std::string, std::string> out;
  for (auto &[cls, ids] : by_class) {
    std::shuffle(ids.begin(), ids.end(), rng);
    const size_t n = static_cast<size_t>(
        fraction * static_cast<double>(ids.size()) + 0.5);
    for (size_t i = 0; i < n && i < ids.size(); ++i) out[ids[i]] = cls;
  }
  return out;
}

}  // namespace

int RunCli(int argc, const char *const *argv, std::ostream &out,
           std::ostream &err) {
  CLI::App app{"seqlab: template mining and labeling workbench for event "
               "sequences"};
  app.require_subcommand(1);
  app.fallthrough(false);

  // generate
  SyntheticConfig gen;
  gen.class_patterns = DefaultClassPatterns();
  gen.seed_labels_per_class = 2;
  std::string gen_out;
  double gen_eval = 0.3;
  auto *generate = app.add_subcommand("generate", "write a synthetic dataset");
  generate->add_option("--out", gen_out, "output directory")->required();
  generate->add_option("--n", gen.num_sequences, "number of sequences");
  generate->add_option("--noise", gen.noise_rate, "share of noise events");
  generate->add_option("--embedding-dim", gen.embedding_dim, "0 disables");
  generate->add_option("--embedding-noise", gen.embedding_noise,
                       "embedding noise scale");
  generate->add_option("--seed-labels", gen.seed_labels_per_class,
                       "seed labels per class");
  generate->add_option("--eval-fraction", gen_eval,
                       "share of videos written to eval.jsonl");
  generate->add_option("--seed", gen.seed, "random seed");

  // ingest
  DataFlags ingest_flags;
  std::string ingest_out;
  auto *ingest = app.add_subcommand("ingest", "validate and summarize a dataset");
  ingest_flags.Attach(ingest);
  ingest->add_option("--out", ingest_out, "write a normalized copy here");

  // mine
  DataFlags mine_flags;
  std::string mine_out, mine_sort, mine_order = "desc", mine_aggregate,
                        mine_search;
  size_t mine_degree = 0;
  auto *mine = app.add_subcommand("mine", "mine templates with metrics");
  mine_flags.Attach(mine);
  mine->add_option("--out", mine_out, "output file (default stdout)");
  mine->add_option("--sort", mine_sort, "purity|accuracy|unlabeled|support");
  mine->add_option("--order", mine_order, "asc|desc")
      ->check(CLI::IsMember({"asc", "desc"}));
  mine->add_option("--aggregate", mine_aggregate, "prefix|degree|set");
  mine->add_option("--search", mine_search, "look up one template");
  mine->add_option("--degree", mine_degree, "keep templates of this length");

  // cluster
  DataFlags cluster_flags;
  std::string cluster_template, cluster_out;
  double cluster_alpha = 0.8, cluster_lambda = 0.0;
  auto *cluster = app.add_subcommand("cluster", "MinDL clusters of a template");
  cluster_flags.Attach(cluster);
  cluster->add_option("--template", cluster_template, "seed template")
      ->required();
  cluster->add_option("--alpha", cluster_alpha, "edit cost weight");
  cluster->add_option("--lambda", cluster_lambda, "per-cluster penalty");
  cluster->add_option("--out", cluster_out, "partition file (default stdout)");

  // retrieve
  DataFlags retrieve_flags;
  std::vector<std::string> retrieve_anchors, retrieve_candidates;
  std::optional<double> retrieve_w;
  std::optional<size_t> retrieve_top_k;
  std::string retrieve_out;
  auto *retrieve = app.add_subcommand("retrieve", "rank videos by similarity");
  retrieve_flags.Attach(retrieve);
  retrieve->add_option("--anchors", retrieve_anchors, "anchor ids")
      ->required();
  retrieve->add_option("--candidates", retrieve_candidates,
                       "candidate ids (default all unlabeled)");
  retrieve->add_option("--weight", retrieve_w, "sequence similarity weight w");
  retrieve->add_option("--top-k", retrieve_top_k, "number of results");
  retrieve->add_option("--out", retrieve_out, "output file (default stdout)");

  // label
  DataFlags label_flags;
  std::vector<std::string> label_ids;
  std::string label_ids_file, label_class, label_source = "manual",
                                           label_template, label_actor = "cli";
  auto *label = app.add_subcommand("label", "apply a class to videos");
  label_flags.Attach(label);
  label->add_option("--ids", label_ids, "video ids");
  label->add_option("--ids-file", label_ids_file,
                    "ids, one per line or JSON lines with video_id");
  label->add_option("--class", label_class, "class id")->required();
  label->add_option("--source", label_source, "manual|template")
      ->check(CLI::IsMember({"manual", "template"}));
  label->add_option("--template", label_template, "template behind the batch");
  label->add_option("--actor", label_actor, "who labels");

  // resolve
  DataFlags resolve_flags;
  std::string resolve_video, resolve_class;
  auto *resolve = app.add_subcommand("resolve", "settle a label conflict");
  resolve_flags.Attach(resolve);
  resolve->add_option("--video", resolve_video, "video id")->required();
  resolve->add_option("--class", resolve_class, "final class")->required();

  // history
  DataFlags history_flags;
  std::string history_video;
  auto *history = app.add_subcommand("history", "print the label log");
  history_flags.Attach(history);
  history->add_option("--video", history_video, "only this video");

  // retrain
  DataFlags retrain_flags;
  bool retrain_force = false;
  auto *retrain = app.add_subcommand("retrain", "retrain once enough new labels exist");
  retrain_flags.Attach(retrain);
  retrain->add_flag("--force", retrain_force, "ignore the batch threshold");

  // metrics
  DataFlags metrics_flags;
  std::string metrics_format = "jsonl", metrics_out;
  auto *metrics = app.add_subcommand("metrics", "iteration records");
  metrics_flags.Attach(metrics);
  metrics->add_option("--format", metrics_format, "jsonl|table")
      ->check(CLI::IsMember({"jsonl", "table"}));
  metrics->add_option("--out", metrics_out, "output file (default stdout)");

  // videos
  DataFlags videos_flags;
  std::string videos_template;
  std::optional<size_t> videos_cluster;
  std::string videos_labeled;
  auto *videos = app.add_subcommand("videos", "list videos with labels");
  videos_flags.Attach(videos);
  videos->add_option("--template", videos_template, "restrict to a template");
  videos->add_option("--cluster", videos_cluster, "cluster index");
  videos->add_option("--labeled", videos_labeled, "true|false")
      ->check(CLI::IsMember({"true", "false"}));

  // project
  DataFlags project_flags;
  std::string project_out;
  auto *project = app.add_subcommand("project", "2D projection with errors");
  project_flags.Attach(project);
  project->add_option("--out", project_out, "output file (default stdout)");

  // simulate
  DataFlags sim_flags;
  SimulationConfig sim;
  std::string sim_strategy = "template", sim_oracle, sim_out;
  auto *simulate = app.add_subcommand("simulate", "labeling efficiency run");
  sim_flags.Attach(simulate);
  simulate->add_option("--strategy", sim_strategy,
                       "template|uncertainty|random")
      ->check(CLI::IsMember({"template", "uncertainty", "random"}));
  simulate->add_option("--target-f1", sim.target_f1, "stop at this F1");
  simulate->add_option("--batch-size", sim.batch_size, "labels per round");
  simulate->add_option("--max-labels", sim.max_labels, "0 = whole pool");
  simulate->add_option("--initial-per-class", sim.initial_per_class,
                       "labels per class before the first round");
  simulate->add_option("--test-fraction", sim.test_fraction, "held-out share");
  simulate->add_option("--oracle", sim_oracle,
                       "ground truth (default <data>/oracle.jsonl)");
  simulate->add_option("--out", sim_out, "curve table file");

  // serve
  DataFlags serve_flags;
  std::string serve_host = "127.0.0.1";
  int serve_port = 8080;
  auto *serve = app.add_subcommand("serve", "run the HTTP service");
  serve_flags.Attach(serve);
  serve->add_option("--host", serve_host, "bind address");
  serve->add_option("--port", serve_port, "port (0 = any free port)")
      ->envname("SEQLAB_PORT");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    if (e.get_exit_code() == 0) return app.exit(e, out, err);  // --help
    err << "error: " << e.what() << "\n" << app.help();
    return 2;
  }

  try {
    if (*generate) {
      SyntheticData data = GenerateSynthetic(gen);
      SaveDataset(data.dataset, gen_out);
      std::ofstream oracle(fs::path(gen_out) / "oracle.jsonl");
      WriteTruth(oracle, data.oracle);
      std::ofstream eval(fs::path(gen_out) / "eval.jsonl");
      WriteTruth(eval, EvalSplit(data.dataset, data.oracle, gen_eval, gen.seed));
      out << "wrote " << data.dataset.size() << " sequences to " << gen_out
          << "\n";
    } else if (*ingest) {
      Dataset d = ingest_flags.Load();
      out << d.size() << " sequences, " << d.registry().size()
          << " event types, " << d.classes().size() << " classes, "
          << d.embeddings().size() << " embeddings (dim "
          << d.embedding_dim() << "), " << d.seed_labels().size()
          << " seed labels\n";
      if (!ingest_out.empty()) SaveDataset(d, ingest_out);
    } else if (*mine) {
      Session s(mine_flags.Load(), mine_flags.Config());
      TemplateQuery q;
      if (!mine_sort.empty()) q.sort = ParseTemplateSortKey(mine_sort);
      q.descending = mine_order == "desc";
      if (!mine_aggregate.empty()) {
        q.aggregate = ParseAggregationMode(mine_aggregate);
      }
      if (!mine_search.empty()) q.search = mine_search;
      if (mine_degree > 0) q.degree = mine_degree;
      std::string body = s.TemplatesBody(q);
      Emit(mine_out, body, out);
      if (!mine_out.empty()) {
        out << (q.aggregate ? s.Templates(q).size() : CountLines(body))
            << " templates written to " << mine_out << "\n";
      }
    } else if (*cluster) {
      Session s(cluster_flags.Load(), cluster_flags.Config());
      ClusterPartition p =
          s.Clusters(cluster_template, cluster_alpha, cluster_lambda);
      Emit(cluster_out, PartitionJson(p, s.dataset()) + "\n", out);
      if (!cluster_out.empty()) {
        out << p.clusters.size() << " clusters, total_dl "
            << FormatDouble(p.total_dl) << "\n";
      }
    } else if (*retrieve) {
      Session s(retrieve_flags.Load(), retrieve_flags.Config());
      RetrieveRequest r;
      r.anchors = SplitList(retrieve_anchors);
      if (!retrieve_candidates.empty()) {
        r.candidates = SplitList(retrieve_candidates);
      }
      r.w = retrieve_w;
      r.top_k = retrieve_top_k;
      std::string body = s.RetrieveBody(r);
      Emit(retrieve_out, body, out);
      if (!retrieve_out.empty()) {
        out << CountLines(body) << " videos written to " << retrieve_out
            << "\n";
      }
    } else if (*label) {
      Session s(label_flags.Load(), label_flags.Config());
      std::vector<std::string> ids = SplitList(label_ids);
      if (!label_ids_file.empty()) {
        for (std::string &id : ReadIds(label_ids_file)) ids.push_back(id);
      }
      if (ids.empty()) throw InvalidArgument("no ids given");
      LabelSource source = label_source == "template"
                               ? LabelSource::Template(label_template)
                               : LabelSource::Manual();
      ApplyResult r = s.Label(ids, label_class, source, label_actor);
      out << "applied " << r.applied << " labels, " << r.conflicts_raised.size()
          << " conflicts";
      for (const std::string &c : r.conflicts_raised) out << " " << c;
      out << "\n";
    } else if (*resolve) {
      Session s(resolve_flags.Load(), resolve_flags.Config());
      s.Resolve(resolve_video, resolve_class, "cli");
      out << resolve_video << " resolved to " << resolve_class << "\n";
    } else if (*history) {
      Session s(history_flags.Load(), history_flags.Config());
      out << s.HistoryBody(history_video.empty()
                               ? std::nullopt
                               : std::optional<std::string>(history_video));
    } else if (*retrain) {
      Session s(retrain_flags.Load(), retrain_flags.Config());
      RetrainReply r = s.Retrain(retrain_force);
      if (r.retrained) {
        out << "iteration " << r.record->iteration << ": "
            << r.record->labeled_count << " labeled, f1 "
            << FormatDouble(r.record->overall_f1) << "\n";
      } else {
        out << "threshold not reached (" << r.pending << " of "
            << r.threshold << " new labels)\n";
      }
    } else if (*metrics) {
      Session s(metrics_flags.Load(), metrics_flags.Config());
      std::string body;
      if (metrics_format == "table") {
        std::ostringstream table;
        std::vector<std::string> classes;
        for (const ClassInfo &c : s.dataset().classes()) classes.push_back(c.id);
        WriteRecordTable(table, s.records(), classes);
        body = table.str();
      } else {
        body = s.MetricsBody();
      }
      Emit(metrics_out, body, out);
    } else if (*videos) {
      Session s(videos_flags.Load(), videos_flags.Config());
      VideoQuery q;
      if (!videos_template.empty()) q.template_symbols = videos_template;
      q.cluster = videos_cluster;
      if (!videos_labeled.empty()) q.labeled = videos_labeled == "true";
      out << s.VideosBody(q);
    } else if (*project) {
      Session s(project_flags.Load(), project_flags.Config());
      Emit(project_out, s.ProjectionBody(), out);
    } else if (*simulate) {
      Dataset d = sim_flags.Load();
      fs::path oracle_path = sim_oracle;
      if (oracle_path.empty()) {
        if (sim_flags.data.empty()) throw InvalidArgument("need --oracle");
        oracle_path = fs::path(sim_flags.data) / "oracle.jsonl";
      }
      auto oracle = ReadTruthFile(oracle_path);
      sim.strategy = ParseSimulationStrategy(sim_strategy);
      // The split and the model share one seed.
      sim.seed = sim_flags.seed;
      sim.training.seed = sim_flags.seed;
      SimulationResult r = Simulate(d, oracle, sim);
      std::vector<std::string> classes;
      for (const ClassInfo &c : d.classes()) classes.push_back(c.id);
      std::ostringstream curve;
      WriteCurve(curve, r, classes);
      if (!sim_out.empty()) Emit(sim_out, curve.str(), out);
      out << "strategy " << ToString(r.strategy) << ": "
          << (r.reached ? "target reached" : "target not reached")
          << " with " << r.curve.back().labeled_count << " labels, f1 "
          << FormatDouble(r.curve.back().f1) << ", " << r.rounds.size()
          << " rounds\n";
    } else if (*serve) {
      Session s(serve_flags.Load(), serve_flags.Config());
      HttpService service(s);
      int port = service.Bind(serve_host, serve_port);
      out << "listening on " << serve_host << ":" << port << std::endl;
      service.Run();
    }
  } catch (const ValidationError &e) {
    err << "error: " << e.what() << "\n";
    for (const Issue &i : e.issues()) err << "  " << i.ToString() << "\n";
    return 1;
  } catch (const std::exception &e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace seqlab
