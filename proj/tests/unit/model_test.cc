#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "seqlab/core/error.h"
#include "seqlab/labels/label_store.h"
#include "seqlab/mining/miner.h"
#include "seqlab/model/classifier.h"
#include "seqlab/model/evaluation.h"
#include "seqlab/model/features.h"
#include "seqlab/model/projection.h"
#include "seqlab/model/retrain.h"
#include "seqlab/model/simulation.h"
#include "seqlab/model/synthetic.h"
#include "test_util.h"

using namespace seqlab;

namespace {

// Two classes told apart by which symbol dominates.
struct Toy {
  Dataset dataset;
  std::vector<std::string> ids;
  std::vector<std::string> labels;
};

Toy SeparableToy() {
  std::map<std::string, std::string> symbols;
  std::mt19937_64 rng(4);
  Toy t;
  for (int i = 0; i < 40; ++i) {
    std::string id = "v" + std::to_string(100 + i);
    bool first = i % 2 == 0;
    std::string s(4 + rng() % 3, first ? 'A' : 'B');
    s += first ? 'B' : 'A';
    symbols[id] = s;
    t.ids.push_back(id);
    t.labels.push_back(first ? "c1" : "c2");
  }
  t.dataset = testing::MakeDataset(symbols, "AB");
  return t;
}

std::vector<FeatureVector> FeaturesOf(const FeatureSpace &space,
                                      const std::vector<std::string> &ids) {
  std::vector<FeatureVector> out;
  for (const auto &id : ids) out.push_back(space.Featurize(id));
  return out;
}

}  // namespace

TEST_CASE("featurize") {
  Dataset d = testing::MakeDataset({{"ab", "AB"}, {"e", ""}, {"aaa", "AAA"}}, "AB");
  FeatureSpace space(d);
  CHECK(space.dimension() == 6);
  CHECK(space.Featurize("ab") == FeatureVector{1, 1, 0, 1, 0, 0});
  CHECK(space.Featurize("e") == FeatureVector(6, 0.0));
  CHECK(space.Featurize("aaa") == FeatureVector{3, 0, 2, 0, 0, 0});

  Dataset emb = testing::MakeDataset({{"x", "A"}, {"y", "B"}}, "AB", {"c1", "c2"},
                                     {{"x", {0.5, 2}}, {"y", {1, 1}}});
  FeatureSpace with(emb);
  CHECK(with.uses_embeddings());
  CHECK(with.Featurize("x") == FeatureVector{1, 0, 0, 0, 0, 0, 0.5, 2});
}

TEST_CASE("classifier: separable data, duplicates, determinism") {
  Toy t = SeparableToy();
  FeatureSpace space(t.dataset);
  auto x = FeaturesOf(space, t.ids);
  TrainingConfig cfg;
  Classifier m = Classifier::Train(x, t.labels, cfg);
  for (size_t i = 0; i < x.size(); ++i) CHECK(m.Predict(x[i]) == t.labels[i]);

  CHECK(Classifier::Train(x, t.labels, cfg) == m);

  auto x2 = x;
  auto y2 = t.labels;
  x2.insert(x2.end(), x.begin(), x.end());
  y2.insert(y2.end(), t.labels.begin(), t.labels.end());
  Classifier dup = Classifier::Train(x2, y2, cfg);
  for (const auto &row : x) CHECK(dup.Predict(row) == m.Predict(row));

  std::stringstream buf;
  m.Save(buf);
  CHECK(Classifier::Load(buf) == m);

  CHECK_THROWS_AS(Classifier::Train(x, std::vector<std::string>(x.size(), "c1"), cfg),
                  InvalidArgument);
}

TEST_CASE("softmax gradient matches finite differences") {
  std::mt19937_64 rng(21);
  std::normal_distribution<double> g;
  for (int t = 0; t < 20; ++t) {
    SoftmaxParams p;
    p.num_classes = 2 + rng() % 3;
    p.num_features = 1 + rng() % 4;
    p.values.resize(p.num_classes * p.num_features + p.num_classes);
    for (double &v : p.values) v = g(rng);
    std::vector<std::vector<double>> x(3 + rng() % 5);
    std::vector<size_t> y;
    for (auto &row : x) {
      for (size_t f = 0; f < p.num_features; ++f) row.push_back(g(rng));
      y.push_back(rng() % p.num_classes);
    }
    const double l2 = 0.1;
    std::vector<double> grad;
    SoftmaxLoss(p, x, y, l2, &grad);
    for (size_t i = 0; i < p.values.size(); ++i) {
      const double h = 1e-5, keep = p.values[i];
      p.values[i] = keep + h;
      double up = SoftmaxLoss(p, x, y, l2, nullptr);
      p.values[i] = keep - h;
      double down = SoftmaxLoss(p, x, y, l2, nullptr);
      p.values[i] = keep;
      double numeric = (up - down) / (2 * h);
      double rel = std::abs(numeric - grad[i]) /
                   std::max(std::abs(numeric) + std::abs(grad[i]), 1e-6);
      CHECK(rel < 1e-5);
    }
    for (const auto &row : x) {
      auto prob = Softmax(p, row);
      double sum = 0;
      for (double q : prob) {
        CHECK(q >= 0.0);
        CHECK(q <= 1.0);
        sum += q;
      }
      CHECK(std::abs(sum - 1.0) < 1e-9);
    }
  }
}

TEST_CASE("entropy") {
  CHECK(Entropy({1.0, 0.0}) == 0.0);
  CHECK(Entropy({0.5, 0.5}) == doctest::Approx(std::log(2.0)));
}

TEST_CASE("macro F1") {
  auto perfect = EvaluatePredictions({"c1", "c2"}, {"c1", "c2", "c2"},
                                     {"c1", "c2", "c2"});
  CHECK(perfect.overall_f1 == 1.0);
  CHECK(perfect.confusion.counts[1][1] == 2);

  auto all_c1 = EvaluatePredictions({"c1", "c2"}, {"c1", "c1", "c2", "c2"},
                                    {"c1", "c1", "c1", "c1"});
  CHECK(all_c1.overall_f1 == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(all_c1.per_class_accuracy.at("c1") == 1.0);
  CHECK(all_c1.per_class_accuracy.at("c2") == 0.0);

  std::mt19937_64 rng(6);
  const std::vector<std::string> classes = {"a", "b", "c", "d"};
  for (int t = 0; t < 50; ++t) {
    std::vector<std::string> truth, pred;
    std::map<std::string, size_t> count;
    for (int i = 0; i < 30; ++i) {
      truth.push_back(classes[rng() % 4]);
      pred.push_back(classes[rng() % 4]);
      ++count[truth.back()];
    }
    auto rec = EvaluatePredictions(classes, truth, pred);
    for (size_t r = 0; r < classes.size(); ++r) {
      CHECK(rec.confusion.RowSum(r) == count[classes[r]]);
    }
    CHECK(rec.overall_f1 == MacroF1(rec.confusion));
  }
  CHECK_THROWS_AS(EvaluatePredictions({"c1"}, {"c1"}, {"zz"}), InvalidArgument);

  auto back = RecordFromJson(RecordToJson(all_c1));
  CHECK(back.overall_f1 == all_c1.overall_f1);
  CHECK(back.confusion.counts == all_c1.confusion.counts);
}

TEST_CASE("retrain controller") {
  std::map<std::string, std::string> symbols;
  for (int i = 0; i < 70; ++i) symbols["v" + std::to_string(100 + i)] = i % 2 ? "AAB" : "BBA";
  Dataset d = testing::MakeDataset(symbols, "AB", {"c1", "c2"}, {},
                                   {{"v100", "c2"}, {"v101", "c1"}});
  LabelStore store(d);
  FeatureSpace space(d);
  RetrainController ctl(32);
  const std::vector<std::string> classes = {"c1", "c2"};

  auto label = [&](int from, int to) {
    for (int i = from; i < to; ++i) {
      std::string id = "v" + std::to_string(100 + i);
      store.ApplyLabels({id}, i % 2 ? "c1" : "c2", LabelSource::Manual());
    }
  };
  label(2, 33);
  CHECK(ctl.PendingLabels(store) == 31);
  CHECK_FALSE(ctl.MaybeRetrain(store, space, classes, {}, {}).has_value());
  label(33, 34);
  auto first = ctl.MaybeRetrain(store, space, classes, {}, {});
  REQUIRE(first.has_value());
  CHECK(first->record.iteration == 1);
  CHECK(first->record.labeled_count == 34);
  CHECK(ctl.PendingLabels(store) == 0);
  CHECK(store.iteration() == 2);
  CHECK_FALSE(ctl.MaybeRetrain(store, space, classes, {}, {}).has_value());

  label(34, 40);
  auto second = ctl.MaybeRetrain(store, space, classes, {}, {}, true);
  REQUIRE(second.has_value());
  REQUIRE(ctl.records().size() == 2);
  CHECK(ctl.records()[0].iteration == 1);
  CHECK(ctl.records()[1].iteration == 2);
  CHECK_THROWS_AS(RetrainController(0), InvalidArgument);
}

TEST_CASE("projection") {
  // Points on a 2D plane inside 5D space.
  std::mt19937_64 rng(10);
  std::normal_distribution<double> g;
  const std::vector<double> o = {1, -2, 0.5, 3, 0};
  const double r = 1 / std::sqrt(2.0);
  const std::vector<double> u = {r, r, 0, 0, 0}, v = {0, 0, 0.6, 0.8, 0};
  std::map<std::string, std::string> symbols;
  std::map<std::string, std::vector<double>> emb;
  for (int i = 0; i < 25; ++i) {
    std::string id = "p" + std::to_string(10 + i);
    symbols[id] = "A";
    double a = 3 * g(rng), b = g(rng);
    for (size_t k = 0; k < 5; ++k) emb[id].push_back(o[k] + a * u[k] + b * v[k]);
  }
  Dataset d = testing::MakeDataset(symbols, "A", {"c1", "c2"}, emb);
  ProjectionMap pts = Project(d, {});
  REQUIRE(pts.size() == 25);
  for (size_t i = 0; i < pts.size(); ++i) {
    for (size_t j = i + 1; j < pts.size(); ++j) {
      double orig = 0;
      for (size_t k = 0; k < 5; ++k) {
        double diff = emb[pts[i].video_id][k] - emb[pts[j].video_id][k];
        orig += diff * diff;
      }
      double proj = std::hypot(pts[i].x - pts[j].x, pts[i].y - pts[j].y);
      CHECK(std::abs(std::sqrt(orig) - proj) < 1e-6);
    }
  }

  ProjectionInputs pre;
  pre.precomputed.emplace();
  for (const auto &[id, s] : symbols) (*pre.precomputed)[id] = {id.size() * 0.5, -1.25};
  for (const ProjectedPoint &p : Project(d, pre)) {
    CHECK(p.x == p.video_id.size() * 0.5);
    CHECK(p.y == -1.25);
    CHECK_FALSE(p.error.has_value());
  }
  Dataset bare = testing::MakeDataset({{"a", "A"}}, "A");
  CHECK_THROWS_AS(Project(bare, {}), InvalidArgument);
}

TEST_CASE("projection errors from a model") {
  Toy t = SeparableToy();
  FeatureSpace space(t.dataset);
  Classifier m = Classifier::Train(FeaturesOf(space, t.ids), t.labels, {});
  LabelStore store(t.dataset);
  store.ApplyLabels({t.ids[0]}, t.labels[0], LabelSource::Manual());
  ProjectionInputs in;
  in.precomputed.emplace();
  for (const auto &id : t.ids) (*in.precomputed)[id] = {0, 0};
  in.model = &m;
  in.space = &space;
  in.labels = &store.state();
  for (const ProjectedPoint &p : Project(t.dataset, in)) {
    REQUIRE(p.error.has_value());
    CHECK(*p.error >= 0.0);
    CHECK(*p.error < 0.5);
  }
}

TEST_CASE("synthetic generator") {
  SyntheticConfig cfg;
  cfg.num_sequences = 80;
  cfg.class_patterns = DefaultClassPatterns();
  cfg.noise_rate = 0.0;
  SyntheticData data = GenerateSynthetic(cfg);
  CHECK(data.dataset.size() == 80);
  std::map<std::string, size_t> class_size;
  for (const auto &[id, pattern] : data.planted) {
    CHECK(data.dataset.Symbols(id).find(pattern) != std::string::npos);
    ++class_size[data.oracle.at(id)];
  }

  std::vector<SymbolString> corpus;
  for (const auto &s : data.dataset.sequences()) corpus.push_back(ToSymbolString(s));
  size_t smallest = 1000;
  for (const auto &[c, n] : class_size) smallest = std::min(smallest, n);
  std::set<std::string> planted;
  for (const auto &[id, p] : data.planted) planted.insert(p);
  size_t longest = 0;
  for (const auto &p : planted) longest = std::max(longest, p.size());
  auto mined = Mine(corpus, {smallest, 1, longest, std::nullopt});
  for (const auto &p : planted) {
    bool found = std::any_of(mined.begin(), mined.end(),
                             [&](const Pattern &m) { return m.symbols == p; });
    CHECK_MESSAGE(found, p);
  }

  cfg.noise_rate = 0.2;
  CHECK(GenerateSynthetic(cfg).dataset == GenerateSynthetic(cfg).dataset);
  cfg.seed = 2;
  SyntheticData other = GenerateSynthetic(cfg);
  cfg.seed = 1;
  CHECK_FALSE(other.dataset == GenerateSynthetic(cfg).dataset);
  cfg.noise_rate = 1.0;
  CHECK_THROWS_AS(GenerateSynthetic(cfg), InvalidArgument);
  cfg.noise_rate = 0.2;
  cfg.class_patterns = {{"AZ"}};
  CHECK_THROWS_AS(GenerateSynthetic(cfg), InvalidArgument);
}

TEST_CASE("uncertainty selection is the entropy ranking") {
  Toy t = SeparableToy();
  FeatureSpace space(t.dataset);
  std::vector<std::string> train_ids(t.ids.begin(), t.ids.begin() + 4);
  std::vector<std::string> train_y(t.labels.begin(), t.labels.begin() + 4);
  TrainingConfig cfg;
  cfg.epochs = 5;
  Classifier m = Classifier::Train(FeaturesOf(space, train_ids), train_y, cfg);
  std::vector<std::string> pool(t.ids.begin() + 4, t.ids.end());
  auto picked = SelectByUncertainty(m, space, pool, 1);
  REQUIRE(picked.size() == 1);
  double best = -1;
  std::string arg;
  for (const auto &id : pool) {
    double h = Entropy(m.PredictProba(space.Featurize(id)));
    if (h > best) {
      best = h;
      arg = id;
    }
  }
  CHECK(picked[0] == arg);
  CHECK(SelectByUncertainty(m, space, pool, 100).size() == pool.size());
}

TEST_CASE("simulation") {
  SyntheticConfig gen;
  gen.num_sequences = 200;
  gen.class_patterns = DefaultClassPatterns();
  gen.noise_rate = 0.5;
  gen.embedding_dim = 0;
  SyntheticData data = GenerateSynthetic(gen);

  SimulationConfig cfg;
  cfg.strategy = SimulationStrategy::kRandom;
  cfg.target_f1 = 1.0;
  cfg.max_labels = 30;
  SimulationResult r = Simulate(data.dataset, data.oracle, cfg);
  CHECK_FALSE(r.reached);
  CHECK_FALSE(r.labels_to_target.has_value());
  CHECK(r.curve.back().labeled_count == 30);

  for (auto strategy : {SimulationStrategy::kTemplate,
                        SimulationStrategy::kUncertainty,
                        SimulationStrategy::kRandom}) {
    cfg.strategy = strategy;
    cfg.target_f1 = 0.8;
    cfg.max_labels = 60;
    SimulationResult a = Simulate(data.dataset, data.oracle, cfg);
    for (size_t i = 1; i < a.curve.size(); ++i) {
      CHECK(a.curve[i].labeled_count > a.curve[i - 1].labeled_count);
    }
    SimulationResult b = Simulate(data.dataset, data.oracle, cfg);
    REQUIRE(a.curve.size() == b.curve.size());
    for (size_t i = 0; i < a.curve.size(); ++i) CHECK(a.curve[i].f1 == b.curve[i].f1);
    CHECK(a.test_ids == b.test_ids);
    // Queried ids never touch the test split.
    std::set<std::string> test(a.test_ids.begin(), a.test_ids.end());
    for (const auto &round : a.rounds) {
      for (const auto &id : round.queried) CHECK_FALSE(test.count(id));
    }
  }

  std::ostringstream curve;
  WriteCurve(curve, r, {"c1", "c2", "c3", "c4"});
  CHECK(curve.str().rfind("iteration,labeled_count,f1,c1,c2,c3,c4\n", 0) == 0);

  cfg.target_f1 = 0.0;
  CHECK_THROWS_AS(Simulate(data.dataset, data.oracle, cfg), InvalidArgument);
  cfg.target_f1 = 0.8;
  auto partial = data.oracle;
  partial.erase(partial.begin());
  CHECK_THROWS_AS(Simulate(data.dataset, partial, cfg), InvalidArgument);
  CHECK_THROWS_AS(ParseSimulationStrategy("greedy"), InvalidArgument);
}
