#include "seqlab/model/simulation.h"

#include <algorithm>
#include <ostream>
#include <random>
#include <set>
#include <tuple>

#include "seqlab/core/dataset_io.h"
#include "seqlab/core/error.h"
#include "seqlab/model/evaluation.h"

namespace seqlab {

std::string ToString(SimulationStrategy strategy) {
  switch (strategy) {
    case SimulationStrategy::kTemplate:
      return "template";
    case SimulationStrategy::kUncertainty:
      return "uncertainty";
    case SimulationStrategy::kRandom:
      return "random";
  }
  return "template";
}

SimulationStrategy ParseSimulationStrategy(const std::string &name) {
  if (name == "template") return SimulationStrategy::kTemplate;
  if (name == "uncertainty") return SimulationStrategy::kUncertainty;
  if (name == "random") return SimulationStrategy::kRandom;
  throw InvalidArgument("unknown strategy '" + name + "'");
}

std::vector<std::string> SelectByUncertainty(
    const Classifier &model, const FeatureSpace &space,
    const std::vector<std::string> &unlabeled, size_t batch_size) {
  std::vector<std::pair<double, std::string>> scored;
  scored.reserve(unlabeled.size());
  for (const std::string &id : unlabeled) {
    scored.emplace_back(Entropy(model.PredictProba(space.Featurize(id))), id);
  }
  const size_t n = std::min(batch_size, scored.size());
  std::partial_sort(scored.begin(), scored.begin() + n, scored.end(),
                    [](const auto &a, const auto &b) {
                      if (a.first != b.first) return a.first > b.first;
                      return a.second < b.second;
                    });
  std::vector<std::string> out;
  for (size_t i = 0; i < n; ++i) out.push_back(scored[i].second);
  return out;
}

namespace {

// Mined templates with their pool coverage, reused across rounds.
struct TemplateIndex {
  std::vector<std::string> symbols;
  std::vector<std::vector<std::string>> covered;  // pool ids, sorted
};

TemplateIndex BuildTemplateIndex(const Dataset &dataset,
                                 const std::vector<std::string> &pool,
                                 const MiningConstraints &constraints) {
  std::vector<SymbolString> corpus;
  corpus.reserve(pool.size());
  for (const std::string &id : pool) corpus.push_back(dataset.Symbols(id));
  TemplateIndex index;
  for (const Pattern &p : Mine(corpus, constraints)) {
    std::vector<std::string> covered;
    for (size_t i = 0; i < pool.size(); ++i) {
      if (IsSubsequence(p.symbols, corpus[i], constraints.max_gap)) {
        covered.push_back(pool[i]);
      }
    }
    index.symbols.push_back(p.symbols);
    index.covered.push_back(std::move(covered));
  }
  return index;
}

class Simulation {
 public:
  Simulation(const Dataset &dataset,
             const std::map<std::string, std::string> &oracle,
             const SimulationConfig &config)
      : dataset_(dataset),
        oracle_(oracle),
        config_(config),
        space_(dataset),
        rng_(config.seed) {
    for (const ClassInfo &c : dataset.classes()) classes_.push_back(c.id);
    for (const EventSequence &s : dataset.sequences()) {
      features_[s.video_id] = space_.Featurize(s);
    }
  }

  SimulationResult Run() {
    SimulationResult result;
    result.strategy = config_.strategy;
    Split(result);

    const size_t budget =
        config_.max_labels == 0 ? pool_.size()
                                : std::min(config_.max_labels, pool_.size());
    if (config_.strategy == SimulationStrategy::kTemplate) {
      templates_ = BuildTemplateIndex(dataset_, pool_, config_.mining);
    }

    int iteration = 0;
    Classifier model = TrainAndRecord(iteration, result);
    while (!result.reached && labels_.size() < budget) {
      const size_t room = std::min(config_.batch_size, budget - labels_.size());
      SimulationRound round = SelectBatch(model, room);
      if (round.queried.empty()) break;
      for (const std::string &id : round.queried) labels_[id] = oracle_.at(id);
      result.rounds.push_back(std::move(round));
      model = TrainAndRecord(++iteration, result);
    }
    return result;
  }

 private:
  void Split(SimulationResult &result) {
    std::map<std::string, std::vector<std::string>> by_class;
    for (const EventSequence &s : dataset_.sequences()) {
      auto it = oracle_.find(s.video_id);
      if (it == oracle_.end()) {
        throw InvalidArgument("oracle has no label for '" + s.video_id + "'");
      }
      by_class[it->second].push_back(s.video_id);
    }
    for (auto &[cls, ids] : by_class) {
      std::shuffle(ids.begin(), ids.end(), rng_);
      const size_t n_test = static_cast<size_t>(
          config_.test_fraction * static_cast<double>(ids.size()) + 0.5);
      for (size_t i = 0; i < ids.size(); ++i) {
        if (i < n_test) {
          result.test_ids.push_back(ids[i]);
        } else if (i < n_test + config_.initial_per_class) {
          result.initial_ids.push_back(ids[i]);
          pool_.push_back(ids[i]);
          labels_[ids[i]] = cls;
        } else {
          pool_.push_back(ids[i]);
        }
      }
    }
    std::sort(result.test_ids.begin(), result.test_ids.end());
    std::sort(result.initial_ids.begin(), result.initial_ids.end());
    std::sort(pool_.begin(), pool_.end());
    test_ids_ = result.test_ids;
    std::set<std::string> distinct;
    for (const auto &[id, cls] : labels_) distinct.insert(cls);
    if (distinct.size() < 2) {
      throw InvalidArgument("simulation needs initial labels from >= 2 classes");
    }
  }

  Classifier TrainAndRecord(int iteration, SimulationResult &result) {
    std::vector<FeatureVector> x;
    std::vector<std::string> y;
    for (const auto &[id, cls] : labels_) {
      x.push_back(features_.at(id));
      y.push_back(cls);
    }
    Classifier model = Classifier::Train(x, y, config_.training);
    std::vector<std::string> truth, predicted;
    for (const std::string &id : test_ids_) {
      truth.push_back(oracle_.at(id));
      predicted.push_back(model.Predict(features_.at(id)));
    }
    IterationRecord record = EvaluatePredictions(classes_, truth, predicted);
    result.curve.push_back(
        {iteration, labels_.size(), record.overall_f1,
         record.per_class_accuracy});
    if (record.overall_f1 >= config_.target_f1 && !result.reached) {
      result.reached = true;
      result.labels_to_target = labels_.size();
    }
    return model;
  }

  std::vector<std::string> Unlabeled() const {
    std::vector<std::string> out;
    for (const std::string &id : pool_) {
      if (!labels_.count(id)) out.push_back(id);
    }
    return out;
  }

  SimulationRound SelectBatch(const Classifier &model, size_t room) {
    SimulationRound round;
    std::vector<std::string> unlabeled = Unlabeled();
    if (unlabeled.empty()) return round;
    switch (config_.strategy) {
      case SimulationStrategy::kUncertainty:
        round.queried = SelectByUncertainty(model, space_, unlabeled, room);
        break;
      case SimulationStrategy::kRandom:
        round.queried = RandomBatch(unlabeled, room);
        break;
      case SimulationStrategy::kTemplate:
        round = TemplateBatch(model, room);
        if (round.queried.empty()) round.queried = RandomBatch(unlabeled, room);
        break;
    }
    return round;
  }

  std::vector<std::string> RandomBatch(std::vector<std::string> unlabeled,
                                       size_t room) {
    std::shuffle(unlabeled.begin(), unlabeled.end(), rng_);
    unlabeled.resize(std::min(room, unlabeled.size()));
    std::sort(unlabeled.begin(), unlabeled.end());
    return unlabeled;
  }

  // Templates are ranked by purity. Among equally pure templates the one
  // where the current model most often disagrees with the template's
  // majority class comes first, since that is where new labels change the
  // model. Remaining ties go to the class with the fewest labels, then to
  // more labeled evidence. The batch is spread over the best template of
  // each majority class so one class cannot absorb every query. Inside a
  // template, videos the model assigns to another class go first, each
  // group ordered by prediction entropy.
  SimulationRound TemplateBatch(const Classifier &model, size_t room) {
    SimulationRound round;
    std::map<std::string, size_t> class_totals;
    for (const auto &[id, cls] : labels_) ++class_totals[cls];
    std::map<std::string, std::string> predicted;
    std::map<std::string, double> entropy;
    for (const std::string &id : pool_) {
      if (labels_.count(id)) continue;
      std::vector<double> p = model.PredictProba(features_.at(id));
      predicted[id] = model.Predict(features_.at(id));
      entropy[id] = Entropy(p);
    }

    struct Choice {
      double purity;
      double agreement;
      size_t majority_total;
      size_t labeled;
      size_t index;
      std::string majority;
    };
    auto key = [](const Choice &c) {
      return std::make_tuple(-c.purity, c.agreement, c.majority_total,
                             -static_cast<double>(c.labeled), c.index);
    };
    std::vector<Choice> choices;
    for (size_t t = 0; t < templates_.symbols.size(); ++t) {
      std::map<std::string, size_t> counts;
      size_t labeled = 0;
      for (const std::string &id : templates_.covered[t]) {
        auto it = labels_.find(id);
        if (it == labels_.end()) continue;
        ++counts[it->second];
        ++labeled;
      }
      const size_t unlabeled = templates_.covered[t].size() - labeled;
      if (labeled == 0 || unlabeled == 0) continue;
      std::string majority;
      size_t top = 0;
      for (const auto &[cls, n] : counts) {
        if (n > top) {
          top = n;
          majority = cls;
        }
      }
      size_t agree = 0;
      for (const std::string &id : templates_.covered[t]) {
        auto it = predicted.find(id);
        if (it != predicted.end() && it->second == majority) ++agree;
      }
      choices.push_back({static_cast<double>(top) / static_cast<double>(labeled),
                         static_cast<double>(agree) / static_cast<double>(unlabeled),
                         class_totals[majority], labeled, t, majority});
    }
    if (choices.empty()) return round;
    std::sort(choices.begin(), choices.end(),
              [&](const Choice &a, const Choice &b) { return key(a) < key(b); });

    std::vector<const Choice *> picked;
    std::set<std::string> seen;
    for (const Choice &c : choices) {
      if (seen.insert(c.majority).second) picked.push_back(&c);
    }
    const size_t share = (room + picked.size() - 1) / picked.size();
    std::set<std::string> taken;
    auto by_entropy = [&](const std::string &a, const std::string &b) {
      return std::make_pair(-entropy.at(a), a) < std::make_pair(-entropy.at(b), b);
    };
    for (const Choice *c : picked) {
      std::vector<std::string> disputed, agreed;
      for (const std::string &id : templates_.covered[c->index]) {
        if (labels_.count(id) || taken.count(id)) continue;
        (predicted.at(id) == c->majority ? agreed : disputed).push_back(id);
      }
      std::sort(disputed.begin(), disputed.end(), by_entropy);
      std::sort(agreed.begin(), agreed.end(), by_entropy);
      disputed.insert(disputed.end(), agreed.begin(), agreed.end());
      size_t got = 0;
      for (const std::string &id : disputed) {
        if (got == share || round.queried.size() == room) break;
        round.queried.push_back(id);
        taken.insert(id);
        ++got;
      }
    }
    round.template_symbols = templates_.symbols[choices.front().index];
    return round;
  }

  const Dataset &dataset_;
  const std::map<std::string, std::string> &oracle_;
  SimulationConfig config_;
  FeatureSpace space_;
  std::mt19937_64 rng_;
  std::vector<std::string> classes_;
  std::map<std::string, FeatureVector> features_;
  std::vector<std::string> pool_;
  std::vector<std::string> test_ids_;
  std::map<std::string, std::string> labels_;
  TemplateIndex templates_;
};

}  // namespace

SimulationResult Simulate(const Dataset &dataset,
                          const std::map<std::string, std::string> &oracle,
                          const SimulationConfig &config) {
  if (!(config.target_f1 > 0.0 && config.target_f1 <= 1.0)) {
    throw InvalidArgument("target_f1 must lie in (0, 1]");
  }
  if (config.batch_size == 0) throw InvalidArgument("batch_size must be >= 1");
  if (!(config.test_fraction > 0.0 && config.test_fraction < 1.0)) {
    throw InvalidArgument("test_fraction must lie in (0, 1)");
  }
  if (config.strategy == SimulationStrategy::kTemplate) {
    config.mining.Validate();
  }
  return Simulation(dataset, oracle, config).Run();
}

void WriteCurve(std::ostream &out, const SimulationResult &result,
                const std::vector<std::string> &classes) {
  out << "iteration,labeled_count,f1";
  for (const std::string &c : classes) out << "," << c;
  out << "\n";
  for (const CurvePoint &p : result.curve) {
    out << p.iteration << "," << p.labeled_count << "," << FormatDouble(p.f1);
    for (const std::string &c : classes) {
      out << ",";
      auto it = p.per_class_accuracy.find(c);
      if (it != p.per_class_accuracy.end()) out << FormatDouble(it->second);
    }
    out << "\n";
  }
}

}  // namespace seqlab
