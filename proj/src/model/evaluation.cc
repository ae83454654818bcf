#include "seqlab/model/evaluation.h"

#include <algorithm>
#include <ostream>

#include "json.hpp"
#include "seqlab/core/dataset_io.h"
#include "seqlab/core/error.h"

namespace seqlab {

using json = nlohmann::json;

size_t ConfusionMatrix::RowSum(size_t r) const {
  size_t s = 0;
  for (size_t c : counts[r]) s += c;
  return s;
}

size_t ConfusionMatrix::ColSum(size_t c) const {
  size_t s = 0;
  for (const auto &row : counts) s += row[c];
  return s;
}

double MacroF1(const ConfusionMatrix &matrix) {
  double sum = 0.0;
  size_t present = 0;
  for (size_t k = 0; k < matrix.classes.size(); ++k) {
    const size_t tp = matrix.counts[k][k];
    const size_t fn = matrix.RowSum(k) - tp;
    const size_t fp = matrix.ColSum(k) - tp;
    if (tp + fn + fp == 0) continue;
    ++present;
    sum += 2.0 * static_cast<double>(tp) /
           static_cast<double>(2 * tp + fp + fn);
  }
  return present == 0 ? 0.0 : sum / static_cast<double>(present);
}

IterationRecord EvaluatePredictions(const std::vector<std::string> &classes,
                                    const std::vector<std::string> &truth,
                                    const std::vector<std::string> &predicted) {
  if (truth.empty()) throw InvalidArgument("empty test set");
  if (truth.size() != predicted.size()) {
    throw InvalidArgument("truth and predictions differ in length");
  }
  auto index = [&classes](const std::string &c) {
    auto it = std::find(classes.begin(), classes.end(), c);
    if (it == classes.end()) throw InvalidArgument("unknown class '" + c + "'");
    return static_cast<size_t>(it - classes.begin());
  };
  IterationRecord record;
  record.confusion.classes = classes;
  record.confusion.counts.assign(classes.size(),
                                 std::vector<size_t>(classes.size(), 0));
  for (size_t i = 0; i < truth.size(); ++i) {
    ++record.confusion.counts[index(truth[i])][index(predicted[i])];
  }
  for (size_t k = 0; k < classes.size(); ++k) {
    size_t row = record.confusion.RowSum(k);
    if (row == 0) continue;
    record.per_class_accuracy[classes[k]] =
        static_cast<double>(record.confusion.counts[k][k]) /
        static_cast<double>(row);
  }
  record.overall_f1 = MacroF1(record.confusion);
  return record;
}

IterationRecord Evaluate(const Classifier &model,
                         const std::vector<std::string> &test_ids,
                         const std::map<std::string, std::string> &truth,
                         const FeatureSpace &space,
                         const std::vector<std::string> &classes) {
  if (test_ids.empty()) throw InvalidArgument("empty test set");
  std::vector<std::string> t, p;
  t.reserve(test_ids.size());
  p.reserve(test_ids.size());
  for (const std::string &id : test_ids) {
    auto it = truth.find(id);
    if (it == truth.end()) {
      throw InvalidArgument("no ground truth for test video '" + id + "'");
    }
    t.push_back(it->second);
    p.push_back(model.Predict(space.Featurize(id)));
  }
  return EvaluatePredictions(classes, t, p);
}

std::string RecordToJson(const IterationRecord &r) {
  json j;
  j["iteration"] = r.iteration;
  j["labeled_count"] = r.labeled_count;
  j["per_class_accuracy"] = r.per_class_accuracy;
  j["overall_f1"] = r.overall_f1;
  j["classes"] = r.confusion.classes;
  j["confusion_matrix"] = r.confusion.counts;
  j["timestamp_ms"] = r.timestamp_ms;
  return j.dump();
}

IterationRecord RecordFromJson(const std::string &line) {
  try {
    json j = json::parse(line);
    IterationRecord r;
    r.iteration = j.at("iteration").get<int>();
    r.labeled_count = j.at("labeled_count").get<size_t>();
    r.per_class_accuracy =
        j.at("per_class_accuracy").get<std::map<std::string, double>>();
    r.overall_f1 = j.at("overall_f1").get<double>();
    r.confusion.classes = j.at("classes").get<std::vector<std::string>>();
    r.confusion.counts =
        j.at("confusion_matrix").get<std::vector<std::vector<size_t>>>();
    r.timestamp_ms = j.value("timestamp_ms", int64_t{0});
    return r;
  } catch (const json::exception &e) {
    throw InvalidArgument(std::string("bad iteration record: ") + e.what());
  }
}

void WriteRecordTable(std::ostream &out,
                      const std::vector<IterationRecord> &records,
                      const std::vector<std::string> &classes) {
  out << "iteration,labeled_count,f1";
  for (const std::string &c : classes) out << "," << c;
  out << "\n";
  for (const IterationRecord &r : records) {
    out << r.iteration << "," << r.labeled_count << ","
        << FormatDouble(r.overall_f1);
    for (const std::string &c : classes) {
      out << ",";
      auto it = r.per_class_accuracy.find(c);
      if (it != r.per_class_accuracy.end()) out << FormatDouble(it->second);
    }
    out << "\n";
  }
}

}  // namespace seqlab
