#include "seqlab/model/classifier.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "json.hpp"
#include "seqlab/core/error.h"

namespace seqlab {

using json = nlohmann::json;

std::vector<double> Softmax(const SoftmaxParams &params,
                            const std::vector<double> &x) {
  const size_t k = params.num_classes;
  const size_t f = params.num_features;
  std::vector<double> logits(k);
  for (size_t c = 0; c < k; ++c) {
    const double *w = &params.values[c * f];
    double z = params.B(c);
    for (size_t j = 0; j < f; ++j) z += w[j] * x[j];
    logits[c] = z;
  }
  double top = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (double &z : logits) {
    z = std::exp(z - top);
    sum += z;
  }
  for (double &z : logits) z /= sum;
  return logits;
}

double SoftmaxLoss(const SoftmaxParams &params,
                   const std::vector<std::vector<double>> &x,
                   const std::vector<size_t> &y, double l2,
                   std::vector<double> *gradient) {
  const size_t k = params.num_classes;
  const size_t f = params.num_features;
  const double n = static_cast<double>(x.size());
  if (gradient) gradient->assign(params.values.size(), 0.0);
  double loss = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    std::vector<double> p = Softmax(params, x[i]);
    loss -= std::log(std::max(p[y[i]], 1e-300));
    if (!gradient) continue;
    for (size_t c = 0; c < k; ++c) {
      const double d = (p[c] - (c == y[i] ? 1.0 : 0.0)) / n;
      double *g = &(*gradient)[c * f];
      for (size_t j = 0; j < f; ++j) g[j] += d * x[i][j];
      (*gradient)[k * f + c] += d;
    }
  }
  loss /= n;
  double reg = 0.0;
  for (size_t j = 0; j < k * f; ++j) {
    reg += params.values[j] * params.values[j];
    if (gradient) (*gradient)[j] += l2 * params.values[j];
  }
  return loss + 0.5 * l2 * reg;
}

Classifier Classifier::Train(const std::vector<FeatureVector> &features,
                             const std::vector<std::string> &labels,
                             const TrainingConfig &config) {
  if (features.size() != labels.size()) {
    throw InvalidArgument("features and labels differ in length");
  }
  std::set<std::string> distinct(labels.begin(), labels.end());
  if (distinct.size() < 2) {
    throw InvalidArgument("training needs at least two classes");
  }
  const size_t dim = features.front().size();
  for (const FeatureVector &f : features) {
    if (f.size() != dim) throw InvalidArgument("ragged feature matrix");
  }

  Classifier model;
  model.classes_.assign(distinct.begin(), distinct.end());
  const double n = static_cast<double>(features.size());
  model.mean_.assign(dim, 0.0);
  model.scale_.assign(dim, 1.0);
  for (const FeatureVector &f : features) {
    for (size_t j = 0; j < dim; ++j) model.mean_[j] += f[j];
  }
  for (double &m : model.mean_) m /= n;
  std::vector<double> var(dim, 0.0);
  for (const FeatureVector &f : features) {
    for (size_t j = 0; j < dim; ++j) {
      double d = f[j] - model.mean_[j];
      var[j] += d * d;
    }
  }
  for (size_t j = 0; j < dim; ++j) {
    double sd = std::sqrt(var[j] / n);
    model.scale_[j] = sd > 1e-12 ? sd : 1.0;
  }

  std::vector<std::vector<double>> x;
  x.reserve(features.size());
  for (const FeatureVector &f : features) x.push_back(model.Standardize(f));
  std::vector<size_t> y;
  y.reserve(labels.size());
  for (const std::string &l : labels) {
    y.push_back(static_cast<size_t>(
        std::lower_bound(model.classes_.begin(), model.classes_.end(), l) -
        model.classes_.begin()));
  }

  SoftmaxParams &p = model.params_;
  p.num_classes = model.classes_.size();
  p.num_features = dim;
  p.values.assign(p.num_classes * dim + p.num_classes, 0.0);
  std::mt19937_64 rng(config.seed);
  std::uniform_real_distribution<double> init(-0.01, 0.01);
  for (size_t j = 0; j < p.num_classes * dim; ++j) p.values[j] = init(rng);

  // Adam.
  constexpr double kBeta1 = 0.9;
  constexpr double kBeta2 = 0.999;
  constexpr double kEps = 1e-8;
  std::vector<double> m(p.values.size(), 0.0);
  std::vector<double> v(p.values.size(), 0.0);
  std::vector<double> grad;
  double b1 = 1.0, b2 = 1.0;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    SoftmaxLoss(p, x, y, config.l2, &grad);
    b1 *= kBeta1;
    b2 *= kBeta2;
    for (size_t j = 0; j < p.values.size(); ++j) {
      m[j] = kBeta1 * m[j] + (1.0 - kBeta1) * grad[j];
      v[j] = kBeta2 * v[j] + (1.0 - kBeta2) * grad[j] * grad[j];
      double mhat = m[j] / (1.0 - b1);
      double vhat = v[j] / (1.0 - b2);
      p.values[j] -= config.learning_rate * mhat / (std::sqrt(vhat) + kEps);
    }
  }
  return model;
}

std::vector<double> Classifier::Standardize(
    const FeatureVector &features) const {
  if (features.size() != mean_.size()) {
    throw InvalidArgument("feature dimension does not match the model");
  }
  std::vector<double> x(features.size());
  for (size_t j = 0; j < x.size(); ++j) {
    x[j] = (features[j] - mean_[j]) / scale_[j];
  }
  return x;
}

std::vector<double> Classifier::PredictProba(
    const FeatureVector &features) const {
  return Softmax(params_, Standardize(features));
}

std::string Classifier::Predict(const FeatureVector &features) const {
  std::vector<double> p = PredictProba(features);
  return classes_[static_cast<size_t>(
      std::max_element(p.begin(), p.end()) - p.begin())];
}

double Classifier::ProbabilityOf(const FeatureVector &features,
                                 const std::string &class_id) const {
  auto it = std::lower_bound(classes_.begin(), classes_.end(), class_id);
  if (it == classes_.end() || *it != class_id) return 0.0;
  return PredictProba(features)[static_cast<size_t>(it - classes_.begin())];
}

void Classifier::Save(std::ostream &out) const {
  json j;
  j["classes"] = classes_;
  j["mean"] = mean_;
  j["scale"] = scale_;
  j["num_features"] = params_.num_features;
  j["values"] = params_.values;
  out << j.dump() << "\n";
}

Classifier Classifier::Load(std::istream &in) {
  try {
    json j = json::parse(in);
    Classifier c;
    c.classes_ = j.at("classes").get<std::vector<std::string>>();
    c.mean_ = j.at("mean").get<std::vector<double>>();
    c.scale_ = j.at("scale").get<std::vector<double>>();
    c.params_.num_classes = c.classes_.size();
    c.params_.num_features = j.at("num_features").get<size_t>();
    c.params_.values = j.at("values").get<std::vector<double>>();
    if (c.params_.values.size() !=
            c.params_.num_classes * (c.params_.num_features + 1) ||
        c.mean_.size() != c.params_.num_features ||
        c.scale_.size() != c.params_.num_features) {
      throw InvalidArgument("inconsistent model dimensions");
    }
    return c;
  } catch (const json::exception &e) {
    throw InvalidArgument(std::string("bad model file: ") + e.what());
  }
}

bool Classifier::operator==(const Classifier &other) const {
  return classes_ == other.classes_ && mean_ == other.mean_ &&
         scale_ == other.scale_ &&
         params_.num_features == other.params_.num_features &&
         params_.values == other.params_.values;
}

Classifier TrainOnVideos(const std::vector<std::string> &video_ids,
                         const std::map<std::string, std::string> &labels,
                         const FeatureSpace &space,
                         const TrainingConfig &config) {
  std::vector<FeatureVector> x;
  std::vector<std::string> y;
  x.reserve(video_ids.size());
  for (const std::string &id : video_ids) {
    auto it = labels.find(id);
    if (it == labels.end()) {
      throw InvalidArgument("no label for training video '" + id + "'");
    }
    x.push_back(space.Featurize(id));
    y.push_back(it->second);
  }
  if (x.empty()) throw InvalidArgument("empty training set");
  return Classifier::Train(x, y, config);
}

double Entropy(const std::vector<double> &probabilities) {
  double h = 0.0;
  for (double p : probabilities) {
    if (p > 0.0) h -= p * std::log(p);
  }
  return h;
}

}  // namespace seqlab
