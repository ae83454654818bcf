#include "seqlab/model/projection.h"

#include <Eigen/Dense>
#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "seqlab/core/dataset_io.h"
#include "seqlab/core/error.h"

namespace seqlab {

namespace {

// Rows of the embedding matrix projected onto its top two principal axes.
// Each axis is oriented so that its largest-magnitude loading is positive.
Eigen::MatrixXd PrincipalComponents(const Eigen::MatrixXd &data) {
  Eigen::RowVectorXd mean = data.colwise().mean();
  Eigen::MatrixXd centered = data.rowwise() - mean;
  Eigen::MatrixXd cov = centered.transpose() * centered;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
  const Eigen::Index d = cov.rows();
  Eigen::MatrixXd axes = Eigen::MatrixXd::Zero(d, 2);
  for (Eigen::Index k = 0; k < std::min<Eigen::Index>(2, d); ++k) {
    Eigen::VectorXd axis = solver.eigenvectors().col(d - 1 - k);
    Eigen::Index top = 0;
    axis.cwiseAbs().maxCoeff(&top);
    if (axis(top) < 0) axis = -axis;
    axes.col(k) = axis;
  }
  return centered * axes;
}

}  // namespace

ProjectionMap Project(const Dataset &dataset, const ProjectionInputs &inputs) {
  ProjectionMap points;
  if (inputs.precomputed) {
    for (const auto &[id, xy] : *inputs.precomputed) {
      if (!dataset.Contains(id)) {
        throw InvalidArgument("projection for unknown video '" + id + "'");
      }
      points.push_back({id, xy.first, xy.second, std::nullopt});
    }
  } else {
    if (dataset.embeddings().empty()) {
      throw InvalidArgument(
          "projection needs embeddings or precomputed coordinates");
    }
    const auto &emb = dataset.embeddings();
    Eigen::MatrixXd data(static_cast<Eigen::Index>(emb.size()),
                         static_cast<Eigen::Index>(dataset.embedding_dim()));
    Eigen::Index row = 0;
    for (const auto &[id, vec] : emb) {
      for (size_t j = 0; j < vec.size(); ++j) {
        data(row, static_cast<Eigen::Index>(j)) = vec[j];
      }
      ++row;
    }
    Eigen::MatrixXd coords = PrincipalComponents(data);
    row = 0;
    for (const auto &[id, vec] : emb) {
      points.push_back({id, coords(row, 0), coords(row, 1), std::nullopt});
      ++row;
    }
  }

  if (inputs.model && inputs.space) {
    for (ProjectedPoint &p : points) {
      std::vector<double> probs =
          inputs.model->PredictProba(inputs.space->Featurize(p.video_id));
      const std::string *truth = nullptr;
      if (inputs.labels) {
        auto it = inputs.labels->current.find(p.video_id);
        if (it != inputs.labels->current.end()) truth = &it->second;
      }
      if (truth) {
        const auto &classes = inputs.model->classes();
        auto it = std::find(classes.begin(), classes.end(), *truth);
        double pt = it == classes.end()
                        ? 0.0
                        : probs[static_cast<size_t>(it - classes.begin())];
        p.error = std::clamp(1.0 - pt, 0.0, 1.0);
      } else {
        p.error = std::clamp(
            1.0 - *std::max_element(probs.begin(), probs.end()), 0.0, 1.0);
      }
    }
  }
  return points;
}

std::map<std::string, std::pair<double, double>> ReadProjectionFile(
    const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open projection file " + path.string());
  std::map<std::string, std::pair<double, double>> out;
  std::vector<Issue> issues;
  std::string line;
  int line_no = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (!header) {
      header = true;
      if (line != "video_id,x,y") {
        issues.push_back({path.string(), line_no, "", "header must be video_id,x,y"});
        break;
      }
      continue;
    }
    std::stringstream ss(line);
    std::string id, xs, ys;
    std::getline(ss, id, ',');
    std::getline(ss, xs, ',');
    std::getline(ss, ys, ',');
    double x = 0, y = 0;
    auto rx = std::from_chars(xs.data(), xs.data() + xs.size(), x);
    auto ry = std::from_chars(ys.data(), ys.data() + ys.size(), y);
    if (id.empty() || rx.ec != std::errc() || ry.ec != std::errc()) {
      issues.push_back({path.string(), line_no, id, "bad projection row"});
      continue;
    }
    if (!out.emplace(id, std::make_pair(x, y)).second) {
      issues.push_back({path.string(), line_no, id, "duplicate video_id"});
    }
  }
  if (!issues.empty()) throw ValidationError(std::move(issues));
  return out;
}

void WriteProjection(std::ostream &out, const ProjectionMap &projection) {
  out << "video_id,x,y,error\n";
  for (const ProjectedPoint &p : projection) {
    out << p.video_id << "," << FormatDouble(p.x) << "," << FormatDouble(p.y)
        << ",";
    if (p.error) out << FormatDouble(*p.error);
    out << "\n";
  }
}

}  // namespace seqlab
