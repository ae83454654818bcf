#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "seqlab/core/error.h"
#include "seqlab/retrieval/similarity.h"
#include "test_util.h"

using namespace seqlab;

namespace {

std::vector<std::string> Order(const std::vector<RetrievalHit> &hits) {
  std::vector<std::string> ids;
  for (const RetrievalHit &h : hits) ids.push_back(h.video_id);
  return ids;
}

}  // namespace

TEST_CASE("sequence similarity") {
  CHECK(SequenceSimilarity("ABC", "ABC") == 1.0);
  CHECK(SequenceSimilarity("ABC", "AC") == doctest::Approx(2.0 / 3.0));
  CHECK(SequenceSimilarity("AB", "CD") == 0.0);
  CHECK(SequenceSimilarity("", "") == 1.0);
  CHECK(SequenceSimilarity("", "A") == 0.0);
}

TEST_CASE("embedding similarity") {
  std::vector<double> u = {1, 2, 3};
  CHECK(EmbeddingSimilarity(u, u) == doctest::Approx(1.0).epsilon(1e-15));
  std::vector<double> x = {1, 0}, y = {0, 1}, nx = {-1, 0};
  CHECK(EmbeddingSimilarity(x, y) == 0.0);
  CHECK(EmbeddingSimilarity(x, nx) == 0.0);
  std::vector<double> zero = {0, 0};
  CHECK_THROWS_AS(EmbeddingSimilarity(x, zero), InvalidArgument);
  CHECK_THROWS_AS(EmbeddingSimilarity(x, u), InvalidArgument);
}

TEST_CASE("weights are validated") {
  CHECK_THROWS_AS(SimilarityWeights(-0.01), InvalidArgument);
  CHECK_THROWS_AS(SimilarityWeights(1.5), InvalidArgument);
  CHECK(SimilarityWeights(1.0).w() == 1.0);
}

TEST_CASE("total similarity") {
  // sim_e(ABC, AC) = 2/3; the embeddings are chosen so sim_v = 0.4.
  const double c = 0.4, s = std::sqrt(1 - c * c);
  Dataset d = testing::MakeDataset({{"a", "ABC"}, {"b", "AC"}}, "ABC",
                                   {"c1", "c2"},
                                   {{"a", {1.0, 0.0}}, {"b", {c, s}}});
  const double se = SequenceSimilarity("ABC", "AC");
  const double sv = EmbeddingSimilarity(*d.Embedding("a"), *d.Embedding("b"));
  CHECK(sv == doctest::Approx(0.4).epsilon(1e-12));
  CHECK(TotalSimilarity("a", "b", d, SimilarityWeights(1.0)) == se);
  CHECK(TotalSimilarity("a", "b", d, SimilarityWeights(0.0)) == sv);
  CHECK(TotalSimilarity("a", "b", d, SimilarityWeights(0.5)) ==
        doctest::Approx(0.5333).epsilon(1e-3));

  // The slope in w is sim_e - sim_v.
  const double h = 1e-3;
  for (double w = h; w < 1.0 - h; w += 0.05) {
    double up = TotalSimilarity("a", "b", d, SimilarityWeights(w + h));
    double down = TotalSimilarity("a", "b", d, SimilarityWeights(w - h));
    CHECK(std::abs((up - down) / (2 * h) - (se - sv)) < 1e-9);
  }
  CHECK_THROWS_AS(TotalSimilarity("a", "zz", d, SimilarityWeights(1.0)),
                  InvalidArgument);
}

TEST_CASE("total similarity without embeddings") {
  Dataset d = testing::MakeDataset({{"a", "AB"}, {"b", "AB"}}, "AB");
  CHECK(TotalSimilarity("a", "b", d, SimilarityWeights(1.0)) == 1.0);
  CHECK_THROWS_AS(TotalSimilarity("a", "b", d, SimilarityWeights(0.5)),
                  InvalidArgument);
}

TEST_CASE("retrieve examples") {
  Dataset d = testing::MakeDataset(
      {{"anchor", "ABCD"}, {"dup", "ABCD"}, {"far", "XYXY"}, {"a2", "XYXX"}},
      "ABCDXY");
  RetrievalOptions opt{SimilarityWeights(1.0), std::nullopt,
                       AnchorAggregation::kMax};
  auto hits = Retrieve({"anchor"}, {"far", "dup"}, d, opt);
  REQUIRE(hits.size() == 2);
  CHECK(hits[0].video_id == "dup");
  CHECK(hits[0].sim_total == 1.0);

  hits = Retrieve({"anchor", "a2"}, {"far"}, d, opt);
  REQUIRE(hits.size() == 1);
  CHECK(hits[0].best_anchor_id == "a2");
  CHECK(hits[0].sim_total == 0.75);

  opt.top_k = 1;
  hits = Retrieve({"anchor"}, {"far", "dup", "a2"}, d, opt);
  CHECK(Order(hits) == std::vector<std::string>{"dup"});

  opt.top_k.reset();
  opt.aggregation = AnchorAggregation::kMean;
  hits = Retrieve({"anchor", "a2"}, {"dup"}, d, opt);
  CHECK(hits[0].sim_total == doctest::Approx(0.5));

  CHECK_THROWS_AS(Retrieve({}, {"dup"}, d, opt), InvalidArgument);
  CHECK_THROWS_AS(Retrieve({"dup"}, {"dup"}, d, opt), InvalidArgument);
  CHECK_THROWS_AS(Retrieve({"ghost"}, {"dup"}, d, opt), InvalidArgument);
}

TEST_CASE("retrieve: ties by id, scores in range, rescale invariance") {
  std::mt19937_64 rng(13);
  std::normal_distribution<double> g;
  for (int t = 0; t < 20; ++t) {
    std::map<std::string, std::string> symbols;
    std::map<std::string, std::vector<double>> emb, scaled;
    for (int i = 0; i < 15; ++i) {
      std::string id = "v" + std::to_string(i);
      symbols[id] = testing::RandomString(rng, 6, "ABC", 1);
      emb[id] = {g(rng), g(rng), g(rng)};
      const double k = 0.01 + 100.0 * std::abs(g(rng));
      for (double x : emb[id]) scaled[id].push_back(x * k + g(rng));
    }
    Dataset a = testing::MakeDataset(symbols, "ABC", {"c1", "c2"}, emb);
    Dataset b = testing::MakeDataset(symbols, "ABC", {"c1", "c2"}, scaled);
    std::vector<std::string> anchors = {"v0", "v1"}, cands;
    for (int i = 2; i < 15; ++i) cands.push_back("v" + std::to_string(i));

    RetrievalOptions w1{SimilarityWeights(1.0), std::nullopt,
                        AnchorAggregation::kMax};
    auto ha = Retrieve(anchors, cands, a, w1);
    CHECK(Order(ha) == Order(Retrieve(anchors, cands, b, w1)));
    for (size_t i = 1; i < ha.size(); ++i) {
      bool ordered = ha[i - 1].sim_total > ha[i].sim_total ||
                     (ha[i - 1].sim_total == ha[i].sim_total &&
                      ha[i - 1].video_id < ha[i].video_id);
      CHECK(ordered);
    }
    RetrievalOptions half{SimilarityWeights(0.5), std::nullopt,
                          AnchorAggregation::kMax};
    for (const RetrievalHit &h : Retrieve(anchors, cands, a, half)) {
      CHECK(h.sim_total >= 0.0);
      CHECK(h.sim_total <= 1.0);
      CHECK(h.sim_v >= 0.0);
    }
  }
}
