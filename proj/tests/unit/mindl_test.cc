#include <algorithm>
#include <random>

#include "brute_force.h"
#include "doctest.h"
#include "seqlab/core/error.h"
#include "seqlab/mindl/clusterer.h"
#include "seqlab/mindl/edit_distance.h"
#include "seqlab/mindl/lsh.h"
#include "seqlab/mindl/roles.h"
#include "seqlab/mining/subsequence.h"
#include "test_util.h"

using namespace seqlab;

namespace {

std::vector<NamedSequence> Named(const std::vector<std::string> &symbols) {
  std::vector<NamedSequence> out;
  for (size_t i = 0; i < symbols.size(); ++i) {
    out.push_back({"s" + std::to_string(i), symbols[i]});
  }
  return out;
}

double SingletonDL(const std::vector<std::string> &seqs, double lambda) {
  double dl = 0;
  for (const auto &s : seqs) dl += static_cast<double>(s.size()) + lambda;
  return dl;
}

// DL of one cluster holding everything, with the medoid representative.
double SingleClusterDL(const std::vector<std::string> &seqs, double alpha,
                       double lambda) {
  double best = 1e300;
  for (const auto &r : seqs) {
    size_t edits = 0;
    for (const auto &s : seqs) edits += testing::Levenshtein(r, s);
    best = std::min(best, static_cast<double>(r.size()) +
                              alpha * static_cast<double>(edits) + lambda);
  }
  return best;
}

// A random string with seed planted at random positions.
std::string Planted(std::mt19937_64 &rng, const std::string &seed,
                    const std::string &alphabet, size_t max_extra) {
  std::string s = seed;
  size_t extra = rng() % (max_extra + 1);
  for (size_t i = 0; i < extra; ++i) {
    s.insert(s.begin() + static_cast<long>(rng() % (s.size() + 1)),
             alphabet[rng() % alphabet.size()]);
  }
  return s;
}

}  // namespace

TEST_CASE("edit distance examples") {
  EditResult same = EditDistance("ABC", "ABC");
  CHECK(same.cost == 0);
  CHECK(same.script.ops.empty());

  EditResult del = EditDistance("ABC", "AC");
  CHECK(del.cost == 1);
  REQUIRE(del.script.ops.size() == 1);
  CHECK(del.script.ops[0].kind == EditOp::Kind::kDelete);
  CHECK(del.script.ops[0].position == 1);

  EditResult ins = EditDistance("", "AB");
  CHECK(ins.cost == 2);
  for (const EditOp &op : ins.script.ops) CHECK(op.kind == EditOp::Kind::kInsert);
  CHECK(ApplyScript("", ins.script) == "AB");
}

TEST_CASE("edit distance prefers replace over delete plus insert") {
  EditResult r = EditDistance("AB", "AC");
  REQUIRE(r.script.ops.size() == 1);
  CHECK(r.script.ops[0].kind == EditOp::Kind::kReplace);
  CHECK(r.script.ops[0].symbol == 'C');
}

TEST_CASE("edit distance is a metric and scripts replay") {
  std::mt19937_64 rng(29);
  for (int t = 0; t < 300; ++t) {
    std::string a = testing::RandomString(rng, 14, "ABCD");
    std::string b = testing::RandomString(rng, 14, "ABCD");
    std::string c = testing::RandomString(rng, 14, "ABCD");
    EditResult ab = EditDistance(a, b);
    CHECK(ab.cost == testing::Levenshtein(a, b));
    CHECK(ab.cost == EditDistanceCost(a, b));
    CHECK(ab.script.cost() == ab.cost);
    CHECK(ApplyScript(a, ab.script) == b);
    CHECK(EditDistanceCost(a, a) == 0);
    CHECK(EditDistanceCost(b, a) == ab.cost);
    CHECK(EditDistanceCost(a, c) <= ab.cost + EditDistanceCost(b, c));
  }
}

TEST_CASE("apply script rejects out of range ops") {
  EditScript bad;
  bad.ops.push_back({EditOp::Kind::kDelete, 5, 0});
  CHECK_THROWS_AS(ApplyScript("AB", bad), InvalidArgument);
}

TEST_CASE("description length examples") {
  ClusterPartition p;
  Cluster c;
  c.representative = "AB";
  c.seed_template = "AB";
  c.members.push_back({"x", EditDistance("AB", "AB").script});
  c.members.push_back({"y", EditDistance("AB", "ACB").script});
  p.clusters.push_back(c);
  p.alpha = 0.8;
  p.lambda = 0.0;
  CHECK(DescriptionLength(p) == doctest::Approx(2.8).epsilon(1e-12));

  Cluster d;
  d.representative = "ABC";
  d.seed_template = "AB";
  d.members.push_back({"z", {}});
  ClusterPartition exact;
  exact.clusters = {d, d};
  CHECK(DescriptionLength(exact) == 6.0);
  exact.lambda = 1.0;
  CHECK(DescriptionLength(exact) == 8.0);
  p.lambda = 1.0;
  CHECK(DescriptionLength(p) == doctest::Approx(3.8).epsilon(1e-12));
}

TEST_CASE("cluster: AAFA / FGAF recovery") {
  ClusterPartition p =
      ClusterSequences(Named({"AAFA", "AAFA", "FGAF", "FGAF"}), "AF");
  REQUIRE(p.clusters.size() == 2);
  std::vector<std::string> reps = {p.clusters[0].representative,
                                   p.clusters[1].representative};
  std::sort(reps.begin(), reps.end());
  CHECK(reps == std::vector<std::string>{"AAFA", "FGAF"});
  CHECK(p.total_dl == 8.0);
  CHECK(p.total_dl == DescriptionLength(p));
}

TEST_CASE("cluster: single and identical inputs") {
  ClusterPartition one = ClusterSequences(Named({"XAYF"}), "AF");
  REQUIRE(one.clusters.size() == 1);
  CHECK(one.clusters[0].representative == "XAYF");
  CHECK(one.total_dl == 4.0);

  ClusterPartition same = ClusterSequences(Named({"AF", "AF", "AF"}), "AF");
  REQUIRE(same.clusters.size() == 1);
  CHECK(same.clusters[0].EditCost() == 0);
  CHECK(same.clusters[0].members.size() == 3);
}

TEST_CASE("cluster: missing seed lists every offending id") {
  try {
    ClusterSequences({{"ok", "AF"}, {"bad1", "FA"}, {"bad2", "G"}}, "AF");
    FAIL("expected InvalidArgument");
  } catch (const InvalidArgument &e) {
    std::string msg = e.what();
    CHECK(msg.find("bad1") != std::string::npos);
    CHECK(msg.find("bad2") != std::string::npos);
    CHECK(msg.find("ok") == std::string::npos);
  }
  CHECK_THROWS_AS(ClusterSequences(Named({"AF"}), "AF", {-0.1, 0.0, {}}),
                  InvalidArgument);
  CHECK_THROWS_AS(ClusterSequences(Named({"AF"}), "AF", {0.8, -1.0, {}}),
                  InvalidArgument);
}

TEST_CASE("cluster: invariants and near-optimality on random instances") {
  std::mt19937_64 rng(41);
  for (int t = 0; t < 40; ++t) {
    const std::string seed = t % 2 ? "AF" : "ABA";
    const size_t n = 1 + rng() % 9;
    std::vector<std::string> seqs;
    for (size_t i = 0; i < n; ++i) seqs.push_back(Planted(rng, seed, "ABFG", 4));
    const double alpha = t % 3 == 0 ? 0.8 : 0.3 + 0.1 * (t % 7);
    const double lambda = t % 4 == 0 ? 1.0 : 0.0;

    ClusterPartition p = ClusterSequences(Named(seqs), seed, {alpha, lambda, {}});
    CHECK(p.total_dl == DescriptionLength(p));
    size_t members = 0;
    for (const Cluster &c : p.clusters) {
      CHECK(IsSubsequence(c.seed_template, c.representative));
      for (const ClusterMember &m : c.members) {
        size_t idx = std::stoul(m.video_id.substr(1));
        CHECK(ApplyScript(c.representative, m.script) == seqs[idx]);
        ++members;
      }
    }
    CHECK(members == n);
    CHECK(p.total_dl <= SingletonDL(seqs, lambda) + 1e-9);
    CHECK(p.total_dl <= SingleClusterDL(seqs, alpha, lambda) + 1e-9);
    CHECK(p.total_dl <=
          1.25 * testing::ExhaustiveMinDL(seqs, seed, alpha, lambda) + 1e-9);
  }
}

TEST_CASE("roles") {
  Cluster c;
  c.representative = "AAFA";
  c.seed_template = "AF";
  auto roles = AssignRoles(std::string("AAFA"), c);
  CHECK(roles == std::vector<EventRole>{EventRole::kCore, EventRole::kFocus,
                                        EventRole::kCore, EventRole::kFocus});

  Cluster seed_only;
  seed_only.representative = "AF";
  seed_only.seed_template = "AF";
  CHECK(AssignRoles(std::string("AF"), seed_only) ==
        std::vector<EventRole>{EventRole::kCore, EventRole::kCore});

  auto trailing = AssignRoles(std::string("AFG"), seed_only);
  REQUIRE(trailing.size() == 3);
  CHECK(trailing[2] == EventRole::kContext);

  auto seq_roles = AssignRoles(testing::SequenceOf("v", "AAFA"), c);
  CHECK(seq_roles == roles);
  CHECK(ToString(EventRole::kFocus) == "focus");
}

TEST_CASE("lsh buckets") {
  LshParams params;
  auto buckets = ComputeLshBuckets({"ABAB", "ABAB", "XYXY"}, params);
  auto per = BucketsPerSequence(buckets, 3);
  CHECK(per[0] == per[1]);
  CHECK(per[0].size() == params.bands);
  std::vector<uint64_t> shared;
  std::set_intersection(per[0].begin(), per[0].end(), per[2].begin(),
                        per[2].end(), std::back_inserter(shared));
  CHECK(shared.empty());
  auto tiny = BucketsPerSequence(ComputeLshBuckets({"A", ""}, params), 2);
  CHECK(tiny[0].size() == params.bands);
}

TEST_CASE("lsh restricted clustering stays within the trivial bounds") {
  std::mt19937_64 rng(77);
  for (int t = 0; t < 10; ++t) {
    std::vector<std::string> seqs;
    for (int i = 0; i < 30; ++i) seqs.push_back(Planted(rng, "AF", "ABFGH", 5));
    ClusterOptions off;
    ClusterOptions on;
    on.lsh = LshParams{};
    ClusterPartition a = ClusterSequences(Named(seqs), "AF", off);
    ClusterPartition b = ClusterSequences(Named(seqs), "AF", on);
    const double trivial = SingletonDL(seqs, 0.0);
    CHECK(a.total_dl <= trivial + 1e-9);
    CHECK(b.total_dl <= trivial + 1e-9);
    CHECK(b.total_dl <= SingleClusterDL(seqs, 0.8, 0.0) + 1e-9);
    CHECK(b.total_dl == DescriptionLength(b));
  }
}

TEST_CASE("cluster template over a dataset") {
  Dataset d = testing::MakeDataset(
      {{"v1", "AAFA"}, {"v2", "FGAF"}, {"v3", "AAFA"}}, "AFG");
  ClusterPartition p = ClusterTemplate(d, {"v1", "v2", "v3"}, "AF");
  size_t members = 0;
  for (const Cluster &c : p.clusters) members += c.members.size();
  CHECK(members == 3);
}
