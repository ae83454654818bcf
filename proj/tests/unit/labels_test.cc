#include <random>
#include <sstream>

#include "doctest.h"
#include "seqlab/core/error.h"
#include "seqlab/labels/label_store.h"
#include "test_util.h"

using namespace seqlab;

namespace {

Dataset Small() {
  return testing::MakeDataset(
      {{"v1", "A"}, {"v2", "B"}, {"v3", "AB"}, {"v4", "BA"}}, "AB",
      {"c1", "c2", "c3"}, {}, {{"v1", "c1"}});
}

int64_t FixedClock() { return 1000; }

// Conflicts recomputed per video from the raw log: a video is conflicted
// when the events since its last resolution (that event included) carry
// more than one class.
std::set<std::string> ConflictsFromLog(const std::vector<LabelEvent> &log) {
  std::map<std::string, std::vector<const LabelEvent *>> per_video;
  for (const LabelEvent &e : log) per_video[e.video_id].push_back(&e);
  std::set<std::string> out;
  for (const auto &[id, events] : per_video) {
    size_t from = 0;
    for (size_t i = 0; i < events.size(); ++i) {
      if (events[i]->resolution) from = i;
    }
    std::set<std::string> classes;
    for (size_t i = from; i < events.size(); ++i) classes.insert(events[i]->class_id);
    if (classes.size() > 1) out.insert(id);
  }
  return out;
}

}  // namespace

TEST_CASE("seeds at iteration 0, labeling from 1") {
  Dataset d = Small();
  LabelStore store(d, FixedClock);
  CHECK(store.iteration() == 1);
  REQUIRE(store.log().size() == 1);
  CHECK(store.log()[0].iteration == 0);
  CHECK(store.log()[0].source == LabelSource::Seed());
  CHECK_FALSE(store.state().IsNewlyLabeled("v1"));

  ApplyResult r = store.ApplyLabels({"v2", "v3"}, "c2", LabelSource::Template("AB"));
  CHECK(r.applied == 2);
  CHECK(r.conflicts_raised.empty());
  CHECK(store.state().current.at("v3") == "c2");
  CHECK(store.state().IsNewlyLabeled("v3"));
  CHECK(store.CountNewSince(0) == 2);
  CHECK_THROWS_AS(store.ApplyLabels({"v4"}, "c1", LabelSource::Seed()),
                  InvalidArgument);
  CHECK_THROWS(store.ApplyLabels({"nope"}, "c1", LabelSource::Manual()));
  CHECK_THROWS(store.ApplyLabels({"v4"}, "c9", LabelSource::Manual()));
  CHECK_THROWS_AS(store.BeginIteration(0), InvalidArgument);
}

TEST_CASE("conflicts and resolution") {
  Dataset d = Small();
  LabelStore store(d, FixedClock);
  ApplyResult r = store.ApplyLabels({"v1"}, "c2", LabelSource::Manual());
  CHECK(r.conflicts_raised == std::vector<std::string>{"v1"});
  CHECK(store.state().conflicts.count("v1"));
  CHECK_THROWS_AS(store.ResolveConflict("v2", "c1", "u"), StateError);
  store.ResolveConflict("v1", "c3", "reviewer");
  CHECK(store.state().conflicts.empty());
  CHECK(store.state().current.at("v1") == "c3");
  auto history = store.History("v1");
  REQUIRE(history.size() == 3);
  CHECK(history.back().resolution);
  CHECK(history.back().actor == "reviewer");

  // Relabeling with the same class is not a disagreement.
  store.ApplyLabels({"v1"}, "c3", LabelSource::Manual());
  CHECK(store.state().conflicts.empty());
}

TEST_CASE("snapshot by iteration") {
  Dataset d = Small();
  LabelStore store(d, FixedClock);
  store.ApplyLabels({"v2"}, "c2", LabelSource::Manual());
  store.BeginIteration(2);
  store.ApplyLabels({"v2"}, "c3", LabelSource::Manual());
  CHECK(store.Snapshot(0).current.size() == 1);
  CHECK(store.Snapshot(1).current.at("v2") == "c2");
  CHECK(store.Snapshot(1).conflicts.empty());
  CHECK(store.Snapshot(2) == store.state());
  CHECK_THROWS_AS(store.Snapshot(3), StateError);
}

TEST_CASE("replay reproduces the live state") {
  Dataset d = Small();
  const std::vector<std::string> ids = {"v1", "v2", "v3", "v4"};
  const std::vector<std::string> classes = {"c1", "c2", "c3"};
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 200; ++trial) {
    LabelStore store(d, FixedClock);
    const int ops = 1 + static_cast<int>(rng() % 30);
    for (int k = 0; k < ops; ++k) {
      switch (rng() % 4) {
        case 0:
        case 1: {
          std::vector<std::string> batch;
          for (const std::string &id : ids) {
            if (rng() % 2) batch.push_back(id);
          }
          if (batch.empty()) batch.push_back(ids[0]);
          LabelSource src = rng() % 2 ? LabelSource::Manual()
                                      : LabelSource::Template("AB");
          store.ApplyLabels(batch, classes[rng() % 3], src);
          break;
        }
        case 2:
          if (!store.state().conflicts.empty()) {
            auto it = store.state().conflicts.begin();
            std::advance(it, rng() % store.state().conflicts.size());
            store.ResolveConflict(*it, classes[rng() % 3], "r");
          }
          break;
        default:
          store.BeginIteration(store.iteration() + 1);
      }
    }
    LabelStore replayed = LabelStore::Replay(d, store.log(), FixedClock);
    CHECK(replayed.state() == store.state());
    CHECK(replayed.log() == store.log());
    CHECK(store.state().conflicts == ConflictsFromLog(store.log()));

    std::stringstream buf;
    WriteLog(buf, store.log());
    std::vector<LabelEvent> parsed = ReadLog(buf);
    CHECK(parsed == store.log());
    CHECK(LabelStore::Replay(d, parsed).state() == store.state());
  }
}

TEST_CASE("replay rejects bad logs") {
  Dataset d = Small();
  LabelStore store(d, FixedClock);
  store.ApplyLabels({"v2"}, "c2", LabelSource::Manual());
  auto log = store.log();
  log[1].video_id = "ghost";
  CHECK_THROWS_AS(LabelStore::Replay(d, log), ValidationError);
  log = store.log();
  log[1].class_id = "nope";
  CHECK_THROWS_AS(LabelStore::Replay(d, log), ValidationError);
  CHECK_THROWS(EventFromJson("{\"video_id\":1}"));
}

TEST_CASE("attached log persists every batch") {
  testing::TempDir dir("labels");
  const auto path = dir.path() / "log.jsonl";
  Dataset d = Small();
  {
    LabelStore store(d, FixedClock);
    store.AttachLog(path, true);
    store.ApplyLabels({"v2", "v3"}, "c2", LabelSource::Manual());
    store.ApplyLabels({"v2"}, "c1", LabelSource::Manual(), std::nullopt, "ann");
  }
  auto events = ReadLogFile(path);
  REQUIRE(events.size() == 4);
  CHECK(events[3].actor == "ann");
  LabelStore back = LabelStore::Replay(d, events);
  CHECK(back.state().conflicts == std::set<std::string>{"v2"});

  std::ostringstream view;
  WriteCurrentView(view, back.state());
  CHECK(view.str().find("\"source\":\"seed\"") != std::string::npos);
}
