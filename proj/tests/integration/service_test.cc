#include <chrono>
#include <cstdlib>
#include <sstream>
#include <thread>

#include "doctest.h"
#include "httplib.h"
#include "json.hpp"
#include "seqlab/model/synthetic.h"
#include "seqlab/service/cli.h"
#include "seqlab/service/http_service.h"
#include "seqlab/service/session.h"
#include "test_util.h"

using namespace seqlab;
using json = nlohmann::json;

namespace {

SyntheticData SmallSynthetic() {
  SyntheticConfig cfg;
  cfg.num_sequences = 120;
  cfg.class_patterns = DefaultClassPatterns();
  cfg.seed_labels_per_class = 2;
  cfg.embedding_dim = 4;
  return GenerateSynthetic(cfg);
}

SessionConfig SmallConfig(const std::filesystem::path &workspace) {
  SessionConfig cfg;
  cfg.workspace = workspace;
  cfg.mining = {10, 2, 4, std::nullopt};
  cfg.training.epochs = 60;
  return cfg;
}

std::vector<json> Lines(const std::string &body) {
  std::vector<json> out;
  std::istringstream in(body);
  for (std::string line; std::getline(in, line);) {
    if (!line.empty()) out.push_back(json::parse(line));
  }
  return out;
}

// A live server on a free port for the lifetime of the fixture.
struct Server {
  Session &session;
  HttpService service;
  int port;
  std::thread thread;

  explicit Server(Session &s)
      : session(s), service(s), port(service.Bind("127.0.0.1", 0)) {
    thread = std::thread([this] { service.Run(); });
    httplib::Client probe("127.0.0.1", port);
    for (int i = 0; i < 200 && !probe.Get("/metrics"); ++i) {
      std::this_thread::sleep_for(std::chrono::milliseconds(10));
    }
  }
  ~Server() {
    service.Stop();
    thread.join();
  }
  httplib::Client Client() const { return httplib::Client("127.0.0.1", port); }
};

std::vector<std::string> Unlabeled(const Session &s, size_t n) {
  std::vector<std::string> out;
  for (const auto &id : s.dataset().VideoIds()) {
    if (!s.labels().state().IsLabeled(id) && out.size() < n) out.push_back(id);
  }
  return out;
}

int RunCliArgs(std::vector<std::string> args, std::string *out_text = nullptr) {
  args.insert(args.begin(), "seqlab");
  std::vector<const char *> argv;
  for (const auto &a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  int code = RunCli(static_cast<int>(argv.size()), argv.data(), out, err);
  if (out_text) *out_text = out.str() + err.str();
  return code;
}

}  // namespace

TEST_CASE("http: templates, labels, retrain") {
  testing::TempDir dir("service");
  SyntheticData data = SmallSynthetic();
  Session session(data.dataset, SmallConfig(dir.path()));
  Server server(session);
  auto client = server.Client();

  auto res = client.Get("/templates?sort=purity&order=desc");
  REQUIRE(res);
  CHECK(res->status == 200);
  auto rows = Lines(res->body);
  REQUIRE(!rows.empty());
  for (size_t i = 1; i < rows.size(); ++i) {
    CHECK(rows[i - 1]["metrics"]["purity"].get<double>() >=
          rows[i]["metrics"]["purity"].get<double>());
  }
  const std::string before = res->body;
  CHECK(client.Get("/templates?sort=purity&order=desc")->body == before);

  auto ids = Unlabeled(session, 10);
  const size_t labeled_before = session.labels().state().current.size();
  json req{{"ids", ids}, {"class", "c1"}};
  res = client.Post("/labels", req.dump(), "application/json");
  REQUIRE(res);
  CHECK(res->status == 200);
  json reply = json::parse(res->body);
  CHECK(reply["applied"] == 10);
  CHECK(reply["labeled"] == labeled_before + 10);
  CHECK(client.Get("/templates?sort=purity&order=desc")->body != before);

  res = client.Post("/retrain", "{}", "application/json");
  REQUIRE(res);
  CHECK(res->status == 409);
  CHECK(json::parse(res->body)["pending"] == 10);

  res = client.Post("/retrain", R"({"force":true})", "application/json");
  REQUIRE(res);
  CHECK(res->status == 200);
  CHECK(json::parse(res->body)["iteration"] == 1);

  auto metrics = Lines(client.Get("/metrics")->body);
  REQUIRE(metrics.size() == 1);

  res = client.Post("/labels", R"({"ids":["nope"],"class":"c1"})",
                    "application/json");
  CHECK(res->status == 400);
  res = client.Post("/labels", R"({"ids":[],"class":"c1","source":"seed"})",
                    "application/json");
  CHECK(res->status == 400);
  res = client.Post("/labels", "{not json", "application/json");
  CHECK(res->status == 400);
}

TEST_CASE("http: clusters, videos, retrieve, history, projection") {
  testing::TempDir dir("service");
  SyntheticData data = SmallSynthetic();
  Session session(data.dataset, SmallConfig(dir.path()));
  Server server(session);
  auto client = server.Client();

  const std::string symbols = session.mined().front().symbols;
  auto res = client.Get("/templates/" + symbols + "/clusters?alpha=0.8&lambda=0");
  REQUIRE(res);
  CHECK(res->status == 200);
  json partition = json::parse(res->body);
  CHECK(partition["alpha"] == 0.8);
  size_t members = 0;
  for (const auto &c : partition["clusters"]) {
    CHECK(c["member_ids"].size() == c["edit_costs"].size());
    members += c["member_ids"].size();
  }
  CHECK(members == session.mined().front().support);

  auto videos = Lines(client.Get("/videos?template=" + symbols + "&cluster=0")->body);
  CHECK(videos.size() == partition["clusters"][0]["member_ids"].size());
  auto labeled = Lines(client.Get("/videos?labeled=true")->body);
  CHECK(labeled.size() == session.labels().state().current.size());

  std::string anchor = session.labels().state().current.begin()->first;
  json rr{{"anchors", {anchor}}, {"top_k", 5}, {"w", 1.0}};
  auto hits = Lines(client.Post("/retrieve", rr.dump(), "application/json")->body);
  CHECK(hits.size() == 5);
  rr["w"] = 2.0;
  CHECK(client.Post("/retrieve", rr.dump(), "application/json")->status == 400);

  auto ids = Unlabeled(session, 1);
  client.Post("/labels", json{{"ids", ids}, {"class", "c2"}}.dump(),
              "application/json");
  client.Post("/labels", json{{"ids", ids}, {"class", "c3"}}.dump(),
              "application/json");
  auto history = Lines(client.Get("/labels/history?video=" + ids[0])->body);
  CHECK(history.size() == 2);
  res = client.Post("/labels/resolve",
                    json{{"video_id", ids[0]}, {"class", "c2"}}.dump(),
                    "application/json");
  CHECK(res->status == 200);
  res = client.Post("/labels/resolve",
                    json{{"video_id", ids[0]}, {"class", "c2"}}.dump(),
                    "application/json");
  CHECK(res->status == 409);

  res = client.Get("/projection");
  REQUIRE(res);
  CHECK(res->status == 200);
  CHECK(res->body.rfind("video_id,x,y", 0) == 0);
  CHECK(client.Get("/templates/AZ/clusters")->status == 400);
}

TEST_CASE("session state survives a restart") {
  testing::TempDir dir("restart");
  SyntheticData data = SmallSynthetic();
  std::vector<std::string> ids;
  std::string metrics;
  {
    Session s(data.dataset, SmallConfig(dir.path()));
    ids = Unlabeled(s, 5);
    s.Label(ids, "c4", LabelSource::Manual());
    s.Retrain(true);
    metrics = s.MetricsBody();
  }
  Session again(data.dataset, SmallConfig(dir.path()));
  for (const auto &id : ids) CHECK(again.labels().state().current.at(id) == "c4");
  CHECK(again.MetricsBody() == metrics);
  CHECK(again.model().has_value());
  CHECK(again.labels().iteration() == 2);
}

TEST_CASE("cli exit codes") {
  std::string text;
  CHECK(RunCliArgs({"frobnicate"}, &text) == 2);
  CHECK(RunCliArgs({"mine"}, &text) == 1);  // no dataset given
  CHECK(text.find("need --") != std::string::npos);
  CHECK(RunCliArgs({"mine", "--bogus"}, &text) == 2);
  CHECK(RunCliArgs({"--help"}, &text) == 0);

  testing::TempDir dir("cli");
  const std::string data = (dir.path() / "data").string();
  CHECK(RunCliArgs({"generate", "--out", data, "--n", "150"}, &text) == 0);
  CHECK(RunCliArgs({"mine", "--data", data, "--min-support", "20"}, &text) == 0);
  CHECK(RunCliArgs({"cluster", "--data", data, "--min-support", "20",
                    "--template", "AZ"},
                   &text) == 1);
  CHECK(text.find("error") != std::string::npos);

  const std::string cmd = std::string(SEQLAB_CLI_PATH) + " frobnicate > /dev/null 2>&1";
  int status = std::system(cmd.c_str());
  CHECK(WEXITSTATUS(status) == 2);
}
