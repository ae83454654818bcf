#include "seqlab/service/http_service.h"

#include <mutex>

#include "httplib.h"
#include "json.hpp"
#include "seqlab/core/error.h"
#include "seqlab/model/evaluation.h"

namespace seqlab {

using json = nlohmann::json;

namespace {

const char kNdjson[] = "application/x-ndjson";
const char kJson[] = "application/json";

void SendError(httplib::Response &res, int status, const std::string &message,
               const std::vector<Issue> &issues = {}) {
  json body{{"error", message}};
  if (!issues.empty()) {
    json list = json::array();
    for (const Issue &i : issues) list.push_back(i.ToString());
    body["issues"] = std::move(list);
  }
  res.status = status;
  res.set_content(body.dump() + "\n", kJson);
}

// Maps the library's exceptions onto status codes.
template <typename F>
void Guard(httplib::Response &res, F &&handler) {
  try {
    handler();
  } catch (const ValidationError &e) {
    SendError(res, 400, e.what(), e.issues());
  } catch (const InvalidArgument &e) {
    SendError(res, 400, e.what());
  } catch (const StateError &e) {
    SendError(res, 409, e.what());
  } catch (const json::exception &e) {
    SendError(res, 400, std::string("bad request body: ") + e.what());
  } catch (const std::exception &e) {
    SendError(res, 500, e.what());
  }
}

std::optional<std::string> Param(const httplib::Request &req,
                                 const std::string &key) {
  if (!req.has_param(key)) return std::nullopt;
  return req.get_param_value(key);
}

size_t ParseCount(const std::string &key, const std::string &value) {
  try {
    size_t used = 0;
    long long n = std::stoll(value, &used);
    if (used == value.size() && n >= 0) return static_cast<size_t>(n);
  } catch (const std::exception &) {
  }
  throw InvalidArgument("parameter " + key + " must be a non-negative integer");
}

double ParseReal(const std::string &key, const std::string &value) {
  try {
    size_t used = 0;
    double x = std::stod(value, &used);
    if (used == value.size()) return x;
  } catch (const std::exception &) {
  }
  throw InvalidArgument("parameter " + key + " must be a number");
}

TemplateQuery ParseTemplateQuery(const httplib::Request &req) {
  TemplateQuery q;
  if (auto v = Param(req, "sort")) q.sort = ParseTemplateSortKey(*v);
  if (auto v = Param(req, "order")) {
    if (*v != "asc" && *v != "desc") {
      throw InvalidArgument("order must be asc or desc");
    }
    q.descending = *v == "desc";
  }
  if (auto v = Param(req, "min_support")) q.min_support = ParseCount("min_support", *v);
  if (auto v = Param(req, "degree")) q.degree = ParseCount("degree", *v);
  if (auto v = Param(req, "aggregate")) q.aggregate = ParseAggregationMode(*v);
  if (auto v = Param(req, "search")) q.search = *v;
  if (auto v = Param(req, "ids")) {
    std::set<std::string> ids;
    size_t start = 0;
    while (start <= v->size()) {
      size_t comma = v->find(',', start);
      if (comma == std::string::npos) comma = v->size();
      if (comma > start) ids.insert(v->substr(start, comma - start));
      start = comma + 1;
    }
    q.covering = std::move(ids);
  }
  return q;
}

}  // namespace

HttpService::HttpService(Session &session)
    : session_(session), server_(std::make_unique<httplib::Server>()) {
  Routes();
}

HttpService::~HttpService() { Stop(); }

int HttpService::Bind(const std::string &host, int port) {
  if (port == 0) {
    int bound = server_->bind_to_any_port(host);
    if (bound < 0) throw Error("cannot bind to " + host);
    return bound;
  }
  if (!server_->bind_to_port(host, port)) {
    throw Error("cannot bind to " + host + ":" + std::to_string(port) +
                " (port busy?)");
  }
  return port;
}

void HttpService::Run() { server_->listen_after_bind(); }

void HttpService::Stop() {
  if (server_) server_->stop();
}

void HttpService::Routes() {
  httplib::Server &s = *server_;

  // Read handlers hold the shared lock for their whole body.
  auto read = [this](auto body) {
    return [this, body](const httplib::Request &req, httplib::Response &res) {
      Guard(res, [&] {
        std::shared_lock lock(mutex_);
        body(req, res);
      });
    };
  };
  // Mutations are refused while a retrain holds the session.
  auto write = [this](auto body) {
    return [this, body](const httplib::Request &req, httplib::Response &res) {
      Guard(res, [&] {
        if (retraining_.load()) {
          res.set_header("Retry-After", "1");
          SendError(res, 503, "retrain in progress; retry later");
          return;
        }
        std::unique_lock lock(mutex_);
        body(req, res);
      });
    };
  };

  s.Get("/templates", read([this](const httplib::Request &req,
                                  httplib::Response &res) {
          TemplateQuery q = ParseTemplateQuery(req);
          res.set_content(session_.TemplatesBody(q),
                          q.aggregate ? kJson : kNdjson);
        }));

  s.Get(R"(/templates/([^/]+)/clusters)",
        read([this](const httplib::Request &req, httplib::Response &res) {
          std::optional<double> alpha, lambda;
          if (auto v = Param(req, "alpha")) alpha = ParseReal("alpha", *v);
          if (auto v = Param(req, "lambda")) lambda = ParseReal("lambda", *v);
          res.set_content(
              session_.ClustersBody(req.matches[1].str(), alpha, lambda),
              kJson);
        }));

  s.Get("/videos", read([this](const httplib::Request &req,
                               httplib::Response &res) {
          VideoQuery q;
          q.template_symbols = Param(req, "template");
          if (auto v = Param(req, "cluster")) q.cluster = ParseCount("cluster", *v);
          if (auto v = Param(req, "labeled")) {
            if (*v != "true" && *v != "false") {
              throw InvalidArgument("labeled must be true or false");
            }
            q.labeled = *v == "true";
          }
          res.set_content(session_.VideosBody(q), kNdjson);
        }));

  s.Post("/retrieve", read([this](const httplib::Request &req,
                                  httplib::Response &res) {
           json body = json::parse(req.body);
           RetrieveRequest r;
           r.anchors = body.at("anchors").get<std::vector<std::string>>();
           if (body.contains("w")) r.w = body["w"].get<double>();
           if (body.contains("top_k")) r.top_k = body["top_k"].get<size_t>();
           if (body.contains("candidates")) {
             r.candidates = body["candidates"].get<std::vector<std::string>>();
           }
           res.set_content(session_.RetrieveBody(r), kNdjson);
         }));

  s.Post("/labels", write([this](const httplib::Request &req,
                                 httplib::Response &res) {
           json body = json::parse(req.body);
           auto ids = body.at("ids").get<std::vector<std::string>>();
           std::string cls = body.at("class").get<std::string>();
           LabelSource source = LabelSource::Manual();
           if (body.contains("source")) {
             source.kind = ParseLabelSourceKind(body["source"].get<std::string>());
             if (source.kind == LabelSourceKind::kSeed) {
               throw InvalidArgument("seed labels come from the dataset");
             }
           }
           if (body.contains("template")) {
             source.template_symbols = body["template"].get<std::string>();
           }
           std::string actor = body.value("actor", std::string("user"));
           ApplyResult result = session_.Label(ids, cls, source, actor);
           json out{{"applied", result.applied},
                    {"conflicts", result.conflicts_raised},
                    {"labeled", session_.labels().state().current.size()},
                    {"iteration", session_.labels().iteration()}};
           res.set_content(out.dump() + "\n", kJson);
         }));

  s.Post("/labels/resolve", write([this](const httplib::Request &req,
                                         httplib::Response &res) {
           json body = json::parse(req.body);
           std::string id = body.at("video_id").get<std::string>();
           std::string cls = body.at("class").get<std::string>();
           session_.Resolve(id, cls, body.value("actor", std::string("user")));
           json out{{"video_id", id},
                    {"class", session_.labels().state().current.at(id)},
                    {"conflicts", session_.labels().state().conflicts}};
           res.set_content(out.dump() + "\n", kJson);
         }));

  s.Get("/labels/history", read([this](const httplib::Request &req,
                                       httplib::Response &res) {
          res.set_content(session_.HistoryBody(Param(req, "video")), kNdjson);
        }));

  s.Post("/retrain", [this](const httplib::Request &req,
                            httplib::Response &res) {
    Guard(res, [&] {
      bool force = false;
      if (!req.body.empty()) {
        force = json::parse(req.body).value("force", false);
      }
      bool expected = false;
      if (!retraining_.compare_exchange_strong(expected, true)) {
        res.set_header("Retry-After", "1");
        SendError(res, 503, "retrain in progress; retry later");
        return;
      }
      struct Reset {
        std::atomic<bool> &flag;
        ~Reset() { flag = false; }
      } reset{retraining_};
      std::unique_lock lock(mutex_);
      RetrainReply reply = session_.Retrain(force);
      if (!reply.retrained) {
        json body{{"error", "threshold not reached"},
                  {"pending", reply.pending},
                  {"threshold", reply.threshold}};
        res.status = 409;
        res.set_content(body.dump() + "\n", kJson);
        return;
      }
      res.set_content(RecordToJson(*reply.record) + "\n", kJson);
    });
  });

  s.Get("/metrics", read([this](const httplib::Request &,
                                httplib::Response &res) {
          res.set_content(session_.MetricsBody(), kNdjson);
        }));

  s.Get("/projection", read([this](const httplib::Request &,
                                   httplib::Response &res) {
          res.set_content(session_.ProjectionBody(), "text/csv");
        }));
}

}  // namespace seqlab
