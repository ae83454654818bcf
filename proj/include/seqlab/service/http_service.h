#ifndef SEQLAB_SERVICE_HTTP_SERVICE_H_
#define SEQLAB_SERVICE_HTTP_SERVICE_H_

#include <atomic>
#include <memory>
#include <shared_mutex>
#include <string>

#include "seqlab/service/session.h"

namespace httplib {
class Server;
}

namespace seqlab {

// HTTP front end over a Session. Reads share a lock; mutations take it
// exclusively. While a retrain is running, other mutations are turned away
// with 503 and a Retry-After header instead of queueing behind it.
//
//   GET  /templates                 sort, order, min_support, degree,
//                                   aggregate, search, ids
//   GET  /templates/{symbols}/clusters   alpha, lambda
//   GET  /videos                    template, cluster, labeled
//   POST /retrieve                  {anchors, w, top_k, candidates}
//   POST /labels                    {ids, class, source, template, actor}
//   POST /labels/resolve            {video_id, class, actor}
//   GET  /labels/history            video
//   POST /retrain                   {force}
//   GET  /metrics
//   GET  /projection
class HttpService {
 public:
  explicit HttpService(Session &session);
  ~HttpService();

  // Binds to host:port; port 0 picks a free port. Returns the bound port and
  // throws Error when the port is taken.
  int Bind(const std::string &host, int port);
  // Serves until Stop() is called. Bind first.
  void Run();
  void Stop();

 private:
  void Routes();

  Session &session_;
  std::unique_ptr<httplib::Server> server_;
  std::shared_mutex mutex_;
  std::atomic<bool> retraining_{false};
};

}  // namespace seqlab

#endif  // SEQLAB_SERVICE_HTTP_SERVICE_H_
