#pragma once

#include <atomic>
#include <chrono>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "ppir/dataset.hpp"
#include "ppir/scheme_common.hpp"
#include "ppir/wire.hpp"

namespace ppir::net {

// One database actor. Stateless across sessions: the only state a session
// carries is its hello (s, scheme, λ), held by the connection. Answers are a
// pure function of (dataset, session input).
class DatabaseServer {
 public:
  explicit DatabaseServer(Dataset ds, bool log_sessions = false);

  struct SessionState {
    bool hello_seen = false;
    std::string id;
    std::uint64_t s = 0;
    std::string scheme;
    std::uint64_t lambda = 1;
  };

  // Feeds one frame line; returns zero or one reply lines. Protocol errors
  // come back as error frames, never as exceptions.
  std::vector<std::string> handle_line(SessionState& session, const std::string& line);

  const Dataset& dataset() const { return dataset_; }

  // (session id, input line) pairs, for the noncollusion check.
  std::vector<std::pair<std::string, std::string>> session_log() const;

 private:
  Dataset dataset_;
  bool log_sessions_;
  mutable std::mutex log_mutex_;
  std::vector<std::pair<std::string, std::string>> log_;
};

// Client-side channel to one database: one request-response session.
class Endpoint {
 public:
  virtual ~Endpoint() = default;
  // Sends the session's lines, then reads exactly `expect_replies` lines.
  virtual std::vector<std::string> run_session(const std::vector<std::string>& lines,
                                               std::size_t expect_replies,
                                               std::chrono::milliseconds timeout) = 0;
  virtual std::string describe() const = 0;
};

// Direct in-process channel through the same frame handler the TCP path uses,
// so transcripts are byte-identical across transports.
class InprocEndpoint : public Endpoint {
 public:
  explicit InprocEndpoint(std::shared_ptr<DatabaseServer> server) : server_(std::move(server)) {}
  std::vector<std::string> run_session(const std::vector<std::string>& lines,
                                       std::size_t expect_replies,
                                       std::chrono::milliseconds timeout) override;
  std::string describe() const override { return "inproc"; }

 private:
  std::shared_ptr<DatabaseServer> server_;
};

class TcpEndpoint : public Endpoint {
 public:
  TcpEndpoint(std::string host, std::uint16_t port) : host_(std::move(host)), port_(port) {}
  std::vector<std::string> run_session(const std::vector<std::string>& lines,
                                       std::size_t expect_replies,
                                       std::chrono::milliseconds timeout) override;
  std::string describe() const override { return host_ + ":" + std::to_string(port_); }

 private:
  std::string host_;
  std::uint16_t port_;
};

// TCP front end for one DatabaseServer: newline-delimited JSON, one session
// per connection. Binds "host:port" (port 0 picks an ephemeral port).
class TcpListener {
 public:
  TcpListener(std::shared_ptr<DatabaseServer> server, const std::string& bind_addr);
  ~TcpListener();

  TcpListener(const TcpListener&) = delete;
  TcpListener& operator=(const TcpListener&) = delete;

  std::uint16_t port() const { return port_; }
  void stop();

 private:
  void accept_loop();
  void serve_connection(int fd);

  std::shared_ptr<DatabaseServer> server_;
  int listen_fd_ = -1;
  std::uint16_t port_ = 0;
  std::atomic<bool> stopping_{false};
  std::thread accept_thread_;
  std::mutex conn_mutex_;
  std::vector<std::thread> conn_threads_;
};

// Runs `serve` until the returned listener is destroyed.
std::unique_ptr<TcpListener> serve_database(std::shared_ptr<DatabaseServer> server,
                                            const std::string& bind_addr);

// Fans hello + queries out to all n databases concurrently and assembles the
// transcript. Databases never see each other's traffic; a failed or timed-out
// database aborts the whole retrieval.
Transcript orchestrate(std::uint64_t s, const std::string& scheme, std::uint64_t lambda,
                       const std::vector<std::vector<Query>>& db_queries,
                       const std::vector<std::shared_ptr<Endpoint>>& endpoints,
                       const std::string& session_id,
                       std::chrono::milliseconds timeout = std::chrono::milliseconds(5000));

}  // namespace ppir::net
