#include "ppir/net.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstring>
#include <future>
#include <optional>

namespace ppir::net {

namespace {

using u64 = std::uint64_t;

struct FdCloser {
  int fd = -1;
  ~FdCloser() {
    if (fd >= 0) ::close(fd);
  }
};

std::pair<std::string, std::uint16_t> split_host_port(const std::string& addr) {
  const auto colon = addr.rfind(':');
  if (colon == std::string::npos) throw Error("address must be host:port, got '" + addr + "'");
  const std::string host = addr.substr(0, colon);
  const int port = std::stoi(addr.substr(colon + 1));
  if (port < 0 || port > 65535) throw Error("port out of range in '" + addr + "'");
  return {host, static_cast<std::uint16_t>(port)};
}

void send_all(int fd, const std::string& data, std::chrono::milliseconds timeout) {
  std::size_t sent = 0;
  const auto deadline = std::chrono::steady_clock::now() + timeout;
  while (sent < data.size()) {
    const ssize_t n = ::send(fd, data.data() + sent, data.size() - sent, MSG_NOSIGNAL);
    if (n > 0) {
      sent += static_cast<std::size_t>(n);
      continue;
    }
    if (n < 0 && (errno == EAGAIN || errno == EWOULDBLOCK)) {
      if (std::chrono::steady_clock::now() >= deadline) throw Timeout("send timed out");
      continue;
    }
    throw Error(std::string("send failed: ") + std::strerror(errno));
  }
}

// Reads one '\n'-terminated line (stripped), buffering leftovers across calls.
// Empty optional on orderly shutdown at a line boundary.
class LineReader {
 public:
  explicit LineReader(int fd) : fd_(fd) {}

  std::optional<std::string> read_line(std::chrono::milliseconds timeout) {
    const auto deadline = std::chrono::steady_clock::now() + timeout;
    while (true) {
      const auto nl = buf_.find('\n');
      if (nl != std::string::npos) {
        std::string line = buf_.substr(0, nl);
        buf_.erase(0, nl + 1);
        return line;
      }
      if (buf_.size() > kMaxFrameBytes) throw OversizeFrame("incoming frame exceeds 16 MiB");
      const auto now = std::chrono::steady_clock::now();
      if (now >= deadline) throw Timeout("read timed out");
      struct pollfd pfd{fd_, POLLIN, 0};
      const auto remain =
          std::chrono::duration_cast<std::chrono::milliseconds>(deadline - now).count();
      const int pr = ::poll(&pfd, 1, static_cast<int>(std::max<long long>(1, remain)));
      if (pr < 0) throw Error(std::string("poll failed: ") + std::strerror(errno));
      if (pr == 0) throw Timeout("read timed out");
      char chunk[65536];
      const ssize_t n = ::recv(fd_, chunk, sizeof(chunk), 0);
      if (n == 0) {
        if (buf_.empty()) return std::nullopt;
        throw Error("connection closed mid-frame");
      }
      if (n < 0) {
        if (errno == EAGAIN || errno == EWOULDBLOCK) continue;
        throw Error(std::string("recv failed: ") + std::strerror(errno));
      }
      buf_.append(chunk, static_cast<std::size_t>(n));
    }
  }

 private:
  int fd_;
  std::string buf_;
};

}  // namespace

DatabaseServer::DatabaseServer(Dataset ds, bool log_sessions)
    : dataset_(std::move(ds)), log_sessions_(log_sessions) {}

std::vector<std::string> DatabaseServer::handle_line(SessionState& session,
                                                     const std::string& line) {
  WireMessage msg;
  try {
    msg = decode(line);
  } catch (const OversizeFrame& e) {
    return {encode(make_error(session.id, "oversize_frame", e.what()))};
  } catch (const UnknownKind& e) {
    return {encode(make_error(session.id, "unknown_kind", e.what()))};
  } catch (const MalformedFrame& e) {
    return {encode(make_error(session.id, "malformed_frame", e.what()))};
  }

  if (log_sessions_) {
    std::lock_guard<std::mutex> lock(log_mutex_);
    log_.emplace_back(msg.session, line);
  }

  switch (msg.kind) {
    case WireMessage::Kind::hello: {
      if (session.hello_seen)
        return {encode(make_error(msg.session, "protocol_error", "duplicate hello"))};
      if (msg.scheme != "ppir" && msg.scheme != "mppir" && msg.scheme != "single_server")
        return {encode(make_error(msg.session, "bad_scheme", "unknown scheme " + msg.scheme))};
      if (msg.s < 1 || msg.s > dataset_.cls.delta)
        return {encode(make_error(msg.session, "bad_seed",
                                  "s = " + std::to_string(msg.s) + " outside [delta]"))};
      const u64 lambda = msg.scheme == "ppir" ? 1 : msg.lambda;
      if (lambda < 1)
        return {encode(make_error(msg.session, "bad_lambda", "lambda must be positive"))};
      for (u64 m : dataset_.cls.sizes) {
        if (lambda > m)
          return {encode(make_error(msg.session, "lambda_too_large",
                                    "lambda exceeds a class size"))};
      }
      session.hello_seen = true;
      session.id = msg.session;
      session.s = msg.s;
      session.scheme = msg.scheme;
      session.lambda = lambda;
      return {};
    }
    case WireMessage::Kind::query_batch: {
      if (!session.hello_seen)
        return {encode(make_error(msg.session, "protocol_error", "query_batch before hello"))};
      if (msg.session != session.id)
        return {encode(make_error(msg.session, "protocol_error", "session id mismatch"))};
      try {
        auto answers = answer_queries(dataset_, session.s, msg.queries, session.lambda);
        return {encode(make_answer_batch(session.id, std::move(answers)))};
      } catch (const IndexOutOfClass& e) {
        return {encode(make_error(session.id, "bad_candidate", e.what()))};
      } catch (const BadSeed& e) {
        return {encode(make_error(session.id, "bad_seed", e.what()))};
      } catch (const LambdaTooLarge& e) {
        return {encode(make_error(session.id, "lambda_too_large", e.what()))};
      } catch (const Error& e) {
        return {encode(make_error(session.id, "bad_query", e.what()))};
      }
    }
    case WireMessage::Kind::answer_batch:
      return {encode(make_error(msg.session, "protocol_error", "unexpected answer_batch"))};
    case WireMessage::Kind::error:
      return {};  // peer-reported error; nothing to answer
  }
  return {encode(make_error(session.id, "protocol_error", "unreachable"))};
}

std::vector<std::pair<std::string, std::string>> DatabaseServer::session_log() const {
  std::lock_guard<std::mutex> lock(log_mutex_);
  return log_;
}

std::vector<std::string> InprocEndpoint::run_session(const std::vector<std::string>& lines,
                                                     std::size_t expect_replies,
                                                     std::chrono::milliseconds /*timeout*/) {
  DatabaseServer::SessionState session;
  std::vector<std::string> replies;
  for (const std::string& line : lines) {
    for (auto& reply : server_->handle_line(session, line)) replies.push_back(std::move(reply));
  }
  if (replies.size() != expect_replies) {
    // Error frames surface to the caller for uniform handling with TCP.
    if (!replies.empty()) return replies;
    throw Error("inproc session produced no reply");
  }
  return replies;
}

std::vector<std::string> TcpEndpoint::run_session(const std::vector<std::string>& lines,
                                                  std::size_t expect_replies,
                                                  std::chrono::milliseconds timeout) {
  FdCloser sock{::socket(AF_INET, SOCK_STREAM, 0)};
  if (sock.fd < 0) throw Error(std::string("socket failed: ") + std::strerror(errno));

  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(port_);
  if (::inet_pton(AF_INET, host_.c_str(), &addr.sin_addr) != 1)
    throw Error("inet_pton failed for host " + host_);
  if (::connect(sock.fd, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0)
    throw Timeout("connect to " + describe() + " failed: " + std::strerror(errno));

  int flag = 1;
  ::setsockopt(sock.fd, IPPROTO_TCP, TCP_NODELAY, &flag, sizeof(flag));

  std::string payload;
  for (const std::string& line : lines) {
    payload += line;
    if (payload.empty() || payload.back() != '\n') payload.push_back('\n');
  }
  send_all(sock.fd, payload, timeout);

  LineReader reader(sock.fd);
  std::vector<std::string> replies;
  for (std::size_t i = 0; i < expect_replies; ++i) {
    auto line = reader.read_line(timeout);
    if (!line) throw Error("connection closed before all replies arrived");
    replies.push_back(std::move(*line));
    // An error frame ends the session early.
    if (replies.back().find("\"error\"") != std::string::npos) {
      const WireMessage m = decode(replies.back());
      if (m.kind == WireMessage::Kind::error) break;
    }
  }
  return replies;
}

TcpListener::TcpListener(std::shared_ptr<DatabaseServer> server, const std::string& bind_addr)
    : server_(std::move(server)) {
  const auto [host, port] = split_host_port(bind_addr);
  listen_fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
  if (listen_fd_ < 0) throw Error(std::string("socket failed: ") + std::strerror(errno));
  int reuse = 1;
  ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &reuse, sizeof(reuse));
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(port);
  if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) {
    ::close(listen_fd_);
    throw Error("inet_pton failed for bind host " + host);
  }
  if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0) {
    ::close(listen_fd_);
    throw Error(std::string("bind failed: ") + std::strerror(errno));
  }
  if (::listen(listen_fd_, 64) != 0) {
    ::close(listen_fd_);
    throw Error(std::string("listen failed: ") + std::strerror(errno));
  }
  socklen_t len = sizeof(addr);
  ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&addr), &len);
  port_ = ntohs(addr.sin_port);
  accept_thread_ = std::thread([this] { accept_loop(); });
}

TcpListener::~TcpListener() { stop(); }

void TcpListener::stop() {
  bool expected = false;
  if (!stopping_.compare_exchange_strong(expected, true)) return;
  if (listen_fd_ >= 0) {
    ::shutdown(listen_fd_, SHUT_RDWR);
    ::close(listen_fd_);
    listen_fd_ = -1;
  }
  if (accept_thread_.joinable()) accept_thread_.join();
  std::vector<std::thread> threads;
  {
    std::lock_guard<std::mutex> lock(conn_mutex_);
    threads.swap(conn_threads_);
  }
  for (auto& t : threads) {
    if (t.joinable()) t.join();
  }
}

void TcpListener::accept_loop() {
  while (!stopping_.load()) {
    sockaddr_in peer{};
    socklen_t len = sizeof(peer);
    const int fd = ::accept(listen_fd_, reinterpret_cast<sockaddr*>(&peer), &len);
    if (fd < 0) {
      if (stopping_.load() || errno == EBADF || errno == EINVAL) return;
      continue;
    }
    std::lock_guard<std::mutex> lock(conn_mutex_);
    conn_threads_.emplace_back([this, fd] { serve_connection(fd); });
  }
}

void TcpListener::serve_connection(int fd) {
  FdCloser closer{fd};
  DatabaseServer::SessionState session;
  LineReader reader(fd);
  try {
    while (true) {
      auto line = reader.read_line(std::chrono::milliseconds(30000));
      if (!line) return;  // client done
      for (const std::string& reply : server_->handle_line(session, *line))
        send_all(fd, reply, std::chrono::milliseconds(30000));
    }
  } catch (const Error&) {
    // Connection-level failure aborts this session only.
  }
}

std::unique_ptr<TcpListener> serve_database(std::shared_ptr<DatabaseServer> server,
                                            const std::string& bind_addr) {
  return std::make_unique<TcpListener>(std::move(server), bind_addr);
}

Transcript orchestrate(u64 s, const std::string& scheme, u64 lambda,
                       const std::vector<std::vector<Query>>& db_queries,
                       const std::vector<std::shared_ptr<Endpoint>>& endpoints,
                       const std::string& session_id, std::chrono::milliseconds timeout) {
  const std::size_t n = db_queries.size();
  if (endpoints.size() != n) throw Error("orchestrate: endpoint count != database count");

  std::vector<std::future<std::vector<std::string>>> futures;
  futures.reserve(n);
  for (std::size_t j = 0; j < n; ++j) {
    futures.push_back(std::async(std::launch::async, [&, j] {
      const std::vector<std::string> lines = {
          encode(make_hello(session_id, s, scheme, lambda)),
          encode(make_query_batch(session_id, db_queries[j]))};
      return endpoints[j]->run_session(lines, 1, timeout);
    }));
  }

  Transcript t;
  t.queries = db_queries;
  t.answers.resize(n);
  std::vector<std::string> failures;
  for (std::size_t j = 0; j < n; ++j) {
    try {
      const auto replies = futures[j].get();
      if (replies.size() != 1)
        throw Error("expected one reply frame, got " + std::to_string(replies.size()));
      const WireMessage m = decode(replies[0]);
      if (m.kind == WireMessage::Kind::error)
        throw Error("database error frame: " + m.code + ": " + m.text);
      if (m.kind != WireMessage::Kind::answer_batch) throw Error("reply is not an answer_batch");
      if (m.session != session_id) throw Error("reply session id mismatch");
      if (m.answers.size() != db_queries[j].size())
        throw Error("answer count != query count");
      t.answers[j] = m.answers;
    } catch (const Timeout& e) {
      failures.push_back("db" + std::to_string(j + 1) + ": timeout: " + e.what());
    } catch (const std::exception& e) {
      failures.push_back("db" + std::to_string(j + 1) + ": " + e.what());
    }
  }
  if (!failures.empty()) {
    std::string what = "retrieval aborted, no partial decode:";
    for (const auto& f : failures) what += " [" + f + "]";
    throw PartialFailure(what);
  }
  return t;
}

}  // namespace ppir::net
