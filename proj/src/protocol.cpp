#include "synstate/protocol.hpp"

#include <arpa/inet.h>
#include <fcntl.h>
#include <netdb.h>
#include <netinet/in.h>
#include <poll.h>
#include <sys/socket.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <csignal>
#include <cstring>
#include <iostream>
#include <nlohmann/json.hpp>

#include "synstate/error.hpp"
#include "synstate/logmath.hpp"

namespace synstate {

namespace {

using Json = nlohmann::ordered_json;

constexpr std::string_view kInfText = "inf";

Json encode_bits(double v) {
  if (std::isinf(v) && v > 0) return std::string(kInfText);
  return v;
}

double decode_bits(const Json& j) {
  if (j.is_string() && j.get<std::string>() == kInfText) return kInfinity;
  if (!j.is_number()) throw ProtocolError("surprisal must be a number or \"inf\"");
  double v = j.get<double>();
  if (!std::isfinite(v) || v < 0.0) throw ProtocolError("surprisal must be nonnegative");
  return v;
}

Json parse_line(std::string_view line) {
  Json j = Json::parse(line.begin(), line.end(), nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw ProtocolError("parse");
  return j;
}

std::optional<std::int64_t> integer_id(const Json& j) {
  auto it = j.find("id");
  if (it == j.end() || !it->is_number_integer()) return std::nullopt;
  return it->get<std::int64_t>();
}

std::string dump(const Json& j) { return j.dump(-1, ' ', false, Json::error_handler_t::replace); }

}  // namespace

// --- codec ---------------------------------------------------------------------

std::string encode_request(const ScoreRequest& r) {
  Json j;
  j["id"] = r.id;
  j["tokens"] = r.tokens;
  j["want_eos"] = r.want_eos;
  return dump(j);
}

ScoreRequest decode_request(std::string_view line) {
  Json j = parse_line(line);
  ScoreRequest r;
  auto id = integer_id(j);
  if (!id) throw ProtocolError("invalid request: id must be an integer");
  r.id = *id;
  auto toks = j.find("tokens");
  if (toks == j.end() || !toks->is_array()) throw ProtocolError("invalid request: tokens must be an array");
  for (const Json& t : *toks) {
    if (!t.is_string()) throw ProtocolError("invalid request: tokens must be strings");
    r.tokens.push_back(t.get<std::string>());
  }
  auto eos = j.find("want_eos");
  if (eos == j.end() || !eos->is_boolean()) throw ProtocolError("invalid request: want_eos must be a boolean");
  r.want_eos = eos->get<bool>();
  return r;
}

std::string encode_response(const ScoreResponse& r) {
  Json j;
  if (r.id) j["id"] = *r.id;
  if (r.ok()) {
    Json bits = Json::array();
    for (double b : r.surprisals) bits.push_back(encode_bits(b));
    j["surprisals"] = std::move(bits);
    if (r.eos) j["eos"] = encode_bits(*r.eos);
    j["status"] = "ok";
  } else {
    j["status"] = "error";
    j["error"] = r.error;
  }
  return dump(j);
}

ScoreResponse decode_response(std::string_view line) {
  Json j = parse_line(line);
  ScoreResponse r;
  r.id = integer_id(j);
  auto status = j.find("status");
  if (status == j.end() || !status->is_string()) throw ProtocolError("response without status");
  if (*status == "error") {
    auto err = j.find("error");
    r.error = err != j.end() && err->is_string() ? err->get<std::string>() : "unspecified error";
    if (r.error.empty()) r.error = "unspecified error";
    return r;
  }
  if (*status != "ok") throw ProtocolError("unknown status");
  auto bits = j.find("surprisals");
  if (bits == j.end() || !bits->is_array()) throw ProtocolError("response without surprisals");
  for (const Json& b : *bits) r.surprisals.push_back(decode_bits(b));
  if (auto eos = j.find("eos"); eos != j.end()) r.eos = decode_bits(*eos);
  return r;
}

// --- server --------------------------------------------------------------------

std::string ProtocolSession::handle(std::string_view line) {
  ScoreResponse resp;
  Json j;
  try {
    j = parse_line(line);
  } catch (const ProtocolError&) {
    resp.error = "parse";
    return encode_response(resp);
  }
  resp.id = integer_id(j);
  ScoreRequest req;
  try {
    req = decode_request(line);
  } catch (const ProtocolError& e) {
    resp.error = e.what();
    return encode_response(resp);
  }
  if (last_id_ && req.id <= *last_id_) {
    resp.error = "non-increasing id";
    return encode_response(resp);
  }
  last_id_ = req.id;
  try {
    SentenceSurprisal s = scorer_->score(req.tokens);
    resp.surprisals = std::move(s.bits);
    if (req.want_eos) resp.eos = s.eos;
  } catch (const std::exception& e) {
    resp.error = e.what();
  }
  return encode_response(resp);
}

void serve_stream(const Scorer& scorer, std::istream& in, std::ostream& out) {
  ProtocolSession session(scorer);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    out << session.handle(line) << '\n' << std::flush;
  }
}

namespace {

// Buffered line reader over a file descriptor.
class FdLines {
 public:
  explicit FdLines(int fd) : fd_(fd) {}

  ScorerConnection::ReadStatus read(std::string& line, std::chrono::milliseconds timeout) {
    auto deadline = std::chrono::steady_clock::now() + timeout;
    for (;;) {
      if (auto nl = buf_.find('\n'); nl != std::string::npos) {
        line = buf_.substr(0, nl);
        if (!line.empty() && line.back() == '\r') line.pop_back();
        buf_.erase(0, nl + 1);
        return ScorerConnection::ReadStatus::Line;
      }
      if (closed_) return ScorerConnection::ReadStatus::Closed;
      auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now());
      if (left.count() <= 0) return ScorerConnection::ReadStatus::Timeout;
      pollfd p{fd_, POLLIN, 0};
      int rc = ::poll(&p, 1, static_cast<int>(left.count()));
      if (rc < 0 && errno == EINTR) continue;
      if (rc == 0) return ScorerConnection::ReadStatus::Timeout;
      char chunk[4096];
      ssize_t n = ::read(fd_, chunk, sizeof chunk);
      if (n < 0 && (errno == EINTR || errno == EAGAIN)) continue;
      if (n <= 0) {
        closed_ = true;
        continue;
      }
      buf_.append(chunk, static_cast<std::size_t>(n));
    }
  }

 private:
  int fd_;
  std::string buf_;
  bool closed_ = false;
};

bool write_all(int fd, std::string_view data, bool socket) {
  while (!data.empty()) {
    ssize_t n = socket ? ::send(fd, data.data(), data.size(), MSG_NOSIGNAL) : ::write(fd, data.data(), data.size());
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) return false;
    data.remove_prefix(static_cast<std::size_t>(n));
  }
  return true;
}

}  // namespace

TcpScorerServer::TcpScorerServer(const Scorer& scorer, const std::string& host, std::uint16_t port)
    : scorer_(&scorer) {
  listen_fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
  if (listen_fd_ < 0) throw ConnectionError(std::string("socket: ") + std::strerror(errno));
  int one = 1;
  ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(port);
  if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) {
    ::close(listen_fd_);
    throw ConfigError("listen address must be a dotted IPv4 address: '" + host + "'");
  }
  if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) < 0 || ::listen(listen_fd_, 16) < 0) {
    std::string why = std::strerror(errno);
    ::close(listen_fd_);
    throw ConnectionError("cannot listen on " + host + ":" + std::to_string(port) + ": " + why);
  }
  socklen_t len = sizeof addr;
  ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&addr), &len);
  port_ = ntohs(addr.sin_port);
}

TcpScorerServer::~TcpScorerServer() {
  stop();
  if (listen_fd_ >= 0) ::close(listen_fd_);
}

void TcpScorerServer::start() {
  acceptor_ = std::thread([this] { run(); });
}

void TcpScorerServer::run() {
  while (!stopping_) {
    pollfd p{listen_fd_, POLLIN, 0};
    int rc = ::poll(&p, 1, 100);
    if (rc <= 0) continue;
    int fd = ::accept(listen_fd_, nullptr, nullptr);
    if (fd < 0) continue;
    std::lock_guard lock(mu_);
    workers_.emplace_back([this, fd] { serve_connection(fd); });
  }
}

void TcpScorerServer::stop() {
  stopping_ = true;
  if (acceptor_.joinable()) acceptor_.join();
  std::vector<std::thread> workers;
  {
    std::lock_guard lock(mu_);
    workers.swap(workers_);
  }
  for (std::thread& t : workers)
    if (t.joinable()) t.join();
}

void TcpScorerServer::serve_connection(int fd) {
  ProtocolSession session(*scorer_);
  FdLines lines(fd);
  std::string line;
  while (!stopping_) {
    auto status = lines.read(line, std::chrono::milliseconds(100));
    if (status == ScorerConnection::ReadStatus::Timeout) continue;
    if (status == ScorerConnection::ReadStatus::Closed) break;
    if (!write_all(fd, session.handle(line) + "\n", true)) break;
  }
  ::close(fd);
}

// --- client --------------------------------------------------------------------

Endpoint parse_endpoint(std::string_view text) {
  Endpoint e;
  if (text.rfind("tcp://", 0) == 0) {
    std::string_view rest = text.substr(6);
    auto colon = rest.rfind(':');
    if (colon == std::string_view::npos || colon == 0) throw ConfigError("endpoint must look like tcp://host:port");
    e.kind = Endpoint::Kind::Tcp;
    e.host = std::string(rest.substr(0, colon));
    std::string port(rest.substr(colon + 1));
    char* end = nullptr;
    long p = std::strtol(port.c_str(), &end, 10);
    if (port.empty() || *end != '\0' || p < 1 || p > 65535) throw ConfigError("bad port in endpoint '" + std::string(text) + "'");
    e.port = static_cast<std::uint16_t>(p);
    return e;
  }
  if (text.rfind("exec:", 0) == 0 && text.size() > 5) {
    e.kind = Endpoint::Kind::Exec;
    e.command = std::string(text.substr(5));
    return e;
  }
  throw ConfigError("unknown endpoint '" + std::string(text) + "' (expected tcp://host:port or exec:<command>)");
}

namespace {

class TcpConnection final : public ScorerConnection {
 public:
  explicit TcpConnection(const Endpoint& e) {
    addrinfo hints{};
    hints.ai_family = AF_UNSPEC;
    hints.ai_socktype = SOCK_STREAM;
    addrinfo* res = nullptr;
    std::string port = std::to_string(e.port);
    if (int rc = ::getaddrinfo(e.host.c_str(), port.c_str(), &hints, &res); rc != 0)
      throw ConnectionError("cannot resolve " + e.host + ": " + ::gai_strerror(rc));
    std::string why = "no address";
    for (addrinfo* a = res; a; a = a->ai_next) {
      int fd = ::socket(a->ai_family, a->ai_socktype, a->ai_protocol);
      if (fd < 0) continue;
      if (::connect(fd, a->ai_addr, a->ai_addrlen) == 0) {
        fd_ = fd;
        break;
      }
      why = std::strerror(errno);
      ::close(fd);
    }
    ::freeaddrinfo(res);
    if (fd_ < 0) throw ConnectionError("cannot connect to " + e.host + ":" + port + ": " + why);
    lines_ = std::make_unique<FdLines>(fd_);
  }
  ~TcpConnection() override { ::close(fd_); }

  bool send_line(const std::string& line) override { return write_all(fd_, line + "\n", true); }
  ReadStatus read_line(std::string& line, std::chrono::milliseconds timeout) override {
    return lines_->read(line, timeout);
  }

 private:
  int fd_ = -1;
  std::unique_ptr<FdLines> lines_;
};

class ExecConnection final : public ScorerConnection {
 public:
  explicit ExecConnection(const Endpoint& e) {
    std::signal(SIGPIPE, SIG_IGN);
    int to_child[2], from_child[2];
    if (::pipe(to_child) != 0) throw ConnectionError(std::string("pipe: ") + std::strerror(errno));
    if (::pipe(from_child) != 0) {
      ::close(to_child[0]);
      ::close(to_child[1]);
      throw ConnectionError(std::string("pipe: ") + std::strerror(errno));
    }
    pid_ = ::fork();
    if (pid_ < 0) throw ConnectionError(std::string("fork: ") + std::strerror(errno));
    if (pid_ == 0) {
      ::dup2(to_child[0], STDIN_FILENO);
      ::dup2(from_child[1], STDOUT_FILENO);
      ::close(to_child[0]);
      ::close(to_child[1]);
      ::close(from_child[0]);
      ::close(from_child[1]);
      ::execl("/bin/sh", "sh", "-c", e.command.c_str(), static_cast<char*>(nullptr));
      ::_exit(127);
    }
    ::close(to_child[0]);
    ::close(from_child[1]);
    in_ = to_child[1];
    out_ = from_child[0];
    ::fcntl(in_, F_SETFD, FD_CLOEXEC);
    ::fcntl(out_, F_SETFD, FD_CLOEXEC);
    lines_ = std::make_unique<FdLines>(out_);
  }

  ~ExecConnection() override {
    ::close(in_);
    ::close(out_);
    // give the scorer a moment to exit on EOF before forcing it
    for (int i = 0; i < 50; ++i) {
      if (::waitpid(pid_, nullptr, WNOHANG) == pid_) return;
      ::usleep(10000);
    }
    ::kill(pid_, SIGTERM);
    ::waitpid(pid_, nullptr, 0);
  }

  bool send_line(const std::string& line) override { return write_all(in_, line + "\n", false); }
  ReadStatus read_line(std::string& line, std::chrono::milliseconds timeout) override {
    return lines_->read(line, timeout);
  }

 private:
  pid_t pid_ = -1;
  int in_ = -1;
  int out_ = -1;
  std::unique_ptr<FdLines> lines_;
};

}  // namespace

std::unique_ptr<ScorerConnection> connect_endpoint(const Endpoint& e) {
  if (e.kind == Endpoint::Kind::Tcp) return std::make_unique<TcpConnection>(e);
  return std::make_unique<ExecConnection>(e);
}

std::vector<ScoreOutcome> score_batch(ScorerConnection& conn, std::span<const std::vector<std::string>> sentences,
                                      const BatchOptions& options) {
  std::vector<ScoreOutcome> out(sentences.size());
  bool closed = false;
  for (std::size_t i = 0; i < sentences.size(); ++i) {
    ScoreOutcome& o = out[i];
    if (closed) {
      o.failure = "connection closed";
      continue;
    }
    ScoreRequest req{conn.next_id(), sentences[i], options.want_eos};
    if (!conn.send_line(encode_request(req))) {
      closed = true;
      o.failure = "connection closed";
      continue;
    }
    auto deadline = std::chrono::steady_clock::now() + options.timeout;
    for (;;) {
      auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now());
      std::string line;
      auto status = left.count() > 0 ? conn.read_line(line, left) : ScorerConnection::ReadStatus::Timeout;
      if (status == ScorerConnection::ReadStatus::Timeout) {
        o.failure = "timeout";
        break;
      }
      if (status == ScorerConnection::ReadStatus::Closed) {
        closed = true;
        o.failure = "connection closed";
        break;
      }
      ScoreResponse resp;
      try {
        resp = decode_response(line);
      } catch (const ProtocolError& e) {
        o.failure = std::string("malformed response: ") + e.what();
        break;
      }
      if (resp.id && *resp.id < req.id) continue;  // late answer to a timed-out request
      if (resp.id != req.id) {
        o.failure = resp.ok() ? "response id mismatch" : resp.error;
        break;
      }
      if (!resp.ok()) {
        o.failure = resp.error;
      } else if (resp.surprisals.size() != req.tokens.size() || (options.want_eos && !resp.eos)) {
        o.failure = "length mismatch";
      } else {
        o.value = SentenceSurprisal{std::move(resp.surprisals), resp.eos.value_or(0.0)};
      }
      break;
    }
  }
  return out;
}

std::vector<ScoreOutcome> score_batch(const Endpoint& endpoint, std::span<const std::vector<std::string>> sentences,
                                      const BatchOptions& options) {
  auto conn = connect_endpoint(endpoint);
  return score_batch(*conn, sentences, options);
}

}  // namespace synstate
