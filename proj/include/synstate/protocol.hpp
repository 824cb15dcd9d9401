#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "synstate/scorer.hpp"

// Line-delimited JSON protocol for surprisal scorers.
//   request:  {"id":1,"tokens":["a","b"],"want_eos":true}
//   response: {"id":1,"surprisals":[0.0,1.0],"eos":0.0,"status":"ok"}
//             {"id":1,"status":"error","error":"<message>"}
//             {"status":"error","error":"parse"}   (unparseable line)
// Infinite surprisal is the string "inf"; eos is absent unless requested.
// Ids must strictly increase per connection and responses keep request order.

namespace synstate {

struct ScoreRequest {
  std::int64_t id = 0;
  std::vector<std::string> tokens;
  bool want_eos = false;

  friend bool operator==(const ScoreRequest&, const ScoreRequest&) = default;
};

struct ScoreResponse {
  std::optional<std::int64_t> id;
  std::vector<double> surprisals;
  std::optional<double> eos;
  std::string error;  // empty on success

  bool ok() const { return error.empty(); }
  friend bool operator==(const ScoreResponse&, const ScoreResponse&) = default;
};

std::string encode_request(const ScoreRequest& r);
ScoreRequest decode_request(std::string_view line);  // throws ProtocolError
std::string encode_response(const ScoreResponse& r);
ScoreResponse decode_response(std::string_view line);  // throws ProtocolError

// Server-side state of one connection.
class ProtocolSession {
 public:
  explicit ProtocolSession(const Scorer& scorer) : scorer_(&scorer) {}
  // Response line (without newline) for one request line.
  std::string handle(std::string_view line);

 private:
  const Scorer* scorer_;
  std::optional<std::int64_t> last_id_;
};

// Serves until the input stream ends.
void serve_stream(const Scorer& scorer, std::istream& in, std::ostream& out);

// Threaded TCP listener; each connection is served sequentially on its own
// thread. Port 0 binds an ephemeral port.
class TcpScorerServer {
 public:
  TcpScorerServer(const Scorer& scorer, const std::string& host, std::uint16_t port);
  ~TcpScorerServer();
  TcpScorerServer(const TcpScorerServer&) = delete;
  TcpScorerServer& operator=(const TcpScorerServer&) = delete;

  std::uint16_t port() const { return port_; }
  void start();  // accept on a background thread
  void run();    // accept on the calling thread until stop()
  void stop();

 private:
  void serve_connection(int fd);

  const Scorer* scorer_;
  int listen_fd_ = -1;
  std::uint16_t port_ = 0;
  std::atomic<bool> stopping_{false};
  std::thread acceptor_;
  std::mutex mu_;
  std::vector<std::thread> workers_;
};

struct Endpoint {
  enum class Kind { Tcp, Exec } kind = Kind::Tcp;
  std::string host;
  std::uint16_t port = 0;
  std::string command;
};

// "tcp://host:port" or "exec:<shell command>"; throws ConfigError.
Endpoint parse_endpoint(std::string_view text);

class ScorerConnection {
 public:
  enum class ReadStatus { Line, Timeout, Closed };

  virtual ~ScorerConnection() = default;
  virtual bool send_line(const std::string& line) = 0;
  virtual ReadStatus read_line(std::string& line, std::chrono::milliseconds timeout) = 0;

  // Request ids issued on this connection, strictly increasing from 1.
  std::int64_t next_id() { return next_id_++; }

 private:
  std::int64_t next_id_ = 1;
};

// Throws ConnectionError when the endpoint cannot be reached.
std::unique_ptr<ScorerConnection> connect_endpoint(const Endpoint& e);

struct BatchOptions {
  std::chrono::milliseconds timeout{30000};  // per request
  bool want_eos = true;
};

// Scores sentences over one connection, in order. Per-sentence problems
// (timeout, error status, length mismatch, closed stream) become failures.
std::vector<ScoreOutcome> score_batch(ScorerConnection& conn, std::span<const std::vector<std::string>> sentences,
                                      const BatchOptions& options = {});
// Opens a connection first; throws ConnectionError if that fails.
std::vector<ScoreOutcome> score_batch(const Endpoint& endpoint, std::span<const std::vector<std::string>> sentences,
                                      const BatchOptions& options = {});

}  // namespace synstate
