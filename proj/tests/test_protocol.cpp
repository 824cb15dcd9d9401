#include <cmath>
#include <sstream>
#include <thread>

#include "doctest.h"
#include "synstate/error.hpp"
#include "synstate/logmath.hpp"
#include "synstate/protocol.hpp"

using namespace synstate;
using namespace std::chrono_literals;

namespace {

using Toks = std::vector<std::string>;

std::shared_ptr<const Pcfg> deterministic_grammar() {
  return std::make_shared<Pcfg>(parse_grammar("start: S\nS -> a b # 1\n"));
}

std::shared_ptr<const Pcfg> ambiguous_grammar() {
  return std::make_shared<Pcfg>(parse_grammar(
      "start: S\n"
      "S -> S S # 0.3\n"
      "S -> a # 0.5\n"
      "S -> b # 0.2\n"));
}

bool same_bits(double a, double b) { return a == b || std::abs(a - b) <= 1e-9; }

class SlowScorer final : public Scorer {
 public:
  explicit SlowScorer(std::chrono::milliseconds delay_on_c) : delay_(delay_on_c) {}
  const std::string& name() const override { return name_; }
  SentenceSurprisal score(std::span<const std::string> tokens) const override {
    SentenceSurprisal s;
    for (const std::string& t : tokens) {
      if (t == "c") std::this_thread::sleep_for(delay_);
      s.bits.push_back(t == "z" ? kInfinity : 1.5);
    }
    return s;
  }

 private:
  std::chrono::milliseconds delay_;
  std::string name_ = "slow";
};

}  // namespace

TEST_CASE("request and response records") {
  CHECK(encode_request({1, {"a", "b"}, true}) == R"({"id":1,"tokens":["a","b"],"want_eos":true})");
  ScoreResponse ok{1, {0.0, 0.0}, 0.0, ""};
  CHECK(encode_response(ok) == R"({"id":1,"surprisals":[0.0,0.0],"eos":0.0,"status":"ok"})");
  ScoreResponse inf{2, {kInfinity}, std::nullopt, ""};
  CHECK(encode_response(inf) == R"({"id":2,"surprisals":["inf"],"status":"ok"})");
  ScoreResponse bad{std::nullopt, {}, std::nullopt, "parse"};
  CHECK(encode_response(bad) == R"({"status":"error","error":"parse"})");

  for (const ScoreResponse& r : {ok, inf, bad}) CHECK(decode_response(encode_response(r)) == r);
  ScoreRequest req{7, {"x", "y z", "\"q\""}, false};
  CHECK(decode_request(encode_request(req)) == req);
}

TEST_CASE("decimal encoding keeps doubles exact") {
  ScoreResponse r{1, {1.0 / 3.0, 12.345678901234567, 1e-300, 0.1}, std::log2(10.0), ""};
  CHECK(decode_response(encode_response(r)) == r);
}

TEST_CASE("decoder rejects malformed records") {
  CHECK_THROWS_AS(decode_request("{"), ProtocolError);
  CHECK_THROWS_AS(decode_request(R"({"tokens":[],"want_eos":true})"), ProtocolError);
  CHECK_THROWS_AS(decode_request(R"({"id":1.5,"tokens":[],"want_eos":true})"), ProtocolError);
  CHECK_THROWS_AS(decode_request(R"({"id":1,"tokens":[3],"want_eos":true})"), ProtocolError);
  CHECK_THROWS_AS(decode_request(R"({"id":1,"tokens":[]})"), ProtocolError);
  CHECK_THROWS_AS(decode_response(R"({"id":1,"surprisals":[-1],"status":"ok"})"), ProtocolError);
  CHECK_THROWS_AS(decode_response(R"({"id":1,"surprisals":["nan"],"status":"ok"})"), ProtocolError);
  CHECK_THROWS_AS(decode_response(R"({"id":1,"surprisals":[1]})"), ProtocolError);
}

TEST_CASE("session transcript against the deterministic grammar") {
  auto scorer = make_earley_scorer(deterministic_grammar(), "det");
  ProtocolSession s(*scorer);
  CHECK(s.handle(R"({"id":1,"tokens":["a","b"],"want_eos":true})") ==
        R"({"id":1,"surprisals":[0.0,0.0],"eos":0.0,"status":"ok"})");
  CHECK(s.handle("this is not json") == R"({"status":"error","error":"parse"})");
  CHECK(s.handle("") == R"({"status":"error","error":"parse"})");
  CHECK(s.handle(R"({"id":2,"tokens":[],"want_eos":true})") == R"({"id":2,"surprisals":[],"eos":"inf","status":"ok"})");
  CHECK(s.handle(R"({"id":3,"tokens":[],"want_eos":false})") == R"({"id":3,"surprisals":[],"status":"ok"})");
  CHECK(s.handle(R"({"id":4,"tokens":["a","a"],"want_eos":false})") == R"({"id":4,"surprisals":[0.0,"inf"],"status":"ok"})");
  CHECK(s.handle(R"({"id":4,"tokens":["a"],"want_eos":false})") ==
        R"({"id":4,"status":"error","error":"non-increasing id"})");
  std::string invalid = s.handle(R"({"id":9,"tokens":"a b","want_eos":false})");
  CHECK(invalid.find(R"("id":9)") != std::string::npos);
  CHECK(invalid.find("invalid request") != std::string::npos);
  // out-of-vocabulary word under unk policy none is a scorer error
  std::string oov = s.handle(R"({"id":10,"tokens":["zzz"],"want_eos":false})");
  CHECK(oov.find("out-of-vocabulary") != std::string::npos);
  CHECK(s.handle(R"({"id":11,"tokens":["a"],"want_eos":true})") == R"({"id":11,"surprisals":[0.0],"eos":"inf","status":"ok"})");
}

TEST_CASE("stream server answers every line in order") {
  auto scorer = make_earley_scorer(deterministic_grammar(), "det");
  std::istringstream in(
      "{\"id\":1,\"tokens\":[\"a\"],\"want_eos\":false}\n"
      "garbage\n"
      "{\"id\":2,\"tokens\":[\"a\",\"b\"],\"want_eos\":true}\r\n");
  std::ostringstream out;
  serve_stream(*scorer, in, out);
  CHECK(out.str() ==
        "{\"id\":1,\"surprisals\":[0.0],\"status\":\"ok\"}\n"
        "{\"status\":\"error\",\"error\":\"parse\"}\n"
        "{\"id\":2,\"surprisals\":[0.0,0.0],\"eos\":0.0,\"status\":\"ok\"}\n");
}

TEST_CASE("endpoint syntax") {
  Endpoint t = parse_endpoint("tcp://127.0.0.1:5000");
  CHECK(t.kind == Endpoint::Kind::Tcp);
  CHECK(t.host == "127.0.0.1");
  CHECK(t.port == 5000);
  Endpoint e = parse_endpoint("exec:python3 lm.py --x");
  CHECK(e.kind == Endpoint::Kind::Exec);
  CHECK(e.command == "python3 lm.py --x");
  CHECK_THROWS_AS(parse_endpoint("tcp://host"), ConfigError);
  CHECK_THROWS_AS(parse_endpoint("tcp://host:0"), ConfigError);
  CHECK_THROWS_AS(parse_endpoint("tcp://host:99999"), ConfigError);
  CHECK_THROWS_AS(parse_endpoint("udp://host:1"), ConfigError);
  CHECK_THROWS_AS(parse_endpoint("exec:"), ConfigError);
}

TEST_CASE("tcp round trip matches direct scoring") {
  auto scorer = make_earley_scorer(ambiguous_grammar(), "amb");
  TcpScorerServer server(*scorer, "127.0.0.1", 0);
  server.start();
  std::vector<Toks> sentences = {{"a"}, {"a", "b"}, {"b", "a", "a", "b"}, {}, {"a", "a", "a", "a", "a", "a"}};
  Endpoint ep{Endpoint::Kind::Tcp, "127.0.0.1", server.port(), ""};
  auto got = score_batch(ep, sentences);
  REQUIRE(got.size() == sentences.size());
  for (std::size_t i = 0; i < sentences.size(); ++i) {
    REQUIRE(got[i].ok());
    SentenceSurprisal direct = scorer->score(sentences[i]);
    REQUIRE(got[i].value->bits.size() == direct.bits.size());
    for (std::size_t k = 0; k < direct.bits.size(); ++k) CHECK(same_bits(got[i].value->bits[k], direct.bits[k]));
    CHECK(same_bits(got[i].value->eos, direct.eos));
  }
  server.stop();
}

TEST_CASE("one slow sentence times out without failing the batch") {
  SlowScorer scorer(500ms);
  TcpScorerServer server(scorer, "127.0.0.1", 0);
  server.start();
  auto conn = connect_endpoint({Endpoint::Kind::Tcp, "127.0.0.1", server.port(), ""});
  std::vector<Toks> sentences = {{"a"}, {"c"}, {"a", "b"}, {"z"}};
  auto got = score_batch(*conn, sentences, {350ms, false});
  REQUIRE(got.size() == 4);
  CHECK(got[0].ok());
  CHECK_FALSE(got[1].ok());
  CHECK(got[1].failure == "timeout");
  // the late answer to the timed-out request is skipped
  REQUIRE(got[2].ok());
  CHECK(got[2].value->bits == std::vector<double>{1.5, 1.5});
  REQUIRE(got[3].ok());
  CHECK(std::isinf(got[3].value->bits[0]));
  // ids keep increasing on the same connection
  auto again = score_batch(*conn, std::vector<Toks>{{"a"}}, {1000ms, false});
  CHECK(again[0].ok());
  server.stop();
}

TEST_CASE("exec endpoint and response validation") {
  std::vector<Toks> sentences = {{"a", "b"}};
  Endpoint mismatch = parse_endpoint(
      R"(exec:while read l; do echo '{"id":1,"surprisals":[1.0],"eos":0.5,"status":"ok"}'; done)");
  auto got = score_batch(mismatch, sentences);
  CHECK(got[0].failure == "length mismatch");

  Endpoint err = parse_endpoint(R"(exec:while read l; do echo '{"id":1,"status":"error","error":"model exploded"}'; done)");
  CHECK(score_batch(err, sentences)[0].failure == "model exploded");

  Endpoint dies = parse_endpoint("exec:read l; exit 0");
  auto closed = score_batch(dies, std::vector<Toks>{{"a"}, {"b"}});
  CHECK(closed[0].failure == "connection closed");
  CHECK(closed[1].failure == "connection closed");

  Endpoint echo = parse_endpoint(
      R"(exec:while read l; do echo '{"id":1,"surprisals":[2.0,"inf"],"eos":0.25,"status":"ok"}'; done)");
  auto ok = score_batch(echo, sentences);
  REQUIRE(ok[0].ok());
  CHECK(ok[0].value->bits[0] == 2.0);
  CHECK(std::isinf(ok[0].value->bits[1]));
  CHECK(ok[0].value->eos == 0.25);
}

TEST_CASE("unreachable endpoint is a batch-level error") {
  int port = 0;
  {
    auto scorer = make_earley_scorer(deterministic_grammar(), "det");
    TcpScorerServer probe(*scorer, "127.0.0.1", 0);
    port = probe.port();
  }
  std::vector<Toks> sentences = {{"a"}};
  CHECK_THROWS_AS(score_batch({Endpoint::Kind::Tcp, "127.0.0.1", static_cast<std::uint16_t>(port), ""}, sentences),
                  ConnectionError);
}
