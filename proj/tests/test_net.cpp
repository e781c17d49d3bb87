#include <doctest.h>

#include <set>

#include "ppir/net.hpp"
#include "ppir/rng.hpp"
#include "ppir/scheme_ppir.hpp"

using namespace ppir;
using namespace ppir::net;
using u64 = std::uint64_t;

TEST_CASE("hello frame matches the fixed wire shape") {
  const WireMessage hello = make_hello("abc", 13, "ppir");
  CHECK(encode(hello) == "{\"kind\":\"hello\",\"session\":\"abc\",\"s\":13,\"scheme\":\"ppir\"}\n");
  CHECK(decode(encode(hello)) == hello);

  const WireMessage mhello = make_hello("abc", 13, "mppir", 2);
  CHECK(encode(mhello) ==
        "{\"kind\":\"hello\",\"session\":\"abc\",\"s\":13,\"scheme\":\"mppir\",\"lambda\":2}\n");
  CHECK(decode(encode(mhello)) == mhello);
}

TEST_CASE("empty query batch round-trips") {
  const WireMessage m = make_query_batch("s1", {});
  CHECK(decode(encode(m)) == m);
}

TEST_CASE("decode errors") {
  CHECK_THROWS_AS(decode("not json"), MalformedFrame);
  CHECK_THROWS_AS(decode("{\"kind\":\"bogus\",\"session\":\"x\"}"), UnknownKind);
  CHECK_THROWS_AS(decode("{\"kind\":\"hello\",\"session\":\"x\"}"), MalformedFrame);
  CHECK_THROWS_AS(decode("[1,2,3]"), MalformedFrame);
  std::string big(kMaxFrameBytes + 1, 'x');
  CHECK_THROWS_AS(decode(big), OversizeFrame);
}

TEST_CASE("random frames round-trip") {
  Rng rng(77);
  for (int i = 0; i < 10000; ++i) {
    WireMessage m;
    switch (rng.below(4)) {
      case 0:
        m = make_hello("s" + std::to_string(rng.below(100)), 1 + rng.below(60),
                       rng.below(2) ? "mppir" : "single_server", 1 + rng.below(4));
        break;
      case 1: {
        std::vector<Query> queries;
        const u64 qn = rng.below(4);
        for (u64 q = 0; q < qn; ++q) {
          std::vector<QueryTerm> terms;
          const u64 tn = 1 + rng.below(3);
          for (u64 t = 0; t < tn; ++t)
            terms.push_back({t + 1 + rng.below(2) * 4, 1 + rng.below(16), 1 + rng.below(250)});
          queries.push_back(make_query(std::move(terms)));
        }
        m = make_query_batch("q", std::move(queries));
        break;
      }
      case 2: {
        std::vector<std::vector<u64>> answers(rng.below(5));
        for (auto& a : answers) {
          a.resize(1 + rng.below(3));
          for (auto& v : a) v = rng.below(257);
        }
        m = make_answer_batch("a", std::move(answers));
        break;
      }
      default:
        m = make_error("e", "bad_candidate", "text " + std::to_string(rng.below(10)));
        break;
    }
    CHECK(decode(encode(m)) == m);
  }
}

namespace {

std::vector<std::string> session_lines(u64 s, const std::string& scheme, u64 lambda,
                                       const std::vector<Query>& queries) {
  return {encode(make_hello("t", s, scheme, lambda)), encode(make_query_batch("t", queries))};
}

}  // namespace

TEST_CASE("server enforces hello-before-query and candidate bounds") {
  DatabaseServer srv(build_dataset({4, 6, 10}, 8, 257, 1));
  {
    DatabaseServer::SessionState st;
    const auto replies =
        srv.handle_line(st, encode(make_query_batch("x", {make_query({{1, 1, 1}})})));
    REQUIRE(replies.size() == 1);
    CHECK(decode(replies[0]).code == "protocol_error");
  }
  {
    DatabaseServer::SessionState st;
    CHECK(srv.handle_line(st, encode(make_hello("x", 13, "ppir"))).empty());
    const auto replies =
        srv.handle_line(st, encode(make_query_batch("x", {make_query({{4, 1, 1}})})));
    REQUIRE(replies.size() == 1);
    CHECK(decode(replies[0]).code == "bad_candidate");
  }
  {
    DatabaseServer::SessionState st;
    const auto replies = srv.handle_line(st, encode(make_hello("x", 61, "ppir")));
    REQUIRE(replies.size() == 1);
    CHECK(decode(replies[0]).code == "bad_seed");
  }
  {
    DatabaseServer::SessionState st;
    const auto replies = srv.handle_line(st, encode(make_hello("x", 1, "mppir", 9)));
    REQUIRE(replies.size() == 1);
    CHECK(decode(replies[0]).code == "lambda_too_large");
  }
}

TEST_CASE("replaying a session yields byte-identical answers; replicas agree") {
  const Dataset ds = build_dataset({4, 6, 10}, 8, 257, 33);
  DatabaseServer a(ds), b(ds);
  const auto rnd = ClientRandomness::identity(13, 3, 8, 2);
  const PpirPlan plan = gen_queries_ppir({2, 3, 3, false}, rnd);
  const auto lines = session_lines(13, "ppir", 1, plan.db_queries[0]);

  auto run = [&](DatabaseServer& srv) {
    DatabaseServer::SessionState st;
    std::vector<std::string> replies;
    for (const auto& line : lines) {
      for (auto& r : srv.handle_line(st, line)) replies.push_back(std::move(r));
    }
    return replies;
  };
  const auto r1 = run(a);
  const auto r2 = run(a);
  const auto r3 = run(b);
  CHECK(r1 == r2);  // determinism
  CHECK(r1 == r3);  // replication
  REQUIRE(r1.size() == 1);
  CHECK(decode(r1[0]).kind == WireMessage::Kind::answer_batch);
}

TEST_CASE("orchestrate end-to-end over in-process endpoints: paper rate 4/7") {
  const Dataset ds = build_dataset({4, 6, 10}, 8, 257, 4);
  const PpirParams params{2, 3, 3, false};
  const auto rnd = ClientRandomness::identity(13, 3, 8, 2);
  const PpirPlan plan = gen_queries_ppir(params, rnd);

  std::vector<std::shared_ptr<Endpoint>> eps;
  std::vector<std::shared_ptr<DatabaseServer>> servers;
  for (int j = 0; j < 2; ++j) {
    servers.push_back(std::make_shared<DatabaseServer>(ds, true));
    eps.push_back(std::make_shared<InprocEndpoint>(servers.back()));
  }
  const Transcript t = orchestrate(13, "ppir", 1, plan.db_queries, eps, "sess-1");
  CHECK(t.total_answer_symbols() == 14);
  CHECK(measure_rate(t, 8, 1) == capacity::Rat(4, 7));
  const auto symbols = decode_ppir(t, params, rnd, 257);
  CHECK(symbols == ds.symbols[12]);

  // noncollusion: neither database's query traffic reaches the other
  const auto log0 = servers[0]->session_log();
  const auto log1 = servers[1]->session_log();
  std::set<std::string> in0, in1;
  for (const auto& [sid, line] : log0) in0.insert(line);
  for (const auto& [sid, line] : log1) in1.insert(line);
  const std::string q0 = encode(make_query_batch("sess-1", plan.db_queries[0]));
  const std::string q1 = encode(make_query_batch("sess-1", plan.db_queries[1]));
  CHECK(in0.count(q0) == 1);
  CHECK(in0.count(q1) == 0);
  CHECK(in1.count(q1) == 1);
  CHECK(in1.count(q0) == 0);
}

TEST_CASE("tcp transport matches in-process byte for byte") {
  const Dataset ds = build_dataset({4, 6, 10}, 8, 257, 21);
  const PpirParams params{2, 3, 2, false};
  Rng rng(6);
  const auto rnd = ClientRandomness::sample(rng, ds.cls.delta, 3, 8, 2);
  const PpirPlan plan = gen_queries_ppir(params, rnd);

  std::vector<std::shared_ptr<Endpoint>> inproc_eps, tcp_eps;
  std::vector<std::unique_ptr<TcpListener>> listeners;
  for (int j = 0; j < 2; ++j) {
    auto srv = std::make_shared<DatabaseServer>(ds);
    inproc_eps.push_back(std::make_shared<InprocEndpoint>(srv));
    listeners.push_back(serve_database(srv, "127.0.0.1:0"));
    tcp_eps.push_back(std::make_shared<TcpEndpoint>("127.0.0.1", listeners.back()->port()));
  }
  const Transcript ti = orchestrate(rnd.s, "ppir", 1, plan.db_queries, inproc_eps, "s");
  const Transcript tt = orchestrate(rnd.s, "ppir", 1, plan.db_queries, tcp_eps, "s");
  CHECK(transcript_fingerprint(ti) == transcript_fingerprint(tt));
  CHECK(ti == tt);
}

TEST_CASE("a dead endpoint aborts the retrieval with no partial decode") {
  const Dataset ds = build_dataset({2, 2}, 4, 257, 9);
  const auto rnd = ClientRandomness::identity(1, 2, 4, 2);
  const PpirPlan plan = gen_queries_ppir({2, 2, 1, false}, rnd);

  std::vector<std::shared_ptr<Endpoint>> eps;
  eps.push_back(std::make_shared<InprocEndpoint>(std::make_shared<DatabaseServer>(ds)));
  // unroutable port: nothing listens on it
  eps.push_back(std::make_shared<TcpEndpoint>("127.0.0.1", 1));
  CHECK_THROWS_AS(orchestrate(1, "ppir", 1, plan.db_queries, eps, "s",
                              std::chrono::milliseconds(300)),
                  PartialFailure);
}

TEST_CASE("error frames from the database surface as PartialFailure") {
  const Dataset ds = build_dataset({2, 2}, 4, 257, 9);
  const auto rnd = ClientRandomness::identity(1, 2, 4, 2);
  PpirPlan plan = gen_queries_ppir({2, 2, 1, false}, rnd);
  // corrupt one query to reference a candidate outside [Γ]
  plan.db_queries[0][0] = make_query({{7, 1, 1}});
  std::vector<std::shared_ptr<Endpoint>> eps;
  for (int j = 0; j < 2; ++j)
    eps.push_back(std::make_shared<InprocEndpoint>(std::make_shared<DatabaseServer>(ds)));
  CHECK_THROWS_AS(orchestrate(1, "ppir", 1, plan.db_queries, eps, "s"), PartialFailure);
}
