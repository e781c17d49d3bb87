#include <doctest.h>

#include "ppir/audit.hpp"

using namespace ppir;
using namespace ppir::audit;
using capacity::Rat;
using u64 = std::uint64_t;

TEST_CASE("privacy_distance trivial fixtures") {
  TranscriptDistribution a, b;
  a.probs["t1"] = Rat(1, 2);
  a.probs["t2"] = Rat(1, 2);
  b.probs["t1"] = Rat(1, 2);
  b.probs["t2"] = Rat(1, 2);
  CHECK(privacy_distance(a, b) == 0);

  TranscriptDistribution c, d;
  c.probs["only-c"] = 1;
  d.probs["only-d"] = 1;
  CHECK(privacy_distance(c, d) == 1);

  TranscriptDistribution e;
  e.probs["t1"] = 1;
  CHECK(privacy_distance(a, e) == Rat(1, 2));
}

TEST_CASE("ppir raw enumeration at n=2, Gamma=2: exact privacy") {
  const auto d1 = enumerate_ppir_raw(2, 2, 1, 1);
  const auto d2 = enumerate_ppir_raw(2, 2, 2, 1);
  CHECK(d1.total() == 1);
  CHECK(d2.total() == 1);
  CHECK(d1.probs == d2.probs);
  CHECK(privacy_distance(d1, d2) == 0);
  // support: per-candidate ordered index pairs, uniform
  CHECK(d1.probs.size() == 144);
  for (const auto& [key, p] : d1.probs) CHECK(p == Rat(1, 144));

  // database 2's marginal is private as well
  CHECK(privacy_distance(enumerate_ppir_raw(2, 2, 1, 2), enumerate_ppir_raw(2, 2, 2, 2)) == 0);
}

TEST_CASE("ppir raw enumeration in shuffled mode yields the same verdict") {
  EnumerationOptions opts;
  opts.shuffle = true;
  const auto d1 = enumerate_ppir_raw(2, 2, 1, 1, opts);
  const auto d2 = enumerate_ppir_raw(2, 2, 2, 1, opts);
  CHECK(d1.total() == 1);
  CHECK(privacy_distance(d1, d2) == 0);
}

TEST_CASE("degenerate Gamma=1: single transcript with probability 1") {
  const auto d = enumerate_ppir_raw(2, 1, 1, 1);
  REQUIRE(d.probs.size() == 1);
  CHECK(d.probs.begin()->second == 1);
}

TEST_CASE("quotient agrees with raw enumeration at Gamma=2") {
  const auto raw_tv =
      privacy_distance(enumerate_ppir_raw(2, 2, 1, 1), enumerate_ppir_raw(2, 2, 2, 1));
  const auto quo_tv =
      privacy_distance(enumerate_ppir_quotient(2, 2, 1, 1), enumerate_ppir_quotient(2, 2, 2, 1));
  CHECK(raw_tv == quo_tv);
  CHECK(quo_tv == 0);
}

TEST_CASE("quotient mode certifies Gamma=3 where raw enumeration is infeasible") {
  CHECK_THROWS_AS(enumerate_ppir_raw(2, 3, 1, 1), BudgetExceeded);
  // canonical table (a) and table (b) transcripts are equally likely: their
  // normal forms coincide
  const auto d3 = enumerate_ppir_quotient(2, 3, 3, 1);
  const auto d1 = enumerate_ppir_quotient(2, 3, 1, 1);
  CHECK(d3.probs == d1.probs);
  for (u64 db = 1; db <= 2; ++db) {
    for (u64 g1 = 1; g1 <= 3; ++g1) {
      for (u64 g2 = g1 + 1; g2 <= 3; ++g2) {
        CHECK(privacy_distance(enumerate_ppir_quotient(2, 3, g1, db),
                               enumerate_ppir_quotient(2, 3, g2, db)) == 0);
      }
    }
  }
}

TEST_CASE("quotient flags a genuinely different structure") {
  // Γ=2 desired-1 transcript vs the Γ=3 desired-1 transcript: different query
  // shapes, disjoint supports, distance exactly 1.
  const auto a = enumerate_ppir_quotient(2, 2, 1, 1);
  const auto b = enumerate_ppir_quotient(2, 3, 1, 1);
  CHECK(privacy_distance(a, b) == 1);
}

TEST_CASE("mppir raw enumeration at n=2, Gamma=2, eta=1, lambda=2") {
  MppirParams w1{2, 2, {1}, 2, 257, false};
  MppirParams w2{2, 2, {2}, 2, 257, false};
  const auto d1 = enumerate_mppir_raw(w1, 1);
  const auto d2 = enumerate_mppir_raw(w2, 1);
  CHECK(d1.total() == 1);
  CHECK(privacy_distance(d1, d2) == 0);
}

TEST_CASE("mppir quotient over column permutations at Gamma=4, eta=2") {
  const std::vector<std::vector<u64>> omegas = {{1, 2}, {1, 3}, {1, 4}, {2, 3}, {2, 4}, {3, 4}};
  std::vector<TranscriptDistribution> dists;
  for (const auto& omega : omegas) {
    MppirParams params{2, 4, omega, 2, 257, false};
    dists.push_back(enumerate_mppir_quotient(params, 1));
    CHECK(dists.back().total() == 1);
  }
  for (std::size_t a = 0; a < dists.size(); ++a) {
    for (std::size_t b = a + 1; b < dists.size(); ++b) {
      CHECK(privacy_distance(dists[a], dists[b]) == 0);
    }
  }
}

TEST_CASE("retrieval uniformity fixtures") {
  {
    const auto rep = retrieval_uniformity(Classification({4, 6, 10}), 3);
    CHECK(rep.expected == 6);
    CHECK(rep.counts.size() == 10);
    for (u64 c : rep.counts) CHECK(c == 6);
    CHECK(rep.pass);
  }
  {
    const auto rep = retrieval_uniformity(Classification({1, 3}), 1);
    CHECK(rep.expected == 3);  // δ = 3, M_1 = 1
    CHECK(rep.counts == std::vector<u64>{3});
    CHECK(rep.pass);
  }
  {
    const auto rep = retrieval_uniformity(Classification({4, 6, 10, 12}), 4);
    CHECK(rep.expected == 5);
    for (u64 c : rep.counts) CHECK(c == 5);
    CHECK(rep.pass);
  }
  CHECK_THROWS_AS(retrieval_uniformity(Classification({4, 6, 10}), 3, 10), BudgetExceeded);
}

TEST_CASE("audit reports") {
  const AuditReport rep = audit_ppir(2, 2, 1, "raw");
  CHECK(rep.pass);
  REQUIRE(rep.pairs.size() == 1);
  CHECK(rep.pairs[0].tvd == 0);
  const std::string json = rep.to_json();
  CHECK(json.find("\"verdict\": \"PASS\"") != std::string::npos);
  CHECK(json.find("\"tvd_num\": 0") != std::string::npos);

  const AuditReport mrep = audit_mppir(2, 2, 1, 2, 257, 1, "raw");
  CHECK(mrep.pass);

  const AuditReport qrep = audit_ppir(2, 3, 1, "quotient");
  CHECK(qrep.pass);
  CHECK(qrep.pairs.size() == 3);
}
