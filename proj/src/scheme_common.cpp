#include "ppir/scheme_common.hpp"

#include <algorithm>

#include "ppir/gf.hpp"

namespace ppir {

namespace {
using u64 = std::uint64_t;
}

Query make_query(std::vector<QueryTerm> terms) {
  std::erase_if(terms, [](const QueryTerm& t) { return t.coeff == 0; });
  if (terms.empty()) throw Error("make_query: no nonzero terms");
  std::sort(terms.begin(), terms.end(),
            [](const QueryTerm& a, const QueryTerm& b) { return a.candidate < b.candidate; });
  for (std::size_t i = 1; i < terms.size(); ++i) {
    if (terms[i].candidate == terms[i - 1].candidate)
      throw Error("make_query: duplicate candidate in query");
  }
  return Query{std::move(terms)};
}

ClientRandomness ClientRandomness::identity(u64 s, u64 gamma_total, u64 L, u64 n) {
  ClientRandomness r;
  r.s = s;
  r.perms.assign(gamma_total, {});
  for (auto& p : r.perms) {
    p.resize(L);
    for (u64 i = 0; i < L; ++i) p[i] = i + 1;
  }
  r.order_seeds.assign(n, 0);
  return r;
}

ClientRandomness ClientRandomness::sample(Rng& rng, u64 delta, u64 gamma_total, u64 L, u64 n) {
  ClientRandomness r;
  r.s = 1 + rng.below(delta);
  r.perms.reserve(gamma_total);
  for (u64 c = 0; c < gamma_total; ++c) r.perms.push_back(rng.permutation(L));
  r.order_seeds.reserve(n);
  for (u64 j = 0; j < n; ++j) r.order_seeds.push_back(rng.next());
  return r;
}

MdsRandomness MdsRandomness::identity(u64 s, u64 gamma_total, u64 L, u64 n) {
  MdsRandomness r;
  auto base = ClientRandomness::identity(s, gamma_total, L, n);
  r.s = base.s;
  r.perms = std::move(base.perms);
  r.order_seeds = std::move(base.order_seeds);
  r.column_perms.assign(n >= 1 ? n - 1 : 0, {});
  for (auto& p : r.column_perms) {
    p.resize(gamma_total);
    for (u64 i = 0; i < gamma_total; ++i) p[i] = i + 1;
  }
  return r;
}

MdsRandomness MdsRandomness::sample(Rng& rng, u64 delta, u64 gamma_total, u64 L, u64 n) {
  MdsRandomness r;
  auto base = ClientRandomness::sample(rng, delta, gamma_total, L, n);
  r.s = base.s;
  r.perms = std::move(base.perms);
  r.order_seeds = std::move(base.order_seeds);
  r.column_perms.reserve(n >= 1 ? n - 1 : 0);
  for (u64 g = 0; g + 1 < n; ++g) r.column_perms.push_back(rng.permutation(gamma_total));
  return r;
}

u64 Transcript::total_answer_symbols() const {
  u64 total = 0;
  for (const auto& db : answers) {
    for (const auto& vec : db) total += vec.size();
  }
  return total;
}

capacity::Rat measure_rate(const Transcript& t, u64 L, u64 mu) {
  const u64 d = t.total_answer_symbols();
  if (d == 0) throw Error("measure_rate: empty transcript");
  return capacity::Rat(mu * L, d);
}

std::string transcript_fingerprint(const Transcript& t) {
  std::string out;
  for (std::size_t j = 0; j < t.queries.size(); ++j) {
    out += "db" + std::to_string(j + 1) + "{";
    for (const Query& q : t.queries[j]) {
      for (const QueryTerm& term : q.terms) {
        out += std::to_string(term.coeff) + "*c" + std::to_string(term.candidate) + "." +
               std::to_string(term.symbol_index) + "+";
      }
      out += "|";
    }
    out += "}=>{";
    if (j < t.answers.size()) {
      for (const auto& vec : t.answers[j]) {
        for (u64 v : vec) out += std::to_string(v) + ",";
        out += "|";
      }
    }
    out += "}\n";
  }
  return out;
}

std::vector<std::vector<u64>> answer_queries(const Dataset& db, u64 s,
                                             std::span<const Query> queries, u64 lambda) {
  const gf::Fp f(db.modulus_p);
  const u64 gamma_total = db.cls.gamma_total();

  // Resolve each class once: the λ cyclically selected members.
  std::vector<std::vector<u64>> selected(gamma_total);
  for (u64 c = 1; c <= gamma_total; ++c)
    selected[c - 1] = select_candidates_cyclic(db.cls, s, c, lambda);

  std::vector<std::vector<u64>> out;
  out.reserve(queries.size());
  for (const Query& q : queries) {
    std::vector<u64> acc(lambda, 0);
    for (const QueryTerm& t : q.terms) {
      if (t.candidate < 1 || t.candidate > gamma_total)
        throw IndexOutOfClass("answer_queries: candidate " + std::to_string(t.candidate) +
                              " out of range");
      if (t.symbol_index < 1 || t.symbol_index > db.length_L)
        throw Error("answer_queries: symbol index " + std::to_string(t.symbol_index) +
                    " out of range");
      for (u64 k = 0; k < lambda; ++k) {
        const u64 msg = selected[t.candidate - 1][k];
        acc[k] = f.add(acc[k], f.mul(t.coeff % db.modulus_p, db.symbol(msg, t.symbol_index)));
      }
    }
    out.push_back(std::move(acc));
  }
  return out;
}

}  // namespace ppir
