#include "ppir/scheme_ppir.hpp"

#include <algorithm>
#include <map>

#include "ppir/gf.hpp"

namespace ppir {

namespace {

using u64 = std::uint64_t;
using u32 = std::uint32_t;

u64 binom(u64 n, u64 k) {
  if (k > n) return 0;
  u64 r = 1;
  for (u64 i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

u64 ipow(u64 b, u64 e) {
  u64 r = 1;
  for (u64 i = 0; i < e; ++i) {
    if (b != 0 && r > (~u64{0}) / b) throw Error("ipow: overflow");
    r *= b;
  }
  return r;
}

// Enumerates k-subsets of {1,…,total} in lexicographic order.
std::vector<std::vector<u64>> subsets_lex(u64 total, u64 k) {
  std::vector<std::vector<u64>> out;
  std::vector<u64> cur(k);
  for (u64 i = 0; i < k; ++i) cur[i] = i + 1;
  if (k == 0 || k > total) return out;
  while (true) {
    out.push_back(cur);
    // advance
    std::int64_t i = static_cast<std::int64_t>(k) - 1;
    while (i >= 0 && cur[i] == total - (k - 1 - i)) --i;
    if (i < 0) break;
    ++cur[i];
    for (u64 j = i + 1; j < k; ++j) cur[j] = cur[j - 1] + 1;
  }
  return out;
}

// Canonical query during construction: (candidate, slot) pairs, coeff 1.
struct CanonQuery {
  std::vector<std::pair<u64, u64>> terms;  // candidate-ascending
};

void validate_randomness(const PpirParams& p, const ClientRandomness& rnd, u64 L) {
  if (rnd.perms.size() != p.gamma_total)
    throw Error("gen_queries_ppir: need one permutation per candidate class");
  for (const auto& perm : rnd.perms) {
    if (perm.size() != L) throw Error("gen_queries_ppir: permutation length != L");
    std::vector<bool> seen(L + 1, false);
    for (u64 v : perm) {
      if (v < 1 || v > L || seen[v]) throw Error("gen_queries_ppir: not a permutation of [L]");
      seen[v] = true;
    }
  }
  if (rnd.order_seeds.size() != p.n)
    throw Error("gen_queries_ppir: need one order seed per database");
}

}  // namespace

PpirPlan gen_queries_ppir(const PpirParams& params, const ClientRandomness& rnd) {
  const u64 n = params.n, G = params.gamma_total, g = params.desired;
  if (n == 1)
    throw UnsupportedSingleDB("gen_queries_ppir: single-server retrieval is a separate scheme");
  if (n < 2 || G < 1) throw Error("gen_queries_ppir: need n >= 2 and gamma_total >= 1");
  if (g < 1 || g > G) throw Error("gen_queries_ppir: desired class out of range");
  const u64 L = ipow(n, G);
  validate_randomness(params, rnd, L);

  std::vector<std::vector<CanonQuery>> canon(n);
  std::vector<SlotRef> slot_refs(L);

  // Round-1: database j queries slot j of every candidate. Undesired queries
  // are remembered per (database, candidate subset) for side-information reuse.
  std::vector<std::map<std::vector<u64>, std::vector<u32>>> undesired_prev_db(n);
  for (u64 j = 0; j < n; ++j) {
    for (u64 c = 1; c <= G; ++c) {
      CanonQuery q;
      q.terms.push_back({c, j + 1});
      canon[j].push_back(std::move(q));
      const u32 pos = static_cast<u32>(canon[j].size() - 1);
      if (c == g) {
        slot_refs[j] = SlotRef{static_cast<u32>(j), pos, -1, -1};
      } else {
        undesired_prev_db[j][{c}].push_back(pos);
      }
    }
  }

  u64 block_start = 1 + n;  // round-1 consumed slots 1…n
  for (u64 tau = 2; tau <= G; ++tau) {
    const u64 copies = ipow(n - 1, tau - 1);
    const u64 B = binom(G - 1, tau - 1) * copies;
    const auto subsets = subsets_lex(G, tau);
    std::vector<std::map<std::vector<u64>, std::vector<u32>>> undesired_cur_db(n);

    for (u64 j = 0; j < n; ++j) {
      const u64 base = block_start + j * B;
      const u64 top = base + B - 1;
      u64 next_desired = base;
      std::map<u64, u64> down_ctr;  // undesired candidate → next descending slot

      for (const auto& T : subsets) {
        const bool has_desired = std::find(T.begin(), T.end(), g) != T.end();
        if (has_desired) {
          std::vector<u64> partners;
          for (u64 c : T)
            if (c != g) partners.push_back(c);
          for (u64 q = 0; q < copies; ++q) {
            const u64 src_rank = q % (n - 1);
            const u64 copy_idx = q / (n - 1);
            const u64 src_db = (j + 1 + src_rank) % n;
            const auto it = undesired_prev_db[src_db].find(partners);
            if (it == undesired_prev_db[src_db].end() || copy_idx >= it->second.size())
              throw Error("gen_queries_ppir: internal: missing side information");
            const u32 side_pos = it->second[copy_idx];
            CanonQuery cq = canon[src_db][side_pos];
            cq.terms.push_back({g, next_desired});
            std::sort(cq.terms.begin(), cq.terms.end());
            canon[j].push_back(std::move(cq));
            slot_refs[next_desired - 1] =
                SlotRef{static_cast<u32>(j), static_cast<u32>(canon[j].size() - 1),
                        static_cast<std::int32_t>(src_db), static_cast<std::int32_t>(side_pos)};
            ++next_desired;
          }
        } else {
          for (u64 q = 0; q < copies; ++q) {
            CanonQuery cq;
            u64 position = 0;
            for (u64 c : T) {
              ++position;
              auto [it, inserted] = down_ctr.try_emplace(c, top - (position - 1));
              const u64 slot = it->second;
              if (slot < base) throw Error("gen_queries_ppir: internal: slot underflow");
              --it->second;
              cq.terms.push_back({c, slot});
            }
            canon[j].push_back(std::move(cq));
            undesired_cur_db[j][T].push_back(static_cast<u32>(canon[j].size() - 1));
          }
        }
      }
      if (next_desired != base + B)
        throw Error("gen_queries_ppir: internal: desired slot count mismatch");
    }
    undesired_prev_db = std::move(undesired_cur_db);
    block_start += n * B;
  }
  if (block_start != L + 1) throw Error("gen_queries_ppir: internal: slot blocks != L");

  // Compose the private permutations, then optionally shuffle per database.
  PpirPlan plan;
  plan.params = params;
  plan.message_len = L;
  plan.db_queries.resize(n);
  for (u64 j = 0; j < n; ++j) {
    plan.db_queries[j].reserve(canon[j].size());
    for (const CanonQuery& cq : canon[j]) {
      std::vector<QueryTerm> terms;
      terms.reserve(cq.terms.size());
      for (auto [c, slot] : cq.terms) terms.push_back({c, rnd.perms[c - 1][slot - 1], 1});
      plan.db_queries[j].push_back(make_query(std::move(terms)));
    }
  }
  if (params.shuffle) {
    std::vector<std::vector<u32>> new_pos(n);
    for (u64 j = 0; j < n; ++j) {
      const std::size_t len = plan.db_queries[j].size();
      std::vector<u32> order(len);
      for (std::size_t i = 0; i < len; ++i) order[i] = static_cast<u32>(i);
      Rng rng(rnd.order_seeds[j]);
      rng.shuffle(order);
      // order[k] = old position served at new position k
      std::vector<Query> shuffled(len);
      new_pos[j].resize(len);
      for (std::size_t k = 0; k < len; ++k) {
        shuffled[k] = std::move(plan.db_queries[j][order[k]]);
        new_pos[j][order[k]] = static_cast<u32>(k);
      }
      plan.db_queries[j] = std::move(shuffled);
    }
    for (SlotRef& ref : slot_refs) {
      ref.pos = new_pos[ref.db][ref.pos];
      if (ref.side_db >= 0) ref.side_pos = new_pos[ref.side_db][ref.side_pos];
    }
  }
  plan.slot_refs = std::move(slot_refs);
  return plan;
}

std::vector<std::vector<u64>> answer_ppir(const Dataset& db, u64 s,
                                          std::span<const Query> queries) {
  return answer_queries(db, s, queries, 1);
}

std::vector<u64> decode_ppir(const Transcript& t, const PpirParams& params,
                             const ClientRandomness& rnd, u64 modulus_p) {
  const PpirPlan plan = gen_queries_ppir(params, rnd);
  const u64 n = params.n;
  if (t.queries.size() != n || t.answers.size() != n)
    throw InconsistentTranscript("decode_ppir: wrong database count");
  for (u64 j = 0; j < n; ++j) {
    if (t.answers[j].size() != plan.db_queries[j].size())
      throw InconsistentTranscript("decode_ppir: answer count mismatch at database " +
                                   std::to_string(j + 1));
    for (const auto& a : t.answers[j]) {
      if (a.size() != 1) throw InconsistentTranscript("decode_ppir: expected scalar answers");
    }
  }
  const gf::Fp f(modulus_p);
  const u64 L = plan.message_len;
  std::vector<u64> out(L, 0);
  const auto& perm = rnd.perms[params.desired - 1];
  for (u64 slot = 1; slot <= L; ++slot) {
    const SlotRef& ref = plan.slot_refs[slot - 1];
    u64 v = t.answers[ref.db][ref.pos][0];
    if (ref.side_db >= 0) v = f.sub(v, t.answers[ref.side_db][ref.side_pos][0]);
    out[perm[slot - 1] - 1] = v;
  }
  return out;
}

}  // namespace ppir
