#include "ppir/scheme_mppir.hpp"

#include <algorithm>

#include "ppir/gf.hpp"

namespace ppir {

namespace {

using u64 = std::uint64_t;
using u32 = std::uint32_t;

std::vector<u64> invert_perm(const std::vector<u64>& p) {
  std::vector<u64> inv(p.size());
  for (u64 i = 0; i < p.size(); ++i) inv[p[i] - 1] = i + 1;
  return inv;
}

void shuffle_queries(MppirPlan& plan, const MdsRandomness& rnd) {
  const u64 n = plan.params.n;
  std::vector<std::vector<u32>> new_pos(n);
  for (u64 j = 0; j < n; ++j) {
    const std::size_t len = plan.db_queries[j].size();
    std::vector<u32> order(len);
    for (std::size_t i = 0; i < len; ++i) order[i] = static_cast<u32>(i);
    Rng rng(rnd.order_seeds[j]);
    rng.shuffle(order);
    std::vector<Query> shuffled(len);
    new_pos[j].resize(len);
    for (std::size_t k = 0; k < len; ++k) {
      shuffled[k] = std::move(plan.db_queries[j][order[k]]);
      new_pos[j][order[k]] = static_cast<u32>(k);
    }
    plan.db_queries[j] = std::move(shuffled);
  }
  for (u64 j = 0; j < plan.round1_pos.size(); ++j) {
    for (auto& pos : plan.round1_pos[j]) pos = new_pos[j][pos];
  }
  for (MdsGroupRef& grp : plan.groups) {
    for (auto& pos : grp.eq_pos) pos = new_pos[grp.db][pos];
  }
}

}  // namespace

MppirRegime classify_regime(u64 n, u64 gamma_total, u64 eta) {
  if (n == 1) return MppirRegime::single_server;
  if (2 * eta >= gamma_total) return MppirRegime::mds;
  if (eta == 1) return MppirRegime::ppir_super;
  return MppirRegime::analytical_only;
}

void MppirParams::validate() const {
  if (n < 1) throw Error("MppirParams: n >= 1 required");
  if (gamma_total < 1) throw Error("MppirParams: gamma_total >= 1 required");
  if (omega.empty()) throw Error("MppirParams: omega must be nonempty");
  if (lambda < 1) throw Error("MppirParams: lambda >= 1 required");
  u64 prev = 0;
  for (u64 c : omega) {
    if (c <= prev || c > gamma_total)
      throw Error("MppirParams: omega must be strictly increasing within [gamma_total]");
    prev = c;
  }
}

MppirPlan gen_queries_mppir(const MppirParams& params, const MdsRandomness& rnd) {
  params.validate();
  const u64 n = params.n, G = params.gamma_total, eta = params.eta();
  if (n == 1)
    throw UnsupportedSingleDB("gen_queries_mppir: use the single-server scheme for n = 1");
  const MppirRegime regime = classify_regime(n, G, eta);
  if (regime == MppirRegime::analytical_only) {
    throw RegimeUnsupported("gen_queries_mppir: no executable construction for 1 < eta < "
                            "gamma_total/2; analytic bounds only");
  }

  if (regime == MppirRegime::ppir_super) {
    // Single desired class: the single-message query structure carries over
    // verbatim; only the answers widen to λ-vectors.
    PpirParams pp{n, G, params.omega[0], params.shuffle};
    PpirPlan inner = gen_queries_ppir(pp, rnd.client_part());
    MppirPlan plan;
    plan.params = params;
    plan.regime = regime;
    plan.super_len = inner.message_len;
    plan.db_queries = std::move(inner.db_queries);
    plan.slot_refs = std::move(inner.slot_refs);
    return plan;
  }

  // MDS-coded two-round scheme, super messages of length n².
  const u64 L = n * n;
  if (rnd.perms.size() != G) throw Error("gen_queries_mppir: need one permutation per class");
  for (const auto& p : rnd.perms)
    if (p.size() != L) throw Error("gen_queries_mppir: permutation length != n^2");
  if (rnd.column_perms.size() != n - 1)
    throw Error("gen_queries_mppir: need n-1 column permutations");
  for (const auto& p : rnd.column_perms)
    if (p.size() != G) throw Error("gen_queries_mppir: column permutation length != gamma_total");
  if (rnd.order_seeds.size() != n) throw Error("gen_queries_mppir: need n order seeds");

  const gf::Matrix gen = gf::rs_generator(G, eta, params.modulus_p);

  MppirPlan plan;
  plan.params = params;
  plan.regime = regime;
  plan.super_len = L;
  plan.db_queries.resize(n);
  plan.round1_pos.assign(n, std::vector<u32>(G, 0));

  // Round 1: one fresh super symbol of every candidate from every database.
  for (u64 j = 0; j < n; ++j) {
    for (u64 c = 1; c <= G; ++c) {
      plan.db_queries[j].push_back(
          make_query({QueryTerm{c, rnd.perms[c - 1][j], 1}}));
      plan.round1_pos[j][c - 1] = static_cast<u32>(plan.db_queries[j].size() - 1);
    }
  }

  // Round 2: for each other database (cyclic distance g), η rows of the
  // generator with columns permuted by that pair's private permutation.
  std::vector<bool> is_desired(G + 1, false);
  for (u64 c : params.omega) is_desired[c] = true;
  for (u64 j = 0; j < n; ++j) {
    for (u64 g = 1; g <= n - 1; ++g) {
      const u64 side_db = (j + g) % n;
      const u64 fresh_slot = n + j * (n - 1) + g;
      const auto& colperm = rnd.column_perms[g - 1];
      const auto colperm_inv = invert_perm(colperm);

      MdsGroupRef grp;
      grp.db = static_cast<u32>(j);
      grp.side_db = static_cast<u32>(side_db);
      grp.fresh_slot = fresh_slot;
      grp.coeffs.assign(eta, std::vector<u64>(G, 0));

      // Vector entry for candidate c: fresh desired slot, or side database's
      // round-1 slot. Slots pass through π_c before hitting the wire.
      std::vector<u64> slot_of(G + 1, 0);
      for (u64 c = 1; c <= G; ++c) slot_of[c] = is_desired[c] ? fresh_slot : side_db + 1;

      for (u64 r = 0; r < eta; ++r) {
        std::vector<QueryTerm> terms;
        for (u64 c = 1; c <= G; ++c) {
          const u64 coeff = gen.at(r, colperm_inv[c - 1] - 1);
          grp.coeffs[r][c - 1] = coeff;
          if (coeff == 0) continue;
          terms.push_back({c, rnd.perms[c - 1][slot_of[c] - 1], coeff});
        }
        plan.db_queries[j].push_back(make_query(std::move(terms)));
        grp.eq_pos.push_back(static_cast<u32>(plan.db_queries[j].size() - 1));
      }
      plan.groups.push_back(std::move(grp));
    }
  }

  if (params.shuffle) shuffle_queries(plan, rnd);
  return plan;
}

MppirPlan gen_queries_single_server(const MppirParams& params, u64 length_L,
                                    const MdsRandomness& rnd) {
  params.validate();
  if (params.n != 1) throw Error("gen_queries_single_server: n == 1 required");
  if (length_L == 0) throw Error("gen_queries_single_server: message length required");
  MppirPlan plan;
  plan.params = params;
  plan.regime = MppirRegime::single_server;
  plan.super_len = length_L;
  plan.db_queries.resize(1);
  // Every super symbol of every candidate, candidates-major. The desired ones
  // are kept; the rest are the price of hiding Ω.
  for (u64 c = 1; c <= params.gamma_total; ++c) {
    for (u64 l = 1; l <= length_L; ++l) plan.db_queries[0].push_back(make_query({{c, l, 1}}));
  }
  if (params.shuffle) {
    if (rnd.order_seeds.empty()) throw Error("gen_queries_single_server: missing order seed");
    MdsRandomness tmp = rnd;
    shuffle_queries(plan, tmp);
  }
  return plan;
}

std::vector<std::vector<u64>> answer_mppir(const Dataset& db, u64 s,
                                           std::span<const Query> queries, u64 lambda) {
  return answer_queries(db, s, queries, lambda);
}

namespace {

void check_transcript_shape(const Transcript& t, const MppirPlan& plan) {
  const u64 n = plan.db_queries.size();
  if (t.queries.size() != n || t.answers.size() != n)
    throw InconsistentTranscript("decode_mppir: wrong database count");
  for (u64 j = 0; j < n; ++j) {
    if (t.answers[j].size() != plan.db_queries[j].size())
      throw InconsistentTranscript("decode_mppir: answer count mismatch at database " +
                                   std::to_string(j + 1));
    for (const auto& a : t.answers[j]) {
      if (a.size() != plan.params.lambda)
        throw InconsistentTranscript("decode_mppir: super symbol width != lambda");
    }
  }
}

}  // namespace

MppirDecodeResult decode_mppir(const Transcript& t, const MppirParams& params,
                               const MdsRandomness& rnd) {
  const MppirPlan plan = gen_queries_mppir(params, rnd);
  check_transcript_shape(t, plan);
  const u64 n = params.n, eta = params.eta(), lambda = params.lambda;
  const u64 L = plan.super_len;
  const gf::Fp f(params.modulus_p);

  MppirDecodeResult out;
  out.messages.assign(eta, std::vector<std::vector<u64>>(lambda, std::vector<u64>(L, 0)));

  if (plan.regime == MppirRegime::ppir_super) {
    const auto& perm = rnd.perms[params.omega[0] - 1];
    for (u64 slot = 1; slot <= L; ++slot) {
      const SlotRef& ref = plan.slot_refs[slot - 1];
      std::vector<u64> v = t.answers[ref.db][ref.pos];
      if (ref.side_db >= 0) {
        const auto& side = t.answers[ref.side_db][ref.side_pos];
        for (u64 k = 0; k < lambda; ++k) v[k] = f.sub(v[k], side[k]);
      }
      for (u64 k = 0; k < lambda; ++k) out.messages[0][k][perm[slot - 1] - 1] = v[k];
    }
    return out;
  }

  // MDS branch: super[i][slot−1] collects desired class omega[i]'s slots.
  std::vector<std::vector<std::vector<u64>>> super(
      eta, std::vector<std::vector<u64>>(L, std::vector<u64>(lambda, 0)));

  for (u64 j = 0; j < n; ++j) {
    for (u64 i = 0; i < eta; ++i) {
      const u32 pos = plan.round1_pos[j][params.omega[i] - 1];
      super[i][j] = t.answers[j][pos];  // round-1 slot of database j is j+1
    }
  }

  std::vector<bool> is_desired(params.gamma_total + 1, false);
  for (u64 c : params.omega) is_desired[c] = true;

  for (const MdsGroupRef& grp : plan.groups) {
    // Subtract known side information, then solve the η×η desired-column
    // system (invertible by the MDS property) for all λ components at once.
    gf::Matrix m(eta, eta, params.modulus_p);
    gf::Matrix rhs(eta, lambda, params.modulus_p);
    for (u64 r = 0; r < eta; ++r) {
      std::vector<u64> v = t.answers[grp.db][grp.eq_pos[r]];
      for (u64 c = 1; c <= params.gamma_total; ++c) {
        if (is_desired[c]) continue;
        const u64 coeff = grp.coeffs[r][c - 1];
        if (coeff == 0) continue;
        const auto& side = t.answers[grp.side_db][plan.round1_pos[grp.side_db][c - 1]];
        for (u64 k = 0; k < lambda; ++k) v[k] = f.sub(v[k], f.mul(coeff, side[k]));
      }
      for (u64 i = 0; i < eta; ++i) m.at(r, i) = grp.coeffs[r][params.omega[i] - 1];
      for (u64 k = 0; k < lambda; ++k) rhs.at(r, k) = v[k];
    }
    gf::Matrix x = gf::solve_square(m, rhs);
    for (u64 i = 0; i < eta; ++i) {
      for (u64 k = 0; k < lambda; ++k) super[i][grp.fresh_slot - 1][k] = x.at(i, k);
    }
  }

  for (u64 i = 0; i < eta; ++i) {
    const auto& perm = rnd.perms[params.omega[i] - 1];
    for (u64 slot = 1; slot <= L; ++slot) {
      for (u64 k = 0; k < lambda; ++k)
        out.messages[i][k][perm[slot - 1] - 1] = super[i][slot - 1][k];
    }
  }
  return out;
}

MppirDecodeResult decode_single_server(const Transcript& t, const MppirParams& params,
                                       u64 length_L, const MdsRandomness& rnd) {
  const MppirPlan plan = gen_queries_single_server(params, length_L, rnd);
  check_transcript_shape(t, plan);
  const u64 eta = params.eta(), lambda = params.lambda;

  // Map positions back to (candidate, symbol index) from the plan's queries.
  MppirDecodeResult out;
  out.messages.assign(eta, std::vector<std::vector<u64>>(lambda, std::vector<u64>(length_L, 0)));
  std::vector<u64> class_index_of(params.gamma_total + 1, 0);
  for (u64 i = 0; i < eta; ++i) class_index_of[params.omega[i]] = i + 1;

  for (std::size_t pos = 0; pos < plan.db_queries[0].size(); ++pos) {
    const Query& q = plan.db_queries[0][pos];
    const u64 c = q.terms[0].candidate;
    const u64 l = q.terms[0].symbol_index;
    const u64 ci = class_index_of[c];
    if (ci == 0) continue;
    for (u64 k = 0; k < lambda; ++k) out.messages[ci - 1][k][l - 1] = t.answers[0][pos][k];
  }
  return out;
}

}  // namespace ppir
