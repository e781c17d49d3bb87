#include "ppir/audit.hpp"

#include <algorithm>
#include <functional>

#include <json.hpp>

#include "ppir/scheme_ppir.hpp"

namespace ppir::audit {

namespace {

using u64 = std::uint64_t;
using capacity::Rat;

u64 factorial_checked(u64 n, u64 cap) {
  u64 r = 1;
  for (u64 i = 2; i <= n; ++i) {
    if (r > cap / i) return cap + 1;
    r *= i;
  }
  return r;
}

// total = base^exp capped; cap+1 signals overflow of the budget.
u64 pow_checked(u64 base, u64 exp, u64 cap) {
  u64 r = 1;
  for (u64 i = 0; i < exp; ++i) {
    if (base != 0 && r > cap / base) return cap + 1;
    r *= base;
  }
  return r;
}

std::vector<std::vector<u64>> identity_perms(u64 count, u64 len) {
  std::vector<std::vector<u64>> ps(count);
  for (auto& p : ps) {
    p.resize(len);
    for (u64 i = 0; i < len; ++i) p[i] = i + 1;
  }
  return ps;
}

// Odometer over tuples of permutations; calls fn for every tuple.
template <typename Fn>
void for_each_perm_tuple(u64 count, u64 len, Fn&& fn) {
  auto perms = identity_perms(count, len);
  while (true) {
    fn(perms);
    std::size_t k = count;
    while (k > 0) {
      if (std::next_permutation(perms[k - 1].begin(), perms[k - 1].end())) break;
      --k;
    }
    if (k == 0) return;
  }
}

std::vector<std::vector<u64>> eta_subsets(u64 gamma_total, u64 eta) {
  std::vector<std::vector<u64>> out;
  std::vector<u64> cur(eta);
  for (u64 i = 0; i < eta; ++i) cur[i] = i + 1;
  if (eta == 0 || eta > gamma_total) return out;
  while (true) {
    out.push_back(cur);
    std::int64_t i = static_cast<std::int64_t>(eta) - 1;
    while (i >= 0 && cur[i] == gamma_total - (eta - 1 - i)) --i;
    if (i < 0) break;
    ++cur[i];
    for (u64 j = i + 1; j < eta; ++j) cur[j] = cur[j - 1] + 1;
  }
  return out;
}

void append_query(std::string& out, const Query& q) {
  bool first = true;
  for (const QueryTerm& t : q.terms) {
    if (!first) out += '+';
    first = false;
    if (t.coeff != 1) {
      out += std::to_string(t.coeff);
      out += '*';
    }
    out += 'c';
    out += std::to_string(t.candidate);
    out += '.';
    out += std::to_string(t.symbol_index);
  }
}

// Relabels each candidate's symbol indices by first appearance, erasing the
// private permutation while keeping the structural pattern and coefficients.
std::string normal_form(const std::vector<Query>& queries) {
  std::map<std::pair<u64, u64>, u64> rank;
  std::map<u64, u64> next_rank;
  std::string out;
  for (const Query& q : queries) {
    if (!out.empty()) out += ';';
    bool first = true;
    for (const QueryTerm& t : q.terms) {
      auto [it, inserted] = rank.try_emplace({t.candidate, t.symbol_index}, 0);
      if (inserted) it->second = ++next_rank[t.candidate];
      if (!first) out += '+';
      first = false;
      if (t.coeff != 1) {
        out += std::to_string(t.coeff);
        out += '*';
      }
      out += 'c';
      out += std::to_string(t.candidate);
      out += '.';
      out += std::to_string(it->second);
    }
  }
  return out;
}

// Adds the distribution of the shuffled orderings of `queries` (uniform over
// all orderings) or the canonical ordering itself, weighted by atom_prob.
void accumulate_orderings(TranscriptDistribution& dist, const std::vector<Query>& queries,
                          const Rat& atom_prob, bool shuffle, u64 budget_per_atom) {
  if (!shuffle) {
    dist.probs[transcript_key(queries)] += atom_prob;
    return;
  }
  const u64 total = factorial_checked(queries.size(), budget_per_atom);
  if (total > budget_per_atom) throw BudgetExceeded("shuffle orderings exceed budget");
  std::vector<std::size_t> order(queries.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  const Rat per = atom_prob / total;
  do {
    std::vector<Query> shuffled;
    shuffled.reserve(queries.size());
    for (std::size_t i : order) shuffled.push_back(queries[i]);
    dist.probs[transcript_key(shuffled)] += per;
  } while (std::next_permutation(order.begin(), order.end()));
}

}  // namespace

std::string transcript_key(const std::vector<Query>& queries) {
  std::string out;
  for (const Query& q : queries) {
    if (!out.empty()) out += ';';
    append_query(out, q);
  }
  return out;
}

Rat TranscriptDistribution::total() const {
  Rat t = 0;
  for (const auto& [k, p] : probs) t += p;
  return t;
}

Rat privacy_distance(const TranscriptDistribution& d1, const TranscriptDistribution& d2) {
  Rat acc = 0;
  auto it1 = d1.probs.begin();
  auto it2 = d2.probs.begin();
  while (it1 != d1.probs.end() || it2 != d2.probs.end()) {
    if (it2 == d2.probs.end() || (it1 != d1.probs.end() && it1->first < it2->first)) {
      acc += it1->second;
      ++it1;
    } else if (it1 == d1.probs.end() || it2->first < it1->first) {
      acc += it2->second;
      ++it2;
    } else {
      acc += boost::multiprecision::abs(Rat(it1->second - it2->second));
      ++it1;
      ++it2;
    }
  }
  return acc / 2;
}

TranscriptDistribution enumerate_ppir_raw(u64 n, u64 gamma_total, u64 desired, u64 db_j,
                                          const EnumerationOptions& opts) {
  if (db_j < 1 || db_j > n) throw Error("enumerate_ppir_raw: database index out of range");
  u64 L = 1;
  for (u64 i = 0; i < gamma_total; ++i) L *= n;
  const u64 perm_atoms = pow_checked(factorial_checked(L, opts.budget), gamma_total, opts.budget);
  if (perm_atoms > opts.budget)
    throw BudgetExceeded("permutation space (L!)^Gamma exceeds enumeration budget");

  TranscriptDistribution dist;
  const Rat atom_prob(1, perm_atoms);
  const PpirParams params{n, gamma_total, desired, false};
  for_each_perm_tuple(gamma_total, L, [&](const std::vector<std::vector<u64>>& perms) {
    ClientRandomness rnd;
    rnd.s = 1;
    rnd.perms = perms;
    rnd.order_seeds.assign(n, 0);
    const PpirPlan plan = gen_queries_ppir(params, rnd);
    accumulate_orderings(dist, plan.db_queries[db_j - 1], atom_prob, opts.shuffle,
                         opts.budget / perm_atoms + 1);
  });
  return dist;
}

TranscriptDistribution enumerate_mppir_raw(const MppirParams& params, u64 db_j,
                                           const EnumerationOptions& opts) {
  params.validate();
  const u64 n = params.n, G = params.gamma_total;
  if (db_j < 1 || db_j > n) throw Error("enumerate_mppir_raw: database index out of range");
  const MppirRegime regime = classify_regime(n, G, params.eta());
  if (regime == MppirRegime::analytical_only || regime == MppirRegime::single_server)
    throw RegimeUnsupported("enumerate_mppir_raw: no executable construction to audit");
  const u64 L = regime == MppirRegime::mds ? n * n : [&] {
    u64 l = 1;
    for (u64 i = 0; i < G; ++i) l *= n;
    return l;
  }();

  const u64 perm_atoms = pow_checked(factorial_checked(L, opts.budget), G, opts.budget);
  const u64 col_atoms = pow_checked(factorial_checked(G, opts.budget), n - 1, opts.budget);
  if (perm_atoms > opts.budget || col_atoms > opts.budget ||
      perm_atoms > opts.budget / col_atoms)
    throw BudgetExceeded("randomness space exceeds enumeration budget");
  const u64 total_atoms = perm_atoms * col_atoms;

  TranscriptDistribution dist;
  const Rat atom_prob(1, total_atoms);
  for_each_perm_tuple(G, L, [&](const std::vector<std::vector<u64>>& perms) {
    for_each_perm_tuple(n - 1, G, [&](const std::vector<std::vector<u64>>& colperms) {
      MdsRandomness rnd;
      rnd.s = 1;
      rnd.perms = perms;
      rnd.column_perms = colperms;
      rnd.order_seeds.assign(n, 0);
      const MppirPlan plan = gen_queries_mppir(params, rnd);
      accumulate_orderings(dist, plan.db_queries[db_j - 1], atom_prob, opts.shuffle,
                           opts.budget / total_atoms + 1);
    });
  });
  return dist;
}

TranscriptDistribution enumerate_ppir_quotient(u64 n, u64 gamma_total, u64 desired, u64 db_j) {
  if (db_j < 1 || db_j > n) throw Error("enumerate_ppir_quotient: database index out of range");
  u64 L = 1;
  for (u64 i = 0; i < gamma_total; ++i) L *= n;
  ClientRandomness rnd = ClientRandomness::identity(1, gamma_total, L, n);
  const PpirPlan plan = gen_queries_ppir({n, gamma_total, desired, false}, rnd);
  TranscriptDistribution dist;
  dist.probs[normal_form(plan.db_queries[db_j - 1])] = 1;
  return dist;
}

TranscriptDistribution enumerate_mppir_quotient(const MppirParams& params, u64 db_j,
                                                const EnumerationOptions& opts) {
  params.validate();
  const u64 n = params.n, G = params.gamma_total;
  if (db_j < 1 || db_j > n) throw Error("enumerate_mppir_quotient: database index out of range");
  const MppirRegime regime = classify_regime(n, G, params.eta());
  if (regime == MppirRegime::analytical_only || regime == MppirRegime::single_server)
    throw RegimeUnsupported("enumerate_mppir_quotient: no executable construction to audit");
  const u64 L = regime == MppirRegime::mds ? n * n : [&] {
    u64 l = 1;
    for (u64 i = 0; i < G; ++i) l *= n;
    return l;
  }();

  // Index permutations quotient away; the column permutations change
  // coefficients and are enumerated exactly.
  const u64 col_atoms = pow_checked(factorial_checked(G, opts.budget), n - 1, opts.budget);
  if (col_atoms > opts.budget)
    throw BudgetExceeded("column permutation space exceeds enumeration budget");

  TranscriptDistribution dist;
  const Rat atom_prob(1, col_atoms);
  for_each_perm_tuple(n - 1, G, [&](const std::vector<std::vector<u64>>& colperms) {
    MdsRandomness rnd = MdsRandomness::identity(1, G, L, n);
    rnd.column_perms = colperms;
    const MppirPlan plan = gen_queries_mppir(params, rnd);
    dist.probs[normal_form(plan.db_queries[db_j - 1])] += atom_prob;
  });
  return dist;
}

UniformityReport retrieval_uniformity(const Classification& cls, u64 gamma, u64 budget) {
  if (gamma < 1 || gamma > cls.gamma_total())
    throw IndexOutOfClass("retrieval_uniformity: class index out of range");
  if (cls.delta > budget) throw BudgetExceeded("delta exceeds enumeration budget");
  const u64 m = cls.sizes[gamma - 1];
  UniformityReport rep;
  rep.gamma = gamma;
  rep.expected = cls.delta / m;
  rep.counts.assign(m, 0);
  const u64 first = cls.class_first(gamma);
  for (u64 s = 1; s <= cls.delta; ++s) {
    const u64 idx = select_candidate(cls, s, gamma);
    ++rep.counts[idx - first];
  }
  rep.pass = std::all_of(rep.counts.begin(), rep.counts.end(),
                         [&](u64 c) { return c == rep.expected; });
  return rep;
}

namespace {

AuditReport run_pairs(AuditReport rep, const std::vector<std::vector<u64>>& omegas,
                      const std::function<TranscriptDistribution(const std::vector<u64>&)>& enum_fn) {
  std::vector<TranscriptDistribution> dists;
  dists.reserve(omegas.size());
  for (const auto& omega : omegas) dists.push_back(enum_fn(omega));
  rep.pass = true;
  for (std::size_t a = 0; a < omegas.size(); ++a) {
    for (std::size_t b = a + 1; b < omegas.size(); ++b) {
      AuditPair pair;
      pair.omega_a = omegas[a];
      pair.omega_b = omegas[b];
      pair.tvd = privacy_distance(dists[a], dists[b]);
      if (pair.tvd != 0) rep.pass = false;
      rep.pairs.push_back(std::move(pair));
    }
  }
  return rep;
}

}  // namespace

AuditReport audit_ppir(u64 n, u64 gamma_total, u64 db_j, const std::string& mode,
                       const EnumerationOptions& opts) {
  AuditReport rep;
  rep.scheme = "ppir";
  rep.mode = mode;
  rep.n = n;
  rep.gamma_total = gamma_total;
  rep.eta = 1;
  rep.lambda = 1;
  rep.db_j = db_j;
  rep.shuffle = opts.shuffle;
  const auto omegas = eta_subsets(gamma_total, 1);
  return run_pairs(std::move(rep), omegas, [&](const std::vector<u64>& omega) {
    if (mode == "raw") return enumerate_ppir_raw(n, gamma_total, omega[0], db_j, opts);
    if (mode == "quotient") return enumerate_ppir_quotient(n, gamma_total, omega[0], db_j);
    throw Error("audit_ppir: mode must be raw or quotient");
  });
}

AuditReport audit_mppir(u64 n, u64 gamma_total, u64 eta, u64 lambda, u64 modulus_p, u64 db_j,
                        const std::string& mode, const EnumerationOptions& opts) {
  AuditReport rep;
  rep.scheme = "mppir";
  rep.mode = mode;
  rep.n = n;
  rep.gamma_total = gamma_total;
  rep.eta = eta;
  rep.lambda = lambda;
  rep.db_j = db_j;
  rep.shuffle = opts.shuffle;
  const auto omegas = eta_subsets(gamma_total, eta);
  return run_pairs(std::move(rep), omegas, [&](const std::vector<u64>& omega) {
    MppirParams params{n, gamma_total, omega, lambda, modulus_p, false};
    if (mode == "raw") return enumerate_mppir_raw(params, db_j, opts);
    if (mode == "quotient") return enumerate_mppir_quotient(params, db_j, opts);
    throw Error("audit_mppir: mode must be raw or quotient");
  });
}

std::string AuditReport::to_json() const {
  nlohmann::ordered_json j;
  j["config"] = {{"scheme", scheme}, {"mode", mode},     {"n", n},
                 {"gamma_total", gamma_total}, {"eta", eta}, {"lambda", lambda},
                 {"db", db_j},       {"shuffle", shuffle}};
  j["pairs"] = nlohmann::ordered_json::array();
  for (const AuditPair& p : pairs) {
    nlohmann::ordered_json pj;
    pj["omega_a"] = p.omega_a;
    pj["omega_b"] = p.omega_b;
    pj["tvd_num"] = boost::multiprecision::numerator(p.tvd).convert_to<std::int64_t>();
    pj["tvd_den"] = boost::multiprecision::denominator(p.tvd).convert_to<std::int64_t>();
    j["pairs"].push_back(std::move(pj));
  }
  j["verdict"] = pass ? "PASS" : "FAIL";
  return j.dump(2);
}

}  // namespace ppir::audit
