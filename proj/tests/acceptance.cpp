// Acceptance suite: every protocol-level guarantee the engine commits to,
// one pass/fail line per criterion, exact tolerances pinned in code.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <string>
#include <vector>

#include "ppir/audit.hpp"
#include "ppir/experiment.hpp"
#include "ppir/rng.hpp"

using namespace ppir;
using capacity::Rat;
using u64 = std::uint64_t;

namespace {

int g_failures = 0;

void run_criterion(int number, const std::string& title, double budget_seconds,
                   const std::function<bool(std::string&)>& body) {
  std::string detail;
  bool ok = false;
  const auto start = std::chrono::steady_clock::now();
  try {
    ok = body(detail);
  } catch (const std::exception& e) {
    ok = false;
    detail = std::string("exception: ") + e.what();
  }
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (elapsed > budget_seconds) {
    ok = false;
    detail += (detail.empty() ? "" : "; ") + std::string("over time budget");
  }
  if (!ok) ++g_failures;
  std::printf("[%d] %s  %s (%.2fs)%s%s\n", number, ok ? "PASS" : "FAIL", title.c_str(), elapsed,
              detail.empty() ? "" : " -- ", detail.c_str());
  std::fflush(stdout);
}

std::string render_query(const Query& q) {
  static const char* names = "xyzw";
  std::string out;
  for (const QueryTerm& t : q.terms) {
    if (!out.empty()) out += '+';
    if (t.coeff != 1) out += std::to_string(t.coeff);
    out += names[t.candidate - 1];
    out += std::to_string(t.symbol_index);
  }
  return out;
}

std::vector<std::string> render_all(const std::vector<Query>& qs) {
  std::vector<std::string> out;
  for (const Query& q : qs) out.push_back(render_query(q));
  return out;
}

bool criterion1_ppir_rate(std::string& detail) {
  for (u64 gamma = 1; gamma <= 3; ++gamma) {
    experiment::ExperimentSpec spec;
    spec.scheme = "ppir";
    spec.n = 2;
    spec.sizes = {4, 6, 10};
    spec.gamma = gamma;
    spec.seed = 40 + gamma;
    const auto r = experiment::run_experiment(spec);
    if (!r.executed || !r.decode_ok) {
      detail = "gamma=" + std::to_string(gamma) + " failed to execute/decode";
      return false;
    }
    if (r.download_symbols != 14 || r.measured_rate != Rat(4, 7)) {
      detail = "gamma=" + std::to_string(gamma) + " rate/download mismatch";
      return false;
    }
  }
  detail = "14 symbols, rate 4/7, gamma in {1,2,3}";
  return true;
}

bool criterion2_mppir_rate(std::string& detail) {
  experiment::ExperimentSpec spec;
  spec.scheme = "mppir";
  spec.n = 2;
  spec.sizes = {4, 6, 10, 12};
  spec.omega = {1, 3};
  spec.lambda = 2;
  spec.seed = 7;
  const auto r = experiment::run_experiment(spec);
  if (!r.executed || !r.decode_ok) {
    detail = "failed to execute/decode";
    return false;
  }
  if (r.download_symbols != 24) {
    detail = "download = " + std::to_string(r.download_symbols) + ", want 24";
    return false;
  }
  if (r.measured_rate != Rat(2, 3)) {
    detail = "rate mismatch";
    return false;
  }
  detail = "24 scalars for 16 desired, rate 2/3";
  return true;
}

bool criterion3_fixture_tables(std::string& detail) {
  const auto rnd = ClientRandomness::identity(13, 3, 8, 2);
  const PpirPlan a = gen_queries_ppir({2, 3, 3, false}, rnd);
  const PpirPlan b = gen_queries_ppir({2, 3, 1, false}, rnd);
  const std::vector<std::string> table_a1 = {"x1", "y1", "z1", "x4+y3",
                                             "x2+z3", "y2+z4", "x6+y5+z7"};
  const std::vector<std::string> table_a2 = {"x2", "y2", "z2", "x6+y5",
                                             "x1+z5", "y1+z6", "x4+y3+z8"};
  const std::vector<std::string> table_b1 = {"x1", "y1", "z1", "x3+y2",
                                             "x4+z2", "y4+z3", "x7+y6+z5"};
  const std::vector<std::string> table_b2 = {"x2", "y2", "z2", "x5+y1",
                                             "x6+z1", "y6+z5", "x8+y4+z3"};
  if (render_all(a.db_queries[0]) != table_a1 || render_all(a.db_queries[1]) != table_a2) {
    detail = "table (a) mismatch";
    return false;
  }
  if (render_all(b.db_queries[0]) != table_b1 || render_all(b.db_queries[1]) != table_b2) {
    detail = "table (b) mismatch";
    return false;
  }

  MppirParams mp{2, 4, {1, 3}, 2, 257, false};
  MdsRandomness mrnd = MdsRandomness::identity(13, 4, 4, 2);
  mrnd.column_perms[0] = {1, 3, 2, 4};
  const MppirPlan ex5 = gen_queries_mppir(mp, mrnd);
  const std::vector<std::string> ex5_1 = {"x1", "y1", "z1", "w1", "x3+y2+z3+w2", "2y2+z3+3w2"};
  const std::vector<std::string> ex5_2 = {"x2", "y2", "z2", "w2", "x4+y1+z4+w1", "2y1+z4+3w1"};
  if (render_all(ex5.db_queries[0]) != ex5_1 || render_all(ex5.db_queries[1]) != ex5_2) {
    detail = "table EX5 mismatch";
    return false;
  }
  detail = "tables (a), (b), EX5 byte-exact";
  return true;
}

bool criterion4_correctness_sweep(std::string& detail) {
  u64 runs = 0;
  // PPIR at n=2, Γ ≤ 3, δ ≤ 60: every desired class, every s.
  const std::vector<std::vector<u64>> ppir_sizes = {{3}, {4, 6}, {4, 6, 10}};
  for (const auto& sizes : ppir_sizes) {
    const u64 gamma_total = sizes.size();
    u64 L = 1;
    for (u64 i = 0; i < gamma_total; ++i) L *= 2;
    const Dataset ds = build_dataset(sizes, L, 257, 90 + gamma_total);
    for (u64 g = 1; g <= gamma_total; ++g) {
      for (u64 s = 1; s <= ds.cls.delta; ++s) {
        Rng rng(s * 17 + g);
        auto rnd = ClientRandomness::sample(rng, ds.cls.delta, gamma_total, L, 2);
        rnd.s = s;
        const PpirParams params{2, gamma_total, g, true};
        const PpirPlan plan = gen_queries_ppir(params, rnd);
        Transcript t;
        t.queries = plan.db_queries;
        t.answers.resize(2);
        for (u64 j = 0; j < 2; ++j) t.answers[j] = answer_ppir(ds, s, plan.db_queries[j]);
        const auto symbols = decode_ppir(t, params, rnd, 257);
        const u64 truth = select_candidate(ds.cls, s, g);
        if (symbols != ds.symbols[truth - 1]) {
          detail = "ppir mismatch at gamma=" + std::to_string(g) + " s=" + std::to_string(s);
          return false;
        }
        ++runs;
      }
    }
  }
  // M-PPIR at n=2, Γ=4, η=2, λ ≤ 2, δ = 60: every Ω, every s.
  const Dataset ds = build_dataset({4, 6, 10, 12}, 4, 257, 99);
  const std::vector<std::vector<u64>> omegas = {{1, 2}, {1, 3}, {1, 4}, {2, 3}, {2, 4}, {3, 4}};
  for (const auto& omega : omegas) {
    for (u64 lambda = 1; lambda <= 2; ++lambda) {
      for (u64 s = 1; s <= 60; ++s) {
        Rng rng(s * 31 + omega[0] * 7 + omega[1] + lambda);
        auto rnd = MdsRandomness::sample(rng, 60, 4, 4, 2);
        rnd.s = s;
        const MppirParams params{2, 4, omega, lambda, 257, true};
        const MppirPlan plan = gen_queries_mppir(params, rnd);
        Transcript t;
        t.queries = plan.db_queries;
        t.answers.resize(2);
        for (u64 j = 0; j < 2; ++j) t.answers[j] = answer_mppir(ds, s, plan.db_queries[j], lambda);
        const MppirDecodeResult dec = decode_mppir(t, params, rnd);
        for (u64 i = 0; i < 2; ++i) {
          const auto members = select_candidates_cyclic(ds.cls, s, omega[i], lambda);
          for (u64 k = 0; k < lambda; ++k) {
            if (dec.messages[i][k] != ds.symbols[members[k] - 1]) {
              detail = "mppir mismatch at s=" + std::to_string(s);
              return false;
            }
          }
        }
        ++runs;
      }
    }
  }
  detail = std::to_string(runs) + " protocol runs, zero mismatches";
  return true;
}

bool criterion5_privacy_exact(std::string& detail) {
  // PPIR, n=2, Γ=2, L=4: exhaustive rational enumeration over both databases.
  for (u64 db = 1; db <= 2; ++db) {
    const auto d1 = audit::enumerate_ppir_raw(2, 2, 1, db);
    const auto d2 = audit::enumerate_ppir_raw(2, 2, 2, db);
    if (audit::privacy_distance(d1, d2) != 0) {
      detail = "ppir TV != 0 at db " + std::to_string(db);
      return false;
    }
  }
  // M-PPIR, n=2, Γ=2, η=1, λ=2.
  for (u64 db = 1; db <= 2; ++db) {
    const auto d1 = audit::enumerate_mppir_raw({2, 2, {1}, 2, 257, false}, db);
    const auto d2 = audit::enumerate_mppir_raw({2, 2, {2}, 2, 257, false}, db);
    if (audit::privacy_distance(d1, d2) != 0) {
      detail = "mppir TV != 0 at db " + std::to_string(db);
      return false;
    }
  }
  detail = "all pairwise TV distances exactly 0";
  return true;
}

bool criterion6_uniformity(std::string& detail) {
  const auto rep = audit::retrieval_uniformity(Classification({4, 6, 10}), 3);
  if (!rep.pass || rep.expected != 6 || rep.counts.size() != 10) {
    detail = "class-3 members not uniformly selected";
    return false;
  }
  detail = "each of 10 members retrieved exactly 6 times over s in [60]";
  return true;
}

bool criterion7_capacity_identities(std::string& detail) {
  // (a) η=1 collapse to Theorem 1
  for (u64 n = 2; n <= 5; ++n) {
    for (u64 gamma = 2; gamma <= 10; ++gamma) {
      const double thm1 = capacity::to_double(capacity::ppir_capacity(n, gamma));
      const capacity::ProblemConfig cfg{n, gamma, 1, 1};
      if (std::abs(capacity::to_double(capacity::mppir_upper_bound(cfg)) - thm1) >= 1e-9 ||
          std::abs(capacity::mppir_lower_bound(cfg) - thm1) >= 1e-9) {
        detail = "(a) collapse failed at n=" + std::to_string(n);
        return false;
      }
    }
  }
  // (b)+(c)+(d) on the Corollary grid
  for (u64 n = 2; n <= 4; ++n) {
    for (u64 gamma = 2; gamma <= 12; ++gamma) {
      for (u64 eta = 1; 2 * eta <= gamma; ++eta) {
        const capacity::ProblemConfig cfg{n, gamma, eta, 1};
        double lower = 0;
        try {
          lower = capacity::mppir_lower_bound(cfg);  // throws on imaginary residue (c)
        } catch (const ImaginaryResidue&) {
          detail = "(c) imaginary residue at n=" + std::to_string(n) +
                   " gamma=" + std::to_string(gamma) + " eta=" + std::to_string(eta);
          return false;
        }
        const auto sol = capacity::solve_tau(n, gamma, eta);
        if (sol.residual >= 1e-9) {
          detail = "(d) tau residual " + std::to_string(sol.residual);
          return false;
        }
        if (gamma % eta == 0) {
          const double upper = capacity::to_double(capacity::mppir_upper_bound(cfg));
          const double closed =
              (1.0 - 1.0 / n) / (1.0 - std::pow(1.0 / n, double(gamma) / double(eta)));
          if (std::abs(upper - lower) >= 1e-9 || std::abs(upper - closed) >= 1e-9) {
            detail = "(b) Corollary equality failed";
            return false;
          }
        }
      }
    }
  }
  detail = "collapse, Corollary equality, residues all within 1e-9";
  return true;
}

bool criterion8_converse(std::string& detail) {
  Rng rng(88);
  u64 executed = 0;
  while (executed < 200) {
    experiment::ExperimentSpec spec;
    spec.seed = 5000 + executed;
    const u64 pick = rng.below(4);
    if (pick == 0) {
      spec.scheme = "ppir";
      spec.n = 2 + rng.below(2);
      const u64 gamma = 1 + rng.below(3);
      for (u64 i = 0; i < gamma; ++i) spec.sizes.push_back(1 + rng.below(4));
      spec.gamma = 1 + rng.below(gamma);
    } else if (pick == 1 || pick == 2) {
      spec.scheme = "mppir";
      spec.n = 2 + (pick == 2 ? rng.below(2) : 0);
      const u64 gamma = 2 + rng.below(3);
      spec.lambda = 1 + rng.below(2);
      for (u64 i = 0; i < gamma; ++i) spec.sizes.push_back(spec.lambda + rng.below(3));
      u64 eta = 1 + rng.below(gamma);
      if (2 * eta < gamma) eta = 1;  // keep the config executable
      std::vector<u64> all(gamma);
      for (u64 i = 0; i < gamma; ++i) all[i] = i + 1;
      rng.shuffle(all);
      spec.omega.assign(all.begin(), all.begin() + eta);
      std::sort(spec.omega.begin(), spec.omega.end());
    } else {
      spec.scheme = "single_server";
      spec.n = 1;
      const u64 gamma = 1 + rng.below(4);
      spec.lambda = 1 + rng.below(2);
      for (u64 i = 0; i < gamma; ++i) spec.sizes.push_back(spec.lambda + rng.below(3));
      const u64 eta = 1 + rng.below(gamma);
      for (u64 i = 0; i < eta; ++i) spec.omega.push_back(i + 1);
      spec.length_L = 2 + rng.below(4);
    }
    spec.shuffle = rng.below(2) == 1;
    const auto r = experiment::run_experiment(spec);
    if (!r.executed) continue;
    if (!r.decode_ok) {
      detail = "decode failed at trial " + std::to_string(executed);
      return false;
    }
    if (!(r.measured_rate <= r.cap.upper)) {
      detail = "converse violated at trial " + std::to_string(executed);
      return false;
    }
    // capacity-achieving regimes meet the lower bound exactly
    if (r.cap.lower_exact && (r.cap.regime == capacity::Regime::eta_ge_half ||
                              r.cap.regime == capacity::Regime::single_server)) {
      if (r.measured_rate != *r.cap.lower_exact) {
        detail = "achievable rate != lower bound at trial " + std::to_string(executed);
        return false;
      }
    }
    ++executed;
  }
  detail = "200 randomized configs, measured rate <= converse bound";
  return true;
}

bool criterion9_transport_equivalence(std::string& detail) {
  Rng rng(99);
  for (int trial = 0; trial < 20; ++trial) {
    experiment::ExperimentSpec spec;
    spec.seed = 7000 + trial;
    spec.shuffle = rng.below(2) == 1;
    if (rng.below(2) == 0) {
      spec.scheme = "ppir";
      spec.n = 2 + rng.below(2);
      const u64 gamma = 1 + rng.below(3);
      for (u64 i = 0; i < gamma; ++i) spec.sizes.push_back(1 + rng.below(4));
      spec.gamma = 1 + rng.below(gamma);
    } else {
      spec.scheme = "mppir";
      spec.n = 2;
      const u64 gamma = 2 + rng.below(3);
      spec.lambda = 1 + rng.below(2);
      for (u64 i = 0; i < gamma; ++i) spec.sizes.push_back(spec.lambda + rng.below(3));
      u64 eta = 1 + rng.below(gamma);
      if (2 * eta < gamma) eta = 1;
      for (u64 i = 0; i < eta; ++i) spec.omega.push_back(i + 1);
    }
    spec.transport = "inproc";
    const auto a = experiment::run_experiment(spec);
    spec.transport = "tcp";
    const auto b = experiment::run_experiment(spec);
    if (!a.executed || !b.executed) {
      detail = "trial " + std::to_string(trial) + " did not execute";
      return false;
    }
    if (a.transcript_digest != b.transcript_digest) {
      detail = "transcript bytes differ at trial " + std::to_string(trial);
      return false;
    }
  }
  detail = "20 random configs byte-identical across transports";
  return true;
}

}  // namespace

int main() {
  std::printf("acceptance suite: pliable retrieval engine\n");
  run_criterion(1, "paper rate, PPIR: n=2 sizes [4,6,10] downloads 14, rate 4/7", 1.0,
                criterion1_ppir_rate);
  run_criterion(2, "paper rate, M-PPIR: n=2 sizes [4,6,10,12] Omega={1,3} lambda=2 rate 2/3", 1.0,
                criterion2_mppir_rate);
  run_criterion(3, "fixture tables (a), (b), EX5 byte-exact under identity randomness", 1.0,
                criterion3_fixture_tables);
  run_criterion(4, "correctness sweep: all desired sets, all s", 60.0, criterion4_correctness_sweep);
  run_criterion(5, "privacy: exact TV distance 0 by exhaustive enumeration", 120.0,
                criterion5_privacy_exact);
  run_criterion(6, "retrieval uniformity over s in [60]", 1.0, criterion6_uniformity);
  run_criterion(7, "capacity identities on the analytic grids", 5.0,
                criterion7_capacity_identities);
  run_criterion(8, "converse inequality over 200 randomized configs", 120.0, criterion8_converse);
  run_criterion(9, "transport equivalence: in-process vs TCP byte-identical", 30.0,
                criterion9_transport_equivalence);
  if (g_failures == 0) {
    std::printf("all criteria passed\n");
    return 0;
  }
  std::printf("%d criteria FAILED\n", g_failures);
  return 1;
}
