#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "ppir/capacity.hpp"
#include "ppir/dataset.hpp"
#include "ppir/scheme_mppir.hpp"

namespace ppir::audit {

// Exact distribution of one database's query transcript under uniform scheme
// randomness. Keys are canonicalized transcripts; probabilities are exact
// rationals summing to 1.
struct TranscriptDistribution {
  std::map<std::string, capacity::Rat> probs;

  capacity::Rat total() const;
};

// Total variation distance ½ Σ |p − q|, exact.
capacity::Rat privacy_distance(const TranscriptDistribution& d1,
                               const TranscriptDistribution& d2);

struct EnumerationOptions {
  std::uint64_t budget = 10'000'000;  // maximum randomness atoms
  bool shuffle = false;               // enumerate per-database query orders too
};

// Raw mode: enumerates every index permutation tuple (and column permutations
// and shuffle orders where applicable). Feasible only at desk scale; throws
// BudgetExceeded beyond the configured budget.
TranscriptDistribution enumerate_ppir_raw(std::uint64_t n, std::uint64_t gamma_total,
                                          std::uint64_t desired, std::uint64_t db_j,
                                          const EnumerationOptions& opts = {});
TranscriptDistribution enumerate_mppir_raw(const MppirParams& params, std::uint64_t db_j,
                                           const EnumerationOptions& opts = {});

// Quotient mode: index permutations that differ only by per-candidate
// relabelings fixing the canonical transcript are grouped, so the distribution
// collapses to normal forms. Non-index randomness (the MDS column
// permutations) is still enumerated exactly.
TranscriptDistribution enumerate_ppir_quotient(std::uint64_t n, std::uint64_t gamma_total,
                                               std::uint64_t desired, std::uint64_t db_j);
TranscriptDistribution enumerate_mppir_quotient(const MppirParams& params, std::uint64_t db_j,
                                                const EnumerationOptions& opts = {});

// Per-member selection frequency of class γ over all s ∈ [δ]. PASS iff every
// member is hit exactly δ/M_γ times.
struct UniformityReport {
  std::uint64_t gamma = 0;
  std::uint64_t expected = 0;
  std::vector<std::uint64_t> counts;  // per member β ∈ [M_γ]
  bool pass = false;
};

UniformityReport retrieval_uniformity(const Classification& cls, std::uint64_t gamma,
                                      std::uint64_t budget = 10'000'000);

struct AuditPair {
  std::vector<std::uint64_t> omega_a;
  std::vector<std::uint64_t> omega_b;
  capacity::Rat tvd;
};

struct AuditReport {
  std::string scheme;  // "ppir" | "mppir"
  std::string mode;    // "raw" | "quotient"
  std::uint64_t n = 0;
  std::uint64_t gamma_total = 0;
  std::uint64_t eta = 1;
  std::uint64_t lambda = 1;
  std::uint64_t db_j = 1;
  bool shuffle = false;
  std::vector<AuditPair> pairs;
  bool pass = false;  // PASS iff every pairwise distance is exactly 0

  std::string to_json() const;
};

// Compares the transcript distributions of every pair of desired class sets.
// s is excluded from the compared transcript: it is drawn independently of Ω
// and identically distributed under every Ω.
AuditReport audit_ppir(std::uint64_t n, std::uint64_t gamma_total, std::uint64_t db_j,
                       const std::string& mode, const EnumerationOptions& opts = {});
AuditReport audit_mppir(std::uint64_t n, std::uint64_t gamma_total, std::uint64_t eta,
                        std::uint64_t lambda, std::uint64_t modulus_p, std::uint64_t db_j,
                        const std::string& mode, const EnumerationOptions& opts = {});

// Canonical transcript key used by the enumerators (exposed for tests).
std::string transcript_key(const std::vector<Query>& queries);

}  // namespace ppir::audit
