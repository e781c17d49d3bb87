#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ppir/scheme_common.hpp"

namespace ppir {

struct PpirParams {
  std::uint64_t n = 2;            // databases, n ≥ 2
  std::uint64_t gamma_total = 1;  // candidate classes Γ
  std::uint64_t desired = 1;      // desired class γ
  bool shuffle = false;           // uniformly shuffle each database's query order
};

// Where one fresh desired slot is recovered: the answer at (db, pos), minus
// the answer of the side-information query at (side_db, side_pos) when the
// slot was delivered inside a τ-sum (τ ≥ 2).
struct SlotRef {
  std::uint32_t db = 0;
  std::uint32_t pos = 0;
  std::int32_t side_db = -1;
  std::int32_t side_pos = -1;
};

// Query plan plus the bookkeeping decode needs. Regenerating the plan from
// (params, randomness) is deterministic, so client and tests never have to
// carry it alongside the transcript.
struct PpirPlan {
  PpirParams params;
  std::uint64_t message_len = 0;                // L = n^Γ
  std::vector<std::vector<Query>> db_queries;   // permutation-composed, shuffled if requested
  std::vector<SlotRef> slot_refs;               // [slot−1], one per desired slot
};

// Sun–Jafar-style query generation over Γ candidate messages. Round τ gives
// each database C(Γ,τ)(n−1)^{τ−1} τ-sums; desired sums pair a fresh desired
// symbol with an undesired (τ−1)-sum previously queried at a different
// database. Canonical order reproduces the fixture tables under identity
// randomness.
PpirPlan gen_queries_ppir(const PpirParams& params, const ClientRandomness& rnd);

// Database answer assembly: candidate γ resolves through the shared random
// number s, and each query is answered with the corresponding symbol sum.
std::vector<std::vector<std::uint64_t>> answer_ppir(const Dataset& db, std::uint64_t s,
                                                    std::span<const Query> queries);

// Recovers all L symbols of one message of the desired class by iterated
// side-information cancellation. The client never learns which class member
// it received; tests resolve that from the dataset when needed.
std::vector<std::uint64_t> decode_ppir(const Transcript& t, const PpirParams& params,
                                       const ClientRandomness& rnd, std::uint64_t modulus_p);

}  // namespace ppir
