#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ppir/capacity.hpp"
#include "ppir/dataset.hpp"
#include "ppir/rng.hpp"

namespace ppir {

// One summand of a linear-combination query: coeff · U^(candidate)_{symbol_index}.
// symbol_index addresses raw stored positions; the client pre-composes its
// private permutations before anything reaches a database.
struct QueryTerm {
  std::uint64_t candidate = 0;     // class index γ ∈ [Γ]
  std::uint64_t symbol_index = 0;  // ℓ ∈ [L]
  std::uint64_t coeff = 1;

  friend bool operator==(const QueryTerm&, const QueryTerm&) = default;
  friend auto operator<=>(const QueryTerm&, const QueryTerm&) = default;
};

struct Query {
  std::vector<QueryTerm> terms;

  friend bool operator==(const Query&, const Query&) = default;
};

// Validates the Query invariants: nonempty, pairwise-distinct candidates, no
// all-zero coefficient set. Zero-coefficient terms are dropped; remaining
// terms are kept in ascending candidate order.
Query make_query(std::vector<QueryTerm> terms);

// Client-private randomness for the single-message scheme. perms[c−1] is the
// permutation π_c of [L] applied to candidate c's symbol indices; order_seeds
// seed the optional per-database shuffle.
struct ClientRandomness {
  std::uint64_t s = 1;
  std::vector<std::vector<std::uint64_t>> perms;
  std::vector<std::uint64_t> order_seeds;

  static ClientRandomness identity(std::uint64_t s, std::uint64_t gamma_total, std::uint64_t L,
                                   std::uint64_t n);
  static ClientRandomness sample(Rng& rng, std::uint64_t delta, std::uint64_t gamma_total,
                                 std::uint64_t L, std::uint64_t n);
};

// Adds the n−1 private column permutations of the MDS generator used by the
// multi-message scheme's coded round.
struct MdsRandomness {
  std::uint64_t s = 1;
  std::vector<std::vector<std::uint64_t>> perms;
  std::vector<std::vector<std::uint64_t>> column_perms;
  std::vector<std::uint64_t> order_seeds;

  ClientRandomness client_part() const { return ClientRandomness{s, perms, order_seeds}; }

  static MdsRandomness identity(std::uint64_t s, std::uint64_t gamma_total, std::uint64_t L,
                                std::uint64_t n);
  static MdsRandomness sample(Rng& rng, std::uint64_t delta, std::uint64_t gamma_total,
                              std::uint64_t L, std::uint64_t n);
};

// Per-database ordered query and answer lists. Answers are vectors of λ field
// elements (λ = 1 for the single-message scheme).
struct Transcript {
  std::vector<std::vector<Query>> queries;                    // [db][pos]
  std::vector<std::vector<std::vector<std::uint64_t>>> answers;  // [db][pos][component]

  std::uint64_t total_answer_symbols() const;

  friend bool operator==(const Transcript&, const Transcript&) = default;
};

// R = μ·L / D with D = total downloaded field symbols, as an exact rational.
capacity::Rat measure_rate(const Transcript& t, std::uint64_t L, std::uint64_t mu);

// Canonical byte rendering of a transcript; equal strings ⇔ equal transcripts.
std::string transcript_fingerprint(const Transcript& t);

// Database-side answer assembly shared by both schemes: candidate γ resolves
// to λ message indices via the cyclic selection rule, and each query is the
// coefficient-weighted elementwise sum of the referenced super symbols.
std::vector<std::vector<std::uint64_t>> answer_queries(const Dataset& db, std::uint64_t s,
                                                       std::span<const Query> queries,
                                                       std::uint64_t lambda);

}  // namespace ppir
