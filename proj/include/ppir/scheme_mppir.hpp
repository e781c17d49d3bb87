#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ppir/scheme_common.hpp"
#include "ppir/scheme_ppir.hpp"

namespace ppir {

// Executable regimes. The general 1 < η < Γ/2 construction lives in an
// external reference and is analytical-only here: the engine refuses to run
// it rather than fabricate a protocol.
enum class MppirRegime { mds, ppir_super, single_server, analytical_only };

MppirRegime classify_regime(std::uint64_t n, std::uint64_t gamma_total, std::uint64_t eta);

struct MppirParams {
  std::uint64_t n = 2;
  std::uint64_t gamma_total = 1;
  std::vector<std::uint64_t> omega;  // sorted desired class set Ω
  std::uint64_t lambda = 1;
  std::uint64_t modulus_p = 257;
  bool shuffle = false;

  std::uint64_t eta() const { return omega.size(); }
  void validate() const;
};

// One coded equation group of the MDS round: at database db, the η rows of
// the column-permuted generator applied to a vector holding one fresh desired
// super symbol per desired class and database side_db's round-1 super symbols
// for each undesired class.
struct MdsGroupRef {
  std::uint32_t db = 0;
  std::uint32_t side_db = 0;
  std::uint64_t fresh_slot = 0;
  std::vector<std::uint32_t> eq_pos;            // η query positions at db
  std::vector<std::vector<std::uint64_t>> coeffs;  // η × Γ permuted generator rows
};

struct MppirPlan {
  MppirParams params;
  MppirRegime regime = MppirRegime::analytical_only;
  std::uint64_t super_len = 0;  // L̂: n² (mds), n^Γ (ppir_super), dataset L (single server)

  std::vector<std::vector<Query>> db_queries;

  // mds decode bookkeeping
  std::vector<std::vector<std::uint32_t>> round1_pos;  // [db][candidate−1] → position
  std::vector<MdsGroupRef> groups;

  // ppir_super decode bookkeeping
  std::vector<SlotRef> slot_refs;
};

// Multi-message query generation. η ≥ Γ/2 runs the two-round MDS-coded scheme
// over super messages of length n²; η = 1 reuses the single-message
// construction elementwise over λ-vectors. Throws RegimeUnsupported for
// 1 < η < Γ/2 and UnsupportedSingleDB for n = 1 (see single-server below).
MppirPlan gen_queries_mppir(const MppirParams& params, const MdsRandomness& rnd);

// Single-server scheme: download λ messages from every class under one shared
// random number; the client keeps the desired ones. length_L is the message
// length of the stored dataset.
MppirPlan gen_queries_single_server(const MppirParams& params, std::uint64_t length_L,
                                    const MdsRandomness& rnd);

std::vector<std::vector<std::uint64_t>> answer_mppir(const Dataset& db, std::uint64_t s,
                                                     std::span<const Query> queries,
                                                     std::uint64_t lambda);

// Decoded payload: messages[i][k] holds the k-th recovered message of desired
// class omega[i], all L̂ symbols in raw stored order.
struct MppirDecodeResult {
  std::vector<std::vector<std::vector<std::uint64_t>>> messages;
};

MppirDecodeResult decode_mppir(const Transcript& t, const MppirParams& params,
                               const MdsRandomness& rnd);
MppirDecodeResult decode_single_server(const Transcript& t, const MppirParams& params,
                                       std::uint64_t length_L, const MdsRandomness& rnd);

}  // namespace ppir
