#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "ppir/errors.hpp"

namespace ppir {

// Partition of f messages into Γ ordered, non-empty classes. Class γ owns the
// contiguous index range [1 + Σ_{i<γ} M_i, Σ_{i≤γ} M_i] (1-based message
// indices throughout).
struct Classification {
  std::vector<std::uint64_t> sizes;  // M_1 … M_Γ
  std::uint64_t f = 0;               // Σ M_γ
  std::uint64_t delta = 0;           // LCM(M_1, …, M_Γ)

  explicit Classification(std::vector<std::uint64_t> class_sizes);

  std::uint64_t gamma_total() const { return sizes.size(); }
  std::uint64_t class_first(std::uint64_t gamma) const;  // first index of ℳ_γ
  std::uint64_t class_last(std::uint64_t gamma) const;   // last index of ℳ_γ
};

// Global index of the β-th member of class γ: β + Σ_{l<γ} M_l.
std::uint64_t theta(const Classification& cls, std::uint64_t gamma, std::uint64_t beta);

// Database-side candidate selection from the shared random number s ∈ [δ]:
// β = ⌈s·M_γ/δ⌉ in exact integer arithmetic, then mapped through theta. Over
// uniform s every class member is selected exactly δ/M_γ times.
std::uint64_t select_candidate(const Classification& cls, std::uint64_t s, std::uint64_t gamma);

// λ distinct members of class γ: the selected candidate followed by cyclic
// successors, wrapping from the class's last index to its first.
std::vector<std::uint64_t> select_candidates_cyclic(const Classification& cls, std::uint64_t s,
                                                    std::uint64_t gamma, std::uint64_t lambda);

// Replicated message store: f messages of L symbols each over GF(p).
struct Dataset {
  Classification cls;
  std::uint64_t length_L = 0;
  std::uint64_t modulus_p = 0;
  std::vector<std::vector<std::uint64_t>> symbols;  // [message-1][position-1]

  std::uint64_t symbol(std::uint64_t message, std::uint64_t position) const;
};

Dataset build_dataset(std::vector<std::uint64_t> sizes, std::uint64_t length_L,
                      std::uint64_t modulus_p, std::uint64_t seed);

// File format: header `ppir-dataset v1 p=<p> L=<L> sizes=<M_1,…,M_Γ>` followed
// by f lines of L space-separated integers. Round-trips exactly.
void save_dataset(const Dataset& ds, std::ostream& out);
void save_dataset_file(const Dataset& ds, const std::string& path);
Dataset load_dataset(std::istream& in);
Dataset load_dataset_file(const std::string& path);

}  // namespace ppir
