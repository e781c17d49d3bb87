#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ppir/capacity.hpp"
#include "ppir/net.hpp"
#include "ppir/scheme_mppir.hpp"

namespace ppir::experiment {

struct ExperimentSpec {
  std::string scheme = "ppir";  // "ppir" | "mppir" | "single_server"
  std::uint64_t n = 2;
  std::vector<std::uint64_t> sizes;
  std::uint64_t length_L = 0;  // 0 → derived (n^Γ / n²); required for single_server
  std::uint64_t gamma = 1;     // ppir desired class
  std::vector<std::uint64_t> omega;  // mppir/single_server desired set
  std::uint64_t lambda = 1;
  std::uint64_t seed = 1;
  std::optional<std::uint64_t> force_s;  // pin the shared random number (fixtures)
  std::string transport = "inproc";      // "inproc" | "tcp"
  bool shuffle = false;
  std::uint64_t modulus_p = 257;
  std::uint64_t repetitions = 1;

  std::string to_json() const;
  static ExperimentSpec from_json(const std::string& text);
};

struct RunResult {
  std::uint64_t n = 0;
  std::uint64_t gamma_total = 0;
  std::uint64_t eta = 1;
  std::uint64_t lambda = 1;
  std::uint64_t s = 0;
  capacity::Rat measured_rate;
  std::uint64_t download_symbols = 0;
  capacity::CapacityReport cap;
  bool executed = false;
  bool decode_ok = false;
  std::vector<std::uint64_t> retrieved_indices;
  std::string transcript_digest;  // canonical byte rendering, for transport equivalence
  std::string verdict;            // "pass" | "fail" | "analytic_only"
  std::string note;
};

// Executes the full protocol against n replicated databases (in-process or
// TCP), measures the rate, compares against the capacity bounds, and verifies
// decoded bytes against dataset ground truth (the simulator has oracle access
// the client lacks). RegimeUnsupported configurations come back with the
// analytic bounds and verdict "analytic_only".
RunResult run_experiment(const ExperimentSpec& spec);

// Stable column order: n, gamma, eta, lambda, upper, lower, measured, verdict.
std::string emit_table(std::span<const RunResult> results, const std::string& format);

}  // namespace ppir::experiment
