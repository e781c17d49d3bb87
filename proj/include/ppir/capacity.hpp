#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "ppir/errors.hpp"

namespace ppir::capacity {

using Rat = boost::multiprecision::cpp_rational;

double to_double(const Rat& r);
std::string to_string(const Rat& r);  // "num/den", or "num" when integral

struct ProblemConfig {
  std::uint64_t n = 1;            // databases
  std::uint64_t gamma_total = 1;  // Γ
  std::uint64_t eta = 1;          // desired classes
  std::uint64_t lambda = 1;       // messages per desired class

  void validate() const;
};

enum class Regime {
  eta_ge_half,
  eta_le_half_integer_ratio,
  eta_le_half_general,
  single_server,
};

std::string regime_name(Regime r);

// Solution of the η complex linear equations behind the general lower bound:
//   Σ τ_i κ_i^{−η} = (n−1)^{Γ−η},  Σ τ_i κ_i^{−k} = 0 for k ∈ [η−1],
// with κ_i = e^{j2π(i−1)/η} / (n^{1/η} − e^{j2π(i−1)/η}).
struct TauSolution {
  std::vector<std::complex<double>> kappa;
  std::vector<std::complex<double>> tau;
  double residual = 0.0;  // max violation over the η equations
};

// C_PPIR = (1 + 1/n + … + 1/n^{Γ−1})^{−1}; 1/Γ for a single server.
Rat ppir_capacity(std::uint64_t n, std::uint64_t gamma_total);

// Converse bound on the M-PPIR rate; independent of λ. Requires n ≥ 2.
Rat mppir_upper_bound(const ProblemConfig& cfg);

TauSolution solve_tau(std::uint64_t n, std::uint64_t gamma_total, std::uint64_t eta);

// Achievable-rate lower bound: the converse value itself when η ≥ Γ/2, the
// κ/τ expression otherwise. Requires n ≥ 2.
double mppir_lower_bound(const ProblemConfig& cfg);

// n = 1: η/Γ regardless of λ.
Rat single_server_capacity(const ProblemConfig& cfg);

struct CapacityReport {
  Rat upper;
  double lower = 0.0;
  std::optional<Rat> lower_exact;  // set when the lower bound has a closed rational form
  std::optional<double> exact;     // set when |upper − lower| < 1e−9
  Regime regime = Regime::eta_ge_half;
};

CapacityReport report(const ProblemConfig& cfg);

inline constexpr double kTolerance = 1e-9;

}  // namespace ppir::capacity
