#include "ppir/capacity.hpp"

#include <cmath>
#include <numbers>

namespace ppir::capacity {

namespace {

using u64 = std::uint64_t;
using cplx = std::complex<double>;
using Int = boost::multiprecision::cpp_int;

Rat pow_rat(const Rat& base, u64 e) {
  Rat r = 1;
  for (u64 i = 0; i < e; ++i) r *= base;
  return r;
}

// Solves the dense complex square system in place (partial pivoting).
std::vector<cplx> solve_complex(std::vector<std::vector<cplx>> a, std::vector<cplx> b) {
  const std::size_t k = b.size();
  for (std::size_t col = 0; col < k; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < k; ++r) {
      if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
    }
    if (std::abs(a[piv][col]) < 1e-300) throw SingularSystem("solve_tau: singular system");
    std::swap(a[piv], a[col]);
    std::swap(b[piv], b[col]);
    for (std::size_t r = 0; r < k; ++r) {
      if (r == col) continue;
      const cplx factor = a[r][col] / a[col][col];
      for (std::size_t c = col; c < k; ++c) a[r][c] -= factor * a[col][c];
      b[r] -= factor * b[col];
    }
  }
  std::vector<cplx> x(k);
  for (std::size_t i = 0; i < k; ++i) x[i] = b[i] / a[i][i];
  return x;
}

}  // namespace

double to_double(const Rat& r) {
  return boost::multiprecision::numerator(r).convert_to<double>() /
         boost::multiprecision::denominator(r).convert_to<double>();
}

std::string to_string(const Rat& r) {
  const Int num = boost::multiprecision::numerator(r);
  const Int den = boost::multiprecision::denominator(r);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

void ProblemConfig::validate() const {
  if (n < 1) throw Error("ProblemConfig: n >= 1 required");
  if (gamma_total < 1) throw Error("ProblemConfig: gamma_total >= 1 required");
  if (eta < 1 || eta > gamma_total) throw Error("ProblemConfig: 1 <= eta <= gamma_total required");
  if (lambda < 1) throw Error("ProblemConfig: lambda >= 1 required");
}

std::string regime_name(Regime r) {
  switch (r) {
    case Regime::eta_ge_half:
      return "eta_ge_half";
    case Regime::eta_le_half_integer_ratio:
      return "eta_le_half_integer_ratio";
    case Regime::eta_le_half_general:
      return "eta_le_half_general";
    case Regime::single_server:
      return "single_server";
  }
  return "?";
}

Rat ppir_capacity(u64 n, u64 gamma_total) {
  if (n < 1 || gamma_total < 1) throw Error("ppir_capacity: n >= 1, gamma_total >= 1 required");
  if (n == 1) return Rat(1, gamma_total);
  // (1 + 1/n + … + 1/n^{Γ−1})^{−1}, summed exactly.
  Rat sum = 0;
  const Rat inv_n(1, n);
  Rat term = 1;
  for (u64 k = 0; k < gamma_total; ++k) {
    sum += term;
    term *= inv_n;
  }
  return 1 / sum;
}

Rat mppir_upper_bound(const ProblemConfig& cfg) {
  cfg.validate();
  if (cfg.n < 2) throw Error("mppir_upper_bound: n >= 2 required (single server is separate)");
  const u64 n = cfg.n, G = cfg.gamma_total, eta = cfg.eta;
  if (2 * eta >= G) {
    // [1 + (Γ−η)/(nη)]^{−1}
    return 1 / (1 + Rat(G - eta, n * eta));
  }
  const u64 floor_ratio = G / eta;
  const Rat inv_n(1, n);
  const Rat geo = (1 - pow_rat(inv_n, floor_ratio)) / (1 - inv_n);
  const Rat frac = Rat(G, eta) - Rat(floor_ratio);
  return 1 / (geo + frac * pow_rat(inv_n, floor_ratio));
}

TauSolution solve_tau(u64 n, u64 gamma_total, u64 eta) {
  if (n < 2) throw Error("solve_tau: n >= 2 required");
  if (eta < 1 || 2 * eta > gamma_total) throw Error("solve_tau: 1 <= eta <= gamma_total/2 required");
  const double root = std::pow(static_cast<double>(n), 1.0 / static_cast<double>(eta));
  TauSolution sol;
  sol.kappa.resize(eta);
  for (u64 i = 0; i < eta; ++i) {
    const double angle = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(eta);
    const cplx omega = std::polar(1.0, angle);
    sol.kappa[i] = omega / (root - omega);
  }

  // Row k (k = 1…η−1): Σ τ_i κ_i^{−k} = 0; final row: Σ τ_i κ_i^{−η} = (n−1)^{Γ−η}.
  // At η = 1 the zero rows vanish and the system is the single final equation.
  std::vector<std::vector<cplx>> a(eta, std::vector<cplx>(eta));
  std::vector<cplx> b(eta, cplx(0.0, 0.0));
  for (u64 k = 1; k < eta; ++k) {
    for (u64 i = 0; i < eta; ++i) a[k - 1][i] = std::pow(sol.kappa[i], -static_cast<double>(k));
  }
  for (u64 i = 0; i < eta; ++i)
    a[eta - 1][i] = std::pow(sol.kappa[i], -static_cast<double>(eta));
  b[eta - 1] = std::pow(static_cast<double>(n - 1), static_cast<double>(gamma_total - eta));

  sol.tau = solve_complex(a, b);

  double residual = 0.0;
  for (u64 r = 0; r < eta; ++r) {
    cplx acc(0.0, 0.0);
    for (u64 i = 0; i < eta; ++i) acc += a[r][i] * sol.tau[i];
    residual = std::max(residual, std::abs(acc - b[r]));
  }
  sol.residual = residual;
  return sol;
}

double mppir_lower_bound(const ProblemConfig& cfg) {
  cfg.validate();
  if (cfg.n < 2) throw Error("mppir_lower_bound: n >= 2 required");
  const u64 n = cfg.n, G = cfg.gamma_total, eta = cfg.eta;
  if (2 * eta >= G) return to_double(mppir_upper_bound(cfg));

  const TauSolution sol = solve_tau(n, G, eta);
  cplx num(0.0, 0.0), den(0.0, 0.0);
  for (u64 i = 0; i < eta; ++i) {
    const cplx base = 1.0 + 1.0 / sol.kappa[i];
    const cplx k_pow = std::pow(sol.kappa[i], static_cast<double>(G - eta));
    const cplx b_full = std::pow(base, static_cast<double>(G));
    const cplx b_rem = std::pow(base, static_cast<double>(G - eta));
    num += sol.tau[i] * k_pow * (b_full - b_rem);
    den += sol.tau[i] * k_pow * (b_full - 1.0);
  }
  const cplx ratio = num / den;
  if (std::abs(ratio.imag()) >= kTolerance) {
    throw ImaginaryResidue("mppir_lower_bound: imaginary residue " +
                           std::to_string(ratio.imag()));
  }
  return ratio.real();
}

Rat single_server_capacity(const ProblemConfig& cfg) {
  cfg.validate();
  if (cfg.n != 1) throw Error("single_server_capacity: n == 1 required");
  return Rat(cfg.eta, cfg.gamma_total);
}

CapacityReport report(const ProblemConfig& cfg) {
  cfg.validate();
  CapacityReport rep;
  if (cfg.n == 1) {
    rep.regime = Regime::single_server;
    rep.upper = single_server_capacity(cfg);
    rep.lower_exact = rep.upper;
    rep.lower = to_double(rep.upper);
    rep.exact = rep.lower;
    return rep;
  }
  rep.upper = mppir_upper_bound(cfg);
  if (2 * cfg.eta >= cfg.gamma_total) {
    rep.regime = Regime::eta_ge_half;
    rep.lower_exact = rep.upper;
    rep.lower = to_double(rep.upper);
  } else {
    rep.regime = (cfg.gamma_total % cfg.eta == 0) ? Regime::eta_le_half_integer_ratio
                                                  : Regime::eta_le_half_general;
    rep.lower = mppir_lower_bound(cfg);
  }
  if (std::abs(to_double(rep.upper) - rep.lower) < kTolerance) rep.exact = rep.lower;
  return rep;
}

}  // namespace ppir::capacity
