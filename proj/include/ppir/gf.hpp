#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ppir/errors.hpp"

namespace ppir::gf {

// Everything here is exact arithmetic over a prime field GF(p). Values are
// canonical representatives in [0, p).

bool is_prime(std::uint64_t n);

// Field element carrying its modulus. Mixed-modulus arithmetic throws
// ModulusMismatch; all results stay canonical.
struct FieldElem {
  std::uint64_t value = 0;
  std::uint64_t p = 0;

  friend bool operator==(const FieldElem&, const FieldElem&) = default;
};

enum class ArithOp { add, sub, mul, div };

FieldElem field_arith(FieldElem a, FieldElem b, ArithOp op);

// Modulus context for bulk arithmetic on raw residues.
class Fp {
 public:
  explicit Fp(std::uint64_t p);

  std::uint64_t p() const { return p_; }

  std::uint64_t add(std::uint64_t a, std::uint64_t b) const;
  std::uint64_t sub(std::uint64_t a, std::uint64_t b) const;
  std::uint64_t mul(std::uint64_t a, std::uint64_t b) const;
  std::uint64_t neg(std::uint64_t a) const;
  std::uint64_t pow(std::uint64_t a, std::uint64_t e) const;
  std::uint64_t inv(std::uint64_t a) const;  // throws DivisionByZero on a == 0
  std::uint64_t div(std::uint64_t a, std::uint64_t b) const;

 private:
  std::uint64_t p_;
};

// Dense row-major matrix over GF(p).
class Matrix {
 public:
  Matrix(std::size_t rows, std::size_t cols, std::uint64_t p);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::uint64_t p() const { return p_; }

  std::uint64_t& at(std::size_t r, std::size_t c) { return a_[r * cols_ + c]; }
  std::uint64_t at(std::size_t r, std::size_t c) const { return a_[r * cols_ + c]; }

  Matrix submatrix_cols(std::span<const std::size_t> cols) const;
  std::vector<std::uint64_t> mul_vec(std::span<const std::uint64_t> x) const;

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::uint64_t p_;
  std::vector<std::uint64_t> a_;
};

// Vandermonde-style generator of an [Γ, η] Reed–Solomon code with evaluation
// points 0, 1, …, Γ−1: entry (r, c) = c^r. Any η columns are linearly
// independent. Requires p ≥ Γ + 1.
Matrix rs_generator(std::uint64_t gamma_total, std::uint64_t eta, std::uint64_t p);

// Solves m·x = rhs for square invertible m by Gaussian elimination with
// first-nonzero pivoting. Throws SingularMatrix.
std::vector<std::uint64_t> solve_square(const Matrix& m, std::span<const std::uint64_t> rhs);

// Multi-RHS variant: each column of rhs is an independent right-hand side.
Matrix solve_square(const Matrix& m, const Matrix& rhs);

std::uint64_t det(const Matrix& m);

}  // namespace ppir::gf
