#include "ppir/gf.hpp"

#include <cstddef>

namespace ppir::gf {

namespace {

using u64 = std::uint64_t;
using u128 = unsigned __int128;

u64 mulmod(u64 a, u64 b, u64 p) { return static_cast<u64>((u128(a) * b) % p); }

u64 powmod(u64 a, u64 e, u64 p) {
  u64 r = 1 % p;
  a %= p;
  while (e > 0) {
    if (e & 1) r = mulmod(r, a, p);
    a = mulmod(a, a, p);
    e >>= 1;
  }
  return r;
}

}  // namespace

bool is_prime(u64 n) {
  if (n < 2) return false;
  for (u64 q : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
    if (n % q == 0) return n == q;
  }
  // Deterministic Miller–Rabin for 64-bit with the fixed base set above.
  u64 d = n - 1;
  int s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  for (u64 a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
    u64 x = powmod(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool witness = true;
    for (int i = 0; i < s - 1; ++i) {
      x = mulmod(x, x, n);
      if (x == n - 1) {
        witness = false;
        break;
      }
    }
    if (witness) return false;
  }
  return true;
}

Fp::Fp(u64 p) : p_(p) {
  if (!is_prime(p)) throw Error("Fp: modulus " + std::to_string(p) + " is not prime");
}

u64 Fp::add(u64 a, u64 b) const {
  u64 s = a + b;
  if (s >= p_ || s < a) s -= p_;
  return s;
}

u64 Fp::sub(u64 a, u64 b) const { return a >= b ? a - b : a + (p_ - b); }

u64 Fp::mul(u64 a, u64 b) const { return mulmod(a, b, p_); }

u64 Fp::neg(u64 a) const { return a == 0 ? 0 : p_ - a; }

u64 Fp::pow(u64 a, u64 e) const { return powmod(a, e, p_); }

u64 Fp::inv(u64 a) const {
  if (a % p_ == 0) throw DivisionByZero("inverse of zero in GF(" + std::to_string(p_) + ")");
  return powmod(a % p_, p_ - 2, p_);
}

u64 Fp::div(u64 a, u64 b) const { return mul(a % p_, inv(b)); }

FieldElem field_arith(FieldElem a, FieldElem b, ArithOp op) {
  if (a.p != b.p) {
    throw ModulusMismatch("field_arith: moduli " + std::to_string(a.p) + " and " +
                          std::to_string(b.p) + " differ");
  }
  Fp f(a.p);
  u64 v = 0;
  switch (op) {
    case ArithOp::add:
      v = f.add(a.value, b.value);
      break;
    case ArithOp::sub:
      v = f.sub(a.value, b.value);
      break;
    case ArithOp::mul:
      v = f.mul(a.value, b.value);
      break;
    case ArithOp::div:
      v = f.div(a.value, b.value);
      break;
  }
  return FieldElem{v, a.p};
}

Matrix::Matrix(std::size_t rows, std::size_t cols, u64 p)
    : rows_(rows), cols_(cols), p_(p), a_(rows * cols, 0) {
  if (rows == 0 || cols == 0) throw Error("Matrix: dimensions must be positive");
}

Matrix Matrix::submatrix_cols(std::span<const std::size_t> cols) const {
  Matrix out(rows_, cols.size(), p_);
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t i = 0; i < cols.size(); ++i) out.at(r, i) = at(r, cols[i]);
  }
  return out;
}

std::vector<u64> Matrix::mul_vec(std::span<const u64> x) const {
  if (x.size() != cols_) throw Error("mul_vec: size mismatch");
  Fp f(p_);
  std::vector<u64> y(rows_, 0);
  for (std::size_t r = 0; r < rows_; ++r) {
    u64 acc = 0;
    for (std::size_t c = 0; c < cols_; ++c) acc = f.add(acc, f.mul(at(r, c), x[c]));
    y[r] = acc;
  }
  return y;
}

Matrix rs_generator(u64 gamma_total, u64 eta, u64 p) {
  if (eta < 1 || eta > gamma_total) throw Error("rs_generator: need 1 <= eta <= gamma_total");
  if (p < gamma_total + 1) {
    throw FieldTooSmall("rs_generator: p = " + std::to_string(p) + " < Γ + 1 = " +
                        std::to_string(gamma_total + 1));
  }
  Fp f(p);
  Matrix g(eta, gamma_total, p);
  for (u64 c = 0; c < gamma_total; ++c) {
    u64 v = 1;  // c^0
    for (u64 r = 0; r < eta; ++r) {
      g.at(r, c) = v;
      v = f.mul(v, c % p);
    }
  }
  return g;
}

namespace {

// Reduces work to row echelon form in place over GF(p), eliminating below and
// above the pivot; rhs columns ride along. Returns false on a singular input.
bool eliminate(Matrix& m, Matrix& rhs) {
  Fp f(m.p());
  const std::size_t k = m.rows();
  for (std::size_t col = 0; col < k; ++col) {
    std::size_t piv = col;
    while (piv < k && m.at(piv, col) == 0) ++piv;
    if (piv == k) return false;
    if (piv != col) {
      for (std::size_t c = 0; c < k; ++c) std::swap(m.at(piv, c), m.at(col, c));
      for (std::size_t c = 0; c < rhs.cols(); ++c) std::swap(rhs.at(piv, c), rhs.at(col, c));
    }
    const u64 pinv = f.inv(m.at(col, col));
    for (std::size_t c = 0; c < k; ++c) m.at(col, c) = f.mul(m.at(col, c), pinv);
    for (std::size_t c = 0; c < rhs.cols(); ++c) rhs.at(col, c) = f.mul(rhs.at(col, c), pinv);
    for (std::size_t r = 0; r < k; ++r) {
      if (r == col || m.at(r, col) == 0) continue;
      const u64 factor = m.at(r, col);
      for (std::size_t c = 0; c < k; ++c)
        m.at(r, c) = f.sub(m.at(r, c), f.mul(factor, m.at(col, c)));
      for (std::size_t c = 0; c < rhs.cols(); ++c)
        rhs.at(r, c) = f.sub(rhs.at(r, c), f.mul(factor, rhs.at(col, c)));
    }
  }
  return true;
}

}  // namespace

Matrix solve_square(const Matrix& m, const Matrix& rhs) {
  if (m.rows() != m.cols()) throw Error("solve_square: matrix not square");
  if (rhs.rows() != m.rows()) throw Error("solve_square: rhs row count mismatch");
  if (m.p() != rhs.p()) throw ModulusMismatch("solve_square: moduli differ");
  Matrix work = m;
  Matrix x = rhs;
  if (!eliminate(work, x)) throw SingularMatrix("solve_square: singular matrix");
  return x;
}

std::vector<u64> solve_square(const Matrix& m, std::span<const u64> rhs) {
  Matrix r(rhs.size(), 1, m.p());
  for (std::size_t i = 0; i < rhs.size(); ++i) r.at(i, 0) = rhs[i];
  Matrix x = solve_square(m, r);
  std::vector<u64> out(rhs.size());
  for (std::size_t i = 0; i < rhs.size(); ++i) out[i] = x.at(i, 0);
  return out;
}

u64 det(const Matrix& m) {
  if (m.rows() != m.cols()) throw Error("det: matrix not square");
  Fp f(m.p());
  Matrix work = m;
  const std::size_t k = work.rows();
  u64 d = 1;
  for (std::size_t col = 0; col < k; ++col) {
    std::size_t piv = col;
    while (piv < k && work.at(piv, col) == 0) ++piv;
    if (piv == k) return 0;
    if (piv != col) {
      for (std::size_t c = 0; c < k; ++c) std::swap(work.at(piv, c), work.at(col, c));
      d = f.neg(d);
    }
    d = f.mul(d, work.at(col, col));
    const u64 pinv = f.inv(work.at(col, col));
    for (std::size_t r = col + 1; r < k; ++r) {
      const u64 factor = f.mul(work.at(r, col), pinv);
      if (factor == 0) continue;
      for (std::size_t c = col; c < k; ++c)
        work.at(r, c) = f.sub(work.at(r, c), f.mul(factor, work.at(col, c)));
    }
  }
  return d;
}

}  // namespace ppir::gf
