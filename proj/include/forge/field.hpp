#pragma once

#include <gmpxx.h>

#include <climits>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "forge/error.hpp"
#include "forge/rng.hpp"

namespace forge {

using u64 = std::uint64_t;
using u128 = unsigned __int128;

inline bool is_prime_u64(u64 n) {
  if (n < 2) return false;
  mpz_class z;
  mpz_import(z.get_mpz_t(), 1, 1, sizeof(n), 0, 0, &n);
  // below 2^64 the BPSW test inside GMP is exact
  return mpz_probab_prime_p(z.get_mpz_t(), 30) != 0;
}

struct FieldConfig {
  enum class Kind { Rationals, Prime };
  Kind kind = Kind::Rationals;
  u64 modulus = 0;

  static FieldConfig rationals() { return {}; }
  static FieldConfig prime(u64 p) {
    if (p >= (u64(1) << 63)) fail(ErrorKind::InvalidArgument, "modulus must be below 2^63");
    if (!is_prime_u64(p)) fail(ErrorKind::InvalidArgument, "modulus " + std::to_string(p) + " is not prime");
    FieldConfig c;
    c.kind = Kind::Prime;
    c.modulus = p;
    return c;
  }

  bool is_prime() const { return kind == Kind::Prime; }
  bool operator==(const FieldConfig&) const = default;

  // The session's notion of "large enough characteristic": p > 2 D^2.
  void require_degree(long long max_degree) const {
    if (!is_prime()) return;
    u128 need = u128(2) * u128(max_degree) * u128(max_degree);
    if (u128(modulus) <= need)
      fail(ErrorKind::FieldTooSmall, "modulus " + std::to_string(modulus) + " must exceed 2*D^2 for D = " +
                                         std::to_string(max_degree));
  }

  // true when the field holds at least k distinct elements
  bool has_elements(u64 k) const { return !is_prime() || modulus >= k; }

  std::string str() const { return is_prime() ? "prime " + std::to_string(modulus) : "rationals"; }
};

inline u64 mulmod(u64 a, u64 b, u64 p) { return static_cast<u64>((u128(a) * b) % p); }

inline u64 powmod(u64 a, u64 e, u64 p) {
  u64 r = 1 % p;
  a %= p;
  while (e) {
    if (e & 1) r = mulmod(r, a, p);
    a = mulmod(a, a, p);
    e >>= 1;
  }
  return r;
}

inline u64 invmod(u64 a, u64 p) {
  // extended Euclid on signed 128-bit values
  __int128 t = 0, nt = 1, r = p, nr = a % p;
  while (nr != 0) {
    __int128 q = r / nr;
    __int128 tmp = t - q * nt;
    t = nt;
    nt = tmp;
    tmp = r - q * nr;
    r = nr;
    nr = tmp;
  }
  if (r != 1) fail(ErrorKind::DivisionByZero, "element not invertible");
  if (t < 0) t += p;
  return static_cast<u64>(t);
}

// A field element carries its modulus (0 for the rationals) so mixing
// configurations is caught at the operation, not silently reduced.
class Fe {
 public:
  Fe() : p_(0), v_(mpq_class(0)) {}

  static Fe zero(const FieldConfig& f) { return f.is_prime() ? Fe(f.modulus, u64(0)) : Fe(); }
  static Fe one(const FieldConfig& f) { return from_int(f, 1); }

  static Fe from_int(const FieldConfig& f, long long v) {
    if (f.is_prime()) {
      long long m = static_cast<long long>(v % static_cast<long long>(f.modulus));
      if (m < 0) m += static_cast<long long>(f.modulus);
      return Fe(f.modulus, static_cast<u64>(m));
    }
    Fe r;
    r.v_ = mpq_class(mpz_class(static_cast<long>(v)));
    return r;
  }

  static Fe from_u64(const FieldConfig& f, u64 v) {
    if (f.is_prime()) return Fe(f.modulus, v % f.modulus);
    mpz_class z;
    mpz_import(z.get_mpz_t(), 1, 1, sizeof(v), 0, 0, &v);
    Fe r;
    r.v_ = mpq_class(z);
    return r;
  }

  static Fe from_mpz(const FieldConfig& f, const mpz_class& z) {
    if (f.is_prime()) return Fe(f.modulus, mpz_fdiv_ui(z.get_mpz_t(), f.modulus));
    Fe r;
    r.v_ = mpq_class(z);
    return r;
  }

  static Fe from_mpq(const FieldConfig& f, const mpq_class& q) {
    if (f.is_prime()) {
      Fe num = from_mpz(f, q.get_num());
      Fe den = from_mpz(f, q.get_den());
      return num / den;
    }
    Fe r;
    r.v_ = q;
    r.v_q().canonicalize();
    return r;
  }

  // "num" or "num/den", as used by the file formats
  static Fe parse(const FieldConfig& f, const std::string& s) {
    mpq_class q;
    if (q.set_str(s, 10) != 0) fail(ErrorKind::InvalidArgument, "bad number '" + s + "'");
    if (q.get_den() == 0) fail(ErrorKind::DivisionByZero, "zero denominator in '" + s + "'");
    q.canonicalize();
    return from_mpq(f, q);
  }

  FieldConfig field() const {
    FieldConfig c;
    if (p_) {
      c.kind = FieldConfig::Kind::Prime;
      c.modulus = p_;
    }
    return c;
  }
  u64 modulus() const { return p_; }
  bool is_prime_elem() const { return p_ != 0; }
  u64 residue() const { return std::get<u64>(v_); }
  const mpq_class& rational() const { return std::get<mpq_class>(v_); }

  bool is_zero() const { return p_ ? residue() == 0 : sgn(rational()) == 0; }
  bool is_one() const { return p_ ? residue() == 1 : rational() == 1; }

  Fe operator+(const Fe& b) const {
    check(b);
    if (p_) {
      u64 r = residue() + b.residue();
      if (r >= p_) r -= p_;
      return Fe(p_, r);
    }
    return Fe(mpq_class(rational() + b.rational()));
  }
  Fe operator-(const Fe& b) const {
    check(b);
    if (p_) {
      u64 a = residue(), c = b.residue();
      return Fe(p_, a >= c ? a - c : a + (p_ - c));
    }
    return Fe(mpq_class(rational() - b.rational()));
  }
  Fe operator*(const Fe& b) const {
    check(b);
    if (p_) return Fe(p_, mulmod(residue(), b.residue(), p_));
    return Fe(mpq_class(rational() * b.rational()));
  }
  Fe operator/(const Fe& b) const {
    check(b);
    if (b.is_zero()) fail(ErrorKind::DivisionByZero, "division by zero");
    if (p_) return Fe(p_, mulmod(residue(), invmod(b.residue(), p_), p_));
    return Fe(mpq_class(rational() / b.rational()));
  }
  Fe operator-() const {
    if (p_) return Fe(p_, residue() == 0 ? 0 : p_ - residue());
    return Fe(mpq_class(-rational()));
  }
  Fe& operator+=(const Fe& b) { return *this = *this + b; }
  Fe& operator-=(const Fe& b) { return *this = *this - b; }
  Fe& operator*=(const Fe& b) { return *this = *this * b; }

  Fe inv() const { return Fe::one(field()) / *this; }

  Fe pow(u64 e) const {
    Fe r = Fe::one(field()), a = *this;
    while (e) {
      if (e & 1) r *= a;
      a *= a;
      e >>= 1;
    }
    return r;
  }

  bool operator==(const Fe& b) const {
    if (p_ != b.p_) return false;
    return p_ ? residue() == b.residue() : rational() == b.rational();
  }
  bool operator!=(const Fe& b) const { return !(*this == b); }

  // total order for use as a map key; not the field's (nonexistent) order
  bool operator<(const Fe& b) const {
    if (p_ != b.p_) return p_ < b.p_;
    if (p_) return residue() < b.residue();
    return cmp(rational(), b.rational()) < 0;
  }

  std::string str() const { return p_ ? std::to_string(residue()) : rational().get_str(); }

 private:
  Fe(u64 p, u64 r) : p_(p), v_(r) {}
  explicit Fe(mpq_class q) : p_(0), v_(std::move(q)) {}

  mpq_class& v_q() { return std::get<mpq_class>(v_); }

  void check(const Fe& b) const {
    if (p_ != b.p_) fail(ErrorKind::MixedFieldConfig, "operands from different fields");
  }

  u64 p_;
  std::variant<mpq_class, u64> v_;
};

enum class ArithOp { Add, Sub, Mul, Div };

inline Fe field_arith(const Fe& a, const Fe& b, ArithOp op) {
  switch (op) {
    case ArithOp::Add: return a + b;
    case ArithOp::Sub: return a - b;
    case ArithOp::Mul: return a * b;
    case ArithOp::Div: return a / b;
  }
  return a;
}

inline Fe binomial(const FieldConfig& f, long long n, long long k) {
  if (k < 0 || k > n) return Fe::zero(f);
  mpz_class b;
  mpz_bin_uiui(b.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(k));
  return Fe::from_mpz(f, b);
}

inline std::vector<Fe> sample_grid(const FieldConfig& f, u64 bound, std::size_t count, u64 seed) {
  if (bound < 1) fail(ErrorKind::InvalidArgument, "grid bound must be at least 1");
  if (f.is_prime() && bound >= f.modulus)
    fail(ErrorKind::BoundExceedsField, "grid bound " + std::to_string(bound) + " not below modulus");
  Rng rng(seed, "sample_grid");
  std::vector<Fe> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(Fe::from_u64(f, rng.below(bound)));
  return out;
}

}  // namespace forge
