#pragma once

#include <algorithm>
#include <map>
#include <mutex>
#include <utility>
#include <vector>

#include "forge/field.hpp"

namespace forge::uni {

// Dense univariate polynomial, coefficients low to high, no trailing zeros.
using Poly = std::vector<Fe>;

inline void trim(Poly& a) {
  while (!a.empty() && a.back().is_zero()) a.pop_back();
}

inline int deg(const Poly& a) { return static_cast<int>(a.size()) - 1; }

inline Poly add(const Poly& a, const Poly& b) {
  const Poly& big = a.size() >= b.size() ? a : b;
  const Poly& small = a.size() >= b.size() ? b : a;
  Poly r = big;
  for (std::size_t i = 0; i < small.size(); ++i) r[i] += small[i];
  trim(r);
  return r;
}

inline Poly sub(const Poly& a, const Poly& b) {
  Poly r = a;
  if (r.size() < b.size()) r.resize(b.size(), Fe::zero(b[0].field()));
  for (std::size_t i = 0; i < b.size(); ++i) r[i] -= b[i];
  trim(r);
  return r;
}

inline Poly mul(const Poly& a, const Poly& b) {
  if (a.empty() || b.empty()) return {};
  Poly r(a.size() + b.size() - 1, Fe::zero(a[0].field()));
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].is_zero()) continue;
    for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
  }
  trim(r);
  return r;
}

inline Poly scale(const Poly& a, const Fe& c) {
  Poly r = a;
  for (auto& x : r) x *= c;
  trim(r);
  return r;
}

// a = q*b + r
inline std::pair<Poly, Poly> divmod(const Poly& a, const Poly& b) {
  if (b.empty()) fail(ErrorKind::DivisionByZero, "polynomial division by zero");
  Poly r = a;
  if (a.size() < b.size()) return {{}, r};
  Poly q(a.size() - b.size() + 1, Fe::zero(b[0].field()));
  Fe inv_lead = b.back().inv();
  for (int i = deg(r); i >= deg(b); --i) {
    Fe c = r[static_cast<std::size_t>(i)] * inv_lead;
    if (c.is_zero()) continue;
    q[static_cast<std::size_t>(i - deg(b))] = c;
    for (int j = 0; j <= deg(b); ++j) r[static_cast<std::size_t>(i - deg(b) + j)] -= c * b[static_cast<std::size_t>(j)];
  }
  trim(q);
  trim(r);
  return {q, r};
}

inline Poly monic(const Poly& a) {
  if (a.empty()) return a;
  return scale(a, a.back().inv());
}

inline Poly gcd(Poly a, Poly b) {
  while (!b.empty()) {
    Poly r = divmod(a, b).second;
    a = std::move(b);
    b = std::move(r);
  }
  return monic(a);
}

inline Poly derivative(const Poly& a) {
  if (a.size() <= 1) return {};
  Poly r(a.size() - 1, Fe::zero(a[0].field()));
  for (std::size_t i = 1; i < a.size(); ++i) r[i - 1] = a[i] * Fe::from_int(a[0].field(), static_cast<long long>(i));
  trim(r);
  return r;
}

inline Fe eval(const Poly& a, const Fe& x) {
  if (a.empty()) return Fe::zero(x.field());
  Fe r = a.back();
  for (int i = deg(a) - 1; i >= 0; --i) r = r * x + a[static_cast<std::size_t>(i)];
  return r;
}

// base^e mod m
inline Poly powmod(const Poly& base, u64 e, const Poly& m) {
  Poly r = {Fe::one(m[0].field())};
  Poly b = divmod(base, m).second;
  while (e) {
    if (e & 1) r = divmod(mul(r, b), m).second;
    b = divmod(mul(b, b), m).second;
    e >>= 1;
  }
  return r;
}

// Coefficients of P(y + c) from those of P(y): the Taylor coefficients at c,
// i.e. the Hasse derivatives P^{(j)}(c).
inline Poly taylor_shift(const Poly& a, const Fe& c) {
  Poly r = a;
  int n = deg(r);
  for (int i = 0; i < n; ++i)
    for (int j = n - 1; j >= i; --j) r[static_cast<std::size_t>(j)] += c * r[static_cast<std::size_t>(j + 1)];
  trim(r);
  return r;
}

// Coefficients of the interpolant through (x_k, v_k), Newton form.
inline Poly interpolate(const std::vector<Fe>& xs, const std::vector<Fe>& vs) {
  std::size_t n = xs.size();
  if (n == 0) return {};
  std::vector<Fe> dd = vs;
  for (std::size_t j = 1; j < n; ++j)
    for (std::size_t i = n - 1; i >= j; --i) {
      dd[i] = (dd[i] - dd[i - 1]) / (xs[i] - xs[i - j]);
      if (i == j) break;
    }
  Poly r = {dd[n - 1]};
  for (std::size_t k = n - 1; k-- > 0;) {
    r = mul(r, Poly{-xs[k], Fe::one(xs[k].field())});
    if (r.empty()) r = {Fe::zero(xs[k].field())};
    r[0] += dd[k];
  }
  trim(r);
  return r;
}

// W[j][k] = coefficient of y^j in the Lagrange basis polynomial for node k,
// nodes 0..D. C_j = sum_k W[j][k] * C(node k).
inline const std::vector<std::vector<Fe>>& vandermonde_inverse(const FieldConfig& f, int D) {
  static std::mutex mu;
  static std::map<std::pair<u64, int>, std::vector<std::vector<Fe>>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto key = std::make_pair(f.modulus, D);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  if (!f.has_elements(static_cast<u64>(D) + 1))
    fail(ErrorKind::FieldTooSmall, "need " + std::to_string(D + 1) + " distinct points, field has " + std::to_string(f.modulus));
  std::vector<std::vector<Fe>> W(static_cast<std::size_t>(D + 1), std::vector<Fe>(static_cast<std::size_t>(D + 1), Fe::zero(f)));
  for (int k = 0; k <= D; ++k) {
    Poly L = {Fe::one(f)};
    Fe den = Fe::one(f);
    for (int m = 0; m <= D; ++m) {
      if (m == k) continue;
      L = mul(L, Poly{Fe::from_int(f, -m), Fe::one(f)});
      den *= Fe::from_int(f, k - m);
    }
    Fe inv = den.inv();
    for (int j = 0; j < static_cast<int>(L.size()); ++j)
      W[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)] = L[static_cast<std::size_t>(j)] * inv;
  }
  return cache.emplace(key, std::move(W)).first->second;
}

// Squarefree decomposition (Musser): f = c * prod a_i^i. Valid in
// characteristic zero and whenever deg f < p.
inline std::vector<std::pair<Poly, int>> squarefree(const Poly& f) {
  std::vector<std::pair<Poly, int>> out;
  Poly c = gcd(f, derivative(f));
  Poly w = divmod(f, c).first;
  int i = 1;
  while (deg(w) > 0) {
    Poly y = gcd(w, c);
    Poly z = divmod(w, y).first;
    if (deg(z) > 0) out.emplace_back(monic(z), i);
    ++i;
    w = y;
    c = divmod(c, y).first;
  }
  return out;
}

// Roots of a squarefree polynomial over F_p, p odd: distinct-degree step
// gcd(f, y^p - y), then equal-degree splitting into linear factors.
inline std::vector<Fe> roots_squarefree_prime(const Poly& f, u64 seed = 0x5eed) {
  std::vector<Fe> roots;
  if (deg(f) < 1) return roots;
  const FieldConfig F = f[0].field();
  u64 p = F.modulus;
  Poly x = {Fe::zero(F), Fe::one(F)};
  Poly xp = powmod(x, p, f);
  Poly g = gcd(f, sub(xp, x));
  Rng rng(seed, "edf");
  std::vector<Poly> stack = {g};
  while (!stack.empty()) {
    Poly h = std::move(stack.back());
    stack.pop_back();
    if (deg(h) < 1) continue;
    if (deg(h) == 1) {
      roots.push_back(-h[0] / h[1]);
      continue;
    }
    if (p == 2) {
      // only 0 and 1 can be roots
      for (u64 v = 0; v < 2; ++v)
        if (eval(h, Fe::from_u64(F, v)).is_zero()) roots.push_back(Fe::from_u64(F, v));
      continue;
    }
    for (int attempt = 0; attempt < 200; ++attempt) {
      Fe delta = Fe::from_u64(F, rng.below(p));
      Poly t = powmod(Poly{delta, Fe::one(F)}, (p - 1) / 2, h);
      t = sub(t, Poly{Fe::one(F)});
      Poly d = gcd(h, t);
      if (deg(d) > 0 && deg(d) < deg(h)) {
        stack.push_back(divmod(h, d).first);
        stack.push_back(d);
        break;
      }
    }
  }
  std::sort(roots.begin(), roots.end());
  return roots;
}

namespace detail {

inline mpz_class zpoly_eval(const std::vector<mpz_class>& a, const mpz_class& x, const mpz_class& m) {
  mpz_class r = 0;
  for (std::size_t i = a.size(); i-- > 0;) {
    r = r * x + a[i];
    if (m != 0) r %= m;
  }
  if (m != 0 && r < 0) r += m;
  return r;
}

// Wang's rational reconstruction: u/v = r (mod m), |u|, v <= sqrt(m/2).
inline bool ratrecon(const mpz_class& r, const mpz_class& m, mpq_class& out) {
  mpz_class N;
  mpz_class half = m / 2;
  mpz_sqrt(N.get_mpz_t(), half.get_mpz_t());
  mpz_class r0 = m, r1 = r, t0 = 0, t1 = 1;
  while (r1 > N) {
    mpz_class q = r0 / r1;
    mpz_class tmp = r0 - q * r1;
    r0 = r1;
    r1 = tmp;
    tmp = t0 - q * t1;
    t0 = t1;
    t1 = tmp;
  }
  if (t1 == 0 || abs(t1) > N) return false;
  mpz_class g;
  mpz_gcd(g.get_mpz_t(), r1.get_mpz_t(), t1.get_mpz_t());
  if (g != 1) return false;
  out = mpq_class(r1, t1);
  out.canonicalize();
  return true;
}

}  // namespace detail

// Rational roots of a squarefree polynomial with rational coefficients:
// roots modulo a prime not dividing the leading coefficient or the
// discriminant, Newton-lifted p-adically, then rationally reconstructed and
// checked exactly.
inline std::vector<Fe> roots_squarefree_rational(const Poly& f) {
  std::vector<Fe> roots;
  if (deg(f) < 1) return roots;
  const FieldConfig Q = FieldConfig::rationals();
  mpz_class L = 1;
  for (const Fe& c : f) mpz_lcm(L.get_mpz_t(), L.get_mpz_t(), c.rational().get_den_mpz_t());
  std::vector<mpz_class> a;
  for (const Fe& c : f) a.push_back(mpz_class(c.rational() * L));
  mpz_class G = 0;
  for (auto& c : a) mpz_gcd(G.get_mpz_t(), G.get_mpz_t(), c.get_mpz_t());
  for (auto& c : a) c /= G;
  if (a[0] == 0) {
    roots.push_back(Fe::zero(Q));
    a.erase(a.begin());
  }
  if (a.size() <= 1) return roots;
  if (a.size() == 2) {
    roots.push_back(Fe::from_mpq(Q, mpq_class(-a[0], a[1])));
    std::sort(roots.begin(), roots.end());
    return roots;
  }
  mpz_class U = abs(a.front()), V = abs(a.back());
  mpz_class B = std::max(U, V);
  mpz_class need = 2 * B * B + 1;
  std::vector<mpz_class> da;
  for (std::size_t i = 1; i < a.size(); ++i) da.push_back(a[i] * static_cast<unsigned long>(i));
  u64 p = (u64(1) << 31) - 1;
  for (;; p -= 2) {
    if (!is_prime_u64(p)) continue;
    FieldConfig F = FieldConfig::prime(p);
    Poly ap;
    for (auto& c : a) ap.push_back(Fe::from_mpz(F, c));
    if (ap.back().is_zero()) continue;
    trim(ap);
    if (deg(gcd(ap, derivative(ap))) > 0) continue;
    mpz_class P = static_cast<unsigned long>(p);
    for (const Fe& rho0 : roots_squarefree_prime(ap)) {
      mpz_class rho = static_cast<unsigned long>(rho0.residue());
      mpz_class M = P;
      while (M < need) {
        mpz_class M2 = M * M;
        mpz_class fv = detail::zpoly_eval(a, rho, M2);
        mpz_class dv = detail::zpoly_eval(da, rho, M2);
        mpz_class inv;
        if (mpz_invert(inv.get_mpz_t(), dv.get_mpz_t(), M2.get_mpz_t()) == 0) break;
        rho = (rho - fv * inv) % M2;
        if (rho < 0) rho += M2;
        M = M2;
      }
      mpq_class cand;
      if (!detail::ratrecon(rho, M, cand)) continue;
      Fe c = Fe::from_mpq(Q, cand);
      if (eval(f, c).is_zero()) roots.push_back(c);
    }
    break;
  }
  std::sort(roots.begin(), roots.end());
  return roots;
}

// All base-field roots with multiplicity.
inline std::vector<std::pair<Fe, int>> roots(const Poly& f0) {
  Poly f = f0;
  trim(f);
  if (f.empty()) fail(ErrorKind::ZeroPolynomial, "roots of the zero polynomial");
  std::vector<std::pair<Fe, int>> out;
  if (deg(f) == 0) return out;
  const FieldConfig F = f[0].field();
  if (F.is_prime() && static_cast<u64>(deg(f)) >= F.modulus)
    fail(ErrorKind::FieldTooSmall, "degree not below the characteristic");
  for (auto& [part, mult] : squarefree(f)) {
    std::vector<Fe> rs = F.is_prime() ? roots_squarefree_prime(part) : roots_squarefree_rational(part);
    for (const Fe& r : rs) out.emplace_back(r, mult);
  }
  std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
  return out;
}

}  // namespace forge::uni
