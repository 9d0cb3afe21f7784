#pragma once

#include <cmath>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "forge/dense.hpp"
#include "forge/rng.hpp"

namespace forge {

// Universe size l = q^2 <= kDesignConst * m^2 (q < 2m for the prime powers used).
inline constexpr long long kDesignConst = 4;

// GF(q), q = p^k small, elements 0..q-1 as base-p digit vectors.
class SmallField {
 public:
  explicit SmallField(int q) : q_(q) {
    int p = 0;
    for (int c = 2; c <= q; ++c)
      if (q % c == 0) {
        p = c;
        break;
      }
    int k = 0;
    for (int t = q; t > 1; t /= p) {
      if (t % p) fail(ErrorKind::InvalidArgument, std::to_string(q) + " is not a prime power");
      ++k;
    }
    p_ = p;
    k_ = k;
    add_.assign(static_cast<std::size_t>(q * q), 0);
    mul_.assign(static_cast<std::size_t>(q * q), 0);
    for (int a = 0; a < q; ++a)
      for (int b = 0; b < q; ++b) {
        std::vector<int> da = digits(a), db = digits(b), s(static_cast<std::size_t>(k));
        for (int i = 0; i < k; ++i) s[static_cast<std::size_t>(i)] = (da[static_cast<std::size_t>(i)] + db[static_cast<std::size_t>(i)]) % p;
        add_[static_cast<std::size_t>(a * q + b)] = undigits(s);
      }
    // first monic irreducible of degree k, by trial division
    std::vector<int> modpoly;
    for (int cand = 0; cand < q && modpoly.empty(); ++cand) {
      std::vector<int> c = digits(cand);
      c.push_back(1);
      if (irreducible(c)) modpoly = c;
    }
    if (k == 1) modpoly = {0, 1};
    for (int a = 0; a < q; ++a)
      for (int b = 0; b < q; ++b) mul_[static_cast<std::size_t>(a * q + b)] = polymul(a, b, modpoly);
  }
  int size() const { return q_; }
  int add(int a, int b) const { return add_[static_cast<std::size_t>(a * q_ + b)]; }
  int mul(int a, int b) const { return mul_[static_cast<std::size_t>(a * q_ + b)]; }

 private:
  std::vector<int> digits(int a) const {
    std::vector<int> d(static_cast<std::size_t>(k_ == 0 ? 1 : k_), 0);
    for (int i = 0; i < k_; ++i) {
      d[static_cast<std::size_t>(i)] = a % p_;
      a /= p_;
    }
    return d;
  }
  int undigits(const std::vector<int>& d) const {
    int a = 0;
    for (int i = k_ - 1; i >= 0; --i) a = a * p_ + d[static_cast<std::size_t>(i)];
    return a;
  }
  // reduce a coefficient vector modulo the monic polynomial md
  std::vector<int> reduce(std::vector<int> a, const std::vector<int>& md) const {
    int dm = static_cast<int>(md.size()) - 1;
    for (int i = static_cast<int>(a.size()) - 1; i >= dm; --i) {
      int c = a[static_cast<std::size_t>(i)];
      if (!c) continue;
      for (int j = 0; j <= dm; ++j) {
        auto& t = a[static_cast<std::size_t>(i - dm + j)];
        t = ((t - c * md[static_cast<std::size_t>(j)]) % p_ + p_) % p_;
      }
    }
    a.resize(static_cast<std::size_t>(dm));
    return a;
  }
  bool irreducible(const std::vector<int>& md) const {
    int dm = static_cast<int>(md.size()) - 1;
    for (int e = 1; 2 * e <= dm; ++e) {
      int count = 1;
      for (int i = 0; i < e; ++i) count *= p_;
      for (int c = 0; c < count; ++c) {
        std::vector<int> g(static_cast<std::size_t>(e + 1), 0);
        int t = c;
        for (int i = 0; i < e; ++i) {
          g[static_cast<std::size_t>(i)] = t % p_;
          t /= p_;
        }
        g[static_cast<std::size_t>(e)] = 1;
        std::vector<int> r = reduce(md, g);
        bool zero = true;
        for (int x : r) zero = zero && x == 0;
        if (zero) return false;
      }
    }
    return true;
  }
  int polymul(int a, int b, const std::vector<int>& md) const {
    std::vector<int> da = digits(a), db = digits(b), pr(static_cast<std::size_t>(2 * k_), 0);
    for (int i = 0; i < k_; ++i)
      for (int j = 0; j < k_; ++j) {
        auto& t = pr[static_cast<std::size_t>(i + j)];
        t = (t + da[static_cast<std::size_t>(i)] * db[static_cast<std::size_t>(j)]) % p_;
      }
    return undigits(reduce(pr, md));
  }

  int q_ = 0, p_ = 0, k_ = 0;
  std::vector<int> add_, mul_;
};

inline bool is_prime_power(int q) {
  if (q < 2) return false;
  int p = 2;
  while (q % p) ++p;
  while (q % p == 0) q /= p;
  return q == 1;
}

struct Design {
  int n = 0, m = 0, l = 0, q = 0, dprime = 0;
  std::vector<std::vector<int>> sets;  // 0-based universe elements, sorted
};

// Reed-Solomon design: S_i = {(a, p_i(a)) : a among the first m points of F_q},
// p_i the i-th polynomial of degree < d' (base-q digits of i), element
// (a, b) numbered a*q + b.
inline Design nw_design(int n, int m) {
  if (n < 2 || m < 2) fail(ErrorKind::ParameterViolation, "design needs n, m >= 2");
  if (m < 63 && static_cast<long long>(n) >= (1LL << m)) fail(ErrorKind::ParameterViolation, "n must be below 2^m");
  Design D;
  D.n = n;
  D.m = m;
  D.q = m;
  while (!is_prime_power(D.q)) ++D.q;
  D.dprime = std::max(2, static_cast<int>(std::ceil(std::log(static_cast<double>(n)) / std::log(static_cast<double>(D.q)) - 1e-12)));
  D.l = D.q * D.q;
  SmallField F(D.q);
  for (int i = 0; i < n; ++i) {
    std::vector<int> coef;
    for (int t = i, j = 0; j < D.dprime; ++j, t /= D.q) coef.push_back(t % D.q);
    std::vector<int> S;
    for (int a = 0; a < m; ++a) {
      int v = 0;
      for (int j = D.dprime - 1; j >= 0; --j) v = F.add(F.mul(v, a), coef[static_cast<std::size_t>(j)]);
      S.push_back(a * D.q + v);
    }
    std::sort(S.begin(), S.end());
    D.sets.push_back(S);
  }
  return D;
}

inline int floor_log2(long long n) {
  int r = 0;
  while ((2LL << r) <= n) ++r;
  return r;
}

// Multilinear polynomial given by all 2^m coefficients; bit i of the index
// is variable i.
struct ExplicitPoly {
  FieldConfig field;
  int m = 0;
  std::vector<Fe> coeffs;

  Fe eval(const std::vector<Fe>& y) const {
    std::vector<Fe> t = coeffs;
    // fold out the top variable each round
    for (int i = m - 1; i >= 0; --i) {
      std::size_t half = std::size_t{1} << i;
      for (std::size_t s = 0; s < half; ++s) t[s] = t[s] + y[static_cast<std::size_t>(i)] * t[s + half];
    }
    return t[0];
  }
  int degree() const {
    int d = 0;
    for (std::size_t s = 0; s < coeffs.size(); ++s)
      if (!coeffs[s].is_zero()) d = std::max(d, __builtin_popcountll(s));
    return d;
  }
};

inline ExplicitPoly explicit_poly(const FieldConfig& f, int m) {
  if (m < 0 || m > 24) fail(ErrorKind::InvalidArgument, "explicit polynomials hold at most 24 variables");
  return {f, m, std::vector<Fe>(std::size_t{1} << m, Fe::zero(f))};
}

inline ExplicitPoly random_full_support(const FieldConfig& f, int m, u64 seed) {
  ExplicitPoly P = explicit_poly(f, m);
  Rng rng(seed, "explicit_poly");
  for (auto& c : P.coeffs) c = Fe::from_u64(f, 1 + rng.below(97));
  return P;
}

inline ExplicitPoly parse_table(const std::string& text, const FieldConfig& f) {
  std::istringstream is(text);
  std::string line, kw;
  int lineno = 0;
  ExplicitPoly P;
  bool have = false;
  while (std::getline(is, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::string a, b;
    if (!(ls >> a)) continue;
    if (a[0] == '#') continue;
    if (!(ls >> b)) fail(ErrorKind::SyntaxError, "expected two fields", lineno);
    if (!have) {
      if (a != "m") fail(ErrorKind::SyntaxError, "table must start with 'm <count>'", lineno);
      P = explicit_poly(f, std::stoi(b));
      have = true;
      continue;
    }
    unsigned long long mask = std::stoull(a);
    if (mask >= P.coeffs.size()) fail(ErrorKind::SyntaxError, "bitmask beyond 2^m", lineno);
    P.coeffs[mask] = Fe::parse(f, b);
  }
  if (!have) fail(ErrorKind::SyntaxError, "empty table", lineno);
  return P;
}

inline std::string emit_table(const ExplicitPoly& P) {
  std::ostringstream os;
  os << "m " << P.m << "\n";
  for (std::size_t s = 0; s < P.coeffs.size(); ++s)
    if (!P.coeffs[s].is_zero()) os << s << " " << P.coeffs[s].str() << "\n";
  return os.str();
}

// Streams (f(y|S_1), ..., f(y|S_n)) for y in T^l, T = {0..Dd}. Coordinates
// outside the union of the sets never change a point, so only the union is
// enumerated; point k has digits k_j (base |T|) and y_{u_j} = sum_{i<=j} k_i
// mod |T|, which moves every coordinate from the second point on.
class HittingSet {
 public:
  HittingSet(const ExplicitPoly& f, const Design& design, int D, int d)
      : f_(f), design_(design), D_(D), d_(d), tsize_(static_cast<u64>(D) * static_cast<u64>(d) + 1) {
    if (f.m != design.m) fail(ErrorKind::ArityMismatch, "table arity differs from the design's set size");
    const FieldConfig& fc = f.field;
    if (fc.is_prime() && fc.modulus <= tsize_ - 1) fail(ErrorKind::FieldTooSmall, "p <= D*d");
    std::vector<char> in(static_cast<std::size_t>(design.l), 0);
    for (const auto& S : design.sets)
      for (int e : S) in[static_cast<std::size_t>(e)] = 1;
    for (int e = 0; e < design.l; ++e)
      if (in[static_cast<std::size_t>(e)]) union_.push_back(e);
    digits_.assign(union_.size(), 0);
  }
  u64 grid_size() const { return tsize_; }
  std::size_t free_coords() const { return union_.size(); }
  // |T|^|U| when it fits in 64 bits, 0 otherwise
  u64 total_points() const {
    unsigned __int128 t = 1;
    for (std::size_t i = 0; i < union_.size(); ++i) {
      t *= tsize_;
      if (t > ~u64{0}) return 0;
    }
    return static_cast<u64>(t);
  }
  bool next(std::vector<Fe>& point) {
    if (done_) return false;
    const FieldConfig& fc = f_.field;
    std::vector<Fe> y(static_cast<std::size_t>(design_.l), Fe::zero(fc));
    u64 acc = 0;
    for (std::size_t j = 0; j < union_.size(); ++j) {
      acc = (acc + digits_[j]) % tsize_;
      y[static_cast<std::size_t>(union_[j])] = Fe::from_u64(fc, acc);
    }
    point.clear();
    std::vector<Fe> sub(static_cast<std::size_t>(design_.m), Fe::zero(fc));
    for (const auto& S : design_.sets) {
      for (std::size_t i = 0; i < S.size(); ++i) sub[i] = y[static_cast<std::size_t>(S[i])];
      point.push_back(f_.eval(sub));
    }
    ++emitted_;
    std::size_t j = 0;
    while (j < digits_.size() && ++digits_[j] == tsize_) digits_[j++] = 0;
    if (j == digits_.size()) done_ = true;
    return true;
  }
  bool exhausted() const { return done_; }
  u64 emitted() const { return emitted_; }

 private:
  ExplicitPoly f_;
  Design design_;
  int D_, d_;
  u64 tsize_;
  std::vector<int> union_;
  std::vector<u64> digits_;
  bool done_ = false;
  u64 emitted_ = 0;
};

struct PitResult {
  bool zero = false;        // no witness found
  bool definitive = false;  // zero verdict covers every point of the set
  std::optional<std::vector<Fe>> witness;
  u64 points = 0;
};

inline PitResult pit_hitset(const Circuit& C, HittingSet H, u64 limit = 0) {
  PitResult r;
  std::vector<Fe> pt;
  while ((limit == 0 || r.points < limit) && H.next(pt)) {
    if (static_cast<int>(pt.size()) != C.nvars()) fail(ErrorKind::ArityMismatch, "circuit arity differs from the design size");
    ++r.points;
    if (!evaluate1(C, pt).is_zero()) {
      r.witness = pt;
      r.definitive = true;
      return r;
    }
  }
  r.zero = true;
  r.definitive = H.exhausted();
  return r;
}

// Random points from {0..d}^n, or every point when exhaustive.
inline PitResult pit_sz(const Circuit& C, int d, int trials, u64 seed, bool exhaustive = false) {
  const FieldConfig& f = C.field();
  PitResult r;
  int n = C.nvars();
  u64 s = static_cast<u64>(d) + 1;
  if (f.is_prime()) s = std::min<u64>(s, f.modulus);
  std::vector<Fe> pt(static_cast<std::size_t>(n), Fe::zero(f));
  if (exhaustive) {
    std::vector<u64> dg(static_cast<std::size_t>(n), 0);
    while (true) {
      for (int v = 0; v < n; ++v) pt[static_cast<std::size_t>(v)] = Fe::from_u64(f, dg[static_cast<std::size_t>(v)]);
      ++r.points;
      if (!evaluate1(C, pt).is_zero()) {
        r.witness = pt;
        r.definitive = true;
        return r;
      }
      int j = 0;
      while (j < n && ++dg[static_cast<std::size_t>(j)] == s) dg[static_cast<std::size_t>(j++)] = 0;
      if (j == n) break;
    }
    r.zero = true;
    r.definitive = true;
    return r;
  }
  Rng rng(seed, "pit_sz");
  for (int t = 0; t < trials; ++t) {
    for (int v = 0; v < n; ++v) pt[static_cast<std::size_t>(v)] = Fe::from_u64(f, rng.below(s));
    ++r.points;
    if (!evaluate1(C, pt).is_zero()) {
      r.witness = pt;
      r.definitive = true;
      return r;
    }
  }
  r.zero = true;
  return r;
}

// Zeros of C on S^n, S = {0..s-1}.
inline u64 count_zeros(const Circuit& C, u64 s) {
  const FieldConfig& f = C.field();
  int n = C.nvars();
  std::vector<u64> dg(static_cast<std::size_t>(n), 0);
  std::vector<Fe> pt(static_cast<std::size_t>(n), Fe::zero(f));
  u64 zeros = 0;
  while (true) {
    for (int v = 0; v < n; ++v) pt[static_cast<std::size_t>(v)] = Fe::from_u64(f, dg[static_cast<std::size_t>(v)]);
    if (evaluate1(C, pt).is_zero()) ++zeros;
    int j = 0;
    while (j < n && ++dg[static_cast<std::size_t>(j)] == s) dg[static_cast<std::size_t>(j++)] = 0;
    if (j == n) break;
  }
  return zeros;
}

// f(y|S) as a gate in dst; y_e is input y_base + e.
inline int explicit_gate(Circuit& dst, const ExplicitPoly& f, const std::vector<int>& S, int y_base) {
  std::vector<int> terms;
  for (std::size_t s = 0; s < f.coeffs.size(); ++s) {
    if (f.coeffs[s].is_zero()) continue;
    std::vector<int> kids{dst.constant(f.coeffs[s])};
    for (int i = 0; i < f.m; ++i)
      if (s >> i & 1) kids.push_back(dst.input(y_base + S[static_cast<std::size_t>(i)]));
    terms.push_back(dst.mul(kids));
  }
  return terms.empty() ? dst.constant(Fe::zero(f.field)) : dst.add(terms);
}

// Q_j(x, y) = q(f(y|S_1), .., f(y|S_j), x_{j+1}, .., x_n) over x_1..x_n, y_1..y_l.
inline Circuit hybrid(const Circuit& q, const ExplicitPoly& f, const Design& design, int j) {
  int n = q.nvars();
  Circuit H(q.field(), n + design.l);
  std::vector<int> vg(static_cast<std::size_t>(n), -1);
  for (int i = 0; i < j; ++i) vg[static_cast<std::size_t>(i)] = explicit_gate(H, f, design.sets[static_cast<std::size_t>(i)], n);
  H.add_output(embed_output(H, q, vg));
  return H;
}

struct HybridResult {
  int index = 0;                    // Q_index nonzero, Q_{index+1} zero
  std::vector<std::optional<Fe>> fixed;  // values for variables other than x_{index+1} and y|S_{index+1}
  std::string zero_test;
};

inline bool exact_zero(const Circuit& C, const Budget& budget, std::string& mode) {
  try {
    mode = "oracle";
    return expand(C, budget).is_zero();
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::BudgetExceeded) throw;
  }
  mode = "exhaustive";
  return pit_sz(C, static_cast<int>(formal_degree(C)), 0, 0, true).zero;
}

inline HybridResult hybrid_locate(const Circuit& q, const ExplicitPoly& f, const Design& design, u64 seed, const Budget& budget = {}) {
  int n = q.nvars();
  if (n != design.n) fail(ErrorKind::ArityMismatch, "q arity differs from the design count");
  HybridResult R;
  if (exact_zero(q, budget, R.zero_test)) fail(ErrorKind::PreconditionFailed, "q is identically zero");
  if (!exact_zero(hybrid(q, f, design, n), budget, R.zero_test)) fail(ErrorKind::PreconditionFailed, "q survives the full substitution");
  int i = 0;
  while (i + 1 < n && !exact_zero(hybrid(q, f, design, i + 1), budget, R.zero_test)) ++i;
  R.index = i;
  // fix everything except x_{i+1} and y|S_{i+1}, keeping Q_i nonzero
  Circuit Qi = hybrid(q, f, design, i);
  int total = Qi.nvars();
  std::vector<char> keep(static_cast<std::size_t>(total), 0);
  keep[static_cast<std::size_t>(i)] = 1;
  for (int e : design.sets[static_cast<std::size_t>(i)]) keep[static_cast<std::size_t>(n + e)] = 1;
  const FieldConfig& fc = q.field();
  Rng rng(seed, "hybrid_locate");
  u64 grid = static_cast<u64>(2 * std::max<long long>(1, formal_degree(Qi)) + 1);
  if (fc.is_prime()) grid = std::min<u64>(grid, fc.modulus);
  for (int trial = 0; trial < 64; ++trial) {
    std::vector<std::optional<Fe>> fix(static_cast<std::size_t>(total));
    for (int v = 0; v < total; ++v) {
      if (keep[static_cast<std::size_t>(v)]) continue;
      Fe val = trial == 0 ? Fe::zero(fc) : Fe::from_u64(fc, rng.below(grid));
      fix[static_cast<std::size_t>(v)] = val;
    }
    Circuit R2(fc, total);
    std::vector<int> vg(static_cast<std::size_t>(total), -1);
    for (int v = 0; v < total; ++v)
      if (fix[static_cast<std::size_t>(v)]) vg[static_cast<std::size_t>(v)] = R2.constant(*fix[static_cast<std::size_t>(v)]);
    R2.add_output(embed_output(R2, Qi, vg));
    std::string mode;
    if (!exact_zero(R2, budget, mode)) {
      R.fixed = fix;
      return R;
    }
  }
  fail(ErrorKind::SearchExhausted, "no assignment keeps the hybrid nonzero");
}

}  // namespace forge
