#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "forge/circuit.hpp"
#include "forge/univariate.hpp"

namespace forge {

using Mono = std::vector<std::uint32_t>;

struct MonoHash {
  std::size_t operator()(const Mono& m) const {
    std::size_t h = 1469598103934665603ULL;
    for (auto e : m) h = (h ^ e) * 1099511628211ULL;
    return h;
  }
};

struct Budget {
  long long max_terms = 200000;
  long long max_degree = 64;
};

inline long long mono_degree(const Mono& m) {
  long long d = 0;
  for (auto e : m) d += e;
  return d;
}

// Sparse polynomial: exponent vector -> nonzero coefficient. The map keeps
// terms in lexicographic order, so equal polynomials have equal maps.
class DensePoly {
 public:
  DensePoly() = default;
  DensePoly(const FieldConfig& f, int n) : field_(f), n_(n) {}

  static DensePoly constant(const FieldConfig& f, int n, const Fe& c) {
    DensePoly p(f, n);
    p.add_term(Mono(static_cast<std::size_t>(n), 0), c);
    return p;
  }
  static DensePoly variable(const FieldConfig& f, int n, int v) {
    DensePoly p(f, n);
    Mono m(static_cast<std::size_t>(n), 0);
    m[static_cast<std::size_t>(v)] = 1;
    p.add_term(m, Fe::one(f));
    return p;
  }

  const FieldConfig& field() const { return field_; }
  int nvars() const { return n_; }
  const std::map<Mono, Fe>& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  bool is_zero() const { return terms_.empty(); }

  void add_term(const Mono& m, const Fe& c) {
    if (c.is_zero()) return;
    auto it = terms_.find(m);
    if (it == terms_.end()) {
      terms_.emplace(m, c);
    } else {
      it->second += c;
      if (it->second.is_zero()) terms_.erase(it);
    }
  }

  Fe coeff(const Mono& m) const {
    auto it = terms_.find(m);
    return it == terms_.end() ? Fe::zero(field_) : it->second;
  }

  Fe constant_term() const { return coeff(Mono(static_cast<std::size_t>(n_), 0)); }

  long long total_degree() const {
    long long d = -1;
    for (const auto& [m, c] : terms_) d = std::max(d, mono_degree(m));
    return d;
  }
  long long degree_in(int v) const {
    long long d = -1;
    for (const auto& [m, c] : terms_) d = std::max(d, static_cast<long long>(m[static_cast<std::size_t>(v)]));
    return d;
  }

  bool operator==(const DensePoly& o) const { return n_ == o.n_ && field_ == o.field_ && terms_ == o.terms_; }
  bool operator!=(const DensePoly& o) const { return !(*this == o); }

  DensePoly operator+(const DensePoly& o) const {
    DensePoly r = *this;
    r.widen(o.n_);
    for (const auto& [m, c] : o.terms_) r.add_term(r.pad(m), c);
    return r;
  }
  DensePoly operator-() const {
    DensePoly r = *this;
    for (auto& [m, c] : r.terms_) c = -c;
    return r;
  }
  DensePoly operator-(const DensePoly& o) const { return *this + (-o); }

  DensePoly scaled(const Fe& s) const {
    DensePoly r(field_, n_);
    if (s.is_zero()) return r;
    for (const auto& [m, c] : terms_) r.terms_.emplace(m, c * s);
    return r;
  }

  DensePoly operator*(const DensePoly& o) const {
    int n = std::max(n_, o.n_);
    DensePoly r(field_, n);
    if (is_zero() || o.is_zero()) return r;
    if (o.terms_.size() == 1 && mono_degree(o.terms_.begin()->first) == 0 && o.n_ <= n_) return scaled(o.terms_.begin()->second);
    if (terms_.size() == 1 && mono_degree(terms_.begin()->first) == 0 && n_ <= o.n_) return o.scaled(terms_.begin()->second);
    std::unordered_map<Mono, Fe, MonoHash> acc;
    acc.reserve(terms_.size() * o.terms_.size());
    Mono m(static_cast<std::size_t>(n), 0);
    for (const auto& [a, ca] : terms_) {
      for (const auto& [b, cb] : o.terms_) {
        std::fill(m.begin(), m.end(), 0);
        for (std::size_t i = 0; i < a.size(); ++i) m[i] += a[i];
        for (std::size_t i = 0; i < b.size(); ++i) m[i] += b[i];
        auto it = acc.find(m);
        if (it == acc.end())
          acc.emplace(m, ca * cb);
        else
          it->second += ca * cb;
      }
    }
    for (auto& [mm, c] : acc)
      if (!c.is_zero()) r.terms_.emplace(mm, std::move(c));
    return r;
  }

  DensePoly pow(unsigned e) const {
    DensePoly r = constant(field_, n_, Fe::one(field_));
    for (unsigned i = 0; i < e; ++i) r = r * *this;
    return r;
  }

  Fe eval(const std::vector<Fe>& pt) const {
    if (static_cast<int>(pt.size()) != n_) fail(ErrorKind::ArityMismatch, "point arity");
    Fe s = Fe::zero(field_);
    for (const auto& [m, c] : terms_) {
      Fe t = c;
      for (std::size_t i = 0; i < m.size(); ++i)
        if (m[i]) t *= pt[i].pow(m[i]);
      s += t;
    }
    return s;
  }

  // Change the number of variables (new ones get exponent 0; dropped ones
  // must be unused).
  DensePoly with_nvars(int n) const {
    DensePoly r(field_, n);
    for (const auto& [m, c] : terms_) {
      Mono mm(static_cast<std::size_t>(n), 0);
      for (std::size_t i = 0; i < m.size(); ++i) {
        if (static_cast<int>(i) >= n) {
          if (m[i]) fail(ErrorKind::InvalidArgument, "dropping a variable that occurs");
          continue;
        }
        mm[i] = m[i];
      }
      r.terms_.emplace(mm, c);
    }
    return r;
  }

  // one "coeff : e1 ... en" line per term in lexicographic order
  std::string text() const {
    std::ostringstream os;
    for (const auto& [m, c] : terms_) {
      os << c.str() << " :";
      for (auto e : m) os << " " << e;
      os << "\n";
    }
    return os.str();
  }

 private:
  void widen(int n) {
    if (n <= n_) return;
    *this = with_nvars(n);
  }
  Mono pad(const Mono& m) const {
    if (static_cast<int>(m.size()) == n_) return m;
    Mono r(static_cast<std::size_t>(n_), 0);
    std::copy(m.begin(), m.end(), r.begin());
    return r;
  }

  FieldConfig field_;
  int n_ = 0;
  std::map<Mono, Fe> terms_;
};

namespace detail {
inline void check_budget(const DensePoly& p, const Budget& b) {
  if (static_cast<long long>(p.size()) > b.max_terms)
    fail(ErrorKind::BudgetExceeded, "terms: " + std::to_string(p.size()) + " > " + std::to_string(b.max_terms));
  if (p.total_degree() > b.max_degree)
    fail(ErrorKind::BudgetExceeded, "degree: " + std::to_string(p.total_degree()) + " > " + std::to_string(b.max_degree));
}
}  // namespace detail

// Expand every output (one DensePoly per output). Intermediate results are
// freed after their last use.
inline std::vector<DensePoly> expand_gates(const Circuit& C, const std::vector<int>& roots, const Budget& budget = {}) {
  int n = C.nvars();
  const FieldConfig& f = C.field();
  std::vector<char> live = C.reachable_from(roots);
  std::vector<int> last_use(static_cast<std::size_t>(C.num_gates()), -1);
  for (int g = 0; g < C.num_gates(); ++g) {
    if (!live[static_cast<std::size_t>(g)]) continue;
    for (int c : C.gate(g).ch) last_use[static_cast<std::size_t>(c)] = g;
  }
  for (int o : roots) last_use[static_cast<std::size_t>(o)] = C.num_gates();
  std::vector<DensePoly> val(static_cast<std::size_t>(C.num_gates()));
  for (int g = 0; g < C.num_gates(); ++g) {
    if (!live[static_cast<std::size_t>(g)]) continue;
    const Gate& gt = C.gate(g);
    DensePoly r;
    switch (gt.op) {
      case Op::Input: r = DensePoly::variable(f, n, gt.var); break;
      case Op::Const: r = DensePoly::constant(f, n, gt.c); break;
      case Op::Add:
        r = val[static_cast<std::size_t>(gt.ch[0])];
        for (std::size_t i = 1; i < gt.ch.size(); ++i) r = r + val[static_cast<std::size_t>(gt.ch[i])];
        break;
      case Op::Mul: {
        // constants first so scaling happens on the small side
        r = val[static_cast<std::size_t>(gt.ch[0])];
        for (std::size_t i = 1; i < gt.ch.size(); ++i) {
          r = r * val[static_cast<std::size_t>(gt.ch[i])];
          detail::check_budget(r, budget);
        }
        break;
      }
    }
    detail::check_budget(r, budget);
    val[static_cast<std::size_t>(g)] = std::move(r);
    for (int c : gt.ch)
      if (last_use[static_cast<std::size_t>(c)] == g) val[static_cast<std::size_t>(c)] = DensePoly();
  }
  std::vector<DensePoly> out;
  for (int o : roots) out.push_back(val[static_cast<std::size_t>(o)]);
  return out;
}

inline std::vector<DensePoly> expand_all(const Circuit& C, const Budget& budget = {}) {
  return expand_gates(C, C.outputs(), budget);
}

inline DensePoly expand(const Circuit& C, const Budget& budget = {}) {
  return expand_gates(C, {C.output()}, budget).at(0);
}

// Circuit for a dense polynomial: a sum of monomial products.
inline int build_dense(Circuit& C, const DensePoly& p, const std::vector<int>& var_gate = {}) {
  std::vector<std::pair<int, Fe>> terms;
  for (const auto& [m, c] : p.terms()) {
    std::vector<int> kids;
    for (std::size_t i = 0; i < m.size(); ++i) {
      int leaf = (i < var_gate.size() && var_gate[i] >= 0) ? var_gate[i] : C.input(static_cast<int>(i));
      for (std::uint32_t e = 0; e < m[i]; ++e) kids.push_back(leaf);
    }
    int g = kids.empty() ? C.constant(Fe::one(p.field())) : C.mul(kids);
    terms.emplace_back(g, c);
  }
  return C.lincomb(terms);
}

inline Circuit circuit_of(const DensePoly& p) {
  Circuit C(p.field(), p.nvars());
  C.add_output(build_dense(C, p));
  return C;
}

inline DensePoly homog_component_dense(const DensePoly& P, long long k) {
  DensePoly r(P.field(), P.nvars());
  for (const auto& [m, c] : P.terms())
    if (mono_degree(m) == k) r.add_term(m, c);
  return r;
}

inline DensePoly truncate_dense(const DensePoly& P, long long d) {
  DensePoly r(P.field(), P.nvars());
  for (const auto& [m, c] : P.terms())
    if (mono_degree(m) <= d) r.add_term(m, c);
  return r;
}

// Same truncation, degree counted only over the variables in mask.
inline DensePoly truncate_dense_in(const DensePoly& P, long long d, const std::vector<char>& mask) {
  DensePoly r(P.field(), P.nvars());
  for (const auto& [m, c] : P.terms()) {
    long long dm = 0;
    for (std::size_t i = 0; i < m.size(); ++i)
      if (i < mask.size() && mask[i]) dm += m[i];
    if (dm <= d) r.add_term(m, c);
  }
  return r;
}

// z^k coefficient of P(.., y + z, ..): sum coeff * C(e, k) * y^(e-k)
inline DensePoly hasse_derivative_dense(const DensePoly& P, int var, long long k) {
  DensePoly r(P.field(), P.nvars());
  for (const auto& [m, c] : P.terms()) {
    long long e = m[static_cast<std::size_t>(var)];
    if (e < k) continue;
    Mono mm = m;
    mm[static_cast<std::size_t>(var)] = static_cast<std::uint32_t>(e - k);
    r.add_term(mm, c * binomial(P.field(), e, k));
  }
  return r;
}

// Substitute dense polynomials for some variables (others unchanged).
inline DensePoly compose_dense(const DensePoly& P, const std::map<int, DensePoly>& sub) {
  int n = P.nvars();
  for (const auto& [v, q] : sub) n = std::max(n, q.nvars());
  DensePoly res(P.field(), n);
  std::map<std::pair<int, std::uint32_t>, DensePoly> powcache;
  auto power = [&](int v, std::uint32_t e) -> const DensePoly& {
    auto key = std::make_pair(v, e);
    auto it = powcache.find(key);
    if (it != powcache.end()) return it->second;
    DensePoly q = sub.at(v).with_nvars(n);
    DensePoly r = e == 0 ? DensePoly::constant(P.field(), n, Fe::one(P.field())) : q.pow(e);
    return powcache.emplace(key, std::move(r)).first->second;
  };
  for (const auto& [m, c] : P.terms()) {
    Mono rest(static_cast<std::size_t>(n), 0);
    DensePoly t = DensePoly::constant(P.field(), n, c);
    for (std::size_t i = 0; i < m.size(); ++i) {
      if (!m[i]) continue;
      if (sub.count(static_cast<int>(i)))
        t = t * power(static_cast<int>(i), m[i]);
      else
        rest[i] = m[i];
    }
    DensePoly mono(P.field(), n);
    mono.add_term(rest, Fe::one(P.field()));
    res = res + t * mono;
  }
  return res;
}

inline DensePoly translate_dense(const DensePoly& P, const std::vector<Fe>& c) {
  std::map<int, DensePoly> sub;
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (c[i].is_zero()) continue;
    int n = P.nvars();
    sub[static_cast<int>(i)] = DensePoly::variable(P.field(), n, static_cast<int>(i)) + DensePoly::constant(P.field(), n, c[i]);
  }
  return compose_dense(P, sub);
}

// Exact quotient P / f, or nothing if f does not divide P. Leading terms in
// lex order; {f} is a Groebner basis of (f), so the reduction is decisive.
inline std::optional<DensePoly> exact_divide(const DensePoly& P, const DensePoly& f) {
  if (f.is_zero()) fail(ErrorKind::ZeroDivisor, "division by the zero polynomial");
  int n = std::max(P.nvars(), f.nvars());
  DensePoly r = P.with_nvars(n);
  DensePoly fd = f.with_nvars(n);
  auto lt = std::prev(fd.terms().end());
  const Mono& lm = lt->first;
  Fe linv = lt->second.inv();
  DensePoly q(P.field(), n);
  while (!r.is_zero()) {
    auto top = std::prev(r.terms().end());
    Mono tm = top->first;
    Mono qm(static_cast<std::size_t>(n), 0);
    for (std::size_t i = 0; i < static_cast<std::size_t>(n); ++i) {
      if (tm[i] < lm[i]) return std::nullopt;
      qm[i] = tm[i] - lm[i];
    }
    Fe qc = top->second * linv;
    q.add_term(qm, qc);
    DensePoly t(P.field(), n);
    t.add_term(qm, qc);
    r = r - t * fd;
  }
  return q;
}

struct Divisibility {
  bool divides = false;
  int multiplicity = 0;  // 0 for a nonzero constant divisor
};

inline Divisibility divides(const DensePoly& f, const DensePoly& P) {
  if (f.is_zero()) fail(ErrorKind::ZeroDivisor, "divisor is zero");
  Divisibility res;
  if (f.total_degree() == 0) {
    res.divides = true;
    return res;
  }
  if (P.is_zero()) fail(ErrorKind::InvalidArgument, "multiplicity in the zero polynomial is unbounded");
  DensePoly cur = P;
  while (true) {
    auto q = exact_divide(cur, f);
    if (!q) break;
    res.multiplicity++;
    cur = std::move(*q);
  }
  res.divides = res.multiplicity > 0;
  return res;
}

// Which single variable a univariate DensePoly uses (-1 if constant).
inline int univariate_var(const DensePoly& p) {
  int v = -1;
  for (const auto& [m, c] : p.terms())
    for (std::size_t i = 0; i < m.size(); ++i)
      if (m[i]) {
        if (v >= 0 && v != static_cast<int>(i)) fail(ErrorKind::InvalidArgument, "polynomial is not univariate");
        v = static_cast<int>(i);
      }
  return v;
}

inline uni::Poly to_uni(const DensePoly& p) {
  int v = univariate_var(p);
  uni::Poly u;
  for (const auto& [m, c] : p.terms()) {
    std::size_t e = v < 0 ? 0 : m[static_cast<std::size_t>(v)];
    if (u.size() <= e) u.resize(e + 1, Fe::zero(p.field()));
    u[e] = c;
  }
  uni::trim(u);
  return u;
}

inline std::vector<std::pair<Fe, int>> univariate_roots(const DensePoly& p) {
  if (p.is_zero()) fail(ErrorKind::ZeroPolynomial, "roots of the zero polynomial");
  return uni::roots(to_uni(p));
}

// P(pt with var := t) as a univariate polynomial in t, recovered from
// evaluations; deg_bound must bound the degree in var.
inline uni::Poly restrict_to_line(const Circuit& C, std::vector<Fe> pt, int var, long long deg_bound) {
  const FieldConfig& f = C.field();
  if (!f.has_elements(static_cast<u64>(deg_bound) + 1)) fail(ErrorKind::FieldTooSmall, "not enough interpolation points");
  std::vector<Fe> xs, vs;
  for (long long k = 0; k <= deg_bound; ++k) {
    pt[static_cast<std::size_t>(var)] = Fe::from_int(f, k);
    xs.push_back(pt[static_cast<std::size_t>(var)]);
    vs.push_back(evaluate1(C, pt));
  }
  return uni::interpolate(xs, vs);
}

}  // namespace forge
