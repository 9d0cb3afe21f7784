#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "forge/circuit.hpp"
#include "forge/dense.hpp"
#include "forge/rng.hpp"
#include "forge/univariate.hpp"

namespace forge {

// size(homogenize(C, k)) <= kHomogConst * k^2 * size(C) + kHomogConst * (k + 1).
// A binary convolution up to degree k costs at most 3(k+1)(k+2)/2 wires and
// (k+1)(k+2) <= 6k^2 for k >= 1; a sum gate costs (k+1) times its fan-in.
inline constexpr long long kHomogConst = 9;

// Generator members stay within kGenConst * size(P) * r^4 wires.
inline constexpr long long kGenConst = 8;

// Degree-indexed copies of one gate: comps[t] is the gate for the degree-t
// component, -1 when that component is zero.
using Graded = std::vector<int>;

namespace detail {

inline int norm(const Circuit& C, int g) { return (g >= 0 && C.is_zero_const(g)) ? -1 : g; }

inline Graded graded_mul(Circuit& dst, const Graded& a, const Graded& b, int k) {
  Graded r(static_cast<std::size_t>(k + 1), -1);
  std::vector<int> terms;
  for (int t = 0; t <= k; ++t) {
    terms.clear();
    for (int i = 0; i <= t; ++i) {
      int ga = a[static_cast<std::size_t>(i)], gb = b[static_cast<std::size_t>(t - i)];
      if (ga < 0 || gb < 0) continue;
      terms.push_back(dst.mul(ga, gb));
    }
    if (!terms.empty()) r[static_cast<std::size_t>(t)] = norm(dst, dst.add(terms));
  }
  return r;
}

}  // namespace detail

// Strassen homogenization of the cone of `roots` in src, written into dst.
// var_graded[v], when non-empty, gives the components an input stands for
// (default: the variable itself in degree 1). Returns components per gate.
inline std::vector<Graded> strassen(Circuit& dst, const Circuit& src, const std::vector<int>& roots, int k,
                                    const std::vector<Graded>& var_graded = {}) {
  std::vector<char> live = src.reachable_from(roots);
  std::vector<Graded> comp(static_cast<std::size_t>(src.num_gates()));
  std::vector<int> kids;
  for (int g = 0; g < src.num_gates(); ++g) {
    if (!live[static_cast<std::size_t>(g)]) continue;
    const Gate& gt = src.gate(g);
    Graded r(static_cast<std::size_t>(k + 1), -1);
    switch (gt.op) {
      case Op::Input: {
        auto v = static_cast<std::size_t>(gt.var);
        if (v < var_graded.size() && !var_graded[v].empty()) {
          for (int t = 0; t <= k && t < static_cast<int>(var_graded[v].size()); ++t)
            r[static_cast<std::size_t>(t)] = var_graded[v][static_cast<std::size_t>(t)];
        } else if (k >= 1) {
          r[1] = dst.input(gt.var);
        }
        break;
      }
      case Op::Const:
        if (!gt.c.is_zero()) r[0] = dst.constant(gt.c);
        break;
      case Op::Add:
        for (int t = 0; t <= k; ++t) {
          kids.clear();
          for (int c : gt.ch) {
            int x = comp[static_cast<std::size_t>(c)][static_cast<std::size_t>(t)];
            if (x >= 0) kids.push_back(x);
          }
          if (!kids.empty()) r[static_cast<std::size_t>(t)] = detail::norm(dst, dst.add(kids));
        }
        break;
      case Op::Mul:
        r = comp[static_cast<std::size_t>(gt.ch[0])];
        for (std::size_t i = 1; i < gt.ch.size(); ++i) r = detail::graded_mul(dst, r, comp[static_cast<std::size_t>(gt.ch[i])], k);
        break;
    }
    comp[static_cast<std::size_t>(g)] = std::move(r);
  }
  return comp;
}

// H_k[C] via degree-indexed copies; each product gate convolves.
inline Circuit homogenize(const Circuit& C, int k) {
  if (k < 0) fail(ErrorKind::InvalidArgument, "negative degree");
  Circuit out(C.field(), C.nvars());
  auto comp = strassen(out, C, {C.output()}, k);
  int g = comp[static_cast<std::size_t>(C.output())][static_cast<std::size_t>(k)];
  out.add_output(g >= 0 ? g : out.constant(Fe::zero(C.field())));
  return out;
}

// All components H_0..H_k as outputs of one shared circuit.
inline Circuit homog_components(const Circuit& C, int k) {
  Circuit out(C.field(), C.nvars());
  auto comp = strassen(out, C, {C.output()}, k);
  for (int t = 0; t <= k; ++t) {
    int g = comp[static_cast<std::size_t>(C.output())][static_cast<std::size_t>(t)];
    out.add_output(g >= 0 ? g : out.constant(Fe::zero(C.field())));
  }
  return out;
}

// Copy of src's output with every variable v in mask replaced by s * x_v.
inline int scaled_copy(Circuit& dst, const Circuit& src, const Fe& s, const std::vector<char>& mask,
                       std::vector<int> var_gate = {}) {
  var_gate.resize(static_cast<std::size_t>(src.nvars()), -1);
  for (int v = 0; v < src.nvars(); ++v) {
    if (!(static_cast<std::size_t>(v) < mask.size() && mask[static_cast<std::size_t>(v)])) continue;
    int base = var_gate[static_cast<std::size_t>(v)] >= 0 ? var_gate[static_cast<std::size_t>(v)] : dst.input(v);
    var_gate[static_cast<std::size_t>(v)] = s.is_zero() ? dst.constant(s) : (s.is_one() ? base : dst.scale(s, base));
  }
  return embed_output(dst, src, var_gate);
}

// Homogeneous components 0..d (in the masked variables) of src's output,
// each a weighted sum of copies src(t_k * x); D bounds the masked degree.
// Weights sit on the top sum layer, so depth does not grow.
inline std::vector<int> interp_components(Circuit& dst, const Circuit& src, int d, const std::vector<char>& mask, long long D,
                                          const std::vector<int>& var_gate = {}) {
  const FieldConfig& f = src.field();
  std::vector<int> out(static_cast<std::size_t>(d + 1), -1);
  const auto& W = uni::vandermonde_inverse(f, static_cast<int>(D));
  std::vector<int> copies;
  for (long long k = 0; k <= D; ++k) copies.push_back(scaled_copy(dst, src, Fe::from_int(f, k), mask, var_gate));
  for (int m = 0; m <= d && m <= D; ++m) {
    std::vector<std::pair<int, Fe>> terms;
    for (long long k = 0; k <= D; ++k)
      terms.emplace_back(copies[static_cast<std::size_t>(k)], W[static_cast<std::size_t>(m)][static_cast<std::size_t>(k)]);
    out[static_cast<std::size_t>(m)] = detail::norm(dst, dst.lincomb(terms, true));
  }
  return out;
}

// H_{<=d}[C] by scaling interpolation: x -> t*x, take t-coefficients 0..d.
// deg_bound (when >= 0) replaces the formal degree as the number of nodes
// minus one; it must bound the true degree.
inline Circuit truncate_deg(const Circuit& C, int d, long long deg_bound = -1, std::vector<char> mask = {}) {
  if (mask.empty()) mask.assign(static_cast<std::size_t>(C.nvars()), 1);
  long long D = deg_bound >= 0 ? deg_bound : formal_degree(C, mask);
  if (D <= d) return C.single(0);
  const FieldConfig& f = C.field();
  if (!f.has_elements(static_cast<u64>(D) + 1))
    fail(ErrorKind::FieldTooSmall, "truncation needs " + std::to_string(D + 1) + " field elements");
  const auto& W = uni::vandermonde_inverse(f, static_cast<int>(D));
  Circuit out(f, C.nvars());
  std::vector<std::pair<int, Fe>> terms;
  for (long long k = 0; k <= D; ++k) {
    Fe u = Fe::zero(f);
    for (int j = 0; j <= d; ++j) u += W[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)];
    terms.emplace_back(scaled_copy(out, C, Fe::from_int(f, k), mask), u);
  }
  out.add_output(out.lincomb(terms, true));
  return out;
}

namespace detail {

// Gates for C(x, y = k), k = 0..D, inside dst.
inline std::vector<int> y_copies(Circuit& dst, const Circuit& C, int y, long long D) {
  std::vector<int> copies;
  for (long long k = 0; k <= D; ++k) {
    std::vector<int> vg(static_cast<std::size_t>(C.nvars()), -1);
    vg[static_cast<std::size_t>(y)] = dst.constant(Fe::from_int(C.field(), k));
    copies.push_back(embed_output(dst, C, vg));
  }
  return copies;
}

// Flattened (gate, weight) list of sum_k w_k * copies[k]; the constant part
// comes back separately.
inline std::pair<std::vector<std::pair<int, Fe>>, Fe> weighted_terms(const Circuit& dst, const std::vector<int>& copies,
                                                                      const std::vector<Fe>& w) {
  std::map<int, Fe> acc;
  Fe cst = Fe::zero(dst.field());
  // nested (weighted) sums are opened up so every term is a product or a leaf
  std::function<void(int, const Fe&)> put = [&](int g, const Fe& c) {
    auto [h, s] = dst.unscale(g);
    Fe ww = c * s;
    if (dst.gate(h).op == Op::Add) {
      for (int ch : dst.gate(h).ch) put(ch, ww);
      return;
    }
    if (dst.is_const(h)) {
      cst += ww * dst.gate(h).c;
      return;
    }
    auto it = acc.find(h);
    if (it == acc.end())
      acc.emplace(h, ww);
    else
      it->second += ww;
  };
  for (std::size_t k = 0; k < copies.size(); ++k) {
    if (w[k].is_zero()) continue;
    put(copies[k], w[k]);
  }
  std::vector<std::pair<int, Fe>> out;
  for (auto& [g, c] : acc)
    if (!c.is_zero()) out.emplace_back(g, c);
  return {out, cst};
}

}  // namespace detail

// y-coefficients C_0..C_dmax by interpolation at y = 0..D (D the larger of
// dmax and the formal y-degree); weights folded into the top sum layer.
inline std::vector<Circuit> extract_y_coeffs(const Circuit& C, int y, int dmax) {
  if (y < 0 || y >= C.nvars()) fail(ErrorKind::ArityMismatch, "y outside the circuit's variables");
  const FieldConfig& f = C.field();
  long long D = std::max<long long>(dmax, formal_degree_in(C, y));
  if (!f.has_elements(static_cast<u64>(D) + 1))
    fail(ErrorKind::FieldTooSmall, "need " + std::to_string(D + 1) + " interpolation points");
  const auto& W = uni::vandermonde_inverse(f, static_cast<int>(D));
  Circuit shared(f, C.nvars());
  auto copies = detail::y_copies(shared, C, y, D);
  for (int j = 0; j <= dmax; ++j) {
    std::vector<std::pair<int, Fe>> terms;
    for (long long k = 0; k <= D; ++k) terms.emplace_back(copies[static_cast<std::size_t>(k)], W[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)]);
    shared.add_output(shared.lincomb(terms, true));
  }
  std::vector<Circuit> out;
  for (int j = 0; j <= dmax; ++j) out.push_back(shared.single(static_cast<std::size_t>(j)));
  return out;
}

// sum_{i >= j} C(i, j) * C_i(x) * y^(i-j), with each y-power multiplied into
// the product gates just below the top sum.
inline Circuit hasse_derivative_circuit(const Circuit& C, int y, int j) {
  if (j < 0) fail(ErrorKind::InvalidArgument, "negative derivative order");
  const FieldConfig& f = C.field();
  long long Dy = formal_degree_in(C, y);
  Circuit out(f, C.nvars());
  if (j > Dy) {
    out.add_output(out.constant(Fe::zero(f)));
    return out;
  }
  if (j == 0) return C.single(0);
  if (!f.has_elements(static_cast<u64>(Dy) + 1)) fail(ErrorKind::FieldTooSmall, "need more interpolation points");
  const auto& W = uni::vandermonde_inverse(f, static_cast<int>(Dy));
  auto copies = detail::y_copies(out, C, y, Dy);
  int yg = out.input(y);
  std::vector<std::pair<int, Fe>> all;
  for (long long i = j; i <= Dy; ++i) {
    std::vector<Fe> w;
    for (long long k = 0; k <= Dy; ++k) w.push_back(W[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)]);
    auto [terms, cst] = detail::weighted_terms(out, copies, w);
    Fe b = binomial(f, i, j);
    long long e = i - j;
    std::vector<int> ypow(static_cast<std::size_t>(e), yg);
    for (auto& [g, c] : terms) {
      int h = g;
      if (e > 0) {
        std::vector<int> kids;
        if (out.gate(g).op == Op::Mul)
          kids = out.gate(g).ch;
        else
          kids = {g};
        kids.insert(kids.end(), ypow.begin(), ypow.end());
        h = out.mul(kids);
      }
      all.emplace_back(h, c * b);
    }
    if (!cst.is_zero()) {
      int h = e == 0 ? out.constant(Fe::one(f)) : out.mul(ypow);
      all.emplace_back(h, cst * b);
    }
  }
  out.add_output(out.lincomb(all));
  return out;
}

// C(x + c)
inline Circuit translate(const Circuit& C, const std::vector<Fe>& c) {
  if (static_cast<int>(c.size()) != C.nvars()) fail(ErrorKind::ArityMismatch, "shift vector length");
  Circuit out(C.field(), C.nvars());
  std::vector<int> vg(static_cast<std::size_t>(C.nvars()), -1);
  for (int v = 0; v < C.nvars(); ++v)
    if (!c[static_cast<std::size_t>(v)].is_zero())
      vg[static_cast<std::size_t>(v)] = out.add(out.input(v), out.constant(c[static_cast<std::size_t>(v)]));
  auto map = embed(out, C, vg);
  for (int o : C.outputs()) out.add_output(map[static_cast<std::size_t>(o)]);
  return out;
}

inline std::vector<Fe> negated(const std::vector<Fe>& c) {
  std::vector<Fe> r;
  for (const Fe& x : c) r.push_back(-x);
  return r;
}

struct MonicForm {
  Circuit circuit;
  std::vector<Fe> shift;  // a, one entry per variable (0 at y)
  Fe leading_unit;
  int y = 0;
  int trials = 0;
};

// Coefficient of t^r in C(t*a, t) (y gets t), i.e. H_r[C](a, 1).
inline Fe top_form_at(const Circuit& C, int y, const std::vector<Fe>& a, long long r) {
  const FieldConfig& f = C.field();
  long long D = formal_degree(C);
  if (D < r) return Fe::zero(f);
  if (!f.has_elements(static_cast<u64>(D) + 1)) fail(ErrorKind::FieldTooSmall, "need more interpolation points");
  std::vector<Fe> xs, vs;
  for (long long t = 0; t <= D; ++t) {
    Fe tt = Fe::from_int(f, t);
    std::vector<Fe> pt(static_cast<std::size_t>(C.nvars()), Fe::zero(f));
    for (int v = 0; v < C.nvars(); ++v) pt[static_cast<std::size_t>(v)] = v == y ? tt : tt * a[static_cast<std::size_t>(v)];
    xs.push_back(tt);
    vs.push_back(evaluate1(C, pt));
  }
  uni::Poly g = uni::interpolate(xs, vs);
  return static_cast<long long>(g.size()) > r ? g[static_cast<std::size_t>(r)] : Fe::zero(f);
}

// x_i -> x_i + a_i y, a from the grid {0..r}^n, then divide by the y^r
// coefficient. a = 0 is tried first; the budget is 16(r+1) trials.
inline MonicForm make_monic(const Circuit& C0, int y, long long r, u64 seed) {
  const FieldConfig& f = C0.field();
  Circuit C = C0.single(0);
  C.grow_vars(y + 1);
  int n = C.nvars();
  Rng rng(seed, "make_monic");
  long long budget = 16 * (r + 1);
  if (f.is_prime() && static_cast<u64>(r) >= f.modulus) fail(ErrorKind::FieldTooSmall, "grid exceeds field");
  for (long long trial = 0; trial < budget; ++trial) {
    std::vector<Fe> a(static_cast<std::size_t>(n), Fe::zero(f));
    if (trial > 0)
      for (int v = 0; v < n; ++v)
        if (v != y) a[static_cast<std::size_t>(v)] = Fe::from_u64(f, rng.below(static_cast<u64>(r) + 1));
    Fe lu = top_form_at(C, y, a, r);
    if (lu.is_zero()) continue;
    MonicForm m;
    m.shift = a;
    m.leading_unit = lu;
    m.y = y;
    m.trials = static_cast<int>(trial + 1);
    Circuit out(f, n);
    std::vector<int> vg(static_cast<std::size_t>(n), -1);
    int yg = out.input(y);
    for (int v = 0; v < n; ++v)
      if (!a[static_cast<std::size_t>(v)].is_zero()) vg[static_cast<std::size_t>(v)] = out.add(out.input(v), out.scale(a[static_cast<std::size_t>(v)], yg));
    int g = embed_output(out, C, vg);
    out.add_output(out.lincomb({{g, lu.inv()}}, true));
    m.circuit = std::move(out);
    return m;
  }
  fail(ErrorKind::SearchExhausted, "no shift with nonzero top form after " + std::to_string(budget) + " trials; is r the total degree?");
}

// Undo make_monic on a polynomial: x_i -> x_i - a_i y.
inline Circuit unshift_monic(const Circuit& C, const std::vector<Fe>& a, int y) {
  Circuit out(C.field(), C.nvars());
  std::vector<int> vg(static_cast<std::size_t>(C.nvars()), -1);
  int yg = out.input(y);
  for (int v = 0; v < C.nvars() && v < static_cast<int>(a.size()); ++v)
    if (!a[static_cast<std::size_t>(v)].is_zero()) vg[static_cast<std::size_t>(v)] = out.add(out.input(v), out.scale(-a[static_cast<std::size_t>(v)], yg));
  out.add_output(embed_output(out, C, vg));
  return out;
}

struct GeneratorMember {
  int j = 0;  // derivative order
  Circuit g;
};

struct GeneratorSet {
  Fe alpha;
  int d = 0;
  int y = 0;
  std::vector<GeneratorMember> members;
  std::vector<Fe> h0;  // H_0[P^{(j)}(x, alpha)], j = 0..d
  // All members live in `pool`; pieces[i][m] is H_m of member i (m = 0..d,
  // -1 when zero) and member_gate[i] its sum.
  Circuit pool;
  std::vector<std::vector<int>> pieces;
  std::vector<int> member_gate;
  std::string zero_test;  // "oracle" or "sz"
  long long max_member_size = 0;
};

// G_y(P, alpha, d): nonzero H_{<=d}[P^{(j)}(x, alpha)] - H_0[...], j = 0..d.
// P^{(j)}(x, alpha) = sum_k u_k P(x, k) (the Hasse circuit with y := alpha,
// whose y-powers fold to constants); truncation interpolates x -> t x.
inline GeneratorSet generator_set(const Circuit& P, int y, const Fe& alpha, int d, const Budget& budget = {}, u64 seed = 0) {
  if (d < 1) fail(ErrorKind::InvalidArgument, "generator sets need d >= 1");
  const FieldConfig& f = P.field();
  GeneratorSet G;
  G.alpha = alpha;
  G.d = d;
  G.y = y;
  G.pool = Circuit(f, P.nvars());
  long long Dy = formal_degree_in(P, y);
  std::vector<char> xmask = all_but(P.nvars(), y);
  long long Dx = formal_degree(P, xmask);
  if (!f.has_elements(static_cast<u64>(std::max(Dx, Dy)) + 1)) fail(ErrorKind::FieldTooSmall, "need more interpolation points");
  const auto& Wy = uni::vandermonde_inverse(f, static_cast<int>(Dy));
  const auto& Wx = uni::vandermonde_inverse(f, static_cast<int>(Dx));
  // U[k][l] = P(l*x, k)
  std::vector<std::vector<int>> U(static_cast<std::size_t>(Dy + 1));
  for (long long k = 0; k <= Dy; ++k) {
    std::vector<int> vg(static_cast<std::size_t>(P.nvars()), -1);
    vg[static_cast<std::size_t>(y)] = G.pool.constant(Fe::from_int(f, k));
    for (long long l = 0; l <= Dx; ++l) U[static_cast<std::size_t>(k)].push_back(scaled_copy(G.pool, P, Fe::from_int(f, l), xmask, vg));
  }
  // zero test: dense oracle when P expands within budget, SZ otherwise
  std::optional<DensePoly> Pd;
  try {
    Pd = expand(P, budget);
    G.zero_test = "oracle";
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::BudgetExceeded) throw;
    G.zero_test = "sz";
  }
  std::map<int, DensePoly> at_alpha;
  if (Pd) at_alpha[y] = DensePoly::constant(f, P.nvars(), alpha);
  Rng rng(seed, "generator_set");
  long long r = std::max<long long>(1, formal_degree(P));
  long long envelope = kGenConst * std::max<long long>(1, metrics(P).size) * r * r * r * r;
  for (int j = 0; j <= d; ++j) {
    if (j > Dy) {
      G.h0.push_back(Fe::zero(f));
      continue;
    }
    std::vector<Fe> u(static_cast<std::size_t>(Dy + 1), Fe::zero(f));
    for (long long k = 0; k <= Dy; ++k)
      for (long long i = j; i <= Dy; ++i)
        u[static_cast<std::size_t>(k)] += binomial(f, i, j) * alpha.pow(static_cast<u64>(i - j)) * Wy[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)];
    std::vector<int> piece(static_cast<std::size_t>(d + 1), -1);
    for (int m = 0; m <= d && m <= Dx; ++m) {
      std::vector<std::pair<int, Fe>> terms;
      for (long long k = 0; k <= Dy; ++k) {
        if (u[static_cast<std::size_t>(k)].is_zero()) continue;
        for (long long l = 0; l <= Dx; ++l)
          terms.emplace_back(U[static_cast<std::size_t>(k)][static_cast<std::size_t>(l)], u[static_cast<std::size_t>(k)] * Wx[static_cast<std::size_t>(m)][static_cast<std::size_t>(l)]);
      }
      piece[static_cast<std::size_t>(m)] = detail::norm(G.pool, G.pool.lincomb(terms, true));
    }
    // H_0 folds to a constant: every x was scaled by zero
    Fe c0 = Fe::zero(f);
    if (piece[0] >= 0) {
      if (!G.pool.is_const(piece[0])) {
        std::vector<Fe> zero(static_cast<std::size_t>(P.nvars()), Fe::zero(f));
        Circuit tmp = G.pool;
        tmp.set_outputs({piece[0]});
        c0 = evaluate1(tmp, zero);
      } else {
        c0 = G.pool.gate(piece[0]).c;
      }
    }
    G.h0.push_back(c0);
    std::vector<int> upper;
    for (int m = 1; m <= d; ++m)
      if (piece[static_cast<std::size_t>(m)] >= 0) upper.push_back(piece[static_cast<std::size_t>(m)]);
    if (upper.empty()) continue;
    int g = G.pool.add(upper);
    bool zero;
    if (Pd) {
      DensePoly Dj = compose_dense(hasse_derivative_dense(*Pd, y, j), at_alpha);
      DensePoly Gj = truncate_dense(Dj, d) - DensePoly::constant(f, P.nvars(), Dj.constant_term());
      zero = Gj.is_zero();
    } else {
      Circuit tmp = G.pool;
      tmp.set_outputs({g});
      long long deg = std::max<long long>(1, formal_degree(tmp));
      u64 bound = static_cast<u64>(2 * deg + 1);
      if (f.is_prime()) bound = std::min<u64>(bound, f.modulus);
      zero = true;
      for (int s = 0; s < 64 && zero; ++s) {
        std::vector<Fe> pt;
        for (int v = 0; v < P.nvars(); ++v) pt.push_back(Fe::from_u64(f, rng.below(bound)));
        if (!evaluate1(tmp, pt).is_zero()) zero = false;
      }
    }
    if (zero) continue;
    piece[0] = -1;
    G.pieces.push_back(piece);
    G.member_gate.push_back(g);
    G.pool.add_output(g);
    GeneratorMember mem;
    mem.j = j;
    mem.g = G.pool.single(G.pool.outputs().size() - 1);
    long long sz = metrics(mem.g).size;
    G.max_member_size = std::max(G.max_member_size, sz);
    if (sz > envelope)
      throw std::logic_error("generator member exceeds c_g*s*r^4: " + std::to_string(sz) + " > " + std::to_string(envelope));
    G.members.push_back(std::move(mem));
  }
  return G;
}

}  // namespace forge
