#pragma once

#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "forge/factor.hpp"

namespace forge {

// Sum over {0,1}^m of Q(x, y); the m aux variables trail the nx x-variables.
struct ExpSumPoly {
  Circuit Q;
  int nx = 0;
  int m = 0;
};

inline constexpr int kMaxAux = 20;

inline ExpSumPoly plain_exp_sum(const Circuit& C) { return {C.single(0), C.nvars(), 0}; }

inline ExpSumPoly make_exp_sum(Circuit Q, int nx, int m) {
  if (Q.nvars() > nx + m) fail(ErrorKind::ArityMismatch, "verifier uses more variables than nx + m");
  Q.grow_vars(nx + m);
  return {std::move(Q), nx, m};
}

// E's verifier inside dst: x_v -> x_v, aux i -> input(aux_base + i).
inline int place(Circuit& dst, const ExpSumPoly& E, int aux_base) {
  std::vector<int> vg(static_cast<std::size_t>(E.nx + E.m), -1);
  for (int i = 0; i < E.m; ++i) vg[static_cast<std::size_t>(E.nx + i)] = dst.input(aux_base + i);
  return embed_output(dst, E.Q, vg);
}

namespace detail {

// R|_{a=0} + R|_{a=1}
inline DensePoly sum_out(const DensePoly& R, int a) {
  DensePoly out(R.field(), R.nvars());
  for (const auto& [mono, c] : R.terms()) {
    Mono z = mono;
    z[static_cast<std::size_t>(a)] = 0;
    if (mono[static_cast<std::size_t>(a)] == 0) {
      out.add_term(z, c + c);
    } else {
      out.add_term(z, c);
    }
  }
  return out;
}

inline Fe pow2(const FieldConfig& f, int k) {
  if (f.is_prime() && f.modulus == 2) fail(ErrorKind::CharacteristicDividesPower, "2^-k is undefined in characteristic 2");
  return Fe::from_int(f, 2).pow(static_cast<u64>(std::abs(k)));
}

}  // namespace detail

// The defining sum, taken one aux variable at a time on the expansion.
inline DensePoly exp_sum_expand(const ExpSumPoly& E, const Budget& budget = {}) {
  if (E.m > kMaxAux) fail(ErrorKind::BudgetExceeded, "aux count " + std::to_string(E.m) + " exceeds " + std::to_string(kMaxAux));
  DensePoly R = expand(E.Q, budget).with_nvars(E.nx + E.m);
  for (int i = E.m - 1; i >= 0; --i) {
    R = detail::sum_out(R, E.nx + i);
    detail::check_budget(R, budget);
  }
  return R.with_nvars(E.nx);
}

// Brute-force value at x: 2^m verifier evaluations.
inline Fe exp_sum_eval(const ExpSumPoly& E, const std::vector<Fe>& x) {
  if (static_cast<int>(x.size()) != E.nx) fail(ErrorKind::ArityMismatch, "point has the wrong number of coordinates");
  if (E.m > kMaxAux) fail(ErrorKind::BudgetExceeded, "too many aux variables to enumerate");
  const FieldConfig& f = E.Q.field();
  std::vector<Fe> pt = x;
  pt.resize(static_cast<std::size_t>(E.nx + E.m), Fe::zero(f));
  Fe acc = Fe::zero(f);
  for (u64 mask = 0; mask < (u64{1} << E.m); ++mask) {
    for (int i = 0; i < E.m; ++i) pt[static_cast<std::size_t>(E.nx + i)] = (mask >> i & 1) ? Fe::one(f) : Fe::zero(f);
    acc += evaluate1(E.Q, pt);
  }
  return acc;
}

// 2^{-m2} Q1(x, y) + 2^{-m1} Q2(x, z): the joint cube counts each R_i 2^{m_other} times.
inline ExpSumPoly sum_compose(const ExpSumPoly& E1, const ExpSumPoly& E2) {
  const FieldConfig& f = E1.Q.field();
  if (!(f == E2.Q.field())) fail(ErrorKind::MixedFieldConfig, "exp-sums over different fields");
  int nx = std::max(E1.nx, E2.nx), m = E1.m + E2.m;
  Circuit Q(f, nx + m);
  int g1 = place(Q, E1, nx), g2 = place(Q, E2, nx + E1.m);
  Q.add_output(Q.lincomb({{g1, detail::pow2(f, E2.m).inv()}, {g2, detail::pow2(f, E1.m).inv()}}));
  return {std::move(Q), nx, m};
}

inline ExpSumPoly prod_compose(const ExpSumPoly& E1, const ExpSumPoly& E2) {
  const FieldConfig& f = E1.Q.field();
  if (!(f == E2.Q.field())) fail(ErrorKind::MixedFieldConfig, "exp-sums over different fields");
  int nx = std::max(E1.nx, E2.nx), m = E1.m + E2.m;
  Circuit Q(f, nx + m);
  int g1 = place(Q, E1, nx), g2 = place(Q, E2, nx + E1.m);
  Q.add_output(Q.mul(g1, g2));
  return {std::move(Q), nx, m};
}

// sum_i prod_j y_ij * prod_{i' != i} prod_j (1 - y_i'j) as a tree; y_ij is
// variable 5i + j.
inline Circuit selector_R(const FieldConfig& f, int s) {
  if (s < 1) fail(ErrorKind::InvalidArgument, "selector needs s' >= 1");
  Circuit R(f, 5 * s, false);
  std::vector<int> terms;
  for (int i = 0; i < s; ++i) {
    std::vector<int> kids;
    for (int j = 0; j < 5; ++j) kids.push_back(R.input(5 * i + j));
    for (int o = 0; o < s; ++o) {
      if (o == i) continue;
      for (int j = 0; j < 5; ++j) kids.push_back(R.add(R.constant(1), R.scale(-Fe::one(f), R.input(5 * o + j))));
    }
    terms.push_back(R.mul(kids));
  }
  R.add_output(terms.size() == 1 ? terms[0] : R.add(terms));
  return R;
}

// 2^{-W} R(y) prod_j (sum_i 2^{m_ij} y_ij Q_ij), aux = selector then blocks.
inline ExpSumPoly valiant_step(const std::vector<std::vector<ExpSumPoly>>& blocks) {
  if (blocks.empty()) fail(ErrorKind::ShapeError, "no blocks");
  for (const auto& b : blocks)
    if (b.size() != 5) fail(ErrorKind::ShapeError, "block has " + std::to_string(b.size()) + " entries, expected 5");
  const FieldConfig& f = blocks[0][0].Q.field();
  int s = static_cast<int>(blocks.size());
  int nx = 0, W = 0;
  for (const auto& b : blocks)
    for (const auto& A : b) {
      nx = std::max(nx, A.nx);
      W += A.m;
    }
  int m = 5 * s + W;
  Circuit Q(f, nx + m);
  std::vector<int> vg(static_cast<std::size_t>(5 * s));
  for (int k = 0; k < 5 * s; ++k) vg[static_cast<std::size_t>(k)] = Q.input(nx + k);
  int r = embed_output(Q, selector_R(f, s), vg);
  int base = nx + 5 * s;
  std::vector<std::vector<int>> placed(static_cast<std::size_t>(s), std::vector<int>(5));
  for (int i = 0; i < s; ++i)
    for (int j = 0; j < 5; ++j) {
      const ExpSumPoly& A = blocks[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
      placed[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = place(Q, A, base);
      base += A.m;
    }
  std::vector<int> factors{r};
  for (int j = 0; j < 5; ++j) {
    std::vector<std::pair<int, Fe>> terms;
    for (int i = 0; i < s; ++i) {
      const ExpSumPoly& A = blocks[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
      terms.emplace_back(Q.mul(Q.input(nx + 5 * i + j), placed[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]), detail::pow2(f, A.m));
    }
    factors.push_back(Q.lincomb(terms));
  }
  Q.add_output(Q.lincomb({{Q.mul(factors), detail::pow2(f, W).inv()}}));
  return {std::move(Q), nx, m};
}

// Each z-leaf of the formula B gets a fresh copy of its binding (own aux
// block); sums and products follow sum_compose / prod_compose.
inline ExpSumPoly leaf_substitute(const Circuit& B, const std::vector<ExpSumPoly>& bindings) {
  if (!is_formula(B)) fail(ErrorKind::NotAFormula, "leaf substitution needs a tree; a shared gate would reuse aux variables");
  const FieldConfig& f = B.field();
  int nx = 0;
  for (const auto& E : bindings) nx = std::max(nx, E.nx);
  std::vector<char> live = B.reachable();
  std::vector<std::optional<ExpSumPoly>> val(static_cast<std::size_t>(B.num_gates()));
  int expected_aux = 0;
  for (int g = 0; g < B.num_gates(); ++g) {
    if (!live[static_cast<std::size_t>(g)]) continue;
    const Gate& gt = B.gate(g);
    switch (gt.op) {
      case Op::Input: {
        if (gt.var >= static_cast<int>(bindings.size())) fail(ErrorKind::InvalidArgument, "no binding for z" + std::to_string(gt.var + 1));
        val[static_cast<std::size_t>(g)] = bindings[static_cast<std::size_t>(gt.var)];
        expected_aux += bindings[static_cast<std::size_t>(gt.var)].m;
        break;
      }
      case Op::Const: {
        Circuit c(f, nx);
        c.add_output(c.constant(gt.c));
        val[static_cast<std::size_t>(g)] = ExpSumPoly{std::move(c), nx, 0};
        break;
      }
      case Op::Add:
      case Op::Mul: {
        ExpSumPoly acc = *val[static_cast<std::size_t>(gt.ch[0])];
        for (std::size_t i = 1; i < gt.ch.size(); ++i) {
          const ExpSumPoly& nxt = *val[static_cast<std::size_t>(gt.ch[i])];
          acc = gt.op == Op::Add ? sum_compose(acc, nxt) : prod_compose(acc, nxt);
        }
        for (int c : gt.ch) val[static_cast<std::size_t>(c)].reset();
        val[static_cast<std::size_t>(g)] = std::move(acc);
        break;
      }
    }
  }
  ExpSumPoly out = *val[static_cast<std::size_t>(B.output())];
  if (out.nx < nx) {
    out.Q = [&] {
      Circuit Q(f, nx + out.m);
      Q.add_output(place(Q, out, nx));
      return Q;
    }();
    out.nx = nx;
  }
  if (out.m != expected_aux) throw std::logic_error("aux bookkeeping: " + std::to_string(out.m) + " != " + std::to_string(expected_aux));
  return out;
}

// z-coefficients of E's polynomial: coefficients of the verifier, aux untouched.
inline std::vector<ExpSumPoly> coeff_exp_sums(const ExpSumPoly& E, int z, int dmax) {
  if (z < 0 || z >= E.nx) fail(ErrorKind::ArityMismatch, "z must be an x-variable");
  std::vector<ExpSumPoly> out;
  for (Circuit& c : extract_y_coeffs(E.Q, z, dmax)) out.push_back({std::move(c), E.nx, E.m});
  return out;
}

inline ExpSumPoly hasse_exp_sum(const ExpSumPoly& E, int z, int j) { return {hasse_derivative_circuit(E.Q, z, j), E.nx, E.m}; }

inline std::vector<char> x_mask(const ExpSumPoly& E) {
  std::vector<char> mask(static_cast<std::size_t>(E.nx + E.m), 0);
  for (int v = 0; v < E.nx; ++v) mask[static_cast<std::size_t>(v)] = 1;
  return mask;
}

// H_k in the x-variables only; scaling never touches aux.
inline ExpSumPoly homog_x_exp_sum(const ExpSumPoly& E, int k) {
  std::vector<char> mask = x_mask(E);
  long long D = formal_degree(E.Q, mask);
  Circuit Q(E.Q.field(), E.nx + E.m);
  if (k > D) {
    Q.add_output(Q.constant(Fe::zero(Q.field())));
  } else {
    auto comps = interp_components(Q, E.Q, k, mask, D);
    int g = comps[static_cast<std::size_t>(k)];
    Q.add_output(g >= 0 ? g : Q.constant(Fe::zero(Q.field())));
  }
  return {std::move(Q), E.nx, E.m};
}

inline ExpSumPoly truncate_x_exp_sum(const ExpSumPoly& E, int d) { return {truncate_deg(E.Q, d, -1, x_mask(E)), E.nx, E.m}; }

// Affine change of the x-variables on the verifier: x_v -> x_v + c_v + a_v*y.
inline ExpSumPoly shift_exp_sum(const ExpSumPoly& E, const std::vector<Fe>& c, const std::vector<Fe>& a, int y) {
  const FieldConfig& f = E.Q.field();
  Circuit Q(f, E.nx + E.m);
  std::vector<int> vg(static_cast<std::size_t>(E.nx + E.m), -1);
  for (int v = 0; v < E.nx; ++v) {
    std::vector<std::pair<int, Fe>> t{{Q.input(v), Fe::one(f)}};
    bool moved = false;
    if (v < static_cast<int>(c.size()) && !c[static_cast<std::size_t>(v)].is_zero()) {
      t.emplace_back(Q.constant(Fe::one(f)), c[static_cast<std::size_t>(v)]);
      moved = true;
    }
    if (v < static_cast<int>(a.size()) && !a[static_cast<std::size_t>(v)].is_zero()) {
      t.emplace_back(Q.input(y), a[static_cast<std::size_t>(v)]);
      moved = true;
    }
    if (moved) vg[static_cast<std::size_t>(v)] = Q.lincomb(t);
  }
  Q.add_output(embed_output(Q, E.Q, vg));
  return {std::move(Q), E.nx, E.m};
}

inline ExpSumPoly scale_exp_sum(const ExpSumPoly& E, const Fe& s) {
  Circuit Q(E.Q.field(), E.nx + E.m);
  Q.add_output(Q.lincomb({{embed_output(Q, E.Q, {}), s}}, true));
  return {std::move(Q), E.nx, E.m};
}

struct VnpFactorResult {
  ExpSumPoly factor;
  FactorResult base;
  int leaves = 0;        // z-leaves of the formula B
  long long formula_size = 0;
  bool verified = false;  // exp_sum_expand(factor) equals the factor's dense form
};

// Factor of the polynomial E represents, as an exp-sum: the factorizer run on
// the expansion supplies shifts, roots and A_d circuits; B = prod (y - A_d)
// truncated to (z, y)-degree d is written out as a sum of monomials (a tree),
// generator exp-sums are leaf-substituted, then x-truncated and unshifted.
// Each z-leaf brings E.m aux variables, so only m = 0 or a handful of leaves
// stays enumerable.
inline VnpFactorResult factor_vnp(const ExpSumPoly& E, int y, int d, u64 seed, std::optional<std::vector<int>> subset = std::nullopt,
                                  const Budget& budget = {}) {
  const FieldConfig& f = E.Q.field();
  if (y < 0 || y >= E.nx) fail(ErrorKind::ArityMismatch, "y must be an x-variable");
  VnpFactorResult out;
  DensePoly Pd = exp_sum_expand(E, budget);
  out.base = extract_factor(circuit_of(Pd), y, d, seed, subset, budget);
  const FactorContext& ctx = out.base.context;
  // verifier of the shifted polynomial the roots were lifted from
  ExpSumPoly V = shift_exp_sum(E, {}, ctx.monic.shift, y);
  V = scale_exp_sum(V, ctx.monic.leading_unit.inv());
  if (ctx.level > 0) V = hasse_exp_sum(V, y, ctx.level);
  V = shift_exp_sum(V, ctx.shift.c, {}, y);
  std::vector<char> mask = x_mask(V);
  mask[static_cast<std::size_t>(y)] = 0;
  // B over z (all generators of the chosen roots) and y, as dense
  int T = 0;
  std::vector<int> offset;
  for (int i : out.base.subset) {
    offset.push_back(T);
    T += static_cast<int>(ctx.bundle.states[static_cast<std::size_t>(i)].gens.members.size());
  }
  int nb = T + 1;
  DensePoly Y = DensePoly::variable(f, nb, T);
  DensePoly Bd = DensePoly::constant(f, nb, Fe::one(f));
  std::vector<ExpSumPoly> bindings;
  for (std::size_t s = 0; s < out.base.subset.size(); ++s) {
    const LiftState& S = ctx.bundle.states[static_cast<std::size_t>(out.base.subset[s])];
    DensePoly A = truncate_dense(expand(S.A.single(static_cast<std::size_t>(d - 1)), budget), d);
    std::map<int, DensePoly> ren;
    for (int t = 0; t < S.A.nvars(); ++t) ren.emplace(t, DensePoly::variable(f, nb, offset[s] + t));
    DensePoly Ar = compose_dense(A.with_nvars(std::max(A.nvars(), 1)), ren).with_nvars(nb);
    Bd = truncate_dense(Bd * (Y - Ar), d);
    for (const auto& mem : S.gens.members) {
      // generator: H_1..H_d in x of V^{(j)}(x, alpha)
      Circuit H = hasse_derivative_circuit(V.Q, y, mem.j);
      Circuit Ha(f, V.nx + V.m);
      std::vector<int> vg(static_cast<std::size_t>(V.nx + V.m), -1);
      vg[static_cast<std::size_t>(y)] = Ha.constant(S.alpha);
      Ha.add_output(embed_output(Ha, H, vg));
      Circuit G(f, V.nx + V.m);
      auto comps = interp_components(G, Ha, d, mask, formal_degree(Ha, mask));
      std::vector<int> upper;
      for (int k = 1; k <= d; ++k)
        if (comps[static_cast<std::size_t>(k)] >= 0) upper.push_back(comps[static_cast<std::size_t>(k)]);
      G.add_output(upper.empty() ? G.constant(Fe::zero(f)) : G.add(upper));
      bindings.push_back({std::move(G), V.nx, V.m});
    }
  }
  Circuit yc(f, V.nx);
  yc.add_output(yc.input(y));
  bindings.push_back({std::move(yc), V.nx, 0});
  Circuit Bf(f, nb, false);
  std::vector<int> terms;
  for (const auto& [mono, c] : Bd.terms()) {
    std::vector<int> kids{Bf.constant(c)};
    for (int v = 0; v < nb; ++v)
      for (std::uint32_t e = 0; e < mono[static_cast<std::size_t>(v)]; ++e) {
        kids.push_back(Bf.input(v));
        if (v < T) ++out.leaves;
      }
    terms.push_back(Bf.mul(kids));
  }
  Bf.add_output(terms.empty() ? Bf.constant(Fe::zero(f)) : (terms.size() == 1 ? terms[0] : Bf.add(terms)));
  out.formula_size = metrics(Bf).size;
  ExpSumPoly L = leaf_substitute(Bf, bindings);
  L = truncate_x_exp_sum(L, d);
  L = shift_exp_sum(L, negated(ctx.shift.c), {}, y);
  L = shift_exp_sum(L, {}, negated(ctx.monic.shift), y);
  out.factor = scale_exp_sum(L, out.base.unit.inv());
  if (out.factor.m <= kMaxAux) out.verified = exp_sum_expand(out.factor, budget) == out.base.factor_dense.with_nvars(out.factor.nx);
  return out;
}

// Circuit file with an `aux y<i> ...` header; aux variables move behind the
// x-variables, keeping their listed order.
inline ExpSumPoly parse_exp_sum(const std::string& text) {
  std::vector<int> aux;
  Circuit C = parse_circuit_with(text, [&](const std::vector<std::string>& tok, int line) {
    if (tok[0] != "aux") return false;
    for (std::size_t i = 1; i < tok.size(); ++i) aux.push_back(static_cast<int>(detail::parse_index(tok[i], 'y', line)) - 1);
    return true;
  });
  int n = C.nvars();
  std::vector<int> pos(static_cast<std::size_t>(n), -1);
  for (int a : aux) {
    if (a < 0 || a >= n) fail(ErrorKind::SyntaxError, "aux index outside nvars");
    if (pos[static_cast<std::size_t>(a)] >= 0) fail(ErrorKind::SyntaxError, "aux listed twice");
    pos[static_cast<std::size_t>(a)] = 0;
  }
  int nx = n - static_cast<int>(aux.size());
  int k = 0;
  for (int v = 0; v < n; ++v)
    if (pos[static_cast<std::size_t>(v)] < 0) pos[static_cast<std::size_t>(v)] = k++;
  for (std::size_t i = 0; i < aux.size(); ++i) pos[static_cast<std::size_t>(aux[i])] = nx + static_cast<int>(i);
  Circuit Q(C.field(), n);
  std::vector<int> vg(static_cast<std::size_t>(n));
  for (int v = 0; v < n; ++v) vg[static_cast<std::size_t>(v)] = Q.input(pos[static_cast<std::size_t>(v)]);
  Q.add_output(embed_output(Q, C, vg));
  return {std::move(Q), nx, static_cast<int>(aux.size())};
}

inline std::string emit_exp_sum(const ExpSumPoly& E) {
  std::istringstream is(emit_circuit(E.Q));
  std::ostringstream os;
  std::string line;
  while (std::getline(is, line)) {
    os << line << "\n";
    if (line.rfind("nvars", 0) == 0 && E.m > 0) {
      os << "aux";
      for (int i = 0; i < E.m; ++i) os << " y" << E.nx + i + 1;
      os << "\n";
    }
  }
  return os.str();
}

}  // namespace forge
