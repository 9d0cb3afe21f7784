#pragma once

#include <optional>
#include <string>
#include <vector>

#include "forge/transforms.hpp"

namespace forge {

// Wires added by one A_i step stay below kStepConst * d^2.
inline constexpr long long kStepConst = 10;

// One Newton step: H_{<=i}[h - P(x, h) / delta].
inline Circuit lift_step(const Circuit& P, int y, const Circuit& h, int i, const Fe& delta) {
  if (delta.is_zero()) fail(ErrorKind::ZeroDelta, "lift_step needs delta != 0");
  Circuit out(P.field(), std::max(P.nvars(), h.nvars()));
  int hg = embed_output(out, h, {});
  std::vector<int> vg(static_cast<std::size_t>(P.nvars()), -1);
  vg[static_cast<std::size_t>(y)] = hg;
  int pg = embed_output(out, P, vg);
  out.add_output(out.lincomb({{hg, Fe::one(P.field())}, {pg, -delta.inv()}}));
  std::vector<char> xmask = all_but(out.nvars(), y);
  return truncate_deg(out, i, -1, xmask);
}

struct LiftState {
  Fe alpha;
  Fe delta;
  int d = 0;
  int y = 0;
  GeneratorSet gens;
  std::vector<int> z_of_j;  // member index for derivative order j, -1 if dropped
  std::vector<Fe> c;        // P^{(j)}(0, alpha)
  Circuit A;                // over z_1..z_t; output i-1 is A_i
  std::vector<long long> step_wires;
};

// Taylor coefficients of P(0, y) at alpha: P^{(j)}(0, alpha), j = 0..Dy.
inline uni::Poly taylor_at_origin(const Circuit& P, int y, const Fe& alpha, const std::vector<Fe>& base = {}) {
  const FieldConfig& f = P.field();
  std::vector<Fe> pt = base;
  pt.resize(static_cast<std::size_t>(P.nvars()), Fe::zero(f));
  uni::Poly u = restrict_to_line(P, pt, y, formal_degree_in(P, y));
  return uni::taylor_shift(u, alpha);
}

// A_1 = f0 - l_0/delta,
// A_i = A_{i-1} - (1/delta) sum_{j<=i} l_j (A_{i-1} - f0)^j,
// with l_j = z_j + P^{(j)}(0, alpha); powers of (A_{i-1} - f0) are a ladder.
inline LiftState build_A_recurrence(const Circuit& P, int y, const Fe& alpha, int d, const Budget& budget = {}, u64 seed = 0) {
  const FieldConfig& f = P.field();
  LiftState S;
  S.alpha = alpha;
  S.d = d;
  S.y = y;
  uni::Poly tay = taylor_at_origin(P, y, alpha);
  S.c.assign(static_cast<std::size_t>(d + 1), Fe::zero(f));
  for (int j = 0; j <= d && j < static_cast<int>(tay.size()); ++j) S.c[static_cast<std::size_t>(j)] = tay[static_cast<std::size_t>(j)];
  if (!S.c[0].is_zero()) fail(ErrorKind::NotASimpleRoot, "P(0, alpha) != 0");
  if (d < 1 || S.c[1].is_zero()) fail(ErrorKind::NotASimpleRoot, "dP/dy(0, alpha) = 0");
  S.delta = S.c[1];
  S.gens = generator_set(P, y, alpha, d, budget, seed);
  int t = static_cast<int>(S.gens.members.size());
  S.z_of_j.assign(static_cast<std::size_t>(d + 1), -1);
  for (int i = 0; i < t; ++i) S.z_of_j[static_cast<std::size_t>(S.gens.members[static_cast<std::size_t>(i)].j)] = i;
  S.A = Circuit(f, t);
  Circuit& A = S.A;
  std::vector<int> ell(static_cast<std::size_t>(d + 1), -1);
  for (int j = 0; j <= d; ++j) {
    int zi = S.z_of_j[static_cast<std::size_t>(j)];
    int g = zi >= 0 ? A.add(A.input(zi), A.constant(S.c[static_cast<std::size_t>(j)])) : A.constant(S.c[static_cast<std::size_t>(j)]);
    ell[static_cast<std::size_t>(j)] = detail::norm(A, g);
  }
  Fe inv = S.delta.inv();
  int f0 = A.constant(alpha);
  auto step_begin = A.num_gates();
  int prev = A.lincomb({{f0, Fe::one(f)}, {ell[0] >= 0 ? ell[0] : A.constant(Fe::zero(f)), -inv}});
  A.add_output(prev);
  auto count = [&](int from) {
    long long w = 0;
    for (int g = from; g < A.num_gates(); ++g) w += static_cast<long long>(A.gate(g).ch.size());
    return w;
  };
  S.step_wires.push_back(count(step_begin));
  for (int i = 2; i <= d; ++i) {
    int from = A.num_gates();
    int B = A.add(prev, A.constant(-alpha));
    std::vector<int> terms;
    if (ell[0] >= 0) terms.push_back(ell[0]);
    int pw = -1;
    for (int j = 1; j <= i; ++j) {
      pw = j == 1 ? B : A.mul(pw, B);
      if (ell[static_cast<std::size_t>(j)] >= 0) terms.push_back(A.mul(ell[static_cast<std::size_t>(j)], pw));
    }
    int sum = terms.empty() ? A.constant(Fe::zero(f)) : A.add(terms);
    prev = A.lincomb({{prev, Fe::one(f)}, {sum, -inv}});
    A.add_output(prev);
    long long w = count(from);
    S.step_wires.push_back(w);
    if (w > kStepConst * d * d)
      throw std::logic_error("A_" + std::to_string(i) + " step added " + std::to_string(w) + " wires");
  }
  return S;
}

// Circuit (over P's variables) with outputs H_0..H_k of A_i(generators),
// built by graded substitution of the generator pieces.
inline Circuit lift_components(const LiftState& S, int i, int k) {
  const Circuit& pool = S.gens.pool;
  Circuit out(pool.field(), pool.nvars());
  std::vector<int> roots;
  for (const auto& pc : S.gens.pieces)
    for (int g : pc)
      if (g >= 0) roots.push_back(g);
  Circuit src = pool;
  src.set_outputs(roots);
  auto map = embed(out, src, {});
  std::vector<Graded> vg;
  for (const auto& pc : S.gens.pieces) {
    Graded gr(static_cast<std::size_t>(k + 1), -1);
    for (int m = 1; m <= k && m < static_cast<int>(pc.size()); ++m)
      if (pc[static_cast<std::size_t>(m)] >= 0) gr[static_cast<std::size_t>(m)] = map[static_cast<std::size_t>(pc[static_cast<std::size_t>(m)])];
    vg.push_back(gr);
  }
  int a_out = S.A.outputs().at(static_cast<std::size_t>(i - 1));
  auto comp = strassen(out, S.A, {a_out}, k, vg);
  for (int m = 0; m <= k; ++m) {
    int g = comp[static_cast<std::size_t>(a_out)][static_cast<std::size_t>(m)];
    out.add_output(g >= 0 ? g : out.constant(Fe::zero(pool.field())));
  }
  return out;
}

// H_{<=k}[A_i(generators)] as a single-output circuit.
inline Circuit compose_truncated(const LiftState& S, int i, int k) {
  Circuit c = lift_components(S, i, k);
  std::vector<int> outs = c.outputs();
  c.set_outputs({c.add(outs)});
  return c;
}

// Q = P^{(m-1)} where m is the multiplicity of alpha in P(0, y).
inline std::pair<Circuit, int> reduce_multiplicity(const Circuit& P, int y, const Fe& alpha) {
  uni::Poly tay = taylor_at_origin(P, y, alpha);
  if (tay.empty()) fail(ErrorKind::AllDerivativesVanish, "P(0, y) is identically zero");
  if (!tay[0].is_zero()) fail(ErrorKind::PreconditionFailed, "alpha is not a root of P(0, y)");
  int m = 1;
  while (m < static_cast<int>(tay.size()) && tay[static_cast<std::size_t>(m)].is_zero()) ++m;
  if (m >= static_cast<int>(tay.size())) fail(ErrorKind::AllDerivativesVanish, "every derivative vanishes at alpha");
  const FieldConfig& f = P.field();
  if (f.is_prime() && static_cast<u64>(m) >= f.modulus) fail(ErrorKind::CharacteristicDividesPower, "multiplicity reaches the characteristic");
  if (m == 1) return {P.single(0), 1};
  return {hasse_derivative_circuit(P, y, m - 1), m};
}

struct StageMetric {
  std::string stage;
  long long size = 0;
  int depth = 0;
};

struct RootCertificate {
  Circuit root;
  Fe alpha;
  Fe delta;
  int multiplicity = 1;
  std::vector<Fe> shift;
  int generators = 0;
  std::string residual_mode;  // "oracle" or "sz"
  bool residual_ok = false;
  std::vector<StageMetric> chain;
  std::optional<DensePoly> root_dense;  // set when the residual ran on the oracle
};

inline StageMetric stage(const std::string& name, const Circuit& C) {
  Metrics m = metrics(C);
  return {name, m.size, m.depth};
}

// P(x, f(x)) == 0, by expansion when it fits the budget, by 64 random
// evaluations otherwise.
inline bool residual_zero(const Circuit& P, int y, const Circuit& f, const Budget& budget, u64 seed, std::string& mode,
                          std::optional<DensePoly>* dense_out = nullptr) {
  try {
    DensePoly Pd = expand(P, budget);
    DensePoly fd = expand(f, budget).with_nvars(P.nvars());
    mode = "oracle";
    if (dense_out) *dense_out = fd;
    // P(x, f) = 0 iff (y - f) | P; exact division is far cheaper than P(x, f)
    if (fd.degree_in(y) > 0) return compose_dense(Pd, {{y, fd}}).is_zero();
    return exact_divide(Pd, DensePoly::variable(P.field(), P.nvars(), y) - fd).has_value();
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::BudgetExceeded) throw;
  }
  mode = "sz";
  const FieldConfig& fc = P.field();
  Rng rng(seed, "residual");
  u64 bound = fc.is_prime() ? fc.modulus : (u64{1} << 20);
  for (int s = 0; s < 64; ++s) {
    std::vector<Fe> pt;
    for (int v = 0; v < P.nvars(); ++v) pt.push_back(Fe::from_u64(fc, rng.below(bound)));
    std::vector<Fe> q = pt;
    q.resize(static_cast<std::size_t>(f.nvars()), Fe::zero(fc));
    pt[static_cast<std::size_t>(y)] = evaluate1(f, q);
    if (!evaluate1(P, pt).is_zero()) return false;
  }
  return true;
}

// Lift a root of P in y with degree <= d. Translations c come from the grid
// {0..2rd}^n (c = 0 first, 32 trials); every root of P(c, y) is lifted and
// the first candidate with P(x, f) == 0 (and f(0) = alpha, when given) wins.
// The degree-d truncation happens inside the graded substitution of the
// generator pieces into A_d, not as a separate pass over the composition.
inline RootCertificate lift_root(const Circuit& P, int y, int d, u64 seed, std::optional<Fe> alpha = std::nullopt,
                                 const Budget& budget = {}) {
  const FieldConfig& f = P.field();
  if (y < 0 || y >= P.nvars()) fail(ErrorKind::ArityMismatch, "y outside the circuit's variables");
  if (d < 1) fail(ErrorKind::InvalidArgument, "root degree bound must be at least 1");
  int n = P.nvars();
  long long r = std::max<long long>(1, formal_degree(P));
  u64 grid = static_cast<u64>(2 * r * d + 1);
  if (f.is_prime()) grid = std::min<u64>(grid, f.modulus);
  Rng rng(seed, "lift_root");
  bool saw_root = false;
  for (int trial = 0; trial < 32; ++trial) {
    std::vector<Fe> c(static_cast<std::size_t>(n), Fe::zero(f));
    if (trial > 0)
      for (int v = 0; v < n; ++v)
        if (v != y) c[static_cast<std::size_t>(v)] = Fe::from_u64(f, rng.below(grid));
    uni::Poly u = restrict_to_line(P, c, y, formal_degree_in(P, y));
    if (u.empty()) continue;
    std::vector<std::pair<Fe, int>> rts;
    try {
      rts = uni::roots(u);
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::ZeroPolynomial) continue;
      throw;
    }
    if (rts.empty()) continue;
    saw_root = true;
    bool zero_shift = std::all_of(c.begin(), c.end(), [](const Fe& x) { return x.is_zero(); });
    Circuit Pc = zero_shift ? P.single(0) : translate(P, c);
    for (const auto& [a, mult] : rts) {
      (void)mult;
      if (alpha && zero_shift && !(a == *alpha)) continue;
      try {
        auto [Q, m] = reduce_multiplicity(Pc, y, a);
        LiftState S = build_A_recurrence(Q, y, a, d, budget, seed);
        Circuit rc = compose_truncated(S, d, d);
        Circuit root = zero_shift ? rc : translate(rc, negated(c));
        if (alpha && !(evaluate1(root, std::vector<Fe>(static_cast<std::size_t>(root.nvars()), Fe::zero(f))) == *alpha)) continue;
        RootCertificate cert;
        cert.residual_ok = residual_zero(P, y, root, budget, seed, cert.residual_mode, &cert.root_dense);
        if (!cert.residual_ok) continue;
        cert.alpha = a;
        cert.delta = S.delta;
        cert.multiplicity = m;
        cert.shift = c;
        cert.generators = static_cast<int>(S.gens.members.size());
        cert.chain = {stage("input", P), stage("translated", Pc), stage("reduced", Q),
                      stage("A_d", S.A.single(static_cast<std::size_t>(d - 1))), stage("root", root)};
        cert.root = std::move(root);
        return cert;
      } catch (const Error& e) {
        switch (e.kind()) {
          case ErrorKind::NotASimpleRoot:
          case ErrorKind::AllDerivativesVanish:
          case ErrorKind::CharacteristicDividesPower:
            continue;
          default:
            throw;
        }
      }
    }
  }
  if (!saw_root) fail(ErrorKind::NoRationalRoot, "no field root of P(c, y) for any tried translation");
  fail(ErrorKind::ResidualNonzero, "no lifted candidate satisfies P(x, f) = 0");
}

}  // namespace forge
