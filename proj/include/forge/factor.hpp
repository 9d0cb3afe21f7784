#pragma once

#include <optional>
#include <string>
#include <vector>

#include "forge/hensel.hpp"

namespace forge {

struct ShiftChoice {
  std::vector<Fe> c;
  std::vector<Fe> simple_roots;
  int trials = 0;
};

// Seeded search for c maximising the number of simple roots of P(c, y),
// then minimising repeated ones. c = 0 is tried first; stops early once
// every y-root is simple.
inline ShiftChoice separating_shift(const Circuit& P, int y, u64 seed, int max_trials = 32) {
  const FieldConfig& f = P.field();
  int n = P.nvars();
  long long Dy = formal_degree_in(P, y);
  long long r = std::max<long long>(1, formal_degree(P));
  u64 grid = static_cast<u64>(2 * r * std::max<long long>(1, Dy) + 1);
  if (f.is_prime()) grid = std::min<u64>(grid, f.modulus);
  Rng rng(seed, "separating_shift");
  ShiftChoice best;
  bool have = false;
  int best_repeated = 0;
  for (int trial = 0; trial < max_trials; ++trial) {
    std::vector<Fe> c(static_cast<std::size_t>(n), Fe::zero(f));
    if (trial > 0)
      for (int v = 0; v < n; ++v)
        if (v != y) c[static_cast<std::size_t>(v)] = Fe::from_u64(f, rng.below(grid));
    uni::Poly u = restrict_to_line(P, c, y, Dy);
    if (u.empty()) continue;
    std::vector<Fe> simple;
    int repeated = 0;
    for (const auto& [a, m] : uni::roots(u)) {
      if (m == 1) simple.push_back(a);
      else repeated += m;
    }
    // a root folded into a repeated one is lost to every subset, so ties go
    // to the candidate with fewer repeated roots
    if (!have || simple.size() > best.simple_roots.size() || (simple.size() == best.simple_roots.size() && repeated < best_repeated)) {
      best.c = c;
      best.simple_roots = simple;
      best_repeated = repeated;
      have = true;
    }
    best.trials = trial + 1;
    if (static_cast<long long>(best.simple_roots.size()) == uni::deg(u)) break;
  }
  if (!have || best.simple_roots.empty()) fail(ErrorKind::NoSimpleRoots, "no tried shift gives P(c, y) a simple root");
  return best;
}

struct RootBundle {
  std::vector<Fe> shift;
  std::vector<Fe> alphas;
  std::vector<Circuit> approx;      // q_i
  std::vector<Circuit> components;  // outputs H_0..H_d of q_i
  std::vector<int> generators;      // |G_y(P, alpha_i, d)|
  std::vector<LiftState> states;    // empty entries when d = 0
  int d = 0;
};

// q_i = H_{<=d}[A_d(generators)] for each simple root alpha_i of P(0, y).
inline RootBundle approx_roots(const Circuit& P, int y, const std::vector<Fe>& alphas, int d, const Budget& budget = {},
                               u64 seed = 0) {
  const FieldConfig& f = P.field();
  RootBundle B;
  B.alphas = alphas;
  B.d = d;
  B.shift.assign(static_cast<std::size_t>(P.nvars()), Fe::zero(f));
  for (const Fe& a : alphas) {
    Circuit comps(f, P.nvars());
    if (d == 0) {
      uni::Poly tay = taylor_at_origin(P, y, a);
      if (tay.empty() || !tay[0].is_zero() || tay.size() < 2 || tay[1].is_zero()) fail(ErrorKind::NotASimpleRoot, "alpha is not a simple root");
      comps.add_output(comps.constant(a));
      B.generators.push_back(0);
      B.states.emplace_back();
    } else {
      LiftState S = build_A_recurrence(P, y, a, d, budget, seed);
      comps = lift_components(S, d, d);
      B.generators.push_back(static_cast<int>(S.gens.members.size()));
      B.states.push_back(std::move(S));
    }
    Circuit q = comps;
    std::vector<int> outs = q.outputs();
    q.set_outputs({q.add(outs)});
    B.approx.push_back(q.single(0));
    B.components.push_back(std::move(comps));
  }
  return B;
}

// H_{<=d}[prod_{i in S} (y - q_i)] over total (x, y)-degree. Scaling x and y
// by t turns each factor into t*y - sum_m t^m H_m[q_i]; the product is read
// off at t = 0..D and the t-coefficients 0..d are recombined.
inline Circuit combine_roots(const RootBundle& B, const std::vector<int>& subset, int d, int y) {
  if (subset.empty()) fail(ErrorKind::InvalidArgument, "subset must be nonempty");
  const FieldConfig& f = B.components.at(0).field();
  int n = std::max(B.components[0].nvars(), y + 1);
  Circuit out(f, n);
  std::vector<std::vector<int>> pieces;
  for (int i : subset) {
    if (i < 0 || i >= static_cast<int>(B.components.size())) fail(ErrorKind::InvalidArgument, "subset index out of range");
    const Circuit& comp = B.components[static_cast<std::size_t>(i)];
    auto map = embed(out, comp, {});
    std::vector<int> pc;
    for (int o : comp.outputs()) pc.push_back(map[static_cast<std::size_t>(o)]);
    pieces.push_back(pc);
  }
  long long D = static_cast<long long>(subset.size()) * std::max(1, d);
  if (!f.has_elements(static_cast<u64>(D) + 1)) fail(ErrorKind::FieldTooSmall, "need more interpolation points");
  const auto& W = uni::vandermonde_inverse(f, static_cast<int>(D));
  int yg = out.input(y);
  std::vector<std::pair<int, Fe>> terms;
  for (long long k = 0; k <= D; ++k) {
    Fe t = Fe::from_int(f, k);
    std::vector<int> factors;
    for (const auto& pc : pieces) {
      std::vector<std::pair<int, Fe>> lin{{yg, t}};
      Fe tm = Fe::one(f);
      for (std::size_t m = 0; m < pc.size(); ++m) {
        lin.emplace_back(pc[m], -tm);
        tm *= t;
      }
      factors.push_back(out.lincomb(lin));
    }
    Fe u = Fe::zero(f);
    for (int j = 0; j <= d && j <= D; ++j) u += W[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)];
    terms.emplace_back(out.mul(factors), u);
  }
  out.add_output(out.lincomb(terms, true));
  return out;
}

// Everything extract_factor decides before choosing a subset.
struct FactorContext {
  MonicForm monic;
  int level = 0;  // Hasse order taken in y to make the target's roots simple
  ShiftChoice shift;
  RootBundle bundle;
  DensePoly original;
  long long total_degree = 0;
};

inline FactorContext prepare_factor(const Circuit& P, int y, int d, u64 seed, const Budget& budget = {}, int min_level = 0) {
  FactorContext ctx;
  ctx.original = expand(P, budget).with_nvars(std::max(P.nvars(), y + 1));
  if (ctx.original.is_zero()) fail(ErrorKind::InvalidArgument, "P is zero");
  if (ctx.original.degree_in(y) <= 0) fail(ErrorKind::NoFactorFound, "P does not involve y");
  ctx.total_degree = ctx.original.total_degree();
  ctx.monic = make_monic(P, y, ctx.total_degree, seed);
  for (int k = min_level; k < ctx.total_degree; ++k) {
    Circuit Q = k == 0 ? ctx.monic.circuit : hasse_derivative_circuit(ctx.monic.circuit, y, k);
    try {
      ctx.shift = separating_shift(Q, y, seed);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::NoSimpleRoots) throw;
      continue;
    }
    ctx.level = k;
    Circuit Qc = translate(Q, ctx.shift.c);
    ctx.bundle = approx_roots(Qc, y, ctx.shift.simple_roots, d, budget, seed);
    ctx.bundle.shift = ctx.shift.c;
    return ctx;
  }
  fail(ErrorKind::NoSimpleRoots, "no Hasse level of P has simple roots at any tried shift");
}

struct FactorResult {
  Circuit factor;
  std::vector<int> subset;  // indices into alphas
  int multiplicity = 0;
  int generators = 0;       // t, over the subset
  std::vector<StageMetric> chain;
  DensePoly factor_dense;
  Fe unit;  // y-leading coefficient divided out after unshifting
  FactorContext context;
};

namespace detail {

// Undo the translation, then the monic shift.
inline Circuit unshift_factor(const Circuit& Fc, const FactorContext& ctx, int y) {
  Circuit F1 = translate(Fc, negated(ctx.shift.c));
  return unshift_monic(F1, ctx.monic.shift, y);
}

inline std::vector<DensePoly> dense_roots(const RootBundle& B, int n, const Budget& budget) {
  std::vector<DensePoly> out;
  for (const Circuit& q : B.approx) out.push_back(expand(q, budget).with_nvars(n));
  return out;
}

// dense twin of combine_roots followed by unshift_factor
inline DensePoly dense_candidate(const std::vector<DensePoly>& q, const std::vector<int>& subset, int d, int y, const FactorContext& ctx) {
  const FieldConfig& f = ctx.original.field();
  int n = ctx.original.nvars();
  DensePoly prod = DensePoly::constant(f, n, Fe::one(f));
  DensePoly Y = DensePoly::variable(f, n, y);
  for (int i : subset) prod = truncate_dense(prod * (Y - q[static_cast<std::size_t>(i)]), d);
  prod = translate_dense(prod, negated(ctx.shift.c));
  std::map<int, DensePoly> sub;
  for (int v = 0; v < n && v < static_cast<int>(ctx.monic.shift.size()); ++v)
    if (!ctx.monic.shift[static_cast<std::size_t>(v)].is_zero())
      sub.emplace(v, DensePoly::variable(f, n, v) - Y.scaled(ctx.monic.shift[static_cast<std::size_t>(v)]));
  return sub.empty() ? prod : compose_dense(prod, sub);
}

inline Fe y_leading(const DensePoly& F, int y) {
  long long e = F.degree_in(y);
  Mono m(static_cast<std::size_t>(F.nvars()), 0);
  m[static_cast<std::size_t>(y)] = static_cast<std::uint32_t>(e);
  return F.coeff(m);
}

inline void next_subset(std::vector<int>& s, int n, bool& done) {
  int k = static_cast<int>(s.size());
  int i = k - 1;
  while (i >= 0 && s[static_cast<std::size_t>(i)] == n - k + i) --i;
  if (i < 0) {
    done = true;
    return;
  }
  ++s[static_cast<std::size_t>(i)];
  for (int j = i + 1; j < k; ++j) s[static_cast<std::size_t>(j)] = s[static_cast<std::size_t>(j - 1)] + 1;
}

}  // namespace detail

// Full pipeline. With a subset, combine exactly those roots; without one,
// search subsets by size then lexicographically, accepting the first whose
// candidate divides P (dense oracle, never sampled).
inline FactorResult extract_factor(const Circuit& P, int y, int d, u64 seed, std::optional<std::vector<int>> subset = std::nullopt,
                                   const Budget& budget = {}) {
  if (d < 1) fail(ErrorKind::InvalidArgument, "factor degree bound must be at least 1");
  FactorContext ctx = prepare_factor(P, y, d, seed, budget);
  const FieldConfig& f = P.field();
  int n = ctx.original.nvars();
  auto finish = [&](const std::vector<int>& S, FactorContext& c) -> std::optional<FactorResult> {
    Circuit Fc = combine_roots(c.bundle, S, d, y);
    Circuit F = detail::unshift_factor(Fc, c, y);
    DensePoly Fd = expand(F, budget).with_nvars(n);
    if (Fd.degree_in(y) <= 0) return std::nullopt;
    Fe lu = detail::y_leading(Fd, y);
    if (lu.is_zero()) return std::nullopt;
    Divisibility dv = divides(Fd, c.original);
    if (!dv.divides) return std::nullopt;
    FactorResult R;
    R.unit = lu;
    if (!lu.is_one()) {
      Circuit N(f, F.nvars());
      int g = embed_output(N, F, {});
      N.add_output(N.lincomb({{g, lu.inv()}}, true));
      F = std::move(N);
      Fd = Fd.scaled(lu.inv());
    }
    R.factor = std::move(F);
    R.factor_dense = std::move(Fd);
    R.subset = S;
    R.multiplicity = dv.multiplicity;
    for (int i : S) R.generators += c.bundle.generators[static_cast<std::size_t>(i)];
    if (R.generators > (d + 1) * (d + 1))
      throw std::logic_error("generator union " + std::to_string(R.generators) + " exceeds (d+1)^2");
    R.chain = {stage("input", P), stage("monic", c.monic.circuit), stage("combined", Fc), stage("factor", R.factor)};
    R.context = c;
    return R;
  };
  if (subset) {
    auto R = finish(*subset, ctx);
    if (!R) fail(ErrorKind::NoFactorFound, "the given subset does not combine into a factor of P");
    return std::move(*R);
  }
  while (true) {
    int roots = static_cast<int>(ctx.bundle.alphas.size());
    std::vector<DensePoly> q = detail::dense_roots(ctx.bundle, n, budget);
    for (int size = 1; size <= std::min(d, roots); ++size) {
      std::vector<int> S(static_cast<std::size_t>(size));
      for (int i = 0; i < size; ++i) S[static_cast<std::size_t>(i)] = i;
      bool done = false;
      while (!done) {
        DensePoly cand = detail::dense_candidate(q, S, d, y, ctx);
        if (cand.degree_in(y) > 0 && divides(cand, ctx.original).divides) {
          auto R = finish(S, ctx);
          if (R) return std::move(*R);
        }
        detail::next_subset(S, roots, done);
      }
    }
    // the target's roots may be multiple here; climb one Hasse level
    if (ctx.level + 1 >= ctx.total_degree) break;
    try {
      ctx = prepare_factor(P, y, d, seed, budget, ctx.level + 1);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::NoSimpleRoots) throw;
      break;
    }
  }
  fail(ErrorKind::NoFactorFound, "no subset of at most d roots combines into a factor of P");
}

}  // namespace forge
