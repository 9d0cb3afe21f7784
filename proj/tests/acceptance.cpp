// One line per acceptance criterion; exit status is nonzero if any fails.

#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <set>

#include "factor_oracle.hpp"
#include "forge/certificate.hpp"
#include "forge/nw_pit.hpp"
#include "vnp_oracle.hpp"

using namespace forge;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

// first failure message wins
struct Check {
  Outcome o;
  void that(bool ok, const std::string& what) {
    if (!ok && o.pass) {
      o.pass = false;
      o.detail = what;
    }
  }
};

double secs_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

FieldConfig field_for(int t) { return t % 2 ? oracle::P62() : oracle::Q(); }

Outcome hensel_recovery() {
  Check c;
  auto t0 = std::chrono::steady_clock::now();
  int runs = 0;
  for (int fi = 0; fi < 2; ++fi) {
    FieldConfig fc = field_for(fi);
    Rng rng(1001 + static_cast<u64>(fi), "acc-hensel");
    for (int t = 0; t < 100; ++t) {
      auto I = oracle::planted_root(fc, 1 + static_cast<int>(rng.below(3)), 5, 5, rng);
      if (formal_degree(I.P) > 10) {
        --t;
        continue;
      }
      RootCertificate R = lift_root(I.P, I.y, I.d, static_cast<u64>(t), I.alpha);
      DensePoly got = R.root_dense ? *R.root_dense : expand(R.root);
      c.that(got.with_nvars(I.P.nvars()) == I.f.with_nvars(I.P.nvars()), fc.str() + " instance " + std::to_string(t) + " root differs");
      ++runs;
    }
  }
  double s = secs_since(t0);
  c.that(s < 60, "took " + std::to_string(s) + " s");
  if (c.o.pass) c.o.detail = std::to_string(runs) + " roots exact (rationals and p62), " + std::to_string(s).substr(0, 5) + " s";
  return c.o;
}

Outcome step_size_law() {
  Check c;
  int inst = 0;
  long long worst = 0;
  for (int fi = 0; fi < 2; ++fi) {
    Rng rng(1001 + static_cast<u64>(fi), "acc-hensel");
    for (int t = 0; t < 100; ++t) {
      auto I = oracle::planted_root(field_for(fi), 1 + static_cast<int>(rng.below(3)), 5, 5, rng);
      if (formal_degree(I.P) > 10) {
        --t;
        continue;
      }
      LiftState S = build_A_recurrence(I.P, I.y, I.alpha, I.d);
      long long dd = static_cast<long long>(I.d) * I.d, total = 0;
      for (long long w : S.step_wires) {
        c.that(w <= kStepConst * dd, "step wires " + std::to_string(w) + " > 10d^2");
        worst = std::max(worst, dd ? w * 1000 / dd : 0);
        total += w;
      }
      c.that(total <= kStepConst * dd * I.d, "A_d wires above 10d^3");
      c.that(metrics(S.A).size <= kStepConst * dd * I.d + 1, "size(A_d) above 10d^3");
      ++inst;
    }
  }
  if (c.o.pass) c.o.detail = std::to_string(inst) + " instances, worst step " + std::to_string(worst / 1000.0).substr(0, 4) + " d^2";
  return c.o;
}

Outcome generator_law() {
  Check c;
  Rng rng(1003, "acc-gen");
  int inst = 0, members = 0;
  while (inst < 120) {
    FieldConfig fc = field_for(inst);
    int n = 3, y = 2;
    Circuit P = oracle::random_circuit(fc, n, 4 + static_cast<int>(rng.below(8)), rng);
    if (formal_degree(P) > 7) continue;
    int d = 1 + static_cast<int>(rng.below(4));
    Fe alpha = oracle::small(fc, rng, 3);
    GeneratorSet G = generator_set(P, y, alpha, d);
    c.that(G.members.size() <= static_cast<std::size_t>(d + 1), "more than d+1 members");
    DensePoly Pd = expand(P);
    std::map<int, DensePoly> at{{y, DensePoly::constant(fc, n, alpha)}};
    std::size_t k = 0;
    for (int j = 0; j <= d; ++j) {
      DensePoly Dj = compose_dense(hasse_derivative_dense(Pd, y, j), at);
      DensePoly want = truncate_dense(Dj, d) - DensePoly::constant(fc, n, Dj.constant_term());
      if (want.is_zero()) continue;
      if (k >= G.members.size()) {
        c.that(false, "a nonzero generator is missing");
        break;
      }
      DensePoly got = expand(G.members[k].g).with_nvars(n);
      c.that(G.members[k].j == j && got == want, "member for j=" + std::to_string(j) + " differs from the oracle");
      c.that(got.constant_term().is_zero(), "member has a constant term");
      c.that(got.total_degree() <= d, "member degree above d");
      ++k;
    }
    c.that(k == G.members.size(), "extra members");
    members += static_cast<int>(k);
    ++inst;
  }
  if (c.o.pass) c.o.detail = std::to_string(inst) + " sets, " + std::to_string(members) + " members oracle-equal";
  return c.o;
}

Outcome taylor_hasse() {
  Check c;
  Rng rng(1004, "acc-taylor");
  int inst = 0;
  while (inst < 200) {
    FieldConfig fc = field_for(inst);
    int n = 1 + static_cast<int>(rng.below(3));
    Circuit C = oracle::random_circuit(fc, n, 3 + static_cast<int>(rng.below(8)), rng);
    if (formal_degree(C) > 6) continue;
    int y = static_cast<int>(rng.below(static_cast<u64>(n)));
    DensePoly P = expand(C);
    DensePoly Y = DensePoly::variable(fc, n + 1, y), Z = DensePoly::variable(fc, n + 1, n);
    DensePoly lhs = compose_dense(P.with_nvars(n + 1), {{y, Y + Z}});
    DensePoly rhs(fc, n + 1), zk = DensePoly::constant(fc, n + 1, Fe::one(fc));
    long long dy = P.degree_in(y);
    for (int k = 0; k <= std::max<long long>(dy, 0); ++k) {
      DensePoly hk = hasse_derivative_dense(P, y, k);
      rhs = rhs + zk * hk.with_nvars(n + 1);
      zk = zk * Z;
      c.that(expand(hasse_derivative_circuit(C, y, k)).with_nvars(n) == hk, "circuit and dense Hasse derivatives differ");
    }
    c.that(lhs == rhs, "P(y+z) differs from the Taylor sum");
    ++inst;
  }
  if (c.o.pass) c.o.detail = "200 polynomials, identity exact, circuit = dense";
  return c.o;
}

Outcome coeff_reconstruction() {
  Check c;
  Rng rng(1005, "acc-coeffs");
  int inst = 0;
  while (inst < 200) {
    FieldConfig fc = field_for(inst);
    int n = 2 + static_cast<int>(rng.below(3));
    Circuit C = oracle::random_circuit(fc, n, 4 + static_cast<int>(rng.below(10)), rng);
    if (formal_degree(C) > 8) continue;
    int y = static_cast<int>(rng.below(static_cast<u64>(n)));
    int dmax = static_cast<int>(formal_degree_in(C, y));
    auto cs = extract_y_coeffs(C, y, dmax);
    DensePoly Y = DensePoly::variable(fc, n, y), acc(fc, n);
    for (int j = 0; j <= dmax; ++j) {
      c.that(metrics(cs[static_cast<std::size_t>(j)]).depth <= metrics(C).depth, "coefficient deeper than the input");
      acc = acc + expand(cs[static_cast<std::size_t>(j)]).with_nvars(n) * Y.pow(static_cast<unsigned>(j));
    }
    c.that(acc == expand(C), "sum C_j y^j differs from P");
    ++inst;
  }
  if (c.o.pass) c.o.detail = "200 circuits, exact reconstruction, depth never grows";
  return c.o;
}

Outcome homogenization() {
  Check c;
  Rng rng(1006, "acc-homog");
  int inst = 0;
  double worst = 0;
  while (inst < 200) {
    FieldConfig fc = field_for(inst);
    int n = 1 + static_cast<int>(rng.below(4));
    Circuit C = oracle::random_circuit(fc, n, 4 + static_cast<int>(rng.below(10)), rng);
    long long deg = formal_degree(C);
    if (deg > 8) continue;
    long long s = metrics(C).size;
    DensePoly sum(fc, n);
    for (int k = 0; k <= deg; ++k) {
      Circuit H = homogenize(C, k);
      long long hs = metrics(H).size;
      c.that(hs <= kHomogConst * k * k * s + kHomogConst * (k + 1), "size(H_k) above the documented bound");
      if (k > 0) worst = std::max(worst, static_cast<double>(hs) / static_cast<double>(k * k * s));
      DensePoly h = expand(H).with_nvars(n);
      c.that(h == homog_component_dense(expand(C), k), "H_k differs from the dense component");
      sum = sum + h;
    }
    c.that(sum == expand(C), "components do not sum to C");
    ++inst;
  }
  if (c.o.pass) c.o.detail = "200 circuits, c_h = 9, worst size/(k^2 s) = " + std::to_string(worst).substr(0, 4);
  return c.o;
}

Outcome factor_pipeline() {
  Check c;
  Rng rng(1007, "acc-factor");
  for (int t = 0; t < 100; ++t) {
    FieldConfig fc = field_for(t);
    int kf = 1 + static_cast<int>(rng.below(3));
    auto I = oracle::planted_factor(fc, 2, kf, 1 + static_cast<int>(rng.below(2)), rng);
    int n = I.P.nvars();
    std::string tag = "instance " + std::to_string(t);
    FactorContext ctx = prepare_factor(I.P, I.y, I.d, static_cast<u64>(t));
    std::vector<int> S = oracle::subset_of(I.f, ctx, I.y);
    if (static_cast<int>(S.size()) != kf) {
      c.that(false, tag + ": planted roots not all found");
      continue;
    }
    FactorResult R = extract_factor(I.P, I.y, I.d, static_cast<u64>(t), S);
    c.that(expand(R.factor).with_nvars(n) == oracle::monic_in(I.f, I.y), tag + ": given-subset factor differs");
    // combine_roots against an independent product of (y - q_i), truncated
    const RootBundle& B = ctx.bundle;
    int nb = std::max(n, B.approx[0].nvars());
    DensePoly Y = DensePoly::variable(fc, nb, I.y), prod = DensePoly::constant(fc, nb, Fe::one(fc));
    for (int i : S) prod = prod * (Y - expand(B.approx[static_cast<std::size_t>(i)]).with_nvars(nb));
    c.that(expand(combine_roots(B, S, I.d, I.y)).with_nvars(nb) == truncate_dense(prod, I.d), tag + ": combine_roots identity fails");
  }
  // search mode: the only factor of degree <= d is the planted line
  int searched = 0;
  for (int t = 0; t < 100; ++t) {
    FieldConfig fc = field_for(t);
    int n = 3, y = 2;
    DensePoly line = oracle::y_minus_linear(fc, n, y, rng);
    DensePoly Y = DensePoly::variable(fc, n, y);
    DensePoly g = Y * Y + oracle::random_dense(fc, n, 2, 3, rng) + DensePoly::constant(fc, n, oracle::small(fc, rng, 5, true));
    if (g.degree_in(y) != 2) continue;
    // skip g with a y-linear factor so the line is the unique answer
    bool reducible = false;
    try {
      FactorResult G = extract_factor(oracle::naive_circuit(g), y, 1, 1);
      reducible = divides(expand(G.factor).with_nvars(n), g).divides;
    } catch (const Error&) {
    }
    if (reducible) continue;
    Circuit P = oracle::naive_circuit(line * g);
    FactorResult R = extract_factor(P, y, 1, static_cast<u64>(t));
    c.that(expand(R.factor).with_nvars(n) == oracle::monic_in(line, y), "search mode missed the line, instance " + std::to_string(t));
    ++searched;
  }
  c.that(searched >= 50, "too few search instances");
  if (c.o.pass) c.o.detail = "100 planted (given subset) + " + std::to_string(searched) + " searched, combine_roots exact";
  return c.o;
}

Outcome nw_design_check() {
  Check c;
  auto t0 = std::chrono::steady_clock::now();
  int designs = 0;
  for (int m = 2; m <= 16; ++m)
    for (int n = 2; n <= 64; ++n) {
      if (m < 63 && n >= (1 << m)) continue;
      Design D = nw_design(n, m);
      int cap = floor_log2(n);
      c.that(static_cast<int>(D.sets.size()) == n, "wrong set count");
      c.that(D.l <= kDesignConst * m * m, "universe above 4m^2 for n=" + std::to_string(n) + " m=" + std::to_string(m));
      for (int i = 0; i < n; ++i) {
        const auto& A = D.sets[static_cast<std::size_t>(i)];
        c.that(static_cast<int>(std::set<int>(A.begin(), A.end()).size()) == m, "set size differs from m");
        for (int j = 0; j < i; ++j) {
          const auto& B = D.sets[static_cast<std::size_t>(j)];
          int k = 0;
          for (int x : A) k += std::binary_search(B.begin(), B.end(), x);
          c.that(k <= cap, "intersection above floor(log2 n)");
        }
      }
      ++designs;
    }
  double s = secs_since(t0);
  c.that(s < 10, "took " + std::to_string(s) + " s");
  if (c.o.pass) c.o.detail = std::to_string(designs) + " designs exhaustively checked, " + std::to_string(s).substr(0, 5) + " s";
  return c.o;
}

Outcome hitset_mechanics() {
  Check c;
  FieldConfig fc = oracle::P62();
  ExplicitPoly F = random_full_support(fc, 6, 1009);
  Design D = nw_design(8, 6);
  int d = F.degree();
  const u64 limit = 5000;
  Rng rng(1009, "acc-hitset");
  int nonzero = 0, zero = 0;
  u64 most = 0;
  while (nonzero < 200 || zero < 50) {
    Circuit C = oracle::random_circuit(fc, 8, 3 + static_cast<int>(rng.below(6)), rng);
    long long Dg = formal_degree(C);
    if (Dg < 1 || Dg > 4) continue;
    DensePoly Cd = expand(C);
    if (Cd.is_zero()) continue;
    bool want_zero = nonzero >= 200 || (zero < 50 && rng.below(5) == 0);
    if (want_zero) {
      // same polynomial twice, different shapes
      Circuit Z(fc, 8);
      Z.add_output(Z.sub(embed_output(Z, C, {}), oracle::naive_gate(Z, Cd)));
      C = Z;
    }
    HittingSet H(F, D, static_cast<int>(Dg), d);
    c.that(H.grid_size() == static_cast<u64>(Dg * d + 1), "|T| differs from D*d + 1");
    PitResult h = pit_hitset(C, H, limit);
    PitResult e = pit_sz(C, static_cast<int>(Dg), 0, 0, true);
    c.that(h.zero == e.zero, "hitset and exhaustive SZ disagree");
    c.that(e.zero == want_zero, "exhaustive SZ verdict is wrong");
    if (!h.zero) most = std::max(most, h.points);
    (want_zero ? zero : nonzero)++;
  }
  if (c.o.pass)
    c.o.detail = "200 nonzero + 50 zero agree with exhaustive SZ; witnesses by point " + std::to_string(most) + "; zero verdicts cover the first " +
                 std::to_string(limit) + " points only, not all |T|^|U|";
  return c.o;
}

Outcome sz_bound() {
  Check c;
  Rng rng(1010, "acc-sz");
  int inst = 0;
  while (inst < 100) {
    FieldConfig fc = field_for(inst);
    int n = 1 + static_cast<int>(rng.below(3));
    Circuit C = oracle::random_circuit(fc, n, 2 + static_cast<int>(rng.below(5)), rng);
    DensePoly P = expand(C);
    if (P.is_zero()) continue;
    long long d = P.total_degree();
    if (d < 1 || d > 4) continue;
    for (long long s = d + 1; s <= 2 * d + 1; ++s) {
      u64 zeros = count_zeros(C, static_cast<u64>(s));
      u64 total = 1;
      for (int v = 0; v < n; ++v) total *= static_cast<u64>(s);
      // zeros / s^n <= d / s
      c.that(zeros * static_cast<u64>(s) <= static_cast<u64>(d) * total, "zero fraction above d/|S|");
    }
    ++inst;
  }
  if (c.o.pass) c.o.detail = "100 polynomials, every |S| in d+1..2d+1 within d/|S|";
  return c.o;
}

Outcome vnp_contract() {
  Check c;
  Rng rng(1011, "acc-vnp");
  int cases = 0;
  for (int t = 0; t < 120; ++t, ++cases) {
    ExpSumPoly E = oracle::random_exp_sum(field_for(t), 1 + static_cast<int>(rng.below(3)), static_cast<int>(rng.below(13)), 3 + static_cast<int>(rng.below(4)), rng);
    c.that(exp_sum_expand(E) == oracle::naive_sum(E), "exp_sum_expand differs from nested summation");
  }
  for (int t = 0; t < 60; ++t, cases += 2) {
    FieldConfig fc = field_for(t);
    ExpSumPoly A = oracle::random_exp_sum(fc, 2, static_cast<int>(rng.below(5)), 4, rng);
    ExpSumPoly B = oracle::random_exp_sum(fc, 2, static_cast<int>(rng.below(5)), 4, rng);
    DensePoly a = exp_sum_expand(A), b = exp_sum_expand(B);
    c.that(exp_sum_expand(sum_compose(A, B)) == a + b, "sum_compose");
    c.that(exp_sum_expand(prod_compose(A, B)) == a * b, "prod_compose");
  }
  for (int t = 0; t < 20; ++t, ++cases) {
    FieldConfig fc = field_for(t);
    int s = 1 + static_cast<int>(rng.below(2)), aux_left = 12 - 5 * s;
    std::vector<std::vector<ExpSumPoly>> blocks(static_cast<std::size_t>(s));
    DensePoly want(fc, 2);
    for (int i = 0; i < s; ++i) {
      DensePoly prod = DensePoly::constant(fc, 2, Fe::one(fc));
      for (int j = 0; j < 5; ++j) {
        int m = aux_left > 0 && rng.below(3) == 0 ? 1 : 0;
        aux_left -= m;
        ExpSumPoly A = oracle::random_exp_sum(fc, 2, m, 3, rng);
        prod = prod * exp_sum_expand(A);
        blocks[static_cast<std::size_t>(i)].push_back(A);
      }
      want = want + prod;
    }
    c.that(exp_sum_expand(valiant_step(blocks)) == want, "valiant_step");
  }
  for (int t = 0; t < 40; ++t, ++cases) {
    FieldConfig fc = field_for(t);
    ExpSumPoly A = oracle::random_exp_sum(fc, 2, static_cast<int>(rng.below(4)), 3, rng);
    ExpSumPoly B = oracle::random_exp_sum(fc, 2, static_cast<int>(rng.below(4)), 3, rng);
    DensePoly a = exp_sum_expand(A), b = exp_sum_expand(B);
    Circuit T(fc, 2, false);
    T.add_output(T.add(T.mul(T.input(0), T.input(1)), T.input(0)));
    ExpSumPoly L = leaf_substitute(T, {A, B});
    c.that(L.m == 2 * A.m + B.m, "leaf_substitute aux count");
    c.that(exp_sum_expand(L) == a * b + a, "leaf_substitute");
  }
  for (int t = 0; t < 40; ++t, cases += 2) {
    FieldConfig fc = field_for(t);
    ExpSumPoly E = oracle::random_exp_sum(fc, 2, 1 + static_cast<int>(rng.below(3)), 4, rng);
    DensePoly e = exp_sum_expand(E);
    int Dz = static_cast<int>(formal_degree_in(E.Q, 1));
    DensePoly acc(fc, 2), zp = DensePoly::constant(fc, 2, Fe::one(fc));
    for (const auto& cj : coeff_exp_sums(E, 1, Dz)) {
      acc = acc + exp_sum_expand(cj) * zp;
      zp = zp * DensePoly::variable(fc, 2, 1);
    }
    c.that(acc == e, "coeff_exp_sums reconstruction");
    int D = static_cast<int>(formal_degree(E.Q, x_mask(E)));
    DensePoly hs(fc, 2);
    for (int k = 0; k <= D; ++k) {
      DensePoly h = exp_sum_expand(homog_x_exp_sum(E, k));
      c.that(h == homog_component_dense(e, k), "homog_x_exp_sum component");
      hs = hs + h;
    }
    c.that(hs == e, "homog_x_exp_sum sum");
  }
  // selector: Boolean, and exactly one block of ones
  for (int s = 1; s <= 3; ++s) {
    FieldConfig fc = oracle::Q();
    Circuit R = selector_R(fc, s);
    c.that(is_formula(R), "selector is not a formula");
    int ones = 0;
    for (u64 mask = 0; mask < (u64{1} << (5 * s)); ++mask) {
      std::vector<Fe> pt;
      for (int v = 0; v < 5 * s; ++v) pt.push_back((mask >> v & 1) ? Fe::one(fc) : Fe::zero(fc));
      Fe r = evaluate1(R, pt);
      c.that(r.is_zero() || r.is_one(), "selector value outside {0,1}");
      ones += r.is_one();
    }
    c.that(ones == s, "selector has the wrong number of ones");
  }
  // z1*z1 gets two fresh copies
  {
    FieldConfig fc = oracle::Q();
    DensePoly x = DensePoly::variable(fc, 2, 0), a = DensePoly::variable(fc, 2, 1);
    ExpSumPoly E = make_exp_sum(oracle::naive_circuit(x + a), 1, 1);
    DensePoly e = exp_sum_expand(E);
    Circuit B(fc, 1, false);
    B.add_output(B.mul(B.input(0), B.input(0)));
    c.that(exp_sum_expand(leaf_substitute(B, {E})) == e * e, "z1*z1 is not the square");
    ExpSumPoly sq = make_exp_sum(oracle::naive_circuit((x + a) * (x + a)), 1, 1);
    c.that(exp_sum_expand(sq) != e * e, "sum of squares coincides with the square");
  }
  c.that(cases >= 300, "fewer than 300 cases");
  if (c.o.pass) c.o.detail = std::to_string(cases) + " randomized cases (aux <= 12), selector scan s' <= 3, z1*z1 is the square";
  return c.o;
}

Outcome uniqueness() {
  Check c;
  Rng rng(1012, "acc-unique");
  int inst = 0;
  for (int t = 0; t < 40; ++t) {
    auto I = oracle::planted_root(field_for(t), 1 + static_cast<int>(rng.below(2)), 4, 3, rng);
    LiftState A = build_A_recurrence(I.P, I.y, I.alpha, I.d, {}, 1);
    LiftState B = build_A_recurrence(I.P, I.y, I.alpha, I.d, Budget{0, 64}, 77);
    for (int k = 1; k <= I.d; ++k)
      c.that(expand(compose_truncated(A, I.d, k)) == expand(compose_truncated(B, I.d, k)), "truncation " + std::to_string(k) + " differs across seeds");
    RootCertificate R1 = lift_root(I.P, I.y, I.d, 3, I.alpha), R2 = lift_root(I.P, I.y, I.d, 4242, I.alpha);
    c.that(expand(R1.root).with_nvars(I.P.nvars()) == expand(R2.root).with_nvars(I.P.nvars()), "lift_root differs across seeds");
    ++inst;
  }
  if (c.o.pass) c.o.detail = std::to_string(inst) + " instances, every truncation order identical across seeds";
  return c.o;
}

int sh(const std::string& cmd) {
  int st = std::system(cmd.c_str());
  return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

Outcome determinism() {
  Check c;
  std::vector<std::string> runs = {
      "lift-root -y x3 -d 2 root_quadratic.circ -o root.circ --cert lift.json",
      "lift-root -y x2 -d 2 rootless.circ -o none.circ --cert rootless.json",
      "factor -y x3 -d 2 three_lines.circ -o factor.circ --cert factor.json",
      "vnp-factor -y x2 -d 1 planted.esum -o factor.esum --cert vnp.json",
      "homog -k 2 root_quadratic.circ -o h2.circ",
      "coeffs -y x3 -d 2 root_quadratic.circ -o c.circ",
      "genset -y x3 --alpha 2 -d 2 root_quadratic.circ -o g.circ",
  };
  std::vector<fs::path> dirs;
  for (int k = 0; k < 2; ++k) {
    fs::path d = fs::temp_directory_path() / ("forge_accept_" + std::to_string(k) + "_" + std::to_string(::getpid()));
    fs::remove_all(d);
    fs::create_directories(d);
    for (const char* s : {"root_quadratic.circ", "rootless.circ", "three_lines.circ", "planted.esum"})
      fs::copy_file(fs::path(SAMPLES_DIR) / s, d / s);
    for (const auto& r : runs) sh("cd '" + d.string() + "' && '" FORGE_BIN "' --seed 2024 " + r + " > /dev/null 2>&1");
    dirs.push_back(d);
  }
  int files = 0, certs = 0;
  for (const auto& e : fs::directory_iterator(dirs[0])) {
    fs::path other = dirs[1] / e.path().filename();
    c.that(fs::exists(other), e.path().filename().string() + " missing in the second run");
    if (!fs::exists(other)) continue;
    c.that(read_file(e.path().string()) == read_file(other.string()), e.path().filename().string() + " differs between runs");
    ++files;
    if (e.path().filename().string().find(".json") != std::string::npos && e.path().filename() != "g.metrics.json") {
      json cert = json::parse(read_file(e.path().string()));
      if (!cert.contains("command")) continue;
      ++certs;
      VerifyResult v0 = verify_certificate(e.path().string()), v1 = verify_certificate(other.string());
      c.that(v0.pass && v1.pass, e.path().filename().string() + " does not verify");
      c.that(v0.digest == v1.digest, "verification digests differ");
    }
  }
  c.that(certs == 4, "expected 4 certificates, found " + std::to_string(certs));
  for (const auto& d : dirs) fs::remove_all(d);
  if (c.o.pass) c.o.detail = std::to_string(files) + " files byte-identical across two runs, " + std::to_string(certs) + " certificates verify";
  return c.o;
}

}  // namespace

int main() {
  std::vector<std::pair<std::string, std::function<Outcome()>>> crit = {
      {"Hensel root recovery", hensel_recovery},
      {"A_i step size law", step_size_law},
      {"generator-set law", generator_law},
      {"Taylor/Hasse identity", taylor_hasse},
      {"coefficient reconstruction", coeff_reconstruction},
      {"homogenization", homogenization},
      {"factor pipeline", factor_pipeline},
      {"NW design", nw_design_check},
      {"hitting-set mechanics", hitset_mechanics},
      {"Schwartz-Zippel bound", sz_bound},
      {"exp-sum contract", vnp_contract},
      {"uniqueness across seeds", uniqueness},
      {"certificate determinism", determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < crit.size(); ++i) {
    Outcome o;
    try {
      o = crit[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    std::printf("criterion %2zu %-28s %s  %s\n", i + 1, crit[i].first.c_str(), o.pass ? "PASS" : "FAIL", o.detail.c_str());
    std::fflush(stdout);
    failed += !o.pass;
  }
  return failed ? 1 : 0;
}
