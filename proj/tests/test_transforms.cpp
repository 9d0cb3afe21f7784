#include <gtest/gtest.h>

#include "forge/transforms.hpp"
#include "oracle.hpp"

using namespace forge;

namespace {

const char* kSquarePlus =
    "field rationals\nnvars 2\ng1 = input x1\ng2 = input x2\ng3 = add g1 g2\ng4 = mul g3 g3\ng5 = add g4 g1\noutput g5\n";

DensePoly x(int n, int v) { return DensePoly::variable(oracle::Q(), n, v); }
DensePoly c(int n, long long k) { return DensePoly::constant(oracle::Q(), n, Fe::from_int(oracle::Q(), k)); }

// P(x + a y, y) on the dense side
DensePoly shifted(const DensePoly& P, const std::vector<Fe>& a, int y) {
  std::map<int, DensePoly> sub;
  DensePoly Y = DensePoly::variable(P.field(), P.nvars(), y);
  for (int v = 0; v < P.nvars(); ++v)
    if (v != y && !a[static_cast<std::size_t>(v)].is_zero()) sub.emplace(v, DensePoly::variable(P.field(), P.nvars(), v) + Y.scaled(a[static_cast<std::size_t>(v)]));
  return compose_dense(P, sub);
}

Fe y_coeff(const DensePoly& P, int y, int e) {
  DensePoly acc(P.field(), P.nvars());
  for (const auto& [m, cf] : P.terms())
    if (static_cast<int>(m[static_cast<std::size_t>(y)]) == e) {
      bool pure = true;
      for (std::size_t v = 0; v < m.size(); ++v)
        if (static_cast<int>(v) != y && m[v]) pure = false;
      if (!pure) return Fe::zero(P.field());  // not a constant coefficient
      return cf;
    }
  return Fe::zero(P.field());
}

}  // namespace

TEST(Homogenize, Examples) {
  Circuit C = parse_circuit(kSquarePlus);
  DensePoly s = x(2, 0) + x(2, 1);
  EXPECT_EQ(expand(homogenize(C, 2)), s * s);
  Circuit K = parse_circuit("field rationals\nnvars 1\ng1 = input x1\ng2 = const 4\ng3 = add g1 g2\ng4 = mul g3 g3\noutput g4\n");
  EXPECT_EQ(expand(homogenize(K, 0)), c(1, 16));
}

TEST(Homogenize, ComponentsSumAndSizeLaw) {
  Rng rng(31, "homog");
  for (int i = 0; i < 150; ++i) {
    FieldConfig f = i % 2 ? oracle::P62() : oracle::Q();
    int n = 1 + static_cast<int>(rng.below(4));
    Circuit C = oracle::random_circuit(f, n, 4 + static_cast<int>(rng.below(10)), rng);
    long long deg = formal_degree(C);
    if (deg > 8) continue;
    long long s = metrics(C).size;
    DensePoly sum(f, n);
    for (int k = 0; k <= deg; ++k) {
      Circuit H = homogenize(C, k);
      ASSERT_LE(metrics(H).size, kHomogConst * k * k * s + kHomogConst * (k + 1));
      DensePoly h = expand(H);
      ASSERT_EQ(h, homog_component_dense(expand(C), k));
      sum = sum + h;
    }
    ASSERT_EQ(sum, expand(C));
  }
}

TEST(YCoeffs, Examples) {
  // 3y^2 + x y + 7, y = x2
  Circuit C = parse_circuit(
      "field rationals\nnvars 2\ng1 = input x1\ng2 = input x2\ng3 = const 3\ng4 = mul g3 g2 g2\ng5 = mul g1 g2\ng6 = const 7\ng7 = add g4 g5 g6\noutput g7\n");
  auto cs = extract_y_coeffs(C, 1, 2);
  ASSERT_EQ(cs.size(), 3u);
  EXPECT_EQ(expand(cs[0]), c(2, 7));
  EXPECT_EQ(expand(cs[1]), x(2, 0));
  EXPECT_EQ(expand(cs[2]), c(2, 3));
  Circuit N = parse_circuit(kSquarePlus);
  N.grow_vars(3);
  auto ns = extract_y_coeffs(N, 2, 2);
  EXPECT_EQ(expand(ns[0]), expand(N));
  EXPECT_TRUE(expand(ns[1]).is_zero());
  EXPECT_TRUE(expand(ns[2]).is_zero());
}

TEST(YCoeffs, FieldTooSmall) {
  Circuit C(FieldConfig::prime(3), 1);
  int y = C.input(0);
  C.add_output(C.mul({y, y, y, y}));
  try {
    extract_y_coeffs(C, 0, 4);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::FieldTooSmall);
  }
}

TEST(YCoeffs, ReconstructionAndDepth) {
  Rng rng(32, "coeffs");
  for (int i = 0; i < 150; ++i) {
    FieldConfig f = i % 2 ? oracle::P62() : oracle::Q();
    int n = 2 + static_cast<int>(rng.below(3));
    Circuit C = oracle::random_circuit(f, n, 4 + static_cast<int>(rng.below(10)), rng);
    if (formal_degree(C) > 8) continue;
    int y = static_cast<int>(rng.below(static_cast<u64>(n)));
    int dmax = static_cast<int>(formal_degree_in(C, y));
    auto cs = extract_y_coeffs(C, y, dmax);
    DensePoly Y = DensePoly::variable(f, n, y), acc(f, n);
    for (int j = 0; j <= dmax; ++j) {
      ASSERT_LE(metrics(cs[static_cast<std::size_t>(j)]).depth, metrics(C).depth);
      acc = acc + expand(cs[static_cast<std::size_t>(j)]) * Y.pow(static_cast<unsigned>(j));
    }
    ASSERT_EQ(acc, expand(C));
  }
}

TEST(Truncate, Examples) {
  Circuit C = parse_circuit("field rationals\nnvars 1\ng1 = input x1\ng2 = mul g1 g1 g1\ng3 = const 1\ng4 = add g3 g1 g2\noutput g4\n");
  EXPECT_EQ(expand(truncate_deg(C, 1)), c(1, 1) + x(1, 0));
  EXPECT_EQ(expand(truncate_deg(C, 5)), expand(C));
}

TEST(Truncate, MatchesDense) {
  Rng rng(33, "truncate");
  for (int i = 0; i < 100; ++i) {
    FieldConfig f = i % 2 ? oracle::P62() : oracle::Q();
    Circuit C = oracle::random_circuit(f, 3, 10, rng);
    if (formal_degree(C) > 8) continue;
    int d = static_cast<int>(rng.below(6));
    Circuit T = truncate_deg(C, d);
    ASSERT_EQ(expand(T), truncate_dense(expand(C), d));
    EXPECT_LE(metrics(T).depth, metrics(C).depth + 1);
  }
}

TEST(Hasse, Examples) {
  Circuit C = parse_circuit("field rationals\nnvars 1\ng1 = input x1\ng2 = mul g1 g1 g1\noutput g2\n");
  EXPECT_EQ(expand(hasse_derivative_circuit(C, 0, 2)), x(1, 0).scaled(Fe::from_int(oracle::Q(), 3)));
  EXPECT_EQ(expand(hasse_derivative_circuit(C, 0, 0)), expand(C));
}

TEST(Hasse, MatchesDense) {
  Rng rng(34, "hasse");
  for (int i = 0; i < 150; ++i) {
    FieldConfig f = i % 2 ? oracle::P62() : oracle::Q();
    int n = 2 + static_cast<int>(rng.below(2));
    Circuit C = oracle::random_circuit(f, n, 4 + static_cast<int>(rng.below(8)), rng);
    if (formal_degree(C) > 8) continue;
    int y = static_cast<int>(rng.below(static_cast<u64>(n)));
    int j = static_cast<int>(rng.below(static_cast<u64>(formal_degree_in(C, y) + 1)));
    Circuit H = hasse_derivative_circuit(C, y, j);
    ASSERT_EQ(expand(H), hasse_derivative_dense(expand(C), y, j));
    EXPECT_LE(metrics(H).depth, metrics(C).depth);
  }
}

TEST(Translate, ExamplesAndRoundTrip) {
  auto f = oracle::Q();
  Circuit sq = parse_circuit("field rationals\nnvars 1\ng1 = input x1\ng2 = mul g1 g1\noutput g2\n");
  EXPECT_EQ(expand(translate(sq, {Fe::one(f)})), x(1, 0) * x(1, 0) + x(1, 0).scaled(Fe::from_int(f, 2)) + c(1, 1));
  EXPECT_EQ(expand(translate(sq, {Fe::zero(f)})), expand(sq));
  EXPECT_THROW(translate(sq, {Fe::one(f), Fe::one(f)}), Error);
  Rng rng(35, "translate");
  for (int i = 0; i < 60; ++i) {
    Circuit C = oracle::random_circuit(f, 3, 10, rng);
    std::vector<Fe> v;
    for (int k = 0; k < 3; ++k) v.push_back(oracle::small(f, rng));
    Circuit T = translate(C, v);
    EXPECT_LE(metrics(T).depth, metrics(C).depth + 1);
    EXPECT_EQ(expand(translate(T, negated(v))), expand(C));
  }
}

TEST(Monic, Examples) {
  auto f = oracle::Q();
  // x1 * y, y = x2
  Circuit C = parse_circuit("field rationals\nnvars 2\ng1 = input x1\ng2 = input x2\ng3 = mul g1 g2\noutput g3\n");
  MonicForm M = make_monic(C, 1, 2, 1);
  EXPECT_FALSE(M.shift[0].is_zero());
  DensePoly want = shifted(expand(C), M.shift, 1).scaled(M.leading_unit.inv());
  EXPECT_EQ(expand(M.circuit), want);
  EXPECT_TRUE(y_coeff(expand(M.circuit), 1, 2).is_one());
  // a = (1): y^2 + x1 y
  if (M.shift[0].is_one()) {
    EXPECT_EQ(expand(M.circuit), x(2, 1) * x(2, 1) + x(2, 0) * x(2, 1));
  }

  Circuit mon = parse_circuit("field rationals\nnvars 2\ng1 = input x1\ng2 = input x2\ng3 = mul g2 g2\ng4 = add g3 g1\noutput g4\n");
  MonicForm A = make_monic(mon, 1, 2, 1);
  EXPECT_TRUE(A.shift[0].is_zero());
  EXPECT_EQ(A.trials, 1);
  EXPECT_EQ(expand(A.circuit), expand(mon));

  try {
    make_monic(C, 1, 3, 1);  // r misdeclared: H_3 is zero
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::SearchExhausted);
  }
  (void)f;
}

TEST(Monic, FactorsOfMonicFormAreMonic) {
  Rng rng(36, "gauss");
  for (int i = 0; i < 40; ++i) {
    FieldConfig f = i % 2 ? oracle::P62() : oracle::Q();
    int n = 3, y = 2;
    DensePoly a = oracle::random_dense(f, n, 2, 4, rng), b = oracle::random_dense(f, n, 2, 4, rng);
    if (a.total_degree() < 1 || b.total_degree() < 1) continue;
    DensePoly P = a * b;
    long long r = P.total_degree();
    MonicForm M = make_monic(oracle::naive_circuit(P), y, r, static_cast<u64>(i));
    ASSERT_TRUE(y_coeff(expand(M.circuit), y, static_cast<int>(r)).is_one());
    DensePoly as = shifted(a, M.shift, y), bs = shifted(b, M.shift, y);
    EXPECT_EQ(as.degree_in(y), a.total_degree());
    EXPECT_FALSE(y_coeff(as, y, static_cast<int>(a.total_degree())).is_zero());
    EXPECT_FALSE(y_coeff(bs, y, static_cast<int>(b.total_degree())).is_zero());
  }
}

TEST(GeneratorSet, Example) {
  auto f = oracle::Q();
  // y^2 - (1 + x)^2, y = x2
  Circuit P = parse_circuit(
      "field rationals\nnvars 2\ng1 = input x1\ng2 = input x2\ng3 = mul g2 g2\ng4 = const 1\ng5 = add g4 g1\ng6 = mul g5 g5\ng7 = const -1\n"
      "g8 = mul g7 g6\ng9 = add g3 g8\noutput g9\n");
  GeneratorSet G = generator_set(P, 1, Fe::one(f), 2);
  ASSERT_EQ(G.members.size(), 1u);
  EXPECT_EQ(G.members[0].j, 0);
  EXPECT_EQ(expand(G.members[0].g), (x(2, 0).scaled(Fe::from_int(f, -2)) - x(2, 0) * x(2, 0)));
  EXPECT_EQ(G.zero_test, "oracle");
}

TEST(GeneratorSet, LawsOnRandomInputs) {
  Rng rng(37, "genset");
  for (int i = 0; i < 80; ++i) {
    FieldConfig f = i % 2 ? oracle::P62() : oracle::Q();
    int n = 3, y = 2;
    Circuit P = oracle::random_circuit(f, n, 4 + static_cast<int>(rng.below(8)), rng);
    if (formal_degree(P) > 7) continue;
    int d = 1 + static_cast<int>(rng.below(4));
    Fe alpha = oracle::small(f, rng, 3);
    GeneratorSet G = generator_set(P, y, alpha, d);
    ASSERT_LE(G.members.size(), static_cast<std::size_t>(d + 1));
    DensePoly Pd = expand(P);
    std::map<int, DensePoly> at{{y, DensePoly::constant(f, n, alpha)}};
    std::size_t k = 0;
    long long r = std::max<long long>(1, formal_degree(P)), s = std::max<long long>(1, metrics(P).size);
    for (int j = 0; j <= d; ++j) {
      DensePoly Dj = compose_dense(hasse_derivative_dense(Pd, y, j), at);
      DensePoly want = truncate_dense(Dj, d) - DensePoly::constant(f, n, Dj.constant_term());
      if (want.is_zero()) continue;
      ASSERT_LT(k, G.members.size());
      ASSERT_EQ(G.members[k].j, j);
      DensePoly got = expand(G.members[k].g);
      ASSERT_EQ(got, want);
      EXPECT_TRUE(got.constant_term().is_zero());
      EXPECT_LE(got.total_degree(), d);
      EXPECT_LE(metrics(G.members[k].g).size, kGenConst * s * r * r * r * r);
      ++k;
    }
    EXPECT_EQ(k, G.members.size());
  }
}

TEST(GeneratorSet, SzPathAgreesWithOracle) {
  Rng rng(38, "genset-sz");
  for (int i = 0; i < 20; ++i) {
    Circuit P = oracle::random_circuit(oracle::Q(), 3, 8, rng);
    if (formal_degree(P) > 6) continue;
    Fe alpha = Fe::from_int(P.field(), 1);
    GeneratorSet A = generator_set(P, 2, alpha, 3);
    GeneratorSet B = generator_set(P, 2, alpha, 3, Budget{0, 64}, 5);
    EXPECT_EQ(B.zero_test, "sz");
    ASSERT_EQ(A.members.size(), B.members.size());
    for (std::size_t k = 0; k < A.members.size(); ++k) EXPECT_EQ(A.members[k].j, B.members[k].j);
  }
}
