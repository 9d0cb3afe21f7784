#include <gtest/gtest.h>

#include <set>

#include "forge/transforms.hpp"
#include "oracle.hpp"

using namespace forge;

namespace {

DensePoly var(int n, int v) { return DensePoly::variable(oracle::Q(), n, v); }
DensePoly cst(int n, long long c) { return DensePoly::constant(oracle::Q(), n, Fe::from_int(oracle::Q(), c)); }

}  // namespace

TEST(Dense, ExpandByHand) {
  Circuit C = parse_circuit("field rationals\nnvars 2\ng1 = input x1\ng2 = input x2\ng3 = add g1 g2\ng4 = mul g3 g3\noutput g4\n");
  DensePoly p = expand(C);
  EXPECT_EQ(p.size(), 3u);
  EXPECT_EQ(p.coeff({1, 1}).str(), "2");
  EXPECT_TRUE(expand(constant_circuit(oracle::Q(), 2, Fe::zero(oracle::Q()))).is_zero());
}

TEST(Dense, ExpandAgreesWithNaiveOracle) {
  Rng rng(1, "expand");
  for (int i = 0; i < 300; ++i) {
    FieldConfig f = i % 2 ? oracle::P62() : oracle::Q();
    Circuit C = oracle::random_circuit(f, 3, 12, rng);
    if (formal_degree(C) > 12) continue;
    ASSERT_EQ(expand(C), oracle::naive_expand(C).dense());
  }
}

TEST(Dense, ExpandThenSubstituteOrdersAgree) {
  Rng rng(2, "order");
  for (int i = 0; i < 60; ++i) {
    Circuit C = oracle::random_circuit(oracle::Q(), 3, 6, rng);
    Circuit D = oracle::random_circuit(oracle::Q(), 3, 4, rng);
    if (formal_degree(C) * formal_degree(D) > 20) continue;
    EXPECT_EQ(expand(substitute(C, {{1, D}})), compose_dense(expand(C), {{1, expand(D)}}));
  }
}

TEST(Dense, Budget) {
  Circuit C = parse_circuit("field rationals\nnvars 2\ng1 = input x1\ng2 = input x2\ng3 = add g1 g2\ng4 = mul g3 g3 g3 g3\noutput g4\n");
  try {
    expand(C, Budget{3, 64});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::BudgetExceeded);
  }
  EXPECT_THROW(expand(C, Budget{1000, 3}), Error);
  EXPECT_NO_THROW(expand(C, Budget{5, 4}));
}

TEST(Dense, DividesPlanted) {
  int n = 2;
  DensePoly f = var(n, 1) - var(n, 0);
  EXPECT_EQ(divides(f, f * f * (var(n, 1) + cst(n, 1))).multiplicity, 2);
  EXPECT_FALSE(divides(f, var(n, 1) + var(n, 0)).divides);
  EXPECT_THROW(divides(DensePoly(oracle::Q(), n), f), Error);
}

TEST(Dense, DividesRandomPlanted) {
  Rng rng(4, "divides");
  for (int i = 0; i < 100; ++i) {
    FieldConfig f = i % 2 ? oracle::P62() : oracle::Q();
    DensePoly a = oracle::random_dense(f, 3, 2, 3, rng);
    DensePoly g = oracle::random_dense(f, 3, 2, 3, rng);
    if (a.total_degree() < 1 || g.is_zero()) continue;
    int m = 1 + static_cast<int>(rng.below(3));
    DensePoly P = a.pow(static_cast<unsigned>(m)) * g;
    Divisibility dv = divides(a, P);
    ASSERT_TRUE(dv.divides);
    EXPECT_GE(dv.multiplicity, m);
    EXPECT_FALSE(divides(a, a * g + DensePoly::constant(f, 3, Fe::one(f))).divides);
    auto quo = exact_divide(a * g, a);
    ASSERT_TRUE(quo.has_value());
    EXPECT_EQ(*quo, g);
  }
}

TEST(Dense, HasseByHand) {
  DensePoly y3 = var(1, 0).pow(3);
  EXPECT_EQ(hasse_derivative_dense(y3, 0, 2), var(1, 0).scaled(Fe::from_int(oracle::Q(), 3)));
  EXPECT_EQ(hasse_derivative_dense(y3, 0, 0), y3);
  EXPECT_TRUE(hasse_derivative_dense(y3, 0, 4).is_zero());
}

// P(y + z) = sum_k z^k P^(k)(y), z an extra variable
TEST(Dense, TaylorIdentity) {
  Rng rng(6, "taylor");
  for (int i = 0; i < 100; ++i) {
    FieldConfig f = i % 2 ? oracle::P62() : oracle::Q();
    DensePoly P = oracle::random_dense(f, 2, 6, 6, rng).with_nvars(3);
    DensePoly Y = DensePoly::variable(f, 3, 1), Z = DensePoly::variable(f, 3, 2);
    DensePoly lhs = compose_dense(P, {{1, Y + Z}});
    DensePoly rhs(f, 3);
    for (int k = 0; k <= 6; ++k) rhs = rhs + Z.pow(static_cast<unsigned>(k)) * hasse_derivative_dense(P, 1, k);
    ASSERT_EQ(lhs, rhs);
  }
}

TEST(Dense, HomogeneousParts) {
  int n = 1;
  DensePoly P = cst(n, 1) + var(n, 0) + var(n, 0).pow(2);
  EXPECT_EQ(homog_component_dense(P, 1), var(n, 0));
  Rng rng(8, "homog");
  for (int i = 0; i < 50; ++i) {
    DensePoly Q = oracle::random_dense(oracle::Q(), 3, 5, 8, rng);
    DensePoly sum(oracle::Q(), 3);
    for (int k = 0; k <= 5; ++k) sum = sum + homog_component_dense(Q, k);
    EXPECT_EQ(sum, Q);
    DensePoly H3 = homog_component_dense(Q, 3);
    EXPECT_TRUE(homog_component_dense(H3, 2).is_zero());
    EXPECT_EQ(truncate_dense(Q, 2), homog_component_dense(Q, 0) + homog_component_dense(Q, 1) + homog_component_dense(Q, 2));
  }
}

TEST(Dense, UnivariateRoots) {
  DensePoly y = var(1, 0);
  auto r = univariate_roots((y - cst(1, 1)).pow(2) * (y - cst(1, 3)));
  ASSERT_EQ(r.size(), 2u);
  EXPECT_EQ(r[0].first.str(), "1");
  EXPECT_EQ(r[0].second, 2);
  EXPECT_EQ(r[1].first.str(), "3");
  EXPECT_EQ(r[1].second, 1);
  EXPECT_TRUE(univariate_roots(y * y + cst(1, 1)).empty());
  EXPECT_THROW(univariate_roots(DensePoly(oracle::Q(), 1)), Error);
}

TEST(Dense, UnivariateRootsRationalPlanted) {
  auto f = oracle::Q();
  DensePoly y = var(1, 0);
  // roots -2/3, 5/7 and 4, scaled by 6
  DensePoly P = (y.scaled(Fe::from_int(f, 3)) + cst(1, 2)) * (y.scaled(Fe::from_int(f, 7)) - cst(1, 5)) * (y - cst(1, 4)) * cst(1, 6);
  auto r = univariate_roots(P);
  ASSERT_EQ(r.size(), 3u);
  std::set<std::string> got;
  for (auto& [a, m] : r) got.insert(a.str());
  EXPECT_EQ(got, (std::set<std::string>{"-2/3", "5/7", "4"}));
}

TEST(Dense, UnivariateRootsPrimePlanted) {
  auto f = FieldConfig::prime(1000000007);
  Rng rng(10, "roots");
  for (int i = 0; i < 20; ++i) {
    DensePoly y = DensePoly::variable(f, 1, 0);
    DensePoly P = DensePoly::constant(f, 1, Fe::one(f));
    std::set<u64> planted;
    for (int k = 0; k < 5; ++k) {
      u64 a = rng.below(1000000007);
      planted.insert(a);
      P = P * (y - DensePoly::constant(f, 1, Fe::from_u64(f, a)));
    }
    P = P * (y * y + DensePoly::constant(f, 1, Fe::from_int(f, 5)));  // any extra roots must still be roots
    std::set<u64> got;
    for (auto& [a, m] : univariate_roots(P)) got.insert(a.residue());
    for (u64 a : planted) EXPECT_TRUE(got.count(a));
    for (u64 a : got)
      if (!planted.count(a)) {
        EXPECT_TRUE(P.eval({Fe::from_u64(f, a)}).is_zero());
      }
  }
}

TEST(Dense, TranslateMatchesCircuitTranslate) {
  Rng rng(12, "translate");
  for (int i = 0; i < 50; ++i) {
    Circuit C = oracle::random_circuit(oracle::Q(), 3, 8, rng);
    std::vector<Fe> c;
    for (int v = 0; v < 3; ++v) c.push_back(oracle::small(C.field(), rng));
    DensePoly viaSub = compose_dense(expand(C), {{0, var(3, 0) + DensePoly::constant(oracle::Q(), 3, c[0])},
                                                 {1, var(3, 1) + DensePoly::constant(oracle::Q(), 3, c[1])},
                                                 {2, var(3, 2) + DensePoly::constant(oracle::Q(), 3, c[2])}});
    EXPECT_EQ(translate_dense(expand(C), c), viaSub);
    EXPECT_EQ(expand(translate(C, c)), viaSub);
  }
}
