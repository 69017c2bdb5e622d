#include <nterm/lattice.hpp>

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>

using namespace nterm;

TEST(QuasiNorm, SmallVectors) {
  const MultiIndex k({3, -4});
  EXPECT_DOUBLE_EQ(quasi_norm(k, 2.0), 5.0);
  EXPECT_DOUBLE_EQ(quasi_norm(k, 1.0), 7.0);
  EXPECT_DOUBLE_EQ(quasi_norm(k, kInf), 4.0);
}

TEST(QuasiNorm, RejectsBadExponent) {
  const MultiIndex k({1, 1});
  EXPECT_THROW(quasi_norm(k, 0.0), DomainError);
  EXPECT_THROW(quasi_norm(k, -1.0), DomainError);
}

TEST(QuasiNorm, QuasiNormBelowOne) {
  // (1 + 1)^(1/0.5) = 4
  EXPECT_NEAR(quasi_norm(MultiIndex({1, 1}), 0.5), 4.0, 1e-12);
}

TEST(EnumerateBall, Examples) {
  EXPECT_EQ(enumerate_ball(1, kInf, 2).size(), 9u);
  EXPECT_EQ(enumerate_ball(2, 1.0, 2).size(), 13u);
  const auto origin = enumerate_ball(0, 2.0, 3);
  ASSERT_EQ(origin.size(), 1u);
  EXPECT_EQ(origin[0], MultiIndex({0, 0, 0}));
}

TEST(EnumerateBall, LexicographicAndInside) {
  for (double r : {0.5, 1.0, 2.0, 3.0, kInf}) {
    const auto pts = enumerate_ball(4, r, 2);
    EXPECT_TRUE(std::is_sorted(pts.begin(), pts.end()));
    for (const auto& k : pts) EXPECT_LE(quasi_norm(k, r), 4.0 + 1e-9);
  }
}

TEST(EnumerateBall, Symmetric) {
  for (double r : {1.0, 2.0, kInf}) {
    const auto pts = enumerate_ball(5, r, 2);
    std::set<MultiIndex> s(pts.begin(), pts.end());
    for (const auto& k : pts) {
      EXPECT_TRUE(s.count(MultiIndex({k[1], k[0]})));
      EXPECT_TRUE(s.count(MultiIndex({-k[0], k[1]})));
      EXPECT_TRUE(s.count(MultiIndex({k[0], -k[1]})));
    }
  }
}

TEST(EnumerateBall, BudgetGuard) {
  EXPECT_THROW(enumerate_ball(100, kInf, 3, Budget{1000}), BudgetExceeded);
}

TEST(ShellCounts, Examples) {
  EXPECT_EQ(shell_counts(kInf, 2, 3).V, (std::vector<std::uint64_t>{1, 9, 25, 49}));
  EXPECT_EQ(shell_counts(1.0, 2, 2).V, (std::vector<std::uint64_t>{1, 5, 13}));
  EXPECT_EQ(shell_counts(1.0, 3, 1).V, (std::vector<std::uint64_t>{1, 7}));
}

TEST(ShellCounts, GaussCircle) {
  // lattice points in x^2 + y^2 <= m^2
  EXPECT_EQ(shell_counts(2.0, 2, 5).V, (std::vector<std::uint64_t>{1, 5, 13, 29, 49, 81}));
}

TEST(ShellCounts, MatchesEnumeration) {
  for (int d = 1; d <= 3; ++d)
    for (double r : {0.5, 1.0, 1.5, 2.0, 3.0, kInf}) {
      const int M = d == 3 ? 6 : 12;
      const auto sd = shell_counts(r, d, M);
      for (int m = 0; m <= M; ++m)
        EXPECT_EQ(sd.V[static_cast<std::size_t>(m)], enumerate_ball(m, r, d).size()) << "r=" << r << " d=" << d << " m=" << m;
    }
}

TEST(ShellCounts, IndependentScan) {
  for (int d = 1; d <= 3; ++d)
    for (double r : {1.0, kInf}) {
      const auto sd = shell_counts(r, d, 7);
      for (int m = 0; m <= 7; ++m) EXPECT_EQ(sd.V[static_cast<std::size_t>(m)], oracle::ball_norms(m, r, d).size());
    }
}

TEST(ShellCounts, Invariants) {
  for (int d = 1; d <= 3; ++d)
    for (double r : {1.0, 2.0, kInf}) {
      const auto sd = shell_counts(r, d, 20);
      EXPECT_EQ(sd.V[0], 1u);
      EXPECT_EQ(sd.nu[0], 1u);
      for (int m = 1; m <= 20; ++m) {
        EXPECT_GT(sd.V[m], sd.V[m - 1]);
        EXPECT_EQ(sd.V[m] - sd.V[m - 1], sd.nu[m]);
      }
    }
}

TEST(ShellCounts, ExactForMaxNorm) {
  for (int d = 1; d <= 4; ++d) {
    const auto sd = shell_counts(kInf, d, 50);
    for (int m = 0; m <= 50; ++m) EXPECT_EQ(sd.V[m], static_cast<std::uint64_t>(std::llround(std::pow(2 * m + 1, d))));
  }
}

TEST(ShellCounts, DiamondClosedForm) {
  const auto sd = shell_counts(1.0, 2, 100);
  for (std::uint64_t m = 0; m <= 100; ++m) EXPECT_EQ(sd.V[m], 2 * m * m + 2 * m + 1);
}

TEST(ShellCounts, MonotoneInR) {
  const std::vector<double> rs{0.5, 1.0, 1.5, 2.0, 4.0, kInf};
  for (int d = 1; d <= 3; ++d) {
    std::vector<ShellDecomposition> sds;
    for (double r : rs) sds.push_back(shell_counts(r, d, 10));
    for (std::size_t i = 1; i < rs.size(); ++i)
      for (int m = 0; m <= 10; ++m) EXPECT_LE(sds[i - 1].V[m], sds[i].V[m]);
  }
}

TEST(ShellCounts, RejectsBadInput) {
  EXPECT_THROW(shell_counts(kInf, 0, 3), DomainError);
  EXPECT_THROW(shell_counts(kInf, 2, 0), DomainError);
  EXPECT_THROW(shell_counts(0.0, 2, 3), DomainError);
}

TEST(GrowthFit, MaxNormD2) {
  const auto fit = fit_growth_bounds(shell_counts(kInf, 2, 64), 4);
  EXPECT_NEAR(fit.M0, 4.0, 0.04);
  EXPECT_TRUE(fit.ok);
}

TEST(GrowthFit, DiamondD2) {
  const auto fit = fit_growth_bounds(shell_counts(1.0, 2, 64), 4);
  EXPECT_NEAR(fit.M0, 2.0, 0.1);
  EXPECT_TRUE(fit.ok);
}

TEST(GrowthFit, LineIsExact) {
  const auto fit = fit_growth_bounds(shell_counts(1.0, 1, 64), 2);
  EXPECT_NEAR(fit.M0, 2.0, 1e-12);
}

TEST(GrowthFit, BoundsHoldOnRange) {
  for (int d = 1; d <= 3; ++d)
    for (double r : {1.0, 2.0, kInf}) {
      const auto sd = shell_counts(r, d, d == 3 ? 32 : 64);
      const int k0 = 3;
      const auto fit = fit_growth_bounds(sd, k0);
      ASSERT_GT(fit.M0, 0.0);
      for (int m = k0 + 1; m <= sd.m_max(); ++m) {
        const double V = static_cast<double>(sd.V[m]);
        EXPECT_LT(fit.M0 * std::pow(std::max(0.0, m - fit.c1), d), V);
        EXPECT_LE(V, fit.M0 * std::pow(m + fit.c2, d) * (1 + 1e-12));
      }
    }
}

TEST(GrowthFit, DegenerateBurnIn) {
  const auto sd = shell_counts(kInf, 2, 8);
  EXPECT_FALSE(fit_growth_bounds(sd, 8).ok);
  EXPECT_FALSE(fit_growth_bounds(sd, 0).ok);
}
