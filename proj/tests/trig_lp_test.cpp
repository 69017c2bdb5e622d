#include <nterm/trig_lp.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <set>

using namespace nterm;

namespace {

CoefficientSequence random_poly(std::mt19937_64& rng, int d, int entries, std::int64_t K) {
  std::uniform_int_distribution<std::int64_t> coord(-K, K);
  std::normal_distribution<double> g;
  CoefficientSequence f(d);
  while (static_cast<int>(f.size()) < entries) {
    std::vector<std::int64_t> k(static_cast<std::size_t>(d));
    for (auto& c : k) c = coord(rng);
    f.set(MultiIndex(k), {g(rng), g(rng)});
  }
  return f;
}

std::vector<MultiIndex> random_gamma(std::mt19937_64& rng, std::size_t n, std::int64_t box) {
  std::uniform_int_distribution<std::int64_t> coord(-box, box);
  std::set<std::int64_t> picked;
  while (picked.size() < n) picked.insert(coord(rng));
  std::vector<MultiIndex> out;
  for (auto k : picked) out.push_back(MultiIndex({k}));
  return out;
}

} // namespace

TEST(Grid, Constant) {
  CoefficientSequence f(2);
  f.set(MultiIndex({0, 0}), 1.0);
  for (const auto& z : evaluate_on_grid(f, {2, 5})) EXPECT_EQ(z, std::complex<double>(1.0));
}

TEST(Grid, SingleFrequency) {
  CoefficientSequence f(1);
  f.set(MultiIndex({1}), 1.0);
  const auto s = evaluate_on_grid(f, {1, 4});
  const std::complex<double> want[] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  for (int j = 0; j < 4; ++j) {
    EXPECT_NEAR(s[j].real(), want[j].real(), 1e-15);
    EXPECT_NEAR(s[j].imag(), want[j].imag(), 1e-15);
  }
}

TEST(Grid, DirectEvaluation) {
  std::mt19937_64 rng(2);
  const auto f = random_poly(rng, 2, 9, 4);
  const GridSpec g{2, 7};
  const auto s = evaluate_on_grid(f, g);
  std::complex<double> total;
  for (const auto& [k, a] : f.entries()) total += a;
  EXPECT_NEAR(std::abs(s[0] - total), 0.0, 1e-12);
  for (int j0 = 0; j0 < 7; ++j0)
    for (int j1 = 0; j1 < 7; ++j1) {
      std::complex<double> v;
      const double x0 = 2 * std::numbers::pi * j0 / 7, x1 = 2 * std::numbers::pi * j1 / 7;
      for (const auto& [k, a] : f.entries()) v += a * std::polar(1.0, k[0] * x0 + k[1] * x1);
      EXPECT_NEAR(std::abs(s[static_cast<std::size_t>(j0 * 7 + j1)] - v), 0.0, 1e-12);
    }
}

TEST(Grid, Budget) {
  CoefficientSequence f(3);
  f.set(MultiIndex({0, 0, 1}), 1.0);
  EXPECT_THROW(evaluate_on_grid(f, {3, 1000}, Budget{1000000}), BudgetExceeded);
  EXPECT_THROW(evaluate_on_grid(f, {2, 10}), DomainError);
}

TEST(LpNorm, Examples) {
  CoefficientSequence e(1);
  e.set(MultiIndex({3}), 1.0);
  for (double p : {1.0, 1.5, 2.0, 4.0, 7.0}) EXPECT_NEAR(lp_norm(e, p, {1, 16}).value, 1.0, 1e-14);

  CoefficientSequence f(1);
  f.set(MultiIndex({0}), 1.0);
  f.set(MultiIndex({1}), 1.0);
  const auto n2 = lp_norm(f, 2.0, exact_grid(f, 2));
  EXPECT_NEAR(n2.value, std::sqrt(2.0), 1e-14);
  EXPECT_EQ(n2.kind, Quadrature::exact);

  for (std::int64_t m : {1, 5, 20}) {
    CoefficientSequence D(1);
    for (std::int64_t k = -m; k <= m; ++k) D.set(MultiIndex({k}), 1.0);
    EXPECT_NEAR(lp_norm(D, 2.0, exact_grid(D, 2)).value, std::sqrt(2.0 * m + 1), 1e-12);
  }
  EXPECT_THROW(lp_norm(f, 0.5, {1, 8}), DomainError);
}

TEST(LpNorm, QuadratureTag) {
  std::mt19937_64 rng(4);
  const auto f = random_poly(rng, 1, 5, 6);
  EXPECT_EQ(lp_norm(f, 4.0, {1, 25}).kind, Quadrature::exact);
  EXPECT_EQ(lp_norm(f, 4.0, {1, 24}).kind, Quadrature::riemann_sum);
  EXPECT_EQ(lp_norm(f, 3.0, {1, 100}).kind, Quadrature::riemann_sum);
}

TEST(LpNorm, Parseval) {
  std::mt19937_64 rng(8);
  for (int d : {1, 2})
    for (int i = 0; i < 10; ++i) {
      const auto f = random_poly(rng, d, 8, 5);
      const double lp = lp_norm(f, 2.0, exact_grid(f, 2)).value;
      const double sp = sp_norm(f, 2.0);
      EXPECT_NEAR(lp, sp, 1e-10 * sp);
    }
}

TEST(LpNorm, RefinementStable) {
  std::mt19937_64 rng(9);
  for (int d : {1, 2})
    for (int p : {2, 4, 6}) {
      const auto f = random_poly(rng, d, 6, 4);
      const auto g = exact_grid(f, p);
      const double a = lp_norm(f, p, g).value;
      const double b = lp_norm(f, p, {d, 2 * g.points_per_dim}).value;
      EXPECT_NEAR(a, b, 1e-6 * a);
    }
}

TEST(ExponentialSum, SingleAndDirichlet) {
  for (double p : {1.0, 2.0, 4.0}) EXPECT_NEAR(exponential_sum_norm({MultiIndex({5})}, p, {1, 64}).value, 1.0, 1e-14);
  std::vector<MultiIndex> gamma;
  for (std::int64_t k = -7; k <= 7; ++k) gamma.push_back(MultiIndex({k}));
  const auto r = exponential_sum_norm(gamma, 2.0, {1, 31});
  EXPECT_NEAR(r.value, std::sqrt(15.0), 1e-12);
  EXPECT_TRUE(r.within_hypothesis);
  EXPECT_THROW(exponential_sum_norm({MultiIndex({1}), MultiIndex({1})}, 2.0, {1, 8}), DomainError);
  EXPECT_THROW(exponential_sum_norm({}, 2.0, {1, 8}), DomainError);
}

TEST(ExponentialSum, RatioWindowP4) {
  std::mt19937_64 rng(12);
  for (std::size_t n = 8; n <= 256; n *= 2) {
    double lo = kInf, hi = 0;
    for (int t = 0; t < 20; ++t) {
      const auto gamma = random_gamma(rng, n, 2 * static_cast<std::int64_t>(n));
      std::int64_t K = 0;
      for (const auto& k : gamma) K = std::max(K, k.max_abs());
      const auto res = exponential_sum_norm(gamma, 4.0, {1, 8 * K + 1});
      EXPECT_TRUE(res.within_hypothesis);
      const double ratio = res.value / std::pow(static_cast<double>(n), 0.75);
      lo = std::min(lo, ratio);
      hi = std::max(hi, ratio);
    }
    EXPECT_LE(hi, 1.0 + 1e-9);
    EXPECT_GT(lo, 0.05);
  }
}

TEST(HausdorffYoung, Cases) {
  CoefficientSequence e(2);
  e.set(MultiIndex({1, -2}), std::polar(2.0, 0.3));
  EXPECT_NEAR(hausdorff_young_gap(e, 4.0, {2, 9}), 0.0, 1e-14);
  std::mt19937_64 rng(13);
  for (int i = 0; i < 10; ++i) {
    const auto f = random_poly(rng, 1, 9, 10);
    EXPECT_NEAR(hausdorff_young_gap(f, 2.0, exact_grid(f, 2)), 0.0, 1e-12 * sp_norm(f, 2.0));
  }
  for (int i = 0; i < 100; ++i) {
    const auto gamma = random_gamma(rng, 1 + i % 30, 40);
    CoefficientSequence f(1);
    for (const auto& k : gamma) f.set(k, 1.0);
    EXPECT_GE(hausdorff_young_gap(f, 4.0, exact_grid(f, 4)), -1e-9);
  }
  EXPECT_THROW(hausdorff_young_gap(e, 1.5, {2, 9}), DomainError);
}
