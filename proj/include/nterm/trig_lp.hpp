#ifndef NTERM_TRIG_LP_HPP
#define NTERM_TRIG_LP_HPP

// Trigonometric polynomials sampled on the uniform grid x_j = 2 pi j / N of
// T^d, and L_p(T^d) norms by the rectangle rule. For even integer p and
// N > p * max|k|_inf the rule is exact: |f|^p is itself a trigonometric
// polynomial of degree p * max|k|_inf.

#include <nterm/approx.hpp>
#include <nterm/error.hpp>
#include <nterm/lattice.hpp>

#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <numbers>
#include <set>
#include <vector>

namespace nterm {

struct GridSpec {
  int d = 1;
  std::int64_t points_per_dim = 2;

  std::uint64_t total(Budget budget = Budget::from_env()) const {
    if (d < 1) throw DomainError("GridSpec: d must be >= 1");
    if (points_per_dim < 1) throw DomainError("GridSpec: N must be >= 1");
    std::uint64_t t = 1;
    for (int i = 0; i < d; ++i) {
      if (t > budget.points / static_cast<std::uint64_t>(points_per_dim))
        throw BudgetExceeded("grid size N^d exceeds the point budget");
      t *= static_cast<std::uint64_t>(points_per_dim);
    }
    return t;
  }
};

/// The smallest grid on which the rectangle rule integrates |f|^p exactly for
/// even p: N = p * max|k|_inf + 1.
inline GridSpec exact_grid(const CoefficientSequence& f, int even_p) {
  return {f.dim(), static_cast<std::int64_t>(even_p) * f.max_frequency() + 1};
}

namespace detail {

// e^{2 pi i t / N}, t = 0..N-1
inline std::vector<std::complex<double>> roots_of_unity(std::int64_t N) {
  std::vector<std::complex<double>> w(static_cast<std::size_t>(N));
  for (std::int64_t t = 0; t < N; ++t) {
    const double a = 2.0 * std::numbers::pi * static_cast<double>(t) / static_cast<double>(N);
    w[static_cast<std::size_t>(t)] = {std::cos(a), std::sin(a)};
  }
  return w;
}

inline std::size_t phase(std::int64_t k, std::int64_t j, std::int64_t N) {
  std::int64_t t = (k % N) * j % N;
  if (t < 0) t += N;
  return static_cast<std::size_t>(t);
}

// Samples in row-major order (first coordinate slowest). Entries are grouped
// by their first coordinate and the remaining d-1 coordinates are evaluated
// recursively, so the cost is about N^d times the number of distinct first
// coordinates.
inline std::vector<std::complex<double>> evaluate(const std::vector<std::pair<std::vector<std::int64_t>, std::complex<double>>>& items,
                                                  int dims, std::int64_t N,
                                                  const std::vector<std::complex<double>>& w) {
  const auto uN = static_cast<std::size_t>(N);
  if (dims == 1) {
    std::vector<std::complex<double>> out(uN);
    for (const auto& [k, a] : items)
      for (std::int64_t j = 0; j < N; ++j) out[static_cast<std::size_t>(j)] += a * w[phase(k[0], j, N)];
    return out;
  }
  std::map<std::int64_t, std::vector<std::pair<std::vector<std::int64_t>, std::complex<double>>>> groups;
  for (const auto& [k, a] : items) groups[k[0]].emplace_back(std::vector<std::int64_t>(k.begin() + 1, k.end()), a);
  std::size_t inner = 1;
  for (int i = 1; i < dims; ++i) inner *= uN;
  std::vector<std::complex<double>> out(uN * inner);
  for (const auto& [k0, sub] : groups) {
    const auto g = evaluate(sub, dims - 1, N, w);
    for (std::int64_t j = 0; j < N; ++j) {
      const std::complex<double> e = w[phase(k0, j, N)];
      auto* row = out.data() + static_cast<std::size_t>(j) * inner;
      for (std::size_t t = 0; t < inner; ++t) row[t] += e * g[t];
    }
  }
  return out;
}

} // namespace detail

/// f(x) = sum_k f^(k) e^{i(k,x)} at every grid point, row-major with the first
/// coordinate slowest.
inline std::vector<std::complex<double>> evaluate_on_grid(const CoefficientSequence& f, const GridSpec& g,
                                                          Budget budget = Budget::from_env()) {
  if (f.dim() != g.d) throw DomainError("evaluate_on_grid: dimension mismatch");
  const std::uint64_t total = g.total(budget);
  if (f.empty()) return std::vector<std::complex<double>>(total);
  std::vector<std::pair<std::vector<std::int64_t>, std::complex<double>>> items;
  items.reserve(f.size());
  for (const auto& [k, a] : f.entries()) items.emplace_back(k.coords(), a);
  return detail::evaluate(items, g.d, g.points_per_dim, detail::roots_of_unity(g.points_per_dim));
}

enum class Quadrature { exact, riemann_sum };

struct LpNorm {
  double value = 0.0;
  Quadrature kind = Quadrature::riemann_sum;
};

/// ((1/N^d) sum |f(x_j)|^p)^(1/p), tagged exact for even integer p on a grid
/// with N > p * max|k|_inf.
inline LpNorm lp_norm(const CoefficientSequence& f, double p, const GridSpec& g, Budget budget = Budget::from_env()) {
  if (!(p >= 1) || !std::isfinite(p)) throw DomainError("lp_norm: p must be in [1, inf)");
  const auto samples = evaluate_on_grid(f, g, budget);
  double sum = 0.0, comp = 0.0;
  for (const auto& z : samples) {
    const double y = std::pow(std::abs(z), p) - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  LpNorm out;
  out.value = std::pow(sum / static_cast<double>(samples.size()), 1.0 / p);
  const bool even = p == std::floor(p) && static_cast<std::int64_t>(p) % 2 == 0;
  out.kind = even && static_cast<double>(g.points_per_dim) > p * static_cast<double>(f.max_frequency())
                 ? Quadrature::exact
                 : Quadrature::riemann_sum;
  return out;
}

struct ExponentialSumNorm {
  double value = 0.0;
  Quadrature kind = Quadrature::riemann_sum;
  /// gamma lies in [-c n^(1/d), c n^(1/d)]^d
  bool within_hypothesis = false;
};

/// || sum_{k in gamma} e^{i(k,.)} ||_{L_p}.
inline ExponentialSumNorm exponential_sum_norm(const std::vector<MultiIndex>& gamma, double p, const GridSpec& g,
                                               double c = 2.0, Budget budget = Budget::from_env()) {
  if (gamma.empty()) throw DomainError("exponential_sum_norm: empty index set");
  CoefficientSequence f(g.d);
  for (const auto& k : gamma) {
    if (f.entries().count(k)) throw DomainError("exponential_sum_norm: indices must be distinct");
    f.set(k, 1.0);
  }
  const auto lp = lp_norm(f, p, g, budget);
  const double box = c * std::pow(static_cast<double>(gamma.size()), 1.0 / g.d);
  return {lp.value, lp.kind, static_cast<double>(f.max_frequency()) <= box};
}

/// ||f||_{S^p'} - ||f||_{L_p} with 1/p + 1/p' = 1; nonnegative up to rounding
/// (Hausdorff-Young).
inline double hausdorff_young_gap(const CoefficientSequence& f, double p, const GridSpec& g,
                                  Budget budget = Budget::from_env()) {
  if (!(p >= 2) || !std::isfinite(p)) throw DomainError("hausdorff_young_gap: p must be in [2, inf)");
  const double p_conj = p / (p - 1.0);
  return sp_norm(f, p_conj) - lp_norm(f, p, g, budget).value;
}

} // namespace nterm

#endif
