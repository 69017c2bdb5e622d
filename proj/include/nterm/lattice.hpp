#ifndef NTERM_LATTICE_HPP
#define NTERM_LATTICE_HPP

// Multi-index geometry of Z^d: l_r quasi-norms, enumeration and counting of
// l_r balls, and the shell decomposition nu_m / V_m used by the rearranged
// weights.
//
// Shells are indexed by ceil(|k|_r). For r in {1, inf} this is exactly the
// set of distinct norm values; for other r it is a bucketing.

#include <nterm/error.hpp>

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <memory>
#include <numeric>
#include <string>
#include <vector>

namespace nterm {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// A point of Z^d.
class MultiIndex {
public:
  MultiIndex() = default;
  explicit MultiIndex(std::vector<std::int64_t> coords) : coords_(std::move(coords)) {
    if (coords_.empty()) throw DomainError("MultiIndex: dimension must be >= 1");
  }
  MultiIndex(std::initializer_list<std::int64_t> coords)
      : MultiIndex(std::vector<std::int64_t>(coords)) {}

  int dim() const noexcept { return static_cast<int>(coords_.size()); }
  std::int64_t operator[](int i) const { return coords_[static_cast<std::size_t>(i)]; }
  const std::vector<std::int64_t>& coords() const noexcept { return coords_; }

  /// max_i |k_i|
  std::int64_t max_abs() const noexcept {
    std::int64_t m = 0;
    for (auto c : coords_) m = std::max(m, c < 0 ? -c : c);
    return m;
  }

  friend auto operator<=>(const MultiIndex&, const MultiIndex&) = default;
  friend bool operator==(const MultiIndex&, const MultiIndex&) = default;

private:
  std::vector<std::int64_t> coords_;
};

inline void check_exponent(double r, const char* who) {
  if (!(r > 0.0)) throw DomainError(std::string(who) + ": exponent must be > 0 or inf");
}

/// |k|_r = (sum |k_i|^r)^(1/r), or max |k_i| for r = inf. Integer arithmetic
/// for r in {1, inf}.
inline double quasi_norm(const MultiIndex& k, double r) {
  check_exponent(r, "quasi_norm");
  if (r == kInf) return static_cast<double>(k.max_abs());
  if (r == 1.0) {
    std::int64_t s = 0;
    for (auto c : k.coords()) s += c < 0 ? -c : c;
    return static_cast<double>(s);
  }
  long double s = 0.0L;
  for (auto c : k.coords()) s += std::pow(static_cast<long double>(c < 0 ? -c : c), static_cast<long double>(r));
  return static_cast<double>(std::pow(s, 1.0L / static_cast<long double>(r)));
}

namespace detail {

inline std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b) {
  if (a != 0 && b > std::numeric_limits<std::uint64_t>::max() / a)
    throw BudgetExceeded("lattice count overflows 64 bits");
  return a * b;
}

inline std::uint64_t checked_pow(std::uint64_t base, int e) {
  std::uint64_t out = 1;
  for (int i = 0; i < e; ++i) out = checked_mul(out, base);
  return out;
}

inline std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  unsigned __int128 c = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    c = c * (n - k + i) / i;
    if (c > std::numeric_limits<std::uint64_t>::max())
      throw BudgetExceeded("lattice count overflows 64 bits");
  }
  return static_cast<std::uint64_t>(c);
}

// Powers t^r for t = 0..m and the admission threshold m^r (with a relative
// slack of 1e-12 so that boundary points with rounding noise are kept).
struct PowerTable {
  std::vector<double> pw;
  double radius_pow; // m^r
  double slack;

  PowerTable(std::int64_t m, double r) : pw(static_cast<std::size_t>(m) + 1) {
    for (std::int64_t t = 0; t <= m; ++t) pw[static_cast<std::size_t>(t)] = std::pow(static_cast<double>(t), r);
    radius_pow = pw.back();
    slack = 1e-12 * radius_pow;
  }

  // largest t with t^r <= rem (+ slack), or -1 if none
  std::int64_t max_coord(double rem) const {
    auto it = std::upper_bound(pw.begin(), pw.end(), rem + slack);
    return static_cast<std::int64_t>(it - pw.begin()) - 1;
  }

  std::uint64_t count(int dims, double rem) const {
    const std::int64_t t = max_coord(rem);
    if (t < 0) return 0;
    if (dims == 1) return static_cast<std::uint64_t>(2 * t + 1);
    std::uint64_t total = count(dims - 1, rem);
    for (std::int64_t c = 1; c <= t; ++c) total += 2 * count(dims - 1, rem - pw[static_cast<std::size_t>(c)]);
    return total;
  }
};

inline bool in_ball(const std::vector<std::int64_t>& k, double r, std::int64_t m, const PowerTable* table) {
  if (r == kInf) {
    for (auto c : k) if ((c < 0 ? -c : c) > m) return false;
    return true;
  }
  if (r == 1.0) {
    std::int64_t s = 0;
    for (auto c : k) s += c < 0 ? -c : c;
    return s <= m;
  }
  double s = 0.0;
  for (auto c : k) s += table->pw[static_cast<std::size_t>(c < 0 ? -c : c)];
  return s <= table->radius_pow + table->slack;
}

} // namespace detail

/// Every k in Z^d with |k|_r <= m, in lexicographic order.
inline std::vector<MultiIndex> enumerate_ball(std::int64_t m, double r, int d,
                                              Budget budget = Budget::from_env()) {
  check_exponent(r, "enumerate_ball");
  if (m < 0) throw DomainError("enumerate_ball: radius must be >= 0");
  if (d < 1) throw DomainError("enumerate_ball: dimension must be >= 1");
  const std::uint64_t side = static_cast<std::uint64_t>(2 * m + 1);
  std::uint64_t cube = 1;
  for (int i = 0; i < d; ++i) {
    if (cube > budget.points / side)
      throw BudgetExceeded("enumerate_ball: (2m+1)^d exceeds the enumeration budget");
    cube *= side;
  }
  if (cube > budget.points) throw BudgetExceeded("enumerate_ball: (2m+1)^d exceeds the enumeration budget");

  std::unique_ptr<detail::PowerTable> table;
  if (r != kInf && r != 1.0) table = std::make_unique<detail::PowerTable>(m, r);

  std::vector<MultiIndex> out;
  std::vector<std::int64_t> k(static_cast<std::size_t>(d), -m);
  for (;;) {
    if (detail::in_ball(k, r, m, table.get())) out.emplace_back(k);
    int i = d - 1;
    while (i >= 0 && k[static_cast<std::size_t>(i)] == m) {
      k[static_cast<std::size_t>(i)] = -m;
      --i;
    }
    if (i < 0) break;
    ++k[static_cast<std::size_t>(i)];
  }
  return out;
}

/// |{k in Z^d : |k|_r <= m}|. Closed forms for r in {1, inf}; otherwise a
/// recursive count over coordinates costing (2m+1)^(d-1) steps.
inline std::uint64_t ball_count(std::int64_t m, double r, int d, Budget budget = Budget::from_env()) {
  check_exponent(r, "ball_count");
  if (d < 1) throw DomainError("ball_count: dimension must be >= 1");
  if (m < 0) return 0;
  const auto um = static_cast<std::uint64_t>(m);
  if (r == kInf || d == 1) return detail::checked_pow(2 * um + 1, d);
  if (r == 1.0) {
    // sum_i 2^i C(d,i) C(m,i)
    std::uint64_t total = 0;
    for (int i = 0; i <= d && static_cast<std::uint64_t>(i) <= um; ++i) {
      const std::uint64_t term = detail::checked_mul(
          detail::checked_mul(std::uint64_t{1} << i, detail::binomial(static_cast<std::uint64_t>(d), static_cast<std::uint64_t>(i))),
          detail::binomial(um, static_cast<std::uint64_t>(i)));
      total += term;
    }
    return total;
  }
  std::uint64_t work = 1;
  for (int i = 1; i < d; ++i) {
    if (work > budget.points / (2 * um + 1))
      throw BudgetExceeded("ball_count: counting work exceeds the enumeration budget");
    work *= 2 * um + 1;
  }
  if (d == 2 && r == 2.0) {
    const std::uint64_t m2 = detail::checked_mul(um, um);
    std::uint64_t total = 0;
    for (std::uint64_t c = 0; c <= um; ++c) {
      const std::uint64_t rem = m2 - c * c;
      auto t = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(rem)));
      while (t * t > rem) --t;
      while ((t + 1) * (t + 1) <= rem) ++t;
      total += (c == 0 ? 1 : 2) * (2 * t + 1);
    }
    return total;
  }
  const detail::PowerTable table(m, r);
  if (d == 2) {
    // t(c) = max coordinate beside c, nonincreasing in c
    std::uint64_t total = 0;
    std::int64_t t = m;
    for (std::int64_t c = 0; c <= m; ++c) {
      const double rem = table.radius_pow - table.pw[static_cast<std::size_t>(c)] + table.slack;
      while (t >= 0 && table.pw[static_cast<std::size_t>(t)] > rem) --t;
      total += static_cast<std::uint64_t>(c == 0 ? 1 : 2) * static_cast<std::uint64_t>(2 * t + 1);
    }
    return total;
  }
  return table.count(d, table.radius_pow);
}

/// Shell sizes nu_m and cumulative counts V_m for m = 0..m_max.
struct ShellDecomposition {
  double r = kInf;
  int d = 1;
  std::vector<std::uint64_t> nu;
  std::vector<std::uint64_t> V;

  int m_max() const noexcept { return static_cast<int>(V.size()) - 1; }
};

inline ShellDecomposition shell_counts(double r, int d, int m_max, Budget budget = Budget::from_env()) {
  check_exponent(r, "shell_counts");
  if (d < 1) throw DomainError("shell_counts: dimension must be >= 1");
  if (m_max < 1) throw DomainError("shell_counts: m_max must be >= 1");
  ShellDecomposition sd;
  sd.r = r;
  sd.d = d;
  sd.V.reserve(static_cast<std::size_t>(m_max) + 1);
  sd.nu.reserve(static_cast<std::size_t>(m_max) + 1);
  std::uint64_t prev = 0;
  for (int m = 0; m <= m_max; ++m) {
    const std::uint64_t v = ball_count(m, r, d, budget);
    sd.V.push_back(v);
    sd.nu.push_back(v - prev);
    prev = v;
  }
  return sd;
}

/// Outcome of fitting M0 (m - c1)^d < V_m <= M0 (m + c2)^d.
struct GrowthFit {
  double M0 = 0.0;
  double c1 = 0.0;
  double c2 = 0.0;
  bool ok = false;
};

/// Fits V_m^(1/d) ~ a m + b by least squares over k0 < m <= m_max and takes
/// M0 = a^d, then the least c1, c2 >= 0 making the two-sided bound hold on
/// that range. ok is false when either constant exceeds `cap`.
inline GrowthFit fit_growth_bounds(const ShellDecomposition& sd, int k0, double cap = 16.0) {
  GrowthFit fit;
  if (k0 < 1 || sd.m_max() <= k0) return fit;
  const double inv_d = 1.0 / sd.d;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int cnt = 0;
  for (int m = k0 + 1; m <= sd.m_max(); ++m) {
    const double x = m;
    const double y = std::pow(static_cast<double>(sd.V[static_cast<std::size_t>(m)]), inv_d);
    sx += x; sy += y; sxx += x * x; sxy += x * y; ++cnt;
  }
  double slope;
  if (cnt == 1) {
    slope = sy / sx;
  } else {
    const double denom = cnt * sxx - sx * sx;
    slope = (cnt * sxy - sx * sy) / denom;
  }
  if (!(slope > 0)) return fit;
  fit.M0 = std::pow(slope, sd.d);

  double lo = -kInf, hi = -kInf;
  for (int m = k0 + 1; m <= sd.m_max(); ++m) {
    const double root = std::pow(static_cast<double>(sd.V[static_cast<std::size_t>(m)]) / fit.M0, inv_d);
    lo = std::max(lo, m - root);
    hi = std::max(hi, root - m);
  }
  // strict on the left
  fit.c1 = lo < 0 ? 0.0 : lo * (1 + 1e-12) + 1e-12;
  fit.c2 = std::max(0.0, hi);
  fit.ok = std::isfinite(fit.c1) && std::isfinite(fit.c2) && fit.c1 <= cap && fit.c2 <= cap;
  return fit;
}

} // namespace nterm

#endif
