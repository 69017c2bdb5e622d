#ifndef NTERM_APPROX_HPP
#define NTERM_APPROX_HPP

// Functions represented by finitely many Fourier coefficients, their S^p
// norms and greedy approximants, membership in F^psi_{q,r}, class-level best
// n-term errors in S^p, and the extremal witness f_1.

#include <nterm/error.hpp>
#include <nterm/functionals.hpp>
#include <nterm/lattice.hpp>
#include <nterm/weights.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

namespace nterm {

/// Finitely supported Fourier coefficients k -> f^(k). Zero amplitudes are
/// never stored.
class CoefficientSequence {
public:
  using Map = std::map<MultiIndex, std::complex<double>>;

  explicit CoefficientSequence(int d) : d_(d) {
    if (d < 1) throw DomainError("CoefficientSequence: dimension must be >= 1");
  }

  int dim() const noexcept { return d_; }
  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }
  const Map& entries() const noexcept { return entries_; }

  /// Sets f^(k); an amplitude of exactly 0 erases the entry.
  void set(const MultiIndex& k, std::complex<double> a) {
    if (k.dim() != d_) throw DomainError("CoefficientSequence: index dimension mismatch");
    if (a == std::complex<double>{}) entries_.erase(k);
    else entries_[k] = a;
  }

  std::complex<double> at(const MultiIndex& k) const {
    auto it = entries_.find(k);
    return it == entries_.end() ? std::complex<double>{} : it->second;
  }

  /// largest |k|_inf in the support (0 when empty)
  std::int64_t max_frequency() const {
    std::int64_t m = 0;
    for (const auto& [k, a] : entries_) m = std::max(m, k.max_abs());
    return m;
  }

private:
  int d_;
  Map entries_;
};

/// {"d": d, "entries": [{"k": [...], "re": x, "im": y}, ...]}, entries in
/// lexicographic order of k.
inline nlohmann::ordered_json to_json(const CoefficientSequence& f) {
  nlohmann::ordered_json j;
  j["d"] = f.dim();
  auto& arr = j["entries"] = nlohmann::ordered_json::array();
  for (const auto& [k, a] : f.entries()) {
    nlohmann::ordered_json e;
    e["k"] = k.coords();
    e["re"] = a.real();
    e["im"] = a.imag();
    arr.push_back(std::move(e));
  }
  return j;
}

inline CoefficientSequence coefficients_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("d") || !j.contains("entries"))
    throw DomainError("coefficient JSON: expected object with 'd' and 'entries'");
  const int d = j.at("d").get<int>();
  CoefficientSequence f(d);
  for (const auto& e : j.at("entries")) {
    MultiIndex k(e.at("k").get<std::vector<std::int64_t>>());
    if (k.dim() != d) throw DomainError("coefficient JSON: index dimension mismatch");
    const double re = e.value("re", 0.0);
    const double im = e.value("im", 0.0);
    if (f.entries().count(k)) throw DomainError("coefficient JSON: duplicate index");
    f.set(k, {re, im});
  }
  return f;
}

struct FunctionClassSpec {
  double q = 1.0;
  double r = kInf;
  WeightFunction psi = WeightFunction::power(1.0);
  int d = 1;

  void validate() const {
    if (!(q > 0) || !std::isfinite(q)) throw DomainError("class spec: q must be in (0, inf)");
    if (!(r >= 1)) throw DomainError("class spec: r must be in [1, inf]");
    if (d < 1) throw DomainError("class spec: d must be >= 1");
  }
};

namespace detail {

// sum of x_i^p in ascending order of x
inline double power_sum_ascending(std::vector<double> xs, double p) {
  std::sort(xs.begin(), xs.end());
  double sum = 0.0, comp = 0.0;
  for (double x : xs) {
    const double y = std::pow(x, p) - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  return sum;
}

} // namespace detail

/// ||f||_{S^p} = (sum |f^(k)|^p)^(1/p).
inline double sp_norm(const CoefficientSequence& f, double p) {
  if (!(p > 0) || !std::isfinite(p)) throw DomainError("sp_norm: p must be in (0, inf)");
  std::vector<double> amps;
  amps.reserve(f.size());
  for (const auto& [k, a] : f.entries()) amps.push_back(std::abs(a));
  return std::pow(detail::power_sum_ascending(std::move(amps), p), 1.0 / p);
}

/// || { |f^(k)| / psi(|k|_r) } ||_{l_q}; f lies in the class iff this is <= 1.
inline double class_membership_norm(const CoefficientSequence& f, const FunctionClassSpec& spec) {
  spec.validate();
  if (f.dim() != spec.d) throw DomainError("class_membership_norm: dimension mismatch");
  std::vector<double> xs;
  xs.reserve(f.size());
  for (const auto& [k, a] : f.entries()) xs.push_back(std::abs(a) / spec.psi(quasi_norm(k, spec.r)));
  return std::pow(detail::power_sum_ascending(std::move(xs), spec.q), 1.0 / spec.q);
}

/// Support sorted by descending |f^(k)|; ties by ascending |k|_inf, then
/// lexicographically.
inline std::vector<MultiIndex> greedy_order(const CoefficientSequence& f) {
  struct Item {
    double amp;
    std::int64_t inf_norm;
    const MultiIndex* k;
  };
  std::vector<Item> items;
  items.reserve(f.size());
  for (const auto& [k, a] : f.entries()) items.push_back({std::abs(a), k.max_abs(), &k});
  std::sort(items.begin(), items.end(), [](const Item& x, const Item& y) {
    if (x.amp != y.amp) return x.amp > y.amp;
    if (x.inf_norm != y.inf_norm) return x.inf_norm < y.inf_norm;
    return *x.k < *y.k;
  });
  std::vector<MultiIndex> out;
  out.reserve(items.size());
  for (const auto& it : items) out.push_back(*it.k);
  return out;
}

/// G_n(f): the first n terms of greedy_order.
inline CoefficientSequence greedy_approximant(const CoefficientSequence& f, std::size_t n) {
  CoefficientSequence g(f.dim());
  const auto order = greedy_order(f);
  for (std::size_t i = 0; i < std::min(n, order.size()); ++i) g.set(order[i], f.at(order[i]));
  return g;
}

/// f - G_n(f).
inline CoefficientSequence greedy_remainder(const CoefficientSequence& f, std::size_t n) {
  CoefficientSequence rem(f.dim());
  const auto order = greedy_order(f);
  for (std::size_t i = n; i < order.size(); ++i) rem.set(order[i], f.at(order[i]));
  return rem;
}

/// ||f - G_n(f)||_{S^p}, which in S^p is also e_n(f) and e_n^perp(f).
inline double greedy_remainder_sp(const CoefficientSequence& f, std::size_t n, double p) {
  if (!(p > 0) || !std::isfinite(p)) throw DomainError("greedy_remainder_sp: p must be in (0, inf)");
  std::vector<double> amps;
  amps.reserve(f.size());
  for (const auto& [k, a] : f.entries()) amps.push_back(std::abs(a));
  std::sort(amps.begin(), amps.end(), std::greater<>());
  if (n >= amps.size()) return 0.0;
  amps.erase(amps.begin(), amps.begin() + static_cast<std::ptrdiff_t>(n));
  return std::pow(detail::power_sum_ascending(std::move(amps), p), 1.0 / p);
}

/// e_n(F^psi_{q,r})_{S^p} = H_n(psibar^p, q/p)^(1/p), where psibar is the
/// decreasing rearrangement of psi(|k|_r). For p < q the tail series must
/// converge; failure surfaces as ConvergenceError.
inline FunctionalResult class_best_nterm_sp(const FunctionClassSpec& spec, std::uint64_t n, double p,
                                            const FunctionalOptions& opt = {}, int m_cached = 64,
                                            Budget budget = Budget::from_env()) {
  spec.validate();
  if (!(p > 0) || !std::isfinite(p)) throw DomainError("class_best_nterm_sp: p must be in (0, inf)");
  const RearrangedWeight rw(spec.psi, spec.r, spec.d, p, m_cached, budget);
  FunctionalResult res = h_functional(rw, n, spec.q / p, opt);
  res.value = std::pow(res.value, 1.0 / p);
  return res;
}

/// M0 = vol{x : |x|_1 <= 1} = 2^d / d!.
inline double l1_ball_volume(int d) {
  double v = 1.0;
  for (int i = 1; i <= d; ++i) v *= 2.0 / i;
  return v;
}

/// floor((2n / M0)^(1/d)) with M0 = 2^d/d!, in exact integer arithmetic:
/// the largest R with R^d 2^d <= 2 n d!.
inline std::int64_t f1_radius(std::uint64_t n, int d) {
  if (d < 1 || d > 20) throw DomainError("f1_radius: dimension out of range");
  long double rhs = 2.0L * static_cast<long double>(n);
  for (int i = 2; i <= d; ++i) rhs *= i;
  auto fits = [&](std::int64_t R) {
    long double lhs = 1.0L;
    for (int i = 0; i < d; ++i) lhs *= 2.0L * static_cast<long double>(R);
    return lhs <= rhs;
  };
  auto R = static_cast<std::int64_t>(std::floor(std::pow(static_cast<double>(rhs), 1.0 / d) / 2.0));
  while (R > 0 && !fits(R)) --R;
  while (fits(R + 1)) ++R;
  return R;
}

/// The extremal function f_1: amplitude C_1(n) on every |k|_1 <= R with
/// R = floor((2n/M0)^(1/d)), C_1(n) = (sum_{|k|_1<=R} psi^-q(|k|_1))^(-1/q).
struct ExtremalFunction {
  CoefficientSequence f;
  double C1;
  std::int64_t radius;
};

inline ExtremalFunction extremal_function_f1(std::uint64_t n, double q, const WeightFunction& psi, int d,
                                             Budget budget = Budget::from_env()) {
  if (!(q > 0) || !std::isfinite(q)) throw DomainError("extremal_function_f1: q must be in (0, inf)");
  const std::int64_t R = f1_radius(n, d);
  if (R < 1) throw DomainError("extremal_function_f1: n too small, (2n/M0)^(1/d) < 1");
  double sum = 0.0;
  std::uint64_t prev = 0;
  for (std::int64_t m = 0; m <= R; ++m) {
    const std::uint64_t V = ball_count(m, 1.0, d, budget);
    sum += static_cast<double>(V - prev) * std::pow(psi(static_cast<double>(m)), -q);
    prev = V;
  }
  const double C1 = std::pow(sum, -1.0 / q);
  CoefficientSequence f(d);
  for (const auto& k : enumerate_ball(R, 1.0, d, budget)) f.set(k, C1);
  return {std::move(f), C1, R};
}

} // namespace nterm

#endif
