#ifndef NTERM_WEIGHTS_HPP
#define NTERM_WEIGHTS_HPP

// Weight functions psi(t), the characteristic alpha(psi, t), sampled evidence
// for the class B and for the tail-decay condition, and the decreasing
// rearrangement of psi(|k|_r) over Z^d.

#include <nterm/error.hpp>
#include <nterm/lattice.hpp>
#include <nterm/sequence.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace nterm {

enum class WeightFamily { power, power_log, log_only, exp_decay, constant };

/// psi(t) for t >= 1, extended by psi(t) := psi(1) on [0, 1).
///
///   power      t^-s                 s > 0
///   power_log  t^-s ln^eps(t + e)   s > 0
///   log_only   ln^eps(t + e)        eps < 0
///   exp_decay  R^-t                 R > 1
///   constant   c                    c > 0 (not in B; used for limit cases)
class WeightFunction {
public:
  static WeightFunction power(double s) {
    if (!(s > 0)) throw DomainError("power weight: s must be > 0");
    return WeightFunction(WeightFamily::power, s, 0.0);
  }
  static WeightFunction power_log(double s, double eps) {
    if (!(s > 0)) throw DomainError("powerlog weight: s must be > 0");
    if (!std::isfinite(eps)) throw DomainError("powerlog weight: eps must be finite");
    return WeightFunction(WeightFamily::power_log, s, eps);
  }
  static WeightFunction log_only(double eps) {
    if (!(eps < 0)) throw DomainError("log weight: eps must be < 0");
    return WeightFunction(WeightFamily::log_only, 0.0, eps);
  }
  static WeightFunction exp_decay(double R) {
    if (!(R > 1) || !std::isfinite(R)) throw DomainError("exp weight: R must be > 1");
    return WeightFunction(WeightFamily::exp_decay, R, 0.0);
  }
  static WeightFunction constant(double c = 1.0) {
    if (!(c > 0) || !std::isfinite(c)) throw DomainError("const weight: c must be > 0");
    return WeightFunction(WeightFamily::constant, c, 0.0);
  }

  /// Parses `power:s=1.5`, `powerlog:s=1,eps=-0.5`, `log:eps=-2`, `exp:R=2`,
  /// `const` or `const:c=2`.
  static WeightFunction parse(std::string_view text);

  WeightFamily family() const noexcept { return family_; }
  /// s for power families, R for exp_decay, c for constant.
  double param() const noexcept { return a_; }
  double eps() const noexcept { return eps_; }

  double operator()(double t) const {
    t = std::max(t, 1.0);
    switch (family_) {
      case WeightFamily::power: return std::pow(t, -a_);
      case WeightFamily::power_log: return std::pow(t, -a_) * std::pow(std::log(t + std::numbers::e), eps_);
      case WeightFamily::log_only: return std::pow(std::log(t + std::numbers::e), eps_);
      case WeightFamily::exp_decay: return std::exp(-t * std::log(a_));
      case WeightFamily::constant: return a_;
    }
    return 0.0;
  }

  /// log psi(t); finite where psi itself would underflow.
  double log_value(double t) const {
    t = std::max(t, 1.0);
    switch (family_) {
      case WeightFamily::power: return -a_ * std::log(t);
      case WeightFamily::power_log: return -a_ * std::log(t) + eps_ * std::log(std::log(t + std::numbers::e));
      case WeightFamily::log_only: return eps_ * std::log(std::log(t + std::numbers::e));
      case WeightFamily::exp_decay: return -t * std::log(a_);
      case WeightFamily::constant: return std::log(a_);
    }
    return 0.0;
  }

  /// Right derivative psi'(t+) for t >= 1.
  double derivative(double t) const {
    t = std::max(t, 1.0);
    const double L = std::log(t + std::numbers::e);
    switch (family_) {
      case WeightFamily::power: return -a_ * std::pow(t, -a_ - 1.0);
      case WeightFamily::power_log: return (*this)(t) * (-a_ / t + eps_ / (L * (t + std::numbers::e)));
      case WeightFamily::log_only: return (*this)(t) * eps_ / (L * (t + std::numbers::e));
      case WeightFamily::exp_decay: return -std::log(a_) * (*this)(t);
      case WeightFamily::constant: return 0.0;
    }
    return 0.0;
  }

  /// psi'(t+) / psi(t).
  double log_derivative(double t) const {
    t = std::max(t, 1.0);
    const double L = std::log(t + std::numbers::e);
    switch (family_) {
      case WeightFamily::power: return -a_ / t;
      case WeightFamily::power_log: return -a_ / t + eps_ / (L * (t + std::numbers::e));
      case WeightFamily::log_only: return eps_ / (L * (t + std::numbers::e));
      case WeightFamily::exp_decay: return -std::log(a_);
      case WeightFamily::constant: return 0.0;
    }
    return 0.0;
  }

  /// Limit of psi(t) as t -> infinity.
  double limit() const noexcept { return family_ == WeightFamily::constant ? a_ : 0.0; }

  std::string to_string() const {
    std::ostringstream os;
    os.precision(17);
    switch (family_) {
      case WeightFamily::power: os << "power:s=" << a_; break;
      case WeightFamily::power_log: os << "powerlog:s=" << a_ << ",eps=" << eps_; break;
      case WeightFamily::log_only: os << "log:eps=" << eps_; break;
      case WeightFamily::exp_decay: os << "exp:R=" << a_; break;
      case WeightFamily::constant: os << "const:c=" << a_; break;
    }
    return os.str();
  }

  friend bool operator==(const WeightFunction&, const WeightFunction&) = default;

private:
  WeightFunction(WeightFamily f, double a, double eps) : family_(f), a_(a), eps_(eps) {}

  WeightFamily family_;
  double a_;
  double eps_;
};

inline WeightFunction WeightFunction::parse(std::string_view text) {
  const auto colon = text.find(':');
  const std::string name(text.substr(0, colon));
  std::map<std::string, double> kv;
  if (colon != std::string_view::npos) {
    std::string_view rest = text.substr(colon + 1);
    while (!rest.empty()) {
      const auto comma = rest.find(',');
      const std::string_view item = rest.substr(0, comma);
      const auto eq = item.find('=');
      if (eq == std::string_view::npos || eq == 0)
        throw DomainError("weight spec: expected key=value in '" + std::string(item) + "'");
      const std::string key(item.substr(0, eq));
      const std::string val(item.substr(eq + 1));
      char* end = nullptr;
      const double x = std::strtod(val.c_str(), &end);
      if (val.empty() || *end != '\0') throw DomainError("weight spec: bad number '" + val + "'");
      if (!kv.emplace(key, x).second) throw DomainError("weight spec: duplicate key '" + key + "'");
      if (comma == std::string_view::npos) break;
      rest = rest.substr(comma + 1);
    }
  }
  auto take = [&](const char* key, std::optional<double> fallback = std::nullopt) {
    auto it = kv.find(key);
    if (it == kv.end()) {
      if (fallback) return *fallback;
      throw DomainError("weight spec '" + name + "': missing '" + key + "'");
    }
    const double v = it->second;
    kv.erase(it);
    return v;
  };
  std::optional<WeightFunction> out;
  if (name == "power") out = power(take("s"));
  else if (name == "powerlog") {
    const double s = take("s");
    out = power_log(s, take("eps"));
  } else if (name == "log") out = log_only(take("eps"));
  else if (name == "exp") out = exp_decay(take("R"));
  else if (name == "const") out = constant(take("c", 1.0));
  else throw DomainError("weight spec: unknown family '" + name + "'");
  if (!kv.empty()) throw DomainError("weight spec: unexpected key '" + kv.begin()->first + "'");
  return *out;
}

/// alpha(psi, t) = psi(t) / (t |psi'(t)|), from the logarithmic derivative so
/// that it stays finite where psi underflows.
inline double alpha(const WeightFunction& psi, double t) {
  if (!(t >= 1.0)) throw DomainError("alpha: t must be >= 1");
  const double g = psi.log_derivative(t);
  if (g == 0.0) throw DerivativeZero("alpha: psi'(t) = 0");
  return 1.0 / (t * std::abs(g));
}

/// Log-spaced grid of `points` values in [lo, hi].
inline std::vector<double> log_grid(double lo, double hi, int points) {
  std::vector<double> g;
  if (points <= 1 || hi <= lo) return {lo};
  g.reserve(static_cast<std::size_t>(points));
  const double a = std::log(lo), b = std::log(hi);
  for (int i = 0; i < points; ++i) g.push_back(std::exp(a + (b - a) * i / (points - 1)));
  g.front() = lo;
  g.back() = hi;
  return g;
}

struct ClassBReport {
  double min_ratio = 0.0;      // min psi(t)/psi(ct) over the grid
  double max_ratio = 0.0;
  bool ratio_above_one = false;
  bool vanishing = false;      // psi(t_max) below the vanishing threshold
  bool unbounded_ratio = false;
  bool in_class = false;       // all three pieces of evidence agree
};

/// Evidence, sampled on `t_grid`, that psi belongs to B with constant c:
/// 1 < psi(t)/psi(ct) <= K and psi -> 0. The ratio is flagged unbounded when it
/// exceeds `ratio_cap` or more than doubles from the smallest to the largest t.
inline ClassBReport check_class_B(const WeightFunction& psi, double c, const std::vector<double>& t_grid,
                                  double vanish_threshold = 0.1, double ratio_cap = 1e6) {
  if (!(c > 1)) throw DomainError("check_class_B: c must be > 1");
  if (t_grid.empty()) throw DomainError("check_class_B: empty grid");
  ClassBReport rep;
  rep.min_ratio = kInf;
  rep.max_ratio = 0.0;
  double t_lo = kInf, t_hi = -kInf, ratio_lo = 0, ratio_hi = 0;
  for (double t : t_grid) {
    if (!(t >= 1)) throw DomainError("check_class_B: grid points must be >= 1");
    const double ratio = std::exp(psi.log_value(t) - psi.log_value(c * t));
    rep.min_ratio = std::min(rep.min_ratio, ratio);
    rep.max_ratio = std::max(rep.max_ratio, ratio);
    if (t < t_lo) { t_lo = t; ratio_lo = ratio; }
    if (t > t_hi) { t_hi = t; ratio_hi = ratio; }
  }
  rep.ratio_above_one = rep.min_ratio > 1.0;
  rep.vanishing = psi(t_hi) < vanish_threshold;
  rep.unbounded_ratio = !(rep.max_ratio <= ratio_cap) || ratio_hi > 2.0 * ratio_lo;
  rep.in_class = rep.ratio_above_one && rep.vanishing && !rep.unbounded_ratio;
  return rep;
}

struct DecayReport {
  double K_psi = 0.0;          // sup alpha(psi, t) over the grid
  double inv_alpha_inf = 0.0;  // inf 1/alpha(psi, t), the reciprocal convention
  double s_prime = 0.0;
  double threshold = 0.0;      // s'/d
  bool passes = false;         // K_psi < s'/d
  bool convex = false;         // psi(t-h) + psi(t+h) >= 2 psi(t) at every grid point
};

/// Samples alpha(psi, t) on a log grid over [t0, t_max] and compares its
/// supremum with s'/d, s' = s/(s-1).
inline DecayReport check_decay_condition(const WeightFunction& psi, double s, int d, double t0,
                                         double t_max = 1e6, int points = 241) {
  if (!(s > 1)) throw DomainError("check_decay_condition: s must be > 1");
  if (!(t0 >= 1)) throw DomainError("check_decay_condition: t0 must be >= 1");
  if (d < 1) throw DomainError("check_decay_condition: d must be >= 1");
  DecayReport rep;
  rep.s_prime = s / (s - 1.0);
  rep.threshold = rep.s_prime / d;
  rep.convex = true;
  double K = 0.0;
  for (double t : log_grid(t0, std::max(t0, t_max), points)) {
    double a;
    try {
      a = alpha(psi, t);
    } catch (const DerivativeZero&) {
      a = kInf;
    }
    K = std::max(K, a);
    const double h = 1e-3 * t;
    if (t - h >= 1.0) {
      const double lhs = std::exp(psi.log_value(t - h) - psi.log_value(t)) + std::exp(psi.log_value(t + h) - psi.log_value(t));
      if (lhs < 2.0 * (1.0 - 1e-12)) rep.convex = false;
    }
  }
  rep.K_psi = K;
  rep.inv_alpha_inf = K > 0 ? 1.0 / K : kInf;
  rep.passes = K < rep.threshold;
  return rep;
}

/// Decreasing rearrangement of psi(|k|_r)^p over k in Z^d: the step sequence
/// equal to psi(m)^p on (V_{m-1}, V_m], with psi(0) := psi(1). Shells up to
/// `m_cached` are precomputed; later shells are counted on demand.
class RearrangedWeight {
public:
  RearrangedWeight(WeightFunction psi, double r, int d, double p_power = 1.0, int m_cached = 64,
                   Budget budget = Budget::from_env())
      : psi_(psi), p_(p_power), budget_(budget), shells_(shell_counts(r, d, std::max(1, m_cached), budget)) {
    if (!(p_power > 0)) throw DomainError("RearrangedWeight: p_power must be > 0");
  }

  const WeightFunction& psi() const noexcept { return psi_; }
  double p_power() const noexcept { return p_; }
  double r() const noexcept { return shells_.r; }
  int d() const noexcept { return shells_.d; }
  const ShellDecomposition& shells() const noexcept { return shells_; }

  /// V_m, from the cache or counted. Shells met in order past the cache are
  /// appended to it.
  std::uint64_t V(std::int64_t m) const {
    if (m < 0) return 0;
    if (m <= shells_.m_max()) return shells_.V[static_cast<std::size_t>(m)];
    if (shells_.r == kInf || shells_.r == 1.0 || shells_.d == 1) return ball_count(m, shells_.r, shells_.d, budget_);
    const auto off = static_cast<std::size_t>(m - shells_.m_max() - 1);
    std::lock_guard lock(ext_->mu);
    if (off < ext_->V.size()) return ext_->V[off];
    const std::uint64_t v = ball_count(m, shells_.r, shells_.d, budget_);
    if (off == ext_->V.size() && off < kMaxExtension) ext_->V.push_back(v);
    return v;
  }

  /// psi(m)^p; shell 0 uses psi(1).
  double shell_value(std::int64_t m) const {
    const double t = static_cast<double>(std::max<std::int64_t>(m, 1));
    double v = psi_(t);
    if (p_ != 1.0) v = std::pow(v, p_);
    if (!std::isnormal(v)) v = std::exp(p_ * psi_.log_value(t));
    return v;
  }

  Block block(std::uint64_t m) const {
    const auto mi = static_cast<std::int64_t>(m);
    return {shell_value(mi), V(mi) - V(mi - 1), p_ * psi_.log_value(static_cast<double>(std::max<std::int64_t>(mi, 1)))};
  }

  double limit() const { return std::pow(psi_.limit(), p_); }

  /// Shell index m with V_{m-1} < j <= V_m.
  std::int64_t shell_of(std::uint64_t j) const {
    if (j == 0) throw DomainError("RearrangedWeight: positions are 1-based");
    const auto& V = shells_.V;
    if (j <= V.back()) {
      return static_cast<std::int64_t>(std::lower_bound(V.begin(), V.end(), j) - V.begin());
    }
    // exponential then binary search beyond the cache
    std::int64_t lo = shells_.m_max();
    std::int64_t hi = std::max<std::int64_t>(2 * lo, 2);
    while (this->V(hi) < j) {
      lo = hi;
      if (hi > (std::int64_t{1} << 40)) throw BudgetExceeded("RearrangedWeight: position beyond extendable range");
      hi *= 2;
    }
    while (hi - lo > 1) {
      const std::int64_t mid = lo + (hi - lo) / 2;
      if (this->V(mid) >= j) hi = mid;
      else lo = mid;
    }
    return hi;
  }

  /// Psi(j) = psi(m)^p for j in (V_{m-1}, V_m].
  double value(std::uint64_t j) const { return shell_value(shell_of(j)); }

private:
  struct Extension {
    std::mutex mu;
    std::vector<std::uint64_t> V;
  };
  static constexpr std::size_t kMaxExtension = std::size_t{1} << 24;

  WeightFunction psi_;
  double p_;
  Budget budget_;
  ShellDecomposition shells_;
  std::shared_ptr<Extension> ext_ = std::make_shared<Extension>();
};

/// Same as RearrangedWeight::value, as a free function.
inline double rearranged_value(const RearrangedWeight& rw, std::uint64_t j) { return rw.value(j); }

} // namespace nterm

#endif
