#ifndef NTERM_RATES_HPP
#define NTERM_RATES_HPP

// Order-estimate harness: evaluate an approximation quantity over an n-grid,
// pair it with a predicted rate, and summarize the ratio column by its window
// [K1, K2]. An order estimate a(n) ~ b(n) is supported at desk scale when
// K2 / K1 stays small across several dyadic scales.

#include <nterm/approx.hpp>
#include <nterm/error.hpp>
#include <nterm/functionals.hpp>
#include <nterm/trig_lp.hpp>
#include <nterm/weights.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <future>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

namespace nterm {

enum class Theorem { thm31_p_le_2, thm31_p_ge_2, lemma41, assertion41 };
enum class Quantity { class_sp, h_functional, greedy_lp_witness };

inline const char* to_string(Theorem t) {
  switch (t) {
    case Theorem::thm31_p_le_2: return "thm31_p_le_2";
    case Theorem::thm31_p_ge_2: return "thm31_p_ge_2";
    case Theorem::lemma41: return "lemma41";
    case Theorem::assertion41: return "assertion41";
  }
  return "?";
}

inline const char* to_string(Quantity q) {
  switch (q) {
    case Quantity::class_sp: return "class_sp";
    case Quantity::h_functional: return "h_functional";
    case Quantity::greedy_lp_witness: return "greedy_lp_witness";
  }
  return "?";
}

struct RateParams {
  WeightFunction psi = WeightFunction::power(1.0);
  double q = 1.0;
  double p = 1.0;
  double s = 1.0;
  int d = 1;
  double r = kInf;
};

struct RatePrediction {
  double value = 0.0;
  bool hypotheses_met = true;
};

/// The predicted order at n:
///   thm31_p_le_2  psi(n^(1/d)) / n^(1/q - 1/2)        1 <= p <= 2
///   thm31_p_ge_2  psi(n^(1/d)) / n^(1/q + 1/p - 1)    2 <= p < inf
///   lemma41       psi(n^(1/d)) / n^(1/s - 1)
///   assertion41   psi(n^(1/d)) / n^(1/q - 1/p)
inline RatePrediction predicted_rate(Theorem theorem, const RateParams& prm, double n) {
  if (!(n >= 1)) throw DomainError("predicted_rate: n must be >= 1");
  if (prm.d < 1) throw DomainError("predicted_rate: d must be >= 1");
  const double head = prm.psi(std::pow(n, 1.0 / prm.d));
  RatePrediction out;
  double e = 0.0;
  switch (theorem) {
    case Theorem::thm31_p_le_2:
      e = 1.0 / prm.q - 0.5;
      out.hypotheses_met = prm.p >= 1 && prm.p <= 2 && prm.q > 0 && prm.r >= 1;
      break;
    case Theorem::thm31_p_ge_2:
      e = 1.0 / prm.q + 1.0 / prm.p - 1.0;
      out.hypotheses_met = prm.p >= 2 && std::isfinite(prm.p) && prm.q > 0 && prm.r >= 1;
      break;
    case Theorem::lemma41:
      e = 1.0 / prm.s - 1.0;
      out.hypotheses_met = prm.s > 0;
      break;
    case Theorem::assertion41:
      e = 1.0 / prm.q - 1.0 / prm.p;
      out.hypotheses_met = prm.p > 0 && prm.q > 0;
      break;
  }
  out.value = head * std::pow(n, -e);
  return out;
}

struct RateRow {
  std::uint64_t n = 0;
  double computed = 0.0;
  double predicted = 0.0;
  double ratio = 0.0;
};

struct RateTable {
  std::vector<RateRow> rows;
  Quantity quantity = Quantity::class_sp;
  Theorem theorem = Theorem::assertion41;
  RateParams params;
  /// false when the weight fails the sampled hypotheses; such tables are
  /// reported but not held to a window
  bool hypotheses_met = true;
  /// the other bounding rate where only a two-sided gap is known
  /// (e_n in L_p for p > 2: lower n^(1/2-1/q), upper n^(1-1/p-1/q))
  std::vector<double> alternate_predicted;
};

inline Theorem default_theorem(Quantity q, const RateParams& prm) {
  switch (q) {
    case Quantity::class_sp: return Theorem::assertion41;
    case Quantity::h_functional: return Theorem::lemma41;
    case Quantity::greedy_lp_witness: return prm.p <= 2 ? Theorem::thm31_p_le_2 : Theorem::thm31_p_ge_2;
  }
  return Theorem::assertion41;
}

/// Sampled hypotheses for a quantity: psi in B (c = 2) and, where a tail
/// series enters, the decay condition.
inline bool check_rate_hypotheses(Quantity quantity, const RateParams& prm) {
  const auto grid = log_grid(1.0, 1e6, 61);
  if (!check_class_B(prm.psi, 2.0, grid).in_class) return false;
  switch (quantity) {
    case Quantity::class_sp: {
      const double s = prm.q / prm.p;
      return s <= 1 || check_decay_condition(prm.psi, s, prm.d, 1.0).passes;
    }
    case Quantity::h_functional:
      return prm.s <= 1 || check_decay_condition(prm.psi, prm.s, prm.d, 1.0).passes;
    case Quantity::greedy_lp_witness: {
      if (prm.d != 1) return false;
      if (prm.p <= 1 || prm.q <= prm.p / (prm.p - 1)) return true;
      const double need = prm.p <= 2 ? prm.d * (0.5 - 1.0 / prm.q) : prm.d * (1.0 - 1.0 / prm.p - 1.0 / prm.q);
      const auto rep = check_decay_condition(prm.psi, 2.0, prm.d, 1.0);
      return rep.inv_alpha_inf > need && rep.convex;
    }
  }
  return false;
}

/// The quantity itself at one n.
inline double compute_quantity(Quantity quantity, const RateParams& prm, std::uint64_t n,
                               const FunctionalOptions& opt = {}, Budget budget = Budget::from_env()) {
  switch (quantity) {
    case Quantity::class_sp:
      return class_best_nterm_sp(FunctionClassSpec{prm.q, prm.r, prm.psi, prm.d}, n, prm.p, opt, 64, budget).value;
    case Quantity::h_functional: {
      const RearrangedWeight rw(prm.psi, prm.r, prm.d, 1.0, 64, budget);
      return h_functional(rw, n, prm.s, opt).value;
    }
    case Quantity::greedy_lp_witness: {
      if (prm.d != 1) throw DomainError("greedy_lp_witness: only d = 1 is supported");
      if (!(prm.p >= 1)) throw DomainError("greedy_lp_witness: p must be >= 1");
      const auto f1 = extremal_function_f1(n, prm.q, prm.psi, 1, budget);
      const auto rem = greedy_remainder(f1.f, n);
      const bool even = prm.p == std::floor(prm.p) && static_cast<std::int64_t>(prm.p) % 2 == 0;
      const std::int64_t mult = even ? static_cast<std::int64_t>(prm.p) : 8;
      const GridSpec g{1, mult * rem.max_frequency() + 1};
      return lp_norm(rem, prm.p, g, budget).value;
    }
  }
  return 0.0;
}

/// Rows are computed concurrently (at most `threads` at a time) and
/// assembled in grid order.
inline RateTable rate_table(Quantity quantity, const RateParams& prm, const std::vector<std::uint64_t>& n_grid,
                            std::optional<Theorem> theorem = std::nullopt, const FunctionalOptions& opt = {},
                            unsigned threads = 1, Budget budget = Budget::from_env()) {
  if (n_grid.empty()) throw DomainError("rate_table: empty n-grid");
  for (std::size_t i = 1; i < n_grid.size(); ++i)
    if (n_grid[i] <= n_grid[i - 1]) throw DomainError("rate_table: n-grid must be strictly increasing");
  if (n_grid.front() < 1) throw DomainError("rate_table: n must be >= 1");

  RateTable table;
  table.quantity = quantity;
  table.params = prm;
  table.theorem = theorem.value_or(default_theorem(quantity, prm));
  table.hypotheses_met = check_rate_hypotheses(quantity, prm);

  std::vector<double> computed(n_grid.size());
  threads = std::max(1u, threads);
  for (std::size_t base = 0; base < n_grid.size(); base += threads) {
    std::vector<std::future<double>> jobs;
    const std::size_t stop = std::min(n_grid.size(), base + threads);
    for (std::size_t i = base; i < stop; ++i)
      jobs.push_back(std::async(threads == 1 ? std::launch::deferred : std::launch::async,
                                [&, i] { return compute_quantity(quantity, prm, n_grid[i], opt, budget); }));
    for (std::size_t i = base; i < stop; ++i) computed[i] = jobs[i - base].get();
  }

  for (std::size_t i = 0; i < n_grid.size(); ++i) {
    const auto pred = predicted_rate(table.theorem, prm, static_cast<double>(n_grid[i]));
    if (!pred.hypotheses_met) table.hypotheses_met = false;
    table.rows.push_back({n_grid[i], computed[i], pred.value, computed[i] / pred.value});
    if (quantity == Quantity::greedy_lp_witness && prm.p > 2)
      table.alternate_predicted.push_back(predicted_rate(Theorem::thm31_p_le_2, prm, static_cast<double>(n_grid[i])).value);
  }
  return table;
}

struct RatioWindow {
  double K1 = 0.0;
  double K2 = 0.0;
  double spread() const { return K2 / K1; }
};

inline RatioWindow ratio_window(const RateTable& table) {
  if (table.rows.empty()) throw DomainError("ratio_window: empty table");
  RatioWindow w{kInf, 0.0};
  for (const auto& row : table.rows) {
    w.K1 = std::min(w.K1, row.ratio);
    w.K2 = std::max(w.K2, row.ratio);
  }
  return w;
}

/// 16, 32, ..., up to `hi` inclusive.
inline std::vector<std::uint64_t> dyadic_grid(std::uint64_t lo = 16, std::uint64_t hi = 4096) {
  std::vector<std::uint64_t> g;
  for (std::uint64_t n = lo; n <= hi; n *= 2) g.push_back(n);
  return g;
}

inline std::string format_g17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

/// CSV with header `n,computed,predicted,ratio`, 17 significant digits.
inline void write_csv(std::ostream& os, const RateTable& t) {
  os << "n,computed,predicted,ratio\n";
  for (const auto& r : t.rows)
    os << r.n << ',' << format_g17(r.computed) << ',' << format_g17(r.predicted) << ',' << format_g17(r.ratio) << '\n';
}

inline nlohmann::ordered_json to_json(const RateTable& t) {
  nlohmann::ordered_json j;
  auto& meta = j["metadata"];
  meta["quantity"] = to_string(t.quantity);
  meta["theorem"] = to_string(t.theorem);
  meta["psi"] = t.params.psi.to_string();
  meta["q"] = t.params.q;
  meta["p"] = t.params.p;
  meta["s"] = t.params.s;
  meta["d"] = t.params.d;
  meta["r"] = std::isinf(t.params.r) ? nlohmann::ordered_json("inf") : nlohmann::ordered_json(t.params.r);
  meta["hypotheses_met"] = t.hypotheses_met;
  const auto w = ratio_window(t);
  meta["K1"] = w.K1;
  meta["K2"] = w.K2;
  auto& rows = j["rows"] = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const auto& r = t.rows[i];
    nlohmann::ordered_json row{{"n", r.n}, {"computed", r.computed}, {"predicted", r.predicted}, {"ratio", r.ratio}};
    if (i < t.alternate_predicted.size()) row["alternate_predicted"] = t.alternate_predicted[i];
    rows.push_back(std::move(row));
  }
  return j;
}

} // namespace nterm

#endif
