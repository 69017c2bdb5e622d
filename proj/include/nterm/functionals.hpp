#ifndef NTERM_FUNCTIONALS_HPP
#define NTERM_FUNCTIONALS_HPP

// The extremal functionals H_n(Psi, s) over nonincreasing positive sequences.
//
//   Q_n(Psi, l) = (l - n) / sum_{j<=l} Psi^-s(j)
//
//   s in (0,1]:  H_n = sup_{l>n} (l - n) (sum_{j<=l} Psi^-s(j))^(-1/s)
//   s > 1:       H_n = ((l*-n)^s' (sum_{j<=l*} Psi^-s(j))^(-s'/s)
//                       + sum_{j>l*} Psi^s'(j))^(1/s'),   1/s + 1/s' = 1
//
// where l* is the first l > n with Q_n(Psi, l) > Psi^s(l + 1); Q_n rises up
// to l* and falls strictly afterwards, and l* is always the end of a block.
//
// Partial sums of Psi^-s are kept in the log domain, so weights that decay
// exponentially do not overflow them.

#include <nterm/error.hpp>
#include <nterm/sequence.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

namespace nterm {

enum class Regime { sup_regime, tail_regime };

struct FunctionalResult {
  double value = 0.0;
  /// log of value; stays finite when value underflows
  double log_value = -std::numeric_limits<double>::infinity();
  std::optional<std::uint64_t> l_star;
  Regime regime = Regime::sup_regime;
  double tail_truncation_error_bound = 0.0;
  /// false when the supremum scan stopped at the budget without a bound on
  /// the remaining indices
  bool certified = true;
};

struct FunctionalOptions {
  /// relative tolerance for tail sums
  double tol = 1e-10;
  /// largest l examined by the supremum scan when no stopping bound applies
  std::uint64_t scan_budget = 1'000'000;
  /// cap on the number of blocks any single scan may visit
  std::uint64_t max_blocks = std::uint64_t{1} << 28;
  /// cap on the blocks summed for a tail series
  std::uint64_t tail_blocks = std::uint64_t{1} << 20;
};

/// Walks the nonempty blocks of a sequence with one block of lookahead.
template <BlockSequence S>
class BlockCursor {
public:
  explicit BlockCursor(const S& seq) : seq_(&seq) {
    cur_ = fetch();
    next_ = fetch();
  }

  const Block& current() const noexcept { return cur_; }
  /// Psi(end() + 1)
  const Block& next() const noexcept { return next_; }
  /// index of the last element before this block
  std::uint64_t start() const noexcept { return start_; }
  std::uint64_t end() const noexcept { return start_ + cur_.count; }
  /// number of nonempty blocks before the current one
  std::uint64_t index() const noexcept { return index_; }

  void advance() {
    if (cur_.count > std::numeric_limits<std::uint64_t>::max() / 2 - start_)
      throw ConvergenceError("sequence index overflow");
    start_ += cur_.count;
    cur_ = next_;
    next_ = fetch();
    ++index_;
  }

private:
  Block fetch() {
    for (;;) {
      const Block b = seq_->block(raw_++);
      if (b.count > 0) return b;
    }
  }

  const S* seq_;
  std::uint64_t raw_ = 0;
  std::uint64_t start_ = 0;
  std::uint64_t index_ = 0;
  Block cur_{};
  Block next_{};
};

namespace detail {

inline void check_q_args(std::uint64_t n, std::uint64_t l, double s) {
  if (!(s > 0)) throw DomainError("Q_n: s must be > 0");
  if (l <= n) throw DomainError("Q_n: need l > n");
}

// log sum_{j<=l} Psi^-s(j)
template <BlockSequence S>
double log_inverse_power_sum(const S& seq, std::uint64_t l, double s) {
  LogAccumulator acc;
  for (BlockCursor<S> c(seq);; c.advance()) {
    const std::uint64_t take = std::min(c.end(), l) - c.start();
    acc.add_log(std::log(static_cast<double>(take)) - s * c.current().log_value);
    if (c.end() >= l) break;
  }
  return acc.log();
}

} // namespace detail

/// log Q_n(Psi, l).
template <BlockSequence S>
double log_q_n(const S& seq, std::uint64_t n, std::uint64_t l, double s) {
  detail::check_q_args(n, l, s);
  return std::log(static_cast<double>(l - n)) - detail::log_inverse_power_sum(seq, l, s);
}

/// Q_n(Psi, l) = (l - n) (sum_{j<=l} Psi^-s(j))^-1, accumulated per block.
template <BlockSequence S>
double q_n(const S& seq, std::uint64_t n, std::uint64_t l, double s) {
  return std::exp(log_q_n(seq, n, l, s));
}

/// State of the forward scan at the threshold index.
struct ThresholdScan {
  std::uint64_t l_star = 0;
  double log_sum = 0.0;  // log sum_{j<=l*} Psi^-s(j)
};

/// The first l > n with Q_n(Psi, l) > Psi^s(l + 1), together with the partial
/// sum at that point. Only block ends are examined: inside a block Q_n cannot
/// cross the (constant) next value. Equality is not a crossing, so ties go to
/// the larger index.
template <BlockSequence S>
ThresholdScan scan_l_star(const S& seq, std::uint64_t n, double s, const FunctionalOptions& opt = {}) {
  if (!(s > 0)) throw DomainError("find_l_star: s must be > 0");
  LogAccumulator acc;
  for (BlockCursor<S> c(seq);; c.advance()) {
    if (c.index() >= opt.max_blocks)
      throw ConvergenceError("find_l_star: no threshold index within the scan budget");
    const Block& b = c.current();
    acc.add_log(std::log(static_cast<double>(b.count)) - s * b.log_value);
    if (c.end() > n) {
      const double log_q = std::log(static_cast<double>(c.end() - n)) - acc.log();
      if (log_q > s * c.next().log_value) return {c.end(), acc.log()};
    }
  }
}

template <BlockSequence S>
std::uint64_t find_l_star(const S& seq, std::uint64_t n, double s, const FunctionalOptions& opt = {}) {
  return scan_l_star(seq, n, s, opt).l_star;
}

struct TailSum {
  double value = 0.0;
  /// log of value; finite even where value underflows
  double log_value = -std::numeric_limits<double>::infinity();
  /// estimated absolute error of value
  double error_bound = 0.0;
};

/// sum_{j>l} Psi^s'(j), block by block in the log domain. Blocks are grouped
/// into dyadic chunks [2^k, 2^(k+1)) of block index. Once the ratio rho of
/// consecutive chunk sums is below 1 the remainder is estimated as
/// chunk * rho / (1 - rho) and added; the sum stops when two successive
/// estimates agree to tol, and their difference is the reported error. If
/// `max_blocks` runs out first, the last estimate is returned provided it has
/// settled to `fallback_tol`.
template <BlockSequence S>
TailSum tail_sum(const S& seq, std::uint64_t l, double s_prime, double tol = 1e-10,
                 std::uint64_t max_blocks = std::uint64_t{1} << 20, double fallback_tol = 1e-4) {
  if (!(s_prime > 0)) throw DomainError("tail_sum: exponent must be > 0");
  if (!(tol > 0)) throw DomainError("tail_sum: tol must be > 0");
  constexpr double kNegInf = -std::numeric_limits<double>::infinity();
  LogAccumulator total, chunk;
  double log_prev_chunk = kNegInf;
  double log_est = kNegInf, rel_change = std::numeric_limits<double>::infinity();
  std::uint64_t chunk_end = 1;  // chunk k covers block indices [2^k, 2^(k+1))
  int stalled = 0, k = 0, estimates = 0;
  for (BlockCursor<S> c(seq);; c.advance()) {
    if (c.index() >= max_blocks) break;
    if (c.end() > l) {
      const std::uint64_t take = c.end() - std::max(c.start(), l);
      const double lt = std::log(static_cast<double>(take)) + s_prime * c.current().log_value;
      total.add_log(lt);
      chunk.add_log(lt);
    }
    if (c.index() + 1 != chunk_end) continue;
    if (!chunk.empty() && log_prev_chunk > kNegInf) {
      const double log_rho = chunk.log() - log_prev_chunk;
      if (log_rho < 0) {
        stalled = 0;
        const double log_rem = chunk.log() + log_rho - std::log(-std::expm1(log_rho));
        const double next = log_add(total.log(), log_rem);
        if (estimates > 0) rel_change = std::abs(std::expm1(next - log_est));
        log_est = next;
        if (++estimates >= 2 && k >= 3 && rel_change <= tol)
          return {std::exp(log_est), log_est, rel_change * std::exp(log_est)};
      } else if (++stalled >= 8 && k >= 12) {
        throw ConvergenceError("tail_sum: chunk ratio >= 1 persistently; series does not converge");
      }
    }
    log_prev_chunk = chunk.empty() ? kNegInf : chunk.log();
    chunk = LogAccumulator{};
    chunk_end *= 2;
    ++k;
  }
  if (estimates >= 2 && rel_change <= fallback_tol) return {std::exp(log_est), log_est, rel_change * std::exp(log_est)};
  throw ConvergenceError("tail_sum: block budget exhausted before convergence");
}

/// H_n(Psi, s) in either regime.
template <BlockSequence S>
FunctionalResult h_functional(const S& seq, std::uint64_t n, double s, const FunctionalOptions& opt = {}) {
  if (!(s > 0)) throw DomainError("h_functional: s must be > 0");
  FunctionalResult res;

  if (s > 1) {
    const double s_prime = s / (s - 1.0);
    const ThresholdScan th = scan_l_star(seq, n, s, opt);
    const TailSum tail = tail_sum(seq, th.l_star, s_prime, opt.tol, opt.tail_blocks);
    const double log_head = s_prime * std::log(static_cast<double>(th.l_star - n)) - (s_prime / s) * th.log_sum;
    res.regime = Regime::tail_regime;
    res.l_star = th.l_star;
    res.log_value = log_add(log_head, tail.log_value) / s_prime;
    res.value = std::exp(res.log_value);
    res.tail_truncation_error_bound = tail.error_bound;
    return res;
  }

  // s <= 1. Inside a block the partial sum is affine in l, so
  // F(l) = (l - n) S(l)^(-1/s) peaks at one real point: only the block ends
  // and the integers around that point need evaluating. Past an index L with
  // Q_n(L) >= s Psi^s(L + 1), F cannot exceed F(L) again.
  res.regime = Regime::sup_regime;
  const double inv_s = 1.0 / s;
  const double log_s = std::log(s);
  double best = -std::numeric_limits<double>::infinity();
  std::uint64_t best_l = 0;
  LogAccumulator acc;  // sum over completed blocks

  auto log_sum_at = [&](std::uint64_t l, std::uint64_t start, double log_b) {
    return log_add(acc.log(), std::log(static_cast<double>(l - start)) + log_b);
  };

  for (BlockCursor<S> c(seq);; c.advance()) {
    if (c.index() >= opt.max_blocks) {
      res.certified = false;
      break;
    }
    const Block& b = c.current();
    const double log_b = -s * b.log_value;  // log Psi^-s on this block
    if (c.end() > n) {
      const std::uint64_t lo = std::max(c.start() + 1, n + 1);
      const std::uint64_t hi = std::min(c.end(), std::max(opt.scan_budget, lo));
      std::vector<std::uint64_t> cand{lo, hi};
      if (s < 1) {
        // y* = s (S0/b - (start - n)) / (1 - s), measured from n
        const double ratio = acc.empty() ? 0.0 : std::exp(acc.log() - log_b);
        const double y = s * (ratio - (static_cast<double>(c.start()) - static_cast<double>(n))) / (1 - s);
        if (y > 0 && std::isfinite(y)) {
          const double x = static_cast<double>(n) + y;
          if (x < static_cast<double>(hi)) {
            const auto f = static_cast<std::uint64_t>(std::floor(x));
            for (std::uint64_t v : {f, f + 1}) cand.push_back(std::clamp(v, lo, hi));
          }
        }
      }
      std::sort(cand.begin(), cand.end());
      cand.erase(std::unique(cand.begin(), cand.end()), cand.end());

      bool done = false;
      for (std::uint64_t l : cand) {
        const double ls = log_sum_at(l, c.start(), log_b);
        const double log_f = std::log(static_cast<double>(l - n)) - inv_s * ls;
        if (log_f >= best) {
          best = log_f;
          best_l = l;
        }
        const double next_log = l < c.end() ? b.log_value : c.next().log_value;
        const double log_q = std::log(static_cast<double>(l - n)) - ls;
        if (log_q >= std::min(log_s, 0.0) + s * next_log) {
          done = true;
          break;
        }
      }
      if (done) break;
      if (hi < c.end() || hi >= opt.scan_budget) {
        res.certified = false;
        break;
      }
    }
    acc.add_log(std::log(static_cast<double>(b.count)) + log_b);
  }

  res.log_value = best;
  res.value = std::exp(best);
  res.l_star = best_l;
  if (!res.certified) {
    const double lim = sequence_limit(seq);
    if (s == 1.0 && lim > 0) {
      // sup is the limit (l - n) / sum Psi^-1 -> lim
      res.value = std::max(res.value, lim);
      res.log_value = std::log(res.value);
      res.l_star.reset();
    }
  }
  return res;
}

} // namespace nterm

#endif
