#ifndef NTERM_SEQUENCE_HPP
#define NTERM_SEQUENCE_HPP

// Nonincreasing positive sequences Psi(1), Psi(2), ... described as runs of
// equal values ("blocks"). A rearranged weight is one block per shell; an
// arbitrary strictly decreasing sequence is one block per element.

#include <nterm/error.hpp>

#include <cmath>
#include <concepts>
#include <cstdint>
#include <limits>
#include <utility>

namespace nterm {

/// `count` consecutive elements equal to `value`. `log_value` carries
/// log(value) and stays finite where `value` underflows.
struct Block {
  double value;
  std::uint64_t count;
  double log_value;
};

inline Block make_block(double value, std::uint64_t count) { return {value, count, std::log(value)}; }

/// block(0), block(1), ... enumerate the sequence front to back. Blocks may
/// have count 0; values must be positive and nonincreasing.
template <class S>
concept BlockSequence = requires(const S& s, std::uint64_t i) {
  { s.block(i) } -> std::same_as<Block>;
};

/// Sequences that know their limit at infinity.
template <class S>
concept HasLimit = requires(const S& s) {
  { s.limit() } -> std::convertible_to<double>;
};

template <BlockSequence S>
double sequence_limit(const S& s) {
  if constexpr (HasLimit<S>) return s.limit();
  else return 0.0;
}

/// Psi(j) for j >= 1, by walking the blocks.
template <BlockSequence S>
double element(const S& s, std::uint64_t j) {
  if (j == 0) throw DomainError("element: index is 1-based");
  std::uint64_t end = 0;
  for (std::uint64_t i = 0;; ++i) {
    const Block b = s.block(i);
    if (b.count >= j - end) return b.value;
    end += b.count;
  }
}

/// Psi == c.
class ConstantSequence {
public:
  explicit ConstantSequence(double c) : c_(c) {
    if (!(c > 0)) throw DomainError("ConstantSequence: value must be > 0");
  }
  Block block(std::uint64_t) const { return make_block(c_, std::uint64_t{1} << 32); }
  double limit() const { return c_; }

private:
  double c_;
};

/// Psi(j) = first * ratio^(j-1), 0 < ratio < 1.
class GeometricSequence {
public:
  GeometricSequence(double first, double ratio) : log_first_(std::log(first)), log_ratio_(std::log(ratio)) {
    if (!(first > 0) || !(ratio > 0 && ratio < 1))
      throw DomainError("GeometricSequence: need first > 0 and 0 < ratio < 1");
  }
  Block block(std::uint64_t i) const {
    const double lv = log_first_ + log_ratio_ * static_cast<double>(i);
    return {std::exp(lv), 1, lv};
  }

private:
  double log_first_;
  double log_ratio_;
};

/// c * Psi for a positive constant c.
template <BlockSequence S>
class ScaledSequence {
public:
  ScaledSequence(S base, double c) : base_(std::move(base)), c_(c) {
    if (!(c > 0)) throw DomainError("ScaledSequence: factor must be > 0");
  }
  Block block(std::uint64_t i) const {
    Block b = base_.block(i);
    b.value *= c_;
    b.log_value += std::log(c_);
    return b;
  }
  double limit() const { return c_ * sequence_limit(base_); }

private:
  S base_;
  double c_;
};

/// Running sum of positive terms given by their logarithms. Stays finite when
/// the terms range over hundreds of decades; Kahan-compensated within the
/// current scale.
class LogAccumulator {
public:
  void add_log(double log_term) {
    if (std::isinf(log_term) && log_term < 0) return;
    if (empty()) {
      shift_ = log_term;
      sum_ = 1.0;
      comp_ = 0.0;
      return;
    }
    if (log_term > shift_ + 64.0) rescale(log_term);
    kahan(std::exp(log_term - shift_));
  }

  bool empty() const noexcept { return shift_ == -std::numeric_limits<double>::infinity(); }

  double log() const noexcept {
    return empty() ? -std::numeric_limits<double>::infinity() : shift_ + std::log(sum_);
  }

private:
  void rescale(double new_shift) {
    const double f = std::exp(shift_ - new_shift);
    sum_ *= f;
    comp_ *= f;
    shift_ = new_shift;
  }
  void kahan(double x) {
    const double y = x - comp_;
    const double t = sum_ + y;
    comp_ = (t - sum_) - y;
    sum_ = t;
  }

  double shift_ = -std::numeric_limits<double>::infinity();
  double sum_ = 0.0;
  double comp_ = 0.0;
};

/// log(exp(a) + exp(b))
inline double log_add(double a, double b) {
  if (a < b) std::swap(a, b);
  if (std::isinf(b) && b < 0) return a;
  return a + std::log1p(std::exp(b - a));
}

} // namespace nterm

#endif
