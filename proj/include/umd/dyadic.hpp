#pragma once

#include <bit>
#include <cassert>
#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace umd {

/// Exact dyadic rational: numerator / 2^exponent, kept in canonical form
/// (numerator odd or zero, exponent 0 when numerator is 0).  All interval
/// logic below runs on these; no floating point enters until evaluation.
class DyadicRational {
public:
  constexpr DyadicRational() = default;

  constexpr DyadicRational(std::int64_t numerator, std::uint32_t exponent = 0)
      : num_(numerator), exp_(exponent) {
    normalize();
  }

  static constexpr DyadicRational zero() { return DyadicRational(); }
  static constexpr DyadicRational one() { return DyadicRational(1); }

  constexpr std::int64_t numerator() const { return num_; }
  constexpr std::uint32_t exponent() const { return exp_; }

  constexpr bool is_zero() const { return num_ == 0; }

  constexpr DyadicRational operator-() const {
    DyadicRational r;
    r.num_ = -num_;
    r.exp_ = exp_;
    return r;
  }

  friend constexpr DyadicRational operator+(const DyadicRational& a, const DyadicRational& b) {
    const std::uint32_t e = a.exp_ > b.exp_ ? a.exp_ : b.exp_;
    return DyadicRational(a.scaled_numerator(e) + b.scaled_numerator(e), e);
  }

  friend constexpr DyadicRational operator-(const DyadicRational& a, const DyadicRational& b) {
    return a + (-b);
  }

  friend constexpr DyadicRational operator*(const DyadicRational& a, const DyadicRational& b) {
    return DyadicRational(a.num_ * b.num_, a.exp_ + b.exp_);
  }

  /// Exact division by 2^k.
  constexpr DyadicRational half_pow(std::uint32_t k) const {
    return DyadicRational(num_, exp_ + k);
  }

  friend constexpr bool operator==(const DyadicRational& a, const DyadicRational& b) {
    return a.num_ == b.num_ && a.exp_ == b.exp_;
  }

  friend constexpr std::strong_ordering operator<=>(const DyadicRational& a,
                                                    const DyadicRational& b) {
    const std::uint32_t e = a.exp_ > b.exp_ ? a.exp_ : b.exp_;
    return a.scaled_numerator(e) <=> b.scaled_numerator(e);
  }

  constexpr double to_double() const {
    // Exact for the magnitudes used here (|num| < 2^53).
    return static_cast<double>(num_) / static_cast<double>(std::int64_t(1) << exp_);
  }

  std::string to_string() const {
    if (exp_ == 0) return std::to_string(num_);
    return std::to_string(num_) + "/2^" + std::to_string(exp_);
  }

private:
  constexpr void normalize() {
    if (num_ == 0) {
      exp_ = 0;
      return;
    }
    while (exp_ > 0 && (num_ & 1) == 0) {
      num_ >>= 1;
      --exp_;
    }
  }

  constexpr std::int64_t scaled_numerator(std::uint32_t e) const {
    assert(e >= exp_);
    return num_ << (e - exp_);
  }

  std::int64_t num_ = 0;
  std::uint32_t exp_ = 0;
};

/// Half-open dyadic interval [(j-1)/2^k, j/2^k) of width exactly 2^-k.
/// The position j may be any integer; level k >= 1.
class DyadicInterval {
public:
  DyadicInterval(int level, std::int64_t position) : level_(level), position_(position) {
    if (level < 1) throw std::invalid_argument("DyadicInterval: level must be >= 1");
  }

  int level() const { return level_; }
  std::int64_t position() const { return position_; }

  DyadicRational lower() const {
    return DyadicRational(position_ - 1, static_cast<std::uint32_t>(level_));
  }
  DyadicRational upper() const {
    return DyadicRational(position_, static_cast<std::uint32_t>(level_));
  }
  DyadicRational width() const { return DyadicRational(1, static_cast<std::uint32_t>(level_)); }

  bool contains(const DyadicRational& t) const { return lower() <= t && t < upper(); }

  friend bool operator==(const DyadicInterval& a, const DyadicInterval& b) {
    return a.level_ == b.level_ && a.position_ == b.position_;
  }

private:
  int level_;
  std::int64_t position_;
};

inline DyadicInterval interval(int level, std::int64_t position) {
  return DyadicInterval(level, position);
}

/// Node (k, j) of the dyadic tree: k >= 1, 1 <= j <= 2^(k-1).
/// Labels the Haar function supported on the two intervals
/// Delta_k^(2j-1) (positive half) and Delta_k^(2j) (negative half).
class HaarIndex {
public:
  HaarIndex(int level, std::int64_t position) : level_(level), position_(position) {
    if (level < 1) throw std::invalid_argument("HaarIndex: level must be >= 1");
    if (position < 1 || position > positions_at_level(level))
      throw std::invalid_argument("HaarIndex: position " + std::to_string(position) +
                                  " out of range at level " + std::to_string(level));
  }

  static std::int64_t positions_at_level(int level) { return std::int64_t(1) << (level - 1); }

  int level() const { return level_; }
  std::int64_t position() const { return position_; }

  std::pair<HaarIndex, HaarIndex> children() const {
    return {HaarIndex(level_ + 1, 2 * position_ - 1), HaarIndex(level_ + 1, 2 * position_)};
  }

  bool has_parent() const { return level_ > 1; }
  HaarIndex parent() const {
    if (!has_parent()) throw std::logic_error("HaarIndex: root level has no parent");
    return HaarIndex(level_ - 1, (position_ + 1) / 2);
  }

  DyadicInterval positive_half() const { return DyadicInterval(level_, 2 * position_ - 1); }
  DyadicInterval negative_half() const { return DyadicInterval(level_, 2 * position_); }

  /// Support endpoints: [(j-1)/2^(k-1), j/2^(k-1)).
  std::pair<DyadicRational, DyadicRational> support() const {
    return {positive_half().lower(), negative_half().upper()};
  }

  friend bool operator==(const HaarIndex& a, const HaarIndex& b) {
    return a.level_ == b.level_ && a.position_ == b.position_;
  }
  friend std::strong_ordering operator<=>(const HaarIndex& a, const HaarIndex& b) {
    if (auto c = a.level_ <=> b.level_; c != 0) return c;
    return a.position_ <=> b.position_;
  }

  std::string to_string() const {
    return "(" + std::to_string(level_) + "," + std::to_string(position_) + ")";
  }

private:
  int level_;
  std::int64_t position_;
};

inline std::pair<HaarIndex, HaarIndex> children(const HaarIndex& idx) { return idx.children(); }

/// Number of tree nodes with level <= n, i.e. |D_1^n| = 2^n - 1.
inline std::int64_t tree_size(int depth) {
  if (depth < 0) throw std::invalid_argument("tree_size: negative depth");
  return (std::int64_t(1) << depth) - 1;
}

/// Flat index of (k, j) in the level-major enumeration of D_1^n:
/// levels concatenated, positions ascending.  Inverse of flat_to_index.
inline std::int64_t flat_index(const HaarIndex& idx) {
  return (std::int64_t(1) << (idx.level() - 1)) - 1 + (idx.position() - 1);
}

inline HaarIndex flat_to_index(std::int64_t flat) {
  if (flat < 0) throw std::invalid_argument("flat_to_index: negative index");
  int level = std::bit_width(static_cast<std::uint64_t>(flat) + 1);
  std::int64_t offset = (std::int64_t(1) << (level - 1)) - 1;
  return HaarIndex(level, flat - offset + 1);
}

/// Levels m..n of the dyadic tree.
class TreeRange {
public:
  TreeRange(int lower_level, int upper_level) : m_(lower_level), n_(upper_level) {
    if (m_ < 1) throw std::invalid_argument("TreeRange: lower level must be >= 1");
    if (m_ > n_) throw std::invalid_argument("TreeRange: lower level exceeds upper level");
  }

  int lower_level() const { return m_; }
  int upper_level() const { return n_; }

  std::int64_t size() const { return tree_size(n_) - tree_size(m_ - 1); }

  /// Lexicographic (level, position) order.
  std::vector<HaarIndex> enumerate() const {
    std::vector<HaarIndex> out;
    out.reserve(static_cast<std::size_t>(size()));
    for (int k = m_; k <= n_; ++k)
      for (std::int64_t j = 1; j <= HaarIndex::positions_at_level(k); ++j)
        out.emplace_back(k, j);
    return out;
  }

private:
  int m_;
  int n_;
};

inline std::vector<HaarIndex> enumerate(const TreeRange& range) { return range.enumerate(); }

}  // namespace umd
