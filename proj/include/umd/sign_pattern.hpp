#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "umd/dyadic.hpp"
#include "umd/haar.hpp"
#include "umd/rng.hpp"

namespace umd {

/// The three sign families, from most to least constrained:
/// alternating = the single pattern (-1)^k; level = one sign per level;
/// free = one sign per tree node. alternating is a level pattern and every
/// level pattern is a free assignment.
enum class SignFamily { alternating, level, free };

inline const char* to_string(SignFamily family) {
  switch (family) {
    case SignFamily::alternating: return "alternating";
    case SignFamily::level: return "level";
    case SignFamily::free: return "free";
  }
  return "?";
}

inline SignFamily parse_sign_family(const std::string& text) {
  if (text == "alternating") return SignFamily::alternating;
  if (text == "level") return SignFamily::level;
  if (text == "free") return SignFamily::free;
  throw std::invalid_argument("unknown sign family '" + text + "'");
}

/// Total sign assignment on the depth-n tree, stored flat in level-major
/// order. The family tag declares the constraint the values must satisfy;
/// construction validates it.
class SignPattern {
 public:
  SignPattern(SignFamily family, int depth, std::vector<std::int8_t> values)
      : family_(family), depth_(depth), values_(std::move(values)) {
    if (depth < 0) throw std::invalid_argument("SignPattern: negative depth");
    if (static_cast<std::int64_t>(values_.size()) != tree_size(depth))
      throw std::invalid_argument("SignPattern: value count does not match depth");
    for (std::int8_t v : values_)
      if (v != 1 && v != -1) throw std::invalid_argument("SignPattern: signs must be +1 or -1");
    validate_family();
  }

  /// The fixed pattern (-1)^k: -1 on odd levels, +1 on even levels.
  static SignPattern alternating(int depth) {
    std::vector<std::int8_t> v(static_cast<std::size_t>(tree_size(depth)));
    fill_by_level(v, depth, [](int k) { return (k % 2 == 0) ? std::int8_t(1) : std::int8_t(-1); });
    return SignPattern(SignFamily::alternating, depth, std::move(v));
  }

  /// Level pattern number `rank` in lexicographic order: bit (k-1) of rank
  /// clear means +1 on level k. Rank 0 is all +1.
  static SignPattern level_pattern(int depth, std::uint64_t rank) {
    if (depth > 0 && depth < 64 && rank >= (std::uint64_t(1) << depth))
      throw std::invalid_argument("SignPattern: level rank out of range");
    std::vector<std::int8_t> v(static_cast<std::size_t>(tree_size(depth)));
    fill_by_level(v, depth,
                  [rank](int k) { return (rank >> (k - 1)) & 1 ? std::int8_t(-1) : std::int8_t(1); });
    return SignPattern(SignFamily::level, depth, std::move(v));
  }

  static SignPattern from_level_signs(int depth, const std::vector<int>& per_level) {
    if (static_cast<int>(per_level.size()) != depth)
      throw std::invalid_argument("SignPattern: need one sign per level");
    std::vector<std::int8_t> v(static_cast<std::size_t>(tree_size(depth)));
    fill_by_level(v, depth, [&](int k) { return static_cast<std::int8_t>(per_level[static_cast<std::size_t>(k - 1)]); });
    return SignPattern(SignFamily::level, depth, std::move(v));
  }

  /// Free pattern number `rank`: bit flat_index(idx) of rank clear means +1.
  static SignPattern free_pattern(int depth, std::uint64_t rank) {
    const std::int64_t count = tree_size(depth);
    if (count < 64 && rank >= (std::uint64_t(1) << count))
      throw std::invalid_argument("SignPattern: free rank out of range");
    std::vector<std::int8_t> v(static_cast<std::size_t>(count));
    for (std::int64_t c = 0; c < count; ++c)
      v[static_cast<std::size_t>(c)] = (rank >> c) & 1 ? std::int8_t(-1) : std::int8_t(1);
    return SignPattern(SignFamily::free, depth, std::move(v));
  }

  static SignPattern random_free(int depth, Rng& rng) {
    std::vector<std::int8_t> v(static_cast<std::size_t>(tree_size(depth)));
    for (auto& s : v) s = static_cast<std::int8_t>(rng.sign());
    return SignPattern(SignFamily::free, depth, std::move(v));
  }

  SignFamily family() const { return family_; }
  int depth() const { return depth_; }
  const std::vector<std::int8_t>& values() const { return values_; }

  int sign(const HaarIndex& idx) const {
    if (idx.level() > depth_)
      throw std::out_of_range("SignPattern: index " + idx.to_string() + " beyond depth");
    return values_[static_cast<std::size_t>(flat_index(idx))];
  }

  /// Pattern with the sign at one flat position flipped; the result is
  /// tagged free (a single flip leaves the constrained families).
  SignPattern flipped(std::int64_t flat) const {
    std::vector<std::int8_t> v = values_;
    v.at(static_cast<std::size_t>(flat)) = static_cast<std::int8_t>(-v.at(static_cast<std::size_t>(flat)));
    return SignPattern(SignFamily::free, depth_, std::move(v));
  }

  /// Level pattern with the sign of one whole level flipped.
  SignPattern level_flipped(int level) const {
    if (level < 1 || level > depth_) throw std::out_of_range("SignPattern: level out of range");
    std::vector<std::int8_t> v = values_;
    for (std::int64_t j = 1; j <= HaarIndex::positions_at_level(level); ++j) {
      const auto f = static_cast<std::size_t>(flat_index(HaarIndex(level, j)));
      v[f] = static_cast<std::int8_t>(-v[f]);
    }
    return SignPattern(SignFamily::level, depth_, std::move(v));
  }

  /// Lexicographic order with +1 before -1; used for deterministic
  /// tie-breaking between equally good patterns.
  bool lex_less(const SignPattern& other) const {
    for (std::size_t c = 0; c < values_.size() && c < other.values_.size(); ++c) {
      if (values_[c] != other.values_[c]) return values_[c] > other.values_[c];  // +1 < -1
    }
    return values_.size() < other.values_.size();
  }

  friend bool operator==(const SignPattern& a, const SignPattern& b) {
    return a.depth_ == b.depth_ && a.values_ == b.values_;
  }

 private:
  template <typename Fn>
  static void fill_by_level(std::vector<std::int8_t>& v, int depth, Fn sign_of_level) {
    for (int k = 1; k <= depth; ++k) {
      const std::int8_t s = sign_of_level(k);
      for (std::int64_t j = 1; j <= HaarIndex::positions_at_level(k); ++j)
        v[static_cast<std::size_t>(flat_index(HaarIndex(k, j)))] = s;
    }
  }

  void validate_family() const {
    if (family_ == SignFamily::free) return;
    for (int k = 1; k <= depth_; ++k) {
      const std::int8_t s = values_[static_cast<std::size_t>(flat_index(HaarIndex(k, 1)))];
      if (family_ == SignFamily::alternating) {
        const std::int8_t want = (k % 2 == 0) ? std::int8_t(1) : std::int8_t(-1);
        if (s != want) throw std::invalid_argument("SignPattern: not the alternating pattern");
      }
      for (std::int64_t j = 2; j <= HaarIndex::positions_at_level(k); ++j)
        if (values_[static_cast<std::size_t>(flat_index(HaarIndex(k, j)))] != s)
          throw std::invalid_argument("SignPattern: level family requires constant sign per level");
    }
  }

  SignFamily family_;
  int depth_;
  std::vector<std::int8_t> values_;
};

/// Expansion with each coefficient multiplied by its sign; the mean is
/// untouched.
template <typename Scalar>
HaarExpansion<Scalar> apply_signs(const HaarExpansion<Scalar>& x, const SignPattern& eps) {
  if (eps.depth() < x.depth())
    throw std::invalid_argument("sign pattern depth below expansion depth");
  HaarExpansion<Scalar> out = x;
  for (Eigen::Index c = 0; c < out.num_indices(); ++c)
    if (eps.values()[static_cast<std::size_t>(c)] < 0) out.coefficients().col(c) *= Scalar(-1);
  return out;
}

}  // namespace umd
