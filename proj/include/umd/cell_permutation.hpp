#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "umd/haar.hpp"
#include "umd/step_function.hpp"
#include "umd/tolerances.hpp"

namespace umd {

/// Measure-preserving transformation of [0,1) given as a permutation of the
/// 2^R dyadic cells at resolution R: the point map sends cell c onto cell
/// pi(c), translating rigidly. Composition convention: compose(a, b) is the
/// point map t -> a(b(t)), so pushforward(f, compose(a, b)) equals
/// pushforward(pushforward(f, a), b) -- b acts last on points, a acts first
/// on the function.
class CellPermutation {
 public:
  explicit CellPermutation(int resolution)
      : resolution_(check_resolution(resolution)), pi_(std::size_t(1) << resolution) {
    std::iota(pi_.begin(), pi_.end(), std::int64_t(0));
  }

  CellPermutation(int resolution, std::vector<std::int64_t> pi)
      : resolution_(check_resolution(resolution)), pi_(std::move(pi)) {
    const std::int64_t n = std::int64_t(1) << resolution_;
    if (static_cast<std::int64_t>(pi_.size()) != n)
      throw std::invalid_argument("permutation size does not match resolution");
    std::vector<bool> seen(static_cast<std::size_t>(n), false);
    for (std::int64_t v : pi_) {
      if (v < 0 || v >= n || seen[static_cast<std::size_t>(v)])
        throw std::invalid_argument("cell mapping is not a bijection");
      seen[static_cast<std::size_t>(v)] = true;
    }
  }

  static CellPermutation identity(int resolution) { return CellPermutation(resolution); }

  int resolution() const { return resolution_; }
  std::int64_t num_cells() const { return static_cast<std::int64_t>(pi_.size()); }
  const std::vector<std::int64_t>& mapping() const { return pi_; }

  /// Image cell of cell c under the point map.
  std::int64_t operator()(std::int64_t c) const { return pi_[static_cast<std::size_t>(c)]; }

  bool is_identity() const {
    for (std::size_t c = 0; c < pi_.size(); ++c)
      if (pi_[c] != static_cast<std::int64_t>(c)) return false;
    return true;
  }

  /// Exact image of a dyadic point: the offset within the cell is kept.
  DyadicRational apply_point(const DyadicRational& t) const {
    const Eigen::Index c = cell_of(t, resolution_);
    const auto r = static_cast<std::uint32_t>(resolution_);
    return t + DyadicRational(pi_[static_cast<std::size_t>(c)] - c, r);
  }

  /// Same map at a finer resolution: each cell splits into children mapped
  /// order-preservingly (the map translates cells rigidly).
  CellPermutation refined(int resolution) const {
    check_resolution(resolution);
    if (resolution < resolution_) throw std::invalid_argument("cannot refine to coarser resolution");
    CellPermutation out = *this;
    while (out.resolution_ < resolution) {
      std::vector<std::int64_t> next(out.pi_.size() * 2);
      for (std::size_t c = 0; c < out.pi_.size(); ++c) {
        next[2 * c] = 2 * out.pi_[c];
        next[2 * c + 1] = 2 * out.pi_[c] + 1;
      }
      out.pi_ = std::move(next);
      ++out.resolution_;
    }
    return out;
  }

  CellPermutation inverse() const {
    std::vector<std::int64_t> inv(pi_.size());
    for (std::size_t c = 0; c < pi_.size(); ++c) inv[static_cast<std::size_t>(pi_[c])] = static_cast<std::int64_t>(c);
    return CellPermutation(resolution_, std::move(inv));
  }

  friend bool operator==(const CellPermutation& a, const CellPermutation& b) {
    return a.resolution_ == b.resolution_ && a.pi_ == b.pi_;
  }

 private:
  int resolution_;
  std::vector<std::int64_t> pi_;
};

/// The interval swap phi_h^(i): exchanges the two middle quarters
/// Delta_{h+1}^(4i-2) and Delta_{h+1}^(4i-1) of the support of chi_h^(i),
/// fixing everything else. Involution.
struct IntervalSwap {
  int level;               // h
  std::int64_t position;   // i, with (h, i) in the tree

  HaarIndex index() const { return HaarIndex(level, position); }

  std::string to_string() const {
    return "phi(" + std::to_string(level) + "," + std::to_string(position) + ")";
  }
};

inline CellPermutation swap(int h, std::int64_t i) {
  (void)HaarIndex(h, i);  // validates (h, i)
  CellPermutation sigma(h + 1);
  std::vector<std::int64_t> pi = sigma.mapping();
  std::swap(pi[static_cast<std::size_t>(4 * i - 3)], pi[static_cast<std::size_t>(4 * i - 2)]);
  return CellPermutation(h + 1, std::move(pi));
}

inline CellPermutation swap(const IntervalSwap& s) { return swap(s.level, s.position); }

/// Point map t -> a(b(t)); operands are refined to a common resolution.
inline CellPermutation compose(const CellPermutation& a, const CellPermutation& b) {
  const int r = std::max(a.resolution(), b.resolution());
  const CellPermutation ra = a.refined(r), rb = b.refined(r);
  std::vector<std::int64_t> pi(static_cast<std::size_t>(ra.num_cells()));
  for (std::int64_t c = 0; c < ra.num_cells(); ++c) pi[static_cast<std::size_t>(c)] = ra(rb(c));
  return CellPermutation(r, std::move(pi));
}

/// f o sigma: cell c of the result carries f's value on cell sigma(c).
template <typename Scalar>
StepFunction<Scalar> pushforward(const StepFunction<Scalar>& f, const CellPermutation& sigma) {
  const int r = std::max(f.resolution(), sigma.resolution());
  const StepFunction<Scalar> rf = f.refined(r);
  const CellPermutation rs = sigma.refined(r);
  typename StepFunction<Scalar>::Matrix out(rf.dimension(), rf.num_cells());
  for (Eigen::Index c = 0; c < rf.num_cells(); ++c) out.col(c) = rf.cell(rs(c));
  return StepFunction<Scalar>(r, std::move(out));
}

enum class HaarActionKind {
  unchanged,              // k < h, or k = h with j != i, or k = h+1 with j not a child position
  child_average,          // k = h, j = i: (chi_{h+1}^(2i-1) + chi_{h+1}^(2i)) / sqrt(2)
  parent_mixing,          // k = h+1, j in {2i-1, 2i}: parent plus a child difference
  permuted_within_level,  // k > h+1: chi_k^(j*)
};

inline const char* to_string(HaarActionKind kind) {
  switch (kind) {
    case HaarActionKind::unchanged: return "unchanged";
    case HaarActionKind::child_average: return "child_average";
    case HaarActionKind::parent_mixing: return "parent_mixing";
    case HaarActionKind::permuted_within_level: return "permuted_within_level";
  }
  return "?";
}

/// chi_k^(j) o phi_h^(i), described exactly: a case tag, the image index for
/// the within-level case, and the full expansion of the composite (scalar
/// coefficients), which synthesizes to the composed function.
struct HaarAction {
  HaarActionKind kind;
  HaarIndex source;                  // the (k, j) acted on
  std::optional<HaarIndex> image;    // set for permuted_within_level: (k, j*)
  HaarExpansion<double> expansion;   // dimension 1, depth max(k, h+1)
};

/// Computes the action case by index arithmetic; the within-level target j*
/// is recovered by pushing the Haar function through the swap and
/// re-analyzing rather than by closed-form index algebra.
inline HaarAction haar_action(int h, std::int64_t i, const HaarIndex& target) {
  (void)HaarIndex(h, i);  // validates (h, i)
  const int k = target.level();
  const std::int64_t j = target.position();
  const int depth = std::max(k, h + 1);

  const auto unchanged = [&] {
    HaarExpansion<double> e(depth, 1);
    e.coefficient(target)(0) = 1.0;
    return HaarAction{HaarActionKind::unchanged, target, std::nullopt, std::move(e)};
  };

  if (k < h || (k == h && j != i)) return unchanged();

  if (k == h && j == i) {
    HaarExpansion<double> e(depth, 1);
    const auto [left, right] = target.children();
    e.coefficient(left)(0) = 1.0 / std::sqrt(2.0);
    e.coefficient(right)(0) = 1.0 / std::sqrt(2.0);
    return {HaarActionKind::child_average, target, std::nullopt, std::move(e)};
  }

  if (k == h + 1) {
    if (j != 2 * i - 1 && j != 2 * i) return unchanged();
    // The two children of (h, i) mix with their parent: the swap moves half
    // of each child's support across the former sign boundary.
    HaarExpansion<double> e(depth, 1);
    const HaarIndex parent(h, i);
    const HaarIndex left(h + 1, 2 * i - 1), right(h + 1, 2 * i);
    const double s = (j == 2 * i - 1) ? 1.0 : -1.0;
    e.coefficient(parent)(0) = 1.0 / std::sqrt(2.0);
    e.coefficient(left)(0) = s * 0.5;
    e.coefficient(right)(0) = -s * 0.5;
    return {HaarActionKind::parent_mixing, target, std::nullopt, std::move(e)};
  }

  // k > h+1: the composite is another level-k Haar function.
  const StepFunction<double> pushed = pushforward(haar_cells(target, k), swap(h, i));
  const HaarExpansion<double> x = analyze(pushed);
  const Spectrum s = spectrum(x);
  if (s.size() != 1 || s.indices[0].level() != k)
    throw std::logic_error("haar_action: push-through of " + target.to_string() +
                           " did not yield a single level-" + std::to_string(k) + " index");
  const HaarIndex img = s.indices[0];
  HaarExpansion<double> e(depth, 1);
  e.coefficient(img)(0) = 1.0;
  return {HaarActionKind::permuted_within_level, target, img, std::move(e)};
}

/// Residuals of the shifting property: pushing f through phi_h^(i) when both
/// children of (h, i) carry no coefficient must zero the (h, i) coefficient
/// and give each child the value old/sqrt(2).
struct MainPropertyReport {
  double residual_source;  // |new coeff at (h, i)|
  double residual_left;    // |new coeff at (h+1, 2i-1) - old/sqrt(2)|
  double residual_right;   // |new coeff at (h+1, 2i) - old/sqrt(2)|

  double max_residual() const { return std::max(residual_source, std::max(residual_left, residual_right)); }
};

template <typename Scalar>
MainPropertyReport check_main_property(const HaarExpansion<Scalar>& x, int h, std::int64_t i,
                                       double tau = kTauSpec) {
  const HaarIndex node(h, i);
  const auto [left, right] = node.children();
  const int depth = std::max(x.depth(), h + 1);
  const HaarExpansion<Scalar> xp = x.padded(depth);
  if (xp.coefficient(left).template lpNorm<Eigen::Infinity>() > tau ||
      xp.coefficient(right).template lpNorm<Eigen::Infinity>() > tau)
    throw std::invalid_argument("check_main_property: children of " + node.to_string() +
                                " carry nonzero coefficients");

  const StepFunction<Scalar> f = synthesize(xp, depth);
  const HaarExpansion<Scalar> y = analyze(pushforward(f, swap(h, i)));
  const auto expected = (xp.coefficient(node) / std::sqrt(Scalar(2))).eval();
  return {static_cast<double>(y.coefficient(node).template lpNorm<Eigen::Infinity>()),
          static_cast<double>((y.coefficient(left) - expected).template lpNorm<Eigen::Infinity>()),
          static_cast<double>((y.coefficient(right) - expected).template lpNorm<Eigen::Infinity>())};
}

}  // namespace umd
