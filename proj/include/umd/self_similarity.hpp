#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "umd/dyadic.hpp"
#include "umd/haar.hpp"
#include "umd/spaces.hpp"
#include "umd/step_function.hpp"

namespace umd {

inline void check_subtree_args(std::int64_t i, int n) {
  if (n < 1) throw std::invalid_argument("subtree: base depth must be >= 1");
  if (i < 1 || i > (std::int64_t(1) << n))
    throw std::invalid_argument("subtree index " + std::to_string(i) + " out of range for n = " +
                                std::to_string(n));
}

/// Membership in the i-th subtree of the upper half-tree: levels n+1..2n,
/// positions (i-1)*2^(k-n-1) < j <= i*2^(k-n-1).
inline bool in_subtree(const HaarIndex& idx, std::int64_t i, int n) {
  check_subtree_args(i, n);
  const int k = idx.level();
  if (k < n + 1 || k > 2 * n) return false;
  const std::int64_t width = std::int64_t(1) << (k - n - 1);
  return (i - 1) * width < idx.position() && idx.position() <= i * width;
}

/// All indices of the i-th subtree, level-major.
inline std::vector<HaarIndex> subtree_indices(std::int64_t i, int n) {
  check_subtree_args(i, n);
  std::vector<HaarIndex> out;
  out.reserve((std::size_t(1) << n) - 1);
  for (int k = n + 1; k <= 2 * n; ++k) {
    const std::int64_t width = std::int64_t(1) << (k - n - 1);
    for (std::int64_t j = (i - 1) * width + 1; j <= i * width; ++j) out.emplace_back(k, j);
  }
  return out;
}

/// The bijection of the i-th subtree with the depth-n tree:
/// (k, j) -> (k - n, j - (i-1)*2^(k-n-1)).
inline HaarIndex reindex(const HaarIndex& idx, std::int64_t i, int n) {
  if (!in_subtree(idx, i, n))
    throw std::invalid_argument("reindex: " + idx.to_string() + " is not in subtree " +
                                std::to_string(i) + " of n = " + std::to_string(n));
  const std::int64_t width = std::int64_t(1) << (idx.level() - n - 1);
  return HaarIndex(idx.level() - n, idx.position() - (i - 1) * width);
}

inline HaarIndex reindex_inverse(const HaarIndex& idx, std::int64_t i, int n) {
  check_subtree_args(i, n);
  if (idx.level() > n) throw std::invalid_argument("reindex_inverse: index beyond depth n");
  const std::int64_t width = std::int64_t(1) << (idx.level() - 1);
  return HaarIndex(idx.level() + n, idx.position() + (i - 1) * width);
}

struct RescalingReport {
  double max_residual;
  std::int64_t samples;
};

/// Verifies the rescaling identity at exact dyadic midpoints: for t ranging
/// over cell midpoints, chi_k^(j)((t+i-1)/2^n) equals 2^(n/2) chi_{k'}^{(j')}(t)
/// when (k,j) lies in subtree i, and vanishes otherwise. Defined for indices
/// in the upper half-tree (n < k <= 2n); shallower functions are constant on
/// the block and the identity does not apply.
inline RescalingReport check_rescaling(const HaarIndex& idx, std::int64_t i, int n,
                                       int sample_resolution = -1) {
  check_subtree_args(i, n);
  const int k = idx.level();
  if (k <= n || k > 2 * n)
    throw std::invalid_argument("check_rescaling: level " + std::to_string(k) +
                                " outside the upper half-tree of n = " + std::to_string(n));
  const int r = sample_resolution < 0 ? k : sample_resolution;
  if (r < k) throw std::invalid_argument("check_rescaling: sample resolution below level");
  const bool member = in_subtree(idx, i, n);
  const double scale = std::pow(2.0, n / 2.0);
  const HaarIndex target = member ? reindex(idx, i, n) : HaarIndex(1, 1);

  double max_residual = 0;
  const std::int64_t cells = std::int64_t(1) << r;
  for (std::int64_t c = 0; c < cells; ++c) {
    const DyadicRational t(2 * c + 1, static_cast<std::uint32_t>(r + 1));  // cell midpoint
    const DyadicRational s = (t + DyadicRational(i - 1)).half_pow(static_cast<std::uint32_t>(n));
    const double lhs = haar_eval(idx, s);
    const double rhs = member ? scale * haar_eval(target, t) : 0.0;
    max_residual = std::max(max_residual, std::abs(lhs - rhs));
  }
  return {max_residual, cells};
}

/// Splits a depth-2n expansion into its lower part (levels 1..n plus the
/// mean) and upper part (levels n+1..2n, stored as a depth-2n expansion with
/// zero mean and nothing below level n+1). Synthesis is additive across the
/// split.
template <typename Scalar>
std::pair<HaarExpansion<Scalar>, HaarExpansion<Scalar>> split_lower_upper(const HaarExpansion<Scalar>& x,
                                                                          int n) {
  if (n < 1 || x.depth() != 2 * n)
    throw std::invalid_argument("split_lower_upper: expansion depth must be exactly 2n");
  HaarExpansion<Scalar> lower(n, x.dimension());
  lower.mean() = x.mean();
  lower.coefficients() = x.coefficients().leftCols(tree_size(n));
  HaarExpansion<Scalar> upper(2 * n, x.dimension());
  upper.coefficients().rightCols(tree_size(2 * n) - tree_size(n)) =
      x.coefficients().rightCols(tree_size(2 * n) - tree_size(n));
  return {std::move(lower), std::move(upper)};
}

/// The i-th subtree of an upper-part expansion pulled back to the depth-n
/// tree via the index bijection, coefficients unchanged.
template <typename Scalar>
HaarExpansion<Scalar> subtree_component(const HaarExpansion<Scalar>& upper, std::int64_t i, int n) {
  if (upper.depth() != 2 * n)
    throw std::invalid_argument("subtree_component: expansion depth must be exactly 2n");
  HaarExpansion<Scalar> out(n, upper.dimension());
  for (const HaarIndex& idx : subtree_indices(i, n))
    out.coefficient(reindex(idx, i, n)) = upper.coefficient(idx);
  return out;
}

/// (integral of |f|_X^2 over the i-th level-n block)^(1/2).
template <typename Scalar>
Scalar restricted_l2x_norm(const StepFunction<Scalar>& f, std::int64_t i, int n,
                           const NormedSpace<Scalar>& space) {
  check_subtree_args(i, n);
  if (f.resolution() < n) throw std::invalid_argument("restricted_l2x_norm: resolution below n");
  if (f.dimension() != space.dimension())
    throw std::invalid_argument("restricted_l2x_norm: dimension mismatch");
  const Eigen::Index width = Eigen::Index(1) << (f.resolution() - n);
  Scalar sum = 0;
  for (Eigen::Index c = (i - 1) * width; c < i * width; ++c) {
    const Scalar nc = space.norm(f.cell(c));
    sum += nc * nc;
  }
  return std::sqrt(sum / static_cast<Scalar>(f.num_cells()));
}

template <typename Scalar = double>
struct BlockwiseReport {
  Scalar global_norm;               // U
  std::vector<Scalar> block_norms;  // U_i
  double residual;                  // |U - (sum U_i^2)^(1/2)|
};

/// The partition identity U = (sum_i U_i^2)^(1/2) over the 2^n level-n
/// blocks, for any norm on the values.
template <typename Scalar>
BlockwiseReport<Scalar> blockwise_norms(const StepFunction<Scalar>& f, int n,
                                        const NormedSpace<Scalar>& space) {
  BlockwiseReport<Scalar> rep;
  rep.global_norm = l2x_norm(f, space);
  Scalar sum = 0;
  for (std::int64_t i = 1; i <= (std::int64_t(1) << n); ++i) {
    rep.block_norms.push_back(restricted_l2x_norm(f, i, n, space));
    sum += rep.block_norms.back() * rep.block_norms.back();
  }
  rep.residual = std::abs(static_cast<double>(rep.global_norm - std::sqrt(sum)));
  return rep;
}

template <typename Scalar = double>
struct Factor2Report {
  Scalar upper_norm;
  Scalar full_norm;
  double ratio;   // upper / full, 0 when full vanishes
  double slack;   // 2*full - upper
};

/// The factor-2 bound on the upper part: removing the mean and the first n
/// levels at most doubles the norm, since what is removed is the
/// norm-one conditional expectation onto the level-n cells.
template <typename Scalar>
Factor2Report<Scalar> check_upper_bound_factor2(const HaarExpansion<Scalar>& x, int n,
                                                const NormedSpace<Scalar>& space) {
  auto parts = split_lower_upper(x, n);
  const Scalar un = l2x_norm(synthesize(parts.second, 2 * n), space);
  const Scalar fn = l2x_norm(synthesize(x, 2 * n), space);
  Factor2Report<Scalar> rep;
  rep.upper_norm = un;
  rep.full_norm = fn;
  rep.ratio = fn > Scalar(0) ? static_cast<double>(un / fn) : 0.0;
  rep.slack = static_cast<double>(2 * fn - un);
  return rep;
}

template <typename Scalar = double>
struct RestrictionReport {
  double max_residual;  // over i: | l2x(subtree pullback) - restricted norm |
};

/// The rescaled-restriction identity: for each subtree i, the norm of its
/// pullback on [0,1) equals the norm of the upper part restricted to the
/// i-th level-n block (the 2^(n/2) rescaling and the block measure cancel).
template <typename Scalar>
RestrictionReport<Scalar> check_restriction_identity(const HaarExpansion<Scalar>& upper, int n,
                                                     const NormedSpace<Scalar>& space) {
  if (upper.depth() != 2 * n)
    throw std::invalid_argument("check_restriction_identity: expansion depth must be exactly 2n");
  const StepFunction<Scalar> g = synthesize(upper, 2 * n);
  double max_residual = 0;
  for (std::int64_t i = 1; i <= (std::int64_t(1) << n); ++i) {
    const Scalar lhs = l2x_norm(synthesize(subtree_component(upper, i, n), n), space);
    const Scalar rhs = restricted_l2x_norm(g, i, n, space);
    max_residual = std::max(max_residual, std::abs(static_cast<double>(lhs - rhs)));
  }
  return {max_residual};
}

}  // namespace umd
