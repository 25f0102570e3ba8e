#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "umd/cell_permutation.hpp"
#include "umd/haar.hpp"
#include "umd/sign_pattern.hpp"
#include "umd/spaces.hpp"
#include "umd/tolerances.hpp"

namespace umd {

/// Swaps that spread a depth-n spectrum onto the odd levels of the
/// depth-(2n-1) tree, in function-application order: level n is shifted up
/// through n, n+1, ..., 2n-2 to land on 2n-1, then level n-1 to 2n-3, and
/// so on; level 1 stays where it is.
struct SpreadSchedule {
  int source_depth;   // n
  int target_depth;   // 2n - 1
  std::vector<IntervalSwap> swaps;
};

struct Psi1 {
  CellPermutation permutation;  // resolution 2n
  SpreadSchedule schedule;
};

inline Psi1 build_psi1(int n) {
  if (n < 1) throw std::invalid_argument("build_psi1: depth must be >= 1");
  check_resolution(2 * n);
  SpreadSchedule schedule{n, 2 * n - 1, {}};
  for (int level = n; level >= 2; --level)
    for (int h = level; h <= 2 * level - 2; ++h)
      for (std::int64_t i = 1; i <= HaarIndex::positions_at_level(h); ++i)
        schedule.swaps.push_back({h, i});
  CellPermutation psi = CellPermutation::identity(2 * n);
  for (const IntervalSwap& s : schedule.swaps) psi = compose(psi, swap(s));
  return {std::move(psi), std::move(schedule)};
}

/// Signs delta on the odd levels of the depth-(2n-1) tree, read off by
/// comparing the coefficients of f^eps o psi1 with those of f o psi1.
/// Indices where the coefficient vanishes default to -1 (no swap).
struct DeltaSigns {
  int source_depth;  // n
  int depth;         // 2n - 1
  std::vector<std::int8_t> signs;      // flat over the depth-(2n-1) tree
  std::vector<std::uint8_t> realized;  // 1 where the coefficient was nonzero

  int sign(const HaarIndex& idx) const {
    return signs[static_cast<std::size_t>(flat_index(idx))];
  }
  bool is_realized(const HaarIndex& idx) const {
    return realized[static_cast<std::size_t>(flat_index(idx))] != 0;
  }
};

template <typename Scalar>
DeltaSigns extract_delta(const HaarExpansion<Scalar>& x, const SignPattern& eps,
                         const CellPermutation& psi1, double tau = kTauSpec, double tol = 1e-9) {
  const int n = x.depth();
  if (n < 1) throw std::invalid_argument("extract_delta: expansion depth must be >= 1");
  if (eps.depth() != n) throw std::invalid_argument("extract_delta: sign pattern depth mismatch");
  const int r = std::max(psi1.resolution(), 2 * n);
  const HaarExpansion<Scalar> a = analyze(pushforward(synthesize(x, r), psi1), 2 * n - 1);
  const HaarExpansion<Scalar> b = analyze(pushforward(synthesize(apply_signs(x, eps), r), psi1), 2 * n - 1);

  DeltaSigns d{n, 2 * n - 1, std::vector<std::int8_t>(static_cast<std::size_t>(tree_size(2 * n - 1)), -1),
               std::vector<std::uint8_t>(static_cast<std::size_t>(tree_size(2 * n - 1)), 0)};
  for (std::int64_t c = 0; c < tree_size(2 * n - 1); ++c) {
    const HaarIndex idx = flat_to_index(c);
    if (idx.level() % 2 == 0) continue;
    const auto den = a.coefficient(idx);
    const auto num = b.coefficient(idx);
    const double dmax = den.template lpNorm<Eigen::Infinity>();
    if (dmax <= tau) {
      if (num.template lpNorm<Eigen::Infinity>() > std::max(tau, tol))
        throw std::runtime_error("extract_delta: coefficient mismatch at " + idx.to_string() +
                                 " (zero against nonzero)");
      continue;
    }
    Eigen::Index arg = 0;
    den.cwiseAbs().maxCoeff(&arg);
    const int s = (num(arg) * den(arg) >= Scalar(0)) ? 1 : -1;
    const double residual = (num - Scalar(s) * den).template lpNorm<Eigen::Infinity>();
    if (residual > tol * std::max(1.0, dmax))
      throw std::runtime_error("extract_delta: sign ratio not +-1 at " + idx.to_string() +
                               " (residual " + std::to_string(residual) + ")");
    d.signs[static_cast<std::size_t>(c)] = static_cast<std::int8_t>(s);
    d.realized[static_cast<std::size_t>(c)] = 1;
  }
  return d;
}

/// Composition of phi_{2k-1}^(j) over all odd-level indices with delta = +1.
/// The swaps are applied to the function deepest level first: a swap at a
/// shallow level permutes the within-level positions of every deeper
/// coefficient, so shallow swaps must act after the deep ones or the
/// positions recorded in delta would no longer point at the plus signs.
/// Within a level the swaps have disjoint supports and commute; positions
/// ascend.
inline CellPermutation build_psi2(const DeltaSigns& delta) {
  const int n = delta.source_depth;
  CellPermutation psi = CellPermutation::identity(2 * n);
  for (int k = delta.depth; k >= 1; k -= 2)
    for (std::int64_t j = 1; j <= HaarIndex::positions_at_level(k); ++j)
      if (delta.sign(HaarIndex(k, j)) > 0) psi = compose(psi, swap(k, j));
  return psi;
}

/// Full reduction certificate: the permutation psi = psi1 then psi2 (in
/// function-application order), the schedule and delta that produced it, the
/// transported coefficient tuples, and the residuals of the alternating
/// identity <f^eps o psi, chi_k^(j)> = (-1)^k <f o psi, chi_k^(j)> over the
/// whole depth-2n tree.
template <typename Scalar = double>
struct SpreadResult {
  CellPermutation psi;
  CellPermutation psi1;
  CellPermutation psi2;
  SpreadSchedule schedule;
  DeltaSigns delta;
  HaarExpansion<Scalar> transported;         // coefficients of f o psi, depth 2n
  HaarExpansion<Scalar> transported_signed;  // coefficients of f^eps o psi
  double max_residual;
  HaarIndex worst_index;
  double norm_residual_f;     // | l2x(f o psi) - l2x(f) | in the certification space
  double norm_residual_feps;
};

template <typename Scalar>
SpreadResult<Scalar> reduce_to_alternating(const HaarExpansion<Scalar>& x, const SignPattern& eps,
                                           const NormedSpace<Scalar>& space, double tol = 1e-9) {
  const int n = x.depth();
  if (n < 1) throw std::invalid_argument("reduce_to_alternating: expansion depth must be >= 1");
  if (eps.depth() != n) throw std::invalid_argument("reduce_to_alternating: sign pattern depth mismatch");
  if (space.dimension() != x.dimension())
    throw std::invalid_argument("reduce_to_alternating: space dimension mismatch");

  Psi1 p1 = build_psi1(n);
  const DeltaSigns delta = extract_delta(x, eps, p1.permutation, kTauSpec, tol);
  CellPermutation psi2 = build_psi2(delta);
  CellPermutation psi = compose(p1.permutation, psi2);

  const StepFunction<Scalar> f = synthesize(x, 2 * n);
  const StepFunction<Scalar> feps = synthesize(apply_signs(x, eps), 2 * n);
  const StepFunction<Scalar> ft = pushforward(f, psi);
  const StepFunction<Scalar> fet = pushforward(feps, psi);
  const HaarExpansion<Scalar> a = analyze(ft);
  const HaarExpansion<Scalar> b = analyze(fet);

  double max_residual = 0;
  HaarIndex worst(1, 1);
  for (std::int64_t c = 0; c < tree_size(2 * n); ++c) {
    const HaarIndex idx = flat_to_index(c);
    const Scalar sign = (idx.level() % 2 == 0) ? Scalar(1) : Scalar(-1);
    const double r =
        (b.coefficient(idx) - sign * a.coefficient(idx)).template lpNorm<Eigen::Infinity>();
    if (r > max_residual) {
      max_residual = r;
      worst = idx;
    }
  }

  const double nf = static_cast<double>(l2x_norm(f, space));
  const double nfe = static_cast<double>(l2x_norm(feps, space));
  const double norm_residual_f = std::abs(static_cast<double>(l2x_norm(ft, space)) - nf);
  const double norm_residual_feps = std::abs(static_cast<double>(l2x_norm(fet, space)) - nfe);

  if (max_residual > tol)
    throw std::runtime_error("reduce_to_alternating: identity residual " + std::to_string(max_residual) +
                             " at " + worst.to_string());
  if (norm_residual_f > kRoundtripTol * (1.0 + nf) || norm_residual_feps > kRoundtripTol * (1.0 + nfe))
    throw std::runtime_error("reduce_to_alternating: norm not preserved");

  return {std::move(psi), std::move(p1.permutation), std::move(psi2), std::move(p1.schedule),
          delta, a, b, max_residual, worst, norm_residual_f, norm_residual_feps};
}

template <typename Scalar>
SpreadResult<Scalar> reduce_to_alternating(const HaarExpansion<Scalar>& x, const SignPattern& eps,
                                           double tol = 1e-9) {
  return reduce_to_alternating(x, eps, NormedSpace<Scalar>::euclidean(x.dimension()), tol);
}

}  // namespace umd
