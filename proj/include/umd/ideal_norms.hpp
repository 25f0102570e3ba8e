#pragma once

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "umd/haar.hpp"
#include "umd/self_similarity.hpp"
#include "umd/sign_pattern.hpp"
#include "umd/spaces.hpp"
#include "umd/spectrum_spreading.hpp"
#include "umd/tolerances.hpp"

namespace umd {

struct OptimizerBudget {
  int restarts = 100;
  int iterations = 1000;
  double step = 0.1;          // initial step, halved on non-improvement
  double convergence = 1e-9;  // relative improvement below which a restart stops
  std::int64_t pattern_cutoff = 4096;  // max sign patterns enumerated exhaustively
  int greedy_restarts = 20;   // hill-climb starts above the cutoff
  std::uint64_t seed = kDefaultSeed;
};

namespace detail {
inline constexpr std::uint64_t kStreamTuple = 11;
inline constexpr std::uint64_t kStreamPattern = 13;
inline constexpr std::uint64_t kStreamProp1 = 17;
inline constexpr std::uint64_t kStreamProp2 = 19;
}  // namespace detail

/// Coefficient tuple of the sign-transformed image: index (k, j) carries
/// eps_k^(j) * T x_k^(j). The mean is dropped; the transform acts on tree
/// coefficients only.
template <typename Scalar>
HaarExpansion<Scalar> transformed_expansion(const Operator<Scalar>& T, const HaarExpansion<Scalar>& x,
                                            const SignPattern& eps) {
  if (x.dimension() != T.source().dimension())
    throw std::invalid_argument("expansion dimension does not match operator source");
  if (eps.depth() < x.depth()) throw std::invalid_argument("sign pattern depth below expansion depth");
  HaarExpansion<Scalar> y(x.depth(), T.target().dimension());
  y.coefficients() = T.matrix() * x.coefficients();
  for (Eigen::Index c = 0; c < y.num_indices(); ++c)
    if (eps.values()[static_cast<std::size_t>(c)] < 0) y.coefficients().col(c) *= Scalar(-1);
  return y;
}

/// The sign-transformed image as a step function at the expansion's depth.
template <typename Scalar>
StepFunction<Scalar> transformed_function(const Operator<Scalar>& T, const HaarExpansion<Scalar>& x,
                                          const SignPattern& eps) {
  return synthesize(transformed_expansion(T, x, eps), x.depth());
}

/// | sum eps T x chi |_{L2 Y} / | sum x chi |_{L2 X}, both sides synthesized
/// at resolution n. The mean coefficient does not participate.
template <typename Scalar>
Scalar transform_ratio(const Operator<Scalar>& T, const HaarExpansion<Scalar>& x, const SignPattern& eps) {
  if (x.depth() < 1) throw std::domain_error("transform_ratio: empty tuple");
  HaarExpansion<Scalar> x0 = x;
  x0.mean().setZero();
  const Scalar den = l2x_norm(synthesize(x0, x.depth()), T.source());
  if (!(den > Scalar(1e-150))) throw std::domain_error("transform_ratio: zero tuple");
  const Scalar num = l2x_norm(transformed_function(T, x0, eps), T.target());
  return num / den;
}

template <typename Scalar = double>
struct RatioResult {
  Scalar ratio;
  HaarExpansion<Scalar> witness;  // zero-mean tuple achieving the ratio
};

namespace detail {

/// Projected subgradient ascent on the ratio for one fixed sign pattern.
/// Deterministic: restart r draws its start from a seed derived from
/// (budget.seed, r) only, so the same pattern evaluated under different
/// families reproduces the same value bit for bit.
template <typename Scalar>
RatioResult<Scalar> ascend_ratio(const Operator<Scalar>& T, const SignPattern& eps, int n,
                                 const OptimizerBudget& budget) {
  using Matrix = typename StepFunction<Scalar>::Matrix;
  const NormedSpace<Scalar>& X = T.source();
  const NormedSpace<Scalar>& Y = T.target();
  const Eigen::Index mx = X.dimension();
  const Eigen::Index count = tree_size(n);

  HaarExpansion<Scalar> xbuf(n, mx);
  HaarExpansion<Scalar> ybuf(n, Y.dimension());

  struct Eval {
    Scalar num, den;
    StepFunction<Scalar> f, g;
  };
  const auto evaluate = [&](const Matrix& z) -> Eval {
    xbuf.coefficients() = z;
    ybuf.coefficients() = T.matrix() * z;
    for (Eigen::Index c = 0; c < count; ++c)
      if (eps.values()[static_cast<std::size_t>(c)] < 0) ybuf.coefficients().col(c) *= Scalar(-1);
    StepFunction<Scalar> f = synthesize(xbuf, n);
    StepFunction<Scalar> g = synthesize(ybuf, n);
    return {l2x_norm(g, Y), l2x_norm(f, X), std::move(f), std::move(g)};
  };

  // d(num/den) at den = 1: for each index, eps * T^t * <W, chi> - ratio * <V, chi>,
  // where W and V are the cellwise norm-weighted subgradient fields of the
  // numerator and denominator functions.
  const auto gradient = [&](const Eval& e) -> Matrix {
    StepFunction<Scalar> W(n, Y.dimension());
    for (Eigen::Index c = 0; c < e.g.num_cells(); ++c) {
      const Scalar nc = Y.norm(e.g.cell(c));
      if (nc > Scalar(0)) W.cell(c) = (nc / e.num) * Y.subgradient(e.g.cell(c));
    }
    StepFunction<Scalar> V(n, mx);
    for (Eigen::Index c = 0; c < e.f.num_cells(); ++c) {
      const Scalar nc = X.norm(e.f.cell(c));
      if (nc > Scalar(0)) V.cell(c) = (nc / e.den) * X.subgradient(e.f.cell(c));
    }
    Matrix gn = T.matrix().transpose() * analyze(W).coefficients();
    for (Eigen::Index c = 0; c < count; ++c)
      if (eps.values()[static_cast<std::size_t>(c)] < 0) gn.col(c) *= Scalar(-1);
    return gn - (e.num / e.den) * analyze(V).coefficients();
  };

  std::optional<RatioResult<Scalar>> best;
  for (int restart = 0; restart < budget.restarts; ++restart) {
    Rng rng(Rng::derive(budget.seed, detail::kStreamTuple, static_cast<std::uint64_t>(restart)));
    Matrix z(mx, count);
    for (Eigen::Index c = 0; c < count; ++c)
      for (Eigen::Index i = 0; i < mx; ++i) z(i, c) = static_cast<Scalar>(rng.normal());
    {
      Eval e0 = evaluate(z);
      if (!(e0.den > Scalar(1e-12))) {
        z.setZero();
        z(0, 0) = Scalar(1);
        e0 = evaluate(z);
      }
      z /= e0.den;
    }

    Eval cur = evaluate(z);
    Scalar local = cur.num / cur.den;
    Matrix zbest = z;
    double step = budget.step;
    for (int it = 0; it < budget.iterations; ++it) {
      const Matrix g = gradient(cur);
      Matrix zc = z + static_cast<Scalar>(step) * g;
      Eval ec = evaluate(zc);
      if (!(ec.den > Scalar(1e-12))) {
        step *= 0.5;
        if (step < 1e-14) break;
        continue;
      }
      zc /= ec.den;
      ec = evaluate(zc);
      const Scalar rc = ec.num / ec.den;
      if (rc > local) {
        const Scalar gain = rc - local;
        z = std::move(zc);
        cur = std::move(ec);
        local = rc;
        zbest = z;
        if (gain <= static_cast<Scalar>(budget.convergence) * std::max(local, Scalar(1e-30))) break;
      } else {
        step *= 0.5;
        if (step < 1e-14) break;
      }
    }

    if (!best || local > best->ratio) {
      HaarExpansion<Scalar> w(n, mx);
      w.coefficients() = zbest;
      best = RatioResult<Scalar>{local, std::move(w)};
    }
  }
  return std::move(*best);
}

}  // namespace detail

/// Best ratio over tuples for one fixed sign pattern. When source and
/// target are both Euclidean the signs are isometries of L2, so the
/// supremum is the largest singular value and is computed exactly (up to
/// power-iteration tolerance) with a single-index witness. Otherwise a
/// seeded multistart subgradient ascent returns a certified lower bound.
template <typename Scalar>
RatioResult<Scalar> max_ratio_over_tuples(const Operator<Scalar>& T, const SignPattern& eps, int n,
                                          const OptimizerBudget& budget = {}) {
  if (n < 1) throw std::invalid_argument("max_ratio_over_tuples: depth must be >= 1");
  if (eps.depth() != n) throw std::invalid_argument("max_ratio_over_tuples: sign pattern depth mismatch");
  if (budget.restarts < 1 || budget.iterations < 1)
    throw std::invalid_argument("max_ratio_over_tuples: budget must allow at least one restart and iteration");
  if (T.source().is_euclidean() && T.target().is_euclidean()) {
    const auto s = spectral_norm(T, budget.seed);
    HaarExpansion<Scalar> w(n, T.source().dimension());
    w.coefficient(HaarIndex(1, 1)) = s.witness;
    return {s.value, std::move(w)};
  }
  return detail::ascend_ratio(T, eps, n, budget);
}

/// An estimated ideal norm: the clamped value max(1, best ratio), the raw
/// ratio, and the witness that reproduces it.
template <typename Scalar = double>
struct NormEstimate {
  double value;  // max(1, raw)
  double raw;    // best ratio found
  int depth;
  SignFamily family;
  std::string method;  // "exact-euclidean" | "brute-force" | "heuristic"
  HaarExpansion<Scalar> witness;
  SignPattern witness_signs;
  OptimizerBudget budget;
};

namespace detail {

/// Shared pattern-search driver. The alternating pattern is always
/// evaluated; the level phase adds level patterns (exhaustive below the
/// cutoff, hill climbing above); the free phase adds free patterns the same
/// way, starting its climb from the best pattern seen. Later families rerun
/// the earlier phases identically, which makes the three estimates nested
/// by construction.
template <typename Scalar>
NormEstimate<Scalar> search_patterns(const Operator<Scalar>& T, int n, SignFamily family,
                                     const OptimizerBudget& budget) {
  std::map<std::vector<std::int8_t>, RatioResult<Scalar>> cache;
  const auto eval = [&](const SignPattern& p) -> const RatioResult<Scalar>& {
    auto it = cache.find(p.values());
    if (it == cache.end()) it = cache.emplace(p.values(), max_ratio_over_tuples(T, p, n, budget)).first;
    return it->second;
  };

  std::optional<SignPattern> best_pattern;
  Scalar best_ratio = Scalar(0);
  const auto merge = [&](const SignPattern& p) {
    const RatioResult<Scalar>& r = eval(p);
    if (!best_pattern || r.ratio > best_ratio ||
        (r.ratio == best_ratio && p.lex_less(*best_pattern))) {
      best_pattern = p;
      best_ratio = r.ratio;
    }
  };

  const auto climb = [&](SignPattern start, std::int64_t moves, auto&& neighbor) {
    merge(start);
    SignPattern current = std::move(start);
    Scalar rc = eval(current).ratio;
    bool improved = true;
    for (int sweep = 0; improved && sweep < 64; ++sweep) {
      improved = false;
      for (std::int64_t pos = 0; pos < moves; ++pos) {
        SignPattern cand = neighbor(current, pos);
        merge(cand);
        const Scalar r = eval(cand).ratio;
        if (r > rc) {
          current = std::move(cand);
          rc = r;
          improved = true;
        }
      }
    }
  };

  merge(SignPattern::alternating(n));
  bool exhaustive = true;

  if (family == SignFamily::level || family == SignFamily::free) {
    if (n < 62 && (std::int64_t(1) << n) <= budget.pattern_cutoff) {
      for (std::uint64_t rank = 0; rank < (std::uint64_t(1) << n); ++rank)
        merge(SignPattern::level_pattern(n, rank));
    } else {
      exhaustive = false;
      climb(SignPattern::alternating(n), n,
            [](const SignPattern& p, std::int64_t k) { return p.level_flipped(static_cast<int>(k) + 1); });
      for (int g = 1; g < budget.greedy_restarts; ++g) {
        Rng rng(Rng::derive(budget.seed, detail::kStreamPattern, static_cast<std::uint64_t>(g)));
        std::vector<int> levels(static_cast<std::size_t>(n));
        for (auto& s : levels) s = rng.sign();
        climb(SignPattern::from_level_signs(n, levels), n,
              [](const SignPattern& p, std::int64_t k) { return p.level_flipped(static_cast<int>(k) + 1); });
      }
    }
  }

  if (family == SignFamily::free) {
    const std::int64_t nodes = tree_size(n);
    if (nodes < 62 && (std::int64_t(1) << nodes) <= budget.pattern_cutoff) {
      for (std::uint64_t rank = 0; rank < (std::uint64_t(1) << nodes); ++rank)
        merge(SignPattern::free_pattern(n, rank));
    } else {
      exhaustive = false;
      const auto flip = [](const SignPattern& p, std::int64_t c) { return p.flipped(c); };
      climb(SignPattern(SignFamily::free, n, best_pattern->values()), nodes, flip);
      for (int g = 1; g < budget.greedy_restarts; ++g) {
        Rng rng(Rng::derive(budget.seed, detail::kStreamPattern, 1000 + static_cast<std::uint64_t>(g)));
        climb(SignPattern::random_free(n, rng), nodes, flip);
      }
    }
  }

  const RatioResult<Scalar>& bestr = eval(*best_pattern);
  return {std::max(1.0, static_cast<double>(bestr.ratio)),
          static_cast<double>(bestr.ratio),
          n,
          family,
          exhaustive ? "brute-force" : "heuristic",
          bestr.witness,
          *best_pattern,
          budget};
}

}  // namespace detail

/// Estimates the ideal norm for the given sign family: alternating is the
/// single pattern (-1)^k, level maximizes over per-level patterns, free over
/// per-node patterns. The three candidate pools are nested and share the
/// tuple-optimizer seeds, so the estimates are monotone in the family by
/// construction. Values are clamped below at 1.
template <typename Scalar>
NormEstimate<Scalar> estimate_norm(const Operator<Scalar>& T, int n, SignFamily family,
                                   const OptimizerBudget& budget = {}) {
  if (n < 1) throw std::invalid_argument("estimate_norm: depth must be >= 1");
  if (T.source().is_euclidean() && T.target().is_euclidean()) {
    const auto s = spectral_norm(T, budget.seed);
    HaarExpansion<Scalar> w(n, T.source().dimension());
    w.coefficient(HaarIndex(1, 1)) = s.witness;
    return {std::max(1.0, static_cast<double>(s.value)),
            static_cast<double>(s.value),
            n,
            family,
            "exact-euclidean",
            std::move(w),
            SignPattern::alternating(n),
            budget};
  }
  return detail::search_patterns(T, n, family, budget);
}

/// Folds an externally produced candidate (tuple, signs) into an estimate if
/// it beats the current best. Returns true when the estimate improved.
template <typename Scalar>
bool fold_candidate(NormEstimate<Scalar>& est, const Operator<Scalar>& T, const HaarExpansion<Scalar>& z,
                    const SignPattern& signs) {
  if (z.coefficients().template lpNorm<Eigen::Infinity>() <= kTauSpec) return false;
  const double r = static_cast<double>(transform_ratio(T, z, signs));
  if (r <= est.raw) return false;
  est.raw = r;
  est.value = std::max(1.0, r);
  est.witness = z;
  est.witness.mean().setZero();
  est.witness_signs = signs;
  return true;
}

template <typename Scalar = double>
struct ChainReport {
  NormEstimate<Scalar> alternating;  // the double-restricted norm
  NormEstimate<Scalar> level;        // the level-restricted norm
  NormEstimate<Scalar> free;         // the unrestricted norm
  bool chain_ok;         // alternating.raw <= level.raw <= free.raw, exact
  bool heuristic;        // true unless the exact Euclidean path applied
  double theorem_lhs;    // free.value
  double theorem_rhs;    // 3 * alternating.value
  double theorem_tol;
  double theorem_slack;  // rhs + tol - lhs
  bool theorem_ok;
};

/// Estimates all three norms and checks the chain and the factor-3 reverse
/// estimate.
template <typename Scalar>
ChainReport<Scalar> verify_chain(const Operator<Scalar>& T, int n, const OptimizerBudget& budget = {}) {
  ChainReport<Scalar> rep{estimate_norm(T, n, SignFamily::alternating, budget),
                          estimate_norm(T, n, SignFamily::level, budget),
                          estimate_norm(T, n, SignFamily::free, budget),
                          false,
                          false,
                          0,
                          0,
                          0,
                          0,
                          false};
  rep.chain_ok = rep.alternating.raw <= rep.level.raw && rep.level.raw <= rep.free.raw;
  rep.heuristic = rep.free.method != "exact-euclidean";
  rep.theorem_tol = rep.heuristic ? kTolHeuristic : kTolExact;
  rep.theorem_lhs = rep.free.value;
  rep.theorem_rhs = 3.0 * rep.alternating.value;
  rep.theorem_slack = rep.theorem_rhs + rep.theorem_tol - rep.theorem_lhs;
  rep.theorem_ok = rep.theorem_slack >= 0;
  return rep;
}

struct Prop1Trial {
  double identity_residual;   // alternating identity over the depth-2n tree
  double norm_residual_f;     // source-norm preservation under psi
  double norm_residual_timg;  // target-norm preservation of the transformed image
  double lhs;                 // |T f^eps|
  double bound;               // mu2n * |f| + margin
  bool ok;
};

template <typename Scalar = double>
struct Prop1Report {
  NormEstimate<Scalar> mu_n;      // free family at depth n
  NormEstimate<Scalar> mu_2n;     // alternating family at depth 2n, with transported witnesses folded in
  std::vector<Prop1Trial> trials;
  int violations;
  double max_identity_residual;
  double max_norm_residual;
  bool aggregate_ok;       // mu_n.value <= mu_2n.value + margin
  double aggregate_slack;
};

/// Constructive check of the depth-doubling estimate: every depth-n pair
/// (x, eps) is reduced to alternating signs at depth 2n, the transported
/// tuple is offered to the depth-2n estimate as a candidate, and the
/// per-trial inequality |T f^eps| <= mu2n |f| is confirmed.
template <typename Scalar>
Prop1Report<Scalar> verify_prop1(const Operator<Scalar>& T, int n, int trials,
                                 const OptimizerBudget& budget = {}) {
  if (trials < 1) throw std::invalid_argument("verify_prop1: need at least one trial");
  const NormedSpace<Scalar>& X = T.source();
  const NormedSpace<Scalar>& Y = T.target();
  constexpr double kMargin = 1e-8;

  Prop1Report<Scalar> rep{estimate_norm(T, n, SignFamily::free, budget),
                          estimate_norm(T, 2 * n, SignFamily::alternating, budget),
                          {},
                          0,
                          0.0,
                          0.0,
                          false,
                          0.0};

  const SignPattern alt2n = SignPattern::alternating(2 * n);
  if (rep.mu_n.witness.coefficients().template lpNorm<Eigen::Infinity>() > kTauSpec) {
    const SpreadResult<Scalar> sr = reduce_to_alternating(rep.mu_n.witness, rep.mu_n.witness_signs, X);
    fold_candidate(rep.mu_2n, T, sr.transported, alt2n);
  }

  for (int t = 0; t < trials; ++t) {
    Rng rng(Rng::derive(budget.seed, detail::kStreamProp1, static_cast<std::uint64_t>(t)));
    HaarExpansion<Scalar> x = random_expansion<Scalar>(rng, n, X.dimension());
    x.mean().setZero();
    const SignPattern eps = SignPattern::random_free(n, rng);

    const SpreadResult<Scalar> sr = reduce_to_alternating(x, eps, X);
    const StepFunction<Scalar> timg = apply(T, synthesize(apply_signs(x, eps), 2 * n));
    const double lhs = static_cast<double>(l2x_norm(timg, Y));
    const double timg_res =
        std::abs(static_cast<double>(l2x_norm(pushforward(timg, sr.psi), Y)) - lhs);

    fold_candidate(rep.mu_2n, T, sr.transported, alt2n);
    const double nf = static_cast<double>(l2x_norm(synthesize(x, 2 * n), X));
    const double bound = rep.mu_2n.value * nf + kMargin;

    Prop1Trial trial{sr.max_residual, sr.norm_residual_f, timg_res, lhs, bound, lhs <= bound};
    rep.max_identity_residual = std::max(rep.max_identity_residual, trial.identity_residual);
    rep.max_norm_residual =
        std::max({rep.max_norm_residual, trial.norm_residual_f, trial.norm_residual_timg});
    if (!trial.ok) ++rep.violations;
    rep.trials.push_back(trial);
  }

  rep.aggregate_slack = rep.mu_2n.value + kMargin - rep.mu_n.value;
  rep.aggregate_ok = rep.aggregate_slack >= 0;
  return rep;
}

struct Prop2Trial {
  double lower_bound_slack;     // mu_n |f_low| + margin - L
  double contraction_slack;     // |f_full| + tol - |f_low|
  double blockwise_residual;    // partition identity on the transformed upper part
  double restriction_residual;  // subtree pullback vs restricted norm
  double factor2_slack;         // 2 |f_full| + tol - |f_upper|
  bool ok;
};

template <typename Scalar = double>
struct Prop2Report {
  NormEstimate<Scalar> mu_n;   // alternating at depth n, with decomposition witnesses folded in
  NormEstimate<Scalar> mu_2n;  // alternating at depth 2n
  bool heuristic;
  double theorem_lhs;    // mu_2n.value
  double theorem_rhs;    // 3 * mu_n.value
  double theorem_tol;
  double theorem_slack;
  bool theorem_ok;
  std::vector<Prop2Trial> trials;
  int violations;
  double max_blockwise_residual;
  double max_restriction_residual;
};

/// Checks the depth-halving regularity of the alternating norm plus the
/// three decomposition ingredients behind it: the lower-part estimate, the
/// blockwise norm identity with the subtree pullbacks, and the factor-2
/// bound on the upper part. The subtree pullbacks of the depth-2n witness
/// are offered to the depth-n estimate as candidates.
template <typename Scalar>
Prop2Report<Scalar> verify_prop2(const Operator<Scalar>& T, int n, const OptimizerBudget& budget = {},
                                 int trials = 50) {
  if (trials < 1) throw std::invalid_argument("verify_prop2: need at least one trial");
  const NormedSpace<Scalar>& X = T.source();
  const NormedSpace<Scalar>& Y = T.target();
  constexpr double kMargin = 1e-8;
  const SignPattern altn = SignPattern::alternating(n);
  const SignPattern alt2n = SignPattern::alternating(2 * n);

  Prop2Report<Scalar> rep{estimate_norm(T, n, SignFamily::alternating, budget),
                          estimate_norm(T, 2 * n, SignFamily::alternating, budget),
                          false,
                          0,
                          0,
                          0,
                          0,
                          false,
                          {},
                          0,
                          0.0,
                          0.0};
  rep.heuristic = rep.mu_2n.method != "exact-euclidean";

  {
    auto parts = split_lower_upper(rep.mu_2n.witness, n);
    fold_candidate(rep.mu_n, T, parts.first, altn);
    for (std::int64_t i = 1; i <= (std::int64_t(1) << n); ++i)
      fold_candidate(rep.mu_n, T, subtree_component(parts.second, i, n), altn);
  }

  for (int t = 0; t < trials; ++t) {
    Rng rng(Rng::derive(budget.seed, detail::kStreamProp2, static_cast<std::uint64_t>(t)));
    HaarExpansion<Scalar> x = random_expansion<Scalar>(rng, 2 * n, X.dimension());
    x.mean().setZero();
    auto parts = split_lower_upper(x, n);

    const double nf_full = static_cast<double>(l2x_norm(synthesize(x, 2 * n), X));
    const double nf_low = static_cast<double>(l2x_norm(synthesize(parts.first, n), X));
    const double L = static_cast<double>(l2x_norm(transformed_function(T, parts.first, altn), Y));
    fold_candidate(rep.mu_n, T, parts.first, altn);

    Prop2Trial trial{};
    trial.lower_bound_slack = rep.mu_n.value * nf_low + kMargin - L;
    trial.contraction_slack = nf_full + 1e-10 - nf_low;
    trial.blockwise_residual =
        blockwise_norms(transformed_function(T, parts.second, alt2n), n, Y).residual;
    trial.restriction_residual = check_restriction_identity(parts.second, n, X).max_residual;
    trial.factor2_slack = check_upper_bound_factor2(x, n, X).slack + 1e-10;
    trial.ok = trial.lower_bound_slack >= 0 && trial.contraction_slack >= 0 &&
               trial.blockwise_residual <= 1e-10 && trial.restriction_residual <= 1e-10 &&
               trial.factor2_slack >= 0;
    if (!trial.ok) ++rep.violations;
    rep.max_blockwise_residual = std::max(rep.max_blockwise_residual, trial.blockwise_residual);
    rep.max_restriction_residual = std::max(rep.max_restriction_residual, trial.restriction_residual);
    rep.trials.push_back(trial);
  }

  rep.theorem_tol = rep.heuristic ? kTolHeuristic : kTolExact;
  rep.theorem_lhs = rep.mu_2n.value;
  rep.theorem_rhs = 3.0 * rep.mu_n.value;
  rep.theorem_slack = rep.theorem_rhs + rep.theorem_tol - rep.theorem_lhs;
  rep.theorem_ok = rep.theorem_slack >= 0;
  return rep;
}

}  // namespace umd
