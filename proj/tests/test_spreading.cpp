#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "umd/rng.hpp"
#include "umd/spectrum_spreading.hpp"

using namespace umd;

TEST_CASE("the spreading schedule climbs each level to its double") {
  const auto p1 = build_psi1(1);
  CHECK(p1.schedule.swaps.empty());
  CHECK(p1.permutation.is_identity());
  CHECK(p1.permutation.resolution() == 2);

  const auto p2 = build_psi1(2);
  REQUIRE(p2.schedule.swaps.size() == 2);
  CHECK(p2.schedule.swaps[0].level == 2);
  CHECK(p2.schedule.swaps[0].position == 1);
  CHECK(p2.schedule.swaps[1].level == 2);
  CHECK(p2.schedule.swaps[1].position == 2);
  CHECK(p2.schedule.source_depth == 2);
  CHECK(p2.schedule.target_depth == 3);

  // depth 3: the level-3 ladder [h=3 then h=4], then the level-2 ladder
  const auto p3 = build_psi1(3);
  REQUIRE(p3.schedule.swaps.size() == 4 + 8 + 2);
  CHECK(p3.schedule.swaps[0].level == 3);
  CHECK(p3.schedule.swaps[3].level == 3);
  CHECK(p3.schedule.swaps[4].level == 4);
  CHECK(p3.schedule.swaps[11].level == 4);
  CHECK(p3.schedule.swaps[12].level == 2);
  CHECK(p3.schedule.swaps[13].level == 2);

  CHECK_THROWS_AS(build_psi1(0), std::invalid_argument);
}

TEST_CASE("psi1 moves level k onto level 2k-1 and nothing onto even levels") {
  Rng rng(53);
  for (int n = 1; n <= 5; ++n) {
    const auto p = build_psi1(n);
    const auto x = random_expansion(rng, n, 2);
    const auto y = analyze(pushforward(synthesize(x, 2 * n), p.permutation), 2 * n);

    for (const auto& idx : TreeRange(1, 2 * n).enumerate())
      if (idx.level() % 2 == 0)
        CHECK(y.coefficient(idx).template lpNorm<Eigen::Infinity>() < 1e-9);

    // squared mass per source level lands on the odd target level
    for (int k = 1; k <= n; ++k) {
      double src = 0, dst = 0;
      for (std::int64_t j = 1; j <= HaarIndex::positions_at_level(k); ++j)
        src += x.coefficient(HaarIndex(k, j)).squaredNorm();
      for (std::int64_t j = 1; j <= HaarIndex::positions_at_level(2 * k - 1); ++j)
        dst += y.coefficient(HaarIndex(2 * k - 1, j)).squaredNorm();
      CHECK(std::abs(src - dst) < 1e-10 * std::max(1.0, src));
    }
  }
}

TEST_CASE("a single coefficient spreads into equal magnitudes") {
  for (int n = 2; n <= 4; ++n)
    for (int k = 1; k <= n; ++k) {
      const std::int64_t j = HaarIndex::positions_at_level(k);  // rightmost node
      HaarExpansion<double> x(n, 1);
      x.coefficient(HaarIndex(k, j))(0) = 1.0;
      const auto p = build_psi1(n);
      const auto y = analyze(pushforward(synthesize(x, 2 * n), p.permutation), 2 * n);

      const double expected = std::pow(2.0, -0.5 * (k - 1));
      std::int64_t hits = 0;
      for (const auto& idx : TreeRange(1, 2 * n).enumerate()) {
        const double v = std::abs(y.coefficient(idx)(0));
        if (v < 1e-12) continue;
        CHECK(idx.level() == 2 * k - 1);
        CHECK(std::abs(v - expected) < 1e-12);
        ++hits;
      }
      CHECK(hits == (std::int64_t(1) << (k - 1)));
    }
}

TEST_CASE("delta signs read off the per-index ratios") {
  Rng rng(59);
  const int n = 2;
  const auto p = build_psi1(n);

  const auto x = random_expansion(rng, n, 2);
  std::vector<std::int8_t> plus(static_cast<std::size_t>(tree_size(n)), 1);
  const auto dplus = extract_delta(x, SignPattern(SignFamily::free, n, plus), p.permutation);
  std::vector<std::int8_t> minus(static_cast<std::size_t>(tree_size(n)), -1);
  const auto dminus = extract_delta(x, SignPattern(SignFamily::free, n, minus), p.permutation);
  for (std::int64_t c = 0; c < tree_size(2 * n - 1); ++c) {
    const HaarIndex idx = flat_to_index(c);
    if (idx.level() % 2 == 0) continue;
    CHECK(dplus.is_realized(idx));  // generic input realizes every odd index
    CHECK(dplus.sign(idx) == 1);
    CHECK(dminus.sign(idx) == -1);
  }

  // depth 1: delta is the sign itself
  const auto x1 = random_expansion(rng, 1, 1);
  for (int s : {1, -1}) {
    const auto d = extract_delta(
        x1, SignPattern(SignFamily::free, 1, {static_cast<std::int8_t>(s)}), build_psi1(1).permutation);
    CHECK(d.sign(HaarIndex(1, 1)) == s);
  }
}

TEST_CASE("mixed signs land on the support windows of their sources") {
  Rng rng(61);
  const int n = 2;
  const auto x = random_expansion(rng, n, 2);
  const SignPattern eps(SignFamily::free, n, {1, 1, -1});  // (1,1):+ (2,1):+ (2,2):-
  const auto d = extract_delta(x, eps, build_psi1(n).permutation);
  CHECK(d.sign(HaarIndex(1, 1)) == 1);
  CHECK(d.sign(HaarIndex(3, 1)) == 1);
  CHECK(d.sign(HaarIndex(3, 2)) == 1);
  CHECK(d.sign(HaarIndex(3, 3)) == -1);
  CHECK(d.sign(HaarIndex(3, 4)) == -1);

  // the matching psi2 applies the deep swaps before the shallow one
  const auto psi2 = build_psi2(d);
  auto expected = CellPermutation::identity(2 * n);
  expected = compose(expected, swap(3, 1));
  expected = compose(expected, swap(3, 2));
  expected = compose(expected, swap(1, 1));
  CHECK(psi2 == expected.refined(psi2.resolution()));
}

TEST_CASE("reduction certificates hold for random inputs") {
  Rng rng(67);
  const auto spaces = {NormedSpace<double>::lp(1.0, 2), NormedSpace<double>::euclidean(2),
                       NormedSpace<double>::lp(std::numeric_limits<double>::infinity(), 2)};
  for (const auto& space : spaces)
    for (int n = 1; n <= 3; ++n)
      for (int trial = 0; trial < 10; ++trial) {
        const auto x = random_expansion(rng, n, 2);
        const auto eps = SignPattern::random_free(n, rng);
        const auto sr = reduce_to_alternating(x, eps, space);
        CHECK(sr.max_residual < 1e-9);
        CHECK(sr.norm_residual_f < 1e-11);
        CHECK(sr.norm_residual_feps < 1e-11);
        CHECK(sr.psi == compose(sr.psi1, sr.psi2));
        CHECK(sr.transported.depth() == 2 * n);

        // the transported tuples satisfy the alternating identity index by index
        for (const auto& idx : TreeRange(1, 2 * n).enumerate()) {
          const double sign = idx.level() % 2 == 0 ? 1.0 : -1.0;
          CHECK((sr.transported_signed.coefficient(idx) - sign * sr.transported.coefficient(idx))
                    .template lpNorm<Eigen::Infinity>() < 1e-9);
        }
      }
}

TEST_CASE("an all-minus pattern needs no second permutation") {
  Rng rng(71);
  const auto x = random_expansion(rng, 2, 2);
  std::vector<std::int8_t> minus(static_cast<std::size_t>(tree_size(2)), -1);
  const auto sr = reduce_to_alternating(x, SignPattern(SignFamily::free, 2, minus));
  CHECK(sr.psi2.is_identity());
  CHECK(sr.max_residual < 1e-9);
}

TEST_CASE("reduction validates its arguments") {
  Rng rng(73);
  const auto x = random_expansion(rng, 2, 2);
  CHECK_THROWS_AS(reduce_to_alternating(x, SignPattern::alternating(3)), std::invalid_argument);
  CHECK_THROWS_AS(reduce_to_alternating(x, SignPattern::alternating(2),
                                        NormedSpace<double>::euclidean(3)),
                  std::invalid_argument);
  HaarExpansion<double> empty(0, 2);
  CHECK_THROWS_AS(reduce_to_alternating(empty, SignPattern::alternating(1)), std::invalid_argument);
}
