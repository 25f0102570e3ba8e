#include <cmath>
#include <set>
#include <vector>

#include "doctest.h"
#include "umd/rng.hpp"
#include "umd/self_similarity.hpp"

using namespace umd;

TEST_CASE("subtree membership follows the position windows") {
  // depth 1: levels 2..2 split between the two halves
  CHECK(in_subtree(HaarIndex(2, 1), 1, 1));
  CHECK_FALSE(in_subtree(HaarIndex(2, 1), 2, 1));
  CHECK(in_subtree(HaarIndex(2, 2), 2, 1));

  // depth 2: S_1 = {(3,1), (4,1), (4,2)}
  const auto s1 = subtree_indices(1, 2);
  REQUIRE(s1.size() == 3);
  CHECK(s1[0] == HaarIndex(3, 1));
  CHECK(s1[1] == HaarIndex(4, 1));
  CHECK(s1[2] == HaarIndex(4, 2));
  CHECK(subtree_indices(3, 2) ==
        std::vector<HaarIndex>{HaarIndex(3, 3), HaarIndex(4, 5), HaarIndex(4, 6)});

  // shallow levels belong to no subtree
  CHECK_FALSE(in_subtree(HaarIndex(1, 1), 1, 2));
  CHECK_FALSE(in_subtree(HaarIndex(2, 2), 2, 2));

  CHECK_THROWS_AS(subtree_indices(0, 2), std::invalid_argument);
  CHECK_THROWS_AS(subtree_indices(5, 2), std::invalid_argument);
}

TEST_CASE("subtrees partition the deep half of the tree") {
  for (int n = 1; n <= 5; ++n) {
    std::set<std::pair<int, std::int64_t>> seen;
    for (std::int64_t i = 1; i <= (std::int64_t(1) << n); ++i)
      for (const auto& idx : subtree_indices(i, n)) {
        CHECK(in_subtree(idx, i, n));
        CHECK(seen.emplace(idx.level(), idx.position()).second);  // disjoint
      }
    CHECK(seen.size() == static_cast<std::size_t>(TreeRange(n + 1, 2 * n).size()));
  }
}

TEST_CASE("reindexing maps each subtree onto the depth-n tree") {
  CHECK(reindex(HaarIndex(3, 1), 1, 2) == HaarIndex(1, 1));
  CHECK(reindex(HaarIndex(4, 2), 1, 2) == HaarIndex(2, 2));
  CHECK(reindex(HaarIndex(3, 2), 2, 2) == HaarIndex(1, 1));
  CHECK(reindex(HaarIndex(4, 4), 2, 2) == HaarIndex(2, 2));
  CHECK_THROWS_AS(reindex(HaarIndex(3, 2), 1, 2), std::invalid_argument);
  CHECK_THROWS_AS(reindex(HaarIndex(2, 1), 1, 2), std::invalid_argument);

  for (int n = 1; n <= 4; ++n)
    for (std::int64_t i = 1; i <= (std::int64_t(1) << n); ++i) {
      // bijection: reindex then invert is the identity on S_i
      for (const auto& idx : subtree_indices(i, n)) {
        const auto r = reindex(idx, i, n);
        CHECK(r.level() >= 1);
        CHECK(r.level() <= n);
        CHECK(reindex_inverse(r, i, n) == idx);
      }
      // and the images cover the whole depth-n tree
      std::set<std::pair<int, std::int64_t>> images;
      for (const auto& idx : subtree_indices(i, n))
        images.emplace(reindex(idx, i, n).level(), reindex(idx, i, n).position());
      CHECK(images.size() == static_cast<std::size_t>(tree_size(n)));
    }
}

TEST_CASE("deep haar functions rescale onto the blocks") {
  for (int n = 1; n <= 3; ++n)
    for (std::int64_t i = 1; i <= (std::int64_t(1) << n); ++i)
      for (const auto& idx : TreeRange(n + 1, 2 * n).enumerate()) {
        const auto rep = check_rescaling(idx, i, n);
        CHECK(rep.max_residual < 1e-12);
        CHECK(rep.samples > 0);
      }
  // outside the valid band the identity is not defined
  CHECK_THROWS_AS(check_rescaling(HaarIndex(1, 1), 1, 2), std::invalid_argument);
  CHECK_THROWS_AS(check_rescaling(HaarIndex(2, 1), 1, 2), std::invalid_argument);
  CHECK_THROWS_AS(check_rescaling(HaarIndex(5, 1), 1, 2), std::invalid_argument);
}

TEST_CASE("splitting separates shallow and deep coefficients exactly") {
  Rng rng(79);
  const int n = 2;
  const auto x = random_expansion(rng, 2 * n, 2);
  const auto [lower, upper] = split_lower_upper(x, n);
  CHECK(lower.depth() == n);
  CHECK(upper.depth() == 2 * n);
  CHECK((lower.mean() - x.mean()).norm() == 0.0);
  CHECK(upper.mean().norm() == 0.0);
  for (const auto& idx : TreeRange(1, n).enumerate()) {
    CHECK((lower.coefficient(idx) - x.coefficient(idx)).norm() == 0.0);
    CHECK(upper.coefficient(idx).norm() == 0.0);
  }
  for (const auto& idx : TreeRange(n + 1, 2 * n).enumerate())
    CHECK((upper.coefficient(idx) - x.coefficient(idx)).norm() == 0.0);

  // the parts add back to the whole, and L2 masses are additive
  CHECK(max_abs_diff(lower.padded(2 * n) + upper, x) == 0.0);
  const double full = synthesize(x, 2 * n).cells().squaredNorm();
  const double lo = synthesize(lower, n).cells().squaredNorm() * (std::int64_t(1) << n);
  const double up = synthesize(upper, 2 * n).cells().squaredNorm();
  CHECK(std::abs(full - lo - up) < 1e-10 * std::max(1.0, full));

  CHECK_THROWS_AS(split_lower_upper(x, 1), std::invalid_argument);
  CHECK_THROWS_AS(split_lower_upper(x, 4), std::invalid_argument);
}

TEST_CASE("subtree components copy coefficients through the reindexing") {
  Rng rng(83);
  const int n = 2;
  auto x = random_expansion(rng, 2 * n, 3);
  const auto upper = split_lower_upper(x, n).second;
  for (std::int64_t i = 1; i <= (std::int64_t(1) << n); ++i) {
    const auto z = subtree_component(upper, i, n);
    CHECK(z.depth() == n);
    CHECK(z.mean().norm() == 0.0);
    for (const auto& idx : subtree_indices(i, n))
      CHECK((z.coefficient(reindex(idx, i, n)) - upper.coefficient(idx)).norm() == 0.0);
  }
}

TEST_CASE("blockwise norms recombine to the global norm") {
  Rng rng(89);
  for (double p : {1.0, 2.0, std::numeric_limits<double>::infinity()}) {
    const auto space = NormedSpace<double>::lp(p, 2);
    const auto f = random_step_function(rng, 5, 2);
    const int n = 2;
    const auto rep = blockwise_norms(f, n, space);
    REQUIRE(rep.block_norms.size() == 4);
    CHECK(rep.residual < 1e-10);

    // independent recomputation of one block norm
    double acc = 0;
    for (Eigen::Index c = 8; c < 16; ++c) acc += std::pow(space.norm(f.cell(c)), 2);
    const double block2 = std::sqrt(acc / static_cast<double>(f.num_cells()));
    CHECK(std::abs(rep.block_norms[1] - block2) < 1e-12);
    CHECK(std::abs(restricted_l2x_norm(f, 2, n, space) - block2) < 1e-12);

    // blocks recombine: sum of squares equals the squared global norm
    double total = 0;
    for (double b : rep.block_norms) total += b * b;
    CHECK(std::abs(std::sqrt(total) - l2x_norm(f, space)) < 1e-12);
  }
}

TEST_CASE("subtree pullbacks carry exactly the block-restricted norms") {
  Rng rng(97);
  for (double p : {1.0, 2.0, std::numeric_limits<double>::infinity()}) {
    const auto space = NormedSpace<double>::lp(p, 2);
    for (int n = 1; n <= 3; ++n)
      for (int trial = 0; trial < 5; ++trial) {
        auto x = random_expansion(rng, 2 * n, 2);
        const auto upper = split_lower_upper(x, n).second;
        const auto rep = check_restriction_identity(upper, n, space);
        CHECK(rep.max_residual < 1e-10);
      }
  }
}

TEST_CASE("the deep part is at most twice the whole") {
  Rng rng(101);
  const auto linf = NormedSpace<double>::lp(std::numeric_limits<double>::infinity(), 2);
  const auto l1 = NormedSpace<double>::lp(1.0, 2);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + static_cast<int>(rng.below(2));
    const auto x = random_expansion(rng, 2 * n, 2);
    CHECK(check_upper_bound_factor2(x, n, linf).slack >= -1e-12);
    CHECK(check_upper_bound_factor2(x, n, l1).slack >= -1e-12);
  }
}

TEST_CASE("coordinate descent cannot push the deep part past the bound") {
  // adversarial search: greedily minimize 2|f| - |f_upper| over coefficients
  Rng rng(103);
  const auto space = NormedSpace<double>::lp(1.0, 2);
  const int n = 2;
  double worst = std::numeric_limits<double>::infinity();
  for (int restart = 0; restart < 50; ++restart) {
    auto x = random_expansion(rng, 2 * n, 2);
    double slack = check_upper_bound_factor2(x, n, space).slack;
    for (int pass = 0; pass < 3; ++pass)
      for (std::int64_t c = 0; c < tree_size(2 * n); ++c)
        for (Eigen::Index d = 0; d < 2; ++d)
          for (double h : {0.3, -0.3, 0.05, -0.05}) {
            auto y = x;
            y.coefficients()(d, c) += h;
            const double s = check_upper_bound_factor2(y, n, space).slack /
                             std::max(1e-9, l2x_norm(synthesize(y, 2 * n), space));
            const double cur = slack / std::max(1e-9, l2x_norm(synthesize(x, 2 * n), space));
            if (s < cur) {
              x = y;
              slack = check_upper_bound_factor2(x, n, space).slack;
            }
          }
    worst = std::min(worst, slack / std::max(1e-9, l2x_norm(synthesize(x, 2 * n), space)));
  }
  CHECK(worst >= -1e-12);
}
