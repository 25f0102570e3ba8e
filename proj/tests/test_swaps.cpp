#include <cmath>
#include <map>
#include <set>

#include "doctest.h"
#include "umd/cell_permutation.hpp"
#include "umd/rng.hpp"
#include "umd/spaces.hpp"

using namespace umd;

TEST_CASE("cell permutations validate and act on points") {
  const auto id = CellPermutation::identity(2);
  CHECK(id.is_identity());
  CHECK(id.num_cells() == 4);

  CHECK_THROWS_AS(CellPermutation(2, {0, 1, 2}), std::invalid_argument);
  CHECK_THROWS_AS(CellPermutation(2, {0, 1, 2, 2}), std::invalid_argument);
  CHECK_THROWS_AS(CellPermutation(2, {0, 1, 2, 4}), std::invalid_argument);

  const CellPermutation sigma(1, {1, 0});
  CHECK(sigma.apply_point(DyadicRational(1, 2)) == DyadicRational(3, 2));   // 1/4 -> 3/4
  CHECK(sigma.apply_point(DyadicRational(3, 2)) == DyadicRational(1, 2));
  CHECK(sigma.inverse() == sigma);
  CHECK(compose(sigma, sigma.inverse()).is_identity());
}

TEST_CASE("interval swaps transpose the two middle quarters of the pair") {
  const auto s11 = swap(1, 1);
  CHECK(s11.resolution() == 2);
  CHECK(s11(0) == 0);
  CHECK(s11(1) == 2);
  CHECK(s11(2) == 1);
  CHECK(s11(3) == 3);

  const auto s21 = swap(2, 1);
  CHECK(s21.resolution() == 3);
  CHECK(s21(1) == 2);
  CHECK(s21(2) == 1);
  for (std::int64_t c : {0, 3, 4, 5, 6, 7}) CHECK(s21(c) == c);

  const auto s22 = swap(2, 2);
  CHECK(s22(5) == 6);
  CHECK(s22(6) == 5);

  CHECK_THROWS_AS(swap(1, 2), std::invalid_argument);
  CHECK(swap(IntervalSwap{3, 2}) == swap(3, 2));
  CHECK(IntervalSwap{3, 2}.to_string() == "phi(3,2)");

  // measure-preserving involution
  for (int h = 1; h <= 4; ++h)
    for (std::int64_t i = 1; i <= HaarIndex::positions_at_level(h); ++i)
      CHECK(compose(swap(h, i), swap(h, i)).is_identity());
}

TEST_CASE("refinement preserves the point map") {
  const auto s = swap(1, 1);
  const auto r = s.refined(4);
  CHECK(r.resolution() == 4);
  Rng rng(31);
  for (int trial = 0; trial < 100; ++trial) {
    const DyadicRational t(static_cast<std::int64_t>(rng.below(16)) * 2 + 1, 5);
    CHECK(s.apply_point(t) == r.apply_point(t));
  }
}

TEST_CASE("pushforward composes functions with the point map") {
  StepFunction<double> f(2, 1);
  f.cells() << 1, 2, 3, 4;
  const auto g = pushforward(f, swap(1, 1));
  CHECK(g.cells()(0, 0) == 1);
  CHECK(g.cells()(0, 1) == 3);
  CHECK(g.cells()(0, 2) == 2);
  CHECK(g.cells()(0, 3) == 4);

  // f o sigma at t equals f at sigma(t)
  Rng rng(37);
  const auto h = random_step_function(rng, 3, 2);
  const auto sigma = compose(swap(2, 1), swap(1, 1));
  const auto hs = pushforward(h, sigma);
  for (std::int64_t c = 0; c < 8; ++c) {
    const DyadicRational t(2 * c + 1, 4);
    CHECK((hs.value_at(t) - h.value_at(sigma.apply_point(t))).norm() == 0.0);
  }
}

TEST_CASE("compose applies its first operand first") {
  Rng rng(41);
  const auto f = random_step_function(rng, 3, 2);
  const auto a = swap(1, 1);
  const auto b = swap(2, 1);
  CHECK(max_abs_diff(pushforward(f, compose(a, b)), pushforward(pushforward(f, a), b)) == 0.0);
  CHECK(max_abs_diff(pushforward(f, compose(b, a)), pushforward(pushforward(f, b), a)) == 0.0);
  // these two orders genuinely differ
  CHECK(max_abs_diff(pushforward(f, compose(a, b)), pushforward(f, compose(b, a))) > 1e-6);
}

TEST_CASE("pushforward preserves every cellwise norm") {
  Rng rng(43);
  const auto l1 = NormedSpace<double>::lp(1.0, 2);
  const auto l2 = NormedSpace<double>::euclidean(2);
  for (int trial = 0; trial < 30; ++trial) {
    const auto f = random_step_function(rng, 4, 2);
    auto sigma = CellPermutation::identity(1);
    for (int s = 0; s < 3; ++s) {
      const int h = 1 + static_cast<int>(rng.below(3));
      sigma = compose(sigma, swap(h, 1 + static_cast<std::int64_t>(
                                         rng.below(static_cast<std::uint64_t>(
                                             HaarIndex::positions_at_level(h))))));
    }
    const auto g = pushforward(f, sigma);
    CHECK(std::abs(l2x_norm(g, l1) - l2x_norm(f, l1)) < 1e-12);
    CHECK(std::abs(l2x_norm(g, l2) - l2x_norm(f, l2)) < 1e-12);
  }
}

TEST_CASE("haar action classifies all four cases") {
  // phi_1^(1) against the depth-3 tree
  CHECK(haar_action(1, 1, HaarIndex(1, 1)).kind == HaarActionKind::child_average);
  CHECK(haar_action(1, 1, HaarIndex(2, 1)).kind == HaarActionKind::parent_mixing);
  CHECK(haar_action(1, 1, HaarIndex(2, 2)).kind == HaarActionKind::parent_mixing);
  CHECK(haar_action(1, 1, HaarIndex(3, 2)).kind == HaarActionKind::permuted_within_level);
  CHECK(haar_action(2, 1, HaarIndex(1, 1)).kind == HaarActionKind::unchanged);
  CHECK(haar_action(2, 1, HaarIndex(2, 2)).kind == HaarActionKind::unchanged);
  CHECK(haar_action(2, 1, HaarIndex(3, 3)).kind == HaarActionKind::unchanged);
  CHECK(haar_action(2, 2, HaarIndex(3, 3)).kind == HaarActionKind::parent_mixing);

  // the level-3 images of phi_1^(1): middle quarters swap the supports
  const auto a31 = haar_action(1, 1, HaarIndex(3, 2));
  REQUIRE(a31.image.has_value());
  CHECK(*a31.image == HaarIndex(3, 3));
  const auto a33 = haar_action(1, 1, HaarIndex(3, 3));
  CHECK(*a33.image == HaarIndex(3, 2));
  CHECK(haar_action(1, 1, HaarIndex(3, 1)).image->position() == 1);
  CHECK(haar_action(1, 1, HaarIndex(3, 4)).image->position() == 4);
}

TEST_CASE("haar action expansions match the composed function") {
  for (int h = 1; h <= 3; ++h)
    for (std::int64_t i = 1; i <= HaarIndex::positions_at_level(h); ++i)
      for (int k = 1; k <= 5; ++k) {
        std::set<std::int64_t> images;
        for (std::int64_t j = 1; j <= HaarIndex::positions_at_level(k); ++j) {
          const HaarIndex target(k, j);
          const auto action = haar_action(h, i, target);
          const int r = std::max(k, h + 1);
          const auto composed = pushforward(haar_cells(target, r), swap(h, i));
          CHECK(max_abs_diff(synthesize(action.expansion, r), composed) < 1e-12);
          if (k > h + 1) {
            REQUIRE(action.kind == HaarActionKind::permuted_within_level);
            REQUIRE(action.image.has_value());
            CHECK(action.image->level() == k);
            images.insert(action.image->position());
          }
        }
        if (k > h + 1)  // within-level action is a bijection
          CHECK(images.size() == static_cast<std::size_t>(HaarIndex::positions_at_level(k)));
      }
}

TEST_CASE("shifting property moves a coefficient onto its children") {
  HaarExpansion<double> x(1, 1);
  x.coefficient(HaarIndex(1, 1))(0) = 2.0;
  const auto rep = check_main_property(x, 1, 1);
  CHECK(rep.max_residual() < 1e-15);

  // with unrelated coefficients present
  HaarExpansion<double> y(3, 2);
  y.mean() << 0.25, -1;
  y.coefficient(HaarIndex(1, 1)) << 1, 2;
  y.coefficient(HaarIndex(2, 2)) << -1, 0.5;
  y.coefficient(HaarIndex(3, 3)) << 0.125, 8;
  const auto rep2 = check_main_property(y, 2, 1);
  CHECK(rep2.max_residual() < 1e-12);

  // nonzero child coefficient: precondition violated
  HaarExpansion<double> z(2, 1);
  z.coefficient(HaarIndex(1, 1))(0) = 1.0;
  z.coefficient(HaarIndex(2, 1))(0) = 0.5;
  CHECK_THROWS_AS(check_main_property(z, 1, 1), std::invalid_argument);
}

TEST_CASE("shifting property holds on random zeroed-children expansions") {
  Rng rng(47);
  for (int trial = 0; trial < 50; ++trial) {
    const int depth = 2 + static_cast<int>(rng.below(3));
    const int h = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(depth - 1)));
    const std::int64_t i =
        1 + static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(HaarIndex::positions_at_level(h))));
    auto x = random_expansion(rng, depth, 2);
    const auto [left, right] = HaarIndex(h, i).children();
    x.coefficient(left).setZero();
    x.coefficient(right).setZero();
    CHECK(check_main_property(x, h, i).max_residual() < 1e-9);
  }
}
