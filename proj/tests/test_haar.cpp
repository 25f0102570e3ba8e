#include <cmath>
#include <vector>

#include "doctest.h"
#include "umd/haar.hpp"
#include "umd/rng.hpp"
#include "umd/spaces.hpp"

using namespace umd;

namespace {

// Independent coefficient oracle: the inner product <f, chi_k^(j)> computed
// by direct summation over cells at the function's own resolution.
Eigen::VectorXd coefficient_oracle(const StepFunction<double>& f, const HaarIndex& idx) {
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(f.dimension());
  const double w = 1.0 / static_cast<double>(f.num_cells());
  for (Eigen::Index c = 0; c < f.num_cells(); ++c) {
    const double t = (static_cast<double>(c) + 0.5) * w;
    acc += f.cell(c) * haar_eval(idx, t) * w;
  }
  return acc;
}

double inner_product(const StepFunction<double>& a, const StepFunction<double>& b) {
  auto [fa, fb] = common_resolution(a, b);
  return (fa.cells().array() * fb.cells().array()).sum() / static_cast<double>(fa.num_cells());
}

}  // namespace

TEST_CASE("haar amplitudes are 2^((k-1)/2)") {
  CHECK(haar_amplitude(1) == 1.0);
  CHECK(haar_amplitude(2) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
  CHECK(haar_amplitude(3) == 2.0);
  CHECK(haar_amplitude(5) == 4.0);
  CHECK(haar_amplitude(7) == 8.0);
}

TEST_CASE("haar functions take the signed amplitude on their halves") {
  CHECK(haar_eval(HaarIndex(1, 1), 0.3) == 1.0);
  CHECK(haar_eval(HaarIndex(1, 1), 0.7) == -1.0);
  CHECK(haar_eval(HaarIndex(2, 1), 0.3) == doctest::Approx(-std::sqrt(2.0)));
  CHECK(haar_eval(HaarIndex(2, 2), 0.3) == 0.0);
  CHECK(haar_eval(HaarIndex(2, 2), 0.6) == doctest::Approx(std::sqrt(2.0)));

  // exact boundary behaviour: cells are half-open on the right
  CHECK(haar_eval(HaarIndex(1, 1), DyadicRational(1, 1)) == -1.0);
  CHECK(haar_eval(HaarIndex(2, 1), DyadicRational(1, 2)) == doctest::Approx(-std::sqrt(2.0)));
  CHECK_THROWS_AS(haar_eval(HaarIndex(1, 1), DyadicRational(1)), std::domain_error);

  // both overloads agree on cell midpoints
  for (int k = 1; k <= 6; ++k)
    for (std::int64_t j = 1; j <= HaarIndex::positions_at_level(k); ++j)
      for (std::int64_t c = 0; c < (std::int64_t(1) << 7); ++c) {
        const DyadicRational t(2 * c + 1, 8);
        CHECK(haar_eval(HaarIndex(k, j), t) == haar_eval(HaarIndex(k, j), t.to_double()));
      }
}

TEST_CASE("haar system is orthonormal") {
  const auto nodes = TreeRange(1, 8).enumerate();
  std::vector<StepFunction<double>> fns;
  fns.reserve(nodes.size());
  for (const auto& idx : nodes) fns.push_back(haar_cells(idx, 8));
  for (std::size_t a = 0; a < nodes.size(); ++a)
    for (std::size_t b = a; b < nodes.size(); ++b) {
      const double expected = a == b ? 1.0 : 0.0;
      CHECK(std::abs(inner_product(fns[a], fns[b]) - expected) < 1e-12);
    }
  // and orthogonal to constants
  StepFunction<double> one(0, Eigen::MatrixXd::Ones(1, 1));
  for (const auto& f : fns) CHECK(std::abs(inner_product(f, one)) < 1e-12);
}

TEST_CASE("synthesis matches the explicit sum") {
  HaarExpansion<double> x(2, 1);
  x.mean()(0) = 0.5;
  x.coefficient(HaarIndex(1, 1))(0) = 1.0;
  x.coefficient(HaarIndex(2, 1))(0) = -2.0;
  x.coefficient(HaarIndex(2, 2))(0) = 3.0;

  const auto f = synthesize(x, 2);
  const double r2 = std::sqrt(2.0);
  CHECK(f.cell(0)(0) == doctest::Approx(0.5 + 1.0 - 2.0 * r2));
  CHECK(f.cell(1)(0) == doctest::Approx(0.5 + 1.0 + 2.0 * r2));
  CHECK(f.cell(2)(0) == doctest::Approx(0.5 - 1.0 + 3.0 * r2));
  CHECK(f.cell(3)(0) == doctest::Approx(0.5 - 1.0 - 3.0 * r2));

  // same values from pointwise evaluation of the sum
  for (Eigen::Index c = 0; c < 4; ++c) {
    const double t = (static_cast<double>(c) + 0.5) / 4.0;
    double v = x.mean()(0);
    for (const auto& idx : TreeRange(1, 2).enumerate()) v += x.coefficient(idx)(0) * haar_eval(idx, t);
    CHECK(f.cell(c)(0) == doctest::Approx(v).epsilon(1e-14));
  }

  CHECK_THROWS_AS(synthesize(x, 1), std::invalid_argument);
  CHECK(max_abs_diff(synthesize(x, 4), synthesize(x, 2).refined(4)) == 0.0);
}

TEST_CASE("analysis agrees with the direct-summation oracle") {
  Rng rng(42);
  for (int r = 0; r <= 6; ++r)
    for (Eigen::Index m : {1, 3}) {
      const auto f = random_step_function(rng, r, m);
      const auto x = analyze(f);
      CHECK(x.depth() == r);
      Eigen::VectorXd mean = Eigen::VectorXd::Zero(m);
      for (Eigen::Index c = 0; c < f.num_cells(); ++c) mean += f.cell(c);
      mean /= static_cast<double>(f.num_cells());
      CHECK((x.mean() - mean).lpNorm<Eigen::Infinity>() < 1e-12);
      if (r >= 1)
        for (const auto& idx : TreeRange(1, r).enumerate())
          CHECK((x.coefficient(idx) - coefficient_oracle(f, idx)).lpNorm<Eigen::Infinity>() < 1e-12);
    }
}

TEST_CASE("analyze and synthesize are mutually inverse") {
  Rng rng(7);
  for (int r = 0; r <= 8; ++r) {
    const auto f = random_step_function(rng, r, 2);
    CHECK(max_abs_diff(synthesize(analyze(f), r), f) < 1e-12);
  }
  for (int n = 0; n <= 8; ++n) {
    const auto x = random_expansion(rng, n, 2);
    CHECK(max_abs_diff(analyze(synthesize(x, std::max(n, 0))), x) < 1e-12);
  }
  // synthesizing at a finer resolution and re-analyzing adds nothing
  const auto x = random_expansion(rng, 3, 2);
  const auto back = analyze(synthesize(x, 6));
  CHECK(max_abs_diff(back, x.padded(6)) < 1e-12);
}

TEST_CASE("analysis is linear") {
  Rng rng(11);
  const auto f = random_step_function(rng, 5, 3);
  const auto g = random_step_function(rng, 5, 3);
  const auto sum = analyze(f + g);
  CHECK(max_abs_diff(sum, analyze(f) + analyze(g)) < 1e-12);
  CHECK(max_abs_diff(analyze(2.5 * f), 2.5 * analyze(f)) < 1e-12);
}

TEST_CASE("parseval identity holds in L2") {
  Rng rng(13);
  const auto space = NormedSpace<double>::euclidean(3);
  for (int trial = 0; trial < 25; ++trial) {
    const auto f = random_step_function(rng, 6, 3);
    const auto x = analyze(f);
    const double lhs = l2x_norm(f, space);
    const double rhs =
        std::sqrt(x.mean().squaredNorm() + x.coefficients().squaredNorm());
    CHECK(std::abs(lhs - rhs) < 1e-10);
  }
}

TEST_CASE("conditional expectation truncates the expansion") {
  Rng rng(17);
  const auto f = random_step_function(rng, 6, 2);
  const auto x = analyze(f);
  for (int k = 0; k <= 6; ++k) {
    const auto ek = conditional_expectation(f, k);
    // oracle: synthesize the truncated expansion
    HaarExpansion<double> trunc(k, 2);
    trunc.mean() = x.mean();
    if (k >= 1)
      for (const auto& idx : TreeRange(1, k).enumerate()) trunc.coefficient(idx) = x.coefficient(idx);
    CHECK(max_abs_diff(ek, synthesize(trunc, 6)) < 1e-12);
  }
  CHECK(max_abs_diff(conditional_expectation(f, 6), f) == 0.0);
  CHECK(max_abs_diff(conditional_expectation(f, 9), f) == 0.0);
  const auto e0 = conditional_expectation(f, 0);
  for (Eigen::Index c = 0; c < e0.num_cells(); ++c)
    CHECK((e0.cell(c) - x.mean()).lpNorm<Eigen::Infinity>() < 1e-12);
  CHECK_THROWS_AS(conditional_expectation(f, -1), std::invalid_argument);
}

TEST_CASE("conditional expectation is an L2X contraction") {
  Rng rng(19);
  for (double p : {1.0, 2.0, 3.5}) {
    const auto space = NormedSpace<double>::lp(p, 2);
    for (int trial = 0; trial < 20; ++trial) {
      const auto f = random_step_function(rng, 5, 2);
      for (int k = 0; k <= 5; ++k)
        CHECK(l2x_norm(conditional_expectation(f, k), space) <= l2x_norm(f, space) + 1e-12);
    }
  }
  const auto sup = NormedSpace<double>::lp(std::numeric_limits<double>::infinity(), 2);
  const auto f = random_step_function(rng, 5, 2);
  for (int k = 0; k <= 5; ++k)
    CHECK(l2x_norm(conditional_expectation(f, k), sup) <= l2x_norm(f, sup) + 1e-12);
}

TEST_CASE("spectrum collects indices above threshold") {
  HaarExpansion<double> x(3, 1);
  x.coefficient(HaarIndex(1, 1))(0) = 0.5;
  x.coefficient(HaarIndex(3, 2))(0) = -1e-3;
  x.coefficient(HaarIndex(3, 4))(0) = 1e-12;
  const auto sp = spectrum(x);
  REQUIRE(sp.size() == 2);
  CHECK(sp.contains(HaarIndex(1, 1)));
  CHECK(sp.contains(HaarIndex(3, 2)));
  CHECK_FALSE(sp.contains(HaarIndex(3, 4)));
  CHECK(sp.max_level() == 3);
  CHECK(sp.min_level() == 1);
  CHECK(spectrum(x, 2.0).empty());
}

TEST_CASE("expansion padding preserves coefficients") {
  Rng rng(23);
  const auto x = random_expansion(rng, 2, 2);
  const auto p = x.padded(4);
  CHECK(p.depth() == 4);
  CHECK(max_abs_diff(p, x.padded(4)) == 0.0);
  for (const auto& idx : TreeRange(1, 2).enumerate())
    CHECK((p.coefficient(idx) - x.coefficient(idx)).norm() == 0.0);
  for (const auto& idx : TreeRange(3, 4).enumerate())
    CHECK(p.coefficient(idx).lpNorm<Eigen::Infinity>() == 0.0);
  CHECK_THROWS_AS(x.padded(1), std::invalid_argument);
}
