#pragma once

#include <Eigen/Core>
#include <algorithm>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "umd/rng.hpp"
#include "umd/step_function.hpp"
#include "umd/tolerances.hpp"

namespace umd {

/// Finite Haar expansion of a vector-valued function: a mean vector plus
/// one coefficient vector per index (k, j) with 1 <= k <= depth. Coefficient
/// columns are stored level-major via flat_index.
template <typename Scalar = double>
class HaarExpansion {
 public:
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  HaarExpansion(int depth, Eigen::Index dimension)
      : depth_(check_depth(depth)),
        mean_(Vector::Zero(check_dim(dimension))),
        coeffs_(Matrix::Zero(dimension, tree_size(depth))) {}

  int depth() const { return depth_; }
  Eigen::Index dimension() const { return mean_.size(); }
  Eigen::Index num_indices() const { return coeffs_.cols(); }

  const Vector& mean() const { return mean_; }
  Vector& mean() { return mean_; }

  const Matrix& coefficients() const { return coeffs_; }
  Matrix& coefficients() { return coeffs_; }

  bool has_index(const HaarIndex& idx) const { return idx.level() <= depth_; }

  auto coefficient(const HaarIndex& idx) const {
    check_index(idx);
    return coeffs_.col(flat_index(idx));
  }
  auto coefficient(const HaarIndex& idx) {
    check_index(idx);
    return coeffs_.col(flat_index(idx));
  }

  /// Expansion over the deeper tree with the same coefficients; new indices
  /// are zero.
  HaarExpansion padded(int depth) const {
    if (depth < depth_) throw std::invalid_argument("cannot pad to smaller depth");
    HaarExpansion out(depth, dimension());
    out.mean_ = mean_;
    out.coeffs_.leftCols(coeffs_.cols()) = coeffs_;
    return out;
  }

 private:
  static int check_depth(int depth) {
    if (depth < 0 || depth > kMaxResolution)
      throw std::invalid_argument("depth must be in [0, " + std::to_string(kMaxResolution) + "]");
    return depth;
  }
  static Eigen::Index check_dim(Eigen::Index dim) {
    if (dim < 1) throw std::invalid_argument("dimension must be positive");
    return dim;
  }
  void check_index(const HaarIndex& idx) const {
    if (idx.level() > depth_)
      throw std::out_of_range("index " + idx.to_string() + " beyond depth " + std::to_string(depth_));
  }

  int depth_;
  Vector mean_;
  Matrix coeffs_;
};

template <typename Scalar>
std::pair<HaarExpansion<Scalar>, HaarExpansion<Scalar>> common_depth(const HaarExpansion<Scalar>& a,
                                                                     const HaarExpansion<Scalar>& b) {
  const int n = std::max(a.depth(), b.depth());
  return {a.padded(n), b.padded(n)};
}

template <typename Scalar>
HaarExpansion<Scalar> operator+(const HaarExpansion<Scalar>& a, const HaarExpansion<Scalar>& b) {
  if (a.dimension() != b.dimension()) throw std::invalid_argument("dimension mismatch");
  auto [xa, xb] = common_depth(a, b);
  xa.mean() += xb.mean();
  xa.coefficients() += xb.coefficients();
  return xa;
}

template <typename Scalar>
HaarExpansion<Scalar> operator-(const HaarExpansion<Scalar>& a, const HaarExpansion<Scalar>& b) {
  if (a.dimension() != b.dimension()) throw std::invalid_argument("dimension mismatch");
  auto [xa, xb] = common_depth(a, b);
  xa.mean() -= xb.mean();
  xa.coefficients() -= xb.coefficients();
  return xa;
}

template <typename Scalar>
HaarExpansion<Scalar> operator*(Scalar s, const HaarExpansion<Scalar>& x) {
  HaarExpansion<Scalar> out = x;
  out.mean() *= s;
  out.coefficients() *= s;
  return out;
}

template <typename Scalar>
Scalar max_abs_diff(const HaarExpansion<Scalar>& a, const HaarExpansion<Scalar>& b) {
  if (a.dimension() != b.dimension()) throw std::invalid_argument("dimension mismatch");
  auto [xa, xb] = common_depth(a, b);
  return std::max((xa.mean() - xb.mean()).template lpNorm<Eigen::Infinity>(),
                  (xa.coefficients() - xb.coefficients()).template lpNorm<Eigen::Infinity>());
}

/// Materializes an expansion as a step function at the given resolution
/// (which must be at least the expansion depth). Works level by level:
/// a cell at level k splits into two children whose values differ from the
/// parent average by +-(coefficient * amplitude).
template <typename Scalar>
StepFunction<Scalar> synthesize(const HaarExpansion<Scalar>& x, int resolution) {
  check_resolution(resolution);
  if (resolution < x.depth())
    throw std::invalid_argument("resolution " + std::to_string(resolution) +
                                " insufficient for expansion depth " + std::to_string(x.depth()));
  using Matrix = typename StepFunction<Scalar>::Matrix;
  Matrix cur = x.mean();
  for (int k = 1; k <= resolution; ++k) {
    const Eigen::Index half = Eigen::Index(1) << (k - 1);
    const Scalar amp = haar_amplitude<Scalar>(k);
    Matrix next(cur.rows(), 2 * half);
    const Eigen::Index base = half - 1;  // flat_index of (k, 1)
    for (Eigen::Index p = 0; p < half; ++p) {
      if (k <= x.depth()) {
        auto bump = (x.coefficients().col(base + p) * amp).eval();
        next.col(2 * p) = cur.col(p) + bump;
        next.col(2 * p + 1) = cur.col(p) - bump;
      } else {
        next.col(2 * p) = cur.col(p);
        next.col(2 * p + 1) = cur.col(p);
      }
    }
    cur = std::move(next);
  }
  return StepFunction<Scalar>(resolution, std::move(cur));
}

/// Haar coefficients of a step function down to the given depth, plus the
/// global mean. The inverse of synthesize when depth equals the resolution;
/// for smaller depth it yields the coefficients of the orthogonal projection.
template <typename Scalar>
HaarExpansion<Scalar> analyze(const StepFunction<Scalar>& f, int depth) {
  if (depth < 0 || depth > f.resolution())
    throw std::invalid_argument("analysis depth must be in [0, resolution]");
  using Matrix = typename StepFunction<Scalar>::Matrix;
  HaarExpansion<Scalar> x(depth, f.dimension());
  Matrix cur = f.cells();
  for (int k = f.resolution(); k >= 1; --k) {
    const Eigen::Index half = Eigen::Index(1) << (k - 1);
    const Scalar scale = static_cast<Scalar>(0.5) / haar_amplitude<Scalar>(k);
    const Eigen::Index base = half - 1;
    Matrix next(cur.rows(), half);
    for (Eigen::Index p = 0; p < half; ++p) {
      if (k <= depth) x.coefficients().col(base + p) = (cur.col(2 * p) - cur.col(2 * p + 1)) * scale;
      next.col(p) = (cur.col(2 * p) + cur.col(2 * p + 1)) * static_cast<Scalar>(0.5);
    }
    cur = std::move(next);
  }
  x.mean() = cur.col(0);
  return x;
}

template <typename Scalar>
HaarExpansion<Scalar> analyze(const StepFunction<Scalar>& f) {
  return analyze(f, f.resolution());
}

/// Conditional expectation onto the resolution-k dyadic cells, returned at
/// the original resolution.
template <typename Scalar>
StepFunction<Scalar> conditional_expectation(const StepFunction<Scalar>& f, int k) {
  if (k < 0) throw std::invalid_argument("level must be nonnegative");
  if (k >= f.resolution()) return f;
  using Matrix = typename StepFunction<Scalar>::Matrix;
  Matrix cur = f.cells();
  for (int level = f.resolution(); level > k; --level) {
    const Eigen::Index half = Eigen::Index(1) << (level - 1);
    Matrix next(cur.rows(), half);
    for (Eigen::Index p = 0; p < half; ++p)
      next.col(p) = (cur.col(2 * p) + cur.col(2 * p + 1)) * static_cast<Scalar>(0.5);
    cur = std::move(next);
  }
  return StepFunction<Scalar>(k, std::move(cur)).refined(f.resolution());
}

/// Indices carrying a coefficient above tau in max-norm, in level-major
/// order.
struct Spectrum {
  std::vector<HaarIndex> indices;

  std::size_t size() const { return indices.size(); }
  bool empty() const { return indices.empty(); }
  bool contains(const HaarIndex& idx) const {
    return std::binary_search(indices.begin(), indices.end(), idx);
  }
  /// Highest occupied level; 0 when empty.
  int max_level() const { return indices.empty() ? 0 : indices.back().level(); }
  int min_level() const { return indices.empty() ? 0 : indices.front().level(); }
};

template <typename Scalar>
Spectrum spectrum(const HaarExpansion<Scalar>& x, double tau = kTauSpec) {
  Spectrum s;
  for (Eigen::Index c = 0; c < x.num_indices(); ++c)
    if (x.coefficients().col(c).template lpNorm<Eigen::Infinity>() > tau)
      s.indices.push_back(flat_to_index(c));
  return s;
}

/// Expansion with independent uniform [-1, 1] entries in mean and
/// coefficients.
template <typename Scalar = double>
HaarExpansion<Scalar> random_expansion(Rng& rng, int depth, Eigen::Index dimension) {
  HaarExpansion<Scalar> x(depth, dimension);
  for (Eigen::Index i = 0; i < x.mean().size(); ++i) x.mean()(i) = static_cast<Scalar>(rng.uniform(-1.0, 1.0));
  for (Eigen::Index c = 0; c < x.coefficients().cols(); ++c)
    for (Eigen::Index i = 0; i < x.coefficients().rows(); ++i)
      x.coefficients()(i, c) = static_cast<Scalar>(rng.uniform(-1.0, 1.0));
  return x;
}

template <typename Scalar = double>
StepFunction<Scalar> random_step_function(Rng& rng, int resolution, Eigen::Index dimension) {
  StepFunction<Scalar> f(resolution, dimension);
  for (Eigen::Index c = 0; c < f.num_cells(); ++c)
    for (Eigen::Index i = 0; i < f.dimension(); ++i) f.cells()(i, c) = static_cast<Scalar>(rng.uniform(-1.0, 1.0));
  return f;
}

}  // namespace umd
