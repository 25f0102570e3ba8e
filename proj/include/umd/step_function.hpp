#pragma once

#include <Eigen/Core>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

#include "umd/dyadic.hpp"

namespace umd {

inline constexpr int kMaxResolution = 30;

inline int check_resolution(int resolution) {
  if (resolution < 0 || resolution > kMaxResolution)
    throw std::invalid_argument("resolution must be in [0, " + std::to_string(kMaxResolution) +
                                "], got " + std::to_string(resolution));
  return resolution;
}

/// Index of the dyadic cell [c/2^R, (c+1)/2^R) containing t. Exact.
inline Eigen::Index cell_of(const DyadicRational& t, int resolution) {
  check_resolution(resolution);
  if (t.numerator() < 0 || !(t < DyadicRational(1)))
    throw std::domain_error("point outside [0, 1): " + t.to_string());
  const int e = static_cast<int>(t.exponent());
  if (e <= resolution) return static_cast<Eigen::Index>(t.numerator() << (resolution - e));
  return static_cast<Eigen::Index>(t.numerator() >> (e - resolution));
}

inline Eigen::Index cell_of(double t, int resolution) {
  check_resolution(resolution);
  if (!(t >= 0.0) || !(t < 1.0)) throw std::domain_error("point outside [0, 1)");
  return static_cast<Eigen::Index>(std::floor(std::ldexp(t, resolution)));
}

/// Vector-valued dyadic step function on [0, 1): constant on each of the
/// 2^R cells at resolution R. Stored as a dense dimension x 2^R matrix,
/// one column per cell.
template <typename Scalar = double>
class StepFunction {
 public:
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  StepFunction(int resolution, Eigen::Index dimension)
      : resolution_(check_resolution(resolution)),
        cells_(Matrix::Zero(check_dimension(dimension), Eigen::Index(1) << resolution)) {}

  StepFunction(int resolution, Matrix cells) : resolution_(check_resolution(resolution)), cells_(std::move(cells)) {
    check_dimension(cells_.rows());
    if (cells_.cols() != (Eigen::Index(1) << resolution_))
      throw std::invalid_argument("cell count " + std::to_string(cells_.cols()) +
                                  " does not match resolution " + std::to_string(resolution_));
  }

  int resolution() const { return resolution_; }
  Eigen::Index dimension() const { return cells_.rows(); }
  Eigen::Index num_cells() const { return cells_.cols(); }

  const Matrix& cells() const { return cells_; }
  Matrix& cells() { return cells_; }

  auto cell(Eigen::Index c) const { return cells_.col(c); }
  auto cell(Eigen::Index c) { return cells_.col(c); }

  Vector value_at(const DyadicRational& t) const { return cells_.col(cell_of(t, resolution_)); }
  Vector value_at(double t) const { return cells_.col(cell_of(t, resolution_)); }

  /// Same function expressed at a finer resolution; pointwise values are
  /// unchanged.
  StepFunction refined(int resolution) const {
    check_resolution(resolution);
    if (resolution < resolution_)
      throw std::invalid_argument("cannot refine to coarser resolution");
    if (resolution == resolution_) return *this;
    const Eigen::Index rep = Eigen::Index(1) << (resolution - resolution_);
    Matrix out(cells_.rows(), cells_.cols() * rep);
    for (Eigen::Index c = 0; c < cells_.cols(); ++c)
      out.middleCols(c * rep, rep).colwise() = cells_.col(c);
    return StepFunction(resolution, std::move(out));
  }

 private:
  static Eigen::Index check_dimension(Eigen::Index dimension) {
    if (dimension < 1) throw std::invalid_argument("dimension must be positive");
    return dimension;
  }

  int resolution_;
  Matrix cells_;
};

/// Brings two step functions to a common (finer) resolution.
template <typename Scalar>
std::pair<StepFunction<Scalar>, StepFunction<Scalar>> common_resolution(const StepFunction<Scalar>& a,
                                                                        const StepFunction<Scalar>& b) {
  const int r = std::max(a.resolution(), b.resolution());
  return {a.refined(r), b.refined(r)};
}

template <typename Scalar>
StepFunction<Scalar> operator+(const StepFunction<Scalar>& a, const StepFunction<Scalar>& b) {
  if (a.dimension() != b.dimension()) throw std::invalid_argument("dimension mismatch");
  auto [fa, fb] = common_resolution(a, b);
  return StepFunction<Scalar>(fa.resolution(), fa.cells() + fb.cells());
}

template <typename Scalar>
StepFunction<Scalar> operator-(const StepFunction<Scalar>& a, const StepFunction<Scalar>& b) {
  if (a.dimension() != b.dimension()) throw std::invalid_argument("dimension mismatch");
  auto [fa, fb] = common_resolution(a, b);
  return StepFunction<Scalar>(fa.resolution(), fa.cells() - fb.cells());
}

template <typename Scalar>
StepFunction<Scalar> operator*(Scalar s, const StepFunction<Scalar>& f) {
  return StepFunction<Scalar>(f.resolution(), (s * f.cells()).eval());
}

/// Max over cells and coordinates of |a - b|, after refining to a common
/// resolution.
template <typename Scalar>
Scalar max_abs_diff(const StepFunction<Scalar>& a, const StepFunction<Scalar>& b) {
  if (a.dimension() != b.dimension()) throw std::invalid_argument("dimension mismatch");
  auto [fa, fb] = common_resolution(a, b);
  return (fa.cells() - fb.cells()).template lpNorm<Eigen::Infinity>();
}

/// 2^((k-1)/2), the Haar amplitude at level k. Exact for odd k.
template <typename Scalar = double>
Scalar haar_amplitude(int level) {
  Scalar v = static_cast<Scalar>(std::int64_t(1) << ((level - 1) / 2));
  if ((level - 1) & 1) v *= std::sqrt(static_cast<Scalar>(2));
  return v;
}

/// Pointwise Haar function value at an exact dyadic point.
template <typename Scalar = double>
Scalar haar_eval(const HaarIndex& idx, const DyadicRational& t) {
  if (t.numerator() < 0 || !(t < DyadicRational(1)))
    throw std::domain_error("point outside [0, 1): " + t.to_string());
  const Eigen::Index c = cell_of(t, idx.level());
  if (c == 2 * idx.position() - 2) return haar_amplitude<Scalar>(idx.level());
  if (c == 2 * idx.position() - 1) return -haar_amplitude<Scalar>(idx.level());
  return static_cast<Scalar>(0);
}

template <typename Scalar = double>
Scalar haar_eval(const HaarIndex& idx, double t) {
  const Eigen::Index c = cell_of(t, idx.level());
  if (c == 2 * idx.position() - 2) return haar_amplitude<Scalar>(idx.level());
  if (c == 2 * idx.position() - 1) return -haar_amplitude<Scalar>(idx.level());
  return static_cast<Scalar>(0);
}

/// Scalar Haar function materialized as cells at resolution R >= level.
template <typename Scalar = double>
StepFunction<Scalar> haar_cells(const HaarIndex& idx, int resolution) {
  check_resolution(resolution);
  if (resolution < idx.level())
    throw std::invalid_argument("resolution " + std::to_string(resolution) +
                                " below Haar level " + std::to_string(idx.level()));
  StepFunction<Scalar> f(resolution, 1);
  const Eigen::Index rep = Eigen::Index(1) << (resolution - idx.level());
  const Scalar amp = haar_amplitude<Scalar>(idx.level());
  f.cells().middleCols((2 * idx.position() - 2) * rep, rep).setConstant(amp);
  f.cells().middleCols((2 * idx.position() - 1) * rep, rep).setConstant(-amp);
  return f;
}

}  // namespace umd
