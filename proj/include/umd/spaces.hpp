#pragma once

#include <Eigen/Core>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>

#include "umd/rng.hpp"
#include "umd/step_function.hpp"

namespace umd {

inline constexpr std::uint64_t kDefaultSeed = 1;

namespace detail {

inline std::string format_p(double p) {
  if (std::isinf(p)) return "inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", p);
  return buf;
}

}  // namespace detail

/// Finite-dimensional normed space: either l_p (1 <= p <= inf) or a custom
/// norm supplied as an evaluator pair (norm value + subgradient). Custom
/// norms are spot-checked against the norm axioms at construction and
/// rejected on violation.
template <typename Scalar = double>
class NormedSpace {
 public:
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using NormFn = std::function<Scalar(const Vector&)>;
  using SubgradFn = std::function<Vector(const Vector&)>;

  static NormedSpace lp(double p, Eigen::Index dimension) {
    if (!(p >= 1.0)) throw std::invalid_argument("lp space requires p >= 1");
    NormedSpace s;
    s.dim_ = check_dim(dimension);
    s.p_ = p;
    s.name_ = "lp:" + detail::format_p(p) + ":" + std::to_string(dimension);
    return s;
  }

  static NormedSpace euclidean(Eigen::Index dimension) { return lp(2.0, dimension); }

  static NormedSpace custom(const std::string& name, Eigen::Index dimension, NormFn norm_fn,
                            SubgradFn subgrad_fn, std::uint64_t check_seed = kDefaultSeed) {
    NormedSpace s;
    s.dim_ = check_dim(dimension);
    s.p_ = 0;
    s.name_ = "custom:" + name + ":" + std::to_string(dimension);
    s.norm_fn_ = std::move(norm_fn);
    s.subgrad_fn_ = std::move(subgrad_fn);
    s.spot_check_axioms(check_seed);
    return s;
  }

  Eigen::Index dimension() const { return dim_; }
  bool is_lp() const { return !norm_fn_; }
  bool is_euclidean() const { return is_lp() && p_ == 2.0; }
  double p() const {
    if (!is_lp()) throw std::logic_error("custom norm has no p");
    return p_;
  }
  /// Spec string, e.g. "lp:2:3", "lp:inf:2", "custom:<name>:<m>".
  const std::string& name() const { return name_; }

  Scalar norm(const Vector& v) const {
    check_vec(v);
    if (norm_fn_) return norm_fn_(v);
    return lp_norm(p_, v);
  }

  /// A vector g with <g, v> = norm(v) and dual-norm(g) = 1. For p in
  /// {1, inf} the zero vector has no canonical selection and throws; for
  /// 1 < p < inf the zero vector returns e_1.
  Vector subgradient(const Vector& v) const {
    check_vec(v);
    if (subgrad_fn_) return subgrad_fn_(v);
    return lp_subgradient(p_, v);
  }

  static Scalar lp_norm(double p, const Vector& v) {
    if (std::isinf(p)) return v.cwiseAbs().maxCoeff();
    if (p == 1.0) return v.cwiseAbs().sum();
    if (p == 2.0) return v.norm();
    return std::pow(v.cwiseAbs().array().pow(static_cast<Scalar>(p)).sum(), static_cast<Scalar>(1.0 / p));
  }

  static Vector lp_subgradient(double p, const Vector& v) {
    const Eigen::Index m = v.size();
    if (std::isinf(p)) {
      Eigen::Index arg = 0;
      Scalar best = std::abs(v(0));
      for (Eigen::Index i = 1; i < m; ++i)
        if (std::abs(v(i)) > best) {
          best = std::abs(v(i));
          arg = i;
        }
      if (best == Scalar(0)) throw std::domain_error("l_inf subgradient undefined at zero");
      Vector g = Vector::Zero(m);
      g(arg) = v(arg) > Scalar(0) ? Scalar(1) : Scalar(-1);
      return g;
    }
    if (p == 1.0) {
      if (v.cwiseAbs().maxCoeff() == Scalar(0)) throw std::domain_error("l_1 subgradient undefined at zero");
      Vector g(m);
      for (Eigen::Index i = 0; i < m; ++i)
        g(i) = v(i) > Scalar(0) ? Scalar(1) : (v(i) < Scalar(0) ? Scalar(-1) : Scalar(0));
      return g;
    }
    const Scalar nv = lp_norm(p, v);
    if (nv == Scalar(0)) return Vector::Unit(m, 0);
    if (p == 2.0) return v / nv;
    Vector g(m);
    for (Eigen::Index i = 0; i < m; ++i) {
      const Scalar a = std::abs(v(i));
      const Scalar mag = std::pow(a / nv, static_cast<Scalar>(p - 1.0));
      g(i) = v(i) >= Scalar(0) ? mag : -mag;
    }
    return g;
  }

 private:
  NormedSpace() = default;

  static Eigen::Index check_dim(Eigen::Index d) {
    if (d < 1) throw std::invalid_argument("space dimension must be positive");
    return d;
  }

  void check_vec(const Vector& v) const {
    if (v.size() != dim_)
      throw std::invalid_argument("vector dimension " + std::to_string(v.size()) +
                                  " does not match space dimension " + std::to_string(dim_));
  }

  void spot_check_axioms(std::uint64_t seed) const {
    Rng rng(Rng::derive(seed, 0xA1C0));
    const Scalar tol = static_cast<Scalar>(1e-9);
    Vector zero = Vector::Zero(dim_);
    if (std::abs(norm_fn_(zero)) > tol) throw std::invalid_argument(name_ + ": norm(0) != 0");
    for (int trial = 0; trial < 64; ++trial) {
      Vector u(dim_), v(dim_);
      for (Eigen::Index i = 0; i < dim_; ++i) {
        u(i) = static_cast<Scalar>(rng.normal());
        v(i) = static_cast<Scalar>(rng.normal());
      }
      const Scalar nu = norm_fn_(u), nv = norm_fn_(v);
      if (v.norm() > Scalar(1e-3) && !(nv > Scalar(0)))
        throw std::invalid_argument(name_ + ": norm not positive definite");
      const Scalar lam = static_cast<Scalar>(rng.uniform(-3.0, 3.0));
      if (std::abs(norm_fn_((lam * v).eval()) - std::abs(lam) * nv) > tol * (Scalar(1) + std::abs(lam) * nv))
        throw std::invalid_argument(name_ + ": norm not absolutely homogeneous");
      if (norm_fn_((u + v).eval()) > nu + nv + tol * (Scalar(1) + nu + nv))
        throw std::invalid_argument(name_ + ": triangle inequality violated");
      if (v.norm() > Scalar(1e-3)) {
        Vector g = subgrad_fn_(v);
        if (std::abs(g.dot(v) - nv) > tol * (Scalar(1) + nv))
          throw std::invalid_argument(name_ + ": subgradient does not attain the norm");
        if (g.dot(u) > nu * (Scalar(1) + tol) + tol)
          throw std::invalid_argument(name_ + ": subgradient has dual norm above one");
      }
    }
  }

  Eigen::Index dim_ = 0;
  double p_ = 2.0;
  std::string name_;
  NormFn norm_fn_;
  SubgradFn subgrad_fn_;
};

template <typename Scalar = double>
Scalar vector_norm(const NormedSpace<Scalar>& space, const typename NormedSpace<Scalar>::Vector& v) {
  return space.norm(v);
}

template <typename Scalar = double>
typename NormedSpace<Scalar>::Vector norm_subgradient(const NormedSpace<Scalar>& space,
                                                      const typename NormedSpace<Scalar>::Vector& v) {
  return space.subgradient(v);
}

/// Parses a CLI space spec "lp:<p>:<m>" with p a decimal or "inf".
inline NormedSpace<double> parse_space(const std::string& text) {
  const auto bad = [&] { return std::invalid_argument("invalid space spec '" + text + "' (want lp:<p>:<m>)"); };
  const auto c1 = text.find(':');
  if (c1 == std::string::npos) throw bad();
  const auto c2 = text.find(':', c1 + 1);
  if (c2 == std::string::npos || text.substr(0, c1) != "lp") throw bad();
  const std::string ptok = text.substr(c1 + 1, c2 - c1 - 1);
  const std::string mtok = text.substr(c2 + 1);
  double p;
  if (ptok == "inf") {
    p = std::numeric_limits<double>::infinity();
  } else {
    std::size_t used = 0;
    try {
      p = std::stod(ptok, &used);
    } catch (const std::exception&) {
      throw bad();
    }
    if (used != ptok.size()) throw bad();
  }
  long m;
  std::size_t used = 0;
  try {
    m = std::stol(mtok, &used);
  } catch (const std::exception&) {
    throw bad();
  }
  if (used != mtok.size() || m < 1) throw bad();
  if (!(p >= 1.0)) throw std::invalid_argument("space spec '" + text + "': p must be >= 1");
  return NormedSpace<double>::lp(p, m);
}

/// Linear operator between two normed spaces, stored densely.
template <typename Scalar = double>
class Operator {
 public:
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  Operator(Matrix matrix, NormedSpace<Scalar> source, NormedSpace<Scalar> target)
      : matrix_(std::move(matrix)), source_(std::move(source)), target_(std::move(target)) {
    if (matrix_.cols() != source_.dimension() || matrix_.rows() != target_.dimension())
      throw std::invalid_argument("operator is " + std::to_string(matrix_.rows()) + "x" +
                                  std::to_string(matrix_.cols()) + " but spaces are " +
                                  std::to_string(target_.dimension()) + " <- " +
                                  std::to_string(source_.dimension()));
  }

  static Operator identity(const NormedSpace<Scalar>& space) {
    return Operator(Matrix::Identity(space.dimension(), space.dimension()), space, space);
  }

  static Operator identity(const NormedSpace<Scalar>& source, const NormedSpace<Scalar>& target) {
    if (source.dimension() != target.dimension())
      throw std::invalid_argument("identity operator requires equal dimensions");
    return Operator(Matrix::Identity(target.dimension(), source.dimension()), source, target);
  }

  const Matrix& matrix() const { return matrix_; }
  const NormedSpace<Scalar>& source() const { return source_; }
  const NormedSpace<Scalar>& target() const { return target_; }

  Vector operator()(const Vector& v) const { return matrix_ * v; }

 private:
  Matrix matrix_;
  NormedSpace<Scalar> source_;
  NormedSpace<Scalar> target_;
};

/// Applies the operator cellwise to a step function with values in the
/// source space.
template <typename Scalar>
StepFunction<Scalar> apply(const Operator<Scalar>& T, const StepFunction<Scalar>& f) {
  if (f.dimension() != T.source().dimension())
    throw std::invalid_argument("step function dimension does not match operator source");
  return StepFunction<Scalar>(f.resolution(), (T.matrix() * f.cells()).eval());
}

/// L_2 norm of a step function with values measured in the given space:
/// (sum over cells of 2^-R * norm(cell)^2)^(1/2).
template <typename Scalar>
Scalar l2x_norm(const StepFunction<Scalar>& f, const NormedSpace<Scalar>& space) {
  if (f.dimension() != space.dimension())
    throw std::invalid_argument("step function dimension does not match space");
  Scalar sum = 0;
  for (Eigen::Index c = 0; c < f.num_cells(); ++c) {
    const Scalar nc = space.norm(f.cell(c));
    sum += nc * nc;
  }
  return std::sqrt(sum / static_cast<Scalar>(f.num_cells()));
}

template <typename Scalar = double>
struct SpectralNormResult {
  Scalar value;
  typename Operator<Scalar>::Vector witness;  // unit vector achieving value = |T w| / |w|
  int iterations;
  bool converged;
};

/// Largest singular value by power iteration on T^T T, with a seeded
/// deterministic start. The returned value is certified: it is recomputed
/// as |T w| for the returned unit witness w, so it is an achieved ratio.
template <typename Scalar>
SpectralNormResult<Scalar> spectral_norm(const Operator<Scalar>& T, std::uint64_t seed = kDefaultSeed) {
  if (!T.source().is_euclidean() || !T.target().is_euclidean())
    throw std::invalid_argument("spectral_norm requires Euclidean source and target");
  using Vector = typename Operator<Scalar>::Vector;
  using Matrix = typename Operator<Scalar>::Matrix;
  const Matrix B = T.matrix().transpose() * T.matrix();
  const Eigen::Index m = B.cols();

  Rng rng(Rng::derive(seed, 0x5BEC));
  Vector v(m);
  for (Eigen::Index i = 0; i < m; ++i) v(i) = static_cast<Scalar>(rng.normal());
  v.normalize();

  if (T.matrix().template lpNorm<Eigen::Infinity>() == Scalar(0))
    return {Scalar(0), v, 0, true};

  const int max_iterations = 200000;
  const Scalar rel_tol = static_cast<Scalar>(1e-10);
  Scalar lam_prev = Scalar(-1);
  bool converged = false;
  int it = 0;
  while (it < max_iterations) {
    ++it;
    Vector w = B * v;
    const Scalar lam = v.dot(w);
    const Scalar wn = w.norm();
    if (wn == Scalar(0)) break;  // v in the kernel of T
    v = w / wn;
    if (it > 1 && std::abs(lam - lam_prev) <= rel_tol * std::max(std::abs(lam), Scalar(1e-30))) {
      converged = true;
      break;
    }
    lam_prev = lam;
  }
  return {(T.matrix() * v).norm(), v, it, converged};
}

}  // namespace umd
