#pragma once

#include "errors.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <string>
#include <utility>

namespace ftspec {

using cplx = std::complex<double>;
using Index = Eigen::Index;

//! Default absolute tolerance of the structural predicates.
inline constexpr double kStructuralTol = 1e-9;

//! Uniform grid on [0, 1] with trapezoid quadrature weights
//! (w_1 = w_M = 1 / (2(M - 1)), all others 1 / (M - 1)). A single-point grid
//! sits at 0 with unit weight.
class Grid
{
public:
  explicit Grid(Index m)
    : m_(m)
  {
    if (m < 1)
      throw DimensionError("grid needs at least one point, got " +
                           std::to_string(m));
    points_.resize(m);
    weights_.resize(m);
    if (m == 1) {
      points_(0) = 0.0;
      weights_(0) = 1.0;
      return;
    }
    double h = 1.0 / static_cast<double>(m - 1);
    for (Index i = 0; i < m; ++i) {
      points_(i) = static_cast<double>(i) * h;
      weights_(i) = h;
    }
    points_(m - 1) = 1.0;
    weights_(0) = 0.5 * h;
    weights_(m - 1) = 0.5 * h;
  }

  Index m() const { return m_; }
  const Eigen::VectorXd& points() const { return points_; }
  const Eigen::VectorXd& weights() const { return weights_; }

  bool operator==(const Grid& other) const { return m_ == other.m_; }

private:
  Index m_;
  Eigen::VectorXd points_;
  Eigen::VectorXd weights_;
};

inline void
require_same_grid(const Grid& a, const Grid& b, const char* what)
{
  if (!(a == b))
    throw DimensionError(std::string(what) + ": grid mismatch (" +
                         std::to_string(a.m()) + " vs " +
                         std::to_string(b.m()) + " points)");
}

//! A complex-valued function on [0, 1] sampled on a grid. Real functions are
//! stored with zero imaginary part.
class GridFunction
{
public:
  GridFunction(Grid grid, Eigen::VectorXcd values)
    : grid_(std::move(grid))
    , values_(std::move(values))
  {
    if (values_.size() != grid_.m())
      throw DimensionError("grid function has " +
                           std::to_string(values_.size()) +
                           " values for a grid of " +
                           std::to_string(grid_.m()) + " points");
  }

  //! Any real or complex Eigen vector expression.
  template<class Derived>
  GridFunction(Grid grid, const Eigen::MatrixBase<Derived>& values)
    : GridFunction(std::move(grid),
                   Eigen::VectorXcd(values.template cast<cplx>()))
  {}

  static GridFunction zero(const Grid& grid)
  {
    return GridFunction(grid, Eigen::VectorXcd::Zero(grid.m()));
  }

  //! Samples fn(tau) on the grid; fn may return double or complex.
  template<class Fn>
  static GridFunction sample(const Grid& grid, Fn&& fn)
  {
    Eigen::VectorXcd v(grid.m());
    for (Index i = 0; i < grid.m(); ++i)
      v(i) = cplx(fn(grid.points()(i)));
    return GridFunction(grid, std::move(v));
  }

  const Grid& grid() const { return grid_; }
  const Eigen::VectorXcd& values() const { return values_; }
  cplx operator()(Index i) const { return values_(i); }

  GridFunction conj() const { return { grid_, values_.conjugate() }; }

  friend GridFunction operator+(const GridFunction& a, const GridFunction& b)
  {
    require_same_grid(a.grid_, b.grid_, "GridFunction +");
    return { a.grid_, a.values_ + b.values_ };
  }
  friend GridFunction operator-(const GridFunction& a, const GridFunction& b)
  {
    require_same_grid(a.grid_, b.grid_, "GridFunction -");
    return { a.grid_, a.values_ - b.values_ };
  }
  friend GridFunction operator*(cplx c, const GridFunction& f)
  {
    return { f.grid_, c * f.values_ };
  }

private:
  Grid grid_;
  Eigen::VectorXcd values_;
};

//! A stretch X_0, ..., X_{T-1} of real curves sharing one grid; row t holds
//! X_t sampled on the grid.
class FunctionalSeries
{
public:
  FunctionalSeries(Grid grid, Eigen::MatrixXd data)
    : grid_(std::move(grid))
    , data_(std::move(data))
  {
    if (data_.rows() < 1)
      throw DimensionError("functional series needs at least one curve");
    if (data_.cols() != grid_.m())
      throw DimensionError("series has " + std::to_string(data_.cols()) +
                           " columns for a grid of " +
                           std::to_string(grid_.m()) + " points");
  }

  const Grid& grid() const { return grid_; }
  const Eigen::MatrixXd& data() const { return data_; }
  Index t_len() const { return data_.rows(); }

  GridFunction curve(Index t) const
  {
    return GridFunction(grid_, Eigen::VectorXd(data_.row(t).transpose()));
  }

  friend FunctionalSeries operator*(double c, const FunctionalSeries& x)
  {
    return { x.grid_, c * x.data_ };
  }

private:
  Grid grid_;
  Eigen::MatrixXd data_;
};

//! A complex kernel k(tau, sigma) on [0, 1]^2, sampled as an M x M matrix
//! with k(i, j) = k(tau_i, sigma_j). It acts on functions by
//! right-integration against the grid weights.
class KernelOperator
{
public:
  KernelOperator(Grid grid, Eigen::MatrixXcd kernel)
    : grid_(std::move(grid))
    , kernel_(std::move(kernel))
  {
    if (kernel_.rows() != grid_.m() || kernel_.cols() != grid_.m())
      throw DimensionError("kernel is " + std::to_string(kernel_.rows()) +
                           "x" + std::to_string(kernel_.cols()) +
                           " for a grid of " + std::to_string(grid_.m()) +
                           " points");
    if (!kernel_.allFinite())
      throw NumericalError("kernel has non-finite entries");
  }

  template<class Derived>
  KernelOperator(Grid grid, const Eigen::MatrixBase<Derived>& kernel)
    : KernelOperator(std::move(grid),
                     Eigen::MatrixXcd(kernel.template cast<cplx>()))
  {}

  static KernelOperator zero(const Grid& grid)
  {
    return { grid, Eigen::MatrixXcd::Zero(grid.m(), grid.m()) };
  }

  const Grid& grid() const { return grid_; }
  const Eigen::MatrixXcd& kernel() const { return kernel_; }
  cplx operator()(Index i, Index j) const { return kernel_(i, j); }

  //! Elementwise complex conjugate (not the adjoint).
  KernelOperator conj() const { return { grid_, kernel_.conjugate() }; }
  KernelOperator adjoint() const { return { grid_, kernel_.adjoint() }; }

  friend KernelOperator operator+(const KernelOperator& a,
                                  const KernelOperator& b)
  {
    require_same_grid(a.grid_, b.grid_, "KernelOperator +");
    return { a.grid_, a.kernel_ + b.kernel_ };
  }
  friend KernelOperator operator-(const KernelOperator& a,
                                  const KernelOperator& b)
  {
    require_same_grid(a.grid_, b.grid_, "KernelOperator -");
    return { a.grid_, a.kernel_ - b.kernel_ };
  }
  friend KernelOperator operator*(cplx c, const KernelOperator& k)
  {
    return { k.grid_, c * k.kernel_ };
  }

private:
  Grid grid_;
  Eigen::MatrixXcd kernel_;
};

//! <f, g> = sum_i f_i conj(g_i) w_i.
inline cplx
inner_product(const GridFunction& f, const GridFunction& g)
{
  require_same_grid(f.grid(), g.grid(), "inner_product");
  const auto& w = f.grid().weights();
  cplx acc = 0.0;
  for (Index i = 0; i < w.size(); ++i)
    acc += f(i) * std::conj(g(i)) * w(i);
  return acc;
}

inline double
norm(const GridFunction& f)
{
  return std::sqrt(
    (f.values().cwiseAbs2().array() * f.grid().weights().array()).sum());
}

//! Hilbert-Schmidt norm sqrt(sum_ij |k_ij|^2 w_i w_j).
inline double
hs_norm(const KernelOperator& k)
{
  const auto& w = k.grid().weights();
  Eigen::MatrixXd weighted =
    k.kernel().cwiseAbs2().array() * (w * w.transpose()).array();
  return std::sqrt(weighted.sum());
}

inline double
hs_distance(const KernelOperator& a, const KernelOperator& b)
{
  return hs_norm(a - b);
}

//! (K h)(tau_i) = sum_j k_ij h_j w_j.
inline GridFunction
apply_operator(const KernelOperator& k, const GridFunction& h)
{
  require_same_grid(k.grid(), h.grid(), "apply_operator");
  Eigen::VectorXcd weighted =
    h.values().cwiseProduct(k.grid().weights().cast<cplx>());
  return { k.grid(), k.kernel() * weighted };
}

//! k_ij = f_i conj(g_j).
inline KernelOperator
tensor(const GridFunction& f, const GridFunction& g)
{
  require_same_grid(f.grid(), g.grid(), "tensor");
  return { f.grid(), f.values() * g.values().adjoint() };
}

inline bool
is_hermitian(const KernelOperator& k, double tol = kStructuralTol)
{
  return (k.kernel() - k.kernel().adjoint()).cwiseAbs().maxCoeff() <= tol;
}

//! Smallest eigenvalue of D^{1/2} H D^{1/2}, where H is the Hermitian part
//! of the kernel matrix and D = diag(w). This is the spectrum of the
//! discretized operator, not of the raw matrix.
inline double
min_operator_eigenvalue(const KernelOperator& k)
{
  Eigen::VectorXd sqrt_w = k.grid().weights().cwiseSqrt();
  Eigen::MatrixXcd herm = 0.5 * (k.kernel() + k.kernel().adjoint());
  Eigen::MatrixXcd similar =
    sqrt_w.cast<cplx>().asDiagonal() * herm * sqrt_w.cast<cplx>().asDiagonal();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(
    similar, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

inline bool
is_psd(const KernelOperator& k, double tol = kStructuralTol)
{
  return min_operator_eigenvalue(k) >= -tol;
}

} // namespace ftspec
