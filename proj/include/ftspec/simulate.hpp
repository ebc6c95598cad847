#pragma once

#include "fdft.hpp"
#include "numcore.hpp"
#include "rng.hpp"

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

namespace ftspec {

//! Sine family e_k(tau) = sqrt(2) sin((k - 1/2) pi tau), k >= 1. Used both
//! as the Karhunen-Loeve basis of the innovations and as the image basis
//! psi_m of the coefficient operators.
inline double
sine_basis(Index k, double tau)
{
  return std::numbers::sqrt2 *
         std::sin((static_cast<double>(k) - 0.5) * std::numbers::pi * tau);
}

//! Rows 1..n of the sine family sampled on the grid (n x M).
inline Eigen::MatrixXd
sine_basis_matrix(Index n, const Grid& grid)
{
  Eigen::MatrixXd basis(n, grid.m());
  for (Index k = 0; k < n; ++k)
    for (Index i = 0; i < grid.m(); ++i)
      basis(k, i) = sine_basis(k + 1, grid.points()(i));
  return basis;
}

inline GridFunction
sine_function(Index k, const Grid& grid)
{
  return GridFunction::sample(grid, [k](double tau) { return sine_basis(k, tau); });
}

//! Truncated Karhunen-Loeve model eps_t = sum_k xi_{k,t} sqrt(lambda_k) e_k.
struct InnovationModel
{
  enum class Kind
  {
    wiener_kl,    // lambda_k = 1 / ((k - 1/2)^2 pi^2): Brownian motion
    white_noise_kl // lambda_k = 1
  };

  Kind kind{ Kind::wiener_kl };
  Index k_trunc{ 1000 };

  double eigenvalue(Index k) const
  {
    if (kind == Kind::white_noise_kl)
      return 1.0;
    const double a = (static_cast<double>(k) - 0.5) * std::numbers::pi;
    return 1.0 / (a * a);
  }

  Eigen::VectorXd eigenvalues() const
  {
    Eigen::VectorXd lambda(k_trunc);
    for (Index k = 0; k < k_trunc; ++k)
      lambda(k) = eigenvalue(k + 1);
    return lambda;
  }

  std::string name() const
  {
    return kind == Kind::wiener_kl ? "wiener_kl" : "white_noise_kl";
  }

  static Kind kind_from_name(const std::string& name)
  {
    if (name == "wiener_kl")
      return Kind::wiener_kl;
    if (name == "white_noise_kl")
      return Kind::white_noise_kl;
    throw ConfigError("unknown innovation kind '" + name + "'");
  }
};

//! Covariance kernel sum_k lambda_k e_k(tau) e_k(sigma) of the truncated
//! innovations.
inline KernelOperator
innovation_kernel(const InnovationModel& model, const Grid& grid)
{
  Eigen::MatrixXd basis = sine_basis_matrix(model.k_trunc, grid);
  Eigen::MatrixXd kern =
    basis.transpose() * model.eigenvalues().asDiagonal() * basis;
  return { grid, kern };
}

//! Random MA coefficient draw: q + 1 matrices of shape out_dim x K whose
//! row j (1-based) has i.i.d. N(0, j^{-2 alpha}) entries.
struct CoefficientSpec
{
  Index q{ 10 };
  Index out_dim{ 50 };
  double alpha{ 2.0 };
  std::uint64_t seed{ 0 };

  void validate() const
  {
    if (q < 0)
      throw ConfigError("MA order q must be >= 0");
    if (out_dim < 1)
      throw ConfigError("out_dim must be >= 1");
    if (!(alpha >= 0.0))
      throw ConfigError("alpha must be >= 0");
  }
};

//! Matrix s is drawn from its own substream (seed, s), row-major.
inline std::vector<Eigen::MatrixXd>
make_coefficients(const CoefficientSpec& spec, Index k_trunc)
{
  spec.validate();
  if (k_trunc < 1)
    throw ConfigError("truncation level K must be >= 1");
  std::vector<Eigen::MatrixXd> coeffs;
  coeffs.reserve(static_cast<std::size_t>(spec.q + 1));
  for (Index s = 0; s <= spec.q; ++s) {
    CounterRng rng(spec.seed, static_cast<std::uint64_t>(s));
    Eigen::MatrixXd a(spec.out_dim, k_trunc);
    for (Index j = 0; j < spec.out_dim; ++j) {
      const double sd = std::pow(static_cast<double>(j + 1), -spec.alpha);
      for (Index k = 0; k < k_trunc; ++k)
        a(j, k) = sd * rng.normal();
    }
    coeffs.push_back(std::move(a));
  }
  return coeffs;
}

//! X_t = sum_{s=0}^{q} A_s eps_{t-s}, with A_s given in the psi_m (x) e_k
//! basis and evaluated on `grid`. `seed` drives the innovations.
class LinearProcessSpec
{
public:
  LinearProcessSpec(InnovationModel innovation,
                    std::vector<Eigen::MatrixXd> coeffs,
                    Grid grid,
                    std::uint64_t seed)
    : innovation_(innovation)
    , coeffs_(std::move(coeffs))
    , grid_(std::move(grid))
    , seed_(seed)
  {
    if (innovation_.k_trunc < 1)
      throw ConfigError("truncation level K must be >= 1");
    if (coeffs_.empty())
      throw ConfigError("need at least one coefficient operator");
    const Index out_dim = coeffs_.front().rows();
    if (out_dim < 1)
      throw ConfigError("coefficient operators need at least one row");
    for (const auto& a : coeffs_)
      if (a.rows() != out_dim || a.cols() != innovation_.k_trunc)
        throw DimensionError("coefficient operator is " +
                             std::to_string(a.rows()) + "x" +
                             std::to_string(a.cols()) + ", expected " +
                             std::to_string(out_dim) + "x" +
                             std::to_string(innovation_.k_trunc));
    psi_ = sine_basis_matrix(out_dim, grid_);
    Eigen::MatrixXd gram =
      psi_ * grid_.weights().asDiagonal() * psi_.transpose();
    double err = (gram - Eigen::MatrixXd::Identity(out_dim, out_dim))
                   .cwiseAbs()
                   .maxCoeff();
    if (err > 1e-4)
      throw ConfigError("psi basis of dimension " + std::to_string(out_dim) +
                        " is not orthonormal on a grid of " +
                        std::to_string(grid_.m()) + " points");
    lambda_ = innovation_.eigenvalues();
  }

  const InnovationModel& innovation() const { return innovation_; }
  const std::vector<Eigen::MatrixXd>& coeffs() const { return coeffs_; }
  const Grid& grid() const { return grid_; }
  std::uint64_t seed() const { return seed_; }
  Index q() const { return static_cast<Index>(coeffs_.size()) - 1; }
  Index out_dim() const { return coeffs_.front().rows(); }
  Index k_trunc() const { return innovation_.k_trunc; }
  //! psi_m sampled on the grid, out_dim x M.
  const Eigen::MatrixXd& psi() const { return psi_; }
  const Eigen::VectorXd& lambda() const { return lambda_; }

  LinearProcessSpec with_seed(std::uint64_t seed) const
  {
    LinearProcessSpec copy = *this;
    copy.seed_ = seed;
    return copy;
  }

  //! Maps an out_dim x out_dim coefficient-space matrix to its kernel.
  KernelOperator to_kernel(const Eigen::MatrixXcd& coef) const
  {
    Eigen::MatrixXcd psi_c = psi_.cast<cplx>();
    return { grid_, Eigen::MatrixXcd(psi_c.transpose() * coef * psi_c) };
  }

private:
  InnovationModel innovation_;
  std::vector<Eigen::MatrixXd> coeffs_;
  Grid grid_;
  std::uint64_t seed_;
  Eigen::MatrixXd psi_;
  Eigen::VectorXd lambda_;
};

//! Scaled innovation coefficients sqrt(lambda_k) xi_{k,t} for t in
//! [first, first + count). Time t reads substream t of the process seed, so
//! any window of the infinite path can be reproduced independently.
inline Eigen::MatrixXd
innovation_coefficients(const LinearProcessSpec& spec, long first, Index count)
{
  Eigen::MatrixXd eps(count, spec.k_trunc());
  Eigen::VectorXd sqrt_lambda = spec.lambda().cwiseSqrt();
  for (Index r = 0; r < count; ++r) {
    const long t = first + static_cast<long>(r);
    CounterRng rng(spec.seed(), static_cast<std::uint64_t>(static_cast<std::int64_t>(t)));
    for (Index k = 0; k < spec.k_trunc(); ++k)
      eps(r, k) = sqrt_lambda(k) * rng.normal();
  }
  return eps;
}

//! Simulates X_start, ..., X_{start+T-1} on the grid. The q presamples
//! before `start` are drawn from the same path, so every window is an
//! exact draw from the stationary law.
inline FunctionalSeries
simulate_process(const LinearProcessSpec& spec, Index t_len, long start = 0)
{
  if (t_len < 1)
    throw ConfigError("simulation length must be >= 1");
  const Index q = spec.q();
  Eigen::MatrixXd eps =
    innovation_coefficients(spec, start - static_cast<long>(q), t_len + q);
  Eigen::MatrixXd coef = Eigen::MatrixXd::Zero(t_len, spec.out_dim());
  for (Index s = 0; s <= q; ++s)
    coef.noalias() +=
      eps.middleRows(q - s, t_len) * spec.coeffs()[static_cast<std::size_t>(s)].transpose();
  return { spec.grid(), coef * spec.psi() };
}

//! Coefficient-space autocovariance sum_s A_{s+t} C A_s^T.
inline Eigen::MatrixXd
coefficient_autocov(const LinearProcessSpec& spec, long lag)
{
  if (lag < 0)
    return coefficient_autocov(spec, -lag).transpose();
  const Index d = spec.out_dim();
  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(d, d);
  const auto& a = spec.coeffs();
  for (long s = 0; s + lag <= spec.q(); ++s)
    acc.noalias() += a[static_cast<std::size_t>(s + lag)] *
                     spec.lambda().asDiagonal() *
                     a[static_cast<std::size_t>(s)].transpose();
  return acc;
}

inline KernelOperator
true_autocov(const LinearProcessSpec& spec, long lag)
{
  if (std::labs(lag) > spec.q())
    return KernelOperator::zero(spec.grid());
  return spec.to_kernel(coefficient_autocov(spec, lag).cast<cplx>());
}

//! Spectral density kernel B(w) C B(w)^* / (2 pi) with the transfer
//! operator B(w) = sum_s A_s e^{-i w s}.
inline KernelOperator
true_sdo(const LinearProcessSpec& spec, double omega)
{
  Eigen::MatrixXcd transfer =
    Eigen::MatrixXcd::Zero(spec.out_dim(), spec.k_trunc());
  for (Index s = 0; s <= spec.q(); ++s)
    transfer += std::polar(1.0, -omega * static_cast<double>(s)) *
                spec.coeffs()[static_cast<std::size_t>(s)].cast<cplx>();
  transfer = transfer * spec.lambda().cwiseSqrt().cast<cplx>().asDiagonal();
  Eigen::MatrixXcd density = transfer * transfer.adjoint() / kTwoPi;
  density = 0.5 * (density + density.adjoint()).eval();
  return spec.to_kernel(density);
}

//! Long-run covariance sum_t R_t = 2 pi f_0.
inline KernelOperator
true_long_run_cov(const LinearProcessSpec& spec)
{
  Eigen::MatrixXd acc = coefficient_autocov(spec, 0);
  for (long t = 1; t <= spec.q(); ++t) {
    Eigen::MatrixXd r = coefficient_autocov(spec, t);
    acc += r + r.transpose();
  }
  return spec.to_kernel(acc.cast<cplx>());
}

} // namespace ftspec
