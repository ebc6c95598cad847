#pragma once

#include "numcore.hpp"
#include "parallel.hpp"

#include <cmath>
#include <numbers>
#include <optional>
#include <unsupported/Eigen/FFT>
#include <vector>

namespace ftspec {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

//! Reduces an angle to (-pi, pi].
inline double
wrap_angle(double omega)
{
  double r = std::remainder(omega, kTwoPi);
  if (r <= -std::numbers::pi)
    r += kTwoPi;
  return r;
}

//! Frequency in radians per time step, kept in (-pi, pi]. Fourier
//! frequencies 2 pi s / T remember their index s, normalized into
//! (-T/2, T/2].
struct Frequency
{
  double omega{ 0.0 };
  std::optional<long> fourier_index;

  static Frequency at(double omega) { return { wrap_angle(omega), {} }; }

  static Frequency fourier(long s, long t_len)
  {
    if (t_len < 1)
      throw RangeError("Fourier frequency needs T >= 1");
    long r = ((s % t_len) + t_len) % t_len;
    if (2 * r > t_len)
      r -= t_len;
    return { kTwoPi * static_cast<double>(r) / static_cast<double>(t_len),
             r };
  }
};

//! fDFT of a series on the whole Fourier grid: row s holds the transform at
//! 2 pi s / T, s = 0..T-1.
struct FdftSet
{
  Grid grid;
  Index t_len;
  Eigen::MatrixXcd values;

  GridFunction row(Index s) const
  {
    return { grid, Eigen::VectorXcd(values.row(s).transpose()) };
  }
};

//! (2 pi T)^{-1/2} sum_t X_t exp(-i omega t), by direct summation.
inline GridFunction
fdft_at(const FunctionalSeries& x, double omega)
{
  const double w = wrap_angle(omega);
  const Index t_len = x.t_len();
  Eigen::VectorXcd phases(t_len);
  for (Index t = 0; t < t_len; ++t)
    phases(t) = std::polar(1.0, -w * static_cast<double>(t));
  Eigen::VectorXcd v = x.data().cast<cplx>().transpose() * phases;
  v /= std::sqrt(kTwoPi * static_cast<double>(t_len));
  return { x.grid(), std::move(v) };
}

inline GridFunction
fdft_at(const FunctionalSeries& x, const Frequency& omega)
{
  return fdft_at(x, omega.omega);
}

//! fDFT at every Fourier frequency, one length-T FFT per grid point.
inline FdftSet
fdft_all(const FunctionalSeries& x, std::size_t threads = 1)
{
  const Index t_len = x.t_len();
  const Index m = x.grid().m();
  const double scale = 1.0 / std::sqrt(kTwoPi * static_cast<double>(t_len));
  Eigen::MatrixXcd out(t_len, m);

  if (t_len == 1) {
    out.row(0) = scale * x.data().row(0).cast<cplx>();
    return { x.grid(), t_len, std::move(out) };
  }

  parallel_for(static_cast<std::size_t>(m), threads, [&](std::size_t j) {
    Eigen::FFT<double> fft;
    std::vector<cplx> in(static_cast<std::size_t>(t_len));
    std::vector<cplx> spec;
    for (Index t = 0; t < t_len; ++t)
      in[static_cast<std::size_t>(t)] = x.data()(t, static_cast<Index>(j));
    fft.fwd(spec, in);
    for (Index s = 0; s < t_len; ++s)
      out(s, static_cast<Index>(j)) = scale * spec[static_cast<std::size_t>(s)];
  });
  return { x.grid(), t_len, std::move(out) };
}

//! Sample mean curve (1/T) sum_t X_t.
inline GridFunction
mean_function(const FunctionalSeries& x)
{
  Eigen::VectorXd mean = x.data().colwise().mean().transpose();
  return { x.grid(), mean };
}

} // namespace ftspec
