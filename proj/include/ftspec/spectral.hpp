#pragma once

#include "fdft.hpp"
#include "numcore.hpp"
#include "parallel.hpp"

#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

namespace ftspec {

//! Fejer kernel (1/T) (sin(T w / 2) / sin(w / 2))^2, equal to T at
//! multiples of 2 pi.
inline double
fejer(long t_len, double omega)
{
  if (t_len < 1)
    throw RangeError("fejer kernel needs T >= 1");
  const double w = wrap_angle(omega);
  const double denom = std::sin(0.5 * w);
  const double n = static_cast<double>(t_len);
  if (denom == 0.0)
    return n;
  const double ratio = std::sin(0.5 * n * w) / denom;
  return ratio * ratio / n;
}

//! Smoothing weight W: nonnegative, even, supported on [-1, 1], unit mass.
class WeightFunction
{
public:
  enum class Kind
  {
    epanechnikov,
    bartlett,
    custom
  };

  static WeightFunction epanechnikov() { return WeightFunction(Kind::epanechnikov); }
  static WeightFunction bartlett() { return WeightFunction(Kind::bartlett); }

  //! Tabulated weight: `table[i]` is W(i / (n - 1)) on [0, 1], linearly
  //! interpolated and mirrored to [-1, 0].
  static WeightFunction custom(std::vector<double> table)
  {
    if (table.size() < 2)
      throw ConfigError("custom weight table needs at least two values");
    for (double v : table)
      if (!(v >= 0.0) || !std::isfinite(v))
        throw ConfigError("custom weight table must be finite and >= 0");
    const double h = 1.0 / static_cast<double>(table.size() - 1);
    double half_mass = 0.0;
    for (std::size_t i = 0; i + 1 < table.size(); ++i)
      half_mass += 0.5 * h * (table[i] + table[i + 1]);
    if (std::abs(2.0 * half_mass - 1.0) > 1e-6)
      throw ConfigError("custom weight must integrate to 1, got " +
                        std::to_string(2.0 * half_mass));
    WeightFunction w(Kind::custom);
    w.table_ = std::move(table);
    return w;
  }

  static WeightFunction from_name(const std::string& name)
  {
    if (name == "epanechnikov")
      return epanechnikov();
    if (name == "bartlett")
      return bartlett();
    throw ConfigError("unknown weight function '" + name + "'");
  }

  Kind kind() const { return kind_; }
  const std::vector<double>& table() const { return table_; }

  std::string name() const
  {
    switch (kind_) {
      case Kind::epanechnikov:
        return "epanechnikov";
      case Kind::bartlett:
        return "bartlett";
      default:
        return "custom";
    }
  }

  double operator()(double x) const
  {
    const double a = std::abs(x);
    if (a >= 1.0)
      return 0.0;
    switch (kind_) {
      case Kind::epanechnikov:
        return 0.75 * (1.0 - a * a);
      case Kind::bartlett:
        return 1.0 - a;
      default: {
        const double pos = a * static_cast<double>(table_.size() - 1);
        const auto i = static_cast<std::size_t>(pos);
        const double frac = pos - static_cast<double>(i);
        return (1.0 - frac) * table_[i] + frac * table_[i + 1];
      }
    }
  }

private:
  explicit WeightFunction(Kind kind)
    : kind_(kind)
  {}

  Kind kind_;
  std::vector<double> table_;
};

//! B_T = T^{-1/5}.
inline double
default_bandwidth(long t_len)
{
  return std::pow(static_cast<double>(t_len), -0.2);
}

struct EstimatorConfig
{
  double bandwidth{ 0.0 };
  WeightFunction weight{ WeightFunction::epanechnikov() };
  std::vector<Frequency> frequencies;

  void validate() const
  {
    if (!(bandwidth > 0.0) || bandwidth > std::numbers::pi)
      throw ConfigError("bandwidth must lie in (0, pi], got " +
                        std::to_string(bandwidth));
    if (frequencies.empty())
      throw ConfigError("no frequencies requested");
  }
};

//! One kernel per requested frequency. `config` is empty for unsmoothed
//! tables (raw periodograms, analytic truths); `nonzero_terms[i]` counts the
//! periodogram ordinates that received positive weight.
struct SpectralEstimate
{
  Grid grid;
  Index t_len{ 0 };
  std::optional<EstimatorConfig> config;
  std::vector<Frequency> frequencies;
  std::vector<KernelOperator> operators;
  std::vector<Index> nonzero_terms;

  std::size_t size() const { return operators.size(); }
};

//! Rank-one kernel fDFT_w(tau) conj(fDFT_w(sigma)).
inline KernelOperator
periodogram(const FunctionalSeries& x, double omega)
{
  auto d = fdft_at(x, omega);
  return tensor(d, d);
}

inline KernelOperator
periodogram(const FunctionalSeries& x, const Frequency& omega)
{
  return periodogram(x, omega.omega);
}

//! 2 pi-periodization sum_j B^{-1} W((x + 2 pi j) / B). With B <= pi and
//! support [-1, 1], only j in {-1, 0, 1} can contribute after reducing x.
inline double
periodized_weight(const WeightFunction& w, double bandwidth, double x)
{
  if (!(bandwidth > 0.0) || bandwidth > std::numbers::pi)
    throw ConfigError("bandwidth must lie in (0, pi], got " +
                      std::to_string(bandwidth));
  const double r = std::remainder(x, kTwoPi);
  double acc = 0.0;
  for (int j = -1; j <= 1; ++j)
    acc += w((r + kTwoPi * j) / bandwidth);
  return acc / bandwidth;
}

namespace detail {

// (2 pi / T) sum_s c_s d_s^T conj(d_s) over the given Fourier rows.
inline KernelOperator
weighted_gram(const FdftSet& d,
              const std::vector<Index>& rows,
              const std::vector<double>& coef)
{
  const Index m = d.grid.m();
  if (rows.empty())
    return KernelOperator::zero(d.grid);
  Eigen::MatrixXcd scaled(static_cast<Index>(rows.size()), m);
  Eigen::MatrixXcd plain(static_cast<Index>(rows.size()), m);
  for (std::size_t k = 0; k < rows.size(); ++k) {
    plain.row(static_cast<Index>(k)) = d.values.row(rows[k]);
    scaled.row(static_cast<Index>(k)) = coef[k] * d.values.row(rows[k]);
  }
  Eigen::MatrixXcd kern = scaled.transpose() * plain.conjugate();
  kern *= kTwoPi / static_cast<double>(d.t_len);
  Eigen::MatrixXcd herm = 0.5 * (kern + kern.adjoint());
  return { d.grid, std::move(herm) };
}

} // namespace detail

//! Smoothed periodogram at each configured frequency from a precomputed
//! fDFT set; s = 0 is never used.
inline SpectralEstimate
smooth_periodogram(const FdftSet& d,
                   const EstimatorConfig& cfg,
                   std::size_t threads = 1)
{
  cfg.validate();
  if (d.t_len < 2)
    throw ConfigError("spectral estimation needs T >= 2");

  const std::size_t n_freq = cfg.frequencies.size();
  std::vector<std::optional<KernelOperator>> ops(n_freq);
  std::vector<Index> counts(n_freq, 0);
  const double t_len = static_cast<double>(d.t_len);

  parallel_for(n_freq, threads, [&](std::size_t f) {
    const double omega = cfg.frequencies[f].omega;
    std::vector<Index> rows;
    std::vector<double> coef;
    for (Index s = 1; s < d.t_len; ++s) {
      double w = periodized_weight(
        cfg.weight, cfg.bandwidth, omega - kTwoPi * static_cast<double>(s) / t_len);
      if (w > 0.0) {
        rows.push_back(s);
        coef.push_back(w);
      }
    }
    counts[f] = static_cast<Index>(rows.size());
    ops[f] = detail::weighted_gram(d, rows, coef);
  });

  SpectralEstimate est{ d.grid, d.t_len, cfg, cfg.frequencies, {}, counts };
  est.operators.reserve(n_freq);
  for (auto& op : ops)
    est.operators.push_back(std::move(*op));
  return est;
}

//! Weighted average of periodogram kernels over the nonzero Fourier
//! frequencies with the periodized weight at bandwidth cfg.bandwidth.
inline SpectralEstimate
estimate_sdo(const FunctionalSeries& x,
             const EstimatorConfig& cfg,
             std::size_t threads = 1)
{
  cfg.validate();
  if (x.t_len() < 2)
    throw ConfigError("spectral estimation needs T >= 2");
  return smooth_periodogram(fdft_all(x, threads), cfg, threads);
}

//! Unsmoothed periodogram at every Fourier frequency 2 pi s / T,
//! s = 0..T-1, in that order.
inline SpectralEstimate
periodogram_table(const FunctionalSeries& x, std::size_t threads = 1)
{
  const auto d = fdft_all(x, threads);
  SpectralEstimate est{ x.grid(), x.t_len(), std::nullopt, {}, {}, {} };
  for (Index s = 0; s < x.t_len(); ++s) {
    est.frequencies.push_back(Frequency::fourier(static_cast<long>(s),
                                                 static_cast<long>(x.t_len())));
    auto row = d.row(s);
    est.operators.push_back(tensor(row, row));
    est.nonzero_terms.push_back(1);
  }
  return est;
}

//! Trapezoid approximation of int_0^{2 pi} f_a e^{i t a} da. The estimate
//! must cover the uniform grid {2 pi k / N} (any order) with N >= 2|t| + 2.
inline KernelOperator
autocov_from_sdo(const SpectralEstimate& est, long lag)
{
  const std::size_t n = est.size();
  const std::size_t needed = 2 * static_cast<std::size_t>(std::labs(lag)) + 2;
  if (n < needed)
    throw ResolutionError("inversion at lag " + std::to_string(lag) +
                          " needs at least " + std::to_string(needed) +
                          " frequencies, got " + std::to_string(n));
  std::vector<bool> seen(n, false);
  for (const auto& f : est.frequencies) {
    double pos = f.omega * static_cast<double>(n) / kTwoPi;
    double k = std::round(pos);
    if (std::abs(pos - k) > 1e-9)
      throw ResolutionError("frequencies do not form a uniform grid on [0, 2 pi)");
    long idx = static_cast<long>(k);
    idx = ((idx % static_cast<long>(n)) + static_cast<long>(n)) % static_cast<long>(n);
    if (seen[static_cast<std::size_t>(idx)])
      throw ResolutionError("duplicate frequency on the inversion grid");
    seen[static_cast<std::size_t>(idx)] = true;
  }

  Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(est.grid.m(), est.grid.m());
  for (std::size_t i = 0; i < n; ++i) {
    const cplx phase =
      std::polar(1.0, static_cast<double>(lag) * est.frequencies[i].omega);
    acc += phase * est.operators[i].kernel();
  }
  acc *= kTwoPi / static_cast<double>(n);
  return { est.grid, std::move(acc) };
}

//! (1/T) sum_s (X_{s+t} - mean) (x) (X_s - mean) over 0 <= s, s + t < T.
inline KernelOperator
empirical_autocov(const FunctionalSeries& x, long lag)
{
  const Index t_len = x.t_len();
  if (std::labs(lag) >= t_len)
    throw RangeError("lag " + std::to_string(lag) + " outside (-T, T) for T = " +
                     std::to_string(t_len));
  Eigen::RowVectorXd mean = x.data().colwise().mean();
  Eigen::MatrixXd centered = x.data().rowwise() - mean;
  const Index n = t_len - std::labs(lag);
  Eigen::MatrixXd lead, trail;
  if (lag >= 0) {
    lead = centered.middleRows(lag, n);
    trail = centered.topRows(n);
  } else {
    lead = centered.topRows(n);
    trail = centered.middleRows(-lag, n);
  }
  Eigen::MatrixXd kern = lead.transpose() * trail / static_cast<double>(t_len);
  return { x.grid(), kern };
}

//! 2 pi times the smoothed estimate at frequency zero.
inline KernelOperator
long_run_cov(const FunctionalSeries& x,
             const EstimatorConfig& cfg,
             std::size_t threads = 1)
{
  EstimatorConfig at_zero = cfg;
  at_zero.frequencies = { Frequency::at(0.0) };
  auto est = estimate_sdo(x, at_zero, threads);
  return cplx(kTwoPi) * est.operators.front();
}

} // namespace ftspec
