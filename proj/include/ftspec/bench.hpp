#pragma once

#include "fdft.hpp"
#include "numcore.hpp"
#include "parallel.hpp"
#include "rng.hpp"
#include "simulate.hpp"
#include "spectral.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

namespace ftspec {

//! The frequency grid {pi j / 10, j = 0..9} used to integrate squared
//! errors over [0, pi].
inline std::vector<Frequency>
gamma_frequencies()
{
  std::vector<Frequency> out;
  for (int j = 0; j < 10; ++j)
    out.push_back(Frequency::at(std::numbers::pi * j / 10.0));
  return out;
}

//! Trapezoid weights on the grid: pi/10 everywhere, half at j = 0.
inline std::vector<double>
gamma_weights()
{
  std::vector<double> w(10, std::numbers::pi / 10.0);
  w[0] *= 0.5;
  return w;
}

//! Integrated squared error 2 sum_j w_j |||est_j - truth_j|||_2^2 over the
//! gamma grid.
inline double
ise(const SpectralEstimate& est, const std::vector<KernelOperator>& truth)
{
  const auto gamma = gamma_frequencies();
  if (est.size() != gamma.size() || truth.size() != gamma.size())
    throw DimensionError("ise needs estimate and truth on the 10-point gamma grid");
  for (std::size_t j = 0; j < gamma.size(); ++j)
    if (std::abs(est.frequencies[j].omega - gamma[j].omega) > 1e-12)
      throw DimensionError("ise: estimate frequency " + std::to_string(j) +
                           " is not on the gamma grid");
  const auto w = gamma_weights();
  double acc = 0.0;
  for (std::size_t j = 0; j < gamma.size(); ++j) {
    const double d = hs_distance(est.operators[j], truth[j]);
    acc += w[j] * d * d;
  }
  return 2.0 * acc;
}

inline double
ise(const SpectralEstimate& est, const SpectralEstimate& truth)
{
  return ise(est, truth.operators);
}

inline std::vector<KernelOperator>
true_sdo_on_gamma(const LinearProcessSpec& spec)
{
  std::vector<KernelOperator> out;
  for (const auto& f : gamma_frequencies())
    out.push_back(true_sdo(spec, f.omega));
  return out;
}

namespace stats {

inline double
median(std::vector<double> v)
{
  if (v.empty())
    return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

inline double
mean(const std::vector<double>& v)
{
  double acc = 0.0;
  for (double x : v)
    acc += x;
  return acc / static_cast<double>(v.size());
}

//! Unbiased sample variance.
inline double
variance(const std::vector<double>& v)
{
  const double m = mean(v);
  double acc = 0.0;
  for (double x : v)
    acc += (x - m) * (x - m);
  return acc / static_cast<double>(v.size() - 1);
}

//! Moment-based skewness m3 / m2^{3/2}.
inline double
skewness(const std::vector<double>& v)
{
  const double m = mean(v);
  double m2 = 0.0, m3 = 0.0;
  for (double x : v) {
    const double d = x - m;
    m2 += d * d;
    m3 += d * d * d;
  }
  const double n = static_cast<double>(v.size());
  m2 /= n;
  m3 /= n;
  return m3 / std::pow(m2, 1.5);
}

//! Moment-based excess kurtosis m4 / m2^2 - 3.
inline double
excess_kurtosis(const std::vector<double>& v)
{
  const double m = mean(v);
  double m2 = 0.0, m4 = 0.0;
  for (double x : v) {
    const double d = x - m;
    m2 += d * d;
    m4 += d * d * d * d;
  }
  const double n = static_cast<double>(v.size());
  m2 /= n;
  m4 /= n;
  return m4 / (m2 * m2) - 3.0;
}

inline double
correlation(const std::vector<double>& a, const std::vector<double>& b)
{
  const double ma = mean(a), mb = mean(b);
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

//! Modulus of the centered complex correlation E[(a - Ea) conj(b - Eb)].
inline double
complex_correlation(const std::vector<cplx>& a, const std::vector<cplx>& b)
{
  cplx ma = 0.0, mb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= static_cast<double>(a.size());
  mb /= static_cast<double>(b.size());
  cplx sab = 0.0;
  double saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * std::conj(b[i] - mb);
    saa += std::norm(a[i] - ma);
    sbb += std::norm(b[i] - mb);
  }
  return std::abs(sab) / std::sqrt(saa * sbb);
}

struct LineFit
{
  double slope;
  double intercept;
};

//! Ordinary least squares of y on x.
inline LineFit
least_squares_line(const std::vector<double>& x, const std::vector<double>& y)
{
  if (x.size() < 2)
    return { std::numeric_limits<double>::quiet_NaN(),
             std::numeric_limits<double>::quiet_NaN() };
  const double mx = mean(x), my = mean(y);
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  const double slope = sxy / sxx;
  return { slope, my - slope * mx };
}

} // namespace stats

//! Seed of replication `rep` in a run keyed by (master seed, tag).
inline std::uint64_t
replication_seed(std::uint64_t master_seed, std::uint64_t tag, std::uint64_t rep)
{
  return derive_seed(derive_seed(master_seed, tag), rep);
}

//! Bandwidth schedule B_T = scale * T^exponent, capped at pi.
struct BandwidthRule
{
  double scale{ 1.0 };
  double exponent{ -0.2 };

  double operator()(long t_len) const
  {
    return std::min(scale * std::pow(static_cast<double>(t_len), exponent),
                    std::numbers::pi);
  }
};

struct ImseConfig
{
  std::vector<Index> t_list;
  std::size_t reps{ 50 };
  BandwidthRule bandwidth;
  WeightFunction weight{ WeightFunction::epanechnikov() };
  std::uint64_t master_seed{ 0 };
  //! When set, operators are redrawn for every replication from this spec
  //! (its seed is combined with the replication seed); otherwise the
  //! operators of the process spec are shared by all replications.
  std::optional<CoefficientSpec> redraw_coefficients;
};

struct ImseReport
{
  ImseConfig config;
  std::vector<Index> t_list;
  std::vector<double> bandwidths;
  //! ise[i][r]: replication r at t_list[i].
  std::vector<std::vector<double>> ise;
  std::vector<double> medians;
  //! Least-squares fit of log2(median) on log2(T).
  double slope{ 0.0 };
  double intercept{ 0.0 };
};

//! Monte Carlo IMSE sweep: for each T, `reps` independent stretches are
//! smoothed with B_T from the rule and scored on the gamma grid against the
//! exact spectral density.
inline ImseReport
imse_experiment(const LinearProcessSpec& spec,
                const ImseConfig& cfg,
                std::size_t threads = 1)
{
  if (cfg.t_list.empty())
    throw ConfigError("imse experiment needs at least one T");
  if (cfg.reps < 2)
    throw ConfigError("imse experiment needs at least two replications");

  ImseReport report;
  report.config = cfg;
  report.t_list = cfg.t_list;
  const auto shared_truth = true_sdo_on_gamma(spec);

  for (Index t_len : cfg.t_list) {
    if (t_len < 2)
      throw ConfigError("imse experiment needs T >= 2");
    EstimatorConfig est_cfg{ cfg.bandwidth(static_cast<long>(t_len)),
                             cfg.weight,
                             gamma_frequencies() };
    est_cfg.validate();
    std::vector<double> values(cfg.reps);
    parallel_for(cfg.reps, threads, [&](std::size_t r) {
      const auto seed = replication_seed(cfg.master_seed,
                                         static_cast<std::uint64_t>(t_len), r);
      if (cfg.redraw_coefficients) {
        CoefficientSpec cs = *cfg.redraw_coefficients;
        cs.seed = derive_seed(cs.seed, seed);
        LinearProcessSpec local(spec.innovation(),
                                make_coefficients(cs, spec.k_trunc()),
                                spec.grid(),
                                seed);
        auto x = simulate_process(local, t_len);
        values[r] = ise(estimate_sdo(x, est_cfg), true_sdo_on_gamma(local));
      } else {
        auto x = simulate_process(spec.with_seed(seed), t_len);
        values[r] = ise(estimate_sdo(x, est_cfg), shared_truth);
      }
    });
    report.bandwidths.push_back(est_cfg.bandwidth);
    report.medians.push_back(stats::median(values));
    report.ise.push_back(std::move(values));
  }

  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < report.t_list.size(); ++i) {
    lx.push_back(std::log2(static_cast<double>(report.t_list[i])));
    ly.push_back(std::log2(report.medians[i]));
  }
  auto fit = stats::least_squares_line(lx, ly);
  report.slope = fit.slope;
  report.intercept = fit.intercept;
  return report;
}

namespace detail {

inline void
require_nonzero_fourier(long s, long t_len)
{
  if (t_len < 1 || ((s % t_len) + t_len) % t_len == 0)
    throw PreconditionError("frequency index " + std::to_string(s) +
                            " is congruent to 0 mod T = " +
                            std::to_string(t_len));
}

// Rows: fDFT at 2 pi s / T for each replication.
inline Eigen::MatrixXcd
replicated_fdft(const LinearProcessSpec& spec,
                Index t_len,
                double omega,
                std::size_t reps,
                std::uint64_t master_seed,
                std::uint64_t tag,
                std::size_t threads)
{
  Eigen::MatrixXcd rows(static_cast<Index>(reps), spec.grid().m());
  parallel_for(reps, threads, [&](std::size_t r) {
    auto x = simulate_process(
      spec.with_seed(replication_seed(master_seed, tag, r)), t_len);
    rows.row(static_cast<Index>(r)) = fdft_at(x, omega).values().transpose();
  });
  return rows;
}

} // namespace detail

//! Monte Carlo mean of the periodogram at 2 pi s / T over `reps` stretches.
//! Replication r uses the same seed for every T.
inline KernelOperator
mean_periodogram(const LinearProcessSpec& spec,
                 Index t_len,
                 long s_index,
                 std::size_t reps,
                 std::uint64_t master_seed,
                 std::size_t threads = 1)
{
  detail::require_nonzero_fourier(s_index, static_cast<long>(t_len));
  if (reps < 1)
    throw ConfigError("need at least one replication");
  const double omega = kTwoPi * static_cast<double>(s_index) /
                       static_cast<double>(t_len);
  auto rows = detail::replicated_fdft(spec, t_len, omega, reps, master_seed,
                                      0x7065726fULL, threads);
  Eigen::MatrixXcd mean = rows.transpose() * rows.conjugate();
  mean /= static_cast<double>(reps);
  return { spec.grid(), std::move(mean) };
}

//! HS distance between the Monte Carlo mean periodogram at 2 pi s / T and
//! the true spectral density there, relative to the latter.
inline double
unbiasedness_check(const LinearProcessSpec& spec,
                   Index t_len,
                   long s_index,
                   std::size_t reps,
                   std::uint64_t master_seed,
                   std::size_t threads = 1)
{
  auto mean = mean_periodogram(spec, t_len, s_index, reps, master_seed, threads);
  const double omega = kTwoPi * static_cast<double>(s_index) /
                       static_cast<double>(t_len);
  auto truth = true_sdo(spec, omega);
  return hs_distance(mean, truth) / hs_norm(truth);
}

struct ProbeDiagnostics
{
  double skewness_re{ 0.0 };
  double skewness_im{ 0.0 };
  double excess_kurtosis_re{ 0.0 };
  double excess_kurtosis_im{ 0.0 };
  //! corr(Re, Im) of the projection at the first frequency.
  double re_im_correlation{ 0.0 };
  //! |complex correlation| between projections at the two frequencies.
  double cross_frequency_correlation{ 0.0 };
  //! Sample variances of Re and Im against <F psi, psi> / 2 each.
  double var_re{ 0.0 };
  double var_im{ 0.0 };
  double half_spectral_mass{ 0.0 };
};

struct GaussianityReport
{
  Index t_len{ 0 };
  long s_first{ 0 };
  long s_second{ 0 };
  std::size_t reps{ 0 };
  std::vector<ProbeDiagnostics> probes;
};

//! Marginal Gaussianity diagnostics for the projections <fDFT(w), psi> at
//! two nonzero Fourier frequencies 2 pi s1 / T and 2 pi s2 / T.
inline GaussianityReport
gaussianity_diag(const LinearProcessSpec& spec,
                 Index t_len,
                 long s_first,
                 long s_second,
                 const std::vector<GridFunction>& probes,
                 std::size_t reps,
                 std::uint64_t master_seed,
                 std::size_t threads = 1)
{
  detail::require_nonzero_fourier(s_first, static_cast<long>(t_len));
  detail::require_nonzero_fourier(s_second, static_cast<long>(t_len));
  if (reps < 3)
    throw ConfigError("gaussianity diagnostics need at least three replications");
  const double w1 = kTwoPi * static_cast<double>(s_first) / static_cast<double>(t_len);
  const double w2 = kTwoPi * static_cast<double>(s_second) / static_cast<double>(t_len);

  Eigen::MatrixXcd d1(static_cast<Index>(reps), spec.grid().m());
  Eigen::MatrixXcd d2(static_cast<Index>(reps), spec.grid().m());
  parallel_for(reps, threads, [&](std::size_t r) {
    auto x = simulate_process(
      spec.with_seed(replication_seed(master_seed, 0x67617573ULL, r)), t_len);
    d1.row(static_cast<Index>(r)) = fdft_at(x, w1).values().transpose();
    d2.row(static_cast<Index>(r)) = fdft_at(x, w2).values().transpose();
  });

  const auto truth = true_sdo(spec, w1);
  GaussianityReport report{ t_len, s_first, s_second, reps, {} };
  const Eigen::VectorXcd weights = spec.grid().weights().cast<cplx>();
  for (const auto& psi : probes) {
    require_same_grid(psi.grid(), spec.grid(), "gaussianity_diag");
    Eigen::VectorXcd kernel_probe = psi.values().conjugate().cwiseProduct(weights);
    Eigen::VectorXcd z1 = d1 * kernel_probe;
    Eigen::VectorXcd z2 = d2 * kernel_probe;
    std::vector<double> re, im;
    std::vector<cplx> c1, c2;
    for (Index r = 0; r < z1.size(); ++r) {
      re.push_back(z1(r).real());
      im.push_back(z1(r).imag());
      c1.push_back(z1(r));
      c2.push_back(z2(r));
    }
    ProbeDiagnostics diag;
    diag.skewness_re = stats::skewness(re);
    diag.skewness_im = stats::skewness(im);
    diag.excess_kurtosis_re = stats::excess_kurtosis(re);
    diag.excess_kurtosis_im = stats::excess_kurtosis(im);
    diag.re_im_correlation = stats::correlation(re, im);
    diag.cross_frequency_correlation = stats::complex_correlation(c1, c2);
    diag.var_re = stats::variance(re);
    diag.var_im = stats::variance(im);
    diag.half_spectral_mass =
      0.5 * inner_product(apply_operator(truth, psi), psi).real();
    report.probes.push_back(diag);
  }
  return report;
}

struct CltProbe
{
  double empirical_variance{ 0.0 };
  double limit_variance{ 0.0 };
  double ratio{ 0.0 };
};

struct CltReport
{
  Index t_len{ 0 };
  std::size_t reps{ 0 };
  std::vector<CltProbe> probes;
};

//! Compares var(sqrt(T) <mean - mu, psi>) across replications with
//! <(sum_t R_t) psi, psi>. The simulated processes are centered (mu = 0).
inline CltReport
mean_clt_diag(const LinearProcessSpec& spec,
              Index t_len,
              const std::vector<GridFunction>& probes,
              std::size_t reps,
              std::uint64_t master_seed,
              std::size_t threads = 1)
{
  if (reps < 2)
    throw ConfigError("mean CLT diagnostics need at least two replications");
  Eigen::MatrixXd means(static_cast<Index>(reps), spec.grid().m());
  parallel_for(reps, threads, [&](std::size_t r) {
    auto x = simulate_process(
      spec.with_seed(replication_seed(master_seed, 0x636c74ULL, r)), t_len);
    means.row(static_cast<Index>(r)) = x.data().colwise().mean();
  });

  const auto lrc = true_long_run_cov(spec);
  CltReport report{ t_len, reps, {} };
  const double root_t = std::sqrt(static_cast<double>(t_len));
  for (const auto& psi : probes) {
    require_same_grid(psi.grid(), spec.grid(), "mean_clt_diag");
    Eigen::VectorXd kernel_probe =
      psi.values().real().cwiseProduct(spec.grid().weights());
    Eigen::VectorXd z = root_t * (means * kernel_probe);
    std::vector<double> zs(z.data(), z.data() + z.size());
    CltProbe probe;
    probe.empirical_variance = stats::variance(zs);
    probe.limit_variance = inner_product(apply_operator(lrc, psi), psi).real();
    probe.ratio = probe.empirical_variance / probe.limit_variance;
    report.probes.push_back(probe);
  }
  return report;
}

} // namespace ftspec
