#pragma once

#include "bench.hpp"
#include "numcore.hpp"
#include "rng.hpp"
#include "simulate.hpp"
#include "spectral.hpp"

#include <cmath>
#include <cstdint>
#include <string>

namespace ftspec {

//! Discrete noisy observation design: M equispaced observation points with
//! additive N(0, sigma^2) errors.
struct SamplingScheme
{
  Index m_obs{ 2 };
  double sigma{ 0.0 };
  std::uint64_t seed{ 0 };

  void validate() const
  {
    if (m_obs < 2)
      throw ConfigError("m_obs must be >= 2");
    if (!(sigma >= 0.0) || !std::isfinite(sigma))
      throw ConfigError("sigma must be finite and >= 0");
  }
};

//! Noise level sigma(M) = M^{-1/2}.
inline double
default_noise_level(Index m_obs)
{
  return 1.0 / std::sqrt(static_cast<double>(m_obs));
}

//! Observation count paired with T: ceil(T^{2/5}).
inline Index
default_observation_count(Index t_len)
{
  // Guard against pow rounding just above an exact integer power.
  return static_cast<Index>(
    std::ceil(std::pow(static_cast<double>(t_len), 0.4) - 1e-9));
}

//! Observes each curve at M equispaced grid points, adds noise and extends
//! the observations back to the full grid as a step function. The source
//! grid is cut into M blocks of grid.m / M consecutive points; each block
//! takes the noisy value at its left end, so block j covers
//! [tau_j, tau_{j+1}) and the last block runs up to 1. M must divide the
//! number of grid points.
inline FunctionalSeries
observe(const FunctionalSeries& x, const SamplingScheme& scheme)
{
  scheme.validate();
  const Index m = x.grid().m();
  if (scheme.m_obs > m)
    throw ResolutionError("cannot observe " + std::to_string(scheme.m_obs) +
                          " points on a grid of " + std::to_string(m));
  if (m % scheme.m_obs != 0)
    throw ResolutionError("observation count " + std::to_string(scheme.m_obs) +
                          " does not divide the grid size " + std::to_string(m));
  const Index block = m / scheme.m_obs;
  Eigen::MatrixXd out(x.t_len(), m);
  for (Index t = 0; t < x.t_len(); ++t) {
    CounterRng rng(scheme.seed, static_cast<std::uint64_t>(t));
    for (Index j = 0; j < scheme.m_obs; ++j) {
      double y = x.data()(t, j * block);
      if (scheme.sigma > 0.0)
        y += scheme.sigma * rng.normal();
      out.row(t).segment(j * block, block).setConstant(y);
    }
  }
  return { x.grid(), std::move(out) };
}

//! Monte Carlo mean, over `reps` replications, of the gamma-grid integrated
//! squared HS distance between the estimator applied to the noisy step
//! proxies and the estimator applied to the clean curves. The estimator's
//! frequencies are replaced by the gamma grid.
inline double
robustness_gap(const LinearProcessSpec& spec,
               Index t_len,
               const SamplingScheme& scheme,
               const EstimatorConfig& cfg,
               std::size_t reps,
               std::size_t threads = 1)
{
  scheme.validate();
  if (reps < 1)
    throw ConfigError("robustness gap needs at least one replication");
  EstimatorConfig on_gamma = cfg;
  on_gamma.frequencies = gamma_frequencies();
  on_gamma.validate();

  std::vector<double> gaps(reps);
  parallel_for(reps, threads, [&](std::size_t r) {
    auto x = simulate_process(spec.with_seed(derive_seed(spec.seed(), r)), t_len);
    SamplingScheme local = scheme;
    local.seed = derive_seed(scheme.seed, r);
    auto y = observe(x, local);
    gaps[r] = ise(estimate_sdo(y, on_gamma), estimate_sdo(x, on_gamma));
  });
  return stats::mean(gaps);
}

} // namespace ftspec
