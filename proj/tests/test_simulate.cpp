#include <ftspec/bench.hpp>
#include <ftspec/simulate.hpp>
#include <ftspec/spectral.hpp>

#include <gtest/gtest.h>
#include <numbers>
#include <random>

using namespace ftspec;

namespace {

double
row_variance(const Eigen::MatrixXd& a, Index row)
{
  Eigen::VectorXd v = a.row(row).transpose();
  return (v.array() - v.mean()).square().sum() / static_cast<double>(v.size() - 1);
}

LinearProcessSpec
small_ma(Index q, Index m = 41, std::uint64_t seed = 1)
{
  InnovationModel innov{ InnovationModel::Kind::wiener_kl, 20 };
  CoefficientSpec cs{ q, 8, 1.0, 99 };
  return { innov, make_coefficients(cs, 20), Grid(m), seed };
}

} // namespace

TEST(InnovationModel, Eigenvalues)
{
  InnovationModel w{ InnovationModel::Kind::wiener_kl, 3 };
  EXPECT_DOUBLE_EQ(w.eigenvalue(1), 4.0 / (std::numbers::pi * std::numbers::pi));
  EXPECT_DOUBLE_EQ(w.eigenvalue(2), 4.0 / (9.0 * std::numbers::pi * std::numbers::pi));
  InnovationModel n{ InnovationModel::Kind::white_noise_kl, 3 };
  EXPECT_EQ(n.eigenvalues(), Eigen::VectorXd::Ones(3));
}

TEST(InnovationModel, WienerCovarianceApproachesMin)
{
  // The truncation error in HS norm is sqrt(sum_{k > K} lambda_k^2) against
  // ||min||_2 = sqrt(1/6).
  Grid g(401);
  InnovationModel w{ InnovationModel::Kind::wiener_kl, 200 };
  Eigen::MatrixXd target(401, 401);
  for (Index i = 0; i < 401; ++i)
    for (Index j = 0; j < 401; ++j)
      target(i, j) = std::min(g.points()(i), g.points()(j));
  KernelOperator min_kernel(g, target);
  double rel = hs_distance(innovation_kernel(w, g), min_kernel) / hs_norm(min_kernel);
  EXPECT_LT(rel, 0.01);
}

TEST(MakeCoefficients, UnitRowVariance)
{
  CoefficientSpec cs{ 0, 3, 0.0, 2024 };
  auto a = make_coefficients(cs, 1000);
  ASSERT_EQ(a.size(), 1u);
  ASSERT_EQ(a[0].rows(), 3);
  ASSERT_EQ(a[0].cols(), 1000);
  double v = row_variance(a[0], 0);
  EXPECT_GE(v, 0.85);
  EXPECT_LE(v, 1.15);
}

TEST(MakeCoefficients, RowDecay)
{
  CoefficientSpec cs{ 0, 10, 2.0, 5 };
  auto a = make_coefficients(cs, 1000);
  double ratio = row_variance(a[0], 9) / row_variance(a[0], 0);
  EXPECT_GT(ratio, 1e-4 / 3.0);
  EXPECT_LT(ratio, 1e-4 * 3.0);
}

TEST(MakeCoefficients, Deterministic)
{
  CoefficientSpec cs{ 3, 5, 1.5, 11 };
  auto a = make_coefficients(cs, 40);
  auto b = make_coefficients(cs, 40);
  ASSERT_EQ(a.size(), 4u);
  for (std::size_t s = 0; s < a.size(); ++s)
    EXPECT_TRUE(a[s] == b[s]);
  cs.seed = 12;
  EXPECT_FALSE(make_coefficients(cs, 40)[0] == a[0]);
  EXPECT_THROW(make_coefficients(CoefficientSpec{ -1, 5, 1.0, 0 }, 4), ConfigError);
}

TEST(LinearProcessSpec, Validation)
{
  InnovationModel innov{ InnovationModel::Kind::wiener_kl, 4 };
  EXPECT_THROW(LinearProcessSpec(innov, {}, Grid(11), 0), ConfigError);
  EXPECT_THROW(LinearProcessSpec(innov, { Eigen::MatrixXd::Zero(3, 5) }, Grid(11), 0),
               DimensionError);
  // Ten sine functions cannot be orthonormal on a 10-point grid.
  EXPECT_THROW(LinearProcessSpec(innov, { Eigen::MatrixXd::Zero(10, 4) }, Grid(10), 0),
               ConfigError);
  LinearProcessSpec ok(innov, { Eigen::MatrixXd::Zero(9, 4) }, Grid(10), 0);
  EXPECT_EQ(ok.out_dim(), 9);
}

TEST(SimulateProcess, BrownianCovariance)
{
  const Index k = 200;
  InnovationModel innov{ InnovationModel::Kind::wiener_kl, k };
  LinearProcessSpec spec(innov, { Eigen::MatrixXd::Identity(k, k) }, Grid(401), 17);
  auto x = simulate_process(spec, 4096);
  auto r0 = empirical_autocov(x, 0);
  Eigen::MatrixXd target(401, 401);
  for (Index i = 0; i < 401; ++i)
    for (Index j = 0; j < 401; ++j)
      target(i, j) = std::min(spec.grid().points()(i), spec.grid().points()(j));
  KernelOperator min_kernel(spec.grid(), target);
  EXPECT_LT(hs_distance(r0, min_kernel), 0.15 * hs_norm(min_kernel));
}

TEST(SimulateProcess, MovingAverageDecorrelates)
{
  auto spec = small_ma(2);
  auto x = simulate_process(spec, 4096);
  EXPECT_LT(hs_norm(empirical_autocov(x, 5)), 0.2 * hs_norm(empirical_autocov(x, 0)));
}

TEST(SimulateProcess, DeterministicAndWindowed)
{
  auto spec = small_ma(3);
  auto a = simulate_process(spec, 64);
  auto b = simulate_process(spec, 64);
  EXPECT_TRUE(a.data() == b.data());
  auto longer = simulate_process(spec, 100);
  EXPECT_TRUE(longer.data().topRows(64) == a.data());
  auto shifted = simulate_process(spec, 30, 20);
  EXPECT_TRUE(shifted.data().isApprox(longer.data().middleRows(20, 30), 1e-13));
  auto other = simulate_process(spec.with_seed(2), 64);
  EXPECT_FALSE(other.data() == a.data());
}

TEST(SimulateProcess, ShiftedWindowHasSameCovariance)
{
  auto spec = small_ma(2);
  auto first = simulate_process(spec, 4096);
  auto later = simulate_process(spec, 4096, 5000);
  auto r_first = empirical_autocov(first, 0);
  auto r_later = empirical_autocov(later, 0);
  auto truth = true_autocov(spec, 0);
  EXPECT_LT(hs_distance(r_first, r_later), 0.15 * hs_norm(truth));
}

TEST(TrueSdo, WhiteNoiseInTimeIsFlat)
{
  auto spec = small_ma(0);
  Eigen::MatrixXd a = spec.coeffs()[0];
  Eigen::MatrixXd coef = a * spec.lambda().asDiagonal() * a.transpose() / kTwoPi;
  auto expected = spec.to_kernel(coef.cast<cplx>());
  for (double w : { 0.0, 0.9, 2.5, std::numbers::pi })
    EXPECT_LT(hs_distance(true_sdo(spec, w), expected), 1e-12 * hs_norm(expected));
}

TEST(TrueSdo, HermitianPsd)
{
  auto spec = small_ma(4, 33);
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> u(-std::numbers::pi, std::numbers::pi);
  for (int i = 0; i < 50; ++i) {
    auto f = true_sdo(spec, u(gen));
    EXPECT_TRUE(is_hermitian(f, 1e-8));
    EXPECT_TRUE(is_psd(f, 1e-8));
  }
}

TEST(TrueSdo, MeanPeriodogramMatches)
{
  auto spec = small_ma(1, 33);
  const Index t_len = 512;
  const long s = 37;
  double rel = unbiasedness_check(spec, t_len, s, 500, 8);
  EXPECT_LT(rel, 0.10);
}

TEST(TrueAutocov, Structure)
{
  auto spec = small_ma(2, 21);
  EXPECT_EQ(hs_norm(true_autocov(spec, 3)), 0.0);
  EXPECT_EQ(hs_norm(true_autocov(spec, -4)), 0.0);
  EXPECT_TRUE(is_psd(true_autocov(spec, 0), 1e-10));
  for (long t : { 1L, 2L }) {
    auto r = true_autocov(spec, t);
    auto rm = true_autocov(spec, -t);
    EXPECT_TRUE(rm.kernel().isApprox(r.kernel().adjoint(), 1e-13));
  }
}

TEST(TrueAutocov, InversionOfTrueSdo)
{
  auto spec = small_ma(3, 21);
  const long n = 128;
  for (long t = -5; t <= 5; ++t) {
    Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(21, 21);
    for (long k = 0; k < n; ++k) {
      double a = kTwoPi * k / n;
      acc += std::polar(1.0, t * a) * true_sdo(spec, a).kernel();
    }
    acc *= kTwoPi / n;
    EXPECT_LT(hs_distance(KernelOperator(spec.grid(), acc), true_autocov(spec, t)), 1e-6);
  }
}

TEST(TrueLongRunCov, SumOfAutocovariances)
{
  auto spec = small_ma(2, 21);
  auto lrc = true_long_run_cov(spec);
  auto via_sdo = cplx(kTwoPi) * true_sdo(spec, 0.0);
  EXPECT_LT(hs_distance(lrc, via_sdo), 1e-12 * hs_norm(lrc));
}
