#include <ftspec/io.hpp>

#include "oracles.hpp"

#include <gtest/gtest.h>
#include <limits>
#include <sstream>

using namespace ftspec;
using io::json;

TEST(SeriesCsv, RoundTripIsExact)
{
  Grid g(7);
  Eigen::MatrixXd data = oracle::random_series(5, 7, 11).data();
  data(0, 0) = 1.0 / 3.0;
  data(1, 2) = std::numeric_limits<double>::denorm_min();
  data(2, 3) = -1e300;
  FunctionalSeries x(g, data);
  std::stringstream ss;
  io::write_series_csv(ss, x);
  auto back = io::read_series_csv(ss);
  EXPECT_EQ(back.grid().m(), 7);
  EXPECT_TRUE(back.data() == x.data());
}

TEST(SeriesCsv, Shape)
{
  FunctionalSeries x(Grid(3), Eigen::MatrixXd::Zero(4, 3));
  std::stringstream ss;
  io::write_series_csv(ss, x);
  std::string line;
  int rows = 0;
  while (std::getline(ss, line)) {
    ++rows;
    EXPECT_EQ(std::count(line.begin(), line.end(), ','), 2);
  }
  EXPECT_EQ(rows, 5);
}

TEST(SeriesCsv, ParseErrorNamesRowAndColumn)
{
  std::stringstream ss("0,0.5,1\n1,2,3\n4,oops,6\n");
  try {
    io::read_series_csv(ss);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("row 3, column 2"), std::string::npos) << e.what();
  }
  std::stringstream ragged("0,0.5,1\n1,2\n");
  EXPECT_THROW(io::read_series_csv(ragged), ParseError);
  std::stringstream empty("");
  EXPECT_THROW(io::read_series_csv(empty), ParseError);
}

TEST(SeriesCsv, GridMismatch)
{
  std::stringstream ss("0,0.4,1\n1,2,3\n");
  EXPECT_THROW(io::read_series_csv(ss), DimensionError);
}

TEST(SeriesCsv, NonFinite)
{
  std::stringstream ss("0,0.5,1\n1,nan,3\n");
  EXPECT_THROW(io::read_series_csv(ss), NumericalError);
}

TEST(ProcessJson, RoundTrip)
{
  InnovationModel innov{ InnovationModel::Kind::white_noise_kl, 12 };
  LinearProcessSpec spec(innov, make_coefficients(CoefficientSpec{ 2, 4, 1.5, 9 }, 12),
                         Grid(21), 44);
  auto j = io::process_to_json(spec);
  auto back = io::process_from_json(json::parse(j.dump()), "process");
  EXPECT_EQ(back.grid().m(), 21);
  EXPECT_EQ(back.seed(), 44u);
  EXPECT_EQ(back.innovation().kind, innov.kind);
  ASSERT_EQ(back.coeffs().size(), 3u);
  for (std::size_t s = 0; s < 3; ++s)
    EXPECT_TRUE(back.coeffs()[s] == spec.coeffs()[s]);
  EXPECT_EQ(io::process_hash(back), io::process_hash(spec));
}

TEST(ProcessJson, GeneratorBlockAndDefaults)
{
  auto j = json::parse(R"({"innovation": {"kind": "wiener_kl", "k_trunc": 30},
                           "grid": {"m": 41},
                           "coefficients": {"q": 1, "out_dim": 5}})");
  auto spec = io::process_from_json(j, "process", 3, 4);
  EXPECT_EQ(spec.seed(), 3u);
  EXPECT_EQ(spec.q(), 1);
  auto expected = make_coefficients(CoefficientSpec{ 1, 5, 2.0, 4 }, 30);
  EXPECT_TRUE(spec.coeffs()[1] == expected[1]);
}

TEST(ProcessJson, Rejections)
{
  auto bad = [](const char* text) {
    EXPECT_THROW(io::process_from_json(json::parse(text), "process"), ConfigError) << text;
  };
  bad(R"({"coefficients": {}, "colour": 1})");
  bad(R"({"coefficients": {"q": 1, "bogus": 2}})");
  bad(R"({"innovation": {"kind": "pink"}, "coefficients": {}})");
  bad(R"({"grid": {"m": 1}, "coefficients": {}})");
  bad(R"({"grid": {"m": "ten"}, "coefficients": {}})");
  bad(R"({"innovation": {"k_trunc": 2}, "coeffs": [[[1, 2]], [[1]]]})");
  bad(R"({"innovation": {"k_trunc": 2}})");
  bad(R"({"grid": {"m": 5}, "coefficients": {"out_dim": 50}})");
  try {
    io::process_from_json(json::parse(R"({"coefficients": {"qq": 1}})"), "process");
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("process.coefficients"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("qq"), std::string::npos);
  }
}

TEST(EstimatorJson, Parsing)
{
  auto cfg = io::estimator_from_json(json::parse(R"({"n_frequencies": 8})"), "estimator", 243);
  EXPECT_NEAR(cfg.bandwidth, 1.0 / 3.0, 1e-15);
  EXPECT_EQ(cfg.weight.kind(), WeightFunction::Kind::epanechnikov);
  ASSERT_EQ(cfg.frequencies.size(), 8u);
  EXPECT_EQ(cfg.frequencies[3].fourier_index, 3);

  cfg = io::estimator_from_json(
    json::parse(R"({"bandwidth": 0.5, "weight": "bartlett", "frequencies": [0, 1.5]})"),
    "estimator", 100);
  EXPECT_EQ(cfg.bandwidth, 0.5);
  EXPECT_EQ(cfg.weight.kind(), WeightFunction::Kind::bartlett);
  EXPECT_EQ(cfg.frequencies[1].omega, 1.5);

  auto round = io::estimator_from_json(io::estimator_to_json(cfg), "estimator", 100);
  EXPECT_EQ(round.bandwidth, cfg.bandwidth);
  EXPECT_EQ(round.frequencies.size(), 2u);

  EXPECT_THROW(io::estimator_from_json(json::parse(R"({"frequencies": []})"), "e", 100),
               ConfigError);
  EXPECT_THROW(io::estimator_from_json(json::parse(R"({})"), "e", 100), ConfigError);
  EXPECT_NO_THROW(io::estimator_from_json(json::parse(R"({})"), "e", 100, false));
  EXPECT_THROW(io::estimator_from_json(
                 json::parse(R"({"bandwidth": 4, "n_frequencies": 2})"), "e", 100),
               ConfigError);
  EXPECT_THROW(io::estimator_from_json(
                 json::parse(R"({"weight": "gauss", "n_frequencies": 2})"), "e", 100),
               ConfigError);
  EXPECT_THROW(io::estimator_from_json(json::parse(R"({"window": 1})"), "e", 100),
               ConfigError);
}

TEST(Hash, Fnv1a)
{
  EXPECT_EQ(io::fnv1a_hex(""), "cbf29ce484222325");
  EXPECT_EQ(io::fnv1a_hex("a"), "af63dc4c8601ec8c");
}
