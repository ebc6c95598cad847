#include <ftspec/io.hpp>

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace fs = std::filesystem;
using namespace ftspec;
using io::json;

namespace {

const fs::path kWork = fs::current_path() / "cli_work";

int
run(const std::string& args)
{
  std::string cmd = std::string(FTSPEC_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path
write_config(const std::string& name, const json& j)
{
  fs::create_directories(kWork);
  fs::path p = kWork / name;
  std::ofstream(p) << j.dump(2);
  return p;
}

std::string
slurp(const fs::path& p)
{
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json
small_process()
{
  return { { "innovation", { { "kind", "wiener_kl" }, { "k_trunc", 30 } } },
           { "grid", { { "m", 21 } } },
           { "coefficients", { { "q", 2 }, { "out_dim", 6 } } } };
}

std::string
args(const fs::path& cfg, const fs::path& out, const std::string& extra = "")
{
  return "--config " + cfg.string() + " --out " + out.string() + " " + extra;
}

} // namespace

TEST(Cli, SimulateShapeAndDeterminism)
{
  json proc = { { "innovation", { { "k_trunc", 5 } } },
                { "grid", { { "m", 3 } } },
                { "coefficients", { { "q", 1 }, { "out_dim", 1 } } } };
  auto cfg = write_config("sim_small.json", { { "master_seed", 5 }, { "t_len", 4 }, { "process", proc } });
  ASSERT_EQ(run("simulate " + args(cfg, kWork / "sim_a")), 0);
  ASSERT_EQ(run("simulate " + args(cfg, kWork / "sim_b", "--threads 3")), 0);
  auto a = slurp(kWork / "sim_a" / "series.csv");
  EXPECT_EQ(a, slurp(kWork / "sim_b" / "series.csv"));
  auto x = io::read_series_csv((kWork / "sim_a" / "series.csv").string());
  EXPECT_EQ(x.t_len(), 4);
  EXPECT_EQ(x.grid().m(), 3);
  EXPECT_EQ(std::count(a.begin(), a.end(), '\n'), 5);

  // Round trip against the library with the documented seed derivation.
  auto spec = io::process_from_json(proc, "process", derive_seed(5, 2), derive_seed(5, 1));
  EXPECT_TRUE(x.data() == simulate_process(spec, 4).data());

  auto side = json::parse(slurp(kWork / "sim_a" / "series.json"));
  EXPECT_EQ(side["t_len"], 4);
  EXPECT_EQ(side["grid"]["m"], 3);
  EXPECT_EQ(side["seed"], derive_seed(5, 2));
  EXPECT_EQ(side["spec_hash"], io::process_hash(spec));

  ASSERT_EQ(run("simulate " + args(cfg, kWork / "sim_c", "--seed 6")), 0);
  EXPECT_NE(a, slurp(kWork / "sim_c" / "series.csv"));
}

TEST(Cli, EstimateManifest)
{
  auto sim = write_config("sim.json", { { "master_seed", 1 }, { "t_len", 128 }, { "process", small_process() } });
  ASSERT_EQ(run("simulate " + args(sim, kWork / "sim")), 0);
  auto est = write_config("est.json", { { "input", "sim/series.csv" },
                                        { "estimator", { { "n_frequencies", 6 } } } });
  ASSERT_EQ(run("estimate " + args(est, kWork / "est")), 0);
  auto manifest = json::parse(slurp(kWork / "est" / "manifest.json"));
  ASSERT_EQ(manifest["frequencies"].size(), 6u);
  EXPECT_NEAR(manifest["bandwidth"].get<double>(), std::pow(128.0, -0.2), 1e-15);
  for (const auto& f : manifest["frequencies"]) {
    EXPECT_TRUE(f["hermitian"].get<bool>());
    EXPECT_TRUE(f["psd"].get<bool>());
  }
  EXPECT_EQ(manifest["frequencies"][0]["omega"], 0.0);
  auto imag = io::read_matrix_csv((kWork / "est" / "estimate_000_imag.csv").string());
  EXPECT_LT(imag.cwiseAbs().maxCoeff(), 1e-9);
  auto real = io::read_matrix_csv((kWork / "est" / "estimate_000_real.csv").string());
  EXPECT_EQ(real.rows(), 21);
}

TEST(Cli, OtherCommandsRun)
{
  auto sim = write_config("sim40.json", { { "master_seed", 2 }, { "t_len", 64 }, { "process", small_process() } });
  ASSERT_EQ(run("simulate " + args(sim, kWork / "sim40")), 0);
  auto obs = write_config("obs.json", { { "input", "sim40/series.csv" }, { "m_obs", 7 } });
  EXPECT_EQ(run("observe " + args(obs, kWork / "obs")), 0);
  auto fd = write_config("fdft.json", { { "input", "sim40/series.csv" } });
  EXPECT_EQ(run("fdft " + args(fd, kWork / "fdft")), 0);
  auto re = io::read_matrix_csv((kWork / "fdft" / "fdft_real.csv").string());
  EXPECT_EQ(re.rows(), 64);
  auto inv = write_config("inv.json", { { "input", "sim40/series.csv" },
                                        { "estimator", { { "n_frequencies", 16 } } },
                                        { "lags", { 0, 3 } } });
  EXPECT_EQ(run("invert " + args(inv, kWork / "inv")), 0);
  EXPECT_TRUE(fs::exists(kWork / "inv" / "autocov_lag_3_real.csv"));
  auto lr = write_config("lr.json", { { "input", "sim40/series.csv" } });
  EXPECT_EQ(run("longrun " + args(lr, kWork / "lr")), 0);
  auto bad_inv = write_config("inv_bad.json", { { "input", "sim40/series.csv" },
                                                { "estimator", { { "n_frequencies", 4 } } },
                                                { "lags", { 3 } } });
  EXPECT_EQ(run("invert " + args(bad_inv, kWork / "inv_bad")), 2);
}

TEST(Cli, BenchImse)
{
  auto cfg = write_config("imse.json", { { "master_seed", 99 },
                                         { "t_list", { 128, 256 } },
                                         { "reps", 4 },
                                         { "process", small_process() } });
  ASSERT_EQ(run("bench imse " + args(cfg, kWork / "imse_a")), 0);
  ASSERT_EQ(run("bench imse " + args(cfg, kWork / "imse_b", "--threads 2")), 0);
  auto csv = slurp(kWork / "imse_a" / "imse.csv");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 9);
  auto a = json::parse(slurp(kWork / "imse_a" / "imse_report.json"));
  auto b = json::parse(slurp(kWork / "imse_b" / "imse_report.json"));
  EXPECT_EQ(a["medians"], b["medians"]);
  EXPECT_EQ(a["master_seed"], 99);
  EXPECT_EQ(a["version"], FTSPEC_VERSION_STRING);
  EXPECT_EQ(a["config"]["reps"], 4);
  EXPECT_TRUE(a["slope"].is_number());
}

TEST(Cli, ExitCodes)
{
  auto none = write_config("zero_freq.json", { { "input", "missing.csv" },
                                               { "estimator", { { "frequencies", json::array() } } } });
  EXPECT_EQ(run("estimate " + args(none, kWork / "x")), 2);
  auto unknown = write_config("unknown.json", { { "input", "missing.csv" },
                                                { "estimator", { { "n_frequencies", 2 } } },
                                                { "colour", 1 } });
  EXPECT_EQ(run("estimate " + args(unknown, kWork / "x")), 2);
  EXPECT_EQ(run("estimate --config " + (kWork / "nope.json").string()), 2);
  EXPECT_EQ(run("estimate"), 2);

  fs::create_directories(kWork);
  std::ofstream(kWork / "broken.csv") << "0,0.5,1\n1,2,x\n";
  std::ofstream(kWork / "offgrid.csv") << "0,0.6,1\n1,2,3\n4,5,6\n";
  std::ofstream(kWork / "nan.csv") << "0,0.5,1\n1,2,3\n4,inf,6\n";
  auto est = [&](const std::string& input) {
    return write_config("est_" + input + ".json",
                        { { "input", input }, { "estimator", { { "n_frequencies", 2 } } } });
  };
  EXPECT_EQ(run("estimate " + args(est("broken.csv"), kWork / "x")), 3);
  EXPECT_EQ(run("estimate " + args(est("offgrid.csv"), kWork / "x")), 3);
  EXPECT_EQ(run("estimate " + args(est("nan.csv"), kWork / "x")), 4);
}
