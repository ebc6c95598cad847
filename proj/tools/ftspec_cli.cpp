// Command-line front end: every command reads one JSON config and writes
// CSV arrays plus JSON metadata into the output directory.

#include <ftspec/ftspec.hpp>
#include <ftspec/io.hpp>

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#ifndef FTSPEC_VERSION
#define FTSPEC_VERSION "unknown"
#endif

namespace fs = std::filesystem;
using namespace ftspec;
using io::json;

namespace {

// Substreams of master_seed.
constexpr std::uint64_t kCoefficientStream = 1;
constexpr std::uint64_t kProcessStream = 2;
constexpr std::uint64_t kNoiseStream = 3;

struct Context
{
  json cfg;
  fs::path cfg_dir;
  fs::path out;
  std::size_t threads{ 1 };
  std::optional<std::uint64_t> seed_override;

  std::uint64_t master_seed() const
  {
    if (seed_override)
      return *seed_override;
    return io::get_field<std::uint64_t>(cfg, "master_seed", "config", 0);
  }

  fs::path input(const std::string& key = "input") const
  {
    fs::path p = io::get_field<std::string>(cfg, key, "config");
    return p.is_absolute() ? p : cfg_dir / p;
  }

  fs::path output(const std::string& name) const { return out / name; }
};

json
load_config(const fs::path& path)
{
  std::ifstream in(path);
  if (!in)
    throw ConfigError("cannot open config '" + path.string() + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

void
write_json(const fs::path& path, const json& j)
{
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw ParseError("cannot open '" + path.string() + "' for writing");
  out << j.dump(2) << '\n';
}

// Explicit seeds inside the process block win unless --seed was given.
LinearProcessSpec
load_process(const Context& ctx)
{
  if (!ctx.cfg.contains("process"))
    throw ConfigError("config: missing required key 'process'");
  json pj = ctx.cfg.at("process");
  const auto master = ctx.master_seed();
  if (ctx.seed_override) {
    pj.erase("seed");
    if (pj.contains("coefficients") && pj.at("coefficients").is_object())
      pj.at("coefficients").erase("seed");
  }
  return io::process_from_json(pj, "process", derive_seed(master, kProcessStream),
                               derive_seed(master, kCoefficientStream));
}

json
grid_json(const Grid& g)
{
  return { { "m", g.m() } };
}

json
frequency_json(const Frequency& f)
{
  json j = { { "omega", f.omega } };
  if (f.fourier_index)
    j["fourier_index"] = *f.fourier_index;
  return j;
}

void
write_kernel(const Context& ctx, const std::string& stem, const KernelOperator& k)
{
  io::write_matrix_csv(ctx.output(stem + "_real.csv"), k.kernel().real());
  io::write_matrix_csv(ctx.output(stem + "_imag.csv"), k.kernel().imag());
}

std::string
indexed(const std::string& prefix, std::size_t i)
{
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%03zu", i);
  return prefix + buf;
}

json
operator_checks(const KernelOperator& k)
{
  return { { "hermitian", is_hermitian(k, 1e-8) },
           { "psd", is_psd(k, 1e-8) },
           { "min_eigenvalue", min_operator_eigenvalue(k) },
           { "max_abs_imag", k.kernel().imag().cwiseAbs().maxCoeff() } };
}

void
cmd_simulate(const Context& ctx)
{
  io::check_keys(ctx.cfg, { "master_seed", "process", "t_len", "start" }, "config");
  auto spec = load_process(ctx);
  const auto t_len = io::get_field<Index>(ctx.cfg, "t_len", "config");
  const auto start = io::get_field<long>(ctx.cfg, "start", "config", 0);
  auto x = simulate_process(spec, t_len, start);
  io::write_series_csv(ctx.output("series.csv").string(), x);
  write_json(ctx.output("series.json"),
             { { "version", FTSPEC_VERSION },
               { "master_seed", ctx.master_seed() },
               { "grid", grid_json(x.grid()) },
               { "t_len", t_len },
               { "start", start },
               { "seed", spec.seed() },
               { "spec_hash", io::process_hash(spec) } });
}

void
cmd_observe(const Context& ctx)
{
  io::check_keys(ctx.cfg, { "master_seed", "input", "m_obs", "sigma", "seed" }, "config");
  auto x = io::read_series_csv(ctx.input().string());
  SamplingScheme scheme;
  scheme.m_obs = io::get_field<Index>(ctx.cfg, "m_obs", "config");
  scheme.sigma =
    io::get_field<double>(ctx.cfg, "sigma", "config", default_noise_level(scheme.m_obs));
  scheme.seed = derive_seed(ctx.master_seed(), kNoiseStream);
  if (!ctx.seed_override)
    scheme.seed = io::get_field<std::uint64_t>(ctx.cfg, "seed", "config", scheme.seed);
  auto y = observe(x, scheme);
  io::write_series_csv(ctx.output("observed.csv").string(), y);
  write_json(ctx.output("observed.json"),
             { { "version", FTSPEC_VERSION },
               { "grid", grid_json(y.grid()) },
               { "t_len", y.t_len() },
               { "m_obs", scheme.m_obs },
               { "sigma", scheme.sigma },
               { "seed", scheme.seed } });
}

void
cmd_fdft(const Context& ctx)
{
  io::check_keys(ctx.cfg, { "input", "frequencies" }, "config");
  auto x = io::read_series_csv(ctx.input().string());
  std::vector<Frequency> freqs;
  Eigen::MatrixXcd values;
  if (ctx.cfg.contains("frequencies")) {
    auto omegas = io::get_field<std::vector<double>>(ctx.cfg, "frequencies", "config");
    if (omegas.empty())
      throw ConfigError("config.frequencies: empty list");
    values.resize(static_cast<Index>(omegas.size()), x.grid().m());
    for (std::size_t k = 0; k < omegas.size(); ++k) {
      freqs.push_back(Frequency::at(omegas[k]));
      values.row(static_cast<Index>(k)) = fdft_at(x, omegas[k]).values().transpose();
    }
  } else {
    auto d = fdft_all(x, ctx.threads);
    for (Index s = 0; s < x.t_len(); ++s)
      freqs.push_back(Frequency::fourier(static_cast<long>(s), static_cast<long>(x.t_len())));
    values = d.values;
  }
  io::write_matrix_csv(ctx.output("fdft_real.csv"), values.real());
  io::write_matrix_csv(ctx.output("fdft_imag.csv"), values.imag());
  json fj = json::array();
  for (const auto& f : freqs)
    fj.push_back(frequency_json(f));
  write_json(ctx.output("fdft.json"), { { "version", FTSPEC_VERSION },
                                         { "grid", grid_json(x.grid()) },
                                         { "t_len", x.t_len() },
                                         { "frequencies", fj } });
}

json
estimator_manifest(const EstimatorConfig& cfg, const FunctionalSeries& x)
{
  return { { "version", FTSPEC_VERSION },
           { "grid", grid_json(x.grid()) },
           { "t_len", x.t_len() },
           { "bandwidth", cfg.bandwidth },
           { "weight", io::weight_to_json(cfg.weight) } };
}

// Estimator blocks are validated once before the input is read, so config
// errors win over data errors.
void
cmd_estimate(const Context& ctx)
{
  io::check_keys(ctx.cfg, { "input", "estimator" }, "config");
  const auto ej = io::get_field<json>(ctx.cfg, "estimator", "config");
  io::estimator_from_json(ej, "estimator", 2);
  auto x = io::read_series_csv(ctx.input().string());
  auto cfg = io::estimator_from_json(ej, "estimator", x.t_len());
  auto est = estimate_sdo(x, cfg, ctx.threads);
  json manifest = estimator_manifest(cfg, x);
  json entries = json::array();
  for (std::size_t k = 0; k < est.size(); ++k) {
    const std::string stem = indexed("estimate_", k);
    write_kernel(ctx, stem, est.operators[k]);
    json e = frequency_json(est.frequencies[k]);
    e["files"] = { stem + "_real.csv", stem + "_imag.csv" };
    e["nonzero_terms"] = est.nonzero_terms[k];
    e.update(operator_checks(est.operators[k]));
    entries.push_back(std::move(e));
  }
  manifest["frequencies"] = std::move(entries);
  write_json(ctx.output("manifest.json"), manifest);
}

void
cmd_invert(const Context& ctx)
{
  io::check_keys(ctx.cfg, { "input", "estimator", "lags" }, "config");
  const auto ej = io::get_field<json>(ctx.cfg, "estimator", "config");
  io::estimator_from_json(ej, "estimator", 2);
  auto x = io::read_series_csv(ctx.input().string());
  auto cfg = io::estimator_from_json(ej, "estimator", x.t_len());
  auto lags = io::get_field<std::vector<long>>(ctx.cfg, "lags", "config", { 0 });
  if (lags.empty())
    throw ConfigError("config.lags: empty list");
  auto est = estimate_sdo(x, cfg, ctx.threads);
  json manifest = estimator_manifest(cfg, x);
  json entries = json::array();
  for (long lag : lags) {
    const std::string stem = "autocov_lag_" + std::to_string(lag);
    write_kernel(ctx, stem, autocov_from_sdo(est, lag));
    entries.push_back({ { "lag", lag }, { "files", { stem + "_real.csv", stem + "_imag.csv" } } });
  }
  manifest["n_frequencies"] = est.size();
  manifest["lags"] = std::move(entries);
  write_json(ctx.output("manifest.json"), manifest);
}

void
cmd_longrun(const Context& ctx)
{
  io::check_keys(ctx.cfg, { "input", "estimator" }, "config");
  auto x = io::read_series_csv(ctx.input().string());
  json ej = ctx.cfg.contains("estimator") ? ctx.cfg.at("estimator") : json::object();
  auto cfg = io::estimator_from_json(ej, "estimator", x.t_len(), false);
  auto lrc = long_run_cov(x, cfg, ctx.threads);
  write_kernel(ctx, "longrun", lrc);
  json manifest = estimator_manifest(cfg, x);
  manifest["files"] = { "longrun_real.csv", "longrun_imag.csv" };
  manifest.update(operator_checks(lrc));
  write_json(ctx.output("manifest.json"), manifest);
}

void
cmd_bench_imse(const Context& ctx)
{
  io::check_keys(ctx.cfg,
                 { "master_seed", "process", "t_list", "reps", "bandwidth", "weight",
                   "redraw_coefficients" },
                 "config");
  auto spec = load_process(ctx);
  ImseConfig cfg;
  cfg.master_seed = ctx.master_seed();
  cfg.t_list = io::get_field<std::vector<Index>>(ctx.cfg, "t_list", "config");
  cfg.reps = io::get_field<std::size_t>(ctx.cfg, "reps", "config", 50);
  if (ctx.cfg.contains("bandwidth")) {
    const json& bj = ctx.cfg.at("bandwidth");
    io::check_keys(bj, { "scale", "exponent" }, "config.bandwidth");
    cfg.bandwidth.scale = io::get_field<double>(bj, "scale", "config.bandwidth", 1.0);
    cfg.bandwidth.exponent = io::get_field<double>(bj, "exponent", "config.bandwidth", -0.2);
  }
  if (ctx.cfg.contains("weight"))
    cfg.weight = io::weight_from_json(ctx.cfg.at("weight"), "config.weight");
  if (ctx.cfg.contains("redraw_coefficients"))
    cfg.redraw_coefficients = io::coefficient_spec_from_json(
      ctx.cfg.at("redraw_coefficients"), "config.redraw_coefficients",
      derive_seed(cfg.master_seed, kCoefficientStream));
  for (Index t : cfg.t_list)
    if (t < 2)
      throw ConfigError("config.t_list: every T must be >= 2");

  auto report = imse_experiment(spec, cfg, ctx.threads);

  std::ofstream csv(ctx.output("imse.csv"), std::ios::binary);
  if (!csv)
    throw ParseError("cannot write imse.csv");
  csv << "t_len,rep,ise\n";
  for (std::size_t i = 0; i < report.t_list.size(); ++i)
    for (std::size_t r = 0; r < report.ise[i].size(); ++r)
      csv << report.t_list[i] << ',' << r << ',' << io::format_double(report.ise[i][r]) << '\n';

  json snapshot = ctx.cfg;
  snapshot["master_seed"] = cfg.master_seed;
  write_json(ctx.output("imse_report.json"),
             { { "version", FTSPEC_VERSION },
               { "master_seed", cfg.master_seed },
               { "config", snapshot },
               { "spec_hash", io::process_hash(spec) },
               { "t_list", report.t_list },
               { "bandwidths", report.bandwidths },
               { "medians", report.medians },
               { "slope", std::isfinite(report.slope) ? json(report.slope) : json(nullptr) },
               { "intercept",
                 std::isfinite(report.intercept) ? json(report.intercept) : json(nullptr) } });
}

std::vector<GridFunction>
load_probes(const Context& ctx, const Grid& grid)
{
  auto idx = io::get_field<std::vector<Index>>(ctx.cfg, "probes", "config", { 1 });
  if (idx.empty())
    throw ConfigError("config.probes: empty list");
  std::vector<GridFunction> probes;
  for (Index k : idx) {
    if (k < 1)
      throw ConfigError("config.probes: sine indices start at 1");
    probes.push_back(sine_function(k, grid));
  }
  return probes;
}

void
cmd_bench_gauss(const Context& ctx)
{
  io::check_keys(ctx.cfg,
                 { "master_seed", "process", "t_len", "s_first", "s_second", "probes", "reps" },
                 "config");
  auto spec = load_process(ctx);
  const auto t_len = io::get_field<Index>(ctx.cfg, "t_len", "config");
  const auto s1 = io::get_field<long>(ctx.cfg, "s_first", "config", static_cast<long>(t_len / 8));
  const auto s2 =
    io::get_field<long>(ctx.cfg, "s_second", "config", static_cast<long>(3 * t_len / 8));
  const auto reps = io::get_field<std::size_t>(ctx.cfg, "reps", "config", 1000);
  auto report = gaussianity_diag(spec, t_len, s1, s2, load_probes(ctx, spec.grid()), reps,
                                 ctx.master_seed(), ctx.threads);
  json probes = json::array();
  for (const auto& p : report.probes)
    probes.push_back({ { "skewness_re", p.skewness_re },
                       { "skewness_im", p.skewness_im },
                       { "excess_kurtosis_re", p.excess_kurtosis_re },
                       { "excess_kurtosis_im", p.excess_kurtosis_im },
                       { "re_im_correlation", p.re_im_correlation },
                       { "cross_frequency_correlation", p.cross_frequency_correlation },
                       { "var_re", p.var_re },
                       { "var_im", p.var_im },
                       { "half_spectral_mass", p.half_spectral_mass } });
  write_json(ctx.output("gauss_report.json"),
             { { "version", FTSPEC_VERSION },
               { "master_seed", ctx.master_seed() },
               { "config", ctx.cfg },
               { "t_len", report.t_len },
               { "s_first", report.s_first },
               { "s_second", report.s_second },
               { "reps", report.reps },
               { "probes", probes } });
}

void
cmd_bench_clt(const Context& ctx)
{
  io::check_keys(ctx.cfg, { "master_seed", "process", "t_len", "probes", "reps" }, "config");
  auto spec = load_process(ctx);
  const auto t_len = io::get_field<Index>(ctx.cfg, "t_len", "config");
  const auto reps = io::get_field<std::size_t>(ctx.cfg, "reps", "config", 500);
  auto report = mean_clt_diag(spec, t_len, load_probes(ctx, spec.grid()), reps,
                              ctx.master_seed(), ctx.threads);
  json probes = json::array();
  for (const auto& p : report.probes)
    probes.push_back({ { "empirical_variance", p.empirical_variance },
                       { "limit_variance", p.limit_variance },
                       { "ratio", p.ratio } });
  write_json(ctx.output("clt_report.json"),
             { { "version", FTSPEC_VERSION },
               { "master_seed", ctx.master_seed() },
               { "config", ctx.cfg },
               { "t_len", report.t_len },
               { "reps", report.reps },
               { "probes", probes } });
}

void
cmd_robustness(const Context& ctx)
{
  io::check_keys(ctx.cfg,
                 { "master_seed", "process", "t_len", "reps", "estimator", "m_obs", "sigma" },
                 "config");
  auto spec = load_process(ctx);
  const auto t_len = io::get_field<Index>(ctx.cfg, "t_len", "config");
  const auto reps = io::get_field<std::size_t>(ctx.cfg, "reps", "config", 20);
  json ej = ctx.cfg.contains("estimator") ? ctx.cfg.at("estimator") : json::object();
  auto cfg = io::estimator_from_json(ej, "estimator", static_cast<long>(t_len), false);
  auto m_list = io::get_field<std::vector<Index>>(ctx.cfg, "m_obs", "config");
  if (m_list.empty())
    throw ConfigError("config.m_obs: empty list");
  std::vector<double> sigmas;
  if (ctx.cfg.contains("sigma")) {
    sigmas = io::get_field<std::vector<double>>(ctx.cfg, "sigma", "config");
    if (sigmas.size() != m_list.size())
      throw ConfigError("config.sigma: needs one entry per m_obs");
  } else {
    for (Index m : m_list)
      sigmas.push_back(default_noise_level(m));
  }

  const auto noise_seed = derive_seed(ctx.master_seed(), kNoiseStream);
  json rows = json::array();
  std::ofstream csv(ctx.output("robustness.csv"), std::ios::binary);
  if (!csv)
    throw ParseError("cannot write robustness.csv");
  csv << "m_obs,sigma,gap\n";
  for (std::size_t i = 0; i < m_list.size(); ++i) {
    SamplingScheme scheme{ m_list[i], sigmas[i], noise_seed };
    double gap = robustness_gap(spec, t_len, scheme, cfg, reps, ctx.threads);
    csv << m_list[i] << ',' << io::format_double(sigmas[i]) << ',' << io::format_double(gap)
        << '\n';
    rows.push_back({ { "m_obs", m_list[i] }, { "sigma", sigmas[i] }, { "gap", gap } });
  }
  write_json(ctx.output("robustness.json"),
             { { "version", FTSPEC_VERSION },
               { "master_seed", ctx.master_seed() },
               { "config", ctx.cfg },
               { "bandwidth", cfg.bandwidth },
               { "gaps", rows } });
}

int
exit_code(const std::exception& e)
{
  if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const PreconditionError*>(&e) ||
      dynamic_cast<const ResolutionError*>(&e))
    return 2;
  if (dynamic_cast<const ParseError*>(&e) || dynamic_cast<const DimensionError*>(&e))
    return 3;
  if (dynamic_cast<const NumericalError*>(&e))
    return 4;
  if (dynamic_cast<const json::exception*>(&e))
    return 2;
  if (dynamic_cast<const fs::filesystem_error*>(&e))
    return 3;
  return 1;
}

} // namespace

int
main(int argc, char** argv)
{
  CLI::App app{ "Spectral analysis of functional time series" };
  app.set_version_flag("--version", std::string(FTSPEC_VERSION));
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = ".";
  std::size_t threads = std::max(1u, std::thread::hardware_concurrency());
  std::optional<std::uint64_t> seed;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON config file")->required();
    sub->add_option("--out", out_dir, "output directory")->capture_default_str();
    sub->add_option("--threads", threads, "worker threads")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
    sub->add_option("--seed", seed, "master seed, overrides the config");
  };

  using Handler = void (*)(const Context&);
  std::vector<std::pair<CLI::App*, Handler>> commands;
  auto add = [&](CLI::App* parent, const char* name, const char* help, Handler fn) {
    auto* sub = parent->add_subcommand(name, help);
    add_common(sub);
    commands.emplace_back(sub, fn);
  };
  add(&app, "simulate", "simulate a linear functional process", cmd_simulate);
  add(&app, "observe", "discrete noisy observation of a series", cmd_observe);
  add(&app, "fdft", "functional DFT of a series", cmd_fdft);
  add(&app, "estimate", "smoothed spectral density operator estimate", cmd_estimate);
  add(&app, "invert", "autocovariance operators from the spectral estimate", cmd_invert);
  add(&app, "longrun", "long-run covariance operator", cmd_longrun);
  add(&app, "robustness", "estimator gap under discrete noisy sampling", cmd_robustness);
  auto* bench = app.add_subcommand("bench", "Monte Carlo experiments");
  bench->require_subcommand(1);
  add(bench, "imse", "IMSE sweep over sample sizes", cmd_bench_imse);
  add(bench, "gauss", "Gaussianity diagnostics of the fDFT", cmd_bench_gauss);
  add(bench, "clt", "variance of the scaled sample mean", cmd_bench_clt);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    Context ctx;
    ctx.cfg = load_config(config_path);
    ctx.cfg_dir = fs::path(config_path).parent_path();
    ctx.out = out_dir;
    ctx.threads = threads;
    ctx.seed_override = seed;
    fs::create_directories(ctx.out);
    for (const auto& [sub, fn] : commands)
      if (sub->parsed())
        fn(ctx);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code(e);
  }
  return 0;
}
