#pragma once

#include "errors.hpp"
#include "numcore.hpp"
#include "sampling.hpp"
#include "simulate.hpp"
#include "spectral.hpp"

#include <charconv>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <iomanip>
#include <json.hpp>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace ftspec::io {

using json = nlohmann::json;

//! Shortest decimal form with 17 significant digits; parses back to the
//! identical double.
inline std::string
format_double(double v)
{
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace detail {

inline std::vector<std::string_view>
split_fields(std::string_view line)
{
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    auto pos = line.find(',', start);
    out.push_back(line.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos)
      break;
    start = pos + 1;
  }
  return out;
}

inline double
parse_field(std::string_view field, std::size_t row, std::size_t col)
{
  while (!field.empty() && (field.front() == ' ' || field.front() == '\t'))
    field.remove_prefix(1);
  while (!field.empty() &&
         (field.back() == ' ' || field.back() == '\t' || field.back() == '\r'))
    field.remove_suffix(1);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc() || ptr != field.data() + field.size())
    throw ParseError("row " + std::to_string(row) + ", column " +
                     std::to_string(col) + ": cannot parse '" +
                     std::string(field) + "' as a number");
  return v;
}

// Rows of numbers; row numbers in messages are 1-based file lines.
inline std::vector<std::vector<double>>
read_rows(std::istream& in)
{
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r")
      continue;
    auto fields = split_fields(line);
    std::vector<double> row;
    row.reserve(fields.size());
    for (std::size_t c = 0; c < fields.size(); ++c)
      row.push_back(parse_field(fields[c], lineno, c + 1));
    if (!rows.empty() && row.size() != rows.front().size())
      throw ParseError("row " + std::to_string(lineno) + " has " +
                       std::to_string(row.size()) + " columns, expected " +
                       std::to_string(rows.front().size()));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline std::ifstream
open_in(const std::string& path)
{
  std::ifstream in(path);
  if (!in)
    throw ParseError("cannot open '" + path + "' for reading");
  return in;
}

inline std::ofstream
open_out(const std::string& path)
{
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw ParseError("cannot open '" + path + "' for writing");
  return out;
}

} // namespace detail

//! Series CSV: a header row with the grid points, then one row per curve.
inline void
write_series_csv(std::ostream& out, const FunctionalSeries& x)
{
  const auto& tau = x.grid().points();
  for (Index i = 0; i < tau.size(); ++i)
    out << (i ? "," : "") << format_double(tau(i));
  out << '\n';
  for (Index t = 0; t < x.t_len(); ++t) {
    for (Index i = 0; i < x.grid().m(); ++i)
      out << (i ? "," : "") << format_double(x.data()(t, i));
    out << '\n';
  }
}

inline FunctionalSeries
read_series_csv(std::istream& in)
{
  auto rows = detail::read_rows(in);
  if (rows.size() < 2)
    throw ParseError("series CSV needs a header row and at least one data row");
  const auto m = static_cast<Index>(rows.front().size());
  Grid grid(m);
  for (Index i = 0; i < m; ++i)
    if (std::abs(rows.front()[static_cast<std::size_t>(i)] - grid.points()(i)) > 1e-12)
      throw DimensionError("header column " + std::to_string(i + 1) +
                           " is not on the uniform grid of " +
                           std::to_string(m) + " points");
  Eigen::MatrixXd data(static_cast<Index>(rows.size() - 1), m);
  for (std::size_t r = 1; r < rows.size(); ++r)
    for (Index i = 0; i < m; ++i)
      data(static_cast<Index>(r - 1), i) = rows[r][static_cast<std::size_t>(i)];
  if (!data.allFinite())
    throw NumericalError("series contains non-finite values");
  return { grid, std::move(data) };
}

inline void
write_series_csv(const std::string& path, const FunctionalSeries& x)
{
  auto out = detail::open_out(path);
  write_series_csv(out, x);
}

inline FunctionalSeries
read_series_csv(const std::string& path)
{
  auto in = detail::open_in(path);
  return read_series_csv(in);
}

//! Plain numeric matrix CSV, no header.
inline void
write_matrix_csv(const std::string& path, const Eigen::MatrixXd& a)
{
  auto out = detail::open_out(path);
  for (Index r = 0; r < a.rows(); ++r) {
    for (Index c = 0; c < a.cols(); ++c)
      out << (c ? "," : "") << format_double(a(r, c));
    out << '\n';
  }
}

inline Eigen::MatrixXd
read_matrix_csv(const std::string& path)
{
  auto in = detail::open_in(path);
  auto rows = detail::read_rows(in);
  if (rows.empty())
    throw ParseError("'" + path + "' is empty");
  Eigen::MatrixXd a(static_cast<Index>(rows.size()),
                    static_cast<Index>(rows.front().size()));
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < rows[r].size(); ++c)
      a(static_cast<Index>(r), static_cast<Index>(c)) = rows[r][c];
  return a;
}

//! FNV-1a, 64 bit, as 16 hex digits.
inline std::string
fnv1a_hex(std::string_view bytes)
{
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

// ---------------------------------------------------------------------------
// JSON documents. Every reader rejects keys it does not know.

//! Throws ConfigError naming the first key of `j` not in `allowed`.
inline void
check_keys(const json& j, std::initializer_list<std::string_view> allowed,
           const std::string& where)
{
  if (!j.is_object())
    throw ConfigError(where + ": expected an object");
  for (const auto& [key, _] : j.items()) {
    bool ok = false;
    for (auto a : allowed)
      ok = ok || key == a;
    if (!ok)
      throw ConfigError(where + ": unknown key '" + key + "'");
  }
}

template<class T>
T
get_field(const json& j, const std::string& key, const std::string& where)
{
  if (!j.contains(key))
    throw ConfigError(where + ": missing required key '" + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(where + "." + key + ": " + e.what());
  }
}

template<class T>
T
get_field(const json& j, const std::string& key, const std::string& where, T fallback)
{
  if (!j.contains(key))
    return fallback;
  return get_field<T>(j, key, where);
}

inline json
innovation_to_json(const InnovationModel& m)
{
  return { { "kind", m.name() }, { "k_trunc", m.k_trunc } };
}

inline InnovationModel
innovation_from_json(const json& j, const std::string& where)
{
  check_keys(j, { "kind", "k_trunc" }, where);
  InnovationModel m;
  m.kind = InnovationModel::kind_from_name(
    get_field<std::string>(j, "kind", where, "wiener_kl"));
  m.k_trunc = get_field<Index>(j, "k_trunc", where, 1000);
  if (m.k_trunc < 1)
    throw ConfigError(where + ".k_trunc: must be >= 1");
  return m;
}

inline json
coefficient_spec_to_json(const CoefficientSpec& c)
{
  return { { "q", c.q }, { "out_dim", c.out_dim }, { "alpha", c.alpha }, { "seed", c.seed } };
}

inline CoefficientSpec
coefficient_spec_from_json(const json& j, const std::string& where,
                           std::uint64_t default_seed)
{
  check_keys(j, { "q", "out_dim", "alpha", "seed" }, where);
  CoefficientSpec c;
  c.q = get_field<Index>(j, "q", where, 10);
  c.out_dim = get_field<Index>(j, "out_dim", where, 50);
  c.alpha = get_field<double>(j, "alpha", where, 2.0);
  c.seed = get_field<std::uint64_t>(j, "seed", where, default_seed);
  try {
    c.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(where + ": " + e.what());
  }
  return c;
}

//! Full serialization with explicit coefficient matrices.
inline json
process_to_json(const LinearProcessSpec& spec)
{
  json coeffs = json::array();
  for (const auto& a : spec.coeffs()) {
    json rows = json::array();
    for (Index r = 0; r < a.rows(); ++r) {
      json row = json::array();
      for (Index c = 0; c < a.cols(); ++c)
        row.push_back(a(r, c));
      rows.push_back(std::move(row));
    }
    coeffs.push_back(std::move(rows));
  }
  return { { "innovation", innovation_to_json(spec.innovation()) },
           { "grid", { { "m", spec.grid().m() } } },
           { "psi_basis", "sine" },
           { "seed", spec.seed() },
           { "coeffs", std::move(coeffs) } };
}

//! Reads a process document. Operators come either from explicit "coeffs"
//! (list of out_dim x K matrices) or from a "coefficients" generator block.
//! Seeds absent from the document fall back to the given defaults.
inline LinearProcessSpec
process_from_json(const json& j,
                  const std::string& where,
                  std::uint64_t default_process_seed = 0,
                  std::uint64_t default_coefficient_seed = 0)
{
  check_keys(j, { "innovation", "grid", "psi_basis", "seed", "coeffs", "coefficients" },
             where);
  auto innovation = innovation_from_json(
    j.contains("innovation") ? j.at("innovation") : json::object(),
    where + ".innovation");
  const json& gj = j.contains("grid") ? j.at("grid") : json::object();
  check_keys(gj, { "m" }, where + ".grid");
  const auto m = get_field<Index>(gj, "m", where + ".grid", 101);
  if (m < 2)
    throw ConfigError(where + ".grid.m: must be >= 2");
  if (j.contains("psi_basis") && j.at("psi_basis") != "sine")
    throw ConfigError(where + ".psi_basis: only \"sine\" is supported");
  const auto seed = get_field<std::uint64_t>(j, "seed", where, default_process_seed);

  std::vector<Eigen::MatrixXd> coeffs;
  if (j.contains("coeffs") == j.contains("coefficients"))
    throw ConfigError(where + ": give exactly one of 'coeffs' or 'coefficients'");
  if (j.contains("coeffs")) {
    const json& cj = j.at("coeffs");
    if (!cj.is_array() || cj.empty())
      throw ConfigError(where + ".coeffs: expected a non-empty list of matrices");
    for (std::size_t s = 0; s < cj.size(); ++s) {
      const json& mj = cj[s];
      const std::string at = where + ".coeffs[" + std::to_string(s) + "]";
      if (!mj.is_array() || mj.empty() || !mj[0].is_array())
        throw ConfigError(at + ": expected a matrix (list of rows)");
      Eigen::MatrixXd a(static_cast<Index>(mj.size()), static_cast<Index>(mj[0].size()));
      for (std::size_t r = 0; r < mj.size(); ++r) {
        if (!mj[r].is_array() || mj[r].size() != mj[0].size())
          throw ConfigError(at + ": ragged row " + std::to_string(r));
        for (std::size_t c = 0; c < mj[r].size(); ++c) {
          if (!mj[r][c].is_number())
            throw ConfigError(at + ": non-numeric entry at (" + std::to_string(r) +
                              ", " + std::to_string(c) + ")");
          a(static_cast<Index>(r), static_cast<Index>(c)) = mj[r][c].get<double>();
        }
      }
      coeffs.push_back(std::move(a));
    }
  } else {
    auto cs = coefficient_spec_from_json(j.at("coefficients"), where + ".coefficients",
                                         default_coefficient_seed);
    coeffs = make_coefficients(cs, innovation.k_trunc);
  }
  try {
    return LinearProcessSpec(innovation, std::move(coeffs), Grid(m), seed);
  } catch (const Error& e) {
    throw ConfigError(where + ": " + e.what());
  }
}

inline std::string
process_hash(const LinearProcessSpec& spec)
{
  return fnv1a_hex(process_to_json(spec).dump());
}

inline json
weight_to_json(const WeightFunction& w)
{
  if (w.kind() == WeightFunction::Kind::custom)
    return { { "table", w.table() } };
  return w.name();
}

inline WeightFunction
weight_from_json(const json& j, const std::string& where)
{
  if (j.is_string())
    return WeightFunction::from_name(j.get<std::string>());
  check_keys(j, { "table" }, where);
  return WeightFunction::custom(get_field<std::vector<double>>(j, "table", where));
}

//! Estimator block: {"bandwidth": number (default T^{-1/5}),
//! "weight": name or {"table": [...]}, "frequencies": [radians] or
//! "n_frequencies": N for the uniform grid 2 pi k / N}.
inline EstimatorConfig
estimator_from_json(const json& j, const std::string& where, long t_len,
                    bool frequencies_required = true)
{
  check_keys(j, { "bandwidth", "weight", "frequencies", "n_frequencies" }, where);
  EstimatorConfig cfg;
  cfg.bandwidth = get_field<double>(j, "bandwidth", where, default_bandwidth(t_len));
  if (j.contains("weight"))
    cfg.weight = weight_from_json(j.at("weight"), where + ".weight");
  if (j.contains("frequencies") && j.contains("n_frequencies"))
    throw ConfigError(where + ": give only one of 'frequencies' or 'n_frequencies'");
  if (j.contains("frequencies")) {
    for (double w : get_field<std::vector<double>>(j, "frequencies", where))
      cfg.frequencies.push_back(Frequency::at(w));
  } else if (j.contains("n_frequencies")) {
    const auto n = get_field<long>(j, "n_frequencies", where);
    if (n < 1)
      throw ConfigError(where + ".n_frequencies: must be >= 1");
    for (long k = 0; k < n; ++k)
      cfg.frequencies.push_back(Frequency::fourier(k, n));
  }
  if (!frequencies_required && cfg.frequencies.empty())
    cfg.frequencies.push_back(Frequency::at(0.0));
  try {
    cfg.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(where + ": " + e.what());
  }
  return cfg;
}

inline json
estimator_to_json(const EstimatorConfig& cfg)
{
  json freqs = json::array();
  for (const auto& f : cfg.frequencies)
    freqs.push_back(f.omega);
  return { { "bandwidth", cfg.bandwidth },
           { "weight", weight_to_json(cfg.weight) },
           { "frequencies", std::move(freqs) } };
}

} // namespace ftspec::io
