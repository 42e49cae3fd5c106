#ifndef BIHARM_HARNESS_HPP
#define BIHARM_HARNESS_HPP

// Benchmark runner behind the command-line tool: table presets, one CSV row
// per (n, M, point, h) combination with convergence rates, and two-column
// plot data.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "biharm/engine.hpp"
#include "biharm/errors.hpp"
#include "biharm/kernels.hpp"
#include "biharm/quad.hpp"

namespace biharm::harness {

/// Invalid run configuration; the tool exits with status 2.
class ConfigError : public Error {
 public:
  using Error::Error;
};

enum class PointKind { axis, diagonal };
enum class PathChoice { automatic, generic, symmetric };

struct RunConfig {
  int table = 0;  // 1..4, or 0 for a custom run
  std::vector<std::int64_t> dims;
  std::vector<int> orders{4};
  std::vector<std::int64_t> steps{40};  // h^{-1}
  std::vector<double> x1{1.0};
  PointKind point = PointKind::axis;
  PathChoice path = PathChoice::automatic;
  double D = 5.0;
  double radius = 6.5;
  DEQuadrature quad;
  int threads = 1;

  void validate() const {
    if (table < 0 || table > 4) throw ConfigError("table must be 1, 2, 3, 4 or custom");
    if (dims.empty()) throw ConfigError("no dimensions given");
    for (auto n : dims) {
      if (n < 3) throw ConfigError("dimension " + std::to_string(n) + " is below 3");
      if (n == 4) throw ConfigError("dimension 4 is not supported by the tensor engine");
    }
    if (orders.empty()) throw ConfigError("no orders given");
    for (int M : orders)
      if (M < 1 || M > 16) throw ConfigError("order M must lie in [1, 16]");
    if (steps.empty()) throw ConfigError("no grid steps given");
    for (auto s : steps)
      if (s < 1) throw ConfigError("grid steps are given as positive integers h^{-1}");
    if (x1.empty()) throw ConfigError("no evaluation points given");
    for (double x : x1)
      if (!std::isfinite(x)) throw ConfigError("evaluation coordinate must be finite");
    if (!(D > 0.0) || !std::isfinite(D)) throw ConfigError("D must be positive");
    if (!(radius > 0.0)) throw ConfigError("truncation radius must be positive");
    if (!(quad.a > 0.0) || !(quad.b > 0.0) || !(quad.tau > 0.0))
      throw ConfigError("quadrature a, b and tau must be positive");
    if (quad.s_end <= quad.s_begin) throw ConfigError("quadrature needs at least one node");
    if (threads < 1) throw ConfigError("thread count must be positive");
  }
};

/// Settings of the four reference tables; D and the quadrature keep the
/// defaults D = 5, a = 6, b = 5, tau = 0.003, 300 nodes.
inline RunConfig preset(int table) {
  RunConfig cfg;
  cfg.table = table;
  const std::vector<std::int64_t> halving{10, 20, 40, 80, 160};
  switch (table) {
    case 1:
      cfg.dims = {5, 10, 100, 1000, 10000, 100000, 1000000, 10000000, 100000000};
      cfg.orders = {4};
      cfg.steps = {40};
      cfg.x1 = {0.0, 1.0, 2.0, 3.0, 4.0};
      break;
    case 2:
      cfg.dims = {5, 50, 500, 5000, 50000};
      cfg.orders = {4, 3, 2, 1};
      cfg.steps = halving;
      break;
    case 3:
      cfg.dims = {100000, 1000000, 10000000};
      cfg.orders = {4, 3};
      cfg.steps = halving;
      break;
    case 4:
      cfg.dims = {3};
      cfg.orders = {4, 3, 2, 1};
      cfg.steps = halving;
      cfg.point = PointKind::diagonal;
      break;
    default:
      throw ConfigError("unknown table " + std::to_string(table));
  }
  return cfg;
}

struct RateRow {
  std::int64_t n = 0;
  int M = 0;
  double h = 0.0;
  double x1 = 0.0;
  double exact = 0.0;
  double approx = 0.0;
  double abs_err = 0.0;
  std::optional<double> rel_err;
  std::optional<double> rate;
};

namespace detail {

inline std::int64_t grid_index(double x, double h) {
  const double k = std::round(x / h);
  if (std::abs(k * h - x) > 1e-9 * std::max(1.0, std::abs(x)))
    throw ConfigError("point coordinate is not a grid point for h = " + std::to_string(h));
  return static_cast<std::int64_t>(k);
}

inline bool use_symmetric(const RunConfig& cfg, std::int64_t n) {
  switch (cfg.path) {
    case PathChoice::symmetric:
      if (n < 5) throw ConfigError("the symmetric path requires n >= 5");
      if (cfg.point != PointKind::axis) throw ConfigError("the symmetric path requires axis points");
      return true;
    case PathChoice::generic:
      return false;
    case PathChoice::automatic:
      return n >= 5 && cfg.point == PointKind::axis;
  }
  return false;
}

}  // namespace detail

/// Computes one row per (n, M, x1, h) in that nesting order. The rate of a row
/// is log(err_prev / err) / log(h_prev / h) against the preceding row of the
/// same (n, M, x1) group; it is empty for the first row or a zero error.
inline std::vector<RateRow> run_table(const RunConfig& cfg) {
  cfg.validate();
  std::vector<RateRow> rows;
  const EvalOptions opts{cfg.threads};
  for (const std::int64_t n : cfg.dims) {
    const bool symmetric = detail::use_symmetric(cfg, n);
    const auto density = IsotropicGaussianPolyDensity::test_density(n);
    for (const int M : cfg.orders) {
      for (const double x : cfg.x1) {
        std::optional<RateRow> prev;
        for (const std::int64_t step : cfg.steps) {
          const GridSpec grid{1.0 / static_cast<double>(step), cfg.D, cfg.radius};
          const std::int64_t k1 = detail::grid_index(x, grid.h);
          RateRow row;
          row.n = n;
          row.M = M;
          row.h = grid.h;
          row.x1 = x;
          const double r2 = cfg.point == PointKind::axis ? x * x : static_cast<double>(n) * x * x;
          row.exact = std::exp(-r2);
          if (symmetric) {
            row.approx =
                evaluate_symmetric(density, AxisPoint{k1}, grid, BasisOrder(M), cfg.quad, opts).value;
          } else {
            const auto sep = expand(density, grid);
            std::vector<std::int64_t> k(static_cast<std::size_t>(n), 0);
            if (cfg.point == PointKind::axis) k[0] = k1;
            else k.assign(k.size(), k1);
            const std::vector<std::vector<std::int64_t>> pts{k};
            row.approx = evaluate(sep, pts, grid, BasisOrder(M), cfg.quad, opts).front().value;
          }
          row.abs_err = std::abs(row.approx - row.exact);
          if (row.exact != 0.0) row.rel_err = row.abs_err / std::abs(row.exact);
          if (prev && prev->abs_err > 0.0 && row.abs_err > 0.0)
            row.rate = std::log(prev->abs_err / row.abs_err) / std::log(prev->h / row.h);
          rows.push_back(row);
          prev = row;
        }
      }
    }
  }
  return rows;
}

inline constexpr const char* kCsvHeader = "n,M,h,x1,exact,approx,abs_err,rel_err,rate";

/// CSV with 16 significant digits in C-locale scientific notation.
inline std::string to_csv(const std::vector<RateRow>& rows) {
  std::string out = std::string(kCsvHeader) + "\n";
  char buf[512];
  auto num = [&](std::optional<double> v) -> std::string {
    if (!v) return "";
    std::snprintf(buf, sizeof buf, "%.15e", *v);
    return buf;
  };
  for (const auto& r : rows) {
    out += std::to_string(r.n) + "," + std::to_string(r.M) + "," + num(r.h) + "," + num(r.x1) +
           "," + num(r.exact) + "," + num(r.approx) + "," + num(r.abs_err) + "," +
           num(r.rel_err) + "," + num(r.rate) + "\n";
  }
  return out;
}

/// Columns "h abs_err", one block per (n, M) series in row order, blocks
/// separated by a single blank line.
inline std::string format_plot_data(const std::vector<RateRow>& rows) {
  if (rows.empty()) throw ConfigError("plot data needs at least one row");
  std::string out;
  char buf[128];
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (i > 0 && (rows[i].n != rows[i - 1].n || rows[i].M != rows[i - 1].M)) out += "\n";
    std::snprintf(buf, sizeof buf, "%.15e %.15e\n", rows[i].h, rows[i].abs_err);
    out += buf;
  }
  return out;
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw Error("cannot open '" + path + "' for writing");
  os << text;
  os.flush();
  if (!os) throw Error("write to '" + path + "' failed");
}

inline void emit_plot_data(const std::vector<RateRow>& rows, const std::string& path) {
  write_text_file(path, format_plot_data(rows));
}

}  // namespace biharm::harness

#endif  // BIHARM_HARNESS_HPP
