// biharm: reproduce the benchmark tables of the biharmonic cubature and run
// the self-verification suite.
//
//   biharm --table 2 --out table2.csv --plot table2.dat
//   biharm --table custom --dims 5,50 --orders 4 --steps 20,40 --x1 1
//   biharm --verify quick
//
// Exit status: 0 success, 1 verification failure or engine error,
// 2 configuration error.

#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "biharm/harness.hpp"
#include "biharm/verify.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;

int run_verify(const std::string& level_name) {
  const auto level = level_name == "full" ? biharm::verify::Level::full : biharm::verify::Level::quick;
  const auto results = biharm::verify::run_verify(level);
  int failed = 0;
  for (const auto& r : results) {
    std::printf("%s  %-70s measured=%.3e tol=%.1e (%.2fs)%s%s\n", r.passed ? "PASS" : "FAIL",
                r.name.c_str(), r.measured, r.tolerance, r.seconds, r.detail.empty() ? "" : "  ",
                r.detail.c_str());
    if (!r.passed) ++failed;
  }
  std::printf("%zu checks, %d failed\n", results.size(), failed);
  return failed == 0 ? kExitOk : kExitFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"High-order cubature of the n-dimensional biharmonic potential"};
  app.set_config("--config", "", "INI or TOML file with option values");

  std::string table = "2";
  std::string verify_level;
  std::vector<std::int64_t> dims;
  std::vector<int> orders;
  std::vector<std::int64_t> steps;
  std::vector<double> x1;
  std::string point;
  std::string path = "auto";
  double delta = 5.0;
  double radius = 6.5;
  double quad_a = 6.0;
  double quad_b = 5.0;
  double quad_tau = 0.003;
  std::int64_t quad_nodes = 300;
  std::string out_path;
  std::string plot_path;
  int threads = 0;

  app.add_option("--table", table, "Table preset: 1, 2, 3, 4 or custom")
      ->check(CLI::IsMember({"1", "2", "3", "4", "custom"}));
  app.add_option("--verify", verify_level, "Run the self-verification suite instead of a table")
      ->check(CLI::IsMember({"quick", "full"}));
  app.add_option("--dims", dims, "Space dimensions n")->delimiter(',');
  app.add_option("--orders", orders, "Orders M (accuracy h^{2M})")->delimiter(',');
  app.add_option("--steps", steps, "Grid steps as integers h^{-1}")->delimiter(',');
  app.add_option("--x1", x1, "Evaluation coordinates")->delimiter(',');
  app.add_option("--point", point, "Point family: axis (x1,0,...,0) or diagonal (x1,...,x1)")
      ->check(CLI::IsMember({"axis", "diagonal"}));
  app.add_option("--path", path, "Evaluation path: auto, generic or symmetric")
      ->check(CLI::IsMember({"auto", "generic", "symmetric"}));
  app.add_option("--delta", delta, "Shape parameter D");
  app.add_option("--radius", radius, "Density truncation radius");
  app.add_option("--quad-a", quad_a, "Double-exponential parameter a");
  app.add_option("--quad-b", quad_b, "Double-exponential parameter b");
  app.add_option("--quad-tau", quad_tau, "Trapezoidal step tau");
  app.add_option("--quad-nodes", quad_nodes, "Number of quadrature nodes");
  app.add_option("--out", out_path, "CSV output file (default: stdout)");
  app.add_option("--plot", plot_path, "Two-column plot data file");
  app.add_option("--threads", threads, "Worker threads (default: BIHARM_THREADS or 1)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  if (!verify_level.empty()) return run_verify(verify_level);

  using namespace biharm::harness;
  try {
    RunConfig cfg = table == "custom" ? RunConfig{} : preset(std::stoi(table));
    if (!dims.empty()) cfg.dims = dims;
    if (!orders.empty()) cfg.orders = orders;
    if (!steps.empty()) cfg.steps = steps;
    if (!x1.empty()) cfg.x1 = x1;
    if (!point.empty()) cfg.point = point == "diagonal" ? PointKind::diagonal : PointKind::axis;
    cfg.path = path == "generic"     ? PathChoice::generic
               : path == "symmetric" ? PathChoice::symmetric
                                     : PathChoice::automatic;
    cfg.D = delta;
    cfg.radius = radius;
    cfg.quad.a = quad_a;
    cfg.quad.b = quad_b;
    cfg.quad.tau = quad_tau;
    cfg.quad.s_end = cfg.quad.s_begin + quad_nodes;
    if (threads == 0) {
      const char* env = std::getenv("BIHARM_THREADS");
      threads = env ? std::atoi(env) : 1;
    }
    cfg.threads = threads;
    cfg.validate();

    const auto rows = run_table(cfg);
    const std::string csv = to_csv(rows);
    if (out_path.empty()) std::fwrite(csv.data(), 1, csv.size(), stdout);
    else write_text_file(out_path, csv);
    if (!plot_path.empty()) emit_plot_data(rows, plot_path);
  } catch (const ConfigError& e) {
    std::cerr << "biharm: configuration error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "biharm: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitOk;
}
