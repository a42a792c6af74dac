#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "lowmem/experiment.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Low-memory first-order methods: experiment runner"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  bool check_bounds = false;
  CLI::App* solve = app.add_subcommand("solve", "Run one experiment from a JSON config");
  solve->add_option("--config", config_path, "Experiment config (JSON)")->required();
  solve->add_option("--out-dir", out_dir, "Directory for trace.csv and summary.json");
  solve->add_flag("--check-bounds", check_bounds, "Exit with code 3 when a bound check fails");

  std::string trace_path;
  std::string column;
  double subtract = 0.0;
  CLI::App* rates = app.add_subcommand("rates", "Fit the log-log slope of a trace column");
  rates->add_option("--trace", trace_path, "Trace CSV")->required();
  rates->add_option("--column", column, "Column name")->required();
  rates->add_option("--subtract", subtract, "Value subtracted before fitting (e.g. f*)");

  std::string hash_path;
  CLI::App* hash = app.add_subcommand("hash", "Digest of a trace CSV without the elapsed_ns column");
  hash->add_option("--trace", hash_path, "Trace CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (*solve) return lowmem::run_experiment_file(config_path, out_dir, check_bounds, std::cout, std::cerr);

  const std::string& path = *rates ? trace_path : hash_path;
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    std::cerr << "error: cannot read trace '" << path << "'\n";
    return 1;
  }
  if (*hash) {
    std::stringstream ss;
    ss << in.rdbuf();
    std::cout << lowmem::csv_digest(ss.str()) << "\n";
    return 0;
  }
  try {
    const auto rows = lowmem::parse_trace_csv(in);
    std::cout << lowmem::format_double(lowmem::fit_rate(rows, column, subtract)) << "\n";
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
