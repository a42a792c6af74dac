#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

namespace lowmem {

// Bad or incomplete configuration (CLI exit code 2).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Unavailable entries are NaN and print as "nan".
struct TraceRow {
  long k = 0;
  double f_value = 0.0;
  double g_value = 0.0;  // constraint value, or the saddle gap for VI methods
  double step = 0.0;
  double M_k = 0.0;
  long oracle_calls = 0;
  std::int64_t elapsed_ns = 0;
  double bound_value = 0.0;
};

inline const char* const kTraceHeader = "k,f_value,g_value,step,M_k,oracle_calls,elapsed_ns,bound_value";

struct BoundCheck {
  std::string name;
  double measured = 0.0;
  double bound = 0.0;
  bool ok = true;
};

struct ExperimentResult {
  std::string method;
  std::vector<TraceRow> rows;
  std::vector<BoundCheck> checks;
  nlohmann::json summary;  // no timing data, so it is reproducible byte for byte

  bool all_bounds_ok() const;
};

const std::vector<std::string>& available_methods();
const std::vector<std::string>& available_generators();

// Runs one experiment fully in memory. Throws ConfigError on a bad config.
ExperimentResult run_experiment(const nlohmann::json& config);

std::string format_double(double v);
std::string trace_csv(const std::vector<TraceRow>& rows);
// Parses a trace written by trace_csv.
std::vector<TraceRow> parse_trace_csv(std::istream& in);

// 64-bit FNV-1a of the CSV text with the elapsed_ns column removed.
std::string trace_digest(const std::vector<TraceRow>& rows);
std::string csv_digest(const std::string& csv_text);

// Least-squares slope of log(value) against log(k) over the trailing half.
// Needs at least 10 points, k > 0 and finite positive values.
double fit_rate(const std::vector<double>& k, const std::vector<double>& values);
// Column of a trace (rows with k >= 1 and a non-NaN entry), minus `subtract`.
double fit_rate(const std::vector<TraceRow>& rows, const std::string& column, double subtract = 0.0);

// Loads the config, runs it and writes the trace and summary. Returns the CLI
// exit code: 0 ok, 1 I/O, 2 config, 3 bound violation (with check_bounds).
int run_experiment_file(const std::string& config_path, const std::string& out_dir, bool check_bounds,
                        std::ostream& out, std::ostream& err);

}  // namespace lowmem
