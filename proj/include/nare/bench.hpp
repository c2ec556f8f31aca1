#pragma once

#include <functional>
#include <string>
#include <vector>

#include "nare/methods.hpp"

namespace nare {

/// One problem instance plus the methods to run on it. Fields that do not
/// apply to an example are NaN (xi and u for example 7.2).
struct BenchCase {
  std::string example;  // "7.1" or "7.2"
  Index n = 0;
  double omega = 0.0;
  double xi = 0.0;
  double eta = 0.0;
  double u = 0.0;
  std::vector<Method> methods;
};

struct BenchRow {
  std::string example;
  Index n = 0;
  double omega = 0.0, xi = 0.0, eta = 0.0, u = 0.0;
  std::string method;
  int it = 0;
  double nres = 0.0;
  double seconds = 0.0;
  double param_t = 0.0, param_gamma = 0.0;  // NaN for non-doubling methods
  double vartheta = 0.0, c_star = 0.0;      // NaN when not computed
  std::string status;                       // stop reason, or Error
};

NareProblem bench_problem(const BenchCase& c);

/// "full": the complete parameter grid of the given example.
/// "acceptance": the subset checked by the acceptance suite.
/// An empty example selects both tables.
std::vector<BenchCase> bench_preset(const std::string& name, const std::string& example, Index n);

/// Grid file: {"cases": [{"example": "7.1", "n": 512, "omega": 0.5, "xi": -1,
/// "eta": 4, "u": 0.01, "methods": ["SDA", ...]}, ...]}.
std::vector<BenchCase> bench_from_json(const std::string& text);

using BenchProgress = std::function<void(const BenchRow&)>;

/// Failures become rows with a non-converged status; the batch never aborts.
/// Rows come back in config order whatever the number of jobs.
std::vector<BenchRow> run_bench(const std::vector<BenchCase>& cases, const MethodOptions& opts = {},
                                int jobs = 1, const BenchProgress& progress = {});

std::string bench_csv_header();
std::string bench_csv(const std::vector<BenchRow>& rows);
std::vector<BenchRow> parse_bench_csv(const std::string& text);

}  // namespace nare
