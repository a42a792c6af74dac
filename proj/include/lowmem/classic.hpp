#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "lowmem/geometry.hpp"
#include "lowmem/oracles.hpp"
#include "lowmem/problems.hpp"

namespace lowmem {

struct IterationRecord {
  int k = 0;
  DenseVector x;
  double f_value = 0.0;
  double step = 0.0;
  double dual_norm = 0.0;  // |g^k|_*
  long oracle_calls = 0;   // cumulative
  std::int64_t elapsed_ns = 0;
};

struct RunTrace {
  std::vector<IterationRecord> records;
  // Averaging weight attached to each record (empty for best-iterate methods).
  std::vector<double> weights;
};

// One mirror step x_next = Mirr[x](step * response.subgradient).
struct StepEvent {
  int k;
  const DenseVector& x;
  const OracleResponse& response;
  double step;
  const DenseVector& x_next;
  bool productive;
};
using StepObserver = std::function<void(const StepEvent&)>;

struct RunOptions {
  std::optional<DenseVector> x0;  // defaults to the prox center
  StepObserver observer;
  bool record_iterates = true;
};

struct SolverReport {
  std::string method;
  DenseVector x_out;
  double f_out = 0.0;
  int iterations = 0;
  bool exact_optimum = false;  // stopped on a zero subgradient
  long oracle_calls = 0;
  // Headline guarantee f(x_out) - f* <= bound (when computable).
  std::optional<double> bound;
  // Shor only: min_k |x^k - x*|_2 when x* is known.
  std::optional<double> min_distance;
  double max_dual_norm = 0.0;
  bool lipschitz_violation = false;  // an observed |g|_* exceeded the supplied M
  RunTrace trace;
};

// x^{k+1} = x^k - lambda g^k / |g^k|_2.
SolverReport run_shor(const ProblemInstance& problem, const DenseVector& x0, double lambda, int N,
                      const RunOptions& opts = {});

// Fixed step, uniform average of x^0..x^{N-1}. Euclidean: h = R/(M sqrt N),
// bound MR/sqrt N with R = |x^0 - x*|_2. Otherwise R^2 bounds V[x^0](x*),
// h = sqrt2 R/(M sqrt N) and the bound is sqrt2 MR/sqrt N.
SolverReport run_fixed_md(const ProblemInstance& problem, const ProxSetup& setup, double R, double M, int N,
                          const RunOptions& opts = {});

// h_k = eps / |g^k|_*^2, average weighted by h_k. The realized bound is
// V[x^0](x*)/sum h + eps/2 (theta0_sq stands in for V when x* is unknown).
SolverReport run_adaptive_md(const ProblemInstance& problem, const ProxSetup& setup, double eps, int N,
                             const RunOptions& opts = {});

// h_k = R/(|g^k|_2 sqrt N), best iterate; bound M R/sqrt N with M the largest
// observed |g|_2. Valid for quasi-convex objectives.
SolverReport run_normalized_md(const ProblemInstance& problem, const ProxSetup& setup, double R, int N,
                               const RunOptions& opts = {});

// h_k = 2/(mu (k+1)), x_bar = sum_{k=1}^N 2k/(N(N+1)) x^k; bound 2M^2/(mu(N+1)).
SolverReport run_strongly_convex_md(const ProblemInstance& problem, const ProxSetup& setup, double mu, int N,
                                    const RunOptions& opts = {});

}  // namespace lowmem
