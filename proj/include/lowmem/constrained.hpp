#pragma once

#include <optional>
#include <string>
#include <vector>

#include "lowmem/classic.hpp"

namespace lowmem {

struct ConstrainedRecord {
  int k = 0;
  double f_value = 0.0;
  double g_value = 0.0;
  double step = 0.0;
  double dual_norm = 0.0;  // M_k
  bool productive = false;
  long oracle_calls = 0;
  std::int64_t elapsed_ns = 0;
};

struct ConstrainedOptions {
  StepObserver observer;
  // Overrides the setup's theta0_sq.
  std::optional<double> theta0_sq;
  long max_iterations = 50'000'000;
  bool record_trace = true;
};

struct ConstrainedReport {
  std::string method;
  DenseVector x_bar;
  std::optional<DenseVector> lambda_bar;  // Algorithm 2 only
  int iterations = 0;
  int productive_count = 0;
  double stop_sum = 0.0;
  double stop_threshold = 0.0;
  double theta0_sq = 0.0;
  std::string theta0_source;  // "setup" or "override"
  double eps = 0.0;
  double f_value = 0.0;
  double g_value = 0.0;
  bool exact_optimum = false;      // zero objective subgradient on a productive step
  bool no_productive_steps = false;
  bool hit_iteration_cap = false;
  // Theorem iteration bound, when M_f and M_g are known.
  std::optional<long> iteration_bound;
  // Algorithm 3 with known x*: min over productive iterates of v_f[x*](x^i).
  std::optional<double> min_vf;
  long oracle_calls = 0;
  std::vector<ConstrainedRecord> trace;
};

// Algorithm 2 (non-smooth Lipschitz objective) with the dual estimate lambda_bar.
ConstrainedReport solve_constrained_nonsmooth(const ProblemInstance& problem, const ProxSetup& setup, double eps,
                                              const ConstrainedOptions& opts = {});

// Algorithm 3 (objective need not be Lipschitz); returns the best productive iterate.
ConstrainedReport solve_constrained_general(const ProblemInstance& problem, const ProxSetup& setup, double eps,
                                            const ConstrainedOptions& opts = {});

// v_f[y](x) = <g/|g|_*, x - y>, 0 when g = 0.
double v_f(const ProxSetup& setup, const DenseVector& grad_at_x, const DenseVector& x, const DenseVector& y);

struct SmoothnessData {
  std::vector<double> grad_norms_at_opt;  // |grad f_i(x*)|_*
  std::vector<double> grad_lipschitz;     // L_i
};

struct Certificates {
  double duality_gap = 0.0;  // f(x) - phi(lambda)
  double g_value = 0.0;
  std::optional<double> f_gap;      // f(x) - f*, when f* is known
  std::optional<double> eps_tilde;  // smooth-objective bound
};

// max{eps, eps max_i |grad f_i(x*)|_* + eps^2 max_i L_i / 2}
double corollary_eps(double eps, const SmoothnessData& data);

// Throws std::invalid_argument on a negative multiplier.
Certificates certify(const ProblemInstance& problem, const DenseVector& x, const DenseVector& lambda,
                     const DualFunction& phi, double eps, const std::optional<SmoothnessData>& smooth = std::nullopt);
Certificates certify(const ProblemInstance& problem, const ConstrainedReport& report, const DualFunction& phi,
                     const std::optional<SmoothnessData>& smooth = std::nullopt);

}  // namespace lowmem
