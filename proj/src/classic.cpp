#include "lowmem/classic.hpp"

#include <cmath>

#include "lowmem/clock.hpp"
#include <limits>
#include <stdexcept>

namespace lowmem {

namespace {

class Runner {
 public:
  Runner(const ProblemInstance& problem, const RunOptions& opts, std::string method)
      : problem_(problem), opts_(opts) {
    report.method = std::move(method);
  }

  OracleResponse call(const DenseVector& x) {
    ++report.oracle_calls;
    return problem_.objective(x);
  }

  void record(int k, const DenseVector& x, const OracleResponse& r, double step, double dnorm) {
    report.max_dual_norm = std::max(report.max_dual_norm, dnorm);
    if (!opts_.record_iterates) return;
    report.trace.records.push_back({k, x, r.value, step, dnorm, report.oracle_calls, elapsed_ns(start_)});
  }

  void notify(int k, const DenseVector& x, const OracleResponse& r, double step, const DenseVector& x_next) {
    if (opts_.observer) opts_.observer(StepEvent{k, x, r, step, x_next, true});
  }

  void finish(DenseVector x_out) {
    report.f_out = problem_.objective(x_out).value;
    ++report.oracle_calls;
    report.x_out = std::move(x_out);
  }

  SolverReport report;

 private:
  const ProblemInstance& problem_;
  const RunOptions& opts_;
  SteadyTime start_ = now();
};

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) throw std::invalid_argument(std::string(what) + " must be positive");
}

void require_iterations(int N) {
  if (N < 1) throw std::invalid_argument("iteration count N must be >= 1");
}

DenseVector start_point(const ProxSetup& setup, const RunOptions& opts) {
  DenseVector x0 = opts.x0 ? *opts.x0 : setup.prox_center();
  if (x0.size() != setup.dim()) throw std::invalid_argument("start point dimension mismatch");
  if (!setup.contains(x0)) throw std::invalid_argument("start point lies outside the feasible set");
  return x0;
}

void require_match(const ProblemInstance& problem, const ProxSetup& setup) {
  if (problem.dim() != setup.dim()) throw std::invalid_argument("problem and setup dimensions differ");
}

}  // namespace

SolverReport run_shor(const ProblemInstance& problem, const DenseVector& x0, double lambda, int N,
                      const RunOptions& opts) {
  require_positive(lambda, "lambda");
  require_iterations(N);
  if (x0.size() != problem.dim()) throw std::invalid_argument("run_shor: start point dimension mismatch");
  Runner run(problem, opts, "shor");
  const DenseVector* xs = problem.known_opt ? &problem.known_opt->x_star : nullptr;
  double min_dist = std::numeric_limits<double>::infinity();
  double best_f = std::numeric_limits<double>::infinity();
  DenseVector best = x0;
  DenseVector x = x0;
  for (int k = 0;; ++k) {
    if (xs) min_dist = std::min(min_dist, (x - *xs).norm());
    const OracleResponse r = run.call(x);
    const double gn = r.subgradient.norm();
    if (r.value < best_f) {
      best_f = r.value;
      best = x;
    }
    if (gn == 0.0) {
      run.record(k, x, r, 0.0, 0.0);
      run.report.exact_optimum = true;
      run.report.iterations = k;
      best = x;
      break;
    }
    if (k == N) {
      run.record(k, x, r, 0.0, gn);
      run.report.iterations = N;
      break;
    }
    const double h = lambda / gn;
    DenseVector next = x - h * r.subgradient;
    run.record(k, x, r, h, gn);
    run.notify(k, x, r, h, next);
    x = std::move(next);
  }
  if (xs) run.report.min_distance = min_dist;
  run.report.bound = std::nullopt;
  run.finish(best);
  return run.report;
}

SolverReport run_fixed_md(const ProblemInstance& problem, const ProxSetup& setup, double R, double M, int N,
                          const RunOptions& opts) {
  require_match(problem, setup);
  require_positive(R, "R");
  require_positive(M, "M");
  require_iterations(N);
  Runner run(problem, opts, "fixed_md");
  DenseVector x = start_point(setup, opts);
  const bool euclid = setup.is_euclidean();
  if (problem.known_opt) {
    const DenseVector& xs = problem.known_opt->x_star;
    const double need = euclid ? (x - xs).norm() : std::sqrt(setup.bregman(x, xs));
    if (need > R * (1.0 + 1e-12)) throw std::invalid_argument("run_fixed_md: R is smaller than the start distance");
  }
  const double sqrt_n = std::sqrt(static_cast<double>(N));
  const double h = euclid ? R / (M * sqrt_n) : std::sqrt(2.0) * R / (M * sqrt_n);
  DenseVector sum = DenseVector::Zero(x.size());
  for (int k = 0; k < N; ++k) {
    const OracleResponse r = run.call(x);
    const double gn = setup.dual_norm(r.subgradient);
    if (gn > M * (1.0 + 1e-12)) run.report.lipschitz_violation = true;
    sum += x;
    if (gn == 0.0) {
      // x is a fixed point: every later iterate equals it.
      run.record(k, x, r, h, 0.0);
      if (opts.record_iterates) run.report.trace.weights.push_back(static_cast<double>(N - k) / N);
      sum += static_cast<double>(N - k - 1) * x;
      run.report.exact_optimum = true;
      run.report.iterations = k;
      break;
    }
    DenseVector next = setup.mirror_step(x, h * r.subgradient);
    run.record(k, x, r, h, gn);
    if (opts.record_iterates) run.report.trace.weights.push_back(1.0 / N);
    run.notify(k, x, r, h, next);
    x = std::move(next);
    run.report.iterations = k + 1;
  }
  run.report.bound = euclid ? M * R / sqrt_n : std::sqrt(2.0) * M * R / sqrt_n;
  run.finish(sum / static_cast<double>(N));
  return run.report;
}

SolverReport run_adaptive_md(const ProblemInstance& problem, const ProxSetup& setup, double eps, int N,
                             const RunOptions& opts) {
  require_match(problem, setup);
  require_positive(eps, "eps");
  require_iterations(N);
  Runner run(problem, opts, "adaptive_md");
  const DenseVector x0 = start_point(setup, opts);
  DenseVector x = x0;
  DenseVector weighted = DenseVector::Zero(x.size());
  double hsum = 0.0;
  for (int k = 0; k < N; ++k) {
    const OracleResponse r = run.call(x);
    const double gn = setup.dual_norm(r.subgradient);
    if (gn == 0.0) {
      run.record(k, x, r, 0.0, 0.0);
      run.report.exact_optimum = true;
      run.report.iterations = k;
      run.report.bound = 0.0;
      run.finish(x);
      return run.report;
    }
    const double h = eps / (gn * gn);
    DenseVector next = setup.mirror_step(x, h * r.subgradient);
    run.record(k, x, r, h, gn);
    if (opts.record_iterates) run.report.trace.weights.push_back(h);
    run.notify(k, x, r, h, next);
    weighted += h * x;
    hsum += h;
    x = std::move(next);
    run.report.iterations = k + 1;
  }
  if (opts.record_iterates)
    for (double& w : run.report.trace.weights) w /= hsum;
  std::optional<double> v0;
  if (problem.known_opt) v0 = setup.bregman(x0, problem.known_opt->x_star);
  else if (setup.theta0_sq()) v0 = *setup.theta0_sq();
  if (v0) run.report.bound = *v0 / hsum + 0.5 * eps;
  run.finish(weighted / hsum);
  return run.report;
}

SolverReport run_normalized_md(const ProblemInstance& problem, const ProxSetup& setup, double R, int N,
                               const RunOptions& opts) {
  require_match(problem, setup);
  if (!setup.is_euclidean()) throw std::invalid_argument("run_normalized_md needs a Euclidean setup");
  require_positive(R, "R");
  require_iterations(N);
  Runner run(problem, opts, "normalized_md");
  DenseVector x = start_point(setup, opts);
  DenseVector best = x;
  double best_f = std::numeric_limits<double>::infinity();
  const double sqrt_n = std::sqrt(static_cast<double>(N));
  for (int k = 0; k < N; ++k) {
    const OracleResponse r = run.call(x);
    const double gn = r.subgradient.norm();
    if (r.value < best_f) {
      best_f = r.value;
      best = x;
    }
    if (gn == 0.0) {
      run.record(k, x, r, 0.0, 0.0);
      run.report.exact_optimum = true;
      run.report.iterations = k;
      best = x;
      break;
    }
    const double h = R / (gn * sqrt_n);
    DenseVector next = setup.mirror_step(x, h * r.subgradient);
    run.record(k, x, r, h, gn);
    run.notify(k, x, r, h, next);
    x = std::move(next);
    run.report.iterations = k + 1;
  }
  run.report.bound = run.report.exact_optimum ? 0.0 : run.report.max_dual_norm * R / sqrt_n;
  run.finish(best);
  return run.report;
}

SolverReport run_strongly_convex_md(const ProblemInstance& problem, const ProxSetup& setup, double mu, int N,
                                    const RunOptions& opts) {
  require_match(problem, setup);
  if (!setup.is_euclidean()) throw std::invalid_argument("run_strongly_convex_md needs a Euclidean setup");
  require_positive(mu, "mu");
  require_iterations(N);
  Runner run(problem, opts, "strongly_convex_md");
  DenseVector x = start_point(setup, opts);
  DenseVector weighted = DenseVector::Zero(x.size());
  const double denom = static_cast<double>(N) * (N + 1);
  double m_seen = 0.0;  // max |g| over x^1..x^N
  for (int k = 0; k <= N; ++k) {
    if (k >= 1) weighted += (2.0 * k / denom) * x;
    const OracleResponse r = run.call(x);
    const double gn = r.subgradient.norm();
    if (k >= 1) m_seen = std::max(m_seen, gn);
    if (gn == 0.0) {
      run.record(k, x, r, 0.0, 0.0);
      if (opts.record_iterates) run.report.trace.weights.push_back(k >= 1 ? 2.0 * k / denom : 0.0);
      // remaining iterates stay at x
      for (int j = k + 1; j <= N; ++j) {
        weighted += (2.0 * j / denom) * x;
        if (opts.record_iterates) run.report.trace.weights.push_back(2.0 * j / denom);
      }
      run.report.exact_optimum = true;
      run.report.iterations = k;
      break;
    }
    if (k == N) {
      run.record(k, x, r, 0.0, gn);
      if (opts.record_iterates) run.report.trace.weights.push_back(2.0 * k / denom);
      run.report.iterations = N;
      break;
    }
    const double h = 2.0 / (mu * (k + 1));
    DenseVector next = setup.mirror_step(x, h * r.subgradient);
    run.record(k, x, r, h, gn);
    if (opts.record_iterates) run.report.trace.weights.push_back(k >= 1 ? 2.0 * k / denom : 0.0);
    run.notify(k, x, r, h, next);
    x = std::move(next);
  }
  run.report.bound = 2.0 * m_seen * m_seen / (mu * (N + 1));
  run.finish(weighted);
  return run.report;
}

}  // namespace lowmem
