#include "lowmem/constrained.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "lowmem/clock.hpp"

namespace lowmem {

namespace {

struct Prepared {
  DenseVector x0;
  double theta0_sq;
  std::string source;
};

Prepared prepare(const ProblemInstance& problem, const ProxSetup& setup, double eps,
                 const ConstrainedOptions& opts, const char* who) {
  if (!problem.constraints) throw std::invalid_argument(std::string(who) + ": problem has no constraints");
  if (problem.dim() != setup.dim()) throw std::invalid_argument(std::string(who) + ": dimension mismatch");
  if (!(eps > 0.0)) throw std::invalid_argument(std::string(who) + ": eps must be positive");
  Prepared p;
  if (opts.theta0_sq) {
    p.theta0_sq = *opts.theta0_sq;
    p.source = "override";
  } else if (setup.theta0_sq()) {
    p.theta0_sq = *setup.theta0_sq();
    p.source = "setup";
  } else {
    throw std::invalid_argument(std::string(who) + ": theta0_sq is unavailable for an unbounded set");
  }
  if (!(p.theta0_sq > 0.0)) throw std::invalid_argument(std::string(who) + ": theta0_sq must be positive");
  p.x0 = setup.prox_center();
  return p;
}

std::optional<long> ceil_bound(double numer, double eps) {
  const double v = std::ceil(numer / (eps * eps));
  if (!std::isfinite(v) || v > 9e18) return std::nullopt;
  return static_cast<long>(v);
}

}  // namespace

double v_f(const ProxSetup& setup, const DenseVector& grad_at_x, const DenseVector& x, const DenseVector& y) {
  const double n = setup.dual_norm(grad_at_x);
  if (n == 0.0) return 0.0;
  return grad_at_x.dot(x - y) / n;
}

ConstrainedReport solve_constrained_nonsmooth(const ProblemInstance& problem, const ProxSetup& setup, double eps,
                                              const ConstrainedOptions& opts) {
  const Prepared prep = prepare(problem, setup, eps, opts, "solve_constrained_nonsmooth");
  const ConstraintBundle& bundle = *problem.constraints;
  const SteadyTime start = now();
  ConstrainedReport rep;
  rep.method = "constrained_nonsmooth";
  rep.eps = eps;
  rep.theta0_sq = prep.theta0_sq;
  rep.theta0_source = prep.source;
  rep.stop_threshold = 2.0 * prep.theta0_sq / (eps * eps);
  if (problem.lipschitz_f && problem.lipschitz_g) {
    const double m = std::max(*problem.lipschitz_f, *problem.lipschitz_g);
    rep.iteration_bound = ceil_bound(2.0 * m * m * prep.theta0_sq, eps);
  }

  DenseVector x = prep.x0;
  DenseVector weighted = DenseVector::Zero(x.size());
  double h_prod = 0.0;
  DenseVector h_by_piece = DenseVector::Zero(static_cast<Index>(bundle.size()));
  int k = 0;
  while (true) {
    const OracleResponse gr = bundle.evaluate(x);
    const OracleResponse fr = problem.objective(x);
    rep.oracle_calls += 2;
    const bool productive = gr.value <= eps;
    const OracleResponse& used = productive ? fr : gr;
    const double mk = setup.dual_norm(used.subgradient);
    if (mk == 0.0) {
      if (!productive)
        throw DomainError("zero constraint subgradient on a non-productive step");
      // x minimizes f over X and is eps-feasible.
      rep.exact_optimum = true;
      weighted = x;
      h_prod = 1.0;
      h_by_piece.setZero();
      ++rep.productive_count;
      if (opts.record_trace) rep.trace.push_back({k, fr.value, gr.value, 0.0, 0.0, true, rep.oracle_calls, elapsed_ns(start)});
      ++k;
      break;
    }
    const double h = eps / (mk * mk);
    DenseVector next = setup.mirror_step(x, h * used.subgradient);
    if (opts.record_trace) rep.trace.push_back({k, fr.value, gr.value, h, mk, productive, rep.oracle_calls, elapsed_ns(start)});
    if (opts.observer) opts.observer(StepEvent{k, x, used, h, next, productive});
    if (productive) {
      weighted += h * x;
      h_prod += h;
      ++rep.productive_count;
    } else {
      h_by_piece[static_cast<Index>(*gr.active_index)] += h;
    }
    rep.stop_sum += 1.0 / (mk * mk);
    x = std::move(next);
    ++k;
    if (rep.stop_sum >= rep.stop_threshold) break;
    if (k >= opts.max_iterations) {
      rep.hit_iteration_cap = true;
      break;
    }
  }
  rep.iterations = k;
  if (rep.productive_count == 0) {
    rep.no_productive_steps = true;
    rep.x_bar = x;
    rep.lambda_bar = std::nullopt;
  } else {
    rep.x_bar = weighted / h_prod;
    rep.lambda_bar = h_by_piece / h_prod;
  }
  rep.f_value = problem.objective(rep.x_bar).value;
  rep.g_value = bundle.evaluate(rep.x_bar).value;
  rep.oracle_calls += 2;
  return rep;
}

ConstrainedReport solve_constrained_general(const ProblemInstance& problem, const ProxSetup& setup, double eps,
                                            const ConstrainedOptions& opts) {
  const Prepared prep = prepare(problem, setup, eps, opts, "solve_constrained_general");
  const ConstraintBundle& bundle = *problem.constraints;
  const SteadyTime start = now();
  ConstrainedReport rep;
  rep.method = "constrained_general";
  rep.eps = eps;
  rep.theta0_sq = prep.theta0_sq;
  rep.theta0_source = prep.source;
  rep.stop_threshold = 2.0 * prep.theta0_sq / (eps * eps);
  if (problem.lipschitz_g) {
    const double m = std::max(1.0, *problem.lipschitz_g);
    rep.iteration_bound = ceil_bound(2.0 * m * m * prep.theta0_sq, eps);
  }
  const std::optional<DenseVector> xs =
      problem.known_opt ? std::optional<DenseVector>(problem.known_opt->x_star) : std::nullopt;

  DenseVector x = prep.x0;
  DenseVector best;
  double best_f = std::numeric_limits<double>::infinity();
  double min_vf = std::numeric_limits<double>::infinity();
  double nonprod_sum = 0.0;
  int k = 0;
  while (true) {
    const OracleResponse gr = bundle.evaluate(x);
    const OracleResponse fr = problem.objective(x);
    rep.oracle_calls += 2;
    const bool productive = gr.value <= eps;
    if (productive) {
      const double gn = setup.dual_norm(fr.subgradient);
      ++rep.productive_count;
      if (xs) min_vf = std::min(min_vf, v_f(setup, fr.subgradient, x, *xs));
      if (gn == 0.0) {
        rep.exact_optimum = true;
        best = x;
        best_f = fr.value;
        if (opts.record_trace) rep.trace.push_back({k, fr.value, gr.value, 0.0, 0.0, true, rep.oracle_calls, elapsed_ns(start)});
        ++k;
        break;
      }
      if (fr.value < best_f) {
        best_f = fr.value;
        best = x;
      }
      const double h = eps / gn;
      DenseVector next = setup.mirror_step(x, h * fr.subgradient);
      if (opts.record_trace) rep.trace.push_back({k, fr.value, gr.value, h, gn, true, rep.oracle_calls, elapsed_ns(start)});
      if (opts.observer) opts.observer(StepEvent{k, x, fr, h, next, true});
      x = std::move(next);
    } else {
      const double gn = setup.dual_norm(gr.subgradient);
      if (gn == 0.0) throw DomainError("zero constraint subgradient on a non-productive step");
      const double h = eps / (gn * gn);
      DenseVector next = setup.mirror_step(x, h * gr.subgradient);
      if (opts.record_trace) rep.trace.push_back({k, fr.value, gr.value, h, gn, false, rep.oracle_calls, elapsed_ns(start)});
      if (opts.observer) opts.observer(StepEvent{k, x, gr, h, next, false});
      nonprod_sum += 1.0 / (gn * gn);
      x = std::move(next);
    }
    ++k;
    rep.stop_sum = rep.productive_count + nonprod_sum;
    if (rep.stop_sum >= rep.stop_threshold) break;
    if (k >= opts.max_iterations) {
      rep.hit_iteration_cap = true;
      break;
    }
  }
  rep.stop_sum = rep.productive_count + nonprod_sum;
  rep.iterations = k;
  if (rep.productive_count == 0) {
    rep.no_productive_steps = true;
    rep.x_bar = x;
  } else {
    rep.x_bar = best;
  }
  if (xs && rep.productive_count > 0) rep.min_vf = min_vf;
  rep.f_value = problem.objective(rep.x_bar).value;
  rep.g_value = bundle.evaluate(rep.x_bar).value;
  rep.oracle_calls += 2;
  return rep;
}

double corollary_eps(double eps, const SmoothnessData& data) {
  double gmax = 0.0;
  double lmax = 0.0;
  for (double v : data.grad_norms_at_opt) gmax = std::max(gmax, v);
  for (double v : data.grad_lipschitz) lmax = std::max(lmax, v);
  return std::max(eps, eps * gmax + eps * eps * lmax / 2.0);
}

Certificates certify(const ProblemInstance& problem, const DenseVector& x, const DenseVector& lambda,
                     const DualFunction& phi, double eps, const std::optional<SmoothnessData>& smooth) {
  if (!phi) throw std::invalid_argument("certify: no Lagrangian minimizer supplied");
  for (Index i = 0; i < lambda.size(); ++i)
    if (!(lambda[i] >= 0.0)) throw std::invalid_argument("certify: negative multiplier in lambda_bar");
  Certificates c;
  const double fx = problem.f(x);
  c.duality_gap = fx - phi(lambda);
  c.g_value = problem.g(x).value_or(-std::numeric_limits<double>::infinity());
  if (problem.known_opt) c.f_gap = fx - problem.known_opt->f_star;
  if (smooth) c.eps_tilde = corollary_eps(eps, *smooth);
  return c;
}

Certificates certify(const ProblemInstance& problem, const ConstrainedReport& report, const DualFunction& phi,
                     const std::optional<SmoothnessData>& smooth) {
  if (!report.lambda_bar) throw std::invalid_argument("certify: report carries no dual estimate");
  return certify(problem, report.x_bar, *report.lambda_bar, phi, report.eps, smooth);
}

}  // namespace lowmem
