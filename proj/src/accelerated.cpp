#include "lowmem/accelerated.hpp"

#include <cmath>
#include <stdexcept>

#include "lowmem/clock.hpp"

namespace lowmem {

double alpha_root(double C, double M) {
  if (!(M > 0.0)) throw std::invalid_argument("alpha_root: M must be positive");
  if (!(C >= 0.0)) throw std::invalid_argument("alpha_root: C must be non-negative");
  return (1.0 + std::sqrt(1.0 + 4.0 * M * C)) / (2.0 * M);
}

namespace {

DenseVector start_of(const ProxSetup& setup, const AgmOptions& opts) {
  DenseVector x0 = opts.x0 ? *opts.x0 : setup.prox_center();
  if (x0.size() != setup.dim()) throw std::invalid_argument("accelerated method: start point dimension mismatch");
  if (!setup.contains(x0)) throw std::invalid_argument("accelerated method: start point is infeasible");
  return x0;
}

void check_finite(const OracleResponse& r) {
  if (!std::isfinite(r.value) || !r.subgradient.allFinite())
    throw std::runtime_error("accelerated method: non-finite oracle output");
}

}  // namespace

AgmReport agm_solve(const ProblemInstance& problem, const ProxSetup& setup, double L, int N,
                    const AgmOptions& opts) {
  if (problem.dim() != setup.dim()) throw std::invalid_argument("agm_solve: dimension mismatch");
  if (!(L > 0.0)) throw std::invalid_argument("agm_solve: L must be positive");
  if (N < 0) throw std::invalid_argument("agm_solve: N must be non-negative");
  const SteadyTime start = now();
  AgmReport rep;
  rep.method = "agm";
  rep.x0 = start_of(setup, opts);
  DenseVector y = rep.x0;
  DenseVector z = rep.x0;
  double C = 0.0;
  double fy = problem.objective(y).value;
  rep.oracle_calls = 1;
  rep.trace.push_back({0, fy, 0.0, 0.0, L, 0, rep.oracle_calls, 0.0, 0.0, elapsed_ns(start)});
  if (opts.keep_iterates) rep.iterates.push_back(y);
  for (int k = 0; k < N; ++k) {
    const double alpha = alpha_root(C, L);
    const double C_next = C + alpha;
    const DenseVector x = (alpha * z + C * y) / C_next;
    const OracleResponse gx = problem.objective(x);
    check_finite(gx);
    z = setup.mirror_step(z, alpha * gx.subgradient);
    y = (alpha * z + C * y) / C_next;
    C = C_next;
    fy = problem.objective(y).value;
    rep.oracle_calls += 2;
    rep.trace.push_back({k + 1, fy, alpha, C, L, 1, rep.oracle_calls, 0.0, 0.0, elapsed_ns(start)});
    if (opts.keep_iterates) rep.iterates.push_back(y);
  }
  rep.y = y;
  rep.f_y = fy;
  rep.iterations = N;
  return rep;
}

AgmReport universal_agm(const ProblemInstance& problem, const ProxSetup& setup, double eps, double L0, int N,
                        const AgmOptions& opts) {
  if (problem.dim() != setup.dim()) throw std::invalid_argument("universal_agm: dimension mismatch");
  if (!(eps > 0.0)) throw std::invalid_argument("universal_agm: eps must be positive");
  if (!(L0 > 0.0)) throw std::invalid_argument("universal_agm: L0 must be positive");
  if (N < 0) throw std::invalid_argument("universal_agm: N must be non-negative");
  const SteadyTime start = now();
  AgmReport rep;
  rep.method = "universal_agm";
  rep.x0 = start_of(setup, opts);
  DenseVector y = rep.x0;
  DenseVector z = rep.x0;
  double C = 0.0;
  double Lk = L0;
  // y^0 is reported from one extra evaluation kept outside the call audit.
  const double f0 = problem.objective(y).value;
  rep.trace.push_back({0, f0, 0.0, 0.0, L0, 0, 0, 0.0, 0.0, elapsed_ns(start)});
  if (opts.keep_iterates) rep.iterates.push_back(y);
  double fy = f0;
  for (int k = 0; k < N; ++k) {
    double M = Lk / 2.0;
    int trials = 0;
    while (true) {
      M *= 2.0;
      ++trials;
      if (trials > opts.max_doublings) throw std::runtime_error("universal_agm: backtracking did not terminate");
      const double alpha = alpha_root(C, M);
      const double C_next = C + alpha;
      const DenseVector x = (alpha * z + C * y) / C_next;
      const OracleResponse gx = problem.objective(x);
      check_finite(gx);
      DenseVector z_next = setup.mirror_step(z, alpha * gx.subgradient);
      DenseVector y_next = (alpha * z_next + C * y) / C_next;
      const OracleResponse gy = problem.objective(y_next);
      if (!std::isfinite(gy.value)) throw std::runtime_error("universal_agm: non-finite objective value");
      rep.oracle_calls += 2;
      const double dist = setup.norm(y_next - x);
      const double rhs =
          gx.value + gx.subgradient.dot(y_next - x) + 0.5 * M * dist * dist + alpha * eps / (2.0 * C_next);
      if (gy.value <= rhs) {
        z = std::move(z_next);
        y = std::move(y_next);
        C = C_next;
        fy = gy.value;
        rep.trace.push_back({k + 1, fy, alpha, C, M, trials, rep.oracle_calls, gy.value, rhs, elapsed_ns(start)});
        if (opts.keep_iterates) rep.iterates.push_back(y);
        // 0 in the subdifferential at x = y: every later trial passes and M would halve without end.
        if (gx.subgradient.isZero(0.0)) rep.exact_optimum = true;
        break;
      }
    }
    if (rep.exact_optimum) {
      rep.iterations = k + 1;
      break;
    }
    Lk = M / 2.0;
  }
  rep.y = y;
  rep.f_y = fy;
  if (!rep.exact_optimum) rep.iterations = N;
  return rep;
}

double universal_agm_rate(double nu, double L_nu, double eps, int k, double V) {
  if (k < 1) throw std::invalid_argument("universal_agm_rate: k must be >= 1");
  const double inner = std::pow(2.0, 2.0 + 4.0 * nu) * L_nu * L_nu /
                       (std::pow(eps, 1.0 - nu) * std::pow(static_cast<double>(k), 1.0 + 3.0 * nu));
  return std::pow(inner, 1.0 / (1.0 + nu)) * V + eps / 2.0;
}

double universal_agm_call_bound(double nu, double L_nu, double eps, int k, double V) {
  const double q = 1.0 + 3.0 * nu;
  const double logterm = (1.0 - nu) / q * std::log2(2.0 * V) + 3.0 * (1.0 - nu) / q * std::log2(1.0 / eps) +
                         4.0 / q * std::log2(L_nu);
  return 4.0 * (k + 1) + 2.0 * logterm;
}

SmoothedLinfOracle::SmoothedLinfOracle(Eigen::MatrixXd A, DenseVector b, double mu, NormTag x_norm, Oracle h,
                                       double L_h)
    : A_(std::move(A)), b_(std::move(b)), mu_(mu), x_norm_(x_norm), h_(std::move(h)), L_h_(L_h) {
  if (!(mu_ > 0.0)) throw std::invalid_argument("smoothed oracle: mu must be positive");
  if (A_.rows() != b_.size() || A_.rows() < 1) throw std::invalid_argument("smoothed oracle: A and b disagree");
  if (!(L_h_ >= 0.0)) throw std::invalid_argument("smoothed oracle: L_h must be non-negative");
}

double SmoothedLinfOracle::D2() const { return std::log(2.0 * static_cast<double>(A_.rows())); }

double SmoothedLinfOracle::operator_norm() const {
  double best = 0.0;
  for (Index i = 0; i < A_.rows(); ++i) {
    const double r = x_norm_ == NormTag::kL2 ? A_.row(i).norm() : A_.row(i).lpNorm<Eigen::Infinity>();
    best = std::max(best, r);
  }
  return best;
}

DenseVector SmoothedLinfOracle::inner_weights(const DenseVector& x) const {
  const DenseVector r = A_ * x - b_;
  const Index m = r.size();
  const double s = r.cwiseAbs().maxCoeff();
  DenseVector w(2 * m);
  for (Index i = 0; i < m; ++i) {
    w[i] = std::exp((r[i] - s) / mu_);
    w[m + i] = std::exp((-r[i] - s) / mu_);
  }
  return w / w.sum();
}

DenseVector SmoothedLinfOracle::inner_maximizer(const DenseVector& x) const {
  const DenseVector w = inner_weights(x);
  const Index m = A_.rows();
  return w.head(m) - w.tail(m);
}

OracleResponse SmoothedLinfOracle::operator()(const DenseVector& x) const {
  if (x.size() != A_.cols()) throw std::invalid_argument("smoothed oracle: dimension mismatch");
  const DenseVector r = A_ * x - b_;
  const Index m = r.size();
  const double s = r.cwiseAbs().maxCoeff();
  double total = 0.0;
  DenseVector w(2 * m);
  for (Index i = 0; i < m; ++i) {
    w[i] = std::exp((r[i] - s) / mu_);
    w[m + i] = std::exp((-r[i] - s) / mu_);
    total += w[i] + w[m + i];
  }
  OracleResponse out;
  out.value = s + mu_ * std::log(total / (2.0 * m));
  const DenseVector u = (w.head(m) - w.tail(m)) / total;
  out.subgradient = A_.transpose() * u;
  if (h_) {
    const OracleResponse hr = h_(x);
    out.value += hr.value;
    out.subgradient += hr.subgradient;
  }
  return out;
}

double SmoothedLinfOracle::exact_value(const DenseVector& x) const {
  double v = (A_ * x - b_).lpNorm<Eigen::Infinity>();
  if (h_) v += h_(x).value;
  return v;
}

double choose_mu(double A_norm, double D1, double D2, int N) {
  if (!(A_norm > 0.0) || !(D1 > 0.0) || !(D2 > 0.0) || N < 0)
    throw std::invalid_argument("choose_mu: need |A|, D1, D2 > 0 and N >= 0");
  return 2.0 * A_norm / (N + 1) * std::sqrt(D1 / D2);
}

double smoothing_bound(double A_norm, double D1, double D2, double L_h, int N) {
  const double n1 = N + 1.0;
  return 4.0 * A_norm * std::sqrt(D1 * D2) / n1 + 4.0 * L_h * D1 / (n1 * n1);
}

ProblemInstance make_smoothed_problem(const SmoothedLinfOracle& oracle, FeasibleSet set) {
  if (set.dim() != oracle.A().cols()) throw std::invalid_argument("make_smoothed_problem: dimension mismatch");
  ProblemInstance p;
  p.name = "smoothed_linf_residual";
  p.objective = [oracle](const DenseVector& x) { return oracle(x); };
  p.set = std::move(set);
  p.descriptor = {{"type", "linf_residual"}, {"A", to_json(oracle.A())}, {"b", to_json(oracle.b())},
                  {"mu", oracle.mu()}};
  return p;
}

}  // namespace lowmem
