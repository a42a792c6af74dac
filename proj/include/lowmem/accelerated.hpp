#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lowmem/geometry.hpp"
#include "lowmem/oracles.hpp"
#include "lowmem/problems.hpp"

namespace lowmem {

// Largest root of M a^2 - a - C = 0.
double alpha_root(double C, double M);

struct AgmRecord {
  int k = 0;           // y^k has just been produced
  double f_y = 0.0;    // f(y^k)
  double alpha = 0.0;  // alpha_k
  double C = 0.0;      // C_k
  double M = 0.0;      // constant accepted for the step that produced y^k
  int trials = 0;      // backtracking trials for that step
  long oracle_calls = 0;
  // Universal method: both sides of the acceptance inequality.
  double check_lhs = 0.0;
  double check_rhs = 0.0;
  std::int64_t elapsed_ns = 0;
};

struct AgmOptions {
  std::optional<DenseVector> x0;  // defaults to the prox center
  bool keep_iterates = false;
  int max_doublings = 200;
};

struct AgmReport {
  std::string method;
  DenseVector y;
  double f_y = 0.0;
  int iterations = 0;
  long oracle_calls = 0;
  DenseVector x0;
  // Universal method: an accepted step had a zero subgradient, so y is optimal.
  bool exact_optimum = false;
  std::vector<AgmRecord> trace;     // trace[0] describes y^0 = x^0
  std::vector<DenseVector> iterates;  // y^k, when requested
};

// Fixed-L accelerated gradient method. Every step costs one gradient call at
// x^{k+1} and one value call at y^{k+1} (the latter only feeds the trace).
AgmReport agm_solve(const ProblemInstance& problem, const ProxSetup& setup, double L, int N,
                    const AgmOptions& opts = {});

// Backtracking on M_k (start L_k/2, double until the quadratic upper bound
// holds up to alpha eps/(2C)), then L_{k+1} = M_k/2. Each trial costs two
// oracle calls.
AgmReport universal_agm(const ProblemInstance& problem, const ProxSetup& setup, double eps, double L0, int N,
                        const AgmOptions& opts = {});

// Bound on f(y^{k+1}) - f* after k >= 1 completed steps past the first:
// (2^{2+4nu} L^2 / (eps^{1-nu} k^{1+3nu}))^{1/(1+nu)} V + eps/2.
double universal_agm_rate(double nu, double L_nu, double eps, int k, double V);
// 4(k+1) + 2 log2((2V)^{(1-nu)/(1+3nu)} (1/eps)^{3(1-nu)/(1+3nu)} L^{4/(1+3nu)}).
double universal_agm_call_bound(double nu, double L_nu, double eps, int k, double V);

// f(x) = h(x) + |A x - b|_inf smoothed over the unit l1 ball (doubled simplex,
// entropy prox, D2 = ln 2m):
//   f_mu(x) = h(x) + mu ln((1/2m) sum_i 2 cosh(r_i/mu)),  r = A x - b.
class SmoothedLinfOracle {
 public:
  SmoothedLinfOracle(Eigen::MatrixXd A, DenseVector b, double mu, NormTag x_norm = NormTag::kL2,
                     Oracle h = {}, double L_h = 0.0);

  OracleResponse operator()(const DenseVector& x) const;
  // u_mu(x) in the ball (length m) and its doubled-simplex weights (length 2m).
  DenseVector inner_maximizer(const DenseVector& x) const;
  DenseVector inner_weights(const DenseVector& x) const;
  // Unsmoothed h(x) + |Ax - b|_inf.
  double exact_value(const DenseVector& x) const;

  double mu() const { return mu_; }
  double D2() const;
  // |A|_{1,2} = max_i |a_i|_* for the x-norm.
  double operator_norm() const;
  double lipschitz() const { return L_h_ + operator_norm() * operator_norm() / mu_; }
  const Eigen::MatrixXd& A() const { return A_; }
  const DenseVector& b() const { return b_; }

 private:
  Eigen::MatrixXd A_;
  DenseVector b_;
  double mu_;
  NormTag x_norm_;
  Oracle h_;
  double L_h_;
};

// mu = 2 |A| / (N+1) sqrt(D1/D2).
double choose_mu(double A_norm, double D1, double D2, int N);
// 4 |A| sqrt(D1 D2)/(N+1) + 4 L_h D1/(N+1)^2.
double smoothing_bound(double A_norm, double D1, double D2, double L_h, int N);

// Problem wrapper around a smoothed oracle (objective = f_mu, set = Q1).
ProblemInstance make_smoothed_problem(const SmoothedLinfOracle& oracle, FeasibleSet set);

}  // namespace lowmem
