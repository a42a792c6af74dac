#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "lowmem/geometry.hpp"

namespace lowmem {

using OperatorFn = std::function<DenseVector(const DenseVector&)>;

struct HolderData {
  double nu = 1.0;
  double L_nu = 0.0;
};

// Monotone operator Phi over the domain of a prox setup.
struct SaddleOperator {
  OperatorFn phi;
  Index dim = 0;
  std::optional<double> lipschitz;  // w.r.t. the intended setup norm
  std::optional<HolderData> holder;
};

// f(x, u) = <A x, u>, x in Q1 (A.cols()), u in Q2 (A.rows());
// Phi(x, u) = (A^T u, -A x).
struct BilinearGame {
  Eigen::MatrixXd A;
  FeasibleSet x_set;
  FeasibleSet u_set;

  double value(const DenseVector& x, const DenseVector& u) const { return u.dot(A * x); }
  Index n() const { return A.cols(); }
  Index m() const { return A.rows(); }
};

enum class GameSetup {
  kEntropySimplex,  // unit simplices, entropy x entropy; L = max |A_ij|
  kEuclideanBox,    // [0, 1] boxes centred at 1/2, Euclidean; L = spectral norm of A
};

struct MatrixGame {
  BilinearGame game;
  SaddleOperator op;
  ProxSetup setup;
};

MatrixGame gen_matrix_game(Eigen::MatrixXd A, GameSetup choice);
SaddleOperator bilinear_operator(const BilinearGame& game);

// max_u f(x_hat, u) - min_x f(x, u_hat), exact through the linear subproblems.
double saddle_gap(const BilinearGame& game, const DenseVector& x_hat, const DenseVector& u_hat);
double saddle_gap(const BilinearGame& game, const DenseVector& w_hat);
// max over vertices z of the setup domain of <Phi(z), w_hat - z>.
double vertex_residual(const SaddleOperator& op, const ProxSetup& setup, const DenseVector& w_hat);
// max over a set of <c, x> (box, simplex, l1 ball, ball).
double linear_max(const FeasibleSet& set, const DenseVector& c);

struct VIRecord {
  int k = 0;          // iterations completed
  double M = 0.0;     // M_{k-1}
  int trials = 0;     // i_{k-1}
  long oracle_calls = 0;  // 2 per trial, cumulative
  long evaluations = 0;   // actual Phi evaluations, cumulative
  double weight_sum = 0.0;
  std::optional<double> certificate;  // user metric at w_hat^k
  double check_lhs = 0.0;
  double check_rhs = 0.0;
  std::int64_t elapsed_ns = 0;
};

struct VIOptions {
  // Evaluated on w_hat after every `certify_every` iterations.
  std::function<double(const DenseVector&)> certificate;
  int certify_every = 1;
  // Universal method: stop once D / sum M^-1 <= eps/2 (D = max V from center).
  bool adaptive_stop = false;
  int max_trials = 64;
};

struct VIReport {
  std::string method;
  DenseVector w_hat;
  DenseVector z_last;
  int iterations = 0;
  long oracle_calls = 0;
  long evaluations = 0;
  double weight_sum = 0.0;  // k for plain, sum M_i^-1 for universal
  bool stopped_adaptively = false;
  // The prox step from z returned z, so z solves the VI and is returned as w_hat.
  bool exact_solution = false;
  std::vector<VIRecord> trace;
};

// Extragradient with constant L, output (1/k) sum w^i.
VIReport mirror_prox_solve(const SaddleOperator& op, const ProxSetup& setup, double L, int N,
                           const VIOptions& opts = {});

// Doubling M_k = 2^{i_k - 1} M_{k-1} with output weighted by M_k^{-1}.
VIReport universal_mirror_prox_solve(const SaddleOperator& op, const ProxSetup& setup, double eps, double M_init,
                                     int N, const VIOptions& opts = {});

// L(delta) = (1/delta)^{(1-nu)/(1+nu)} L_nu^{2/(1+nu)}.
double holder_L_of_delta(double nu, double L_nu, double delta);
// (2L_nu)^{2/(1+nu)} / (k eps^{(1-nu)/(1+nu)}) maxV + eps/2.
double universal_mp_rate(double nu, double L_nu, double eps, int k, double maxV);
// 4k + 2 log2(2 L(eps/2)) - 2 log2(M_init).
double universal_mp_call_bound(double nu, double L_nu, double eps, int k, double M_init);

}  // namespace lowmem
