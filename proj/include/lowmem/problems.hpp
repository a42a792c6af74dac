#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <functional>
#include <optional>
#include <string>

#include "json.hpp"
#include "lowmem/geometry.hpp"
#include "lowmem/oracles.hpp"

namespace lowmem {

struct KnownOptimum {
  double f_star = 0.0;
  DenseVector x_star;
};

// phi(lambda) = min_{x in X} f(x) + sum_i lambda_i g_i(x), in closed form.
using DualFunction = std::function<double(const DenseVector&)>;

struct ProblemInstance {
  std::string name;
  Oracle objective;
  std::optional<ConstraintBundle> constraints;
  FeasibleSet set;
  std::optional<double> lipschitz_f;
  std::optional<double> lipschitz_g;
  std::optional<KnownOptimum> known_opt;
  DualFunction dual_function;
  // Inline-data description; rebuilding from it yields the same instance.
  nlohmann::json descriptor;

  Index dim() const { return set.dim(); }
  double f(const DenseVector& x) const { return objective(x).value; }
  std::optional<double> g(const DenseVector& x) const;
};

// ---- small analytic instances

// f(x) = |x| on R.
ProblemInstance make_abs_1d();
// f(x) = |x| (quasi-convex sqrt variant: f(x) = sqrt|x|).
ProblemInstance make_sqrt_abs_1d();
// f(x) = |x - x_star|_2 on R^n.
ProblemInstance make_norm2(DenseVector x_star);
// f(x) = <c, x> over a box or simplex; the optimum is computed in closed form.
ProblemInstance make_linear(DenseVector c, FeasibleSet set);
// f(x) = 1/2 (x - c)^T H (x - c). The optimum is attached when it is
// computable in closed form (all-space, or diagonal H over a box).
ProblemInstance make_quadratic(Eigen::MatrixXd H, DenseVector c, FeasibleSet set);

// ---- constrained toy LPs

// min <c, x> s.t. A x <= b, x in box. dual_function is the closed form
// phi(lambda) = min over the box of the Lagrangian.
ProblemInstance make_box_lp(DenseVector c, Eigen::MatrixXd A, DenseVector b, FeasibleSet box);
// Random box LP on [-1, 1]^n with m constraints and a Slater point at 0.
ProblemInstance gen_box_lp(int n, int m, std::uint64_t seed);

// min ||x - c||_2^2 s.t. max_i |x_i| - 1 <= 0 over [-2, 2]^n; x_star = clip(c).
ProblemInstance make_quadratic_linf_ball(DenseVector c);

// ---- transportation

struct TransportData {
  DenseVector supply_a;  // length n (columns)
  DenseVector supply_b;  // length m (rows)
  Eigen::MatrixXd cost;  // m x n
  double V = 0.0;
};

// Penalized dual of a balanced transportation problem over (u, v):
//   -sum_j a_j u_j - sum_i b_i v_i + V sum_ij (u_j + v_i - c_ij)_+ ,
// V = total supply.
ProblemInstance make_transport_dual(TransportData data);
ProblemInstance gen_transport_dual(int m, int n, std::uint64_t seed);
// Primal LP optimum (reference, via the LP oracle).
double transport_primal_optimum(const TransportData& data);

// ---- truss topology design

struct TtdData {
  Eigen::MatrixXd bars;  // bars x dofs; row i is a_i
  DenseVector force;     // f_bar
};

// max <f, y> s.t. |<a_i, y>| <= 1, posed as minimization of f(y) = -<f, y>
// with 2m linear pieces +-a_i (piece 2i is +a_i, 2i+1 is -a_i).
// `box_radius` bounds y; when absent it is 2 |y*|_inf from the LP oracle.
ProblemInstance make_ttd_dual(TtdData data, std::optional<double> box_radius = std::nullopt);
// 2D grid truss: nodes laid out row-major; nodes in the first column are
// supports. Bars connect grid neighbours (with diagonals); `bars` selects a
// seeded subset of the candidates that keeps the LP bounded.
TtdData gen_ttd_data(int nodes, int bars, std::uint64_t seed);
ProblemInstance gen_ttd_dual(int nodes, int bars, std::uint64_t seed);

struct TtdPrimal {
  DenseVector w;
  DenseVector z;
  double residual = 0.0;  // |A(w) z - f|_inf
};

// w = T x / <e, x>, z = (<e, x> / T) y.
TtdPrimal reconstruct_ttd_primal(const TtdData& data, const DenseVector& x_star,
                                 const DenseVector& y_star, double total_weight);
// Bar multipliers from the 2m piece multipliers: x_i = |l_{2i} - l_{2i+1}|.
DenseVector ttd_bar_multipliers(const DenseVector& piece_multipliers);

// Rebuild any of the above from its descriptor.
ProblemInstance problem_from_descriptor(const nlohmann::json& descriptor);

// JSON helpers shared by descriptors.
nlohmann::json to_json(const DenseVector& v);
nlohmann::json to_json(const Eigen::MatrixXd& m);
DenseVector vector_from_json(const nlohmann::json& j);
Eigen::MatrixXd matrix_from_json(const nlohmann::json& j);
nlohmann::json set_to_json(const FeasibleSet& set);
FeasibleSet set_from_json(const nlohmann::json& j);

}  // namespace lowmem
