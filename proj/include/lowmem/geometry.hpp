#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace lowmem {

using DenseVector = Eigen::VectorXd;
using Index = Eigen::Index;

// Centralized tolerances.
inline constexpr double kFeasibilityTol = 1e-9;
inline constexpr double kOptimalityTol = 1e-7;
inline constexpr double kNormalizationTol = 1e-12;
// Entropy coordinates are never allowed below this value.
inline constexpr double kEntropyFloor = 1e-300;

class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

struct AllSpace {
  Index dim = 0;
};

struct Box {
  DenseVector lower;
  DenseVector upper;
};

struct EuclideanBall {
  DenseVector center;
  double radius = 1.0;
};

// {x >= 0, sum x = scale}
struct Simplex {
  Index dim = 0;
  double scale = 1.0;
};

// The l1 ball {u : |u|_1 <= radius} in R^n, represented by 2n doubled
// coordinates w on the simplex of size `radius`, u = w[0:n] - w[n:2n].
struct L1Ball {
  Index ball_dim = 0;
  double radius = 1.0;
};

class FeasibleSet {
 public:
  using Variant = std::variant<AllSpace, Box, EuclideanBall, Simplex, L1Ball>;

  FeasibleSet() = default;
  explicit FeasibleSet(Variant v);

  static FeasibleSet all_space(Index dim);
  static FeasibleSet box(DenseVector lower, DenseVector upper);
  static FeasibleSet box(Index dim, double lower, double upper);
  static FeasibleSet ball(DenseVector center, double radius);
  static FeasibleSet simplex(Index dim, double scale = 1.0);
  static FeasibleSet l1_ball(Index ball_dim, double radius = 1.0);

  const Variant& variant() const { return v_; }
  // Dimension of the stored variable (2n for the doubled l1 ball).
  Index dim() const;
  bool bounded() const;
  bool is_simplex_like() const;
  double simplex_scale() const;

  bool contains(const DenseVector& x, double tol = kFeasibilityTol) const;
  // Euclidean projection; only for all-space, box and ball.
  DenseVector project(const DenseVector& x) const;
  // Extreme points of a box / simplex / doubled l1 ball.
  std::vector<DenseVector> vertices() const;
  std::string describe() const;

 private:
  Variant v_ = AllSpace{};
};

// Maps doubled coordinates of an l1 ball back to the ball.
DenseVector decode_l1(const DenseVector& w);

enum class NormTag { kL1, kL2 };
enum class ProxKind { kEuclidean, kEntropy };

// One factor of a (possibly product) prox setup.
//   Euclidean: d(x) = 1/2 |x - center|_2^2 on all-space, box or ball.
//   Entropy:   d(x) = s^2 (ln n + sum y_i ln y_i), y = x / s, on a simplex of
//              size s (or the doubled l1 ball); 1-strongly convex in |.|_1.
struct ProxBlock {
  FeasibleSet set;
  ProxKind kind = ProxKind::kEuclidean;
  DenseVector center;  // Euclidean only; empty means the origin

  NormTag norm_tag() const {
    return kind == ProxKind::kEntropy ? NormTag::kL1 : NormTag::kL2;
  }
};

// A norm, a prox function d, its Bregman divergence and the mirror step over
// a feasible set. Products of blocks use the norm sqrt(sum_b |x_b|_b^2) and the
// prox function sum_b d_b, which keeps d 1-strongly convex.
class ProxSetup {
 public:
  explicit ProxSetup(std::vector<ProxBlock> blocks,
                     std::optional<double> theta0_sq = std::nullopt);

  static ProxSetup euclidean(FeasibleSet set, DenseVector center = {},
                             std::optional<double> theta0_sq = std::nullopt);
  static ProxSetup entropy(FeasibleSet set,
                           std::optional<double> theta0_sq = std::nullopt);
  static ProxSetup product(const ProxSetup& first, const ProxSetup& second);

  Index dim() const { return dim_; }
  const std::vector<ProxBlock>& blocks() const { return blocks_; }
  Index block_offset(std::size_t b) const { return offsets_[b]; }
  // Norm of a single-block setup; l2 for products (reported only).
  NormTag norm_tag() const;
  bool is_euclidean() const;

  double norm(const DenseVector& x) const;
  double dual_norm(const DenseVector& p) const;
  double d(const DenseVector& x) const;
  DenseVector grad_d(const DenseVector& x) const;
  double bregman(const DenseVector& x, const DenseVector& y) const;
  DenseVector mirror_step(const DenseVector& x, const DenseVector& p) const;
  DenseVector prox_center() const;
  bool contains(const DenseVector& x, double tol = kFeasibilityTol) const;

  // max over the set of d; empty on unbounded sets.
  std::optional<double> max_d() const;
  // max over the set of V[prox_center](z); empty on unbounded sets.
  std::optional<double> max_bregman_from_center() const;

  // Bound on d at the solution (or over the set); defaults to max_d().
  std::optional<double> theta0_sq() const { return theta0_sq_; }
  void set_theta0_sq(double v) { theta0_sq_ = v; }

  DenseVector block_slice(const DenseVector& x, std::size_t b) const;

 private:
  std::vector<ProxBlock> blocks_;
  std::vector<Index> offsets_;
  Index dim_ = 0;
  std::optional<double> theta0_sq_;
};

// Free-function forms of the setup operations.
double dual_norm(const ProxSetup& setup, const DenseVector& p);
double bregman_divergence(const ProxSetup& setup, const DenseVector& x, const DenseVector& y);
DenseVector mirror_step(const ProxSetup& setup, const DenseVector& x, const DenseVector& p);
DenseVector prox_center(const ProxSetup& setup);

void check_same_dim(const DenseVector& a, const DenseVector& b, const char* what);

}  // namespace lowmem
