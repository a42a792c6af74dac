#include "lowmem/lp_oracle.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace lowmem {

namespace {

constexpr double kPivotTol = 1e-10;

// Tableau over standard-form columns; row `m` holds the reduced costs.
class Tableau {
 public:
  Tableau(Eigen::Index rows, Eigen::Index cols) : t_(Eigen::MatrixXd::Zero(rows + 1, cols + 1)), basis_(rows, -1) {}

  Eigen::MatrixXd& data() { return t_; }
  std::vector<Eigen::Index>& basis() { return basis_; }
  Eigen::Index rows() const { return t_.rows() - 1; }
  Eigen::Index cols() const { return t_.cols() - 1; }

  void pivot(Eigen::Index r, Eigen::Index c) {
    t_.row(r) /= t_(r, c);
    for (Eigen::Index i = 0; i <= rows(); ++i) {
      if (i == r) continue;
      const double f = t_(i, c);
      if (f != 0.0) t_.row(i) -= f * t_.row(r);
    }
    basis_[r] = c;
  }

  // Minimizes the objective stored in the last row over columns allowed[j].
  // Returns false when unbounded.
  bool run(const std::vector<bool>& allowed) {
    for (int guard = 0; guard < 100000; ++guard) {
      Eigen::Index enter = -1;
      for (Eigen::Index j = 0; j < cols(); ++j) {
        if (allowed[j] && t_(rows(), j) < -kPivotTol) {
          enter = j;
          break;  // Bland: lowest index
        }
      }
      if (enter < 0) return true;
      Eigen::Index leave = -1;
      double best = std::numeric_limits<double>::infinity();
      for (Eigen::Index i = 0; i < rows(); ++i) {
        const double a = t_(i, enter);
        if (a > kPivotTol) {
          const double ratio = t_(i, cols()) / a;
          if (ratio < best - 1e-12 || (std::abs(ratio - best) <= 1e-12 && leave >= 0 && basis_[i] < basis_[leave])) {
            best = ratio;
            leave = i;
          }
        }
      }
      if (leave < 0) return false;
      pivot(leave, enter);
    }
    throw std::runtime_error("LP oracle: iteration guard exceeded");
  }

 private:
  Eigen::MatrixXd t_;
  std::vector<Eigen::Index> basis_;
};

}  // namespace

LpResult solve_lp(const LinearProgram& lp) {
  const Eigen::Index m = lp.A.rows();
  const Eigen::Index n = lp.A.cols();
  if (lp.b.size() != m || static_cast<Eigen::Index>(lp.sense.size()) != m || lp.c.size() != n)
    throw std::invalid_argument("LP oracle: inconsistent dimensions");
  std::vector<bool> is_free = lp.free.empty() ? std::vector<bool>(n, false) : lp.free;

  // Column layout: original (+ negative parts of free vars), slacks, artificials.
  std::vector<Eigen::Index> neg_col(n, -1);
  Eigen::Index ncols = n;
  for (Eigen::Index j = 0; j < n; ++j)
    if (is_free[j]) neg_col[j] = ncols++;
  const Eigen::Index slack0 = ncols;
  for (Eigen::Index i = 0; i < m; ++i)
    if (lp.sense[i] != RowSense::kEqual) ++ncols;
  const Eigen::Index art0 = ncols;
  ncols += m;

  Tableau tab(m, ncols);
  auto& t = tab.data();
  Eigen::Index slack = slack0;
  for (Eigen::Index i = 0; i < m; ++i) {
    const double sign = lp.b[i] < 0.0 ? -1.0 : 1.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      t(i, j) = sign * lp.A(i, j);
      if (neg_col[j] >= 0) t(i, neg_col[j]) = -sign * lp.A(i, j);
    }
    if (lp.sense[i] == RowSense::kLessEqual) t(i, slack++) = sign;
    else if (lp.sense[i] == RowSense::kGreaterEqual) t(i, slack++) = -sign;
    t(i, art0 + i) = 1.0;
    t(i, ncols) = sign * lp.b[i];
    tab.basis()[i] = art0 + i;
  }

  // Phase 1: minimize the sum of artificials.
  for (Eigen::Index i = 0; i < m; ++i) t.row(m) -= t.row(i);
  for (Eigen::Index i = 0; i < m; ++i) t(m, art0 + i) = 0.0;
  std::vector<bool> allowed(ncols, true);
  tab.run(allowed);
  if (-t(m, ncols) > 1e-7 * std::max(1.0, lp.b.cwiseAbs().maxCoeff())) return {LpStatus::kInfeasible, {}, 0.0};

  // Drive the remaining artificials out of the basis where possible.
  for (Eigen::Index i = 0; i < m; ++i) {
    if (tab.basis()[i] < art0) continue;
    for (Eigen::Index j = 0; j < art0; ++j) {
      if (std::abs(t(i, j)) > kPivotTol) {
        tab.pivot(i, j);
        break;
      }
    }
  }
  for (Eigen::Index j = art0; j < ncols; ++j) allowed[j] = false;

  // Phase 2.
  t.row(m).setZero();
  for (Eigen::Index j = 0; j < n; ++j) {
    t(m, j) = lp.c[j];
    if (neg_col[j] >= 0) t(m, neg_col[j]) = -lp.c[j];
  }
  for (Eigen::Index i = 0; i < m; ++i) {
    const Eigen::Index bj = tab.basis()[i];
    const double f = t(m, bj);
    if (f != 0.0) t.row(m) -= f * t.row(i);
  }
  if (!tab.run(allowed)) return {LpStatus::kUnbounded, {}, 0.0};

  DenseVector full = DenseVector::Zero(ncols);
  for (Eigen::Index i = 0; i < m; ++i) full[tab.basis()[i]] = t(i, ncols);
  LpResult res;
  res.status = LpStatus::kOptimal;
  res.x = full.head(n);
  for (Eigen::Index j = 0; j < n; ++j)
    if (neg_col[j] >= 0) res.x[j] -= full[neg_col[j]];
  res.value = lp.c.dot(res.x);
  return res;
}

}  // namespace lowmem
