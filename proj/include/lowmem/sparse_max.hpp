#pragma once

#include <utility>
#include <vector>

#include "lowmem/geometry.hpp"
#include "lowmem/problems.hpp"

namespace lowmem {

// Indices strictly increasing, values nonzero and finite.
struct SparseVector {
  Index dim = 0;
  std::vector<Index> indices;
  std::vector<double> values;

  // Sorts, merges duplicates by summation and drops zeros.
  static SparseVector from_pairs(Index dim, std::vector<std::pair<Index, double>> pairs);
  static SparseVector from_dense(const DenseVector& v);

  std::size_t nnz() const { return indices.size(); }
  double dot(const DenseVector& x) const;
  DenseVector to_dense() const;
};

// Row-major storage with a column index for update propagation.
class SparseMatrix {
 public:
  SparseMatrix() = default;
  SparseMatrix(Index rows, Index cols, std::vector<SparseVector> row_list);
  static SparseMatrix from_dense(const Eigen::MatrixXd& A);

  Index rows() const { return rows_; }
  Index cols() const { return cols_; }
  const SparseVector& row(Index i) const { return rows_list_[static_cast<std::size_t>(i)]; }
  // Rows with a nonzero in column j, increasing.
  const std::vector<Index>& column(Index j) const { return col_rows_[static_cast<std::size_t>(j)]; }
  // <row i, y> summed in increasing column order.
  double row_dot(Index i, const DenseVector& y) const;

 private:
  Index rows_ = 0;
  Index cols_ = 0;
  std::vector<SparseVector> rows_list_;
  std::vector<std::vector<Index>> col_rows_;
};

struct UpdateResult {
  double value = 0.0;
  Index argmax = 0;
  std::size_t touched_count = 0;   // distinct tree nodes recomputed
  std::size_t affected_rows = 0;
};

// Maintains z = A y and max_i z_i (lowest index on ties) with a tournament
// tree over the rows.
class MaxStructure {
 public:
  MaxStructure(SparseMatrix A, DenseVector y0);

  double value() const { return z_[winner_[1]]; }
  Index argmax() const { return winner_[1]; }
  const DenseVector& y() const { return y_; }
  const DenseVector& z() const { return z_; }
  const SparseMatrix& matrix() const { return A_; }
  int depth() const { return depth_; }  // ceil(log2 m)

  UpdateResult apply(const SparseVector& delta);
  SparseVector current_subgradient() const { return A_.row(argmax()); }

 private:
  Index better(Index a, Index b) const;

  SparseMatrix A_;
  DenseVector y_;
  DenseVector z_;
  Index leaves_ = 1;
  int depth_ = 0;
  std::vector<Index> winner_;  // heap layout, root at 1; -1 for padding
  std::vector<char> mark_;
};

MaxStructure build_max_structure(SparseMatrix A, DenseVector y0);
UpdateResult apply_sparse_update(MaxStructure& s, const SparseVector& delta);
SparseVector current_subgradient(const MaxStructure& s);

// Switching mirror descent for the truss dual on the box [-B, B]^n with the
// Euclidean prox centred at 0, driven by sparse updates of a max structure
// over the 2m signed rows. Per-step cost is O(s log m) plus the row lengths.
struct SparseTtdReport {
  DenseVector y_bar;
  DenseVector lambda_bar;  // 2m piece multipliers
  int iterations = 0;
  int productive_count = 0;
  double f_value = 0.0;
  double g_value = 0.0;
  std::size_t touched_total = 0;
  std::size_t touched_bound_total = 0;  // sum of affected*(depth+1)
};

SparseTtdReport solve_ttd_sparse(const TtdData& data, double box_radius, double eps,
                                 long max_iterations = 50'000'000);

}  // namespace lowmem
