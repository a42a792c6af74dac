#include "lowmem/sparse_max.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace lowmem {

SparseVector SparseVector::from_pairs(Index dim, std::vector<std::pair<Index, double>> pairs) {
  std::sort(pairs.begin(), pairs.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  SparseVector out;
  out.dim = dim;
  for (std::size_t k = 0; k < pairs.size();) {
    const Index idx = pairs[k].first;
    if (idx < 0 || idx >= dim) throw std::invalid_argument("sparse vector: index out of range");
    double v = 0.0;
    for (; k < pairs.size() && pairs[k].first == idx; ++k) v += pairs[k].second;
    if (!std::isfinite(v)) throw std::invalid_argument("sparse vector: non-finite value");
    if (v != 0.0) {
      out.indices.push_back(idx);
      out.values.push_back(v);
    }
  }
  return out;
}

SparseVector SparseVector::from_dense(const DenseVector& v) {
  SparseVector out;
  out.dim = v.size();
  for (Index i = 0; i < v.size(); ++i) {
    if (!std::isfinite(v[i])) throw std::invalid_argument("sparse vector: non-finite value");
    if (v[i] != 0.0) {
      out.indices.push_back(i);
      out.values.push_back(v[i]);
    }
  }
  return out;
}

double SparseVector::dot(const DenseVector& x) const {
  if (x.size() != dim) throw std::invalid_argument("sparse dot: dimension mismatch");
  double s = 0.0;
  for (std::size_t k = 0; k < indices.size(); ++k) s += values[k] * x[indices[k]];
  return s;
}

DenseVector SparseVector::to_dense() const {
  DenseVector out = DenseVector::Zero(dim);
  for (std::size_t k = 0; k < indices.size(); ++k) out[indices[k]] = values[k];
  return out;
}

SparseMatrix::SparseMatrix(Index rows, Index cols, std::vector<SparseVector> row_list)
    : rows_(rows), cols_(cols), rows_list_(std::move(row_list)), col_rows_(static_cast<std::size_t>(cols)) {
  if (rows < 1 || static_cast<Index>(rows_list_.size()) != rows)
    throw std::invalid_argument("sparse matrix: row count mismatch");
  for (Index i = 0; i < rows; ++i) {
    const SparseVector& r = rows_list_[static_cast<std::size_t>(i)];
    if (r.dim != cols) throw std::invalid_argument("sparse matrix: row dimension mismatch");
    for (std::size_t k = 0; k < r.indices.size(); ++k) {
      if (k > 0 && r.indices[k] <= r.indices[k - 1]) throw std::invalid_argument("sparse matrix: unsorted row");
      col_rows_[static_cast<std::size_t>(r.indices[k])].push_back(i);
    }
  }
}

SparseMatrix SparseMatrix::from_dense(const Eigen::MatrixXd& A) {
  std::vector<SparseVector> rows;
  for (Index i = 0; i < A.rows(); ++i) rows.push_back(SparseVector::from_dense(A.row(i).transpose()));
  return SparseMatrix(A.rows(), A.cols(), std::move(rows));
}

double SparseMatrix::row_dot(Index i, const DenseVector& y) const { return row(i).dot(y); }

MaxStructure::MaxStructure(SparseMatrix A, DenseVector y0) : A_(std::move(A)), y_(std::move(y0)) {
  if (y_.size() != A_.cols()) throw std::invalid_argument("max structure: y0 dimension mismatch");
  if (!y_.allFinite()) throw std::invalid_argument("max structure: non-finite y0");
  const Index m = A_.rows();
  z_ = DenseVector(m);
  for (Index i = 0; i < m; ++i) z_[i] = A_.row_dot(i, y_);
  while (leaves_ < m) {
    leaves_ *= 2;
    ++depth_;
  }
  winner_.assign(static_cast<std::size_t>(2 * leaves_), -1);
  mark_.assign(winner_.size(), 0);
  for (Index i = 0; i < m; ++i) winner_[static_cast<std::size_t>(leaves_ + i)] = i;
  for (Index node = leaves_ - 1; node >= 1; --node)
    winner_[static_cast<std::size_t>(node)] =
        better(winner_[static_cast<std::size_t>(2 * node)], winner_[static_cast<std::size_t>(2 * node + 1)]);
}

Index MaxStructure::better(Index a, Index b) const {
  if (a < 0) return b;
  if (b < 0) return a;
  // a comes from the left subtree, so it holds the lower row index
  return z_[a] >= z_[b] ? a : b;
}

UpdateResult MaxStructure::apply(const SparseVector& delta) {
  if (delta.dim != y_.size()) throw std::invalid_argument("sparse update: dimension mismatch");
  std::vector<Index> rows;
  for (std::size_t k = 0; k < delta.indices.size(); ++k) {
    const Index j = delta.indices[k];
    if (j < 0 || j >= y_.size()) throw std::invalid_argument("sparse update: index out of range");
    y_[j] += delta.values[k];
    for (Index i : A_.column(j)) {
      const std::size_t leaf = static_cast<std::size_t>(leaves_ + i);
      if (!mark_[leaf]) {
        mark_[leaf] = 1;
        rows.push_back(i);
      }
    }
  }
  UpdateResult res;
  res.affected_rows = rows.size();
  std::vector<Index> frontier;
  frontier.reserve(rows.size());
  for (Index i : rows) {
    z_[i] = A_.row_dot(i, y_);
    const Index leaf = leaves_ + i;
    mark_[static_cast<std::size_t>(leaf)] = 0;
    frontier.push_back(leaf);
  }
  res.touched_count = frontier.size();
  std::vector<Index> parents;
  while (!frontier.empty() && frontier.front() > 1) {
    parents.clear();
    for (Index node : frontier) {
      const Index p = node / 2;
      if (!mark_[static_cast<std::size_t>(p)]) {
        mark_[static_cast<std::size_t>(p)] = 1;
        parents.push_back(p);
      }
    }
    for (Index p : parents) {
      mark_[static_cast<std::size_t>(p)] = 0;
      winner_[static_cast<std::size_t>(p)] =
          better(winner_[static_cast<std::size_t>(2 * p)], winner_[static_cast<std::size_t>(2 * p + 1)]);
    }
    res.touched_count += parents.size();
    frontier.swap(parents);
  }
  res.value = value();
  res.argmax = argmax();
  return res;
}

MaxStructure build_max_structure(SparseMatrix A, DenseVector y0) { return MaxStructure(std::move(A), std::move(y0)); }

UpdateResult apply_sparse_update(MaxStructure& s, const SparseVector& delta) { return s.apply(delta); }

SparseVector current_subgradient(const MaxStructure& s) { return s.current_subgradient(); }

SparseTtdReport solve_ttd_sparse(const TtdData& data, double box_radius, double eps, long max_iterations) {
  const Index m = data.bars.rows();
  const Index n = data.bars.cols();
  if (data.force.size() != n) throw std::invalid_argument("solve_ttd_sparse: force size differs from dofs");
  if (!(box_radius > 0.0) || !(eps > 0.0)) throw std::invalid_argument("solve_ttd_sparse: need B, eps > 0");
  std::vector<SparseVector> rows;
  std::vector<double> row_norm;
  for (Index i = 0; i < m; ++i) {
    const DenseVector a = data.bars.row(i).transpose();
    rows.push_back(SparseVector::from_dense(a));
    rows.push_back(SparseVector::from_dense(-a));
    row_norm.push_back(a.norm());
    row_norm.push_back(a.norm());
  }
  MaxStructure S(SparseMatrix(2 * m, n, std::move(rows)), DenseVector::Zero(n));
  SparseVector obj_grad = SparseVector::from_dense(-data.force);
  const double obj_norm = data.force.norm();
  if (obj_norm == 0.0) throw std::invalid_argument("solve_ttd_sparse: zero force");

  const double theta0_sq = 0.5 * static_cast<double>(n) * box_radius * box_radius;
  const double threshold = 2.0 * theta0_sq / (eps * eps);
  SparseTtdReport rep;
  DenseVector acc = DenseVector::Zero(n);
  std::vector<double> mark(static_cast<std::size_t>(n), 0.0);
  DenseVector lambda = DenseVector::Zero(2 * m);
  double H = 0.0;
  double stop_sum = 0.0;
  long k = 0;
  std::vector<std::pair<Index, double>> changes;
  while (true) {
    const double g = S.value() - 1.0;
    const bool productive = g <= eps;
    const Index active = S.argmax();
    const SparseVector& grad = productive ? obj_grad : S.matrix().row(active);
    const double M = productive ? obj_norm : row_norm[static_cast<std::size_t>(active)];
    const double h = eps / (M * M);
    if (productive) {
      H += h;
      ++rep.productive_count;
    } else {
      lambda[active] += h;
    }
    changes.clear();
    const DenseVector& y = S.y();
    for (std::size_t t = 0; t < grad.indices.size(); ++t) {
      const Index j = grad.indices[t];
      const double target = std::clamp(y[j] - h * grad.values[t], -box_radius, box_radius);
      const double d = target - y[j];
      if (d != 0.0) {
        acc[j] += y[j] * (H - mark[static_cast<std::size_t>(j)]);
        mark[static_cast<std::size_t>(j)] = H;
        changes.emplace_back(j, d);
      }
    }
    const std::size_t affected_before = rep.touched_total;
    const UpdateResult ur = S.apply(SparseVector::from_pairs(n, changes));
    rep.touched_total = affected_before + ur.touched_count;
    rep.touched_bound_total += ur.affected_rows * static_cast<std::size_t>(S.depth() + 1);
    stop_sum += 1.0 / (M * M);
    ++k;
    if (stop_sum >= threshold || k >= max_iterations) break;
  }
  rep.iterations = static_cast<int>(k);
  const DenseVector& y = S.y();
  if (H > 0.0) {
    for (Index j = 0; j < n; ++j) acc[j] += y[j] * (H - mark[static_cast<std::size_t>(j)]);
    rep.y_bar = acc / H;
    rep.lambda_bar = lambda / H;
  } else {
    rep.y_bar = y;
    rep.lambda_bar = DenseVector::Zero(2 * m);
  }
  rep.f_value = -data.force.dot(rep.y_bar);
  double gmax = -std::numeric_limits<double>::infinity();
  for (Index i = 0; i < m; ++i) gmax = std::max(gmax, std::abs(data.bars.row(i).dot(rep.y_bar)) - 1.0);
  rep.g_value = gmax;
  return rep;
}

}  // namespace lowmem
