#include "lowmem/problems.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

#include <Eigen/SVD>

#include "lowmem/lp_oracle.hpp"

namespace lowmem {

using nlohmann::json;

std::optional<double> ProblemInstance::g(const DenseVector& x) const {
  if (!constraints) return std::nullopt;
  return constraints->evaluate(x).value;
}

// ------------------------------------------------------------------ JSON glue

json to_json(const DenseVector& v) {
  json out = json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

json to_json(const Eigen::MatrixXd& m) {
  json out = json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    out.push_back(std::move(row));
  }
  return out;
}

DenseVector vector_from_json(const json& j) {
  if (!j.is_array()) throw std::invalid_argument("expected a JSON array of numbers");
  DenseVector v(static_cast<Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Index>(i)] = j[i].get<double>();
  return v;
}

Eigen::MatrixXd matrix_from_json(const json& j) {
  if (!j.is_array() || j.empty()) throw std::invalid_argument("expected a non-empty JSON matrix");
  const std::size_t rows = j.size();
  const std::size_t cols = j[0].size();
  Eigen::MatrixXd m(static_cast<Index>(rows), static_cast<Index>(cols));
  for (std::size_t i = 0; i < rows; ++i) {
    if (j[i].size() != cols) throw std::invalid_argument("ragged JSON matrix");
    for (std::size_t c = 0; c < cols; ++c)
      m(static_cast<Index>(i), static_cast<Index>(c)) = j[i][c].get<double>();
  }
  return m;
}

json set_to_json(const FeasibleSet& set) {
  return std::visit(
      [](const auto& s) -> json {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, AllSpace>) return {{"kind", "all_space"}, {"dim", s.dim}};
        else if constexpr (std::is_same_v<T, Box>)
          return {{"kind", "box"}, {"lower", to_json(s.lower)}, {"upper", to_json(s.upper)}};
        else if constexpr (std::is_same_v<T, EuclideanBall>)
          return {{"kind", "ball"}, {"center", to_json(s.center)}, {"radius", s.radius}};
        else if constexpr (std::is_same_v<T, Simplex>)
          return {{"kind", "simplex"}, {"dim", s.dim}, {"scale", s.scale}};
        else
          return {{"kind", "l1_ball"}, {"dim", s.ball_dim}, {"radius", s.radius}};
      },
      set.variant());
}

FeasibleSet set_from_json(const json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "all_space") return FeasibleSet::all_space(j.at("dim").get<Index>());
  if (kind == "box") {
    if (j.contains("lower") && j.at("lower").is_number())
      return FeasibleSet::box(j.at("dim").get<Index>(), j.at("lower").get<double>(),
                              j.at("upper").get<double>());
    return FeasibleSet::box(vector_from_json(j.at("lower")), vector_from_json(j.at("upper")));
  }
  if (kind == "ball") return FeasibleSet::ball(vector_from_json(j.at("center")), j.at("radius").get<double>());
  if (kind == "simplex") return FeasibleSet::simplex(j.at("dim").get<Index>(), j.value("scale", 1.0));
  if (kind == "l1_ball") return FeasibleSet::l1_ball(j.at("dim").get<Index>(), j.value("radius", 1.0));
  throw std::invalid_argument("unknown set kind '" + kind + "'");
}

// ------------------------------------------------------------ small problems

ProblemInstance make_abs_1d() {
  ProblemInstance p;
  p.name = "abs_1d";
  p.objective = abs_affine_oracle(DenseVector::Ones(1), 0.0);
  p.set = FeasibleSet::all_space(1);
  p.lipschitz_f = 1.0;
  p.known_opt = KnownOptimum{0.0, DenseVector::Zero(1)};
  p.descriptor = {{"type", "abs_1d"}};
  return p;
}

ProblemInstance make_sqrt_abs_1d() {
  ProblemInstance p;
  p.name = "sqrt_abs_1d";
  p.objective = [](const DenseVector& x) {
    if (x.size() != 1) throw std::invalid_argument("sqrt_abs_1d: dimension must be 1");
    const double a = std::abs(x[0]);
    OracleResponse r;
    r.value = std::sqrt(a);
    r.subgradient = DenseVector::Zero(1);
    if (a > 0.0) r.subgradient[0] = (x[0] > 0.0 ? 1.0 : -1.0) / (2.0 * std::sqrt(a));
    return r;
  };
  p.set = FeasibleSet::all_space(1);
  p.known_opt = KnownOptimum{0.0, DenseVector::Zero(1)};
  p.descriptor = {{"type", "sqrt_abs_1d"}};
  return p;
}

ProblemInstance make_norm2(DenseVector x_star) {
  ProblemInstance p;
  p.name = "norm2";
  const Index n = x_star.size();
  p.objective = [c = x_star](const DenseVector& x) {
    check_same_dim(c, x, "norm2");
    const DenseVector diff = x - c;
    const double r = diff.norm();
    OracleResponse out{r, DenseVector::Zero(x.size()), 0.0, std::nullopt};
    if (r > 0.0) out.subgradient = diff / r;
    return out;
  };
  p.set = FeasibleSet::all_space(n);
  p.lipschitz_f = 1.0;
  p.known_opt = KnownOptimum{0.0, x_star};
  p.descriptor = {{"type", "norm2"}, {"x_star", to_json(x_star)}};
  return p;
}

ProblemInstance make_linear(DenseVector c, FeasibleSet set) {
  if (c.size() != set.dim()) throw std::invalid_argument("make_linear: dimension mismatch");
  ProblemInstance p;
  p.name = "linear";
  p.objective = affine_oracle(c, 0.0);
  p.descriptor = {{"type", "linear"}, {"c", to_json(c)}, {"set", set_to_json(set)}};
  if (const auto* box = std::get_if<Box>(&set.variant())) {
    DenseVector xs(c.size());
    for (Index i = 0; i < c.size(); ++i) xs[i] = c[i] > 0.0 ? box->lower[i] : box->upper[i];
    p.known_opt = KnownOptimum{c.dot(xs), xs};
    p.lipschitz_f = c.norm();
  } else if (const auto* s = std::get_if<Simplex>(&set.variant())) {
    Index best = 0;
    c.minCoeff(&best);
    DenseVector xs = DenseVector::Zero(c.size());
    xs[best] = s->scale;
    p.known_opt = KnownOptimum{c.dot(xs), xs};
    // entropy setups measure subgradients in the l-infinity norm
    p.lipschitz_f = c.lpNorm<Eigen::Infinity>();
  }
  p.set = std::move(set);
  return p;
}

ProblemInstance make_quadratic(Eigen::MatrixXd H, DenseVector c, FeasibleSet set) {
  const Index n = c.size();
  if (H.rows() != n || H.cols() != n || set.dim() != n)
    throw std::invalid_argument("make_quadratic: dimension mismatch");
  ProblemInstance p;
  p.name = "quadratic";
  p.descriptor = {{"type", "quadratic"}, {"H", to_json(H)}, {"c", to_json(c)}, {"set", set_to_json(set)}};
  p.objective = [H, c](const DenseVector& x) {
    check_same_dim(c, x, "quadratic");
    const DenseVector diff = x - c;
    const DenseVector grad = H * diff;
    return OracleResponse{0.5 * diff.dot(grad), grad, 0.0, std::nullopt};
  };
  const bool diagonal = (H - Eigen::MatrixXd(H.diagonal().asDiagonal())).cwiseAbs().maxCoeff() == 0.0;
  if (std::holds_alternative<AllSpace>(set.variant())) {
    p.known_opt = KnownOptimum{0.0, c};
  } else if (diagonal && std::holds_alternative<Box>(set.variant())) {
    const DenseVector xs = set.project(c);
    const DenseVector diff = xs - c;
    p.known_opt = KnownOptimum{0.5 * diff.dot(H * diff), xs};
  }
  if (set.bounded() && !set.is_simplex_like()) {
    // max |H (x - c)|_2 over the set, bounded through the operator norm.
    const double op = H.jacobiSvd().singularValues()[0];
    double far = 0.0;
    if (const auto* box = std::get_if<Box>(&set.variant())) {
      for (Index i = 0; i < n; ++i) {
        const double a = box->lower[i] - c[i];
        const double b = box->upper[i] - c[i];
        far += std::max(a * a, b * b);
      }
      far = std::sqrt(far);
    } else if (const auto* ball = std::get_if<EuclideanBall>(&set.variant())) {
      far = (ball->center - c).norm() + ball->radius;
    }
    p.lipschitz_f = op * far;
  }
  p.set = std::move(set);
  return p;
}

// ------------------------------------------------------------------ box LPs

ProblemInstance make_box_lp(DenseVector c, Eigen::MatrixXd A, DenseVector b, FeasibleSet box_set) {
  const auto* box = std::get_if<Box>(&box_set.variant());
  if (box == nullptr) throw std::invalid_argument("make_box_lp: the feasible set must be a box");
  const Index n = c.size();
  const Index m = A.rows();
  if (A.cols() != n || b.size() != m || box_set.dim() != n)
    throw std::invalid_argument("make_box_lp: dimension mismatch");

  ProblemInstance p;
  p.name = "box_lp";
  p.descriptor = {{"type", "box_lp"}, {"c", to_json(c)}, {"A", to_json(A)}, {"b", to_json(b)},
                  {"set", set_to_json(box_set)}};
  p.objective = affine_oracle(c, 0.0);
  std::vector<Oracle> pieces;
  double mg = 0.0;
  for (Index i = 0; i < m; ++i) {
    pieces.push_back(affine_oracle(A.row(i).transpose(), b[i]));
    mg = std::max(mg, A.row(i).norm());
  }
  p.constraints = ConstraintBundle(std::move(pieces));
  p.lipschitz_f = c.norm();
  p.lipschitz_g = mg;

  const DenseVector lo = box->lower;
  const DenseVector hi = box->upper;
  p.dual_function = [c, A, b, lo, hi](const DenseVector& lambda) {
    if (lambda.size() != A.rows()) throw std::invalid_argument("dual function: multiplier size");
    const DenseVector q = c + A.transpose() * lambda;
    double v = -lambda.dot(b);
    for (Index j = 0; j < q.size(); ++j) v += std::min(q[j] * lo[j], q[j] * hi[j]);
    return v;
  };

  // Reference optimum: shift x = x' + lo so that x' >= 0.
  LinearProgram lp;
  lp.A = Eigen::MatrixXd::Zero(m + n, n);
  lp.b = DenseVector(m + n);
  lp.A.topRows(m) = A;
  lp.b.head(m) = b - A * lo;
  lp.A.bottomRows(n) = Eigen::MatrixXd::Identity(n, n);
  lp.b.tail(n) = hi - lo;
  lp.sense.assign(static_cast<std::size_t>(m + n), RowSense::kLessEqual);
  lp.c = c;
  const LpResult res = solve_lp(lp);
  if (res.status == LpStatus::kOptimal) {
    const DenseVector xs = res.x + lo;
    p.known_opt = KnownOptimum{c.dot(xs), xs};
  }
  p.set = std::move(box_set);
  return p;
}

ProblemInstance gen_box_lp(int n, int m, std::uint64_t seed) {
  if (n < 1 || m < 1) throw std::invalid_argument("gen_box_lp: need n, m >= 1");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> rhs(0.2, 1.0);
  DenseVector c(n);
  for (auto& v : c) v = normal(rng);
  c /= c.norm();
  Eigen::MatrixXd A(m, n);
  for (Index i = 0; i < m; ++i) {
    for (Index j = 0; j < n; ++j) A(i, j) = normal(rng);
    A.row(i) /= A.row(i).norm();
  }
  DenseVector b(m);
  for (auto& v : b) v = rhs(rng);
  ProblemInstance p = make_box_lp(std::move(c), std::move(A), std::move(b), FeasibleSet::box(n, -1.0, 1.0));
  p.name = "gen_box_lp";
  return p;
}

ProblemInstance make_quadratic_linf_ball(DenseVector c) {
  const Index n = c.size();
  ProblemInstance p;
  p.name = "quadratic_linf_ball";
  p.descriptor = {{"type", "quadratic_linf_ball"}, {"c", to_json(c)}};
  p.objective = [c](const DenseVector& x) {
    check_same_dim(c, x, "quadratic_linf_ball");
    const DenseVector diff = x - c;
    return OracleResponse{diff.squaredNorm(), 2.0 * diff, 0.0, std::nullopt};
  };
  std::vector<Oracle> pieces;
  for (Index i = 0; i < n; ++i) {
    DenseVector e = DenseVector::Zero(n);
    e[i] = 1.0;
    pieces.push_back(affine_oracle(e, 1.0));
    pieces.push_back(affine_oracle(-e, 1.0));
  }
  p.constraints = ConstraintBundle(std::move(pieces));
  p.lipschitz_g = 1.0;
  p.set = FeasibleSet::box(n, -2.0, 2.0);
  const DenseVector xs = c.cwiseMax(-1.0).cwiseMin(1.0);
  p.known_opt = KnownOptimum{(xs - c).squaredNorm(), xs};
  return p;
}

// ----------------------------------------------------------- transportation

double transport_primal_optimum(const TransportData& data) {
  const Index m = data.cost.rows();
  const Index n = data.cost.cols();
  LinearProgram lp;
  lp.A = Eigen::MatrixXd::Zero(n + m, m * n);
  lp.b = DenseVector(n + m);
  lp.c = DenseVector(m * n);
  for (Index i = 0; i < m; ++i) {
    for (Index j = 0; j < n; ++j) {
      const Index col = i * n + j;
      lp.c[col] = data.cost(i, j);
      lp.A(j, col) = 1.0;
      lp.A(n + i, col) = 1.0;
    }
  }
  lp.b.head(n) = data.supply_a;
  lp.b.tail(m) = data.supply_b;
  lp.sense.assign(static_cast<std::size_t>(n + m), RowSense::kEqual);
  const LpResult res = solve_lp(lp);
  if (res.status != LpStatus::kOptimal) throw std::runtime_error("transport LP oracle failed");
  return res.value;
}

ProblemInstance make_transport_dual(TransportData data) {
  const Index m = data.cost.rows();
  const Index n = data.cost.cols();
  if (data.supply_a.size() != n || data.supply_b.size() != m)
    throw std::invalid_argument("transport: supply sizes do not match the cost matrix");
  const double total_a = data.supply_a.sum();
  const double total_b = data.supply_b.sum();
  if (std::abs(total_a - total_b) > 1e-9 * std::max(1.0, total_a))
    throw std::invalid_argument("transport: unbalanced supplies");
  data.V = total_a;

  ProblemInstance p;
  p.name = "transport_dual";
  p.descriptor = {{"type", "transport_dual"}, {"a", to_json(data.supply_a)}, {"b", to_json(data.supply_b)},
                  {"cost", to_json(data.cost)}};
  // variables: (u_1..u_n, v_1..v_m)
  p.objective = [data, m, n](const DenseVector& uv) {
    if (uv.size() != m + n) throw std::invalid_argument("transport dual: dimension mismatch");
    const auto u = uv.head(n);
    const auto v = uv.tail(m);
    OracleResponse r;
    r.subgradient = DenseVector(m + n);
    r.subgradient.head(n) = -data.supply_a;
    r.subgradient.tail(m) = -data.supply_b;
    double value = -data.supply_a.dot(u) - data.supply_b.dot(v);
    for (Index i = 0; i < m; ++i) {
      for (Index j = 0; j < n; ++j) {
        const double slack = u[j] + v[i] - data.cost(i, j);
        if (slack > 0.0) {  // a tie at zero contributes 0
          value += data.V * slack;
          r.subgradient[j] += data.V;
          r.subgradient[n + i] += data.V;
        }
      }
    }
    r.value = value;
    return r;
  };
  p.set = FeasibleSet::all_space(m + n);
  const double mf = data.supply_a.norm() + data.supply_b.norm() +
                    data.V * std::sqrt(static_cast<double>(n * m * m + m * n * n));
  p.lipschitz_f = mf;

  // Reference optimum: the LP dual max a.u + b.v s.t. u_j + v_i <= c_ij.
  LinearProgram lp;
  lp.A = Eigen::MatrixXd::Zero(m * n, m + n);
  lp.b = DenseVector(m * n);
  for (Index i = 0; i < m; ++i) {
    for (Index j = 0; j < n; ++j) {
      lp.A(i * n + j, j) = 1.0;
      lp.A(i * n + j, n + i) = 1.0;
      lp.b[i * n + j] = data.cost(i, j);
    }
  }
  lp.sense.assign(static_cast<std::size_t>(m * n), RowSense::kLessEqual);
  lp.c = DenseVector(m + n);
  lp.c.head(n) = -data.supply_a;
  lp.c.tail(m) = -data.supply_b;
  lp.free.assign(static_cast<std::size_t>(m + n), true);
  const LpResult res = solve_lp(lp);
  if (res.status == LpStatus::kOptimal) p.known_opt = KnownOptimum{res.value, res.x};
  return p;
}

ProblemInstance gen_transport_dual(int m, int n, std::uint64_t seed) {
  if (m < 1 || n < 1) throw std::invalid_argument("gen_transport_dual: need m, n >= 1");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> supply(1, 5);
  std::uniform_int_distribution<int> cost(0, 9);
  TransportData data;
  data.supply_a = DenseVector(n);
  data.supply_b = DenseVector(m);
  for (auto& v : data.supply_a) v = supply(rng);
  for (auto& v : data.supply_b) v = supply(rng);
  // Balance by topping up the smaller side one unit at a time.
  std::uniform_int_distribution<int> pick_a(0, n - 1);
  std::uniform_int_distribution<int> pick_b(0, m - 1);
  while (data.supply_a.sum() < data.supply_b.sum()) data.supply_a[pick_a(rng)] += 1.0;
  while (data.supply_b.sum() < data.supply_a.sum()) data.supply_b[pick_b(rng)] += 1.0;
  data.cost = Eigen::MatrixXd(m, n);
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < n; ++j) data.cost(i, j) = cost(rng);
  ProblemInstance p = make_transport_dual(std::move(data));
  return p;
}

// --------------------------------------------------------------------- TTD

namespace {

std::optional<LpResult> ttd_lp(const TtdData& data) {
  const Index bars = data.bars.rows();
  const Index dofs = data.bars.cols();
  LinearProgram lp;
  lp.A = Eigen::MatrixXd(2 * bars, dofs);
  for (Index i = 0; i < bars; ++i) {
    lp.A.row(2 * i) = data.bars.row(i);
    lp.A.row(2 * i + 1) = -data.bars.row(i);
  }
  lp.b = DenseVector::Ones(2 * bars);
  lp.sense.assign(static_cast<std::size_t>(2 * bars), RowSense::kLessEqual);
  lp.c = -data.force;
  lp.free.assign(static_cast<std::size_t>(dofs), true);
  LpResult res = solve_lp(lp);
  if (res.status != LpStatus::kOptimal) return std::nullopt;
  return res;
}

}  // namespace

TtdData gen_ttd_data(int nodes, int bars, std::uint64_t seed) {
  if (nodes < 2 || bars < 1) throw std::invalid_argument("gen_ttd_data: need nodes >= 2, bars >= 1");
  const int width = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(nodes))));
  if (width < 2) throw std::invalid_argument("gen_ttd_data: grid needs at least two columns");
  std::vector<int> dof(static_cast<std::size_t>(nodes), -1);
  int ndof = 0;
  for (int k = 0; k < nodes; ++k)
    if (k % width != 0) {
      dof[static_cast<std::size_t>(k)] = ndof;
      ndof += 2;
    }

  struct Candidate {
    int p, q;
  };
  std::vector<Candidate> candidates;
  for (int p = 0; p < nodes; ++p) {
    for (int q = p + 1; q < nodes; ++q) {
      const int dx = q % width - p % width;
      const int dy = q / width - p / width;
      if (std::abs(dx) > 1 || std::abs(dy) > 1) continue;
      if (dof[static_cast<std::size_t>(p)] < 0 && dof[static_cast<std::size_t>(q)] < 0) continue;
      candidates.push_back({p, q});
    }
  }

  auto bar_row = [&](const Candidate& c) {
    DenseVector a = DenseVector::Zero(ndof);
    const double dx = c.q % width - c.p % width;
    const double dy = c.q / width - c.p / width;
    const double len = std::hypot(dx, dy);
    const int dp = dof[static_cast<std::size_t>(c.p)];
    const int dq = dof[static_cast<std::size_t>(c.q)];
    if (dp >= 0) {
      a[dp] = -dx / len;
      a[dp + 1] = -dy / len;
    }
    if (dq >= 0) {
      a[dq] = dx / len;
      a[dq + 1] = dy / len;
    }
    return a;
  };

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  TtdData data;
  // Load one seeded free node with a unit force.
  std::vector<int> free_nodes;
  for (int k = 0; k < nodes; ++k)
    if (dof[static_cast<std::size_t>(k)] >= 0) free_nodes.push_back(k);
  std::uniform_int_distribution<std::size_t> pick(0, free_nodes.size() - 1);
  const int loaded = free_nodes[pick(rng)];
  double fx = 0.0, fy = 0.0;
  while (std::hypot(fx, fy) < 0.1) {
    fx = unit(rng);
    fy = unit(rng);
  }
  const double fn = std::hypot(fx, fy);
  data.force = DenseVector::Zero(ndof);
  data.force[dof[static_cast<std::size_t>(loaded)]] = fx / fn;
  data.force[dof[static_cast<std::size_t>(loaded)] + 1] = fy / fn;

  const std::size_t want = std::min<std::size_t>(static_cast<std::size_t>(bars), candidates.size());
  for (int attempt = 0; attempt < 200; ++attempt) {
    std::vector<Candidate> chosen = candidates;
    if (want < candidates.size()) {
      std::shuffle(chosen.begin(), chosen.end(), rng);
      chosen.resize(want);
      std::sort(chosen.begin(), chosen.end(),
                [](const Candidate& a, const Candidate& b) { return a.p != b.p ? a.p < b.p : a.q < b.q; });
    }
    data.bars = Eigen::MatrixXd(static_cast<Index>(chosen.size()), ndof);
    for (std::size_t i = 0; i < chosen.size(); ++i) data.bars.row(static_cast<Index>(i)) = bar_row(chosen[i]).transpose();
    if (ttd_lp(data)) return data;
    if (want == candidates.size()) break;
  }
  throw std::runtime_error("gen_ttd_data: could not find a stable truss for the requested bars");
}

ProblemInstance make_ttd_dual(TtdData data, std::optional<double> box_radius) {
  const Index bars = data.bars.rows();
  const Index dofs = data.bars.cols();
  if (data.force.size() != dofs) throw std::invalid_argument("ttd: force size differs from dofs");
  ProblemInstance p;
  p.name = "ttd_dual";
  const std::optional<LpResult> lp = ttd_lp(data);
  if (lp) p.known_opt = KnownOptimum{lp->value, lp->x};
  double radius = 1.0;
  if (box_radius) radius = *box_radius;
  else if (lp) radius = std::max(1.0, 2.0 * lp->x.lpNorm<Eigen::Infinity>());
  p.descriptor = {{"type", "ttd_dual"}, {"bars", to_json(data.bars)}, {"force", to_json(data.force)},
                  {"box_radius", radius}};

  p.objective = affine_oracle(-data.force, 0.0);
  std::vector<Oracle> pieces;
  double mg = 0.0;
  for (Index i = 0; i < bars; ++i) {
    const DenseVector a = data.bars.row(i).transpose();
    pieces.push_back(affine_oracle(a, 1.0));
    pieces.push_back(affine_oracle(-a, 1.0));
    mg = std::max(mg, a.norm());
  }
  p.constraints = ConstraintBundle(std::move(pieces));
  p.lipschitz_f = data.force.norm();
  p.lipschitz_g = mg;
  p.set = FeasibleSet::box(dofs, -radius, radius);
  p.dual_function = [data, radius](const DenseVector& lambda) {
    const Index m = data.bars.rows();
    if (lambda.size() != 2 * m) throw std::invalid_argument("ttd dual function: multiplier size");
    DenseVector q = -data.force;
    for (Index i = 0; i < m; ++i) q += (lambda[2 * i] - lambda[2 * i + 1]) * data.bars.row(i).transpose();
    return -radius * q.lpNorm<1>() - lambda.sum();
  };
  return p;
}

ProblemInstance gen_ttd_dual(int nodes, int bars, std::uint64_t seed) {
  return make_ttd_dual(gen_ttd_data(nodes, bars, seed));
}

DenseVector ttd_bar_multipliers(const DenseVector& piece_multipliers) {
  if (piece_multipliers.size() % 2 != 0) throw std::invalid_argument("ttd multipliers: odd length");
  const Index m = piece_multipliers.size() / 2;
  DenseVector x(m);
  for (Index i = 0; i < m; ++i) x[i] = std::abs(piece_multipliers[2 * i] - piece_multipliers[2 * i + 1]);
  return x;
}

TtdPrimal reconstruct_ttd_primal(const TtdData& data, const DenseVector& x_star, const DenseVector& y_star,
                                 double total_weight) {
  if (x_star.size() != data.bars.rows() || y_star.size() != data.bars.cols())
    throw std::invalid_argument("reconstruct_ttd_primal: dimension mismatch");
  if ((x_star.array() < 0.0).any()) throw std::invalid_argument("reconstruct_ttd_primal: negative multiplier");
  const double mass = std::accumulate(x_star.begin(), x_star.end(), 0.0);
  if (!(mass > 0.0)) throw std::invalid_argument("reconstruct_ttd_primal: all-zero multipliers");
  TtdPrimal out;
  if (!(total_weight > 0.0) || !std::isfinite(total_weight))
    throw std::invalid_argument("reconstruct_ttd_primal: total weight must be positive");
  // Weights are multiples of q = ulp(T), so every partial sum up to T is exact
  // and the largest weight can absorb the remainder.
  const double q = std::nextafter(total_weight, INFINITY) - total_weight;
  out.w = (total_weight / mass) * x_star;
  Index big = 0;
  out.w.maxCoeff(&big);
  double rest = 0.0;
  for (Index i = 0; i < out.w.size(); ++i) {
    if (i == big) continue;
    out.w[i] = std::round(out.w[i] / q) * q;
    rest += out.w[i];
  }
  out.w[big] = total_weight - rest;
  out.z = (mass / total_weight) * y_star;
  DenseVector az = DenseVector::Zero(data.bars.cols());
  for (Index i = 0; i < data.bars.rows(); ++i) {
    const DenseVector a = data.bars.row(i).transpose();
    az += out.w[i] * a.dot(out.z) * a;
  }
  out.residual = (az - data.force).lpNorm<Eigen::Infinity>();
  return out;
}

ProblemInstance problem_from_descriptor(const json& d) {
  const std::string type = d.at("type").get<std::string>();
  if (type == "abs_1d") return make_abs_1d();
  if (type == "sqrt_abs_1d") return make_sqrt_abs_1d();
  if (type == "norm2") return make_norm2(vector_from_json(d.at("x_star")));
  if (type == "linear") return make_linear(vector_from_json(d.at("c")), set_from_json(d.at("set")));
  if (type == "quadratic")
    return make_quadratic(matrix_from_json(d.at("H")), vector_from_json(d.at("c")), set_from_json(d.at("set")));
  if (type == "box_lp")
    return make_box_lp(vector_from_json(d.at("c")), matrix_from_json(d.at("A")), vector_from_json(d.at("b")),
                       set_from_json(d.at("set")));
  if (type == "quadratic_linf_ball") return make_quadratic_linf_ball(vector_from_json(d.at("c")));
  if (type == "transport_dual") {
    TransportData data;
    data.supply_a = vector_from_json(d.at("a"));
    data.supply_b = vector_from_json(d.at("b"));
    data.cost = matrix_from_json(d.at("cost"));
    return make_transport_dual(std::move(data));
  }
  if (type == "ttd_dual") {
    TtdData data{matrix_from_json(d.at("bars")), vector_from_json(d.at("force"))};
    std::optional<double> radius;
    if (d.contains("box_radius")) radius = d.at("box_radius").get<double>();
    return make_ttd_dual(std::move(data), radius);
  }
  throw std::invalid_argument("unknown problem type '" + type + "'");
}

}  // namespace lowmem
