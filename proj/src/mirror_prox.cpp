#include "lowmem/mirror_prox.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <limits>
#include <stdexcept>

#include "lowmem/clock.hpp"

namespace lowmem {

SaddleOperator bilinear_operator(const BilinearGame& game) {
  SaddleOperator op;
  const Index n = game.n();
  const Index m = game.m();
  op.dim = n + m;
  op.phi = [A = game.A, n, m](const DenseVector& z) {
    if (z.size() != n + m) throw std::invalid_argument("bilinear operator: dimension mismatch");
    DenseVector out(n + m);
    out.head(n) = A.transpose() * z.tail(m);
    out.tail(m) = -(A * z.head(n));
    return out;
  };
  return op;
}

MatrixGame gen_matrix_game(Eigen::MatrixXd A, GameSetup choice) {
  if (A.size() == 0 || !A.allFinite()) throw std::invalid_argument("gen_matrix_game: empty or non-finite matrix");
  const Index n = A.cols();
  const Index m = A.rows();
  if (choice == GameSetup::kEntropySimplex) {
    BilinearGame game{A, FeasibleSet::simplex(n), FeasibleSet::simplex(m)};
    SaddleOperator op = bilinear_operator(game);
    op.lipschitz = A.cwiseAbs().maxCoeff();
    op.holder = HolderData{1.0, *op.lipschitz};
    ProxSetup setup = ProxSetup::product(ProxSetup::entropy(game.x_set), ProxSetup::entropy(game.u_set));
    return {std::move(game), std::move(op), std::move(setup)};
  }
  // The origin is a saddle point of any such game, so the prox center sits mid-box.
  BilinearGame game{A, FeasibleSet::box(n, 0.0, 1.0), FeasibleSet::box(m, 0.0, 1.0)};
  SaddleOperator op = bilinear_operator(game);
  op.lipschitz = A.jacobiSvd().singularValues()[0];
  op.holder = HolderData{1.0, *op.lipschitz};
  ProxSetup setup = ProxSetup::product(ProxSetup::euclidean(game.x_set, DenseVector::Constant(n, 0.5)),
                                       ProxSetup::euclidean(game.u_set, DenseVector::Constant(m, 0.5)));
  return {std::move(game), std::move(op), std::move(setup)};
}

double linear_max(const FeasibleSet& set, const DenseVector& c) {
  if (c.size() != set.dim()) throw std::invalid_argument("linear_max: dimension mismatch");
  return std::visit(
      [&](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Box>) {
          double v = 0.0;
          for (Index i = 0; i < c.size(); ++i) v += std::max(c[i] * s.lower[i], c[i] * s.upper[i]);
          return v;
        } else if constexpr (std::is_same_v<T, Simplex> || std::is_same_v<T, L1Ball>) {
          return set.simplex_scale() * c.maxCoeff();
        } else if constexpr (std::is_same_v<T, EuclideanBall>) {
          return c.dot(s.center) + s.radius * c.norm();
        } else {
          if (c.isZero(0.0)) return 0.0;
          return std::numeric_limits<double>::infinity();
        }
      },
      set.variant());
}

double saddle_gap(const BilinearGame& game, const DenseVector& x_hat, const DenseVector& u_hat) {
  if (x_hat.size() != game.n() || u_hat.size() != game.m())
    throw std::invalid_argument("saddle_gap: dimension mismatch");
  const double upper = linear_max(game.u_set, game.A * x_hat);
  const double lower = -linear_max(game.x_set, -(game.A.transpose() * u_hat));
  return upper - lower;
}

double saddle_gap(const BilinearGame& game, const DenseVector& w_hat) {
  if (w_hat.size() != game.n() + game.m()) throw std::invalid_argument("saddle_gap: dimension mismatch");
  return saddle_gap(game, w_hat.head(game.n()), w_hat.tail(game.m()));
}

double vertex_residual(const SaddleOperator& op, const ProxSetup& setup, const DenseVector& w_hat) {
  std::vector<std::vector<DenseVector>> verts;
  std::size_t total = 1;
  for (const ProxBlock& b : setup.blocks()) {
    verts.push_back(b.set.vertices());
    total *= verts.back().size();
    if (total > (std::size_t{1} << 16)) throw std::invalid_argument("vertex_residual: more than 2^16 vertices");
  }
  double best = -std::numeric_limits<double>::infinity();
  std::vector<std::size_t> idx(verts.size(), 0);
  DenseVector z(setup.dim());
  for (std::size_t count = 0; count < total; ++count) {
    for (std::size_t b = 0; b < verts.size(); ++b)
      z.segment(setup.block_offset(b), verts[b][idx[b]].size()) = verts[b][idx[b]];
    best = std::max(best, op.phi(z).dot(w_hat - z));
    for (std::size_t b = 0; b < verts.size(); ++b) {
      if (++idx[b] < verts[b].size()) break;
      idx[b] = 0;
    }
  }
  return best;
}

namespace {

void check_inputs(const SaddleOperator& op, const ProxSetup& setup, int N) {
  if (!op.phi) throw std::invalid_argument("mirror prox: operator is empty");
  if (op.dim != setup.dim()) throw std::invalid_argument("mirror prox: operator and setup dimensions differ");
  if (N < 0) throw std::invalid_argument("mirror prox: N must be non-negative");
}

DenseVector eval_phi(const SaddleOperator& op, const DenseVector& z) {
  DenseVector v = op.phi(z);
  if (v.size() != z.size() || !v.allFinite()) throw std::runtime_error("mirror prox: non-finite operator value");
  return v;
}

}  // namespace

VIReport mirror_prox_solve(const SaddleOperator& op, const ProxSetup& setup, double L, int N,
                           const VIOptions& opts) {
  check_inputs(op, setup, N);
  if (!(L > 0.0)) throw std::invalid_argument("mirror_prox_solve: L must be positive");
  const SteadyTime start = now();
  VIReport rep;
  rep.method = "mirror_prox";
  DenseVector z = setup.prox_center();
  DenseVector wsum = DenseVector::Zero(z.size());
  for (int k = 0; k < N; ++k) {
    const DenseVector pz = eval_phi(op, z);
    const DenseVector w = setup.mirror_step(z, pz / L);
    const DenseVector pw = eval_phi(op, w);
    z = setup.mirror_step(z, pw / L);
    wsum += w;
    rep.oracle_calls += 2;
    rep.evaluations += 2;
    VIRecord rec{k + 1, L, 1, rep.oracle_calls, rep.evaluations, static_cast<double>(k + 1), std::nullopt, 0.0, 0.0, elapsed_ns(start)};
    if (opts.certificate && ((k + 1) % std::max(1, opts.certify_every) == 0 || k + 1 == N))
      rec.certificate = opts.certificate(wsum / (k + 1.0));
    rep.trace.push_back(rec);
  }
  rep.iterations = N;
  rep.weight_sum = N;
  rep.z_last = z;
  rep.w_hat = N > 0 ? DenseVector(wsum / static_cast<double>(N)) : z;
  return rep;
}

VIReport universal_mirror_prox_solve(const SaddleOperator& op, const ProxSetup& setup, double eps, double M_init,
                                     int N, const VIOptions& opts) {
  check_inputs(op, setup, N);
  if (!(eps > 0.0)) throw std::invalid_argument("universal_mirror_prox_solve: eps must be positive");
  if (!(M_init > 0.0)) throw std::invalid_argument("universal_mirror_prox_solve: M_init must be positive");
  std::optional<double> D;
  if (opts.adaptive_stop) {
    D = setup.max_bregman_from_center();
    if (!D) throw std::invalid_argument("universal_mirror_prox_solve: adaptive stop needs a bounded domain");
  }
  const SteadyTime start = now();
  VIReport rep;
  rep.method = "universal_mirror_prox";
  DenseVector z = setup.prox_center();
  DenseVector wsum = DenseVector::Zero(z.size());
  double inv_sum = 0.0;
  double M_prev = M_init;
  int k = 0;
  for (; k < N; ++k) {
    const DenseVector pz = eval_phi(op, z);
    ++rep.evaluations;
    int i = 0;
    while (true) {
      const double M = std::ldexp(M_prev, i - 1);
      const DenseVector w = setup.mirror_step(z, pz / M);
      if (w == z) {
        rep.exact_solution = true;
        break;
      }
      const DenseVector pw = eval_phi(op, w);
      ++rep.evaluations;
      DenseVector z_next = setup.mirror_step(z, pw / M);
      ++i;
      rep.oracle_calls += 2;
      const double a = setup.norm(w - z);
      const double b = setup.norm(w - z_next);
      const double lhs = (pw - pz).dot(w - z_next);
      const double rhs = 0.5 * M * (a * a + b * b) + 0.5 * eps;
      if (lhs <= rhs) {
        wsum += w / M;
        inv_sum += 1.0 / M;
        z = std::move(z_next);
        M_prev = M;
        VIRecord rec{k + 1, M, i, rep.oracle_calls, rep.evaluations, inv_sum, std::nullopt, lhs, rhs, elapsed_ns(start)};
        if (opts.certificate && ((k + 1) % std::max(1, opts.certify_every) == 0 || k + 1 == N))
          rec.certificate = opts.certificate(wsum / inv_sum);
        rep.trace.push_back(rec);
        break;
      }
      if (i >= opts.max_trials)
        throw std::runtime_error("universal mirror prox: inner trials exceeded the cap; operator may not be Holder");
    }
    if (rep.exact_solution) break;
    if (D && *D / inv_sum <= 0.5 * eps) {
      rep.stopped_adaptively = true;
      ++k;
      break;
    }
  }
  rep.iterations = k;
  rep.weight_sum = inv_sum;
  rep.z_last = z;
  rep.w_hat = (inv_sum > 0.0 && !rep.exact_solution) ? DenseVector(wsum / inv_sum) : z;
  return rep;
}

double holder_L_of_delta(double nu, double L_nu, double delta) {
  return std::pow(1.0 / delta, (1.0 - nu) / (1.0 + nu)) * std::pow(L_nu, 2.0 / (1.0 + nu));
}

double universal_mp_rate(double nu, double L_nu, double eps, int k, double maxV) {
  if (k < 1) throw std::invalid_argument("universal_mp_rate: k must be >= 1");
  return std::pow(2.0 * L_nu, 2.0 / (1.0 + nu)) / (k * std::pow(eps, (1.0 - nu) / (1.0 + nu))) * maxV + eps / 2.0;
}

double universal_mp_call_bound(double nu, double L_nu, double eps, int k, double M_init) {
  return 4.0 * k + 2.0 * std::log2(2.0 * holder_L_of_delta(nu, L_nu, eps / 2.0)) - 2.0 * std::log2(M_init);
}

}  // namespace lowmem
