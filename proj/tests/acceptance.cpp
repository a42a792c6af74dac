// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "lowmem/accelerated.hpp"
#include "lowmem/classic.hpp"
#include "lowmem/constrained.hpp"
#include "lowmem/experiment.hpp"
#include "lowmem/mirror_prox.hpp"
#include "lowmem/sparse_max.hpp"

using namespace lowmem;

namespace {

// Collects the worst violation of a family of `measured <= bound` checks.
struct Tally {
  int checks = 0;
  int failures = 0;
  double worst_margin = -INFINITY;  // max of measured - bound
  std::string first_failure;

  void le(double measured, double bound, const std::string& what, double tol = 0.0) {
    ++checks;
    worst_margin = std::max(worst_margin, measured - bound);
    if (!(measured <= bound + tol)) {
      if (failures == 0) {
        std::ostringstream s;
        s << what << ": " << format_double(measured) << " > " << format_double(bound);
        first_failure = s.str();
      }
      ++failures;
    }
  }
  void ok(bool cond, const std::string& what) {
    ++checks;
    if (!cond) {
      if (failures == 0) first_failure = what;
      ++failures;
    }
  }
  std::string detail() const {
    std::ostringstream s;
    s << checks << " checks, " << failures << " failures";
    if (std::isfinite(worst_margin)) s << ", worst measured-bound " << format_double(worst_margin);
    if (failures) s << "; first: " << first_failure;
    return s.str();
  }
};

DenseVector normal_vector(Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  DenseVector v(n);
  for (Index i = 0; i < n; ++i) v[i] = g(rng);
  return v;
}

DenseVector uniform_vector(Index n, double lo, double hi, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(lo, hi);
  DenseVector v(n);
  for (Index i = 0; i < n; ++i) v[i] = u(rng);
  return v;
}

Eigen::MatrixXd uniform_matrix(Index m, Index n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::MatrixXd A(m, n);
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < n; ++j) A(i, j) = u(rng);
  return A;
}

ProblemInstance quadratic_box(Index n, std::mt19937_64& rng) {
  const DenseVector h = uniform_vector(n, 1.0, 4.0, rng);
  const DenseVector c = uniform_vector(n, -2.0, 2.0, rng);
  return make_quadratic(Eigen::MatrixXd(h.asDiagonal()), c, FeasibleSet::box(n, -1.0, 1.0));
}

// ---------------------------------------------------------------- criteria

Tally c1_shor() {
  Tally t;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    std::mt19937_64 rng(seed);
    const Index n = 5 * static_cast<Index>(seed);
    const ProblemInstance p = make_norm2(normal_vector(n, rng));
    const double lambda = 0.5, eps = 0.1;
    const SolverReport r = run_shor(p, DenseVector::Zero(n), lambda, 10'000, {std::nullopt, {}, false});
    t.le(*r.min_distance, lambda * (1.0 + eps) / 2.0, "seed " + std::to_string(seed));
  }
  return t;
}

Tally c2_fixed_md() {
  Tally t;
  RunOptions quiet{std::nullopt, {}, false};
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    std::mt19937_64 rng(seed);
    const ProblemInstance p = make_norm2(normal_vector(10, rng));
    const auto eu = ProxSetup::euclidean(p.set);
    const double R = p.known_opt->x_star.norm();
    const SolverReport r = run_fixed_md(p, eu, R, 1.0, 1000, quiet);
    t.le(r.f_out - p.known_opt->f_star, 1.0 * R / std::sqrt(1000.0), "euclidean seed " + std::to_string(seed));

    const auto simplex = FeasibleSet::simplex(10);
    const ProblemInstance q = make_linear(uniform_vector(10, -1.0, 1.0, rng), simplex);
    const auto ent = ProxSetup::entropy(simplex);
    const double Rg = std::sqrt(ent.bregman(ent.prox_center(), q.known_opt->x_star));
    const double M = dual_norm(ent, q.objective(ent.prox_center()).subgradient);
    const SolverReport s = run_fixed_md(q, ent, Rg, M, 1000, quiet);
    t.le(s.f_out - q.known_opt->f_star, std::sqrt(2.0) * M * Rg / std::sqrt(1000.0),
         "entropy seed " + std::to_string(seed));
  }
  const ProblemInstance a = make_abs_1d();
  RunOptions o;
  o.x0 = DenseVector::Ones(1);
  const SolverReport toy = run_fixed_md(a, ProxSetup::euclidean(a.set), 1.0, 1.0, 4, o);
  t.ok(toy.x_out[0] == 0.375, "1D toy x_bar = " + format_double(toy.x_out[0]));
  return t;
}

Tally c3_entropy_simplex() {
  Tally t;
  for (Index n : {2, 10, 1000}) {
    std::mt19937_64 rng(static_cast<std::uint64_t>(n));
    const auto simplex = FeasibleSet::simplex(n);
    const ProblemInstance p = make_linear(uniform_vector(n, -1.0, 1.0, rng), simplex);
    const auto ent = ProxSetup::entropy(simplex);
    const double M = p.objective(ent.prox_center()).subgradient.lpNorm<Eigen::Infinity>();
    const int N = 10'000;
    const SolverReport r = run_fixed_md(p, ent, std::sqrt(std::log(static_cast<double>(n))), M, N,
                                        {std::nullopt, {}, false});
    t.le(r.f_out - p.known_opt->f_star, M * std::sqrt(2.0 * std::log(static_cast<double>(n)) / N),
         "n = " + std::to_string(n));
  }
  return t;
}

Tally c4_strongly_convex() {
  Tally t;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    std::mt19937_64 rng(seed);
    const ProblemInstance p = quadratic_box(6, rng);
    const double mu = 1.0;  // H >= I
    const int N = 1000;
    const SolverReport r = run_strongly_convex_md(p, ProxSetup::euclidean(p.set), mu, N, {std::nullopt, {}, false});
    const double M = *p.lipschitz_f;
    t.le(r.f_out - p.known_opt->f_star, 2.0 * M * M / (mu * (N + 1)), "seed " + std::to_string(seed));
  }
  return t;
}

Tally c5_algorithm2() {
  Tally t;
  for (double eps : {0.1, 0.01}) {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      const ProblemInstance p = gen_box_lp(5, 4, seed);
      const auto setup = ProxSetup::euclidean(p.set, DenseVector::Zero(5));
      ConstrainedOptions o;
      o.record_trace = false;
      const ConstrainedReport r = solve_constrained_nonsmooth(p, setup, eps, o);
      const std::string tag = "eps " + format_double(eps) + " seed " + std::to_string(seed);
      t.le(r.iterations, static_cast<double>(*r.iteration_bound), tag + " iterations");
      const Certificates c = certify(p, r, p.dual_function);
      t.le(*c.f_gap, eps, tag + " f_gap", 1e-12);
      t.le(c.g_value, eps, tag + " g", 1e-12);
      t.le(c.duality_gap, eps, tag + " duality gap", 1e-12);
    }
  }
  return t;
}

Tally c6_algorithm3() {
  Tally t;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    std::mt19937_64 rng(seed);
    const ProblemInstance p = make_quadratic_linf_ball(uniform_vector(4, -2.0, 2.0, rng));
    const auto setup = ProxSetup::euclidean(p.set, DenseVector::Zero(4));
    const double eps = 0.05;
    ConstrainedOptions o;
    o.record_trace = false;
    const ConstrainedReport r = solve_constrained_general(p, setup, eps, o);
    const std::string tag = "seed " + std::to_string(seed);
    t.le(*r.min_vf, eps, tag + " min v_f", 1e-12);
    t.le(r.g_value, eps, tag + " g", 1e-12);
    const double Mg = p.lipschitz_g.value_or(1.0);
    const double bound = std::ceil(2.0 * std::max(1.0, Mg * Mg) * r.theta0_sq / (eps * eps));
    t.le(r.iterations, bound, tag + " iterations");
  }
  return t;
}

Tally c7_inexact() {
  Tally t;
  const double eps = 0.1, delta = eps / 2.0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const ProblemInstance exact = gen_box_lp(5, 4, seed);
    ProblemInstance noisy = exact;
    noisy.objective = make_inexact(exact.objective, delta, *exact.lipschitz_f, seed);
    const auto setup = ProxSetup::euclidean(noisy.set, DenseVector::Zero(5));
    ConstrainedOptions o;
    o.record_trace = false;
    const ConstrainedReport r = solve_constrained_nonsmooth(noisy, setup, eps, o);
    t.le(exact.f(r.x_bar) - exact.known_opt->f_star, eps + delta + 1e-9, "seed " + std::to_string(seed));
  }
  return t;
}

Tally c8_agm() {
  Tally t;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    std::mt19937_64 rng(seed);
    const Index n = 8;
    const Eigen::MatrixXd B = uniform_matrix(n, n, rng);
    const Eigen::MatrixXd H = B.transpose() * B + 0.01 * Eigen::MatrixXd::Identity(n, n);
    const DenseVector c = normal_vector(n, rng);
    const ProblemInstance p = make_quadratic(H, c, FeasibleSet::all_space(n));
    const double L = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(H).eigenvalues().maxCoeff();
    const auto setup = ProxSetup::euclidean(p.set);
    const AgmReport r = agm_solve(p, setup, L, 500);
    const double V = setup.bregman(r.x0, p.known_opt->x_star);
    for (const AgmRecord& rec : r.trace)
      t.le(rec.f_y - p.known_opt->f_star, 4.0 * L * V / ((rec.k + 1.0) * (rec.k + 1.0)),
           "seed " + std::to_string(seed) + " k " + std::to_string(rec.k), 1e-12);
  }
  return t;
}

Tally c9_smoothing() {
  Tally t;
  std::mt19937_64 rng(9);
  const Eigen::MatrixXd A = uniform_matrix(8, 16, rng);
  DenseVector xt = normal_vector(16, rng);
  xt *= 0.5 / xt.norm();
  const DenseVector b = A * xt;
  const int N = 1000;
  const double radius = 1.0, D1 = 0.5 * radius * radius;
  const SmoothedLinfOracle probe(A, b, 1.0);
  const double mu = choose_mu(probe.operator_norm(), D1, probe.D2(), N);
  const SmoothedLinfOracle f(A, b, mu);
  for (int s = 0; s < 100; ++s) {
    const DenseVector x = normal_vector(16, rng);
    const DenseVector g = f(x).subgradient;
    const double step = 1e-6;
    for (Index i = 0; i < 16; ++i) {
      DenseVector e = DenseVector::Zero(16);
      e[i] = step;
      const double fd = (f(x + e).value - f(x - e).value) / (2.0 * step);
      t.le(std::abs(fd - g[i]) / std::max(1.0, std::abs(g[i])), 1e-6, "finite difference");
    }
  }
  const auto set = FeasibleSet::ball(DenseVector::Zero(16), radius);
  const AgmReport r = agm_solve(make_smoothed_problem(f, set), ProxSetup::euclidean(set), f.lipschitz(), N);
  t.le(f.exact_value(r.y), smoothing_bound(f.operator_norm(), D1, f.D2(), 0.0, N), "end-to-end residual");
  return t;
}

Tally c10_universal_agm() {
  Tally t;
  struct Case {
    std::string name;
    ProblemInstance p;
    DenseVector x0;
    double nu, L, eps;
    int N;
    double slope_cap;
  };
  // Spectrum (i/n)^2 keeps the smooth run in its sublinear regime for all N steps.
  const Index n = 200;
  DenseVector h(n);
  for (Index i = 0; i < n; ++i) h[i] = std::pow(static_cast<double>(i + 1) / n, 2.0);
  const ProblemInstance quad =
      make_quadratic(Eigen::MatrixXd(h.asDiagonal()), DenseVector::Zero(n), FeasibleSet::all_space(n));
  std::vector<Case> cases = {{"quadratic n 200", quad, DenseVector::Ones(n), 1.0, 1.0, 1e-10, 300, -1.8}};
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    std::mt19937_64 rng(seed);
    const double shift = std::normal_distribution<double>()(rng);
    cases.push_back({"abs shift seed " + std::to_string(seed), make_norm2(DenseVector::Constant(1, shift)),
                     DenseVector::Zero(1), 0.0, 2.0, 1e-3, 20'000, -0.4});
  }
  for (const Case& c : cases) {
    const auto setup = ProxSetup::euclidean(c.p.set);
    AgmOptions o;
    o.x0 = c.x0;
    const AgmReport r = universal_agm(c.p, setup, c.eps, 1.0, c.N, o);
    const double V = setup.bregman(c.x0, c.p.known_opt->x_star);
    std::vector<double> ks, gaps;
    for (const AgmRecord& rec : r.trace) {
      if (rec.k >= 1) t.ok(rec.check_lhs <= rec.check_rhs, c.name + " acceptance inequality");
      if (rec.k < 2) continue;
      const double gap = rec.f_y - c.p.known_opt->f_star;
      t.le(gap, universal_agm_rate(c.nu, c.L, c.eps, rec.k - 1, V), c.name + " rate k " + std::to_string(rec.k),
           1e-12);
      t.le(static_cast<double>(rec.oracle_calls), universal_agm_call_bound(c.nu, c.L, c.eps, rec.k - 1, V),
           c.name + " calls k " + std::to_string(rec.k));
      ks.push_back(rec.k);
      gaps.push_back(gap);
    }
    double slope = NAN;
    try {
      slope = fit_rate(ks, gaps);
    } catch (const std::invalid_argument&) {
    }
    t.le(slope, c.slope_cap, c.name + " fitted slope");
    std::printf("  universal agm %s: fitted slope %s\n", c.name.c_str(), format_double(slope).c_str());
  }
  return t;
}

Tally c11_mirror_prox() {
  Tally t;
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    std::mt19937_64 rng(seed);
    const Eigen::MatrixXd A = uniform_matrix(3, 4, rng);
    for (GameSetup s : {GameSetup::kEuclideanBox, GameSetup::kEntropySimplex}) {
      const MatrixGame g = gen_matrix_game(A, s);
      const double L = *g.op.lipschitz;
      const double maxV = *g.setup.max_bregman_from_center();
      VIOptions o;
      o.certificate = [&](const DenseVector& w) { return vertex_residual(g.op, g.setup, w); };
      const VIReport r = mirror_prox_solve(g.op, g.setup, L, 10'000, o);
      const std::string tag = std::string(s == GameSetup::kEuclideanBox ? "euclidean" : "entropy") + " seed " +
                              std::to_string(seed);
      for (const VIRecord& rec : r.trace) t.le(*rec.certificate, L * maxV / rec.k, tag, 1e-12);
      t.le(saddle_gap(g.game, r.w_hat), L * maxV / r.iterations, tag + " final saddle gap", 1e-12);
    }
  }
  return t;
}

Tally c12_universal_mp() {
  Tally t;
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    std::mt19937_64 rng(seed);
    const Eigen::MatrixXd A = uniform_matrix(4, 3, rng);
    for (GameSetup s : {GameSetup::kEuclideanBox, GameSetup::kEntropySimplex}) {
      const MatrixGame g = gen_matrix_game(A, s);
      const double L = *g.op.lipschitz;
      const double maxV = *g.setup.max_bregman_from_center();
      const double eps = 1e-3, M_init = 1.0;
      VIOptions o;
      o.certificate = [&](const DenseVector& w) { return vertex_residual(g.op, g.setup, w); };
      o.certify_every = 10;
      const VIReport r = universal_mirror_prox_solve(g.op, g.setup, eps, M_init, 3000, o);
      const std::string tag = std::string(s == GameSetup::kEuclideanBox ? "euclidean" : "entropy") + " seed " +
                              std::to_string(seed);
      for (const VIRecord& rec : r.trace) {
        t.le(rec.M, 2.0 * L, tag + " accepted M");
        t.ok(rec.check_lhs <= rec.check_rhs, tag + " acceptance inequality");
        if (rec.certificate) t.le(*rec.certificate, universal_mp_rate(1.0, L, eps, rec.k, maxV), tag + " rate", 1e-12);
        t.le(static_cast<double>(rec.oracle_calls), universal_mp_call_bound(1.0, L, eps, rec.k, M_init),
             tag + " oracle calls");
      }
    }
  }
  return t;
}

Tally c13_sparse_max() {
  Tally t;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::bernoulli_distribution keep(0.08);
    const Index m = 128, n = 64;
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(m, n);
    for (Index i = 0; i < m; ++i)
      for (Index j = 0; j < n; ++j)
        if (keep(rng)) A(i, j) = u(rng);
    MaxStructure s = build_max_structure(SparseMatrix::from_dense(A), DenseVector::Zero(n));
    const SparseMatrix& S = s.matrix();
    DenseVector y = DenseVector::Zero(n);
    std::uniform_int_distribution<Index> col(0, n - 1);
    std::uniform_int_distribution<int> count(1, 3);
    int mismatches = 0, over = 0;
    for (int step = 0; step < 100'000; ++step) {
      std::vector<std::pair<Index, double>> pairs;
      for (int c = count(rng); c > 0; --c) pairs.emplace_back(col(rng), u(rng));
      const SparseVector d = SparseVector::from_pairs(n, pairs);
      for (std::size_t q = 0; q < d.nnz(); ++q) y[d.indices[q]] += d.values[q];
      const UpdateResult r = s.apply(d);
      double best = -INFINITY;
      Index arg = 0;
      for (Index i = 0; i < m; ++i) {
        const SparseVector& row = S.row(i);
        double z = 0.0;
        for (std::size_t q = 0; q < row.nnz(); ++q) z += row.values[q] * y[row.indices[q]];
        if (z > best) {
          best = z;
          arg = i;
        }
      }
      if (r.value != best || r.argmax != arg) ++mismatches;
      if (r.touched_count > r.affected_rows * static_cast<std::size_t>(s.depth() + 1)) ++over;
    }
    t.ok(mismatches == 0, "seed " + std::to_string(seed) + ": " + std::to_string(mismatches) + " mismatches");
    t.ok(over == 0, "seed " + std::to_string(seed) + ": touched bound exceeded " + std::to_string(over) + " times");
  }
  return t;
}

Tally c14_ttd() {
  Tally t;
  const double eps = 0.01, T = 1.0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const TtdData d = gen_ttd_data(5, 6, seed);
    const ProblemInstance p = make_ttd_dual(d);
    const auto setup = ProxSetup::euclidean(p.set, DenseVector::Zero(p.dim()));
    ConstrainedOptions o;
    o.record_trace = false;
    const ConstrainedReport r = solve_constrained_nonsmooth(p, setup, eps, o);
    const std::string tag = "seed " + std::to_string(seed);
    if (!r.lambda_bar) {
      t.ok(false, tag + ": no productive steps");
      continue;
    }
    const TtdPrimal w = reconstruct_ttd_primal(d, ttd_bar_multipliers(*r.lambda_bar), r.x_bar, T);
    t.ok(std::accumulate(w.w.begin(), w.w.end(), 0.0) == T, tag + ": sum of weights differs from T");
    t.le(w.residual, 10.0 * eps, tag + " residual");
    std::printf("  ttd seed %d: iterations %d, residual %s\n", static_cast<int>(seed), r.iterations,
                format_double(w.residual).c_str());
  }
  return t;
}

Tally c15_determinism() {
  Tally t;
  const char* configs[] = {
      R"({"seed": 3, "problem": {"generator": "norm2", "n": 8}, "method": {"name": "shor", "lambda": 0.2, "N": 500}})",
      R"({"seed": 3, "problem": {"type": "abs_1d"}, "x0": [1.0], "method": {"name": "fixed_md", "R": 1, "M": 1, "N": 4}})",
      R"({"seed": 3, "problem": {"generator": "simplex_linear", "n": 20}, "method": {"name": "adaptive_md", "eps": 0.05, "N": 400}})",
      R"({"seed": 3, "problem": {"generator": "norm2", "n": 4}, "method": {"name": "normalized_md", "R": 5, "N": 300}})",
      R"({"seed": 3, "problem": {"generator": "quadratic_box", "n": 4}, "method": {"name": "strongly_convex_md", "mu": 1, "N": 300}})",
      R"({"seed": 3, "problem": {"generator": "gen_box_lp", "n": 4, "m": 3}, "setup": {"center": [0, 0, 0, 0]},
          "method": {"name": "constrained_nonsmooth", "eps": 0.1}})",
      R"({"seed": 3, "problem": {"type": "quadratic_linf_ball", "c": [1.5, -0.3, 2.0]}, "setup": {"center": [0, 0, 0]},
          "method": {"name": "constrained_general", "eps": 0.1}})",
      R"({"seed": 3, "problem": {"generator": "quadratic_box", "n": 5}, "method": {"name": "agm", "N": 200}})",
      R"({"seed": 3, "problem": {"generator": "quadratic_box", "n": 5}, "method": {"name": "universal_agm", "eps": 1e-4, "N": 200}})",
      R"({"seed": 3, "problem": {"generator": "linf_residual", "m": 8, "n": 16}, "method": {"name": "smoothing_agm", "N": 300}})",
      R"({"seed": 3, "problem": {"generator": "matrix_game", "m": 3, "n": 4, "setup": "euclidean"},
          "method": {"name": "mirror_prox", "N": 300}})",
      R"({"seed": 3, "problem": {"generator": "matrix_game", "m": 4, "n": 3, "setup": "entropy"},
          "method": {"name": "universal_mirror_prox", "eps": 0.001, "N": 300}})",
      R"({"seed": 3, "problem": {"generator": "gen_ttd_dual", "nodes": 9, "bars": 14}, "method": {"name": "ttd_sparse", "eps": 0.2}})",
      R"({"seed": 3, "problem": {"generator": "gen_transport_dual", "m": 3, "n": 4}, "method": {"name": "adaptive_md", "eps": 0.05, "N": 500}})",
  };
  for (const char* text : configs) {
    const nlohmann::json cfg = nlohmann::json::parse(text);
    const std::string name = cfg["method"]["name"];
    try {
      const ExperimentResult a = run_experiment(cfg);
      const ExperimentResult b = run_experiment(cfg);
      t.ok(trace_digest(a.rows) == trace_digest(b.rows), name + ": trace digests differ");
      t.ok(a.summary.dump() == b.summary.dump(), name + ": summaries differ");
      t.ok(csv_digest(trace_csv(a.rows)) == trace_digest(a.rows), name + ": csv digest differs");
    } catch (const std::exception& e) {
      t.ok(false, name + ": " + e.what());
    }
  }
  return t;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Tally()>>> criteria = {
      {"Shor constant-step minimum distance", c1_shor},
      {"Fixed-step mirror descent bounds and the 1D toy", c2_fixed_md},
      {"Entropy mirror descent on the unit simplex", c3_entropy_simplex},
      {"Strongly convex mirror descent", c4_strongly_convex},
      {"Switching method: iterations, gaps and duality gap", c5_algorithm2},
      {"Switching method for non-Lipschitz objectives", c6_algorithm3},
      {"Inexact objective oracle", c7_inexact},
      {"Accelerated gradient method rate", c8_agm},
      {"Smoothing: gradients and end-to-end residual", c9_smoothing},
      {"Universal accelerated method: rate, calls, slopes", c10_universal_agm},
      {"Mirror prox vertex-certified gap", c11_mirror_prox},
      {"Universal mirror prox: constants, rate, calls", c12_universal_mp},
      {"Sparse max structure equals brute force", c13_sparse_max},
      {"Truss pipeline: weights and residual", c14_ttd},
      {"Determinism of experiment traces", c15_determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Tally t;
    try {
      t = criteria[i].second();
    } catch (const std::exception& e) {
      t.ok(false, std::string("exception: ") + e.what());
    }
    const bool pass = t.failures == 0;
    failed += pass ? 0 : 1;
    std::printf("%s %2zu %s (%s)\n", pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), t.detail().c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
