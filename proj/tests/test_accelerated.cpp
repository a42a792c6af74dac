#include <cmath>
#include <random>

#include "doctest.h"
#include "lowmem/accelerated.hpp"

using namespace lowmem;

namespace {

DenseVector vec(std::initializer_list<double> v) {
  DenseVector out(static_cast<Index>(v.size()));
  Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

ProblemInstance half_square(Index n) {
  return make_quadratic(Eigen::MatrixXd::Identity(n, n), DenseVector::Zero(n), FeasibleSet::all_space(n));
}

Eigen::MatrixXd random_matrix(Index m, Index n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::MatrixXd A(m, n);
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < n; ++j) A(i, j) = u(rng);
  return A;
}

// Reference f_mu by direct summation of the doubled-simplex log-sum-exp.
double f_mu_reference(const Eigen::MatrixXd& A, const DenseVector& b, double mu, const DenseVector& x) {
  const DenseVector r = A * x - b;
  const double top = r.cwiseAbs().maxCoeff();
  double s = 0.0;
  for (Index i = 0; i < r.size(); ++i) s += std::exp((r[i] - top) / mu) + std::exp((-r[i] - top) / mu);
  return top + mu * std::log(s / (2.0 * r.size()));
}

}  // namespace

TEST_CASE("alpha_root examples") {
  CHECK(alpha_root(0.0, 1.0) == doctest::Approx(1.0));
  CHECK(alpha_root(0.0, 2.0) == doctest::Approx(0.5));
  const double a = alpha_root(2.0, 1.0);
  CHECK(a == doctest::Approx(2.0));
  CHECK(2.0 + a == doctest::Approx(1.0 * a * a));
  CHECK_THROWS_AS(alpha_root(1.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(alpha_root(-1.0, 1.0), std::invalid_argument);
}

TEST_CASE("agm: half squared norm from (1, 0)") {
  const ProblemInstance p = half_square(2);
  const auto setup = ProxSetup::euclidean(p.set);
  AgmOptions o;
  o.x0 = vec({1.0, 0.0});
  const AgmReport none = agm_solve(p, setup, 1.0, 0, o);
  CHECK(none.y == vec({1.0, 0.0}));
  CHECK(none.f_y == 0.5);
  const AgmReport r = agm_solve(p, setup, 1.0, 100, o);
  REQUIRE(r.trace.size() == 101);
  for (const AgmRecord& rec : r.trace) CHECK(rec.f_y <= 2.0 / ((rec.k + 1.0) * (rec.k + 1.0)) + 1e-15);
  CHECK(r.trace[0].f_y == 0.5);
  double csum = 0.0;
  for (std::size_t k = 1; k < r.trace.size(); ++k) {
    csum += r.trace[k].alpha;
    CHECK(r.trace[k].C == doctest::Approx(csum).epsilon(1e-12));
    CHECK(r.trace[k].C == doctest::Approx(r.trace[k].M * r.trace[k].alpha * r.trace[k].alpha).epsilon(1e-12));
  }
}

TEST_CASE("property: agm iterates stay feasible on constrained sets") {
  std::mt19937_64 rng(4);
  for (int t = 0; t < 5; ++t) {
    const auto set = FeasibleSet::box(3, -1.0, 1.0);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    const ProblemInstance p = make_quadratic(Eigen::MatrixXd::Identity(3, 3), vec({u(rng), u(rng), u(rng)}), set);
    AgmOptions o;
    o.keep_iterates = true;
    const AgmReport r = agm_solve(p, ProxSetup::euclidean(set), 1.0, 60, o);
    for (const DenseVector& y : r.iterates) CHECK(set.contains(y, 1e-12));
    const double V = 0.5 * (r.x0 - p.known_opt->x_star).squaredNorm();
    // y^0 is the start point; the rate covers y^1 onwards.
    for (std::size_t k = 1; k < r.trace.size(); ++k)
      CHECK(r.trace[k].f_y - p.known_opt->f_star <= 4.0 * V / ((k + 1.0) * (k + 1.0)) + 1e-12);
  }
}

TEST_CASE("smoothing: parameter choice and the zero map") {
  CHECK(choose_mu(2.0, 1.0, 4.0, 3) == doctest::Approx(0.5));
  CHECK(smoothing_bound(2.0, 1.0, 4.0, 0.0, 3) == doctest::Approx(4.0 * 2.0 * 2.0 / 4.0));
  const auto h = [](const DenseVector& x) { return OracleResponse{0.5 * x.squaredNorm(), x, 0.0, {}}; };
  const SmoothedLinfOracle zero(Eigen::MatrixXd::Zero(3, 2), DenseVector::Zero(3), 0.7, NormTag::kL2, h, 1.0);
  const DenseVector x = vec({0.3, -1.2});
  const OracleResponse r = zero(x);
  CHECK(r.value == doctest::Approx(0.5 * x.squaredNorm()).epsilon(1e-14));
  CHECK((r.subgradient - x).norm() <= 1e-14);
  CHECK(zero.D2() == doctest::Approx(std::log(6.0)));
  CHECK_THROWS_AS(SmoothedLinfOracle(Eigen::MatrixXd::Zero(1, 1), DenseVector::Zero(1), 0.0), std::invalid_argument);
}

TEST_CASE("property: smoothed oracle values, gradients and the uniform approximation") {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> g(0.0, 1.0);
  const Eigen::MatrixXd A = random_matrix(6, 4, rng);
  DenseVector b(6);
  for (Index i = 0; i < 6; ++i) b[i] = g(rng);
  for (double mu : {0.05, 0.3, 2.0}) {
    const SmoothedLinfOracle f(A, b, mu);
    const double L = f.lipschitz();
    CHECK(L == doctest::Approx(A.rowwise().norm().maxCoeff() * A.rowwise().norm().maxCoeff() / mu));
    for (int t = 0; t < 100; ++t) {
      DenseVector x(4), y(4);
      for (Index i = 0; i < 4; ++i) x[i] = g(rng);
      for (Index i = 0; i < 4; ++i) y[i] = g(rng);
      const OracleResponse rx = f(x);
      CHECK(rx.value == doctest::Approx(f_mu_reference(A, b, mu, x)).epsilon(1e-12));
      const double exact = f.exact_value(x);
      CHECK(rx.value <= exact + 1e-12);
      CHECK(exact <= rx.value + mu * f.D2() + 1e-12);
      const DenseVector u = f.inner_maximizer(x);
      CHECK(u.lpNorm<1>() <= 1.0 + 1e-12);
      CHECK((rx.subgradient - A.transpose() * u).norm() <= 1e-12 * (1.0 + rx.subgradient.norm()));
      const DenseVector w = f.inner_weights(x);
      CHECK((w.array() >= 0.0).all());
      CHECK(w.sum() == doctest::Approx(1.0).epsilon(1e-12));

      const double step = 1e-6 * std::max(1.0, mu);
      for (Index i = 0; i < 4; ++i) {
        DenseVector e = DenseVector::Zero(4);
        e[i] = step;
        const double fd = (f(x + e).value - f(x - e).value) / (2.0 * step);
        CHECK(std::abs(fd - rx.subgradient[i]) <= 1e-6 * std::max(1.0, std::abs(rx.subgradient[i])));
      }
      CHECK((rx.subgradient - f(y).subgradient).norm() <= L * (x - y).norm() + 1e-9);
    }
  }
}

TEST_CASE("smoothing: accelerated run meets the smoothing bound") {
  std::mt19937_64 rng(12);
  const Eigen::MatrixXd A = random_matrix(8, 5, rng);
  std::normal_distribution<double> g(0.0, 1.0);
  DenseVector xt(5);
  for (Index i = 0; i < 5; ++i) xt[i] = g(rng);
  xt *= 0.5 / xt.norm();
  const DenseVector b = A * xt;
  const double radius = 1.0;
  const double D1 = 0.5 * radius * radius;
  for (int N : {10, 100, 1000}) {
    const SmoothedLinfOracle probe(A, b, 1.0);
    const double mu = choose_mu(probe.operator_norm(), D1, probe.D2(), N);
    const SmoothedLinfOracle f(A, b, mu);
    const auto set = FeasibleSet::ball(DenseVector::Zero(5), radius);
    const AgmReport r = agm_solve(make_smoothed_problem(f, set), ProxSetup::euclidean(set), f.lipschitz(), N);
    CHECK(f.exact_value(r.y) <= smoothing_bound(f.operator_norm(), D1, f.D2(), 0.0, N) + 1e-12);
  }
}

TEST_CASE("universal agm: rate formula specialisations") {
  for (int k : {1, 5, 40}) {
    CHECK(universal_agm_rate(1.0, 3.0, 0.1, k, 0.7) == doctest::Approx(8.0 * 3.0 * 0.7 / (k * k) + 0.05));
    CHECK(universal_agm_rate(0.0, 3.0, 0.1, k, 0.7) == doctest::Approx(4.0 * 9.0 / (0.1 * k) * 0.7 + 0.05));
  }
  CHECK(universal_agm_call_bound(1.0, 1.0, 0.1, 9, 0.5) == doctest::Approx(40.0));
  CHECK(universal_agm_call_bound(0.0, 2.0, 0.5, 0, 1.0) == doctest::Approx(4.0 + 2.0 * (1.0 + 3.0 + 4.0)));
  CHECK_THROWS_AS(universal_agm_rate(1.0, 1.0, 0.1, 0, 1.0), std::invalid_argument);
}

TEST_CASE("universal agm: smooth and non-smooth one-dimensional runs") {
  struct Case {
    ProblemInstance p;
    double nu;
    double L;
  };
  ProblemInstance sq = half_square(1);
  const Case cases[] = {{sq, 1.0, 1.0}, {make_abs_1d(), 0.0, 2.0}};
  for (const Case& c : cases) {
    const auto setup = ProxSetup::euclidean(c.p.set);
    AgmOptions o;
    o.x0 = vec({1.0});
    const double eps = 0.05;
    const AgmReport r = universal_agm(c.p, setup, eps, 1.0, 300, o);
    const double V = 0.5;
    for (const AgmRecord& rec : r.trace) {
      if (rec.k >= 1) CHECK(rec.check_lhs <= rec.check_rhs);
      if (rec.k >= 1) CHECK(rec.C == doctest::Approx(rec.M * rec.alpha * rec.alpha).epsilon(1e-12));
      if (rec.k < 2) continue;
      CHECK(rec.f_y <= universal_agm_rate(c.nu, c.L, eps, rec.k - 1, V) + 1e-12);
      CHECK(static_cast<double>(rec.oracle_calls) <= universal_agm_call_bound(c.nu, c.L, eps, rec.k - 1, V));
    }
    CHECK(r.trace[0].oracle_calls == 0);
    CHECK(r.oracle_calls == r.trace.back().oracle_calls);
  }
}

TEST_CASE("universal agm: backtracking starts from half the previous constant") {
  const ProblemInstance p = half_square(1);
  AgmOptions o;
  o.x0 = vec({1.0});
  const AgmReport r = universal_agm(p, ProxSetup::euclidean(p.set), 1e-3, 1024.0, 20, o);
  // The first trial tests L0 itself; later steps halve it while it overestimates.
  CHECK(r.trace[1].M == 1024.0);
  CHECK(r.trace[1].trials == 1);
  CHECK(r.trace[2].M == 512.0);
  for (std::size_t k = 2; k < r.trace.size(); ++k) CHECK(r.trace[k].M >= r.trace[k - 1].M / 2.0);
}

TEST_CASE("universal agm stops once the oracle returns a zero subgradient") {
  const ProblemInstance p = make_abs_1d();
  AgmOptions o;
  o.x0 = vec({1.0});
  const AgmReport r = universal_agm(p, ProxSetup::euclidean(p.set), 1e-6, 1.0, 2000, o);
  REQUIRE(r.exact_optimum);
  CHECK(r.iterations < 2000);
  CHECK(r.trace.size() == static_cast<std::size_t>(r.iterations) + 1);
  CHECK(r.f_y == 0.0);
  CHECK(r.y == vec({0.0}));

  const ProblemInstance q = make_quadratic(Eigen::MatrixXd(vec({1.0, 3.0}).asDiagonal()), DenseVector::Zero(2),
                                           FeasibleSet::all_space(2));
  o.x0 = vec({1.0, 1.0});
  const AgmReport smooth = universal_agm(q, ProxSetup::euclidean(q.set), 0.05, 1.0, 50, o);
  CHECK_FALSE(smooth.exact_optimum);
  CHECK(smooth.iterations == 50);
}
