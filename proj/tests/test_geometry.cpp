#include <cmath>
#include <functional>
#include <limits>
#include <random>

#include "doctest.h"
#include "lowmem/geometry.hpp"

using namespace lowmem;

namespace {

DenseVector vec(std::initializer_list<double> v) {
  DenseVector out(static_cast<Index>(v.size()));
  Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

DenseVector random_simplex_point(Index n, double scale, std::mt19937_64& rng) {
  std::exponential_distribution<double> e(1.0);
  DenseVector x(n);
  for (Index i = 0; i < n; ++i) x[i] = e(rng) + 1e-6;
  return scale * x / x.sum();
}

DenseVector random_box_point(const DenseVector& lo, const DenseVector& hi, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  DenseVector x(lo.size());
  for (Index i = 0; i < lo.size(); ++i) x[i] = lo[i] + u(rng) * (hi[i] - lo[i]);
  return x;
}

// Independent entropy reference: s^2 * KL(y/s || x/s).
double kl_scaled(const DenseVector& x, const DenseVector& y, double s) {
  double acc = 0.0;
  for (Index i = 0; i < x.size(); ++i)
    if (y[i] > 0.0) acc += (y[i] / s) * std::log(y[i] / x[i]);
  return s * s * acc;
}

struct Sample {
  ProxSetup setup;
  std::function<DenseVector(std::mt19937_64&)> draw;
};

std::vector<Sample> sample_setups() {
  std::vector<Sample> out;
  const DenseVector lo = vec({-1.0, 0.0, 2.0});
  const DenseVector hi = vec({1.0, 3.0, 2.5});
  out.push_back({ProxSetup::euclidean(FeasibleSet::box(lo, hi)),
                 [lo, hi](std::mt19937_64& r) { return random_box_point(lo, hi, r); }});
  out.push_back({ProxSetup::entropy(FeasibleSet::simplex(5)),
                 [](std::mt19937_64& r) { return random_simplex_point(5, 1.0, r); }});
  out.push_back({ProxSetup::entropy(FeasibleSet::simplex(4, 3.0)),
                 [](std::mt19937_64& r) { return random_simplex_point(4, 3.0, r); }});
  out.push_back({ProxSetup::entropy(FeasibleSet::l1_ball(3, 2.0)),
                 [](std::mt19937_64& r) { return random_simplex_point(6, 2.0, r); }});
  out.push_back({ProxSetup::euclidean(FeasibleSet::ball(vec({1.0, -1.0}), 2.0)), [](std::mt19937_64& r) {
                   std::normal_distribution<double> g;
                   DenseVector d = vec({g(r), g(r)});
                   std::uniform_real_distribution<double> u(0.0, 1.0);
                   return DenseVector(vec({1.0, -1.0}) + 2.0 * std::sqrt(u(r)) * d / d.norm());
                 }});
  return out;
}

}  // namespace

TEST_CASE("dual norms") {
  const auto l2 = ProxSetup::euclidean(FeasibleSet::all_space(2));
  const auto l1 = ProxSetup::entropy(FeasibleSet::simplex(2));
  CHECK(dual_norm(l2, vec({3.0, 4.0})) == doctest::Approx(5.0));
  CHECK(dual_norm(l1, vec({1.0, -2.0})) == 2.0);
  CHECK(dual_norm(l1, DenseVector::Zero(2)) == 0.0);
  CHECK(dual_norm(l2, DenseVector::Zero(2)) == 0.0);
  CHECK_THROWS_AS(dual_norm(l2, DenseVector::Zero(3)), std::invalid_argument);
}

TEST_CASE("bregman divergence examples") {
  const auto eu = ProxSetup::euclidean(FeasibleSet::all_space(2));
  CHECK(bregman_divergence(eu, vec({0.0, 0.0}), vec({3.0, 4.0})) == doctest::Approx(12.5));
  const auto ent = ProxSetup::entropy(FeasibleSet::simplex(2));
  const DenseVector half = vec({0.5, 0.5});
  CHECK(bregman_divergence(ent, half, vec({1.0, 0.0})) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  // d(y) - d(x) - <grad d(x), y - x> evaluated with y pulled off the boundary
  const DenseVector yc = vec({1.0 - 1e-12, 1e-12});
  const double direct = ent.d(yc) - ent.d(half) - ent.grad_d(half).dot(yc - half);
  CHECK(direct == doctest::Approx(std::log(2.0)).epsilon(1e-9));
  CHECK(bregman_divergence(ent, half, half) == 0.0);
  CHECK(bregman_divergence(eu, vec({1.0, 2.0}), vec({1.0, 2.0})) == 0.0);
  CHECK_THROWS_AS(bregman_divergence(ent, vec({1.0, 0.0}), half), DomainError);
}

TEST_CASE("mirror step examples") {
  const auto eu = ProxSetup::euclidean(FeasibleSet::all_space(2));
  const DenseVector a = mirror_step(eu, vec({1.0, 2.0}), vec({0.5, -1.0}));
  CHECK(a[0] == doctest::Approx(0.5));
  CHECK(a[1] == doctest::Approx(3.0));

  const auto ent = ProxSetup::entropy(FeasibleSet::simplex(2));
  const DenseVector b = mirror_step(ent, vec({0.5, 0.5}), vec({std::log(2.0), 0.0}));
  CHECK(b[0] == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  CHECK(b[1] == doctest::Approx(2.0 / 3.0).epsilon(1e-14));

  const auto ball = ProxSetup::euclidean(FeasibleSet::ball(DenseVector::Zero(2), 1.0));
  const DenseVector c = mirror_step(ball, vec({0.0, 0.0}), vec({-2.0, 0.0}));
  CHECK(c[0] == doctest::Approx(1.0));
  CHECK(c[1] == doctest::Approx(0.0));
}

TEST_CASE("entropy step matches a brute-force minimization on the 2-simplex") {
  const auto ent = ProxSetup::entropy(FeasibleSet::simplex(2));
  const DenseVector x = vec({0.3, 0.7});
  const DenseVector p = vec({0.4, -0.9});
  const DenseVector s = ent.mirror_step(x, p);
  double best_t = 0.0;
  double best = std::numeric_limits<double>::infinity();
  for (int i = 1; i < 200000; ++i) {
    const double t = i / 200000.0;
    const DenseVector z = vec({t, 1.0 - t});
    const double v = p.dot(z) + ent.bregman(x, z);
    if (v < best) {
      best = v;
      best_t = t;
    }
  }
  CHECK(s[0] == doctest::Approx(best_t).epsilon(1e-4));
}

TEST_CASE("prox centers") {
  const DenseVector c4 = prox_center(ProxSetup::entropy(FeasibleSet::simplex(4)));
  for (Index i = 0; i < 4; ++i) CHECK(c4[i] == doctest::Approx(0.25));
  CHECK(prox_center(ProxSetup::euclidean(FeasibleSet::ball(DenseVector::Zero(3), 1.0))).isZero());
  const DenseVector cb = prox_center(ProxSetup::euclidean(FeasibleSet::box(2, 1.0, 2.0)));
  CHECK(cb[0] == 1.0);
  CHECK(cb[1] == 1.0);
}

TEST_CASE("entropy constant: theta0_sq on the unit simplex is ln n") {
  const auto ent = ProxSetup::entropy(FeasibleSet::simplex(7));
  REQUIRE(ent.max_d());
  CHECK(*ent.max_d() == doctest::Approx(std::log(7.0)));
  CHECK(ent.d(ent.prox_center()) == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("property: strong convexity, non-negativity and duality pairing") {
  std::mt19937_64 rng(11);
  for (const Sample& s : sample_setups()) {
    for (int t = 0; t < 1000; ++t) {
      const DenseVector x = s.draw(rng);
      const DenseVector y = s.draw(rng);
      const double v = s.setup.bregman(x, y);
      const double nrm = s.setup.norm(y - x);
      CHECK(v >= 0.5 * nrm * nrm - 1e-9);
      CHECK(v >= 0.0);
      CHECK(s.setup.bregman(x, x) <= 1e-9);
      const DenseVector p = y - 0.5 * x;
      CHECK(std::abs(p.dot(x)) <= s.setup.dual_norm(p) * s.setup.norm(x) + 1e-12);
    }
  }
}

TEST_CASE("property: entropy divergence agrees with the scaled KL reference") {
  std::mt19937_64 rng(5);
  const auto ent = ProxSetup::entropy(FeasibleSet::simplex(6, 2.5));
  for (int t = 0; t < 200; ++t) {
    const DenseVector x = random_simplex_point(6, 2.5, rng);
    const DenseVector y = random_simplex_point(6, 2.5, rng);
    CHECK(ent.bregman(x, y) == doctest::Approx(kl_scaled(x, y, 2.5)).epsilon(1e-10));
  }
}

TEST_CASE("property: mirror step outputs are feasible and satisfy the variational inequality") {
  std::mt19937_64 rng(13);
  std::normal_distribution<double> g(0.0, 1.0);
  for (const Sample& s : sample_setups()) {
    for (int t = 0; t < 50; ++t) {
      const DenseVector x = s.draw(rng);
      DenseVector p(x.size());
      for (Index i = 0; i < p.size(); ++i) p[i] = 2.0 * g(rng);
      const DenseVector xp = s.setup.mirror_step(x, p);
      CHECK(s.setup.contains(xp, kFeasibilityTol));
      const DenseVector lhs_dir = p + s.setup.grad_d(xp) - s.setup.grad_d(x);
      for (int j = 0; j < 100; ++j) {
        const DenseVector z = s.draw(rng);
        CHECK(lhs_dir.dot(z - xp) >= -kOptimalityTol);
      }
    }
  }
}

TEST_CASE("property: entropy steps keep positive entries that sum to the scale") {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> g(0.0, 5.0);
  const auto ent = ProxSetup::entropy(FeasibleSet::simplex(8));
  DenseVector x = ent.prox_center();
  for (int t = 0; t < 500; ++t) {
    DenseVector p(8);
    for (Index i = 0; i < 8; ++i) p[i] = g(rng);
    x = ent.mirror_step(x, p);
    CHECK((x.array() > 0.0).all());
    CHECK(std::abs(x.sum() - 1.0) <= kNormalizationTol);
  }
}

TEST_CASE("product setups add divergences and combine dual norms") {
  const auto prod = ProxSetup::product(ProxSetup::entropy(FeasibleSet::simplex(2)),
                                       ProxSetup::euclidean(FeasibleSet::box(1, -1.0, 1.0)));
  CHECK(prod.dim() == 3);
  const DenseVector x = vec({0.5, 0.5, 0.0});
  const DenseVector y = vec({0.25, 0.75, 1.0});
  const double expect = kl_scaled(x.head(2), y.head(2), 1.0) + 0.5;
  CHECK(prod.bregman(x, y) == doctest::Approx(expect));
  CHECK(prod.dual_norm(vec({1.0, -2.0, 2.0})) == doctest::Approx(std::sqrt(8.0)));
}

TEST_CASE("l1 ball decoding and vertices") {
  const auto set = FeasibleSet::l1_ball(2, 3.0);
  CHECK(set.dim() == 4);
  const DenseVector u = decode_l1(vec({1.0, 0.5, 0.0, 1.5}));
  CHECK(u[0] == 1.0);
  CHECK(u[1] == -1.0);
  CHECK(set.vertices().size() == 4);
  CHECK(FeasibleSet::box(3, 0.0, 1.0).vertices().size() == 8);
  CHECK_THROWS_AS(FeasibleSet::box(17, 0.0, 1.0).vertices(), std::invalid_argument);
}
