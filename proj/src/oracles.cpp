#include "lowmem/oracles.hpp"

#include <cmath>
#include <cstring>
#include <random>
#include <stdexcept>

namespace lowmem {

ConstraintBundle::ConstraintBundle(std::vector<Oracle> pieces) : pieces_(std::move(pieces)) {
  if (pieces_.empty()) throw std::invalid_argument("constraint bundle needs at least one piece");
}

OracleResponse ConstraintBundle::evaluate(const DenseVector& x) const {
  if (pieces_.empty()) throw std::invalid_argument("aggregate_max on an empty bundle");
  OracleResponse best = pieces_[0](x);
  std::size_t best_i = 0;
  for (std::size_t i = 1; i < pieces_.size(); ++i) {
    OracleResponse r = pieces_[i](x);
    if (r.value > best.value) {
      best = std::move(r);
      best_i = i;
    }
  }
  if (best.subgradient.size() != x.size())
    throw std::invalid_argument("constraint piece returned a subgradient of the wrong size");
  best.active_index = best_i;
  return best;
}

OracleResponse aggregate_max(const ConstraintBundle& bundle, const DenseVector& x) {
  return bundle.evaluate(x);
}

Oracle affine_oracle(DenseVector a, double b) {
  return [a = std::move(a), b](const DenseVector& x) {
    check_same_dim(a, x, "affine oracle");
    return OracleResponse{a.dot(x) - b, a, 0.0, std::nullopt};
  };
}

Oracle abs_affine_oracle(DenseVector a, double b) {
  return [a = std::move(a), b](const DenseVector& x) {
    check_same_dim(a, x, "abs-affine oracle");
    const double r = a.dot(x) - b;
    const double s = r > 0.0 ? 1.0 : (r < 0.0 ? -1.0 : 0.0);
    return OracleResponse{std::abs(r), s * a, 0.0, std::nullopt};
  };
}

namespace {

std::uint64_t hash_point(const DenseVector& x, std::uint64_t seed) {
  // FNV-1a over the raw bytes.
  std::uint64_t h = 1469598103934665603ULL ^ seed;
  for (Index i = 0; i < x.size(); ++i) {
    std::uint64_t bits = 0;
    const double v = x[i];
    std::memcpy(&bits, &v, sizeof(bits));
    for (int k = 0; k < 8; ++k) {
      h ^= (bits >> (8 * k)) & 0xffU;
      h *= 1099511628211ULL;
    }
  }
  return h;
}

}  // namespace

Oracle make_inexact(Oracle exact, double delta, double lipschitz, std::uint64_t seed) {
  if (!(delta >= 0.0) || !(lipschitz > 0.0))
    throw std::invalid_argument("make_inexact: need delta >= 0 and lipschitz > 0");
  return [exact = std::move(exact), delta, lipschitz, seed](const DenseVector& x) {
    std::mt19937_64 rng(hash_point(x, seed));
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    DenseVector dir(x.size());
    for (Index i = 0; i < x.size(); ++i) dir[i] = unit(rng);
    const double nrm = dir.norm();
    const double radius = delta / (4.0 * lipschitz);
    DenseVector shifted = x;
    if (nrm > 0.0) shifted += (radius / nrm) * dir;
    OracleResponse at_x = exact(x);
    OracleResponse at_shift = exact(shifted);
    OracleResponse out;
    out.value = at_x.value + 0.5 * delta * unit(rng);
    out.subgradient = std::move(at_shift.subgradient);
    out.delta = delta;
    out.active_index = at_shift.active_index;
    return out;
  };
}

}  // namespace lowmem
