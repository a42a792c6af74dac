#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "lowmem/geometry.hpp"

namespace lowmem {

// One first-order oracle answer at a point.
struct OracleResponse {
  double value = 0.0;
  DenseVector subgradient;
  // Inexactness: f(z) >= value + <subgradient, z - x> - delta for all z.
  double delta = 0.0;
  // Index of the max piece that produced the answer (0-based), if any.
  std::optional<std::size_t> active_index;
};

using Oracle = std::function<OracleResponse(const DenseVector&)>;

// g(x) = max_i g_i(x). Ties go to the lowest index.
class ConstraintBundle {
 public:
  ConstraintBundle() = default;
  explicit ConstraintBundle(std::vector<Oracle> pieces);

  std::size_t size() const { return pieces_.size(); }
  const Oracle& piece(std::size_t i) const { return pieces_.at(i); }
  OracleResponse evaluate(const DenseVector& x) const;

 private:
  std::vector<Oracle> pieces_;
};

OracleResponse aggregate_max(const ConstraintBundle& bundle, const DenseVector& x);

// Affine piece <a, x> - b.
Oracle affine_oracle(DenseVector a, double b);
// f(x) = |<a, x> - b|, sign(0) taken as 0.
Oracle abs_affine_oracle(DenseVector a, double b);

// Wraps an exact oracle into a delta-inexact one: the value is shifted by at
// most delta/2 and the subgradient is taken at a point within delta/(4M) of
// x, which keeps the delta-subgradient inequality valid for an M-Lipschitz f.
// The perturbation is a pure function of (x, seed).
Oracle make_inexact(Oracle exact, double delta, double lipschitz, std::uint64_t seed);

}  // namespace lowmem
