#include "lowmem/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace lowmem {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

double block_norm(NormTag tag, const Eigen::Ref<const DenseVector>& x) {
  return tag == NormTag::kL1 ? x.lpNorm<1>() : x.norm();
}

double block_dual_norm(NormTag tag, const Eigen::Ref<const DenseVector>& p) {
  if (p.size() == 0) return 0.0;
  return tag == NormTag::kL1 ? p.lpNorm<Eigen::Infinity>() : p.norm();
}

DenseVector euclid_center(const ProxBlock& b) {
  if (b.center.size() == 0) return DenseVector::Zero(b.set.dim());
  return b.center;
}

// Largest squared distance from `from` to a point of the set.
double max_sq_distance(const FeasibleSet& set, const DenseVector& from) {
  return std::visit(
      Overloaded{
          [&](const Box& box) {
            double s = 0.0;
            for (Index i = 0; i < from.size(); ++i) {
              const double a = box.lower[i] - from[i];
              const double b = box.upper[i] - from[i];
              s += std::max(a * a, b * b);
            }
            return s;
          },
          [&](const EuclideanBall& ball) {
            const double r = (ball.center - from).norm() + ball.radius;
            return r * r;
          },
          [](const auto&) { return std::numeric_limits<double>::infinity(); }},
      set.variant());
}

}  // namespace

void check_same_dim(const DenseVector& a, const DenseVector& b, const char* what) {
  if (a.size() != b.size()) {
    std::ostringstream os;
    os << what << ": dimension mismatch (" << a.size() << " vs " << b.size() << ")";
    throw std::invalid_argument(os.str());
  }
}

// ---------------------------------------------------------------- FeasibleSet

FeasibleSet::FeasibleSet(Variant v) : v_(std::move(v)) {
  std::visit(Overloaded{[](const Box& b) {
                          if (b.lower.size() != b.upper.size())
                            throw std::invalid_argument("box: bound sizes differ");
                          if ((b.lower.array() > b.upper.array()).any())
                            throw std::invalid_argument("box: lower > upper");
                        },
                        [](const EuclideanBall& b) {
                          if (!(b.radius >= 0.0))
                            throw std::invalid_argument("ball: negative radius");
                        },
                        [](const Simplex& s) {
                          if (s.dim < 1 || !(s.scale > 0.0))
                            throw std::invalid_argument("simplex: need dim >= 1, scale > 0");
                        },
                        [](const L1Ball& s) {
                          if (s.ball_dim < 1 || !(s.radius > 0.0))
                            throw std::invalid_argument("l1 ball: need dim >= 1, radius > 0");
                        },
                        [](const AllSpace&) {}},
             v_);
}

FeasibleSet FeasibleSet::all_space(Index dim) { return FeasibleSet(AllSpace{dim}); }
FeasibleSet FeasibleSet::box(DenseVector lower, DenseVector upper) {
  return FeasibleSet(Box{std::move(lower), std::move(upper)});
}
FeasibleSet FeasibleSet::box(Index dim, double lower, double upper) {
  return box(DenseVector::Constant(dim, lower), DenseVector::Constant(dim, upper));
}
FeasibleSet FeasibleSet::ball(DenseVector center, double radius) {
  return FeasibleSet(EuclideanBall{std::move(center), radius});
}
FeasibleSet FeasibleSet::simplex(Index dim, double scale) {
  return FeasibleSet(Simplex{dim, scale});
}
FeasibleSet FeasibleSet::l1_ball(Index ball_dim, double radius) {
  return FeasibleSet(L1Ball{ball_dim, radius});
}

Index FeasibleSet::dim() const {
  return std::visit(Overloaded{[](const AllSpace& s) { return s.dim; },
                               [](const Box& s) { return s.lower.size(); },
                               [](const EuclideanBall& s) { return s.center.size(); },
                               [](const Simplex& s) { return s.dim; },
                               [](const L1Ball& s) { return 2 * s.ball_dim; }},
                    v_);
}

bool FeasibleSet::bounded() const { return !std::holds_alternative<AllSpace>(v_); }

bool FeasibleSet::is_simplex_like() const {
  return std::holds_alternative<Simplex>(v_) || std::holds_alternative<L1Ball>(v_);
}

double FeasibleSet::simplex_scale() const {
  if (const auto* s = std::get_if<Simplex>(&v_)) return s->scale;
  if (const auto* s = std::get_if<L1Ball>(&v_)) return s->radius;
  throw std::logic_error("simplex_scale on a non-simplex set");
}

bool FeasibleSet::contains(const DenseVector& x, double tol) const {
  if (x.size() != dim()) return false;
  if (!x.allFinite()) return false;
  return std::visit(
      Overloaded{[](const AllSpace&) { return true; },
                 [&](const Box& b) {
                   return ((x.array() >= b.lower.array() - tol) &&
                           (x.array() <= b.upper.array() + tol))
                       .all();
                 },
                 [&](const EuclideanBall& b) { return (x - b.center).norm() <= b.radius + tol; },
                 [&](const auto&) {
                   const double s = simplex_scale();
                   return (x.array() >= -tol).all() && std::abs(x.sum() - s) <= tol * std::max(1.0, s);
                 }},
      v_);
}

DenseVector FeasibleSet::project(const DenseVector& x) const {
  return std::visit(
      Overloaded{[&](const AllSpace&) -> DenseVector { return x; },
                 [&](const Box& b) -> DenseVector { return x.cwiseMax(b.lower).cwiseMin(b.upper); },
                 [&](const EuclideanBall& b) -> DenseVector {
                   const DenseVector diff = x - b.center;
                   const double r = diff.norm();
                   if (r <= b.radius) return x;
                   return b.center + (b.radius / r) * diff;
                 },
                 [&](const auto&) -> DenseVector {
                   throw std::logic_error("Euclidean projection onto a simplex is not provided");
                 }},
      v_);
}

std::vector<DenseVector> FeasibleSet::vertices() const {
  std::vector<DenseVector> out;
  std::visit(Overloaded{[&](const Box& b) {
                          const Index n = b.lower.size();
                          if (n > 16) throw std::invalid_argument("box vertex enumeration limited to n <= 16");
                          for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
                            DenseVector v(n);
                            for (Index i = 0; i < n; ++i)
                              v[i] = (mask >> i) & 1U ? b.upper[i] : b.lower[i];
                            out.push_back(std::move(v));
                          }
                        },
                        [&](const auto& s) {
                          if constexpr (std::is_same_v<std::decay_t<decltype(s)>, Simplex> ||
                                        std::is_same_v<std::decay_t<decltype(s)>, L1Ball>) {
                            const Index n = dim();
                            for (Index i = 0; i < n; ++i) {
                              DenseVector v = DenseVector::Zero(n);
                              v[i] = simplex_scale();
                              out.push_back(std::move(v));
                            }
                          } else {
                            throw std::invalid_argument("vertices: set has no finite vertex set");
                          }
                        }},
             v_);
  return out;
}

std::string FeasibleSet::describe() const {
  std::ostringstream os;
  std::visit(Overloaded{[&](const AllSpace& s) { os << "all-space(" << s.dim << ")"; },
                        [&](const Box& s) { os << "box(" << s.lower.size() << ")"; },
                        [&](const EuclideanBall& s) {
                          os << "ball(" << s.center.size() << ", r=" << s.radius << ")";
                        },
                        [&](const Simplex& s) { os << "simplex(" << s.dim << ", s=" << s.scale << ")"; },
                        [&](const L1Ball& s) { os << "l1-ball(" << s.ball_dim << ", r=" << s.radius << ")"; }},
             v_);
  return os.str();
}

DenseVector decode_l1(const DenseVector& w) {
  if (w.size() % 2 != 0) throw std::invalid_argument("decode_l1: odd length");
  const Index n = w.size() / 2;
  return w.head(n) - w.tail(n);
}

// ------------------------------------------------------------------ ProxSetup

ProxSetup::ProxSetup(std::vector<ProxBlock> blocks, std::optional<double> theta0_sq)
    : blocks_(std::move(blocks)) {
  if (blocks_.empty()) throw std::invalid_argument("prox setup needs at least one block");
  for (auto& b : blocks_) {
    if (b.kind == ProxKind::kEntropy && !b.set.is_simplex_like())
      throw std::invalid_argument("entropy prox requires a simplex or l1-ball set");
    if (b.kind == ProxKind::kEuclidean) {
      if (b.set.is_simplex_like())
        throw std::invalid_argument("Euclidean prox on a simplex is not supported");
      if (b.center.size() == 0) b.center = DenseVector::Zero(b.set.dim());
      if (b.center.size() != b.set.dim())
        throw std::invalid_argument("prox center dimension differs from the set");
    }
    offsets_.push_back(dim_);
    dim_ += b.set.dim();
  }
  theta0_sq_ = theta0_sq ? theta0_sq : max_d();
}

ProxSetup ProxSetup::euclidean(FeasibleSet set, DenseVector center, std::optional<double> theta0_sq) {
  return ProxSetup({ProxBlock{std::move(set), ProxKind::kEuclidean, std::move(center)}}, theta0_sq);
}

ProxSetup ProxSetup::entropy(FeasibleSet set, std::optional<double> theta0_sq) {
  return ProxSetup({ProxBlock{std::move(set), ProxKind::kEntropy, {}}}, theta0_sq);
}

ProxSetup ProxSetup::product(const ProxSetup& first, const ProxSetup& second) {
  std::vector<ProxBlock> blocks = first.blocks_;
  blocks.insert(blocks.end(), second.blocks_.begin(), second.blocks_.end());
  return ProxSetup(std::move(blocks));
}

NormTag ProxSetup::norm_tag() const {
  return blocks_.size() == 1 ? blocks_.front().norm_tag() : NormTag::kL2;
}

bool ProxSetup::is_euclidean() const {
  return std::all_of(blocks_.begin(), blocks_.end(),
                     [](const ProxBlock& b) { return b.kind == ProxKind::kEuclidean; });
}

DenseVector ProxSetup::block_slice(const DenseVector& x, std::size_t b) const {
  return x.segment(offsets_[b], blocks_[b].set.dim());
}

double ProxSetup::norm(const DenseVector& x) const {
  if (x.size() != dim_) throw std::invalid_argument("norm: dimension mismatch");
  if (blocks_.size() == 1) return block_norm(blocks_[0].norm_tag(), x);
  double s = 0.0;
  for (std::size_t b = 0; b < blocks_.size(); ++b) {
    const double nb = block_norm(blocks_[b].norm_tag(), x.segment(offsets_[b], blocks_[b].set.dim()));
    s += nb * nb;
  }
  return std::sqrt(s);
}

double ProxSetup::dual_norm(const DenseVector& p) const {
  if (p.size() != dim_) throw std::invalid_argument("dual_norm: dimension mismatch");
  if (blocks_.size() == 1) return block_dual_norm(blocks_[0].norm_tag(), p);
  double s = 0.0;
  for (std::size_t b = 0; b < blocks_.size(); ++b) {
    const double nb =
        block_dual_norm(blocks_[b].norm_tag(), p.segment(offsets_[b], blocks_[b].set.dim()));
    s += nb * nb;
  }
  return std::sqrt(s);
}

bool ProxSetup::contains(const DenseVector& x, double tol) const {
  if (x.size() != dim_) return false;
  for (std::size_t b = 0; b < blocks_.size(); ++b)
    if (!blocks_[b].set.contains(block_slice(x, b), tol)) return false;
  return true;
}

double ProxSetup::d(const DenseVector& x) const {
  if (x.size() != dim_) throw std::invalid_argument("d: dimension mismatch");
  double total = 0.0;
  for (std::size_t b = 0; b < blocks_.size(); ++b) {
    const ProxBlock& blk = blocks_[b];
    const auto xb = x.segment(offsets_[b], blk.set.dim());
    if (blk.kind == ProxKind::kEuclidean) {
      total += 0.5 * (xb - blk.center).squaredNorm();
    } else {
      const double s = blk.set.simplex_scale();
      const Index n = xb.size();
      double acc = std::log(static_cast<double>(n));
      for (Index i = 0; i < n; ++i) {
        const double y = std::max(xb[i], kEntropyFloor) / s;
        acc += y * std::log(y);
      }
      total += s * s * acc;
    }
  }
  return total;
}

DenseVector ProxSetup::grad_d(const DenseVector& x) const {
  if (x.size() != dim_) throw std::invalid_argument("grad_d: dimension mismatch");
  DenseVector g(dim_);
  for (std::size_t b = 0; b < blocks_.size(); ++b) {
    const ProxBlock& blk = blocks_[b];
    const Index off = offsets_[b];
    const Index n = blk.set.dim();
    if (blk.kind == ProxKind::kEuclidean) {
      g.segment(off, n) = x.segment(off, n) - blk.center;
    } else {
      const double s = blk.set.simplex_scale();
      for (Index i = 0; i < n; ++i) {
        const double xi = x[off + i];
        if (!(xi > 0.0)) throw DomainError("entropy gradient undefined at a boundary point");
        g[off + i] = s * (std::log(xi / s) + 1.0);
      }
    }
  }
  return g;
}

double ProxSetup::bregman(const DenseVector& x, const DenseVector& y) const {
  check_same_dim(x, y, "bregman");
  if (x.size() != dim_) throw std::invalid_argument("bregman: dimension mismatch");
  double total = 0.0;
  for (std::size_t b = 0; b < blocks_.size(); ++b) {
    const ProxBlock& blk = blocks_[b];
    const Index off = offsets_[b];
    const Index n = blk.set.dim();
    if (blk.kind == ProxKind::kEuclidean) {
      total += 0.5 * (y.segment(off, n) - x.segment(off, n)).squaredNorm();
    } else {
      // s^2 * sum [y' ln(y'/x') - y' + x'] with primes scaled by 1/s.
      const double s = blk.set.simplex_scale();
      double acc = 0.0;
      for (Index i = 0; i < n; ++i) {
        const double xi = x[off + i];
        if (!(xi > 0.0)) throw DomainError("Bregman divergence base point on the simplex boundary");
        const double xs = xi / s;
        const double ys = std::max(y[off + i], kEntropyFloor) / s;
        acc += ys * std::log(ys / xs) - ys + xs;
      }
      total += s * s * acc;
    }
  }
  return std::max(total, 0.0);
}

DenseVector ProxSetup::mirror_step(const DenseVector& x, const DenseVector& p) const {
  check_same_dim(x, p, "mirror_step");
  if (x.size() != dim_) throw std::invalid_argument("mirror_step: dimension mismatch");
  DenseVector out(dim_);
  for (std::size_t b = 0; b < blocks_.size(); ++b) {
    const ProxBlock& blk = blocks_[b];
    const Index off = offsets_[b];
    const Index n = blk.set.dim();
    if (blk.kind == ProxKind::kEuclidean) {
      out.segment(off, n) = blk.set.project(x.segment(off, n) - p.segment(off, n));
      continue;
    }
    // Multiplicative update z_i ~ x_i exp(-p_i / s), done in the log domain.
    const double s = blk.set.simplex_scale();
    DenseVector logw(n);
    for (Index i = 0; i < n; ++i) {
      const double xi = x[off + i];
      if (!(xi > 0.0)) throw DomainError("entropy mirror step from a boundary point");
      logw[i] = std::log(xi) - p[off + i] / s;
    }
    const double shift = logw.maxCoeff();
    DenseVector w = (logw.array() - shift).exp().matrix();
    w = w.cwiseMax(kEntropyFloor);
    out.segment(off, n) = (s / w.sum()) * w;
  }
  return out;
}

DenseVector ProxSetup::prox_center() const {
  DenseVector out(dim_);
  for (std::size_t b = 0; b < blocks_.size(); ++b) {
    const ProxBlock& blk = blocks_[b];
    const Index n = blk.set.dim();
    if (blk.kind == ProxKind::kEuclidean) {
      out.segment(offsets_[b], n) = blk.set.project(euclid_center(blk));
    } else {
      out.segment(offsets_[b], n).setConstant(blk.set.simplex_scale() / static_cast<double>(n));
    }
  }
  return out;
}

std::optional<double> ProxSetup::max_d() const {
  double total = 0.0;
  for (const ProxBlock& blk : blocks_) {
    if (!blk.set.bounded()) return std::nullopt;
    if (blk.kind == ProxKind::kEuclidean) {
      total += 0.5 * max_sq_distance(blk.set, blk.center);
    } else {
      const double s = blk.set.simplex_scale();
      total += s * s * std::log(static_cast<double>(blk.set.dim()));
    }
  }
  return total;
}

std::optional<double> ProxSetup::max_bregman_from_center() const {
  double total = 0.0;
  for (const ProxBlock& blk : blocks_) {
    if (!blk.set.bounded()) return std::nullopt;
    if (blk.kind == ProxKind::kEuclidean) {
      total += 0.5 * max_sq_distance(blk.set, blk.set.project(blk.center));
    } else {
      const double s = blk.set.simplex_scale();
      total += s * s * std::log(static_cast<double>(blk.set.dim()));
    }
  }
  return total;
}

double dual_norm(const ProxSetup& setup, const DenseVector& p) { return setup.dual_norm(p); }
double bregman_divergence(const ProxSetup& setup, const DenseVector& x, const DenseVector& y) {
  return setup.bregman(x, y);
}
DenseVector mirror_step(const ProxSetup& setup, const DenseVector& x, const DenseVector& p) {
  return setup.mirror_step(x, p);
}
DenseVector prox_center(const ProxSetup& setup) { return setup.prox_center(); }

}  // namespace lowmem
