#ifndef QCMOD_MAPS_HPP
#define QCMOD_MAPS_HPP

// Differentiable maps f: D -> R^N with Jacobians and fiber enumeration, plus
// a small gallery of closed-form maps used throughout the tests:
//
//   identity        f(x) = x
//   linear          f(x) = A x
//   radial(alpha)   f(x) = |x|^(alpha-1) x
//   winding(k)      f(z) = z^k            (N = 2, complex notation)

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qcmod/domain.hpp"
#include "qcmod/errors.hpp"
#include "qcmod/linalg.hpp"

namespace qcmod {

enum class JacobianMode { analytic, finite_difference };
enum class PreimageMode { analytic, newton, none };

template <std::size_t N>
struct PreimageSet {
  std::vector<Point<N>> points;
  // Newton seeds that did not converge inside the domain.
  std::size_t failed_seeds = 0;
  // False when the set came from the best-effort Newton search.
  bool exact = true;
};

// When f maps the ring A(center, inner, outer) in D onto the image ring
// A(y0, r1, r2) sphere-to-sphere, the pulled-back family Gamma_f is itself a
// ring family and its modulus has a closed form.
template <std::size_t N>
struct RingPreimage {
  Point<N> center;
  double inner;
  double outer;
};

template <std::size_t N>
class SmoothMap {
 public:
  using Evaluator = std::function<Point<N>(const Point<N>&)>;
  using JacobianFn = std::function<Matrix<N>(const Point<N>&)>;
  using PreimageFn = std::function<std::vector<Point<N>>(const Point<N>&)>;
  using RingFn = std::function<std::optional<RingPreimage<N>>(const Point<N>&, double, double)>;

  SmoothMap(std::string name, DomainDescriptor<N> domain, Evaluator f)
      : name_(std::move(name)), domain_(std::move(domain)), f_(std::move(f)) {}

  SmoothMap& with_jacobian(JacobianFn j) {
    jac_ = std::move(j);
    jacobian_mode_ = JacobianMode::analytic;
    return *this;
  }
  SmoothMap& with_preimages(PreimageFn p) {
    pre_ = std::move(p);
    preimage_mode_ = PreimageMode::analytic;
    return *this;
  }
  SmoothMap& with_newton_preimages() {
    preimage_mode_ = PreimageMode::newton;
    return *this;
  }
  SmoothMap& with_branch_locus(std::vector<Point<N>> pts) {
    branch_locus_ = std::move(pts);
    return *this;
  }
  SmoothMap& with_ring_preimage(RingFn r) {
    ring_ = std::move(r);
    return *this;
  }
  SmoothMap& with_homeomorphism(bool h) {
    homeomorphism_ = h;
    return *this;
  }

  // Copy that differentiates numerically even if an analytic Jacobian exists.
  SmoothMap finite_difference_copy() const {
    SmoothMap m = *this;
    m.jacobian_mode_ = JacobianMode::finite_difference;
    return m;
  }

  // Copy whose fibers come from the Newton search instead of closed forms.
  SmoothMap newton_copy() const {
    SmoothMap m = *this;
    m.preimage_mode_ = PreimageMode::newton;
    return m;
  }

  const std::string& name() const { return name_; }
  const DomainDescriptor<N>& domain() const { return domain_; }
  JacobianMode jacobian_mode() const { return jacobian_mode_; }
  PreimageMode preimage_mode() const { return preimage_mode_; }
  const std::vector<Point<N>>& branch_locus() const { return branch_locus_; }
  bool is_homeomorphism() const { return homeomorphism_; }

  Point<N> eval(const Point<N>& x) const {
    if (!domain_.contains(x)) throw DomainError("eval: point outside domain of " + name_);
    return f_(x);
  }

  // Evaluation without the domain check; used by stencils and lifts.
  Point<N> raw(const Point<N>& x) const { return f_(x); }

  Matrix<N> jacobian(const Point<N>& x) const {
    if (jacobian_mode_ == JacobianMode::analytic && jac_) return jac_(x);
    return finite_difference_jacobian(x);
  }

  Matrix<N> finite_difference_jacobian(const Point<N>& x) const {
    const double h = 1e-6 * std::max(1.0, norm(x));
    Matrix<N> j;
    for (std::size_t k = 0; k < N; ++k) {
      Point<N> xp = x, xm = x;
      xp[k] += h;
      xm[k] -= h;
      const Point<N> fp = f_(xp), fm = f_(xm);
      if (!is_finite(fp) || !is_finite(fm)) {
        throw NumericError("jacobian: non-finite value inside the difference stencil of " + name_);
      }
      for (std::size_t i = 0; i < N; ++i) j(i, k) = (fp[i] - fm[i]) / (2.0 * h);
    }
    return j;
  }

  PreimageSet<N> preimages(const Point<N>& y) const {
    PreimageSet<N> out;
    if (preimage_mode_ == PreimageMode::analytic && pre_) {
      for (const auto& x : pre_(y)) {
        if (domain_.contains(x)) out.points.push_back(x);
      }
      return out;
    }
    if (preimage_mode_ == PreimageMode::none) {
      throw ConfigError("preimages: map " + name_ + " has no preimage enumerator");
    }
    return newton_preimages(y);
  }

  double distance_to_branch_locus(const Point<N>& x) const {
    double d = std::numeric_limits<double>::infinity();
    for (const auto& b : branch_locus_) d = std::min(d, distance(x, b));
    return d;
  }

  std::optional<RingPreimage<N>> ring_preimage(const Point<N>& y0, double r1, double r2) const {
    if (!ring_) return std::nullopt;
    return ring_(y0, r1, r2);
  }

 private:
  // Newton iteration from a 32^N seed grid over the domain's bounding box.
  PreimageSet<N> newton_preimages(const Point<N>& y) const {
    constexpr int kSeedsPerAxis = 32;
    constexpr int kMaxIterations = 60;
    constexpr double kDedup = 1e-7;
    PreimageSet<N> out;
    out.exact = false;
    const auto [lo, hi] = domain_.bounding_box();
    const double tol = 1e-12 * std::max(1.0, norm(y));

    std::size_t total = 1;
    for (std::size_t i = 0; i < N; ++i) total *= kSeedsPerAxis;
    for (std::size_t s = 0; s < total; ++s) {
      Point<N> x;
      std::size_t rem = s;
      for (std::size_t i = 0; i < N; ++i) {
        const int idx = static_cast<int>(rem % kSeedsPerAxis);
        rem /= kSeedsPerAxis;
        x[i] = lo[i] + (idx + 0.5) * (hi[i] - lo[i]) / kSeedsPerAxis;
      }
      if (!domain_.contains(x)) continue;
      bool converged = false;
      for (int it = 0; it < kMaxIterations; ++it) {
        const Point<N> r = f_(x) - y;
        if (!is_finite(r)) break;
        if (norm(r) <= tol) {
          converged = true;
          break;
        }
        Matrix<N> j;
        try {
          j = jacobian(x);
          x = x - invert(j) * r;
        } catch (const Error&) {
          break;
        }
        if (!domain_.contains(x)) break;
      }
      if (!converged || !domain_.contains(x)) {
        ++out.failed_seeds;
        continue;
      }
      const bool dup = std::any_of(out.points.begin(), out.points.end(),
                                   [&](const Point<N>& q) { return distance(q, x) < kDedup; });
      if (!dup) out.points.push_back(x);
    }
    return out;
  }

  std::string name_;
  DomainDescriptor<N> domain_;
  Evaluator f_;
  JacobianFn jac_;
  PreimageFn pre_;
  RingFn ring_;
  JacobianMode jacobian_mode_ = JacobianMode::finite_difference;
  PreimageMode preimage_mode_ = PreimageMode::none;
  std::vector<Point<N>> branch_locus_;
  bool homeomorphism_ = false;
};

// Gallery parameters. `matrix` is row-major N x N (linear only).
struct MapSpec {
  std::string name = "identity";
  double alpha = 1.0;
  int k = 1;
  std::vector<double> matrix;
  double domain_radius = 1.0;
};

namespace detail {

template <std::size_t N>
bool is_origin(const Point<N>& p) {
  return norm(p) == 0.0;
}

template <std::size_t N>
SmoothMap<N> make_identity(const DomainDescriptor<N>& dom) {
  SmoothMap<N> m("identity", dom, [](const Point<N>& x) { return x; });
  m.with_jacobian([](const Point<N>&) { return Matrix<N>::identity(); })
      .with_preimages([](const Point<N>& y) { return std::vector<Point<N>>{y}; })
      .with_homeomorphism(true)
      .with_ring_preimage([](const Point<N>& y0, double r1, double r2) {
        return std::optional<RingPreimage<N>>(RingPreimage<N>{y0, r1, r2});
      });
  return m;
}

template <std::size_t N>
SmoothMap<N> make_linear(const DomainDescriptor<N>& dom, const Matrix<N>& a) {
  if (!is_finite(a)) throw ConfigError("linear: non-finite matrix");
  if (is_singular(a)) throw ConfigError("linear: matrix must be nondegenerate");
  const Matrix<N> inv = invert(a);
  SmoothMap<N> m("linear", dom, [a](const Point<N>& x) { return a * x; });
  m.with_jacobian([a](const Point<N>&) { return a; })
      .with_preimages([inv](const Point<N>& y) { return std::vector<Point<N>>{inv * y}; })
      .with_homeomorphism(true);
  return m;
}

template <std::size_t N>
SmoothMap<N> make_radial(const DomainDescriptor<N>& dom, double alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw ConfigError("radial: exponent must be > 0");
  auto f = [alpha](const Point<N>& x) {
    const double r = norm(x);
    if (r == 0.0) return Point<N>{};
    return std::pow(r, alpha - 1.0) * x;
  };
  auto jac = [alpha](const Point<N>& x) {
    const double r = norm(x);
    if (r == 0.0) {
      if (alpha > 1.0) return Matrix<N>{};
      if (alpha == 1.0) return Matrix<N>::identity();
      throw NumericError("radial: Jacobian unbounded at the origin for alpha < 1");
    }
    const Point<N> e = x / r;
    return std::pow(r, alpha - 1.0) * (Matrix<N>::identity() + (alpha - 1.0) * outer(e, e));
  };
  auto pre = [alpha](const Point<N>& y) {
    const double r = norm(y);
    if (r == 0.0) return std::vector<Point<N>>{Point<N>{}};
    return std::vector<Point<N>>{std::pow(r, 1.0 / alpha - 1.0) * y};
  };
  SmoothMap<N> m("radial", dom, f);
  m.with_jacobian(jac).with_preimages(pre).with_homeomorphism(true);
  if (alpha != 1.0) m.with_branch_locus({Point<N>{}});
  m.with_ring_preimage([alpha](const Point<N>& y0, double r1, double r2) {
    if (!is_origin(y0)) return std::optional<RingPreimage<N>>{};
    return std::optional<RingPreimage<N>>(
        RingPreimage<N>{Point<N>{}, std::pow(r1, 1.0 / alpha), std::pow(r2, 1.0 / alpha)});
  });
  return m;
}

inline SmoothMap<2> make_winding(const DomainDescriptor<2>& dom, int k) {
  if (k < 1) throw ConfigError("winding: k must be >= 1");
  using cd = std::complex<double>;
  auto f = [k](const Point<2>& x) {
    cd z(x[0], x[1]), w(1.0, 0.0);
    for (int i = 0; i < k; ++i) w *= z;
    return Point<2>{w.real(), w.imag()};
  };
  auto jac = [k](const Point<2>& x) {
    cd z(x[0], x[1]), d(static_cast<double>(k), 0.0);
    for (int i = 0; i < k - 1; ++i) d *= z;
    // Multiplication by a + ib.
    return Matrix<2>{d.real(), -d.imag(), d.imag(), d.real()};
  };
  auto pre = [k](const Point<2>& y) {
    const double r = std::hypot(y[0], y[1]);
    if (r == 0.0) return std::vector<Point<2>>{Point<2>{}};
    const double rho = std::pow(r, 1.0 / k);
    const double theta = std::atan2(y[1], y[0]);
    std::vector<Point<2>> out;
    out.reserve(static_cast<std::size_t>(k));
    for (int j = 0; j < k; ++j) {
      const double t = (theta + 2.0 * std::numbers::pi * j) / k;
      out.push_back(Point<2>{rho * std::cos(t), rho * std::sin(t)});
    }
    return out;
  };
  SmoothMap<2> m("winding", dom, f);
  m.with_jacobian(jac).with_preimages(pre).with_homeomorphism(k == 1);
  if (k > 1) m.with_branch_locus({Point<2>{}});
  m.with_ring_preimage([k](const Point<2>& y0, double r1, double r2) {
    if (!is_origin(y0)) return std::optional<RingPreimage<2>>{};
    return std::optional<RingPreimage<2>>(
        RingPreimage<2>{Point<2>{}, std::pow(r1, 1.0 / k), std::pow(r2, 1.0 / k)});
  });
  return m;
}

}  // namespace detail

// Builds a gallery map on the ball B(0, spec.domain_radius).
template <std::size_t N>
SmoothMap<N> gallery(const MapSpec& spec) {
  const auto dom = DomainDescriptor<N>::ball(Point<N>{}, spec.domain_radius);
  if (spec.name == "identity") return detail::make_identity<N>(dom);
  if (spec.name == "radial") return detail::make_radial<N>(dom, spec.alpha);
  if (spec.name == "linear") {
    if (spec.matrix.size() != N * N) {
      throw ConfigError("linear: matrix needs " + std::to_string(N * N) + " entries");
    }
    Matrix<N> a;
    std::copy(spec.matrix.begin(), spec.matrix.end(), a.a.begin());
    return detail::make_linear<N>(dom, a);
  }
  if (spec.name == "winding") {
    if constexpr (N == 2) {
      return detail::make_winding(dom, spec.k);
    } else {
      throw ConfigError("winding: only defined for dimension 2");
    }
  }
  throw ConfigError("unknown gallery map '" + spec.name + "'");
}

// Gallery spec of f^{-1} for the homeomorphic entries, on a ball that covers
// f(B(0, R)).
template <std::size_t N>
std::optional<MapSpec> gallery_inverse(const MapSpec& spec) {
  MapSpec inv = spec;
  if (spec.name == "identity") return inv;
  if (spec.name == "radial") {
    inv.alpha = 1.0 / spec.alpha;
    inv.domain_radius = std::pow(spec.domain_radius, spec.alpha);
    return inv;
  }
  if (spec.name == "linear" && spec.matrix.size() == N * N) {
    Matrix<N> a;
    std::copy(spec.matrix.begin(), spec.matrix.end(), a.a.begin());
    const Matrix<N> ai = invert(a);
    inv.matrix.assign(ai.a.begin(), ai.a.end());
    inv.domain_radius = op_norm(a) * spec.domain_radius;
    return inv;
  }
  if (spec.name == "winding" && spec.k == 1) return inv;
  return std::nullopt;
}

}  // namespace qcmod

#endif  // QCMOD_MAPS_HPP
