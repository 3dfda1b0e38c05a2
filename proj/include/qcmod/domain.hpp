#ifndef QCMOD_DOMAIN_HPP
#define QCMOD_DOMAIN_HPP

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "qcmod/errors.hpp"
#include "qcmod/linalg.hpp"

namespace qcmod {

enum class DomainKind { ball, annulus, box };

inline const char* to_string(DomainKind k) {
  switch (k) {
    case DomainKind::ball: return "ball";
    case DomainKind::annulus: return "annulus";
    case DomainKind::box: return "box";
  }
  return "?";
}

// Bounded region: ball B(c, R), annulus r1 < |x - c| < r2, or an axis box.
template <std::size_t N>
class DomainDescriptor {
 public:
  static DomainDescriptor ball(const Point<N>& center, double radius) {
    if (!(radius > 0.0) || !std::isfinite(radius)) {
      throw ConfigError("ball: radius must be positive");
    }
    DomainDescriptor d;
    d.kind_ = DomainKind::ball;
    d.center_ = center;
    d.outer_ = radius;
    return d;
  }

  static DomainDescriptor annulus(const Point<N>& center, double r_inner, double r_outer) {
    if (!(r_inner > 0.0) || !(r_outer > r_inner) || !std::isfinite(r_outer)) {
      throw ConfigError("annulus: need 0 < r_inner < r_outer");
    }
    DomainDescriptor d;
    d.kind_ = DomainKind::annulus;
    d.center_ = center;
    d.inner_ = r_inner;
    d.outer_ = r_outer;
    return d;
  }

  static DomainDescriptor box(const Point<N>& lower, const Point<N>& upper) {
    for (std::size_t i = 0; i < N; ++i) {
      if (!(upper[i] > lower[i])) throw ConfigError("box: need lower < upper on every axis");
    }
    DomainDescriptor d;
    d.kind_ = DomainKind::box;
    d.lower_ = lower;
    d.upper_ = upper;
    d.center_ = 0.5 * (lower + upper);
    return d;
  }

  DomainKind kind() const { return kind_; }
  const Point<N>& center() const { return center_; }
  double inner_radius() const { return inner_; }
  double outer_radius() const { return outer_; }

  // Closed membership, with a relative slack of 1e-12 on the bounds.
  bool contains(const Point<N>& x) const { return test(x, slack()); }

  // Strict (open-set) membership.
  bool interior(const Point<N>& x) const { return test(x, -0.0); }

  std::pair<Point<N>, Point<N>> bounding_box() const {
    if (kind_ == DomainKind::box) return {lower_, upper_};
    Point<N> lo = center_, hi = center_;
    for (std::size_t i = 0; i < N; ++i) {
      lo[i] -= outer_;
      hi[i] += outer_;
    }
    return {lo, hi};
  }

  double diameter() const {
    if (kind_ == DomainKind::box) {
      auto [lo, hi] = bounding_box();
      return norm(hi - lo);
    }
    return 2.0 * outer_;
  }

 private:
  DomainDescriptor() = default;

  double slack() const { return 1e-12 * std::max(1.0, diameter()); }

  bool test(const Point<N>& x, double eps) const {
    switch (kind_) {
      case DomainKind::ball: {
        const double r = distance(x, center_);
        return eps > 0.0 ? r <= outer_ + eps : r < outer_;
      }
      case DomainKind::annulus: {
        const double r = distance(x, center_);
        return eps > 0.0 ? (r >= inner_ - eps && r <= outer_ + eps)
                         : (r > inner_ && r < outer_);
      }
      case DomainKind::box:
        for (std::size_t i = 0; i < N; ++i) {
          if (eps > 0.0) {
            if (x[i] < lower_[i] - eps || x[i] > upper_[i] + eps) return false;
          } else if (!(x[i] > lower_[i] && x[i] < upper_[i])) {
            return false;
          }
        }
        return true;
    }
    return false;
  }

  DomainKind kind_ = DomainKind::ball;
  Point<N> center_{};
  Point<N> lower_{};
  Point<N> upper_{};
  double inner_ = 0.0;
  double outer_ = 1.0;
};

}  // namespace qcmod

#endif  // QCMOD_DOMAIN_HPP
