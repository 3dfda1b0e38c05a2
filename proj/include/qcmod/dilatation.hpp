#ifndef QCMOD_DILATATION_HPP
#define QCMOD_DILATATION_HPP

// Pointwise dilatations of a map f:
//
//   K_CT,p,y0(y, f) = sum_{x in f^-1(y)} sup_{|h|=1} |(f'(x) h, u)|^p / |J(x, f)|,
//                     u = (y - y0) / |y - y0|
//   K_I,p(y, f^-1)  = sum_{x in f^-1(y)} ||f'(x)||^p / |J(x, f)|
//   D_f(x, x0)      = |J(x, f)| / l_f(x, x0)^n,
//   l_f(x, x0)      = min_{|h|=1} |f'(x) h| / |(h, (x - x0)/|x - x0|)|
//
// and, in the plane, the Beltrami coefficient mu = f_zbar / f_z.
//
// Two closed forms carry the hot path. By Cauchy-Schwarz the supremum in
// K_CT equals |A^T u| (attained at h = A^T u / |A^T u|), and substituting
// g = A h turns the minimum in l_f into 1 / |A^{-T} u|. Both are checked
// against direct sweeps in the tests.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>

#include "qcmod/errors.hpp"
#include "qcmod/linalg.hpp"
#include "qcmod/maps.hpp"

namespace qcmod {

template <std::size_t N>
struct DilatationSample {
  Point<N> y;
  Point<N> y0;
  double p = 2.0;
  double value = 0.0;  // +inf when some preimage has J = 0
  std::size_t preimage_count = 0;
};

namespace detail {

inline void require_order(double p) {
  if (!(p > 1.0) || !std::isfinite(p)) throw InvalidInput("dilatation order p must satisfy p > 1");
}

template <std::size_t N>
Vector<N> radial_unit(const Point<N>& y, const Point<N>& y0) {
  if (!is_finite(y) || !is_finite(y0)) throw InvalidInput("non-finite point");
  const Vector<N> d = y - y0;
  const double r = norm(d);
  if (r == 0.0) throw InvalidInput("point coincides with the base point");
  return d / r;
}

}  // namespace detail

// sup_{|h|=1} |(A h, u)| for a unit vector u.
template <std::size_t N>
double cotangent_factor(const Matrix<N>& a, const Vector<N>& u) {
  if (!is_finite(a)) throw InvalidInput("cotangent_factor: non-finite matrix");
  if (!is_finite(u) || std::abs(norm(u) - 1.0) > 1e-9) {
    throw InvalidInput("cotangent_factor: direction must be a unit vector");
  }
  return norm(transpose_apply(a, u));
}

template <std::size_t N>
DilatationSample<N> k_ct_point(const SmoothMap<N>& f, const Point<N>& y, const Point<N>& y0,
                               double p) {
  detail::require_order(p);
  const Vector<N> u = detail::radial_unit(y, y0);
  const auto fiber = f.preimages(y);
  if (fiber.points.empty()) throw UndefinedValue("K_CT: empty fiber (y outside f(D))");
  DilatationSample<N> s{y, y0, p, 0.0, fiber.points.size()};
  for (const auto& x : fiber.points) {
    Matrix<N> a;
    try {
      a = f.jacobian(x);
    } catch (const NumericError&) {
      s.value = std::numeric_limits<double>::infinity();
      continue;
    }
    const double j = std::abs(determinant(a));
    if (j == 0.0 || j <= singular_tolerance(a)) {
      s.value = std::numeric_limits<double>::infinity();
      continue;
    }
    s.value += std::pow(cotangent_factor(a, u), p) / j;
  }
  return s;
}

template <std::size_t N>
double k_i_point(const SmoothMap<N>& f, const Point<N>& y, double p) {
  detail::require_order(p);
  if (!is_finite(y)) throw InvalidInput("K_I: non-finite point");
  const auto fiber = f.preimages(y);
  if (fiber.points.empty()) throw UndefinedValue("K_I: empty fiber (y outside f(D))");
  double sum = 0.0;
  for (const auto& x : fiber.points) {
    Matrix<N> a;
    try {
      a = f.jacobian(x);
    } catch (const NumericError&) {
      return std::numeric_limits<double>::infinity();
    }
    const double j = std::abs(determinant(a));
    if (j == 0.0 || j <= singular_tolerance(a)) return std::numeric_limits<double>::infinity();
    sum += std::pow(op_norm(a), p) / j;
  }
  return sum;
}

// min_{|h|=1} |A h| / |(h, u)|, u = (x - x0)/|x - x0|.
template <std::size_t N>
double l_f(const Matrix<N>& a, const Point<N>& x, const Point<N>& x0) {
  const Vector<N> u = detail::radial_unit(x, x0);
  return 1.0 / norm(solve_transpose(a, u));
}

template <std::size_t N>
double d_f_point(const SmoothMap<N>& f, const Point<N>& x, const Point<N>& x0) {
  const Matrix<N> a = f.jacobian(x);
  const double l = l_f(a, x, x0);
  return std::abs(determinant(a)) / std::pow(l, static_cast<double>(N));
}

// mu = f_zbar / f_z from the real 2x2 Jacobian [[u_x, u_y], [v_x, v_y]].
inline std::complex<double> beltrami_mu(const Matrix<2>& a) {
  const std::complex<double> fz(0.5 * (a(0, 0) + a(1, 1)), 0.5 * (a(1, 0) - a(0, 1)));
  const std::complex<double> fzbar(0.5 * (a(0, 0) - a(1, 1)), 0.5 * (a(1, 0) + a(0, 1)));
  double scale = 0.0;
  for (double v : a.a) scale = std::max(scale, std::abs(v));
  if (std::abs(fz) <= 1e-14 * scale || std::abs(fz) == 0.0) return {0.0, 0.0};
  return fzbar / fz;
}

// |1 - conj(x - x0)/(x - x0) mu|^2 / (1 - |mu|^2)
inline double d_f_from_mu(std::complex<double> mu, const Point<2>& x, const Point<2>& x0) {
  const double m2 = std::norm(mu);
  if (!(m2 < 1.0)) throw DegenerateMap("D_f: |mu| >= 1");
  const std::complex<double> d(x[0] - x0[0], x[1] - x0[1]);
  if (std::abs(d) == 0.0) throw InvalidInput("D_f: x coincides with x0");
  const std::complex<double> w = std::conj(d) / d;
  return std::norm(1.0 - w * mu) / (1.0 - m2);
}

struct IdentityResidual {
  double k_ct_inverse = 0.0;  // K_CT,n,x0(f(x), f^-1)
  double d_f = 0.0;           // D_f(x, x0)
  double residual = 0.0;
};

// Compares K_CT of the inverse map at f(x), with (f^-1)'(f(x)) taken as
// invert(f'(x)), against the tangential dilatation of f at x.
template <std::size_t N>
IdentityResidual identity_residual(const SmoothMap<N>& f, const Point<N>& x, const Point<N>& x0) {
  const Matrix<N> a = f.jacobian(x);
  const Matrix<N> b = invert(a);
  const Vector<N> u = detail::radial_unit(x, x0);
  IdentityResidual r;
  r.k_ct_inverse = std::pow(cotangent_factor(b, u), static_cast<double>(N)) /
                   std::abs(determinant(b));
  r.d_f = d_f_point(f, x, x0);
  r.residual = std::abs(r.k_ct_inverse - r.d_f);
  return r;
}

}  // namespace qcmod

#endif  // QCMOD_DILATATION_HPP
