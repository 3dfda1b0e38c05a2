#ifndef QCMOD_LINALG_HPP
#define QCMOD_LINALG_HPP

// Small dense linear algebra on fixed-size vectors and square matrices.
//
// Singular values are exact closed forms for N = 2 and N = 3 (eigenvalues of
// A^T A, with the smallest one recovered from |det A| so that singular input
// gives an exact zero); larger N falls back to cyclic Jacobi on A^T A.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <initializer_list>
#include <numbers>
#include <ostream>
#include <string>

#include "qcmod/errors.hpp"

namespace qcmod {

template <std::size_t N>
struct Vector {
  static_assert(N >= 1);
  std::array<double, N> c{};

  Vector() = default;
  Vector(std::initializer_list<double> l) {
    std::size_t i = 0;
    for (double v : l) {
      if (i < N) c[i++] = v;
    }
  }

  static constexpr std::size_t size() { return N; }
  double& operator[](std::size_t i) { return c[i]; }
  double operator[](std::size_t i) const { return c[i]; }

  static Vector unit(std::size_t axis) {
    Vector v;
    v.c[axis] = 1.0;
    return v;
  }

  Vector& operator+=(const Vector& o) {
    for (std::size_t i = 0; i < N; ++i) c[i] += o.c[i];
    return *this;
  }
  Vector& operator-=(const Vector& o) {
    for (std::size_t i = 0; i < N; ++i) c[i] -= o.c[i];
    return *this;
  }
  Vector& operator*=(double s) {
    for (auto& x : c) x *= s;
    return *this;
  }
  Vector& operator/=(double s) {
    for (auto& x : c) x /= s;
    return *this;
  }

  friend Vector operator+(Vector a, const Vector& b) { return a += b; }
  friend Vector operator-(Vector a, const Vector& b) { return a -= b; }
  friend Vector operator-(Vector a) { return a *= -1.0; }
  friend Vector operator*(Vector a, double s) { return a *= s; }
  friend Vector operator*(double s, Vector a) { return a *= s; }
  friend Vector operator/(Vector a, double s) { return a /= s; }
  friend bool operator==(const Vector&, const Vector&) = default;
};

// Points and directions share the representation.
template <std::size_t N>
using Point = Vector<N>;

template <std::size_t N>
double dot(const Vector<N>& a, const Vector<N>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < N; ++i) s += a[i] * b[i];
  return s;
}

template <std::size_t N>
double norm(const Vector<N>& a) {
  if constexpr (N == 2) {
    return std::hypot(a[0], a[1]);
  } else if constexpr (N == 3) {
    return std::hypot(a[0], a[1], a[2]);
  } else {
    return std::sqrt(dot(a, a));
  }
}

template <std::size_t N>
double distance(const Vector<N>& a, const Vector<N>& b) {
  return norm(a - b);
}

template <std::size_t N>
bool is_finite(const Vector<N>& a) {
  return std::all_of(a.c.begin(), a.c.end(),
                     [](double v) { return std::isfinite(v); });
}

// Unit vector along (to - from). Throws InvalidInput for coincident points.
template <std::size_t N>
Vector<N> direction(const Vector<N>& from, const Vector<N>& to) {
  Vector<N> d = to - from;
  const double len = norm(d);
  if (!(len > 0.0) || !std::isfinite(len)) {
    throw InvalidInput("direction: coincident or non-finite points");
  }
  return d / len;
}

template <std::size_t N>
std::ostream& operator<<(std::ostream& os, const Vector<N>& v) {
  os << '(';
  for (std::size_t i = 0; i < N; ++i) os << (i ? ", " : "") << v[i];
  return os << ')';
}

// Row-major N x N matrix.
template <std::size_t N>
struct Matrix {
  std::array<double, N * N> a{};

  Matrix() = default;
  Matrix(std::initializer_list<double> l) {
    std::size_t i = 0;
    for (double v : l) {
      if (i < N * N) a[i++] = v;
    }
  }

  static constexpr std::size_t dim() { return N; }
  double& operator()(std::size_t i, std::size_t j) { return a[i * N + j]; }
  double operator()(std::size_t i, std::size_t j) const { return a[i * N + j]; }

  static Matrix identity() {
    Matrix m;
    for (std::size_t i = 0; i < N; ++i) m(i, i) = 1.0;
    return m;
  }

  static Matrix diagonal(const Vector<N>& d) {
    Matrix m;
    for (std::size_t i = 0; i < N; ++i) m(i, i) = d[i];
    return m;
  }

  Matrix transposed() const {
    Matrix t;
    for (std::size_t i = 0; i < N; ++i)
      for (std::size_t j = 0; j < N; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  Matrix& operator*=(double s) {
    for (auto& x : a) x *= s;
    return *this;
  }
  Matrix& operator+=(const Matrix& o) {
    for (std::size_t i = 0; i < N * N; ++i) a[i] += o.a[i];
    return *this;
  }
  Matrix& operator-=(const Matrix& o) {
    for (std::size_t i = 0; i < N * N; ++i) a[i] -= o.a[i];
    return *this;
  }

  friend Matrix operator*(Matrix m, double s) { return m *= s; }
  friend Matrix operator*(double s, Matrix m) { return m *= s; }
  friend Matrix operator+(Matrix m, const Matrix& o) { return m += o; }
  friend Matrix operator-(Matrix m, const Matrix& o) { return m -= o; }

  friend Vector<N> operator*(const Matrix& m, const Vector<N>& v) {
    Vector<N> r;
    for (std::size_t i = 0; i < N; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < N; ++j) s += m(i, j) * v[j];
      r[i] = s;
    }
    return r;
  }

  friend Matrix operator*(const Matrix& x, const Matrix& y) {
    Matrix r;
    for (std::size_t i = 0; i < N; ++i)
      for (std::size_t k = 0; k < N; ++k) {
        const double xik = x(i, k);
        for (std::size_t j = 0; j < N; ++j) r(i, j) += xik * y(k, j);
      }
    return r;
  }

  friend bool operator==(const Matrix&, const Matrix&) = default;
};

template <std::size_t N>
using JacobianMatrix = Matrix<N>;

template <std::size_t N>
Matrix<N> outer(const Vector<N>& u, const Vector<N>& v) {
  Matrix<N> m;
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = 0; j < N; ++j) m(i, j) = u[i] * v[j];
  return m;
}

template <std::size_t N>
bool is_finite(const Matrix<N>& m) {
  return std::all_of(m.a.begin(), m.a.end(),
                     [](double v) { return std::isfinite(v); });
}

template <std::size_t N>
std::ostream& operator<<(std::ostream& os, const Matrix<N>& m) {
  os << '[';
  for (std::size_t i = 0; i < N; ++i) {
    os << (i ? "; " : "");
    for (std::size_t j = 0; j < N; ++j) os << (j ? " " : "") << m(i, j);
  }
  return os << ']';
}

namespace detail {

template <std::size_t N>
void require_finite(const Matrix<N>& m, const char* who) {
  if (!is_finite(m)) throw InvalidInput(std::string(who) + ": non-finite entries");
}

// Eigenvalues of a symmetric 3x3 matrix, descending. Trigonometric method.
inline std::array<double, 3> symmetric_eigenvalues3(const Matrix<3>& s) {
  const double p1 = s(0, 1) * s(0, 1) + s(0, 2) * s(0, 2) + s(1, 2) * s(1, 2);
  const double q = (s(0, 0) + s(1, 1) + s(2, 2)) / 3.0;
  if (p1 == 0.0) {
    std::array<double, 3> d{s(0, 0), s(1, 1), s(2, 2)};
    std::sort(d.begin(), d.end(), std::greater<>());
    return d;
  }
  const double p2 = (s(0, 0) - q) * (s(0, 0) - q) + (s(1, 1) - q) * (s(1, 1) - q) +
                    (s(2, 2) - q) * (s(2, 2) - q) + 2.0 * p1;
  const double p = std::sqrt(p2 / 6.0);
  Matrix<3> b = s;
  for (std::size_t i = 0; i < 3; ++i) b(i, i) -= q;
  b *= 1.0 / p;
  const double det_b = b(0, 0) * (b(1, 1) * b(2, 2) - b(1, 2) * b(2, 1)) -
                       b(0, 1) * (b(1, 0) * b(2, 2) - b(1, 2) * b(2, 0)) +
                       b(0, 2) * (b(1, 0) * b(2, 1) - b(1, 1) * b(2, 0));
  const double r = std::clamp(det_b / 2.0, -1.0, 1.0);
  const double phi = std::acos(r) / 3.0;
  const double e1 = q + 2.0 * p * std::cos(phi);
  const double e3 = q + 2.0 * p * std::cos(phi + 2.0 * std::numbers::pi / 3.0);
  const double e2 = 3.0 * q - e1 - e3;
  std::array<double, 3> d{e1, e2, e3};
  std::sort(d.begin(), d.end(), std::greater<>());
  return d;
}

// Cyclic Jacobi eigenvalues of a symmetric matrix, descending.
template <std::size_t N>
std::array<double, N> jacobi_eigenvalues(Matrix<N> s, double tol = 1e-14) {
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0, diag = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      diag += s(i, i) * s(i, i);
      for (std::size_t j = i + 1; j < N; ++j) off += s(i, j) * s(i, j);
    }
    if (off <= tol * tol * std::max(diag, 1e-300)) break;
    for (std::size_t p = 0; p < N; ++p) {
      for (std::size_t q = p + 1; q < N; ++q) {
        if (s(p, q) == 0.0) continue;
        const double theta = (s(q, q) - s(p, p)) / (2.0 * s(p, q));
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double sn = t * c;
        for (std::size_t k = 0; k < N; ++k) {
          const double skp = s(k, p), skq = s(k, q);
          s(k, p) = c * skp - sn * skq;
          s(k, q) = sn * skp + c * skq;
        }
        for (std::size_t k = 0; k < N; ++k) {
          const double spk = s(p, k), sqk = s(q, k);
          s(p, k) = c * spk - sn * sqk;
          s(q, k) = sn * spk + c * sqk;
        }
      }
    }
  }
  std::array<double, N> d;
  for (std::size_t i = 0; i < N; ++i) d[i] = s(i, i);
  std::sort(d.begin(), d.end(), std::greater<>());
  return d;
}

// Determinant by LU with partial pivoting.
template <std::size_t N>
double lu_determinant(Matrix<N> m) {
  double det = 1.0;
  for (std::size_t k = 0; k < N; ++k) {
    std::size_t piv = k;
    for (std::size_t i = k + 1; i < N; ++i)
      if (std::abs(m(i, k)) > std::abs(m(piv, k))) piv = i;
    if (m(piv, k) == 0.0) return 0.0;
    if (piv != k) {
      for (std::size_t j = 0; j < N; ++j) std::swap(m(k, j), m(piv, j));
      det = -det;
    }
    det *= m(k, k);
    for (std::size_t i = k + 1; i < N; ++i) {
      const double f = m(i, k) / m(k, k);
      for (std::size_t j = k; j < N; ++j) m(i, j) -= f * m(k, j);
    }
  }
  return det;
}

}  // namespace detail

template <std::size_t N>
double determinant(const Matrix<N>& m) {
  detail::require_finite(m, "determinant");
  if constexpr (N == 1) {
    return m(0, 0);
  } else if constexpr (N == 2) {
    return m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
  } else if constexpr (N == 3) {
    return m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) -
           m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0)) +
           m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
  } else {
    return detail::lu_determinant(m);
  }
}

// Singular values in descending order.
template <std::size_t N>
Vector<N> singular_values(const Matrix<N>& m) {
  detail::require_finite(m, "singular_values");
  Vector<N> sv;
  if constexpr (N == 1) {
    sv[0] = std::abs(m(0, 0));
  } else if constexpr (N == 2) {
    // A = [a b; c d]: sigma = Q +- R with Q, R the conformal and
    // anticonformal parts.
    const double e = 0.5 * (m(0, 0) + m(1, 1));
    const double f = 0.5 * (m(0, 0) - m(1, 1));
    const double g = 0.5 * (m(1, 0) + m(0, 1));
    const double h = 0.5 * (m(1, 0) - m(0, 1));
    const double q = std::hypot(e, h);
    const double r = std::hypot(f, g);
    sv[0] = q + r;
    sv[1] = sv[0] > 0.0 ? std::abs(determinant(m)) / sv[0] : 0.0;
  } else if constexpr (N == 3) {
    const Matrix<3> ata = m.transposed() * m;
    const auto ev = detail::symmetric_eigenvalues3(ata);
    sv[0] = std::sqrt(std::max(ev[0], 0.0));
    sv[1] = std::sqrt(std::max(ev[1], 0.0));
    const double top = sv[0] * sv[1];
    sv[2] = top > 0.0 ? std::abs(determinant(m)) / top : 0.0;
    sv[2] = std::min(sv[2], sv[1]);
  } else {
    const auto ev = detail::jacobi_eigenvalues(m.transposed() * m);
    for (std::size_t i = 0; i < N; ++i) sv[i] = std::sqrt(std::max(ev[i], 0.0));
  }
  return sv;
}

// max_{|h|=1} |A h|
template <std::size_t N>
double op_norm(const Matrix<N>& m) {
  return singular_values(m)[0];
}

// min_{|h|=1} |A h|
template <std::size_t N>
double min_singular(const Matrix<N>& m) {
  return singular_values(m)[N - 1];
}

// |det A| below this is treated as singular. Relative to ||A||^N so that
// scaling a map does not change the classification.
template <std::size_t N>
double singular_tolerance(const Matrix<N>& m) {
  return 1e-12 * std::pow(op_norm(m), static_cast<double>(N));
}

template <std::size_t N>
bool is_singular(const Matrix<N>& m) {
  const double d = std::abs(determinant(m));
  return d == 0.0 || d <= singular_tolerance(m);
}

template <std::size_t N>
Matrix<N> invert(const Matrix<N>& m) {
  const double det = determinant(m);
  if (std::abs(det) == 0.0 || std::abs(det) <= singular_tolerance(m)) {
    throw SingularMatrix("invert: singular matrix", std::abs(det));
  }
  Matrix<N> inv;
  if constexpr (N == 1) {
    inv(0, 0) = 1.0 / det;
  } else if constexpr (N == 2) {
    inv(0, 0) = m(1, 1) / det;
    inv(0, 1) = -m(0, 1) / det;
    inv(1, 0) = -m(1, 0) / det;
    inv(1, 1) = m(0, 0) / det;
  } else if constexpr (N == 3) {
    inv(0, 0) = (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) / det;
    inv(0, 1) = (m(0, 2) * m(2, 1) - m(0, 1) * m(2, 2)) / det;
    inv(0, 2) = (m(0, 1) * m(1, 2) - m(0, 2) * m(1, 1)) / det;
    inv(1, 0) = (m(1, 2) * m(2, 0) - m(1, 0) * m(2, 2)) / det;
    inv(1, 1) = (m(0, 0) * m(2, 2) - m(0, 2) * m(2, 0)) / det;
    inv(1, 2) = (m(0, 2) * m(1, 0) - m(0, 0) * m(1, 2)) / det;
    inv(2, 0) = (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0)) / det;
    inv(2, 1) = (m(0, 1) * m(2, 0) - m(0, 0) * m(2, 1)) / det;
    inv(2, 2) = (m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0)) / det;
  } else {
    // Gauss-Jordan with partial pivoting.
    Matrix<N> w = m;
    inv = Matrix<N>::identity();
    for (std::size_t k = 0; k < N; ++k) {
      std::size_t piv = k;
      for (std::size_t i = k + 1; i < N; ++i)
        if (std::abs(w(i, k)) > std::abs(w(piv, k))) piv = i;
      for (std::size_t j = 0; j < N; ++j) {
        std::swap(w(k, j), w(piv, j));
        std::swap(inv(k, j), inv(piv, j));
      }
      const double d = w(k, k);
      for (std::size_t j = 0; j < N; ++j) {
        w(k, j) /= d;
        inv(k, j) /= d;
      }
      for (std::size_t i = 0; i < N; ++i) {
        if (i == k) continue;
        const double f = w(i, k);
        for (std::size_t j = 0; j < N; ++j) {
          w(i, j) -= f * w(k, j);
          inv(i, j) -= f * inv(k, j);
        }
      }
    }
  }
  return inv;
}

// A^T u without forming the transpose.
template <std::size_t N>
Vector<N> transpose_apply(const Matrix<N>& m, const Vector<N>& u) {
  Vector<N> r;
  for (std::size_t j = 0; j < N; ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < N; ++i) s += m(i, j) * u[i];
    r[j] = s;
  }
  return r;
}

// Solves A^T w = u by LU with partial pivoting on A^T.
template <std::size_t N>
Vector<N> solve_transpose(const Matrix<N>& m, const Vector<N>& u) {
  if (is_singular(m)) {
    throw SingularMatrix("solve_transpose: singular matrix", std::abs(determinant(m)));
  }
  Matrix<N> w = m.transposed();
  Vector<N> b = u;
  for (std::size_t k = 0; k < N; ++k) {
    std::size_t piv = k;
    for (std::size_t i = k + 1; i < N; ++i)
      if (std::abs(w(i, k)) > std::abs(w(piv, k))) piv = i;
    if (piv != k) {
      for (std::size_t j = 0; j < N; ++j) std::swap(w(k, j), w(piv, j));
      std::swap(b[k], b[piv]);
    }
    for (std::size_t i = k + 1; i < N; ++i) {
      const double f = w(i, k) / w(k, k);
      for (std::size_t j = k; j < N; ++j) w(i, j) -= f * w(k, j);
      b[i] -= f * b[k];
    }
  }
  Vector<N> x;
  for (std::size_t k = N; k-- > 0;) {
    double s = b[k];
    for (std::size_t j = k + 1; j < N; ++j) s -= w(k, j) * x[j];
    x[k] = s / w(k, k);
  }
  return x;
}

}  // namespace qcmod

#endif  // QCMOD_LINALG_HPP
