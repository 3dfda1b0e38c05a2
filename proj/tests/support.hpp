#ifndef QCMOD_TESTS_SUPPORT_HPP
#define QCMOD_TESTS_SUPPORT_HPP

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "qcmod/qcmod.hpp"

namespace qcmod::testing {

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

template <std::size_t N>
Matrix<N> random_matrix(std::mt19937_64& rng, double scale = 1.0) {
  Matrix<N> m;
  for (auto& v : m.a) v = uniform(rng, -scale, scale);
  return m;
}

// Random matrix with condition number bounded away from degeneracy.
template <std::size_t N>
Matrix<N> random_nondegenerate(std::mt19937_64& rng, double max_condition = 50.0) {
  for (;;) {
    const auto m = random_matrix<N>(rng, 2.0);
    const auto s = singular_values(m);
    if (s[N - 1] > 0.05 && s[0] / s[N - 1] < max_condition) return m;
  }
}

template <std::size_t N>
Point<N> random_in_annulus(std::mt19937_64& rng, const Point<N>& c, double r1, double r2) {
  for (;;) {
    Point<N> x;
    for (std::size_t i = 0; i < N; ++i) x[i] = uniform(rng, -r2, r2);
    const double r = norm(x);
    if (r > r1 && r < r2) return c + x;
  }
}

template <std::size_t N>
Vector<N> random_unit(std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  for (;;) {
    Vector<N> v;
    for (std::size_t i = 0; i < N; ++i) v[i] = g(rng);
    const double r = norm(v);
    if (r > 1e-3) return v / r;
  }
}

// Unit vectors for brute-force extremum sweeps: a fine circle in the plane,
// a latitude-longitude net on the sphere.
template <std::size_t N>
std::vector<Vector<N>> sweep_directions(std::size_t steps) {
  std::vector<Vector<N>> out;
  if constexpr (N == 2) {
    for (std::size_t i = 0; i < steps; ++i) {
      const double t = std::numbers::pi * static_cast<double>(i) / static_cast<double>(steps);
      out.push_back(Vector<2>{std::cos(t), std::sin(t)});
    }
  } else {
    static_assert(N == 3);
    for (std::size_t i = 0; i <= steps; ++i) {
      const double th = std::numbers::pi * static_cast<double>(i) / static_cast<double>(steps);
      for (std::size_t j = 0; j < 2 * steps; ++j) {
        const double ph = std::numbers::pi * static_cast<double>(j) / static_cast<double>(steps);
        out.push_back(Vector<3>{std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph), std::cos(th)});
      }
    }
  }
  return out;
}

inline MapSpec spec(const char* name, double radius, double alpha = 1.0, int k = 1) {
  MapSpec s;
  s.name = name;
  s.domain_radius = radius;
  s.alpha = alpha;
  s.k = k;
  return s;
}

template <std::size_t N>
MapSpec linear_spec(const Matrix<N>& a, double radius) {
  MapSpec s;
  s.name = "linear";
  s.matrix.assign(a.a.begin(), a.a.end());
  s.domain_radius = radius;
  return s;
}

}  // namespace qcmod::testing

#endif  // QCMOD_TESTS_SUPPORT_HPP
