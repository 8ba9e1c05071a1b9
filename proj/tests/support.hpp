#pragma once

// Shared generators and independent oracles for the test binaries. Nothing
// here calls into the library's decision procedures.

#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "hkq/rep_core.hpp"

namespace hkq::testing {

using Rng = std::mt19937_64;

inline int uniform_int(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }
inline double uniform_real(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

inline Rational random_rational(Rng& rng, int num = 5, int den = 4) {
  return Rational(uniform_int(rng, -num, num), uniform_int(rng, 1, den));
}

/// n <= max_n, k <= max_k, entries in [-3, 3], small rational theta.
inline WeightSystem random_weights(Rng& rng, std::size_t max_n = 6, std::size_t max_k = 3) {
  const auto k = static_cast<std::size_t>(uniform_int(rng, 1, static_cast<int>(max_k)));
  const auto n = static_cast<std::size_t>(uniform_int(rng, 1, static_cast<int>(max_n)));
  std::vector<Weight> ws(n, Weight(k));
  for (auto& w : ws) {
    for (auto& e : w) e = uniform_int(rng, -3, 3);
  }
  std::vector<Rational> theta(k);
  for (auto& t : theta) t = random_rational(rng);
  return WeightSystem(k, ws, theta);
}

inline ExactComplex random_exact_complex(Rng& rng) {
  ExactComplex c;
  do {
    c = ExactComplex{random_rational(rng, 6, 5), random_rational(rng, 6, 5)};
  } while (c.is_zero());
  return c;
}

/// Random exact point whose support is each coordinate with probability 1/2.
inline ExactAmbientPoint random_exact_point(Rng& rng, std::size_t n, double keep = 0.5) {
  ExactAmbientPoint p{std::vector<ExactComplex>(n)};
  for (auto& c : p.coords) {
    if (uniform_real(rng, 0, 1) < keep) c = random_exact_complex(rng);
  }
  return p;
}

inline Complex random_complex(Rng& rng, double lo = 0.3, double hi = 2.0) {
  return std::polar(uniform_real(rng, lo, hi), uniform_real(rng, 0, 2 * std::numbers::pi));
}

inline std::vector<Rational> to_rationals(const std::vector<long long>& v) {
  std::vector<Rational> out;
  for (auto e : v) out.emplace_back(e);
  return out;
}

// ------------------------------------------------------------------ oracles

/// Minimum of <theta, xi> over integral xi in [-B, B]^k with beta^i(xi) >= 0
/// on the support, xi != 0. Empty when no such xi exists.
struct BoxMinimum {
  Rational value;
  std::vector<Rational> xi;
};

inline std::optional<BoxMinimum> box_minimum(const WeightSystem& w, const IndexSet& support, int bound) {
  const std::size_t k = w.rank();
  std::vector<long long> xi(k, -bound);
  std::optional<BoxMinimum> best;
  for (;;) {
    bool zero = true;
    for (auto e : xi) zero = zero && e == 0;
    if (!zero) {
      bool ok = true;
      for (auto i : support) {
        long long p = 0;
        for (std::size_t a = 0; a < k; ++a) p += w.weight(i)[a] * xi[a];
        if (p < 0) {
          ok = false;
          break;
        }
      }
      if (ok) {
        Rational v = 0;
        for (std::size_t a = 0; a < k; ++a) v += w.theta()[a] * xi[a];
        if (!best || v < best->value) best = BoxMinimum{v, to_rationals(xi)};
      }
    }
    std::size_t a = 0;
    while (a < k && xi[a] == bound) xi[a++] = -bound;
    if (a == k) break;
    ++xi[a];
  }
  return best;
}

/// Brute-force J-flow value <xi x(t), y(t)> with
/// x(t) = cosh(t l) x - I sinh(t l) y, y(t) = I sinh(t l) x + cosh(t l) y per coordinate.
inline double j_flow_value(const std::vector<double>& lambda, const CotangentPoint& p, double t) {
  const Complex i(0, 1);
  double total = 0;
  for (std::size_t j = 0; j < p.size(); ++j) {
    const double l = lambda[j];
    const Complex x = p.x[j], y = std::conj(p.z[j]);
    const Complex xt = std::cosh(t * l) * x - i * std::sinh(t * l) * y;
    const Complex yt = i * std::sinh(t * l) * x + std::cosh(t * l) * y;
    const Complex ixt = l * i * xt;
    total += ixt.real() * yt.real() + ixt.imag() * yt.imag();
  }
  return total;
}

/// Fubini-Study Hermitian form at x on the sphere |x| = 1 for the diagonal
/// circle: h(u, v) = <u, v> - <u, x><x, v>, <a, b> = sum conj(a_i) b_i.
inline Complex fubini_study(const std::vector<Complex>& x, const std::vector<Complex>& u, const std::vector<Complex>& v) {
  auto herm = [](const std::vector<Complex>& a, const std::vector<Complex>& b) {
    Complex s = 0;
    for (std::size_t j = 0; j < a.size(); ++j) s += std::conj(a[j]) * b[j];
    return s;
  };
  const double r2 = herm(x, x).real();
  return herm(u, v) - herm(u, x) * herm(x, v) / r2;
}

/// Real model vector (u | 0) of a tangent vector u of V.
inline Eigen::VectorXd embed_base_tangent(const std::vector<Complex>& u) {
  const auto n = static_cast<Eigen::Index>(u.size());
  Eigen::VectorXd out = Eigen::VectorXd::Zero(4 * n);
  for (Eigen::Index j = 0; j < n; ++j) {
    out[2 * j] = u[static_cast<std::size_t>(j)].real();
    out[2 * j + 1] = u[static_cast<std::size_t>(j)].imag();
  }
  return out;
}

/// Generic point of {M = 0}: x random, x_i z_i a random complex kernel vector of the weight matrix.
inline CotangentPoint random_hol_zero_point(const WeightSystem& w, Rng& rng) {
  const Eigen::MatrixXd b = w.weight_matrix();
  const Eigen::MatrixXd kernel = Eigen::FullPivLU<Eigen::MatrixXd>(b).kernel();
  const auto n = w.size();
  CotangentPoint p{std::vector<Complex>(n), std::vector<Complex>(n)};
  std::vector<Complex> c(n);
  std::normal_distribution<double> gauss;
  if (kernel.cols() > 0 && kernel.norm() > 0) {
    for (Eigen::Index col = 0; col < kernel.cols(); ++col) {
      const Complex coeff(gauss(rng), gauss(rng));
      for (std::size_t j = 0; j < n; ++j) c[j] += coeff * kernel(static_cast<Eigen::Index>(j), col);
    }
  }
  for (std::size_t j = 0; j < n; ++j) {
    p.x[j] = random_complex(rng);
    p.z[j] = c[j] / p.x[j];
  }
  return p;
}

}  // namespace hkq::testing
