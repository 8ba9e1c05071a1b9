#pragma once

// Data model: torus weight systems, cocharacters, points of V = C^n and of
// X = T*V, the flat quaternionic structure on the real model of X, and the
// torus action.

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "hkq/errors.hpp"
#include "hkq/rational.hpp"

namespace hkq {

using Complex = std::complex<double>;
using Weight = std::vector<std::int64_t>;
using IndexSet = std::vector<std::size_t>;  // sorted, duplicate-free

/// Coordinates with modulus below this count as zero in numeric mode.
inline constexpr double kDefaultSupportThreshold = 1e-12;

/// Integer weights beta^1..beta^n of a rank-k torus acting diagonally on C^n,
/// together with the rational character theta shifting the moment map.
class WeightSystem {
 public:
  WeightSystem(std::size_t rank, std::vector<Weight> weights, std::vector<Rational> theta);

  std::size_t rank() const { return rank_; }
  std::size_t size() const { return weights_.size(); }
  const Weight& weight(std::size_t i) const { return weights_.at(i); }
  const std::vector<Weight>& weights() const { return weights_; }
  const std::vector<Rational>& theta() const { return theta_; }
  Eigen::VectorXd theta_numeric() const;

  /// k x n matrix whose columns are the weights.
  Eigen::MatrixXd weight_matrix() const;

  /// beta^i(xi)
  Rational pairing(std::size_t i, std::span<const Rational> xi) const;
  double pairing(std::size_t i, std::span<const double> xi) const;

  /// <theta, xi>
  Rational theta_pairing(std::span<const Rational> xi) const;

  friend bool operator==(const WeightSystem&, const WeightSystem&) = default;

 private:
  std::size_t rank_;
  std::vector<Weight> weights_;
  std::vector<Rational> theta_;
};

/// The 2n-coordinate system (beta^1..beta^n, -beta^1..-beta^n) of T*V, same theta.
WeightSystem doubled_weights(const WeightSystem& w);

/// Lie algebra element of the compact torus; exact (rational) or numeric.
class Cocharacter {
 public:
  Cocharacter() = default;
  static Cocharacter exact(std::vector<Rational> xi) { return Cocharacter(std::move(xi)); }
  static Cocharacter numeric(std::vector<double> xi) { return Cocharacter(std::move(xi)); }

  bool is_exact() const { return std::holds_alternative<std::vector<Rational>>(value_); }
  std::size_t size() const;
  const std::vector<Rational>& exact_value() const { return std::get<std::vector<Rational>>(value_); }
  std::vector<double> to_numeric() const;
  bool is_zero() const;

 private:
  explicit Cocharacter(std::vector<Rational> xi) : value_(std::move(xi)) {}
  explicit Cocharacter(std::vector<double> xi) : value_(std::move(xi)) {}
  std::variant<std::vector<Rational>, std::vector<double>> value_;
};

template <class Scalar>
struct BasicAmbientPoint {
  std::vector<Scalar> coords;
  std::size_t size() const { return coords.size(); }
};

/// Point (x, z) of X = V + V*; z_i has weight -beta^i. The real model uses
/// y_i = conj(z_i).
template <class Scalar>
struct BasicCotangentPoint {
  std::vector<Scalar> x;
  std::vector<Scalar> z;
  std::size_t size() const { return x.size(); }
};

using AmbientPoint = BasicAmbientPoint<Complex>;
using CotangentPoint = BasicCotangentPoint<Complex>;
using ExactAmbientPoint = BasicAmbientPoint<ExactComplex>;
using ExactCotangentPoint = BasicCotangentPoint<ExactComplex>;

AmbientPoint to_numeric(const ExactAmbientPoint& p);
CotangentPoint to_numeric(const ExactCotangentPoint& p);
/// (x, z) viewed as a point of C^{2n} for the doubled weight system.
AmbientPoint flatten(const CotangentPoint& p);
CotangentPoint unflatten(const AmbientPoint& p);

// --- real model R^{4n}: [Re x_0, Im x_0, ..., Re y_0, Im y_0, ...] -----------

Eigen::VectorXd real_form(const CotangentPoint& p);
CotangentPoint from_real_form(const Eigen::VectorXd& v);

enum class Quaternion { I, J, K };

/// I(x,y) = (ix, -iy), J(x,y) = (-y, x), K = I J.
Eigen::VectorXd apply_quaternion(Quaternion op, const Eigen::VectorXd& v);

// --- torus action -----------------------------------------------------------

/// exp(sqrt(-1) t xi): x_i -> exp(-beta^i(xi) t) x_i, z_i -> exp(+beta^i(xi) t) z_i.
AmbientPoint act_imaginary(const WeightSystem& w, const Cocharacter& xi, double t, const AmbientPoint& p);
CotangentPoint act_imaginary(const WeightSystem& w, const Cocharacter& xi, double t, const CotangentPoint& p);

/// Compact torus element exp(sqrt(-1) phi): x_i -> exp(i beta^i(phi)) x_i, z_i by the inverse phase.
AmbientPoint act_compact(const WeightSystem& w, std::span<const double> phi, const AmbientPoint& p);
CotangentPoint act_compact(const WeightSystem& w, std::span<const double> phi, const CotangentPoint& p);

/// Exact action of g = (g_1..g_k) in (Q(i)^x)^k: x_i -> prod_a g_a^{beta^i_a} x_i, z_i by the inverse.
ExactAmbientPoint act_torus(const WeightSystem& w, std::span<const ExactComplex> g, const ExactAmbientPoint& p);
ExactCotangentPoint act_torus(const WeightSystem& w, std::span<const ExactComplex> g,
                              const ExactCotangentPoint& p);

/// exp(sqrt(-1) t xi) for integral xi with s = exp(-t) kept exact: g_a = s^{xi_a}.
std::vector<ExactComplex> one_parameter_element(std::span<const Rational> integral_xi, const Rational& s);

// --- supports -----------------------------------------------------------------

IndexSet support(const AmbientPoint& p, double threshold = kDefaultSupportThreshold);
IndexSet support(const ExactAmbientPoint& p);

struct CotangentSupport {
  IndexSet x;
  IndexSet z;
  friend bool operator==(const CotangentSupport&, const CotangentSupport&) = default;
};
CotangentSupport support(const CotangentPoint& p, double threshold = kDefaultSupportThreshold);
CotangentSupport support(const ExactCotangentPoint& p);

/// Support of (x, z) as a subset of the 2n doubled coordinates.
IndexSet doubled_support(const CotangentSupport& s, std::size_t n);

}  // namespace hkq
