#pragma once

// Pointwise hyperkahler reduction on the flat real model R^{4n} of T*V. At a
// point of mu_hk^{-1}(0) with finite stabilizer, the tangent space of the
// quotient is identified with the orthogonal complement of the quaternionic
// span of the gauge directions; metric and Kahler forms are the restrictions
// of the flat ones.

#include <complex>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "hkq/rep_core.hpp"

namespace hkq {

struct FrameOptions {
  double moment_tolerance = 1e-9;
  double rank_tolerance = 1e-8;  // relative residual that counts as linear dependence
};

class ReducedFrame {
 public:
  /// Generic builder: horizontal space = complement of span(gauge columns).
  /// An empty gauge matrix (no group) yields the whole ambient space.
  ReducedFrame(CotangentPoint base, const Eigen::MatrixXd& gauge, double rank_tolerance = 1e-8);

  const CotangentPoint& base() const { return base_; }
  const Eigen::MatrixXd& gauge_basis() const { return gauge_; }           // orthonormal, 4n x rank
  const Eigen::MatrixXd& horizontal_basis() const { return horizontal_; } // orthonormal, 4n x d
  Eigen::Index ambient_dim() const { return horizontal_.rows(); }
  Eigen::Index dimension() const { return horizontal_.cols(); }

  /// Orthogonal projection onto the horizontal span.
  Eigen::VectorXd project(const Eigen::VectorXd& v) const;
  /// ||v - P v||
  double horizontal_residual(const Eigen::VectorXd& v) const;

  /// Gram matrices in the horizontal basis: g and omega_A(u, v) = g(Au, v).
  Eigen::MatrixXd metric_gram() const;
  Eigen::MatrixXd form_gram(Quaternion a) const;

 private:
  CotangentPoint base_;
  Eigen::MatrixXd gauge_;
  Eigen::MatrixXd horizontal_;
};

/// The 4k gauge vectors {xi_a p, I xi_a p, J xi_a p, K xi_a p} as columns.
Eigen::MatrixXd gauge_vectors(const WeightSystem& w, const CotangentPoint& p);

/// Frame at a hyperkahler moment-zero point. Throws PreconditionError when the
/// moment residual is too large or the stabilizer of the support has positive
/// dimension, and Error when the gauge vectors are unexpectedly rank-deficient.
ReducedFrame horizontal_frame(const WeightSystem& w, const CotangentPoint& p, const FrameOptions& options = {});

/// Reduced metric and forms on horizontal vectors; non-horizontal input
/// (projection residual > 1e-8) throws PreconditionError.
double reduced_metric(const ReducedFrame& frame, const Eigen::VectorXd& u, const Eigen::VectorXd& v);
double reduced_form(const ReducedFrame& frame, Quaternion a, const Eigen::VectorXd& u, const Eigen::VectorXd& v);

/// max over horizontal basis vectors of ||(IJ - K)u||, ||(I^2 + 1)u||, ||(J^2 + 1)u||
/// with each reduced operator being apply-then-project.
double quaternion_check(const ReducedFrame& frame);

struct ZeroSectionReport {
  double metric_discrepancy = 0.0;
  double form_discrepancy = 0.0;      // omega_I
  double horizontality_residual = 0.0;
  Eigen::Index kahler_quotient_dim = 0;
};

/// At (x | 0) with mu(x) = 0, compares the hyperkahler-reduced g and omega_I on
/// zero-section tangent vectors (columns of `tangents`, each in R^{2n}; the
/// standard basis when empty) with the Kahler reduction of V alone, computed
/// independently by an SVD null space inside C^n.
ZeroSectionReport zero_section_check(const WeightSystem& w, const AmbientPoint& x,
                                     const Eigen::MatrixXd& tangents = Eigen::MatrixXd());

enum class PotentialStructure { I, J };

/// Max entry error between dd^c_A(-Psi), Psi(x,y) = -1/2 ||y||^2, evaluated by
/// central finite differences at each point (column of `points`, in R^{4n}),
/// and omega_A. Holds for A = J; A = I is a negative control.
/// Convention: (d^c f)(v) = -df(A v).
double ambient_potential_check(const Eigen::MatrixXd& points, double h,
                               PotentialStructure structure = PotentialStructure::J);

struct CircleActionReport {
  double moment_I_deviation = 0.0;          // | |mu_I(R p)| - |mu_I(p)| |
  double holomorphic_scaling_deviation = 0.0; // ||M(R p) - lambda M(p)||
  double omega_scaling_deviation = 0.0;     // max |Omega(dR u, dR v) - lambda Omega(u, v)|
  double transport_residual = 0.0;          // horizontality of dR u at R p
};

/// Fiberwise rotation (x, z) -> (x, lambda z), |lambda| = 1, checked at the
/// frame's base point; Omega = omega_J + sqrt(-1) omega_K.
CircleActionReport circle_action_check(const WeightSystem& w, const ReducedFrame& frame, std::complex<double> lambda);

/// Differential of the fiber rotation on the real model.
Eigen::VectorXd rotate_fiber(const Eigen::VectorXd& v, std::complex<double> lambda);

}  // namespace hkq
