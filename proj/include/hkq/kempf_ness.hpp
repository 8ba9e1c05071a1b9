#pragma once

// Kempf-Ness minimization: find xi* with mu(exp(sqrt(-1) xi*) v) = 0 by
// damped Newton on the convex function
//   KN(xi) = 1/4 sum_i |v_i|^2 exp(-2 beta^i(xi)) + <theta, xi>,
// whose gradient is mu(exp(sqrt(-1) xi) v). When no minimizer exists the
// answer is an exact destabilizing cocharacter from git_stability.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hkq/git_stability.hpp"
#include "hkq/rep_core.hpp"

namespace hkq {

enum class KNStatus { converged, diverged };
std::string to_string(KNStatus s);

struct KNOptions {
  double tolerance = 1e-10;         // on ||mu|| at the representative
  std::size_t max_iterations = 200;
  double divergence_bound = 50.0;   // ||xi|| past this hands over to the exact test
  double damping_floor = 1e-10;     // Levenberg term added to the Hessian
  double armijo = 0.25;
  double support_threshold = kDefaultSupportThreshold;
  std::optional<Eigen::VectorXd> initial_xi;
};

struct KNOutcome {
  KNStatus status = KNStatus::converged;
  Eigen::VectorXd xi_star;           // converged only
  AmbientPoint representative;       // converged only
  double residual = 0.0;             // ||mu|| at the representative
  std::optional<Cocharacter> certificate;  // diverged only
  std::size_t iterations = 0;
};

struct KNHyperkahlerOutcome {
  KNOutcome kahler;                  // solve on the doubled system
  CotangentPoint representative;     // converged only
  double hyperkahler_residual = 0.0; // ||mu_hk|| at the representative
};

/// +inf on overflow.
double kn_value(const WeightSystem& w, const AmbientPoint& v, const Eigen::VectorXd& xi);
Eigen::VectorXd kn_gradient(const WeightSystem& w, const AmbientPoint& v, const Eigen::VectorXd& xi);
Eigen::MatrixXd kn_hessian(const WeightSystem& w, const AmbientPoint& v, const Eigen::VectorXd& xi);

/// Strictly semistable points whose orbit is not closed have no minimizer and
/// no destabilizing certificate: UndecidedError. So does a stalled iteration.
KNOutcome solve_kahler(const WeightSystem& w, const AmbientPoint& v, const KNOptions& options = {});

/// Precondition ||M(p)|| < 1e-10; violation throws PreconditionError.
KNHyperkahlerOutcome solve_hyperkahler(const WeightSystem& w, const CotangentPoint& p,
                                       const KNOptions& options = {});

/// Exact integral xi with mu_weight(v, xi) <= 0 (< 0 when unstable).
/// Throws PreconditionError on a stable point.
Cocharacter instability_certificate(const WeightSystem& w, const ExactAmbientPoint& v);

}  // namespace hkq
