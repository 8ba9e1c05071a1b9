#include "hkq/kempf_ness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hkq/exact_lp.hpp"
#include "hkq/moment_maps.hpp"

namespace hkq {
namespace {

void check_size(const WeightSystem& w, const AmbientPoint& v, const Eigen::VectorXd& xi) {
  if (v.size() != w.size()) throw DimensionMismatch("point length differs from weight count");
  if (static_cast<std::size_t>(xi.size()) != w.rank()) {
    throw DimensionMismatch("cocharacter length differs from torus rank");
  }
}

Eigen::VectorXd weighted_moduli(const WeightSystem& w, const AmbientPoint& v, const Eigen::VectorXd& xi) {
  // |v_i|^2 exp(-2 beta^i(xi))
  const Eigen::MatrixXd b = w.weight_matrix();
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    const double m = std::norm(v.coords[i]);
    out[ii] = m == 0 ? 0.0 : m * std::exp(-2.0 * b.col(ii).dot(xi));
  }
  return out;
}

AmbientPoint scaled(const WeightSystem& w, const AmbientPoint& v, const Eigen::VectorXd& xi) {
  return act_imaginary(w, Cocharacter::numeric(std::vector<double>(xi.data(), xi.data() + xi.size())), 1.0, v);
}

}  // namespace

std::string to_string(KNStatus s) { return s == KNStatus::converged ? "converged" : "diverged"; }

double kn_value(const WeightSystem& w, const AmbientPoint& v, const Eigen::VectorXd& xi) {
  check_size(w, v, xi);
  const Eigen::VectorXd m = weighted_moduli(w, v, xi);
  const double value = 0.25 * m.sum() + w.theta_numeric().dot(xi);
  return std::isfinite(value) ? value : std::numeric_limits<double>::infinity();
}

Eigen::VectorXd kn_gradient(const WeightSystem& w, const AmbientPoint& v, const Eigen::VectorXd& xi) {
  check_size(w, v, xi);
  return -0.5 * w.weight_matrix() * weighted_moduli(w, v, xi) + w.theta_numeric();
}

Eigen::MatrixXd kn_hessian(const WeightSystem& w, const AmbientPoint& v, const Eigen::VectorXd& xi) {
  check_size(w, v, xi);
  const Eigen::MatrixXd b = w.weight_matrix();
  return b * weighted_moduli(w, v, xi).asDiagonal() * b.transpose();
}

namespace {

KNOutcome diverged_from_exact(const WeightSystem& w, const IndexSet& s, std::size_t iterations) {
  StabilityVerdict verdict = classify_support(w, s);
  if (verdict.status == Stability::unstable) {
    KNOutcome out;
    out.status = KNStatus::diverged;
    out.certificate = verdict.certificate;
    out.iterations = iterations;
    return out;
  }
  throw UndecidedError("no Kempf-Ness minimizer was found and the point is " + to_string(verdict.status) +
                       "; no destabilizing certificate exists");
}

// Orthonormal basis of span{beta^i : i in S} in R^k.
Eigen::MatrixXd weight_span_basis(const WeightSystem& w, const IndexSet& s) {
  const Eigen::MatrixXd b = w.weight_matrix();
  Eigen::MatrixXd bs(static_cast<Eigen::Index>(w.rank()), static_cast<Eigen::Index>(s.size()));
  for (std::size_t j = 0; j < s.size(); ++j) bs.col(static_cast<Eigen::Index>(j)) = b.col(static_cast<Eigen::Index>(s[j]));
  lp::RationalMatrix exact(s.size(), std::vector<Rational>(w.rank()));
  for (std::size_t j = 0; j < s.size(); ++j) {
    for (std::size_t a = 0; a < w.rank(); ++a) exact[j][a] = w.weight(s[j])[a];
  }
  const auto r = static_cast<Eigen::Index>(lp::rank(exact));
  if (r == 0) return Eigen::MatrixXd(static_cast<Eigen::Index>(w.rank()), 0);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(bs, Eigen::ComputeFullU);
  return svd.matrixU().leftCols(r);
}

}  // namespace

KNOutcome solve_kahler(const WeightSystem& w, const AmbientPoint& v, const KNOptions& options) {
  if (v.size() != w.size()) throw DimensionMismatch("point length differs from weight count");
  const IndexSet s = support(v, options.support_threshold);
  const auto k = static_cast<Eigen::Index>(w.rank());

  // A minimizer exists iff the orbit is closed in the semistable locus; near
  // non-closed orbits the residual creeps to zero at infinity and would fool
  // a purely numerical stopping rule.
  if (!polystable_support(w, s)) return diverged_from_exact(w, s, 0);

  // Work in the span of the support weights; KN is constant along its complement.
  const Eigen::MatrixXd q = weight_span_basis(w, s);
  Eigen::VectorXd base = options.initial_xi.value_or(Eigen::VectorXd::Zero(k));
  if (base.size() != k) throw DimensionMismatch("initial cocharacter length differs from torus rank");
  base -= q * (q.transpose() * base);
  Eigen::VectorXd eta = q.transpose() * options.initial_xi.value_or(Eigen::VectorXd::Zero(k));

  auto xi_of = [&](const Eigen::VectorXd& e) -> Eigen::VectorXd { return base + q * e; };
  auto residual_at = [&](const Eigen::VectorXd& xi) { return mu(w, scaled(w, v, xi)).norm(); };

  std::size_t iter = 0;
  for (;; ++iter) {
    const Eigen::VectorXd xi = xi_of(eta);
    const double res = residual_at(xi);
    if (res < options.tolerance) {
      KNOutcome out;
      out.status = KNStatus::converged;
      out.xi_star = xi;
      out.representative = scaled(w, v, xi);
      out.residual = res;
      out.iterations = iter;
      return out;
    }
    if (iter >= options.max_iterations || xi.norm() > options.divergence_bound || !std::isfinite(res)) {
      return diverged_from_exact(w, s, iter);
    }
    const Eigen::VectorXd g = q.transpose() * kn_gradient(w, v, xi);
    Eigen::MatrixXd h = q.transpose() * kn_hessian(w, v, xi) * q;
    h.diagonal().array() += options.damping_floor;
    const Eigen::VectorXd step = -h.ldlt().solve(g);
    const double f0 = kn_value(w, v, xi);
    const double slope = g.dot(step);
    double alpha = 1.0;
    bool accepted = false;
    // Below roundoff in f the Armijo test is noise; fall back to the residual.
    const bool flat = -slope < 64 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(f0));
    while (alpha > 1e-20) {
      const Eigen::VectorXd trial = xi_of(eta + alpha * step);
      const bool ok = flat ? residual_at(trial) < res
                           : kn_value(w, v, trial) <= f0 + options.armijo * alpha * slope;
      if (ok) {
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted) {
      // Line search exhausted: either roundoff at the minimum or a flat direction.
      if (res < 1e3 * options.tolerance && q.cols() > 0) {
        const Eigen::VectorXd refined = xi_of(eta + step);
        if (residual_at(refined) < options.tolerance) {
          eta += step;
          continue;
        }
      }
      return diverged_from_exact(w, s, iter);
    }
    eta += alpha * step;
  }
}

KNHyperkahlerOutcome solve_hyperkahler(const WeightSystem& w, const CotangentPoint& p, const KNOptions& options) {
  if (p.x.size() != w.size() || p.z.size() != w.size()) {
    throw DimensionMismatch("cotangent point length differs from weight count");
  }
  const double hol = hol_moment(w, p).norm();
  if (!(hol < 1e-10)) {
    throw PreconditionError("holomorphic moment map does not vanish (|M| = " + std::to_string(hol) + ")");
  }
  const WeightSystem doubled = doubled_weights(w);
  KNHyperkahlerOutcome out;
  out.kahler = solve_kahler(doubled, flatten(p), options);
  if (out.kahler.status == KNStatus::converged) {
    out.representative = unflatten(out.kahler.representative);
    out.hyperkahler_residual = mu_hyperkahler(w, out.representative).norm();
  }
  return out;
}

Cocharacter instability_certificate(const WeightSystem& w, const ExactAmbientPoint& v) {
  StabilityVerdict verdict = classify_point(w, v);
  if (verdict.status == Stability::stable) {
    throw PreconditionError("instability certificate requested for a stable point");
  }
  return *verdict.certificate;
}

}  // namespace hkq
