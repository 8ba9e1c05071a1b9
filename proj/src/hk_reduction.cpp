#include "hkq/hk_reduction.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hkq/git_stability.hpp"
#include "hkq/moment_maps.hpp"

namespace hkq {
namespace {

// Modified Gram-Schmidt with one reorthogonalization pass. Appends the
// normalized remainder of `v` to `basis` unless it is dependent.
bool append_orthonormal(Eigen::MatrixXd& basis, Eigen::Index& used, const Eigen::VectorXd& v, double tol) {
  const double scale = v.norm();
  if (scale == 0) return false;
  Eigen::VectorXd r = v;
  for (int pass = 0; pass < 2; ++pass) {
    for (Eigen::Index j = 0; j < used; ++j) r -= basis.col(j).dot(r) * basis.col(j);
  }
  const double rn = r.norm();
  if (rn <= tol * scale) return false;
  basis.col(used++) = r / rn;
  return true;
}

// multiplication by i on consecutive (re, im) pairs
Eigen::VectorXd mul_i(const Eigen::VectorXd& b) {
  Eigen::VectorXd r(b.size());
  for (Eigen::Index j = 0; j < b.size(); j += 2) {
    r[j] = -b[j + 1];
    r[j + 1] = b[j];
  }
  return r;
}

Eigen::MatrixXd operator_matrix(Quaternion a, Eigen::Index dim) {
  Eigen::MatrixXd m(dim, dim);
  for (Eigen::Index j = 0; j < dim; ++j) m.col(j) = apply_quaternion(a, Eigen::VectorXd::Unit(dim, j));
  return m;
}

}  // namespace

ReducedFrame::ReducedFrame(CotangentPoint base, const Eigen::MatrixXd& gauge, double rank_tolerance)
    : base_(std::move(base)) {
  const auto dim = static_cast<Eigen::Index>(4 * base_.size());
  if (gauge.size() > 0 && gauge.rows() != dim) throw DimensionMismatch("gauge vectors have the wrong length");
  Eigen::MatrixXd all(dim, dim);
  Eigen::Index used = 0;
  for (Eigen::Index j = 0; j < gauge.cols(); ++j) append_orthonormal(all, used, gauge.col(j), rank_tolerance);
  const Eigen::Index gauge_rank = used;
  for (Eigen::Index j = 0; j < dim && used < dim; ++j) {
    append_orthonormal(all, used, Eigen::VectorXd::Unit(dim, j), rank_tolerance);
  }
  if (used != dim) throw Error("failed to complete an orthonormal frame");
  gauge_ = all.leftCols(gauge_rank);
  horizontal_ = all.rightCols(dim - gauge_rank);
}

Eigen::VectorXd ReducedFrame::project(const Eigen::VectorXd& v) const {
  if (v.size() != ambient_dim()) throw DimensionMismatch("tangent vector has the wrong length");
  return horizontal_ * (horizontal_.transpose() * v);
}

double ReducedFrame::horizontal_residual(const Eigen::VectorXd& v) const { return (v - project(v)).norm(); }

Eigen::MatrixXd ReducedFrame::metric_gram() const { return horizontal_.transpose() * horizontal_; }

Eigen::MatrixXd ReducedFrame::form_gram(Quaternion a) const {
  Eigen::MatrixXd out(dimension(), dimension());
  for (Eigen::Index i = 0; i < dimension(); ++i) {
    const Eigen::VectorXd ai = apply_quaternion(a, horizontal_.col(i));
    for (Eigen::Index j = 0; j < dimension(); ++j) out(i, j) = ai.dot(horizontal_.col(j));
  }
  return out;
}

Eigen::MatrixXd gauge_vectors(const WeightSystem& w, const CotangentPoint& p) {
  if (p.x.size() != w.size() || p.z.size() != w.size()) {
    throw DimensionMismatch("cotangent point length differs from weight count");
  }
  const std::size_t n = w.size();
  const std::size_t k = w.rank();
  const Eigen::VectorXd base = real_form(p);
  Eigen::MatrixXd g(static_cast<Eigen::Index>(4 * n), static_cast<Eigen::Index>(4 * k));
  for (std::size_t a = 0; a < k; ++a) {
    // infinitesimal compact action: x_i -> i beta^i_a x_i, y_i -> i beta^i_a y_i
    Eigen::VectorXd scaled = base;
    for (std::size_t i = 0; i < n; ++i) {
      const double b = static_cast<double>(w.weight(i)[a]);
      scaled.segment(static_cast<Eigen::Index>(2 * i), 2) *= b;
      scaled.segment(static_cast<Eigen::Index>(2 * n + 2 * i), 2) *= b;
    }
    const Eigen::VectorXd xi_p = mul_i(scaled);
    const auto c = static_cast<Eigen::Index>(4 * a);
    g.col(c) = xi_p;
    g.col(c + 1) = apply_quaternion(Quaternion::I, xi_p);
    g.col(c + 2) = apply_quaternion(Quaternion::J, xi_p);
    g.col(c + 3) = apply_quaternion(Quaternion::K, xi_p);
  }
  return g;
}

ReducedFrame horizontal_frame(const WeightSystem& w, const CotangentPoint& p, const FrameOptions& options) {
  const double residual = mu_hyperkahler(w, p).norm();
  if (!(residual < options.moment_tolerance)) {
    throw PreconditionError("hyperkahler moment residual " + std::to_string(residual) + " exceeds tolerance");
  }
  const WeightSystem doubled = doubled_weights(w);
  const StabilizerInfo stab = stabilizer(doubled, doubled_support(support(p), w.size()));
  if (!stab.finite()) {
    throw PreconditionError("stabilizer of the base point has dimension " + std::to_string(stab.subtorus_rank));
  }
  ReducedFrame frame(p, gauge_vectors(w, p), options.rank_tolerance);
  if (frame.gauge_basis().cols() != static_cast<Eigen::Index>(4 * w.rank())) {
    throw Error("gauge vectors span " + std::to_string(frame.gauge_basis().cols()) + " dimensions, expected " +
                std::to_string(4 * w.rank()));
  }
  return frame;
}

namespace {

void require_horizontal(const ReducedFrame& frame, const Eigen::VectorXd& v) {
  const double r = frame.horizontal_residual(v);
  if (r > 1e-8) throw PreconditionError("vector is not horizontal (residual " + std::to_string(r) + ")");
}

}  // namespace

double reduced_metric(const ReducedFrame& frame, const Eigen::VectorXd& u, const Eigen::VectorXd& v) {
  require_horizontal(frame, u);
  require_horizontal(frame, v);
  return u.dot(v);
}

double reduced_form(const ReducedFrame& frame, Quaternion a, const Eigen::VectorXd& u, const Eigen::VectorXd& v) {
  require_horizontal(frame, u);
  require_horizontal(frame, v);
  return apply_quaternion(a, u).dot(v);
}

double quaternion_check(const ReducedFrame& frame) {
  auto reduced = [&](Quaternion a, const Eigen::VectorXd& u) { return frame.project(apply_quaternion(a, u)); };
  double worst = 0;
  for (Eigen::Index j = 0; j < frame.dimension(); ++j) {
    const Eigen::VectorXd u = frame.horizontal_basis().col(j);
    const Eigen::VectorXd ij = reduced(Quaternion::I, reduced(Quaternion::J, u));
    worst = std::max(worst, (ij - reduced(Quaternion::K, u)).norm());
    worst = std::max(worst, (reduced(Quaternion::I, reduced(Quaternion::I, u)) + u).norm());
    worst = std::max(worst, (reduced(Quaternion::J, reduced(Quaternion::J, u)) + u).norm());
  }
  return worst;
}

ZeroSectionReport zero_section_check(const WeightSystem& w, const AmbientPoint& x, const Eigen::MatrixXd& tangents) {
  if (x.size() != w.size()) throw DimensionMismatch("point length differs from weight count");
  const double residual = mu(w, x).norm();
  if (!(residual < 1e-10)) {
    throw PreconditionError("moment residual " + std::to_string(residual) + " exceeds 1e-10");
  }
  const std::size_t n = w.size();
  const auto dim_v = static_cast<Eigen::Index>(2 * n);
  CotangentPoint p{x.coords, std::vector<Complex>(n)};
  const ReducedFrame frame = horizontal_frame(w, p);

  // Kahler reduction of V alone: complement of {xi_a x, i xi_a x} via SVD.
  Eigen::MatrixXd gv(dim_v, static_cast<Eigen::Index>(2 * w.rank()));
  for (std::size_t a = 0; a < w.rank(); ++a) {
    Eigen::VectorXd xi_x(dim_v);
    for (std::size_t i = 0; i < n; ++i) {
      const Complex c = Complex(0, static_cast<double>(w.weight(i)[a])) * x.coords[i];
      xi_x[static_cast<Eigen::Index>(2 * i)] = c.real();
      xi_x[static_cast<Eigen::Index>(2 * i + 1)] = c.imag();
    }
    gv.col(static_cast<Eigen::Index>(2 * a)) = xi_x;
    gv.col(static_cast<Eigen::Index>(2 * a + 1)) = mul_i(xi_x);
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(gv.transpose(), Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double cutoff = 1e-10 * std::max(1.0, sv.size() > 0 ? sv[0] : 0.0);
  Eigen::Index r = 0;
  for (Eigen::Index j = 0; j < sv.size(); ++j) {
    if (sv[j] > cutoff) ++r;
  }
  const Eigen::MatrixXd null_basis = svd.matrixV().rightCols(dim_v - r);
  const Eigen::MatrixXd proj_v = null_basis * null_basis.transpose();

  auto embed = [&](const Eigen::VectorXd& t) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(2 * dim_v);
    e.head(dim_v) = t;
    return e;
  };

  ZeroSectionReport report;
  report.kahler_quotient_dim = null_basis.cols();
  for (Eigen::Index j = 0; j < null_basis.cols(); ++j) {
    report.horizontality_residual =
        std::max(report.horizontality_residual, frame.horizontal_residual(embed(null_basis.col(j))));
  }
  const Eigen::MatrixXd t = tangents.size() == 0 ? Eigen::MatrixXd::Identity(dim_v, dim_v) : tangents;
  if (t.rows() != dim_v) throw DimensionMismatch("zero-section tangents must have length 2n");
  for (Eigen::Index a = 0; a < t.cols(); ++a) {
    const Eigen::VectorXd ua = frame.project(embed(t.col(a)));
    const Eigen::VectorXd va = proj_v * t.col(a);
    for (Eigen::Index b = 0; b < t.cols(); ++b) {
      const Eigen::VectorXd ub = frame.project(embed(t.col(b)));
      const Eigen::VectorXd vb = proj_v * t.col(b);
      report.metric_discrepancy = std::max(report.metric_discrepancy, std::abs(ua.dot(ub) - va.dot(vb)));
      const double hk_form = apply_quaternion(Quaternion::I, ua).dot(ub);
      const double v_form = mul_i(va).dot(vb);
      report.form_discrepancy = std::max(report.form_discrepancy, std::abs(hk_form - v_form));
    }
  }
  return report;
}

double ambient_potential_check(const Eigen::MatrixXd& points, double h, PotentialStructure structure) {
  if (points.rows() % 4 != 0) throw DimensionMismatch("points must lie in R^{4n}");
  const Eigen::Index dim = points.rows();
  const Eigen::Index half = dim / 2;
  const Quaternion op = structure == PotentialStructure::J ? Quaternion::J : Quaternion::I;
  const Eigen::MatrixXd a = operator_matrix(op, dim);
  const Eigen::MatrixXd omega = a.transpose();  // omega(e_i, e_j) = (A e_i)_j
  auto potential = [&](const Eigen::VectorXd& v) { return 0.5 * v.tail(half).squaredNorm(); };  // -Psi

  double worst = 0;
  for (Eigen::Index p = 0; p < points.cols(); ++p) {
    const Eigen::VectorXd v = points.col(p);
    Eigen::MatrixXd hess(dim, dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
      for (Eigen::Index j = i; j < dim; ++j) {
        const Eigen::VectorXd ei = h * Eigen::VectorXd::Unit(dim, i);
        const Eigen::VectorXd ej = h * Eigen::VectorXd::Unit(dim, j);
        hess(i, j) = (potential(v + ei + ej) - potential(v + ei - ej) - potential(v - ei + ej) +
                      potential(v - ei - ej)) /
                     (4 * h * h);
        hess(j, i) = hess(i, j);
      }
    }
    const Eigen::MatrixXd ha = hess * a;
    const Eigen::MatrixXd ddc = -ha + ha.transpose();
    worst = std::max(worst, (ddc - omega).cwiseAbs().maxCoeff());
  }
  return worst;
}

Eigen::VectorXd rotate_fiber(const Eigen::VectorXd& v, std::complex<double> lambda) {
  if (v.size() % 4 != 0) throw DimensionMismatch("real model vector length must be divisible by 4");
  Eigen::VectorXd out = v;
  const Eigen::Index half = v.size() / 2;
  const Complex c = std::conj(lambda);  // y = conj(z)
  for (Eigen::Index j = half; j < v.size(); j += 2) {
    const Complex y = Complex(v[j], v[j + 1]) * c;
    out[j] = y.real();
    out[j + 1] = y.imag();
  }
  return out;
}

CircleActionReport circle_action_check(const WeightSystem& w, const ReducedFrame& frame, std::complex<double> lambda) {
  if (std::abs(std::abs(lambda) - 1.0) > 1e-12) throw PreconditionError("fiber rotation needs |lambda| = 1");
  const std::size_t k = w.rank();
  const CotangentPoint& p = frame.base();
  CotangentPoint rotated = p;
  for (auto& z : rotated.z) z *= lambda;

  CircleActionReport report;
  const MomentValue before = mu_hyperkahler(w, p);
  const MomentValue after = mu_hyperkahler(w, rotated);
  for (std::size_t a = 0; a < k; ++a) {
    report.moment_I_deviation = std::max(report.moment_I_deviation, std::abs(after.value[a] - before.value[a]));
    const Complex m0(before.value[k + a], before.value[2 * k + a]);
    const Complex m1(after.value[k + a], after.value[2 * k + a]);
    report.holomorphic_scaling_deviation = std::max(report.holomorphic_scaling_deviation, std::abs(m1 - lambda * m0));
  }

  const ReducedFrame target = horizontal_frame(w, rotated);
  auto big_omega = [](const Eigen::VectorXd& u, const Eigen::VectorXd& v) {
    return Complex(apply_quaternion(Quaternion::J, u).dot(v), apply_quaternion(Quaternion::K, u).dot(v));
  };
  const Eigen::MatrixXd& hb = frame.horizontal_basis();
  for (Eigen::Index i = 0; i < hb.cols(); ++i) {
    const Eigen::VectorXd ui = rotate_fiber(hb.col(i), lambda);
    report.transport_residual = std::max(report.transport_residual, target.horizontal_residual(ui));
    for (Eigen::Index j = 0; j < hb.cols(); ++j) {
      const Eigen::VectorXd uj = rotate_fiber(hb.col(j), lambda);
      const Complex lhs = big_omega(ui, uj);
      const Complex rhs = lambda * big_omega(hb.col(i), hb.col(j));
      report.omega_scaling_deviation = std::max(report.omega_scaling_deviation, std::abs(lhs - rhs));
    }
  }
  return report;
}

}  // namespace hkq
