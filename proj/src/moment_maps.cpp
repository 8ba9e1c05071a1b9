#include "hkq/moment_maps.hpp"

#include <cmath>
#include <sstream>

namespace hkq {
namespace {

void check_size(const WeightSystem& w, std::size_t n) {
  if (n != w.size()) throw DimensionMismatch("point length differs from weight count");
}

void check_size(const WeightSystem& w, const auto& p) {
  check_size(w, p.x.size());
  check_size(w, p.z.size());
}

}  // namespace

std::string to_string(MomentKind kind) {
  switch (kind) {
    case MomentKind::kahler:
      return "kahler";
    case MomentKind::holomorphic:
      return "holomorphic";
    case MomentKind::hyperkahler:
      return "hyperkahler";
    case MomentKind::circle:
      return "circle";
  }
  return "unknown";
}

double MomentValue::norm() const {
  double s = 0;
  for (double x : value) s += x * x;
  return std::sqrt(s);
}

MomentValue mu(const WeightSystem& w, const AmbientPoint& v) {
  check_size(w, v.size());
  MomentValue out{MomentKind::kahler, std::vector<double>(w.rank())};
  for (std::size_t a = 0; a < w.rank(); ++a) {
    double s = 0;
    for (std::size_t i = 0; i < v.size(); ++i) s += static_cast<double>(w.weight(i)[a]) * std::norm(v.coords[i]);
    out.value[a] = -0.5 * s + to_double(w.theta()[a]);
  }
  return out;
}

std::vector<Rational> mu_exact(const WeightSystem& w, const ExactAmbientPoint& v) {
  check_size(w, v.size());
  std::vector<Rational> out(w.rank());
  for (std::size_t a = 0; a < w.rank(); ++a) {
    Rational s = 0;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (w.weight(i)[a] != 0) s += Rational(w.weight(i)[a]) * v.coords[i].norm();
    }
    out[a] = w.theta()[a] - s / 2;
  }
  return out;
}

MomentValue hol_moment(const WeightSystem& w, const CotangentPoint& p) {
  check_size(w, p);
  MomentValue out{MomentKind::holomorphic, std::vector<double>(2 * w.rank())};
  for (std::size_t a = 0; a < w.rank(); ++a) {
    Complex s = 0;
    for (std::size_t i = 0; i < p.size(); ++i) s += static_cast<double>(w.weight(i)[a]) * p.x[i] * p.z[i];
    s *= Complex(0, 1);
    out.value[2 * a] = s.real();
    out.value[2 * a + 1] = s.imag();
  }
  return out;
}

std::vector<ExactComplex> hol_moment_exact(const WeightSystem& w, const ExactCotangentPoint& p) {
  check_size(w, p);
  std::vector<ExactComplex> out(w.rank());
  const ExactComplex i_unit{0, 1};
  for (std::size_t a = 0; a < w.rank(); ++a) {
    ExactComplex s;
    for (std::size_t i = 0; i < p.size(); ++i) {
      if (w.weight(i)[a] != 0) s = s + ExactComplex{Rational(w.weight(i)[a])} * p.x[i] * p.z[i];
    }
    out[a] = i_unit * s;
  }
  return out;
}

MomentValue mu_hyperkahler(const WeightSystem& w, const CotangentPoint& p) {
  check_size(w, p);
  const std::size_t k = w.rank();
  MomentValue out{MomentKind::hyperkahler, std::vector<double>(3 * k)};
  const MomentValue hol = hol_moment(w, p);
  for (std::size_t a = 0; a < k; ++a) {
    double s = 0;
    for (std::size_t i = 0; i < p.size(); ++i) {
      s += static_cast<double>(w.weight(i)[a]) * (std::norm(p.x[i]) - std::norm(p.z[i]));
    }
    out.value[a] = -0.5 * s + to_double(w.theta()[a]);
    out.value[k + a] = hol.value[2 * a];
    out.value[2 * k + a] = hol.value[2 * a + 1];
  }
  return out;
}

double psi(const CotangentPoint& p) {
  double s = 0;
  for (const auto& z : p.z) s += std::norm(z);
  return -0.5 * s;
}

Rational psi_exact(const ExactCotangentPoint& p) {
  Rational s = 0;
  for (const auto& z : p.z) s += z.norm();
  return -s / 2;
}

JWeight j_mu_weight(const WeightSystem& w, const ExactCotangentPoint& p, const std::vector<Rational>& xi) {
  check_size(w, p);
  for (std::size_t i = 0; i < p.size(); ++i) {
    const Rational lambda = w.pairing(i, xi);
    if (lambda == 0) continue;
    // sgn(lambda) * sqrt(-1) * conj(z_i)
    const ExactComplex iy = ExactComplex{0, 1} * p.z[i].conj();
    const ExactComplex target = lambda > 0 ? iy : -iy;
    if (!(p.x[i] == target)) return JWeight::infinite;
  }
  return JWeight::zero;
}

JWeight j_mu_weight(const WeightSystem& w, const CotangentPoint& p, const std::vector<Rational>& xi,
                    double tolerance) {
  check_size(w, p);
  for (std::size_t i = 0; i < p.size(); ++i) {
    const Rational lambda = w.pairing(i, xi);
    if (lambda == 0) continue;
    const Complex iy = Complex(0, 1) * std::conj(p.z[i]);
    const Complex target = lambda > 0 ? iy : -iy;
    if (std::abs(p.x[i] - target) > tolerance) return JWeight::infinite;
  }
  return JWeight::zero;
}

FlowTrace flow_trace(const WeightSystem& w, const AmbientPoint& v, std::span<const double> xi,
                     std::span<const double> t_grid, const FlowTraceOptions& options) {
  check_size(w, v.size());
  if (xi.size() != w.rank()) throw DimensionMismatch("cocharacter length differs from torus rank");
  for (std::size_t j = 1; j < t_grid.size(); ++j) {
    if (!(t_grid[j] > t_grid[j - 1])) throw PreconditionError("flow_trace needs an increasing time grid");
  }
  std::vector<double> lambda(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) lambda[i] = w.pairing(i, xi);
  double theta_xi = 0;
  const auto theta = w.theta_numeric();
  for (std::size_t a = 0; a < w.rank(); ++a) theta_xi += theta[static_cast<Eigen::Index>(a)] * xi[a];

  FlowTrace trace;
  const double inf = std::numeric_limits<double>::infinity();
  for (double t : t_grid) {
    if (t > options.horizon) break;
    trace.t.push_back(t);
    if (trace.tail_infinite) {
      trace.values.push_back(inf);
      continue;
    }
    // <mu(exp(sqrt(-1) t xi) v), xi> = -1/2 sum lambda_i |v_i|^2 e^{-2 lambda_i t} + <theta, xi>
    double value = theta_xi;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (lambda[i] == 0) continue;
      value += -0.5 * lambda[i] * std::norm(v.coords[i]) * std::exp(-2.0 * lambda[i] * t);
    }
    if (!std::isfinite(value) || value > options.divergence_threshold) {
      trace.tail_infinite = true;
      trace.values.push_back(inf);
    } else {
      trace.values.push_back(value);
      trace.tail = value;
    }
  }
  return trace;
}

std::string flow_trace_csv(const FlowTrace& trace) {
  std::ostringstream out;
  out.precision(17);
  out << "t,value\n";
  for (std::size_t j = 0; j < trace.t.size(); ++j) {
    out << trace.t[j] << ',';
    if (std::isinf(trace.values[j])) {
      out << "inf";
    } else {
      out << trace.values[j];
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace hkq
