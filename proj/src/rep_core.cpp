#include "hkq/rep_core.hpp"

#include <cmath>
#include <string>

namespace hkq {

WeightSystem::WeightSystem(std::size_t rank, std::vector<Weight> weights, std::vector<Rational> theta)
    : rank_(rank), weights_(std::move(weights)), theta_(std::move(theta)) {
  if (rank_ == 0) throw PreconditionError("torus rank must be positive");
  if (weights_.empty()) throw PreconditionError("weight system needs at least one weight");
  for (std::size_t i = 0; i < weights_.size(); ++i) {
    if (weights_[i].size() != rank_) {
      throw DimensionMismatch("weight " + std::to_string(i) + " has length " +
                              std::to_string(weights_[i].size()) + ", expected " + std::to_string(rank_));
    }
  }
  if (theta_.size() != rank_) throw DimensionMismatch("theta length differs from torus rank");
}

Eigen::VectorXd WeightSystem::theta_numeric() const {
  Eigen::VectorXd t(rank_);
  for (std::size_t a = 0; a < rank_; ++a) t[a] = to_double(theta_[a]);
  return t;
}

Eigen::MatrixXd WeightSystem::weight_matrix() const {
  Eigen::MatrixXd m(rank_, weights_.size());
  for (std::size_t i = 0; i < weights_.size(); ++i) {
    for (std::size_t a = 0; a < rank_; ++a) m(a, i) = static_cast<double>(weights_[i][a]);
  }
  return m;
}

Rational WeightSystem::pairing(std::size_t i, std::span<const Rational> xi) const {
  if (xi.size() != rank_) throw DimensionMismatch("cocharacter length differs from torus rank");
  Rational s = 0;
  for (std::size_t a = 0; a < rank_; ++a) {
    if (weights_[i][a] != 0) s += Rational(weights_[i][a]) * xi[a];
  }
  return s;
}

double WeightSystem::pairing(std::size_t i, std::span<const double> xi) const {
  if (xi.size() != rank_) throw DimensionMismatch("cocharacter length differs from torus rank");
  double s = 0;
  for (std::size_t a = 0; a < rank_; ++a) s += static_cast<double>(weights_[i][a]) * xi[a];
  return s;
}

Rational WeightSystem::theta_pairing(std::span<const Rational> xi) const {
  if (xi.size() != rank_) throw DimensionMismatch("cocharacter length differs from torus rank");
  Rational s = 0;
  for (std::size_t a = 0; a < rank_; ++a) s += theta_[a] * xi[a];
  return s;
}

WeightSystem doubled_weights(const WeightSystem& w) {
  std::vector<Weight> doubled = w.weights();
  for (const auto& beta : w.weights()) {
    Weight neg(beta.size());
    for (std::size_t a = 0; a < beta.size(); ++a) neg[a] = -beta[a];
    doubled.push_back(std::move(neg));
  }
  return WeightSystem(w.rank(), std::move(doubled), w.theta());
}

std::size_t Cocharacter::size() const {
  return std::visit([](const auto& v) { return v.size(); }, value_);
}

std::vector<double> Cocharacter::to_numeric() const {
  if (const auto* d = std::get_if<std::vector<double>>(&value_)) return *d;
  const auto& r = exact_value();
  std::vector<double> out(r.size());
  for (std::size_t a = 0; a < r.size(); ++a) out[a] = to_double(r[a]);
  return out;
}

bool Cocharacter::is_zero() const {
  return std::visit(
      [](const auto& v) {
        for (const auto& x : v) {
          if (x != 0) return false;
        }
        return true;
      },
      value_);
}

AmbientPoint to_numeric(const ExactAmbientPoint& p) {
  AmbientPoint out;
  out.coords.reserve(p.size());
  for (const auto& c : p.coords) out.coords.push_back(c.to_complex());
  return out;
}

CotangentPoint to_numeric(const ExactCotangentPoint& p) {
  CotangentPoint out;
  for (const auto& c : p.x) out.x.push_back(c.to_complex());
  for (const auto& c : p.z) out.z.push_back(c.to_complex());
  return out;
}

AmbientPoint flatten(const CotangentPoint& p) {
  AmbientPoint out;
  out.coords = p.x;
  out.coords.insert(out.coords.end(), p.z.begin(), p.z.end());
  return out;
}

CotangentPoint unflatten(const AmbientPoint& p) {
  if (p.size() % 2 != 0) throw DimensionMismatch("doubled point must have even length");
  const auto half = static_cast<std::ptrdiff_t>(p.size() / 2);
  CotangentPoint out;
  out.x.assign(p.coords.begin(), p.coords.begin() + half);
  out.z.assign(p.coords.begin() + half, p.coords.end());
  return out;
}

Eigen::VectorXd real_form(const CotangentPoint& p) {
  if (p.x.size() != p.z.size()) throw DimensionMismatch("x and z lengths differ");
  const std::size_t n = p.x.size();
  Eigen::VectorXd v(4 * n);
  for (std::size_t i = 0; i < n; ++i) {
    v[2 * i] = p.x[i].real();
    v[2 * i + 1] = p.x[i].imag();
    v[2 * n + 2 * i] = p.z[i].real();
    v[2 * n + 2 * i + 1] = -p.z[i].imag();
  }
  return v;
}

CotangentPoint from_real_form(const Eigen::VectorXd& v) {
  if (v.size() % 4 != 0) throw DimensionMismatch("real model vector length must be divisible by 4");
  const std::size_t n = static_cast<std::size_t>(v.size()) / 4;
  CotangentPoint p;
  for (std::size_t i = 0; i < n; ++i) {
    p.x.emplace_back(v[2 * i], v[2 * i + 1]);
    p.z.emplace_back(v[2 * n + 2 * i], -v[2 * n + 2 * i + 1]);
  }
  return p;
}

Eigen::VectorXd apply_quaternion(Quaternion op, const Eigen::VectorXd& v) {
  if (v.size() % 4 != 0) throw DimensionMismatch("real model vector length must be divisible by 4");
  const Eigen::Index half = v.size() / 2;
  // multiplication by i on a block of (re, im) pairs
  auto mul_i = [](const Eigen::VectorXd& b) {
    Eigen::VectorXd r(b.size());
    for (Eigen::Index j = 0; j < b.size(); j += 2) {
      r[j] = -b[j + 1];
      r[j + 1] = b[j];
    }
    return r;
  };
  Eigen::VectorXd x = v.head(half);
  Eigen::VectorXd y = v.tail(half);
  Eigen::VectorXd out(v.size());
  switch (op) {
    case Quaternion::I:
      out << mul_i(x), -mul_i(y);
      break;
    case Quaternion::J:
      out << -y, x;
      break;
    case Quaternion::K:
      // I(-y, x) = (-iy, -ix)
      out << -mul_i(y), -mul_i(x);
      break;
  }
  return out;
}

namespace {

void check_size(const WeightSystem& w, std::size_t n) {
  if (n != w.size()) {
    throw DimensionMismatch("point has " + std::to_string(n) + " coordinates, weight system has " +
                            std::to_string(w.size()));
  }
}

}  // namespace

AmbientPoint act_imaginary(const WeightSystem& w, const Cocharacter& xi, double t, const AmbientPoint& p) {
  check_size(w, p.size());
  const auto xn = xi.to_numeric();
  AmbientPoint out = p;
  for (std::size_t i = 0; i < p.size(); ++i) out.coords[i] *= std::exp(-w.pairing(i, xn) * t);
  return out;
}

CotangentPoint act_imaginary(const WeightSystem& w, const Cocharacter& xi, double t, const CotangentPoint& p) {
  check_size(w, p.x.size());
  check_size(w, p.z.size());
  const auto xn = xi.to_numeric();
  CotangentPoint out = p;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double lambda = w.pairing(i, xn);
    out.x[i] *= std::exp(-lambda * t);
    out.z[i] *= std::exp(lambda * t);
  }
  return out;
}

AmbientPoint act_compact(const WeightSystem& w, std::span<const double> phi, const AmbientPoint& p) {
  check_size(w, p.size());
  AmbientPoint out = p;
  for (std::size_t i = 0; i < p.size(); ++i) out.coords[i] *= std::polar(1.0, w.pairing(i, phi));
  return out;
}

CotangentPoint act_compact(const WeightSystem& w, std::span<const double> phi, const CotangentPoint& p) {
  check_size(w, p.x.size());
  check_size(w, p.z.size());
  CotangentPoint out = p;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double angle = w.pairing(i, phi);
    out.x[i] *= std::polar(1.0, angle);
    out.z[i] *= std::polar(1.0, -angle);
  }
  return out;
}

namespace {

ExactComplex character_value(const Weight& beta, std::span<const ExactComplex> g) {
  ExactComplex c{1, 0};
  for (std::size_t a = 0; a < beta.size(); ++a) {
    if (beta[a] != 0) c = c * power(g[a], beta[a]);
  }
  return c;
}

}  // namespace

ExactAmbientPoint act_torus(const WeightSystem& w, std::span<const ExactComplex> g, const ExactAmbientPoint& p) {
  check_size(w, p.size());
  if (g.size() != w.rank()) throw DimensionMismatch("group element length differs from torus rank");
  ExactAmbientPoint out = p;
  for (std::size_t i = 0; i < p.size(); ++i) out.coords[i] = character_value(w.weight(i), g) * p.coords[i];
  return out;
}

ExactCotangentPoint act_torus(const WeightSystem& w, std::span<const ExactComplex> g,
                              const ExactCotangentPoint& p) {
  check_size(w, p.x.size());
  check_size(w, p.z.size());
  if (g.size() != w.rank()) throw DimensionMismatch("group element length differs from torus rank");
  ExactCotangentPoint out = p;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const ExactComplex chi = character_value(w.weight(i), g);
    out.x[i] = chi * p.x[i];
    out.z[i] = chi.inverse() * p.z[i];
  }
  return out;
}

std::vector<ExactComplex> one_parameter_element(std::span<const Rational> integral_xi, const Rational& s) {
  if (s == 0) throw PreconditionError("one-parameter element needs s != 0");
  std::vector<ExactComplex> g;
  g.reserve(integral_xi.size());
  for (const auto& xa : integral_xi) {
    if (denominator(xa) != 1) throw PreconditionError("one-parameter element needs an integral cocharacter");
    g.push_back(power(ExactComplex{s, 0}, numerator(xa).convert_to<long long>()));
  }
  return g;
}

IndexSet support(const AmbientPoint& p, double threshold) {
  IndexSet s;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (std::abs(p.coords[i]) >= threshold) s.push_back(i);
  }
  return s;
}

IndexSet support(const ExactAmbientPoint& p) {
  IndexSet s;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (!p.coords[i].is_zero()) s.push_back(i);
  }
  return s;
}

CotangentSupport support(const CotangentPoint& p, double threshold) {
  return {support(AmbientPoint{p.x}, threshold), support(AmbientPoint{p.z}, threshold)};
}

CotangentSupport support(const ExactCotangentPoint& p) {
  return {support(ExactAmbientPoint{p.x}), support(ExactAmbientPoint{p.z})};
}

IndexSet doubled_support(const CotangentSupport& s, std::size_t n) {
  IndexSet out = s.x;
  for (auto i : s.z) out.push_back(i + n);
  return out;
}

}  // namespace hkq
