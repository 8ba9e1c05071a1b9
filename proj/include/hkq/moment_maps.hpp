#pragma once

// Moment maps of the linear torus action on V and on X = T*V, the circle
// moment map psi, J-weights, and monotone flow traces along imaginary
// one-parameter subgroups.
//
// Sign convention: <mu(v), e_a> = -1/2 sum_i beta^i_a |v_i|^2 + theta_a.

#include <limits>
#include <span>
#include <string>
#include <vector>

#include "hkq/rep_core.hpp"

namespace hkq {

enum class MomentKind { kahler, holomorphic, hyperkahler, circle };
std::string to_string(MomentKind kind);

struct MomentValue {
  MomentKind kind = MomentKind::kahler;
  /// kahler: k entries; holomorphic: k complex entries stored (re, im)
  /// interleaved; hyperkahler: (mu_I, Re M, Im M), 3k entries; circle: 1 entry.
  std::vector<double> value;

  double norm() const;
};

MomentValue mu(const WeightSystem& w, const AmbientPoint& v);
std::vector<Rational> mu_exact(const WeightSystem& w, const ExactAmbientPoint& v);

/// <M(x,z), e_a> = sqrt(-1) sum_i beta^i_a x_i z_i.
MomentValue hol_moment(const WeightSystem& w, const CotangentPoint& p);
std::vector<ExactComplex> hol_moment_exact(const WeightSystem& w, const ExactCotangentPoint& p);

/// mu_I(x,z) = -1/2 sum beta^i (|x_i|^2 - |z_i|^2) + theta, followed by Re M, Im M.
MomentValue mu_hyperkahler(const WeightSystem& w, const CotangentPoint& p);

/// psi(x, z) = -1/2 ||z||^2.
double psi(const CotangentPoint& p);
Rational psi_exact(const ExactCotangentPoint& p);

enum class JWeight { zero, infinite };

/// mu-weight for the complex structure J: zero iff for every i,
/// beta^i(xi) = 0 or x_i = sgn(beta^i(xi)) sqrt(-1) conj(z_i).
JWeight j_mu_weight(const WeightSystem& w, const ExactCotangentPoint& p, const std::vector<Rational>& xi);
JWeight j_mu_weight(const WeightSystem& w, const CotangentPoint& p, const std::vector<Rational>& xi,
                    double tolerance = 1e-10);

struct FlowTraceOptions {
  double horizon = 30.0;
  double divergence_threshold = 1e6;
};

struct FlowTrace {
  std::vector<double> t;
  std::vector<double> values;  // +inf once the threshold or an overflow is hit
  bool tail_infinite = false;
  double tail = 0.0;  // last finite sample when !tail_infinite
};

/// Samples t -> <mu(exp(sqrt(-1) t xi) v), xi> on the grid points up to the horizon.
FlowTrace flow_trace(const WeightSystem& w, const AmbientPoint& v, std::span<const double> xi,
                     std::span<const double> t_grid, const FlowTraceOptions& options = {});

/// CSV "t,value" lines with a header.
std::string flow_trace_csv(const FlowTrace& trace);

}  // namespace hkq
