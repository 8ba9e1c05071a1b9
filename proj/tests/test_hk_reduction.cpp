#include <doctest.h>

#include <numbers>

#include "hkq/hk_reduction.hpp"
#include "hkq/kempf_ness.hpp"
#include "hkq/moment_maps.hpp"
#include "hkq/strata.hpp"
#include "support.hpp"

using namespace hkq;
using namespace hkq::testing;

namespace {

WeightSystem diagonal(std::size_t n) {
  return WeightSystem(1, std::vector<Weight>(n, Weight{1}), {Rational(1, 2)});
}

std::vector<Complex> random_unit(Rng& rng, std::size_t n) {
  std::vector<Complex> x(n);
  double r2 = 0;
  for (auto& c : x) {
    c = random_complex(rng);
    r2 += std::norm(c);
  }
  for (auto& c : x) c /= std::sqrt(r2);
  return x;
}

std::vector<Complex> random_vector(Rng& rng, std::size_t n) {
  std::vector<Complex> u(n);
  for (auto& c : u) c = Complex(uniform_real(rng, -1, 1), uniform_real(rng, -1, 1));
  return u;
}

// Solver-produced moment-zero point on T*(Hirzebruch), generic supports.
std::optional<CotangentPoint> hirzebruch_zero(long long n, Rng& rng) {
  const WeightSystem w = hirzebruch_weights(n, 1, 1);
  const CotangentPoint start = random_hol_zero_point(w, rng);
  const KNHyperkahlerOutcome out = solve_hyperkahler(w, start);
  if (out.kahler.status != KNStatus::converged) return std::nullopt;
  return out.representative;
}

Eigen::VectorXd transport(const WeightSystem& w, const std::vector<double>& phi, const Eigen::VectorXd& v) {
  return real_form(act_compact(w, phi, from_real_form(v)));
}

}  // namespace

TEST_CASE("frame dimensions") {
  SUBCASE("diagonal C^2") {
    const ReducedFrame f = horizontal_frame(diagonal(2), CotangentPoint{{1, 0}, {0, 0}});
    CHECK(f.ambient_dim() == 8);
    CHECK(f.dimension() == 4);
    CHECK(f.gauge_basis().cols() == 4);
  }
  SUBCASE("Hirzebruch moment-zero points") {
    Rng rng(11);
    for (long long n : {1, 2, 3}) {
      auto p = hirzebruch_zero(n, rng);
      REQUIRE(p);
      const ReducedFrame f = horizontal_frame(hirzebruch_weights(n, 1, 1), *p);
      CHECK(f.dimension() == 8);
      CHECK((f.gauge_basis().transpose() * f.horizontal_basis()).cwiseAbs().maxCoeff() < 1e-10);
    }
  }
  SUBCASE("no group") {
    Rng rng(2);
    const CotangentPoint p{{random_complex(rng), random_complex(rng)}, {random_complex(rng), 0}};
    const ReducedFrame f(p, Eigen::MatrixXd());
    CHECK(f.dimension() == 8);
    CHECK(quaternion_check(f) == 0.0);
  }
}

TEST_CASE("frame preconditions") {
  CHECK_THROWS_AS(horizontal_frame(diagonal(2), CotangentPoint{{2, 0}, {0, 0}}), PreconditionError);
  // the second circle fixes (1, 0 | 0)
  const WeightSystem w(2, {Weight{1, 0}, Weight{0, 1}}, {Rational(1, 2), Rational(0)});
  CHECK_THROWS_AS(horizontal_frame(w, CotangentPoint{{1, 0}, {0, 0}}), PreconditionError);
  CHECK_THROWS_AS(horizontal_frame(diagonal(2), CotangentPoint{{1}, {0}}), DimensionMismatch);
}

TEST_CASE("reduced metric matches Fubini-Study on the zero section of C^2") {
  Rng rng(5);
  const WeightSystem w = diagonal(2);
  for (int t = 0; t < 20; ++t) {
    const std::vector<Complex> x = random_unit(rng, 2);
    const ReducedFrame f = horizontal_frame(w, CotangentPoint{x, {0, 0}});
    const auto u = random_vector(rng, 2), v = random_vector(rng, 2);
    const Eigen::VectorXd pu = f.project(embed_base_tangent(u)), pv = f.project(embed_base_tangent(v));
    const Complex h = fubini_study(x, u, v);
    CHECK(std::abs(reduced_metric(f, pu, pv) - h.real()) < 1e-10);
    CHECK(std::abs(reduced_form(f, Quaternion::I, pu, pv) - h.imag()) < 1e-10);
    CHECK(quaternion_check(f) < 1e-10);
  }
}

TEST_CASE("zero-section check against the Kahler quotient of V") {
  Rng rng(8);
  SUBCASE("diagonal circle, independent Fubini-Study") {
    for (std::size_t n : {2u, 3u}) {
      const WeightSystem w = diagonal(n);
      for (int t = 0; t < 10; ++t) {
        const std::vector<Complex> x = random_unit(rng, n);
        const ZeroSectionReport r = zero_section_check(w, AmbientPoint{x});
        CHECK(r.kahler_quotient_dim == static_cast<Eigen::Index>(2 * n - 2));
        CHECK(r.metric_discrepancy < 1e-8);
        CHECK(r.form_discrepancy < 1e-8);
        CHECK(r.horizontality_residual < 1e-8);
      }
    }
  }
  SUBCASE("product of two diagonal systems is block diagonal") {
    const WeightSystem w(2, {Weight{1, 0}, Weight{1, 0}, Weight{0, 1}, Weight{0, 1}}, {Rational(1, 2), Rational(1, 2)});
    for (int t = 0; t < 5; ++t) {
      const auto a = random_unit(rng, 2), b = random_unit(rng, 2);
      const std::vector<Complex> x{a[0], a[1], b[0], b[1]};
      const ReducedFrame f = horizontal_frame(w, CotangentPoint{x, std::vector<Complex>(4)});
      const auto u = random_vector(rng, 4), v = random_vector(rng, 4);
      const std::vector<Complex> u1{u[0], u[1], 0, 0}, v2{0, 0, v[2], v[3]};
      const Eigen::VectorXd pu = f.project(embed_base_tangent(u1)), pv = f.project(embed_base_tangent(v2));
      CHECK(std::abs(reduced_metric(f, pu, pv)) < 1e-10);
      CHECK(std::abs(reduced_form(f, Quaternion::I, pu, pv)) < 1e-10);
      CHECK(zero_section_check(w, AmbientPoint{x}).metric_discrepancy < 1e-8);
    }
  }
  SUBCASE("Hirzebruch zero section") {
    const WeightSystem w = hirzebruch_weights(2, 1, 1);
    for (int t = 0; t < 5; ++t) {
      AmbientPoint v{{random_complex(rng), random_complex(rng), random_complex(rng), random_complex(rng)}};
      const KNOutcome out = solve_kahler(w, v);
      REQUIRE(out.status == KNStatus::converged);
      const ZeroSectionReport r = zero_section_check(w, out.representative);
      CHECK(r.kahler_quotient_dim == 4);
      CHECK(r.metric_discrepancy < 1e-8);
      CHECK(r.form_discrepancy < 1e-8);
    }
  }
  CHECK_THROWS_AS(zero_section_check(diagonal(2), AmbientPoint{{2, 0}}), PreconditionError);
}

TEST_CASE("reduced forms on Hirzebruch frames") {
  Rng rng(21);
  int tested = 0;
  for (int t = 0; t < 50; ++t) {
    const long long n = 1 + t % 3;
    auto p = hirzebruch_zero(n, rng);
    if (!p) continue;
    ++tested;
    const WeightSystem w = hirzebruch_weights(n, 1, 1);
    const ReducedFrame f = horizontal_frame(w, *p);
    CHECK(f.dimension() == 8);
    CHECK(quaternion_check(f) < 1e-9);

    const Eigen::MatrixXd g = f.metric_gram();
    CHECK((g - g.transpose()).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(g).eigenvalues().minCoeff() > 1e-10);

    const Eigen::VectorXd u = f.horizontal_basis() * Eigen::VectorXd::Random(8);
    const Eigen::VectorXd v = f.horizontal_basis() * Eigen::VectorXd::Random(8);
    CHECK(reduced_metric(f, u, u) > 0);
    for (Quaternion a : {Quaternion::I, Quaternion::J, Quaternion::K}) {
      const Eigen::MatrixXd om = f.form_gram(a);
      CHECK((om + om.transpose()).cwiseAbs().maxCoeff() < 1e-9);
      CHECK(std::abs(reduced_form(f, a, u, u)) < 1e-9);
      CHECK(std::abs(reduced_form(f, a, u, v) + reduced_form(f, a, v, u)) < 1e-9);
      const Eigen::VectorXd au = f.project(apply_quaternion(a, u)), av = f.project(apply_quaternion(a, v));
      CHECK(std::abs(reduced_form(f, a, au, av) - reduced_form(f, a, u, v)) < 1e-9);
    }
    // gauge directions are rejected
    CHECK_THROWS_AS(reduced_metric(f, f.gauge_basis().col(0), u), PreconditionError);
    CHECK_THROWS_AS(reduced_form(f, Quaternion::J, u, f.gauge_basis().col(3)), PreconditionError);
  }
  CHECK(tested >= 45);
}

TEST_CASE("gauge invariance of the reduced metric") {
  Rng rng(31);
  for (long long n : {1, 2, 3}) {
    const WeightSystem w = hirzebruch_weights(n, 1, 1);
    auto p = hirzebruch_zero(n, rng);
    REQUIRE(p);
    const ReducedFrame f = horizontal_frame(w, *p);
    const std::vector<double> phi{uniform_real(rng, 0, 6), uniform_real(rng, 0, 6)};
    const ReducedFrame moved = horizontal_frame(w, act_compact(w, phi, *p));
    Eigen::MatrixXd carried(f.horizontal_basis().rows(), f.dimension());
    for (Eigen::Index j = 0; j < f.dimension(); ++j) {
      carried.col(j) = transport(w, phi, f.horizontal_basis().col(j));
      CHECK(moved.horizontal_residual(carried.col(j)) < 1e-9);
    }
    CHECK((carried.transpose() * carried - f.metric_gram()).cwiseAbs().maxCoeff() < 1e-9);
    for (Quaternion a : {Quaternion::I, Quaternion::J, Quaternion::K}) {
      Eigen::MatrixXd om(f.dimension(), f.dimension());
      for (Eigen::Index i = 0; i < f.dimension(); ++i) {
        for (Eigen::Index j = 0; j < f.dimension(); ++j) {
          om(i, j) = reduced_form(moved, a, carried.col(i), carried.col(j));
        }
      }
      CHECK((om - f.form_gram(a)).cwiseAbs().maxCoeff() < 1e-9);
    }
  }
}

TEST_CASE("psi is constant on compact orbits") {
  Rng rng(4);
  const WeightSystem w = hirzebruch_weights(3, 1, 1);
  // unit-modulus rational phases
  const std::vector<ExactComplex> g{ExactComplex{Rational(3, 5), Rational(4, 5)},
                                    ExactComplex{Rational(-5, 13), Rational(12, 13)}};
  for (int t = 0; t < 20; ++t) {
    ExactCotangentPoint p{std::vector<ExactComplex>(4), std::vector<ExactComplex>(4)};
    for (auto& c : p.x) c = random_exact_complex(rng);
    for (auto& c : p.z) c = random_exact_complex(rng);
    CHECK(psi_exact(act_torus(w, g, p)) == psi_exact(p));
  }
}

TEST_CASE("ambient potential identity") {
  Rng rng(13);
  for (Eigen::Index n : {1, 2}) {
    Eigen::MatrixXd pts = Eigen::MatrixXd::Random(4 * n, 6);
    CHECK(ambient_potential_check(pts, 1e-4) < 1e-5);
    CHECK(ambient_potential_check(pts, 1e-2) < 1e-9);
    const double control = ambient_potential_check(pts, 1e-2, PotentialStructure::I);
    MESSAGE("I-structure control error " << control);
    CHECK(control > 0.5);
  }
  CHECK_THROWS_AS(ambient_potential_check(Eigen::MatrixXd::Zero(3, 1), 1e-3), DimensionMismatch);
}

TEST_CASE("fiber rotation") {
  Rng rng(17);
  const double pi = std::numbers::pi;
  SUBCASE("identity and sign flip on C^2") {
    const WeightSystem w = diagonal(2);
    const ReducedFrame f = horizontal_frame(w, CotangentPoint{random_unit(rng, 2), {0, 0}});
    const CircleActionReport id = circle_action_check(w, f, 1.0);
    CHECK(id.moment_I_deviation == 0.0);
    CHECK(id.holomorphic_scaling_deviation == 0.0);
    CHECK(id.omega_scaling_deviation == 0.0);
    CHECK(id.transport_residual < 1e-12);
    const CircleActionReport flip = circle_action_check(w, f, -1.0);
    CHECK(flip.omega_scaling_deviation < 1e-8);
    CHECK(flip.transport_residual < 1e-8);
  }
  SUBCASE("Hirzebruch points") {
    for (long long n : {1, 2, 3}) {
      const WeightSystem w = hirzebruch_weights(n, 1, 1);
      auto p = hirzebruch_zero(n, rng);
      REQUIRE(p);
      const ReducedFrame f = horizontal_frame(w, *p);
      for (Complex lambda : {Complex(1, 0), Complex(-1, 0), Complex(0, 1), std::polar(1.0, pi / 4)}) {
        const CircleActionReport r = circle_action_check(w, f, lambda);
        CHECK(r.moment_I_deviation < 1e-10);
        CHECK(r.holomorphic_scaling_deviation < 1e-10);
        CHECK(r.omega_scaling_deviation < 1e-8);
        CHECK(r.transport_residual < 1e-8);
      }
    }
  }
  SUBCASE("rotation is unitary on the fiber") {
    const Eigen::VectorXd v = Eigen::VectorXd::Random(12);
    const Eigen::VectorXd r = rotate_fiber(v, std::polar(1.0, 0.7));
    CHECK(r.head(6) == v.head(6));
    CHECK(r.norm() == doctest::Approx(v.norm()).epsilon(1e-14));
  }
  const WeightSystem w = diagonal(2);
  const ReducedFrame f = horizontal_frame(w, CotangentPoint{{1, 0}, {0, 0}});
  CHECK_THROWS_AS(circle_action_check(w, f, 2.0), PreconditionError);
}
