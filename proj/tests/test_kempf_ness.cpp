#include <doctest.h>

#include "hkq/kempf_ness.hpp"
#include "hkq/moment_maps.hpp"
#include "hkq/strata.hpp"
#include "support.hpp"

using namespace hkq;
using namespace hkq::testing;

namespace {

AmbientPoint random_numeric_point(Rng& rng, const WeightSystem& w, double keep = 0.7) {
  AmbientPoint v{std::vector<Complex>(w.size())};
  for (auto& c : v.coords) {
    if (uniform_real(rng, 0, 1) < keep) c = random_complex(rng);
  }
  return v;
}

Eigen::VectorXd random_xi(Rng& rng, std::size_t k, double r = 1.0) {
  Eigen::VectorXd xi(static_cast<Eigen::Index>(k));
  for (auto& e : xi) e = uniform_real(rng, -r, r);
  return xi;
}

bool certificate_destabilizes(const WeightSystem& w, const IndexSet& s, const Cocharacter& c) {
  const MuWeight mw = mu_weight(w, s, c.exact_value());
  return !mw.infinite && mw.value < 0;
}

}  // namespace

TEST_CASE("Kempf-Ness function values") {
  const WeightSystem w(1, {{1}}, {Rational(1, 2)});
  const AmbientPoint v{{Complex(2, 0)}};
  Eigen::VectorXd xi(1);
  xi << std::log(2.0);
  CHECK(kn_value(w, v, xi) == doctest::Approx(0.25 + 0.5 * std::log(2.0)).epsilon(1e-15));
  const AmbientPoint origin{{Complex(0, 0)}};
  xi << -3.0;
  CHECK(kn_value(w, origin, xi) == doctest::Approx(-1.5));
  xi << -1000.0;
  CHECK(std::isinf(kn_value(w, v, xi)));
}

TEST_CASE("Kempf-Ness function: convexity, gradient and Hessian") {
  Rng rng(1);
  for (int t = 0; t < 40; ++t) {
    const WeightSystem w = random_weights(rng);
    const AmbientPoint v = random_numeric_point(rng, w);
    const std::size_t k = w.rank();
    for (int s = 0; s < 20; ++s) {
      const Eigen::VectorXd a = random_xi(rng, k), b = random_xi(rng, k);
      CHECK(kn_value(w, v, (a + b) / 2) <= (kn_value(w, v, a) + kn_value(w, v, b)) / 2 + 1e-12);
      const double min_eig =
          Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(kn_hessian(w, v, a)).eigenvalues().minCoeff();
      CHECK(min_eig >= -1e-10);
    }
    // the gradient is the moment map of the moved point
    const Eigen::VectorXd xi = random_xi(rng, k);
    const Eigen::VectorXd g = kn_gradient(w, v, xi);
    const auto moved = act_imaginary(w, Cocharacter::numeric(std::vector<double>(xi.data(), xi.data() + xi.size())), 1.0, v);
    const auto m = mu(w, moved).value;
    for (std::size_t a = 0; a < k; ++a) {
      Eigen::VectorXd e = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(k));
      e[static_cast<Eigen::Index>(a)] = 1e-5;
      const double fd = (kn_value(w, v, xi + e) - kn_value(w, v, xi - e)) / 2e-5;
      CHECK(std::abs(fd - g[static_cast<Eigen::Index>(a)]) < 1e-6 * (1 + std::abs(fd)));
      CHECK(g[static_cast<Eigen::Index>(a)] == doctest::Approx(m[a]).epsilon(1e-12));
    }
  }
}

TEST_CASE("scalar Kempf-Ness solve") {
  const WeightSystem w(1, {{1}}, {Rational(1, 2)});
  const KNOutcome out = solve_kahler(w, AmbientPoint{{Complex(2, 0)}});
  REQUIRE(out.status == KNStatus::converged);
  CHECK(out.xi_star[0] == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK(out.residual < 1e-10);
  CHECK(std::abs(out.representative.coords[0]) == doctest::Approx(1.0).epsilon(1e-12));

  const KNOutcome fixed = solve_kahler(w, AmbientPoint{{Complex(0, 1)}});
  REQUIRE(fixed.status == KNStatus::converged);
  CHECK(fixed.xi_star.norm() < 1e-12);
  CHECK(fixed.iterations == 0);
}

TEST_CASE("unstable Hirzebruch point diverges with a certificate") {
  const WeightSystem h = hirzebruch_weights(1, 1, 1);
  const KNOutcome out = solve_kahler(h, AmbientPoint{{Complex(1, 0), Complex(1, 0), 0, 0}});
  CHECK(out.status == KNStatus::diverged);
  REQUIRE(out.certificate);
  CHECK(certificate_destabilizes(h, {0, 1}, *out.certificate));
  CHECK_THROWS_AS(solve_kahler(h, AmbientPoint{{Complex(1, 0)}}), DimensionMismatch);
}

TEST_CASE("instability certificates") {
  const WeightSystem h = hirzebruch_weights(1, 1, 1);
  auto exact = [](std::initializer_list<int> c) {
    ExactAmbientPoint p;
    for (int e : c) p.coords.emplace_back(e);
    return p;
  };
  const Cocharacter a = instability_certificate(h, exact({1, 1, 0, 0}));
  CHECK(mu_weight(h, exact({1, 1, 0, 0}), a).value < 0);
  CHECK(instability_certificate(h, exact({0, 0, 0, 1})).exact_value() == std::vector<Rational>{-1, -1});
  CHECK(instability_certificate(h, exact({0, 0, 0, 0})).exact_value() == std::vector<Rational>{-1, -1});
  CHECK_THROWS_AS(instability_certificate(h, exact({1, 0, 1, 0})), PreconditionError);

  const WeightSystem w(1, {{1}, {-1}}, {0});
  const Cocharacter s = instability_certificate(w, exact({1, 0}));
  CHECK(mu_weight(w, exact({1, 0}), s).value == 0);
}

TEST_CASE("hyperkahler solve") {
  const WeightSystem w(1, {{1}, {1}}, {Rational(1, 2)});
  const KNHyperkahlerOutcome zs = solve_hyperkahler(w, CotangentPoint{{Complex(0.6, 0), Complex(0, 0.8)}, {0, 0}});
  REQUIRE(zs.kahler.status == KNStatus::converged);
  CHECK(zs.kahler.xi_star.norm() < 1e-12);

  Rng rng(2);
  for (long long n : {1, 2, 3}) {
    const WeightSystem h = hirzebruch_weights(n, 2, 3);
    const CotangentPoint slice{{0, 0, Complex(1, 0), 0}, {random_complex(rng), random_complex(rng), 0, Complex(1, 0)}};
    const KNHyperkahlerOutcome out = solve_hyperkahler(h, slice);
    REQUIRE(out.kahler.status == KNStatus::converged);
    CHECK(out.hyperkahler_residual < 1e-9);
    CHECK(support(out.representative) == support(slice));
  }
  const CotangentPoint bad{{Complex(1, 0), 0, 0, 0}, {Complex(1, 0), 0, 0, 0}};
  CHECK_THROWS_AS(solve_hyperkahler(hirzebruch_weights(1, 1, 1), bad), PreconditionError);
}

TEST_CASE("Kempf-Ness outcome agrees with exact stability on random instances") {
  Rng rng(3);
  int converged = 0, diverged = 0, undecided = 0;
  for (int t = 0; t < 200; ++t) {
    const WeightSystem w = random_weights(rng);
    const AmbientPoint v = random_numeric_point(rng, w);
    const IndexSet s = support(v);
    const Stability status = classify_support(w, s).status;
    const bool polystable = polystable_support(w, s);
    try {
      const KNOutcome out = solve_kahler(w, v);
      if (out.status == KNStatus::converged) {
        ++converged;
        CHECK(polystable);
        CHECK(out.residual < 1e-10);
        CHECK(mu(w, out.representative).norm() < 1e-10);
        const auto expected = act_imaginary(
            w, Cocharacter::numeric(std::vector<double>(out.xi_star.data(), out.xi_star.data() + out.xi_star.size())),
            1.0, v);
        for (std::size_t i = 0; i < v.size(); ++i) {
          CHECK(std::abs(expected.coords[i] - out.representative.coords[i]) < 1e-9 * (1 + std::abs(expected.coords[i])));
        }
        // the gradient vanishes at the minimizer (finite differences)
        for (Eigen::Index a = 0; a < out.xi_star.size(); ++a) {
          Eigen::VectorXd e = Eigen::VectorXd::Zero(out.xi_star.size());
          e[a] = 1e-5;
          const double fd = (kn_value(w, v, out.xi_star + e) - kn_value(w, v, out.xi_star - e)) / 2e-5;
          CHECK(std::abs(fd) < 1e-6);
        }
      } else {
        ++diverged;
        CHECK(status == Stability::unstable);
        REQUIRE(out.certificate);
        CHECK(certificate_destabilizes(w, s, *out.certificate));
      }
    } catch (const UndecidedError&) {
      ++undecided;
      CHECK(status == Stability::strictly_semistable);
      CHECK_FALSE(polystable);
    }
    if (status == Stability::unstable) CHECK_FALSE(polystable);
  }
  CHECK(converged > 40);
  CHECK(diverged > 40);
  MESSAGE("converged " << converged << ", diverged " << diverged << ", undecided " << undecided);
}

TEST_CASE("representatives are unique up to the compact torus") {
  Rng rng(4);
  int checked = 0;
  for (int t = 0; t < 60; ++t) {
    const WeightSystem w = random_weights(rng);
    const AmbientPoint v = random_numeric_point(rng, w, 0.9);
    if (!polystable_support(w, support(v))) continue;
    KNOptions a, b;
    a.initial_xi = random_xi(rng, w.rank(), 2.0);
    b.initial_xi = random_xi(rng, w.rank(), 2.0);
    const KNOutcome ra = solve_kahler(w, v, a), rb = solve_kahler(w, v, b);
    REQUIRE(ra.status == KNStatus::converged);
    REQUIRE(rb.status == KNStatus::converged);
    for (std::size_t i = 0; i < v.size(); ++i) {
      CHECK(std::abs(std::abs(ra.representative.coords[i]) - std::abs(rb.representative.coords[i])) < 1e-8);
    }
    ++checked;
  }
  CHECK(checked > 15);
}
