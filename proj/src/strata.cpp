#include "hkq/strata.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <thread>

#include "hkq/exact_lp.hpp"
#include "hkq/kempf_ness.hpp"
#include "hkq/moment_maps.hpp"

namespace hkq {
namespace {

lp::RationalMatrix weight_columns(const WeightSystem& w, const IndexSet& s) {
  lp::RationalMatrix m(w.rank(), std::vector<Rational>(s.size()));
  for (std::size_t a = 0; a < w.rank(); ++a) {
    for (std::size_t j = 0; j < s.size(); ++j) m[a][j] = w.weight(s[j])[a];
  }
  return m;
}

std::string format_set(const IndexSet& s, const std::vector<std::string>& names = {}) {
  std::string out = "{";
  for (std::size_t j = 0; j < s.size(); ++j) {
    if (j) out += ",";
    out += s[j] < names.size() ? names[s[j]] : std::to_string(s[j]);
  }
  return out + "}";
}

std::string format_sets(const std::vector<IndexSet>& sets, const std::vector<std::string>& names = {}) {
  std::string out = "[";
  for (std::size_t j = 0; j < sets.size(); ++j) {
    if (j) out += " ";
    out += format_set(sets[j], names);
  }
  return out + "]";
}

}  // namespace

std::string to_string(CertificationStatus s) {
  switch (s) {
    case CertificationStatus::certified:
      return "certified";
    case CertificationStatus::candidate:
      return "candidate";
    case CertificationStatus::refuted:
      return "refuted";
  }
  return "unknown";
}

bool holomorphic_consistent(const WeightSystem& w, const IndexSet& overlap) {
  if (overlap.empty()) return true;
  const std::size_t r = lp::rank(weight_columns(w, overlap));
  for (std::size_t j = 0; j < overlap.size(); ++j) {
    IndexSet rest = overlap;
    rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(j));
    if (lp::rank(weight_columns(w, rest)) != r) return false;
  }
  return true;
}

std::vector<HKStratumCandidate> hk_candidate_strata(const WeightSystem& w, std::size_t bound, unsigned threads) {
  const std::size_t n = w.size();
  if (n > bound || n > 20) {
    throw EnumerationBoundExceeded("hyperkahler strata enumeration over " + std::to_string(n) +
                                   " coordinates exceeds the bound " + std::to_string(bound));
  }
  const WeightSystem doubled = doubled_weights(w);
  std::vector<std::uint64_t> unstable;
  for (const auto& s : unstable_maximal_supports(doubled, 2 * n)) unstable.push_back(to_mask(s));

  const std::uint64_t count = std::uint64_t{1} << n;
  std::vector<char> consistent(count);
  for (std::uint64_t t = 0; t < count; ++t) consistent[t] = holomorphic_consistent(w, from_mask(t)) ? 1 : 0;

  // Pairs are scanned in blocks of S_x; blocks are merged in order so the
  // result does not depend on the thread count.
  threads = std::max(1u, threads);
  std::vector<std::vector<std::pair<std::uint64_t, std::uint64_t>>> found(threads);
  auto scan = [&](unsigned worker) {
    for (std::uint64_t mx = worker; mx < count; mx += threads) {
      for (std::uint64_t mz = 0; mz < count; ++mz) {
        if (!consistent[mx & mz]) continue;
        const std::uint64_t joint = mx | (mz << n);
        const bool is_unstable =
            std::any_of(unstable.begin(), unstable.end(), [joint](std::uint64_t u) { return (joint & ~u) == 0; });
        if (!is_unstable) found[worker].emplace_back(mx, mz);
      }
    }
  };
  if (threads == 1) {
    scan(0);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(scan, t);
  }

  std::map<std::uint64_t, StabilizerInfo> stab_cache;
  std::vector<HKStratumCandidate> out;
  for (const auto& block : found) {
    for (auto [mx, mz] : block) {
      const std::uint64_t joint = mx | mz;
      auto it = stab_cache.find(joint);
      if (it == stab_cache.end()) it = stab_cache.emplace(joint, stabilizer(w, from_mask(joint))).first;
      HKStratumCandidate c;
      c.support_x = from_mask(mx);
      c.support_z = from_mask(mz);
      c.stabilizer = it->second;
      out.push_back(std::move(c));
    }
  }
  std::sort(out.begin(), out.end(), [](const HKStratumCandidate& a, const HKStratumCandidate& b) {
    if (a.stabilizer != b.stabilizer) return a.stabilizer < b.stabilizer;
    if (a.support_x != b.support_x) return lex_less(a.support_x, b.support_x);
    return lex_less(a.support_z, b.support_z);
  });
  return out;
}

HKStratumCandidate certify_stratum(const WeightSystem& w, HKStratumCandidate candidate,
                                   const CertifyOptions& options) {
  const std::size_t n = w.size();
  std::mt19937_64 rng(options.seed);
  std::uniform_real_distribution<double> modulus(0.5, 2.0);
  std::uniform_real_distribution<double> angle(0.0, 2 * std::numbers::pi);
  std::normal_distribution<double> gauss(0.0, 1.0);
  auto random_complex = [&] { return std::polar(modulus(rng), angle(rng)); };

  IndexSet overlap;
  std::set_intersection(candidate.support_x.begin(), candidate.support_x.end(), candidate.support_z.begin(),
                        candidate.support_z.end(), std::back_inserter(overlap));
  std::vector<std::vector<double>> kernel;
  for (const auto& v : lp::nullspace(weight_columns(w, overlap), overlap.size())) {
    std::vector<double> d;
    for (const auto& x : v) d.push_back(to_double(x));
    kernel.push_back(std::move(d));
  }
  if (!overlap.empty() && kernel.empty()) {
    candidate.log.push_back("no complex relation on the overlap; M = 0 forces smaller supports");
    return candidate;
  }

  std::size_t diverged = 0, undecided = 0, rejected = 0;
  for (std::size_t attempt = 0; attempt < options.attempts; ++attempt) {
    // products x_i z_i on the overlap: a generic complex kernel vector
    std::vector<Complex> products(overlap.size());
    for (const auto& kv : kernel) {
      const Complex c(gauss(rng), gauss(rng));
      for (std::size_t j = 0; j < overlap.size(); ++j) products[j] += c * kv[j];
    }
    if (std::any_of(products.begin(), products.end(), [](Complex c) { return std::abs(c) < 1e-3; })) {
      ++rejected;
      continue;
    }
    CotangentPoint p{std::vector<Complex>(n), std::vector<Complex>(n)};
    for (auto i : candidate.support_x) p.x[i] = random_complex();
    for (auto i : candidate.support_z) p.z[i] = random_complex();
    for (std::size_t j = 0; j < overlap.size(); ++j) p.z[overlap[j]] = products[j] / p.x[overlap[j]];

    try {
      const KNHyperkahlerOutcome outcome = solve_hyperkahler(w, p);
      if (outcome.kahler.status != KNStatus::converged) {
        ++diverged;
        continue;
      }
      const CotangentSupport s = support(outcome.representative);
      if (outcome.hyperkahler_residual < 1e-9 && s.x == candidate.support_x && s.z == candidate.support_z) {
        candidate.status = CertificationStatus::certified;
        candidate.witness = outcome.representative;
        candidate.log.push_back("witness found on attempt " + std::to_string(attempt + 1));
        return candidate;
      }
      ++rejected;
    } catch (const UndecidedError&) {
      ++undecided;
    } catch (const PreconditionError&) {
      ++rejected;
    }
  }
  candidate.log.push_back("no witness after " + std::to_string(options.attempts) + " seeds: " +
                          std::to_string(diverged) + " diverged, " + std::to_string(undecided) + " undecided, " +
                          std::to_string(rejected) + " rejected");
  return candidate;
}

WeightSystem hirzebruch_weights(long long n, const Rational& c0, const Rational& c1) {
  return WeightSystem(2, {{1, 0}, {1, 0}, {0, 1}, {-n, 1}}, {c0 / 2, c1 / 2});
}

bool HirzebruchReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const SuiteCheck& c) { return c.passed; });
}

namespace {

const std::vector<std::string> kAmbientNames = {"x0", "x1", "y0", "y1"};
const std::vector<std::string> kDoubledNames = {"x0", "x1", "y0", "y1", "z0", "z1", "w0", "w1"};

// A point of the slice {y0 = w1 = 1} with z_j = r_j exp(2 pi i q_j), phases kept exact in Q/Z.
struct SlicePoint {
  std::vector<double> moduli;   // 8 doubled coordinates
  std::vector<Rational> phases; // mod 1
};

Rational mod_one(const Rational& q) {
  Rational r = q - Rational(BigInt(numerator(q) / denominator(q)));
  if (r < 0) r += 1;
  return r;
}

CotangentPoint to_point(const SlicePoint& s) {
  CotangentPoint p{std::vector<Complex>(4), std::vector<Complex>(4)};
  for (std::size_t i = 0; i < 8; ++i) {
    const Complex c = std::polar(s.moduli[i], 2 * std::numbers::pi * to_double(s.phases[i]));
    (i < 4 ? p.x[i] : p.z[i - 4]) = c;
  }
  return p;
}

// Complex-torus invariants y0 w1 z0^b z1^(n-b), b = 0..n.
std::vector<Complex> slice_invariants(const CotangentPoint& p, long long n) {
  std::vector<Complex> out;
  for (long long b = 0; b <= n; ++b) {
    out.push_back(p.x[2] * p.z[3] * std::pow(p.z[0], static_cast<double>(b)) *
                  std::pow(p.z[1], static_cast<double>(n - b)));
  }
  return out;
}

}  // namespace

HirzebruchReport hirzebruch_suite(long long n, const Rational& c0, const Rational& c1, std::uint64_t seed) {
  if (n < 1) throw PreconditionError("Hirzebruch suite needs n >= 1");
  if (c0 <= 0 || c1 <= 0) throw PreconditionError("Hirzebruch suite needs c0 > 0 and c1 > 0");

  HirzebruchReport report;
  report.n = n;
  report.c0 = c0;
  report.c1 = c1;
  const WeightSystem w = hirzebruch_weights(n, c0, c1);
  const WeightSystem doubled = doubled_weights(w);
  auto add = [&](std::string name, bool ok, std::string detail) {
    while (!detail.empty() && (detail.back() == ' ' || detail.back() == ';')) detail.pop_back();
    report.checks.push_back({std::move(name), ok, std::move(detail)});
  };

  // (a) unstable subspaces of C^4
  {
    const std::vector<IndexSet> expected = {{0, 1}, {2, 3}, {3}};
    const auto got = unstable_maximal_supports(w);
    add("base_unstable_subspaces", got == expected,
        "expected " + format_sets(expected, kAmbientNames) + ", got " + format_sets(got, kAmbientNames));
  }

  // (b) unstable subspaces of T*C^4, and the components of the unstable locus
  {
    std::vector<IndexSet> expected = {{0, 1, 6, 7},    {0, 1, 4, 5, 6, 7}, {2, 3, 4, 5}, {2, 3, 4, 5, 6},
                                      {4, 5, 6, 7},    {3, 4, 5, 6, 7},    {3, 4, 5, 6}};
    std::sort(expected.begin(), expected.end(), lex_less);
    const auto got = unstable_maximal_supports(doubled);
    add("cotangent_unstable_subspaces", got == expected,
        "expected " + format_sets(expected, kDoubledNames) + ", got " + format_sets(got, kDoubledNames));
    const std::vector<IndexSet> components = {{0, 1, 4, 5, 6, 7}, {2, 3, 4, 5, 6}, {3, 4, 5, 6, 7}};
    const auto got_components = unstable_components(doubled);
    add("cotangent_unstable_components", got_components == components,
        "got " + format_sets(got_components, kDoubledNames));
  }

  std::mt19937_64 rng(seed);

  // (c) stable points of C^4 are exactly x != 0 and y != 0
  {
    std::uniform_int_distribution<int> coin(0, 1);
    std::uniform_int_distribution<int> num(-9, 9);
    std::uniform_int_distribution<int> den(1, 7);
    bool ok = true;
    std::string detail = "200 probes";
    for (int probe = 0; probe < 200 && ok; ++probe) {
      ExactAmbientPoint v{std::vector<ExactComplex>(4)};
      for (auto& c : v.coords) {
        if (coin(rng)) {
          do {
            c = ExactComplex{Rational(num(rng), den(rng)), Rational(num(rng), den(rng))};
          } while (c.is_zero());
        }
      }
      const bool x_nonzero = !v.coords[0].is_zero() || !v.coords[1].is_zero();
      const bool y_nonzero = !v.coords[2].is_zero() || !v.coords[3].is_zero();
      const StabilityVerdict verdict = classify_point(w, v);
      const bool stable = verdict.status == Stability::stable;
      if (stable != (x_nonzero && y_nonzero)) {
        ok = false;
        detail = "probe " + std::to_string(probe) + " with support " + format_set(support(v), kAmbientNames) +
                 " classified " + to_string(verdict.status);
      } else if (!stable) {
        const MuWeight mw = mu_weight(w, v, *verdict.certificate);
        if (mw.infinite || mw.value >= 0) {
          ok = false;
          detail = "invalid certificate at probe " + std::to_string(probe);
        }
      }
    }
    add("stable_set", ok, detail);
  }

  // (d) E: T*-semistable points over V-unstable points
  // (e) E intersected with M = 0, read off the candidate strata
  {
    bool ok_e = true;
    std::string detail_e = "256 support pairs";
    for (std::uint64_t mx = 0; mx < 16 && ok_e; ++mx) {
      for (std::uint64_t mz = 0; mz < 16; ++mz) {
        const IndexSet sx = from_mask(mx);
        const IndexSet joint = from_mask(mx | (mz << 4));
        const bool in_e = !semistable_support(w, sx) && semistable_support(doubled, joint);
        const bool expected = (mx & 0b0011) == 0 && (mx & 0b0100) && (mz & 0b1000);
        if (in_e != expected) {
          ok_e = false;
          detail_e = "mismatch at " + format_set(joint, kDoubledNames);
          break;
        }
      }
    }
    add("set_E_pattern", ok_e, detail_e);

    const auto candidates = hk_candidate_strata(w);
    bool ok_z = true;
    std::size_t count = 0;
    std::string detail_z;
    std::map<std::pair<std::uint64_t, std::uint64_t>, const HKStratumCandidate*> in_e;
    for (const auto& c : candidates) {
      if (!semistable_support(w, c.support_x)) in_e[{to_mask(c.support_x), to_mask(c.support_z)}] = &c;
    }
    for (std::uint64_t mx = 0; mx < 16; ++mx) {
      for (std::uint64_t mz = 0; mz < 16; ++mz) {
        const bool expected = mx == 0b0100 && (mz & 0b1000) && !(mz & 0b0100);
        const bool present = in_e.contains({mx, mz});
        if (expected) ++count;
        if (expected != present && ok_z) {
          ok_z = false;
          detail_z = "mismatch at " + format_set(from_mask(mx | (mz << 4)), kDoubledNames);
        }
      }
    }
    if (ok_z) detail_z = std::to_string(count) + " support pairs {y0} x {w1 + subsets of z0,z1}";
    add("E_cap_Z_pattern", ok_z, detail_z);

    // certify the generic E cap Z stratum and the slice-origin stratum
    bool ok_cert = true;
    std::string detail_cert;
    for (const IndexSet& sz : {IndexSet{0, 1, 3}, IndexSet{3}}) {
      auto it = in_e.find({to_mask(IndexSet{2}), to_mask(sz)});
      if (it == in_e.end()) {
        ok_cert = false;
        detail_cert += "missing candidate " + format_set(sz) + "; ";
        continue;
      }
      HKStratumCandidate c = certify_stratum(w, *it->second, {seed, 64});
      const bool certified = c.status == CertificationStatus::certified;
      ok_cert = ok_cert && certified;
      detail_cert += "({y0}," + format_set(sz, {"z0", "z1", "w0", "w1"}) + ") " + to_string(c.status) +
                     " stabilizer order " + c.stabilizer.finite_order().str() + "; ";
      report.certified_strata.push_back(std::move(c));
    }
    add("E_cap_Z_certified", ok_cert, detail_cert);
  }

  // (f) residual stabilizer on the slice support {y0, w1}
  {
    const StabilizerInfo s = stabilizer(doubled, {2, 7});
    report.residual_order = s.finite() ? s.finite_order() : BigInt(0);
    add("residual_stabilizer_order", s.finite() && s.finite_order() == n,
        "order " + report.residual_order.str() + ", expected " + std::to_string(n));
  }

  // (g) slice points z and lambda z lie in one orbit iff lambda^n = 1
  {
    std::uniform_int_distribution<int> phase_num(0, 96);
    SlicePoint base;
    base.moduli = {0, 0, 1, 0, 0.7, 1.3, 0, 1};
    base.phases = std::vector<Rational>(8, Rational(0));
    base.phases[4] = Rational(phase_num(rng), 97);
    base.phases[5] = Rational(phase_num(rng), 97);
    const CotangentPoint p = to_point(base);
    const auto rep_p = solve_hyperkahler(w, p);

    bool ok = rep_p.kahler.status == KNStatus::converged;
    std::string detail;
    const std::vector<Rational> shifts = {Rational(1, n), Rational(n - 1, n), Rational(1, 2 * n),
                                          Rational(1, 3 * n + 1)};
    for (const Rational& q : shifts) {
      SlicePoint moved = base;
      moved.phases[4] = mod_one(base.phases[4] + q);
      moved.phases[5] = mod_one(base.phases[5] + q);
      const bool same_orbit = mod_one(q * n) == 0;

      if (same_orbit) {
        // exact group element phi = (-q, 0): phase shift <beta^i, phi> on every coordinate
        const std::vector<Rational> phi = {-q, Rational(0)};
        for (std::size_t i = 0; i < 8; ++i) {
          if (base.moduli[i] == 0) continue;
          if (mod_one(base.phases[i] + doubled.pairing(i, phi)) != moved.phases[i]) {
            ok = false;
            detail += "group element fails at coordinate " + kDoubledNames[i] + "; ";
          }
        }
      }

      const auto rep_q = solve_hyperkahler(w, to_point(moved));
      if (rep_q.kahler.status != KNStatus::converged || !ok) {
        ok = false;
        continue;
      }
      const auto inv_p = slice_invariants(rep_p.representative, n);
      const auto inv_q = slice_invariants(rep_q.representative, n);
      double diff = 0;
      for (std::size_t b = 0; b < inv_p.size(); ++b) diff = std::max(diff, std::abs(inv_p[b] - inv_q[b]));
      double moduli_diff = 0;
      for (std::size_t i = 0; i < 4; ++i) {
        moduli_diff = std::max(moduli_diff, std::abs(std::abs(rep_p.representative.x[i]) -
                                                      std::abs(rep_q.representative.x[i])));
        moduli_diff = std::max(moduli_diff, std::abs(std::abs(rep_p.representative.z[i]) -
                                                      std::abs(rep_q.representative.z[i])));
      }
      std::ostringstream line;
      line << "shift " << to_string(q) << (same_orbit ? " (lambda^n=1)" : " (lambda^n!=1)")
           << " invariant gap " << diff << "; ";
      detail += line.str();
      if (same_orbit) {
        ok = ok && diff < 1e-8 && moduli_diff < 1e-8;
      } else {
        ok = ok && diff > 1e-6;
      }
    }
    add("slice_orbit_equality", ok, detail);
  }

  return report;
}

}  // namespace hkq
