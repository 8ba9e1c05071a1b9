#pragma once

// Candidate hyperkahler strata of (T*V)///C by support pairs, numerical
// certification by Kempf-Ness witnesses, and the Hirzebruch surface suite.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hkq/git_stability.hpp"
#include "hkq/rep_core.hpp"

namespace hkq {

inline constexpr std::size_t kDefaultStrataBound = 12;

enum class CertificationStatus { certified, candidate, refuted };
std::string to_string(CertificationStatus s);

struct HKStratumCandidate {
  IndexSet support_x;
  IndexSet support_z;
  StabilizerInfo stabilizer;
  CertificationStatus status = CertificationStatus::candidate;
  std::optional<CotangentPoint> witness;
  std::vector<std::string> log;
};

/// Points with x_i z_i != 0 exactly on `overlap` can satisfy M = 0 iff every
/// index of `overlap` lies in the support of some kernel vector of the weight
/// submatrix (no coloops).
bool holomorphic_consistent(const WeightSystem& w, const IndexSet& overlap);

/// Support pairs (S_x, S_z) that are semistable for the doubled weights and
/// admit M = 0, ordered by stabilizer signature and then lexicographically.
std::vector<HKStratumCandidate> hk_candidate_strata(const WeightSystem& w, std::size_t bound = kDefaultStrataBound,
                                                    unsigned threads = 1);

struct CertifyOptions {
  std::uint64_t seed = 0;
  std::size_t attempts = 64;
};

/// Samples points with the candidate's supports on M = 0 and runs the
/// hyperkahler Kempf-Ness solve. A witness certifies; exhausting the attempts
/// leaves the status at candidate (sampling never refutes).
HKStratumCandidate certify_stratum(const WeightSystem& w, HKStratumCandidate candidate,
                                   const CertifyOptions& options = {});

/// {(1,0), (1,0), (0,1), (-n,1)} with theta = (c0/2, c1/2).
WeightSystem hirzebruch_weights(long long n, const Rational& c0, const Rational& c1);

struct SuiteCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct HirzebruchReport {
  long long n = 0;
  Rational c0;
  Rational c1;
  std::vector<SuiteCheck> checks;
  BigInt residual_order = 0;
  std::vector<HKStratumCandidate> certified_strata;
  bool passed() const;
};

/// Throws PreconditionError unless n >= 1 and c0, c1 > 0.
HirzebruchReport hirzebruch_suite(long long n, const Rational& c0, const Rational& c1, std::uint64_t seed = 0);

}  // namespace hkq
