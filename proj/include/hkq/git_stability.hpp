#pragma once

// Exact GIT for torus weight systems. A point's stability depends only on its
// support S; everything here works on supports and decides each question with
// an exact rational LP.

#include <compare>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "hkq/rep_core.hpp"

namespace hkq {

inline constexpr std::size_t kDefaultEnumerationBound = 20;

enum class Stability { stable, strictly_semistable, unstable };
std::string to_string(Stability s);

struct StabilityVerdict {
  Stability status = Stability::stable;
  /// Primitive integral xi with beta^i(xi) >= 0 on the support and
  /// <theta, xi> < 0 (unstable) or = 0 (strictly semistable).
  std::optional<Cocharacter> certificate;
};

/// Value of the mu-weight: +infinity or an exact rational.
struct MuWeight {
  bool infinite = false;
  Rational value = 0;
};

struct StabilizerInfo {
  std::size_t subtorus_rank = 0;
  std::vector<BigInt> finite_invariants;  // invariant factors > 1

  bool trivial() const { return subtorus_rank == 0 && finite_invariants.empty(); }
  bool finite() const { return subtorus_rank == 0; }
  /// Order of the finite part (product of invariant factors).
  BigInt finite_order() const;

  friend auto operator<=>(const StabilizerInfo&, const StabilizerInfo&) = default;
};

struct StratumRecord {
  StabilizerInfo stabilizer;
  std::vector<IndexSet> supports;
  bool open = false;  // trivial stabilizer
};

struct SmoothnessResult {
  bool smooth = true;
  std::optional<IndexSet> offending_support;
};

MuWeight mu_weight(const WeightSystem& w, const IndexSet& support, const std::vector<Rational>& xi);
MuWeight mu_weight(const WeightSystem& w, const ExactAmbientPoint& v, const Cocharacter& xi);

StabilityVerdict classify_support(const WeightSystem& w, const IndexSet& support);
StabilityVerdict classify_point(const WeightSystem& w, const ExactAmbientPoint& v);
/// Numeric coordinates: the support is read with the numeric zero threshold.
StabilityVerdict classify_point(const WeightSystem& w, const AmbientPoint& v,
                                double threshold = kDefaultSupportThreshold);

/// theta lies in Cone{beta^i : i in S}.
bool semistable_support(const WeightSystem& w, const IndexSet& support);

/// theta is a strictly positive combination of {beta^i : i in S}, i.e. the
/// orbit of a point with this support meets the moment-map zero set.
bool polystable_support(const WeightSystem& w, const IndexSet& support);

/// The distinct supports {i : beta^i(xi) >= 0} over nonzero xi with
/// <theta, xi> < 0, i.e. for each destabilizing direction the largest
/// coordinate subspace it destabilizes. The empty support is dropped when a
/// nonempty one exists. Lexicographically ordered.
std::vector<IndexSet> unstable_maximal_supports(const WeightSystem& w,
                                                std::size_t bound = kDefaultEnumerationBound);

/// Inclusion-maximal members of unstable_maximal_supports: the irreducible
/// components of the unstable locus.
std::vector<IndexSet> unstable_components(const WeightSystem& w, std::size_t bound = kDefaultEnumerationBound);

/// All semistable supports, lexicographically ordered.
std::vector<IndexSet> semistable_supports(const WeightSystem& w, std::size_t bound = kDefaultEnumerationBound);

StabilizerInfo stabilizer(const WeightSystem& w, const IndexSet& support);

SmoothnessResult quotient_smooth(const WeightSystem& w, std::size_t bound = kDefaultEnumerationBound);

/// mu^{-1}(0) is compact iff no nonzero s >= 0 has sum_i s_i beta^i = 0.
bool quotient_compact(const WeightSystem& w);

/// Semistable supports grouped by stabilizer; the open (trivial) stratum first.
std::vector<StratumRecord> kahler_strata(const WeightSystem& w, std::size_t bound = kDefaultEnumerationBound);

// Bitmask helpers shared with the stratification code (n <= 64).
std::uint64_t to_mask(const IndexSet& s);
IndexSet from_mask(std::uint64_t mask);
bool lex_less(const IndexSet& a, const IndexSet& b);

}  // namespace hkq
