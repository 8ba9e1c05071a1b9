#include "hkq/git_stability.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "hkq/exact_lp.hpp"

namespace hkq {
namespace {

using lp::LinearProgram;
using lp::Relation;
using lp::Status;

std::vector<Rational> weight_row(const Weight& beta) {
  std::vector<Rational> r;
  r.reserve(beta.size());
  for (auto b : beta) r.emplace_back(b);
  return r;
}

void check_indices(const WeightSystem& w, const IndexSet& s) {
  for (auto i : s) {
    if (i >= w.size()) throw DimensionMismatch("support index " + std::to_string(i) + " out of range");
  }
}

void check_bound(const WeightSystem& w, std::size_t bound) {
  if (w.size() > bound || w.size() > 63) {
    throw EnumerationBoundExceeded("support enumeration over " + std::to_string(w.size()) +
                                   " coordinates exceeds the bound " + std::to_string(std::min<std::size_t>(bound, 63)));
  }
}

// Most destabilizing direction in the unit box: minimizes <theta, xi> over
// {beta^i(xi) >= 0 on S, |xi_a| <= 1}. Returns nullopt when the minimum is 0.
std::optional<std::vector<Rational>> destabilizing_direction(const WeightSystem& w, const IndexSet& s) {
  const std::size_t k = w.rank();
  LinearProgram prog(k);
  for (auto i : s) prog.add_constraint(weight_row(w.weight(i)), Relation::greater_equal, 0);
  for (std::size_t b = 0; b < k; ++b) {
    std::vector<Rational> e(k);
    e[b] = 1;
    prog.add_constraint(e, Relation::less_equal, 1);
    prog.add_constraint(e, Relation::greater_equal, -1);
  }
  std::vector<Rational> objective(k);
  for (std::size_t a = 0; a < k; ++a) objective[a] = -w.theta()[a];
  prog.set_objective(std::move(objective));
  auto sol = prog.solve();
  if (sol.status != Status::optimal || sol.objective <= 0) return std::nullopt;
  return sol.x;
}

// Groups identical weight vectors; returns class id per coordinate.
struct WeightClasses {
  std::vector<Weight> representatives;
  std::vector<std::uint64_t> members;  // bitmask of coordinates per class
  std::vector<std::size_t> class_of;
};

WeightClasses group_weights(const WeightSystem& w) {
  WeightClasses c;
  std::map<Weight, std::size_t> index;
  for (std::size_t i = 0; i < w.size(); ++i) {
    auto [it, inserted] = index.emplace(w.weight(i), c.representatives.size());
    if (inserted) {
      c.representatives.push_back(w.weight(i));
      c.members.push_back(0);
    }
    c.members[it->second] |= (std::uint64_t{1} << i);
    c.class_of.push_back(it->second);
  }
  return c;
}

std::vector<std::uint64_t> unstable_masks(const WeightSystem& w, std::size_t bound) {
  check_bound(w, bound);
  std::vector<std::uint64_t> masks;
  bool theta_zero = std::all_of(w.theta().begin(), w.theta().end(), [](const Rational& t) { return t == 0; });
  if (theta_zero) return masks;

  const WeightClasses classes = group_weights(w);
  const std::size_t count = classes.representatives.size();
  std::set<std::uint64_t> found;

  // Depth-first over sign assignments (>= 0 or < 0) of the weight classes,
  // pruned by exact feasibility of the partial sign pattern.
  std::vector<int> signs;
  auto feasible = [&]() {
    LinearProgram prog(w.rank());
    for (std::size_t c = 0; c < signs.size(); ++c) {
      if (signs[c] >= 0) {
        prog.add_constraint(weight_row(classes.representatives[c]), Relation::greater_equal, 0);
      } else {
        prog.add_constraint(weight_row(classes.representatives[c]), Relation::less_equal, -1);
      }
    }
    prog.add_constraint(w.theta(), Relation::less_equal, -1);
    return prog.solve().status != Status::infeasible;
  };
  auto recurse = [&](auto&& self) -> void {
    if (signs.size() == count) {
      std::uint64_t mask = 0;
      for (std::size_t c = 0; c < count; ++c) {
        if (signs[c] >= 0) mask |= classes.members[c];
      }
      found.insert(mask);
      return;
    }
    for (int sign : {1, -1}) {
      signs.push_back(sign);
      if (feasible()) self(self);
      signs.pop_back();
    }
  };
  recurse(recurse);
  masks.assign(found.begin(), found.end());
  return masks;
}

bool subset_of_any(std::uint64_t s, const std::vector<std::uint64_t>& masks) {
  return std::any_of(masks.begin(), masks.end(), [s](std::uint64_t m) { return (s & ~m) == 0; });
}

std::vector<IndexSet> sorted_sets(const std::vector<std::uint64_t>& masks) {
  std::vector<IndexSet> out;
  out.reserve(masks.size());
  for (auto m : masks) out.push_back(from_mask(m));
  std::sort(out.begin(), out.end(), lex_less);
  return out;
}

}  // namespace

std::string to_string(Stability s) {
  switch (s) {
    case Stability::stable:
      return "stable";
    case Stability::strictly_semistable:
      return "strictly-semistable";
    case Stability::unstable:
      return "unstable";
  }
  return "unknown";
}

BigInt StabilizerInfo::finite_order() const {
  BigInt order = 1;
  for (const auto& f : finite_invariants) order *= f;
  return order;
}

std::uint64_t to_mask(const IndexSet& s) {
  std::uint64_t m = 0;
  for (auto i : s) {
    if (i >= 64) throw EnumerationBoundExceeded("index set does not fit a 64-bit mask");
    m |= std::uint64_t{1} << i;
  }
  return m;
}

IndexSet from_mask(std::uint64_t mask) {
  IndexSet s;
  for (std::size_t i = 0; i < 64; ++i) {
    if (mask & (std::uint64_t{1} << i)) s.push_back(i);
  }
  return s;
}

bool lex_less(const IndexSet& a, const IndexSet& b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

MuWeight mu_weight(const WeightSystem& w, const IndexSet& support, const std::vector<Rational>& xi) {
  check_indices(w, support);
  for (auto i : support) {
    if (w.pairing(i, xi) < 0) return {true, 0};
  }
  return {false, w.theta_pairing(xi)};
}

MuWeight mu_weight(const WeightSystem& w, const ExactAmbientPoint& v, const Cocharacter& xi) {
  if (v.size() != w.size()) throw DimensionMismatch("point length differs from weight count");
  if (!xi.is_exact()) throw PreconditionError("mu_weight needs an exact cocharacter");
  return mu_weight(w, support(v), xi.exact_value());
}

bool semistable_support(const WeightSystem& w, const IndexSet& s) {
  check_indices(w, s);
  LinearProgram prog(s.size());
  for (std::size_t j = 0; j < s.size(); ++j) prog.set_nonnegative(j);
  for (std::size_t a = 0; a < w.rank(); ++a) {
    std::vector<Rational> row(s.size());
    for (std::size_t j = 0; j < s.size(); ++j) row[j] = w.weight(s[j])[a];
    prog.add_constraint(std::move(row), Relation::equal, w.theta()[a]);
  }
  return prog.solve().status != Status::infeasible;
}

bool polystable_support(const WeightSystem& w, const IndexSet& s) {
  check_indices(w, s);
  if (s.empty()) {
    return std::all_of(w.theta().begin(), w.theta().end(), [](const Rational& t) { return t == 0; });
  }
  // maximize t subject to sum c_j beta^{s_j} = theta, c_j >= t, t <= 1
  const std::size_t m = s.size();
  LinearProgram prog(m + 1);
  for (std::size_t a = 0; a < w.rank(); ++a) {
    std::vector<Rational> row(m + 1);
    for (std::size_t j = 0; j < m; ++j) row[j] = w.weight(s[j])[a];
    prog.add_constraint(std::move(row), Relation::equal, w.theta()[a]);
  }
  for (std::size_t j = 0; j < m; ++j) {
    std::vector<Rational> row(m + 1);
    row[j] = 1;
    row[m] = -1;
    prog.add_constraint(std::move(row), Relation::greater_equal, 0);
  }
  std::vector<Rational> cap(m + 1);
  cap[m] = 1;
  prog.add_constraint(cap, Relation::less_equal, 1);
  prog.set_objective(cap);
  auto sol = prog.solve();
  return sol.status == Status::optimal && sol.objective > 0;
}

StabilityVerdict classify_support(const WeightSystem& w, const IndexSet& s) {
  check_indices(w, s);
  if (auto xi = destabilizing_direction(w, s)) {
    return {Stability::unstable, Cocharacter::exact(primitive_integer(*xi))};
  }
  // Nonzero xi in {beta^i(xi) >= 0 on S, <theta, xi> <= 0} inside the unit box.
  const std::size_t k = w.rank();
  for (std::size_t a = 0; a < k; ++a) {
    for (int sign : {1, -1}) {
      LinearProgram prog(k);
      for (auto i : s) prog.add_constraint(weight_row(w.weight(i)), Relation::greater_equal, 0);
      prog.add_constraint(w.theta(), Relation::less_equal, 0);
      for (std::size_t b = 0; b < k; ++b) {
        std::vector<Rational> e(k);
        e[b] = 1;
        prog.add_constraint(e, Relation::less_equal, 1);
        prog.add_constraint(e, Relation::greater_equal, -1);
      }
      std::vector<Rational> objective(k);
      objective[a] = sign;
      prog.set_objective(objective);
      auto sol = prog.solve();
      if (sol.status == Status::optimal && sol.objective > 0) {
        return {Stability::strictly_semistable, Cocharacter::exact(primitive_integer(sol.x))};
      }
    }
  }
  return {Stability::stable, std::nullopt};
}

StabilityVerdict classify_point(const WeightSystem& w, const ExactAmbientPoint& v) {
  if (v.size() != w.size()) throw DimensionMismatch("point length differs from weight count");
  return classify_support(w, support(v));
}

StabilityVerdict classify_point(const WeightSystem& w, const AmbientPoint& v, double threshold) {
  if (v.size() != w.size()) throw DimensionMismatch("point length differs from weight count");
  return classify_support(w, support(v, threshold));
}

std::vector<IndexSet> unstable_maximal_supports(const WeightSystem& w, std::size_t bound) {
  auto masks = unstable_masks(w, bound);
  if (masks.size() > 1) std::erase(masks, std::uint64_t{0});
  return sorted_sets(masks);
}

std::vector<IndexSet> unstable_components(const WeightSystem& w, std::size_t bound) {
  auto masks = unstable_masks(w, bound);
  std::vector<std::uint64_t> maximal;
  for (auto m : masks) {
    bool dominated = std::any_of(masks.begin(), masks.end(),
                                 [m](std::uint64_t o) { return o != m && (m & ~o) == 0; });
    if (!dominated) maximal.push_back(m);
  }
  return sorted_sets(maximal);
}

std::vector<IndexSet> semistable_supports(const WeightSystem& w, std::size_t bound) {
  const auto masks = unstable_masks(w, bound);
  const std::uint64_t total = std::uint64_t{1} << w.size();
  std::vector<std::uint64_t> good;
  for (std::uint64_t s = 0; s < total; ++s) {
    if (!subset_of_any(s, masks)) good.push_back(s);
  }
  return sorted_sets(good);
}

StabilizerInfo stabilizer(const WeightSystem& w, const IndexSet& s) {
  check_indices(w, s);
  lp::IntegerMatrix m(w.rank(), std::vector<BigInt>(s.size()));
  for (std::size_t a = 0; a < w.rank(); ++a) {
    for (std::size_t j = 0; j < s.size(); ++j) m[a][j] = w.weight(s[j])[a];
  }
  auto invariants = lp::smith_invariants(std::move(m));
  StabilizerInfo info;
  info.subtorus_rank = w.rank() - invariants.size();
  for (auto& f : invariants) {
    if (f > 1) info.finite_invariants.push_back(f);
  }
  return info;
}

namespace {

// Stabilizers depend only on the set of distinct weights present.
class StabilizerCache {
 public:
  explicit StabilizerCache(const WeightSystem& w) : w_(w), classes_(group_weights(w)) {}

  const StabilizerInfo& get(const IndexSet& s) {
    std::uint64_t key = 0;
    for (auto i : s) key |= std::uint64_t{1} << classes_.class_of[i];
    auto it = cache_.find(key);
    if (it == cache_.end()) it = cache_.emplace(key, stabilizer(w_, s)).first;
    return it->second;
  }

 private:
  const WeightSystem& w_;
  WeightClasses classes_;
  std::map<std::uint64_t, StabilizerInfo> cache_;
};

}  // namespace

SmoothnessResult quotient_smooth(const WeightSystem& w, std::size_t bound) {
  StabilizerCache cache(w);
  for (const auto& s : semistable_supports(w, bound)) {
    if (!cache.get(s).trivial()) return {false, s};
  }
  return {true, std::nullopt};
}

bool quotient_compact(const WeightSystem& w) {
  const std::size_t n = w.size();
  LinearProgram prog(n);
  for (std::size_t i = 0; i < n; ++i) prog.set_nonnegative(i);
  for (std::size_t a = 0; a < w.rank(); ++a) {
    std::vector<Rational> row(n);
    for (std::size_t i = 0; i < n; ++i) row[i] = w.weight(i)[a];
    prog.add_constraint(std::move(row), Relation::equal, 0);
  }
  prog.add_constraint(std::vector<Rational>(n, Rational(1)), Relation::equal, 1);
  return prog.solve().status == Status::infeasible;
}

std::vector<StratumRecord> kahler_strata(const WeightSystem& w, std::size_t bound) {
  StabilizerCache cache(w);
  std::map<StabilizerInfo, std::vector<IndexSet>> groups;
  for (auto& s : semistable_supports(w, bound)) groups[cache.get(s)].push_back(std::move(s));
  std::vector<StratumRecord> out;
  for (auto& [info, supports] : groups) {
    out.push_back({info, std::move(supports), info.trivial()});
  }
  return out;
}

}  // namespace hkq
