#pragma once

// Exact rational linear programming and integer/rational linear algebra used by
// the stability combinatorics. Everything here is dense and meant for the small
// systems that torus weight data produce (tens of columns, k <= 6 rows).

#include <cstddef>
#include <vector>

#include "hkq/rational.hpp"

namespace hkq::lp {

using RationalMatrix = std::vector<std::vector<Rational>>;  // row-major
using IntegerMatrix = std::vector<std::vector<BigInt>>;

enum class Status { optimal, infeasible, unbounded };
enum class Relation { less_equal, equal, greater_equal };

struct Solution {
  Status status = Status::infeasible;
  std::vector<Rational> x;  // original variables, valid when optimal
  Rational objective = 0;
};

/// Maximization LP over exact rationals. Variables are free unless marked
/// nonnegative. Solved by a two-phase dense simplex with Bland's rule.
class LinearProgram {
 public:
  explicit LinearProgram(std::size_t num_vars);

  std::size_t num_vars() const { return num_vars_; }
  void set_nonnegative(std::size_t var);
  void add_constraint(std::vector<Rational> coeffs, Relation rel, Rational rhs);
  void set_objective(std::vector<Rational> coeffs);

  Solution solve() const;

 private:
  struct Row {
    std::vector<Rational> coeffs;
    Relation rel;
    Rational rhs;
  };
  std::size_t num_vars_;
  std::vector<bool> nonnegative_;
  std::vector<Row> rows_;
  std::vector<Rational> objective_;
};

/// Rank over Q.
std::size_t rank(RationalMatrix m);

/// Basis of the right kernel {x : m x = 0} over Q; `cols` is needed when m has no rows.
std::vector<std::vector<Rational>> nullspace(RationalMatrix m, std::size_t cols);

/// Absolute values of the nonzero diagonal entries of the Smith normal form,
/// in divisibility order.
std::vector<BigInt> smith_invariants(IntegerMatrix m);

}  // namespace hkq::lp
