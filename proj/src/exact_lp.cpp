#include "hkq/exact_lp.hpp"

#include <algorithm>
#include <utility>

#include "hkq/errors.hpp"

namespace hkq::lp {
namespace {

// Tableau for: maximize c^T x, A x = b, x >= 0. Row `m` is the objective row
// stored as reduced costs (z_j - c_j); the last column is the right-hand side.
class Tableau {
 public:
  Tableau(std::size_t rows, std::size_t cols)
      : m_(rows), cols_(cols), a_(rows + 1, std::vector<Rational>(cols + 1)), basis_(rows) {}

  Rational& at(std::size_t r, std::size_t c) { return a_[r][c]; }
  Rational& rhs(std::size_t r) { return a_[r][cols_]; }
  std::vector<Rational>& objective_row() { return a_[m_]; }
  std::size_t& basis(std::size_t r) { return basis_[r]; }
  std::size_t rows() const { return m_; }
  std::size_t cols() const { return cols_; }

  void pivot(std::size_t r, std::size_t c) {
    Rational p = a_[r][c];
    for (auto& v : a_[r]) v /= p;
    for (std::size_t i = 0; i <= m_; ++i) {
      if (i == r || a_[i][c] == 0) continue;
      Rational f = a_[i][c];
      for (std::size_t j = 0; j <= cols_; ++j) {
        if (a_[r][j] != 0) a_[i][j] -= f * a_[r][j];
      }
    }
    basis_[r] = c;
  }

  // Returns false when unbounded.
  bool optimize(std::size_t allowed_cols) {
    for (;;) {
      std::size_t enter = allowed_cols;
      for (std::size_t j = 0; j < allowed_cols; ++j) {
        if (a_[m_][j] < 0) {
          enter = j;
          break;
        }
      }
      if (enter == allowed_cols) return true;
      std::size_t leave = m_;
      Rational best;
      for (std::size_t i = 0; i < m_; ++i) {
        if (a_[i][enter] <= 0) continue;
        Rational ratio = a_[i][cols_] / a_[i][enter];
        if (leave == m_ || ratio < best || (ratio == best && basis_[i] < basis_[leave])) {
          leave = i;
          best = ratio;
        }
      }
      if (leave == m_) return false;
      pivot(leave, enter);
    }
  }

  void drop_row(std::size_t r) {
    a_.erase(a_.begin() + static_cast<std::ptrdiff_t>(r));
    basis_.erase(basis_.begin() + static_cast<std::ptrdiff_t>(r));
    --m_;
  }

 private:
  std::size_t m_;
  std::size_t cols_;
  std::vector<std::vector<Rational>> a_;
  std::vector<std::size_t> basis_;
};

}  // namespace

LinearProgram::LinearProgram(std::size_t num_vars)
    : num_vars_(num_vars), nonnegative_(num_vars, false), objective_(num_vars) {}

void LinearProgram::set_nonnegative(std::size_t var) { nonnegative_.at(var) = true; }

void LinearProgram::add_constraint(std::vector<Rational> coeffs, Relation rel, Rational rhs) {
  if (coeffs.size() != num_vars_) throw DimensionMismatch("LP constraint has wrong length");
  rows_.push_back({std::move(coeffs), rel, std::move(rhs)});
}

void LinearProgram::set_objective(std::vector<Rational> coeffs) {
  if (coeffs.size() != num_vars_) throw DimensionMismatch("LP objective has wrong length");
  objective_ = std::move(coeffs);
}

Solution LinearProgram::solve() const {
  // Column layout: for each original variable a "plus" column, a "minus"
  // column for free variables, then one slack per inequality.
  std::vector<std::size_t> plus(num_vars_), minus(num_vars_, SIZE_MAX);
  std::size_t cols = 0;
  for (std::size_t v = 0; v < num_vars_; ++v) {
    plus[v] = cols++;
    if (!nonnegative_[v]) minus[v] = cols++;
  }
  std::vector<std::size_t> slack(rows_.size(), SIZE_MAX);
  for (std::size_t r = 0; r < rows_.size(); ++r) {
    if (rows_[r].rel != Relation::equal) slack[r] = cols++;
  }
  const std::size_t structural = cols;
  const std::size_t m = rows_.size();
  Tableau t(m, structural + m);

  for (std::size_t r = 0; r < m; ++r) {
    const Row& row = rows_[r];
    bool flip = row.rhs < 0;
    auto sign = [&](const Rational& x) { return flip ? Rational(-x) : x; };
    for (std::size_t v = 0; v < num_vars_; ++v) {
      if (row.coeffs[v] == 0) continue;
      t.at(r, plus[v]) = sign(row.coeffs[v]);
      if (minus[v] != SIZE_MAX) t.at(r, minus[v]) = sign(-row.coeffs[v]);
    }
    if (slack[r] != SIZE_MAX) {
      Rational s = row.rel == Relation::less_equal ? 1 : -1;
      t.at(r, slack[r]) = sign(s);
    }
    t.rhs(r) = sign(row.rhs);
    t.at(r, structural + r) = 1;
    t.basis(r) = structural + r;
  }

  // Phase 1: maximize -sum(artificials).
  auto& obj = t.objective_row();
  for (std::size_t r = 0; r < m; ++r) obj[structural + r] = 1;
  for (std::size_t r = 0; r < m; ++r) {
    for (std::size_t j = 0; j <= structural + m; ++j) obj[j] -= t.at(r, j);
  }
  t.optimize(structural + m);
  if (t.objective_row()[structural + m] != 0) return {Status::infeasible, {}, 0};

  // Drive artificials out of the basis; drop redundant rows.
  for (std::size_t r = 0; r < t.rows();) {
    if (t.basis(r) < structural) {
      ++r;
      continue;
    }
    std::size_t col = structural;
    for (std::size_t j = 0; j < structural; ++j) {
      if (t.at(r, j) != 0) {
        col = j;
        break;
      }
    }
    if (col == structural) {
      t.drop_row(r);
    } else {
      t.pivot(r, col);
      ++r;
    }
  }

  // Phase 2.
  auto& obj2 = t.objective_row();
  std::fill(obj2.begin(), obj2.end(), Rational(0));
  for (std::size_t v = 0; v < num_vars_; ++v) {
    obj2[plus[v]] = -objective_[v];
    if (minus[v] != SIZE_MAX) obj2[minus[v]] = objective_[v];
  }
  for (std::size_t r = 0; r < t.rows(); ++r) {
    Rational f = obj2[t.basis(r)];
    if (f == 0) continue;
    for (std::size_t j = 0; j <= structural + m; ++j) obj2[j] -= f * t.at(r, j);
  }
  if (!t.optimize(structural)) return {Status::unbounded, {}, 0};

  std::vector<Rational> column_value(structural + m);
  for (std::size_t r = 0; r < t.rows(); ++r) column_value[t.basis(r)] = t.rhs(r);
  Solution sol;
  sol.status = Status::optimal;
  sol.x.resize(num_vars_);
  for (std::size_t v = 0; v < num_vars_; ++v) {
    sol.x[v] = column_value[plus[v]];
    if (minus[v] != SIZE_MAX) sol.x[v] -= column_value[minus[v]];
    sol.objective += objective_[v] * sol.x[v];
  }
  return sol;
}

namespace {

// Reduced row echelon form in place; returns pivot columns.
std::vector<std::size_t> rref(RationalMatrix& m, std::size_t cols) {
  std::vector<std::size_t> pivots;
  std::size_t row = 0;
  for (std::size_t c = 0; c < cols && row < m.size(); ++c) {
    std::size_t p = row;
    while (p < m.size() && m[p][c] == 0) ++p;
    if (p == m.size()) continue;
    std::swap(m[row], m[p]);
    Rational lead = m[row][c];
    for (auto& x : m[row]) x /= lead;
    for (std::size_t i = 0; i < m.size(); ++i) {
      if (i == row || m[i][c] == 0) continue;
      Rational f = m[i][c];
      for (std::size_t j = c; j < cols; ++j) m[i][j] -= f * m[row][j];
    }
    pivots.push_back(c);
    ++row;
  }
  return pivots;
}

}  // namespace

std::size_t rank(RationalMatrix m) {
  if (m.empty()) return 0;
  return rref(m, m.front().size()).size();
}

std::vector<std::vector<Rational>> nullspace(RationalMatrix m, std::size_t cols) {
  auto pivots = rref(m, cols);
  std::vector<bool> is_pivot(cols, false);
  for (auto c : pivots) is_pivot[c] = true;
  std::vector<std::vector<Rational>> basis;
  for (std::size_t free = 0; free < cols; ++free) {
    if (is_pivot[free]) continue;
    std::vector<Rational> v(cols);
    v[free] = 1;
    for (std::size_t r = 0; r < pivots.size(); ++r) v[pivots[r]] = -m[r][free];
    basis.push_back(std::move(v));
  }
  return basis;
}

std::vector<BigInt> smith_invariants(IntegerMatrix m) {
  std::vector<BigInt> diag;
  if (m.empty() || m.front().empty()) return diag;
  const std::size_t rows = m.size();
  const std::size_t cols = m.front().size();
  using boost::multiprecision::abs;

  for (std::size_t t = 0; t < std::min(rows, cols); ++t) {
    for (;;) {
      // Smallest nonzero magnitude in the trailing block moves to (t, t).
      std::size_t pr = rows, pc = cols;
      for (std::size_t i = t; i < rows; ++i) {
        for (std::size_t j = t; j < cols; ++j) {
          if (m[i][j] != 0 && (pr == rows || abs(m[i][j]) < abs(m[pr][pc]))) {
            pr = i;
            pc = j;
          }
        }
      }
      if (pr == rows) return diag;
      std::swap(m[t], m[pr]);
      for (auto& row : m) std::swap(row[t], row[pc]);

      bool clean = true;
      for (std::size_t i = t + 1; i < rows; ++i) {
        if (m[i][t] == 0) continue;
        BigInt q = m[i][t] / m[t][t];
        for (std::size_t j = t; j < cols; ++j) m[i][j] -= q * m[t][j];
        if (m[i][t] != 0) clean = false;
      }
      for (std::size_t j = t + 1; j < cols; ++j) {
        if (m[t][j] == 0) continue;
        BigInt q = m[t][j] / m[t][t];
        for (std::size_t i = t; i < rows; ++i) m[i][j] -= q * m[i][t];
        if (m[t][j] != 0) clean = false;
      }
      if (!clean) continue;

      // Divisibility: fold an offending row into row t and retry.
      bool divisible = true;
      for (std::size_t i = t + 1; i < rows && divisible; ++i) {
        for (std::size_t j = t + 1; j < cols; ++j) {
          if (m[i][j] % m[t][t] != 0) {
            for (std::size_t jj = t; jj < cols; ++jj) m[t][jj] += m[i][jj];
            divisible = false;
            break;
          }
        }
      }
      if (divisible) break;
    }
    diag.push_back(abs(m[t][t]));
  }
  return diag;
}

}  // namespace hkq::lp
