#include "cspgap/simplex.hpp"

#include "cspgap/errors.hpp"

namespace cspgap {

namespace {

struct Tableau {
  // rows_[i] holds the constraint row i followed by its rhs in the last slot.
  std::vector<std::vector<Rational>> rows;
  std::vector<Rational> reduced;  // z_j - c_j, rhs slot holds current objective
  std::vector<std::size_t> basis;
  std::size_t cols = 0;  // structural + artificial columns, rhs excluded
  std::size_t pivots = 0;

  void pivot(std::size_t r, std::size_t col) {
    auto& pr = rows[r];
    Rational inv = 1 / pr[col];
    for (auto& v : pr) v *= inv;
    auto eliminate = [&](std::vector<Rational>& row) {
      if (row[col] == 0) return;
      Rational f = row[col];
      for (std::size_t j = 0; j <= cols; ++j)
        if (pr[j] != 0) row[j] -= f * pr[j];
    };
    for (std::size_t i = 0; i < rows.size(); ++i)
      if (i != r) eliminate(rows[i]);
    eliminate(reduced);
    basis[r] = col;
    ++pivots;
  }

  // Runs Bland's rule restricted to columns < active; returns false on unboundedness.
  bool optimize(std::size_t active) {
    for (;;) {
      std::size_t enter = active;
      for (std::size_t j = 0; j < active; ++j)
        if (reduced[j] < 0) {
          enter = j;
          break;
        }
      if (enter == active) return true;
      std::size_t leave = rows.size();
      Rational best;
      for (std::size_t i = 0; i < rows.size(); ++i) {
        const Rational& a = rows[i][enter];
        if (a <= 0) continue;
        Rational ratio = rows[i][cols] / a;
        if (leave == rows.size() || ratio < best || (ratio == best && basis[i] < basis[leave])) {
          leave = i;
          best = ratio;
        }
      }
      if (leave == rows.size()) return false;
      pivot(leave, enter);
    }
  }
};

}  // namespace

SimplexResult maximize(const std::vector<std::vector<Rational>>& A, const std::vector<Rational>& b,
                       const std::vector<Rational>& c) {
  const std::size_t m = A.size(), n = c.size();
  require(b.size() == m, "simplex: rhs length mismatch");
  for (const auto& row : A) require(row.size() == n, "simplex: ragged constraint matrix");

  Tableau t;
  t.cols = n + m;
  t.rows.assign(m, std::vector<Rational>(t.cols + 1));
  t.basis.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    bool flip = b[i] < 0;
    for (std::size_t j = 0; j < n; ++j) t.rows[i][j] = flip ? Rational(-A[i][j]) : A[i][j];
    t.rows[i][n + i] = 1;
    t.rows[i][t.cols] = flip ? Rational(-b[i]) : b[i];
    t.basis[i] = n + i;
  }

  // Phase one: maximize -sum(artificials).
  t.reduced.assign(t.cols + 1, 0);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j <= t.cols; ++j)
      if (j < n || j == t.cols) t.reduced[j] -= t.rows[i][j];
  t.optimize(t.cols);

  SimplexResult res;
  if (t.reduced[t.cols] != 0) {
    res.status = SimplexStatus::Infeasible;
    res.pivots = t.pivots;
    return res;
  }

  // Drive remaining artificials out of the basis; rows where that is impossible are redundant.
  for (std::size_t i = 0; i < t.rows.size();) {
    if (t.basis[i] < n) {
      ++i;
      continue;
    }
    std::size_t col = n;
    for (std::size_t j = 0; j < n; ++j)
      if (t.rows[i][j] != 0) {
        col = j;
        break;
      }
    if (col < n) {
      t.pivot(i, col);
      ++i;
    } else {
      t.rows.erase(t.rows.begin() + static_cast<std::ptrdiff_t>(i));
      t.basis.erase(t.basis.begin() + static_cast<std::ptrdiff_t>(i));
    }
  }

  // Phase two over structural columns only; artificial columns are ignored from here on.
  t.reduced.assign(t.cols + 1, 0);
  for (std::size_t j = 0; j < n; ++j) t.reduced[j] = -c[j];
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const Rational& cb = c[t.basis[i]];
    if (cb == 0) continue;
    for (std::size_t j = 0; j < n; ++j) t.reduced[j] += cb * t.rows[i][j];
    t.reduced[t.cols] += cb * t.rows[i][t.cols];
  }
  if (!t.optimize(n)) {
    res.status = SimplexStatus::Unbounded;
    res.pivots = t.pivots;
    return res;
  }

  res.status = SimplexStatus::Optimal;
  res.x.assign(n, 0);
  for (std::size_t i = 0; i < t.rows.size(); ++i) res.x[t.basis[i]] = t.rows[i][t.cols];
  res.objective = 0;
  for (std::size_t j = 0; j < n; ++j) res.objective += c[j] * res.x[j];
  res.pivots = t.pivots;
  return res;
}

}  // namespace cspgap
