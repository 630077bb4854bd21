#pragma once

#include <vector>

#include "cspgap/rational.hpp"

namespace cspgap {

enum class SimplexStatus { Optimal, Infeasible, Unbounded };

struct SimplexResult {
  SimplexStatus status = SimplexStatus::Infeasible;
  std::vector<Rational> x;
  Rational objective;
  std::size_t pivots = 0;
};

// maximize c.x  s.t.  A x = b, x >= 0.
// Two-phase dense tableau, Bland's rule for both entering and leaving choices.
// Redundant equality rows are detected after phase one and dropped.
SimplexResult maximize(const std::vector<std::vector<Rational>>& A, const std::vector<Rational>& b,
                       const std::vector<Rational>& c);

}  // namespace cspgap
