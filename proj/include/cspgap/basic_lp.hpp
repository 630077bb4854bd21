#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cspgap/csp_core.hpp"
#include "cspgap/rational.hpp"

namespace cspgap {

// Distribution over [q]^k, row-major. Not validated on construction so that
// infeasible candidates can be represented and reported on.
struct LocalDistribution {
  int q = 2;
  int k = 1;
  std::vector<Rational> probs;

  LocalDistribution() = default;
  LocalDistribution(int q_, int k_, std::vector<Rational> p);
  static LocalDistribution uniform_on(int q, int k, const std::vector<std::uint64_t>& support);

  // Empty string when entries are nonnegative and sum to 1, otherwise a description.
  std::string defect() const;
  // Marginal of slot l as a vector over [q].
  std::vector<Rational> marginal(int slot) const;
  Rational expectation(const Predicate& f) const;
  Integer common_denominator() const;
};

// Distinct (predicate, vars) keys of an instance, in order of first occurrence.
struct ConstraintKeys {
  std::vector<std::size_t> representative;  // constraint index of each distinct key
  std::vector<std::size_t> local_of;        // constraint index -> key index
  std::vector<std::size_t> multiplicity;    // key index -> count in the list
};
ConstraintKeys distinct_constraints(const Instance& inst);

struct LpSolution {
  std::vector<LocalDistribution> locals;  // one per distinct constraint
  std::vector<std::size_t> local_of;      // constraint index -> locals index
  Rational objective;

  const LocalDistribution& local_for(std::size_t constraint) const { return locals.at(local_of.at(constraint)); }
};

struct FeasibilityReport {
  bool feasible = true;
  std::string violation;  // first violated equation
};

// The LP in standard form, exposed so that tests can re-optimize other objectives.
struct BasicLpModel {
  std::vector<std::vector<Rational>> A;
  std::vector<Rational> b;
  std::vector<Rational> c;
  ConstraintKeys keys;
  std::vector<std::size_t> offset;  // first column of each local
  std::size_t local_size = 0;
};
BasicLpModel build_basic_lp(const Instance& inst);
LpSolution solution_from_columns(const Instance& inst, const BasicLpModel& model,
                                 const std::vector<Rational>& x);

LpSolution solve_basic_lp(const Instance& inst);
FeasibilityReport check_feasible(const Instance& inst, const LpSolution& sol);
Rational lp_value(const Instance& inst, const LpSolution& sol);

// Each local uniform over a width-maximizing translated line {y + b*1}.
LpSolution translated_line_solution(const Instance& inst);

struct GapCertificate {
  Rational gamma;
  Rational beta;
  Instance instance;
  LpSolution lp_solution;
  Assignment best_assignment;
};
GapCertificate find_gap_certificate(const Instance& inst, std::uint64_t cap = kDefaultEnumerationCap);

}  // namespace cspgap
