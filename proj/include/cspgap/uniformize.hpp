#pragma once

#include <vector>

#include "cspgap/basic_lp.hpp"

namespace cspgap {

struct MarginalReport {
  std::vector<std::vector<Rational>> marginals;  // per variable, over [q0]
  std::vector<int> unconstrained;                // variables defaulted to uniform
};
MarginalReport compute_marginals(const Instance& inst, const LpSolution& sol);

struct AlphabetLift {
  int q = 1;
  int q0 = 2;
  // blocks[v][a] = sorted symbols of [q] mapped to a; contiguous, lowest a first.
  std::vector<std::vector<std::vector<int>>> blocks;
  std::vector<std::vector<int>> kappa;  // kappa[v][b] in [q0]

  int block_size(int v, int a) const { return static_cast<int>(blocks[v][a].size()); }
};
AlphabetLift build_lift(const std::vector<std::vector<Rational>>& marginals);

LocalDistribution lift_distribution(const LocalDistribution& y0, const AlphabetLift& lift,
                                    const std::vector<int>& vars);
// Law of kappa(b) for b ~ y.
LocalDistribution pushforward(const LocalDistribution& y, const AlphabetLift& lift,
                              const std::vector<int>& vars);
// Exact check that every coordinate marginal equals 1/q.
bool is_one_wise_uniform(const LocalDistribution& y);

struct GadgetEdge {
  std::vector<int> phi;        // injection [k] -> [k']
  LocalDistribution dist;      // lifted, over [q]^k
  Predicate predicate;         // over [q0]^k
  std::size_t source_constraint = 0;
};

struct GadgetSpec {
  int q = 2;
  int q0 = 2;
  int k = 2;
  int k_prime = 1;
  int copies = 4;
  std::vector<GadgetEdge> edges;  // T = copies * #constraints, constraint-major
  AlphabetLift lift;
  Rational gamma;                 // LP value of the source solution
  bool lp_value_is_one = false;   // recorded only; determinism of opt = 1 is not certified

  int T() const { return static_cast<int>(edges.size()); }
};

inline constexpr int kDefaultCopies = 4;

GadgetSpec build_gadget_spec(const Instance& inst, const LpSolution& sol, int copies = kDefaultCopies);

}  // namespace cspgap
