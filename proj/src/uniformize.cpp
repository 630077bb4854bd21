#include "cspgap/uniformize.hpp"

#include "cspgap/errors.hpp"

namespace cspgap {

MarginalReport compute_marginals(const Instance& inst, const LpSolution& sol) {
  auto rep = check_feasible(inst, sol);
  if (!rep.feasible) throw InvalidInput("infeasible LP solution: " + rep.violation);
  const int q0 = inst.alphabet();
  MarginalReport out;
  out.marginals.assign(inst.num_vars(), {});
  for (std::size_t c = 0; c < inst.size(); ++c) {
    const auto& vars = inst.constraints()[c].vars;
    for (int l = 0; l < static_cast<int>(vars.size()); ++l)
      if (out.marginals[vars[l]].empty()) out.marginals[vars[l]] = sol.local_for(c).marginal(l);
  }
  for (int v = 0; v < inst.num_vars(); ++v) {
    if (!out.marginals[v].empty()) continue;
    Rational u(1, q0);
    out.marginals[v].assign(q0, u);
    out.unconstrained.push_back(v);
  }
  return out;
}

AlphabetLift build_lift(const std::vector<std::vector<Rational>>& marginals) {
  require(!marginals.empty(), "build_lift needs at least one variable");
  AlphabetLift lift;
  lift.q0 = static_cast<int>(marginals.front().size());
  Integer q = 1;
  for (const auto& mv : marginals) {
    require(static_cast<int>(mv.size()) == lift.q0, "marginals disagree on the alphabet size");
    Rational sum = 0;
    for (const auto& p : mv) {
      require(p >= 0, "negative marginal probability");
      sum += p;
      q = lcm(q, p.get_den());
    }
    require(sum == 1, "marginal does not sum to 1");
  }
  lift.q = static_cast<int>(to_u64(q, "lifted alphabet size"));
  for (const auto& mv : marginals) {
    std::vector<std::vector<int>> blocks(lift.q0);
    std::vector<int> kappa(lift.q);
    int next = 0;
    for (int a = 0; a < lift.q0; ++a) {
      Rational size = mv[a] * lift.q;
      int sz = static_cast<int>(size.get_num().get_si());
      for (int i = 0; i < sz; ++i) {
        blocks[a].push_back(next);
        kappa[next] = a;
        ++next;
      }
    }
    lift.blocks.push_back(std::move(blocks));
    lift.kappa.push_back(std::move(kappa));
  }
  return lift;
}

LocalDistribution lift_distribution(const LocalDistribution& y0, const AlphabetLift& lift,
                                    const std::vector<int>& vars) {
  require(y0.q == lift.q0, "local distribution alphabet differs from the lift's base alphabet");
  require(static_cast<int>(vars.size()) == y0.k, "variable tuple length differs from arity");
  for (int l = 0; l < y0.k; ++l) {
    int v = vars[l];
    require(v >= 0 && v < static_cast<int>(lift.kappa.size()), "variable outside the lift");
    auto m = y0.marginal(l);
    for (int a = 0; a < lift.q0; ++a)
      if (m[a] * lift.q != lift.block_size(v, a))
        throw InvalidInput("marginal mismatch at slot " + std::to_string(l) + " (variable " +
                           std::to_string(v) + ", symbol " + std::to_string(a) + ")");
  }
  const int q = lift.q, k = y0.k;
  std::vector<Rational> probs(checked_pow(q, k), 0);
  std::vector<int> base(k);
  for (std::uint64_t i = 0; i < probs.size(); ++i) {
    auto b = tuple_of(i, q, k);
    unsigned long denom = 1;
    for (int l = 0; l < k; ++l) {
      base[l] = lift.kappa[vars[l]][b[l]];
      denom *= static_cast<unsigned long>(lift.block_size(vars[l], base[l]));
    }
    const Rational& p = y0.probs[index_of(base, lift.q0)];
    if (p != 0) probs[i] = p / denom;
  }
  return LocalDistribution(q, k, std::move(probs));
}

LocalDistribution pushforward(const LocalDistribution& y, const AlphabetLift& lift,
                              const std::vector<int>& vars) {
  require(y.q == lift.q, "distribution alphabet differs from the lifted alphabet");
  require(static_cast<int>(vars.size()) == y.k, "variable tuple length differs from arity");
  std::vector<Rational> probs(checked_pow(lift.q0, y.k), 0);
  std::vector<int> base(y.k);
  for (std::uint64_t i = 0; i < y.probs.size(); ++i) {
    if (y.probs[i] == 0) continue;
    auto b = tuple_of(i, y.q, y.k);
    for (int l = 0; l < y.k; ++l) base[l] = lift.kappa[vars[l]][b[l]];
    probs[index_of(base, lift.q0)] += y.probs[i];
  }
  return LocalDistribution(lift.q0, y.k, std::move(probs));
}

bool is_one_wise_uniform(const LocalDistribution& y) {
  if (!y.defect().empty()) return false;
  Rational u(1, y.q);
  for (int l = 0; l < y.k; ++l)
    for (const auto& p : y.marginal(l))
      if (p != u) return false;
  return true;
}

GadgetSpec build_gadget_spec(const Instance& inst, const LpSolution& sol, int copies) {
  require(copies >= 1, "copy count K must be positive");
  auto marg = compute_marginals(inst, sol);
  GadgetSpec spec;
  spec.lift = build_lift(marg.marginals);
  spec.q = spec.lift.q;
  spec.q0 = inst.alphabet();
  spec.k_prime = inst.num_vars();
  spec.copies = copies;
  spec.gamma = lp_value(inst, sol);
  spec.lp_value_is_one = spec.gamma == 1;
  spec.k = inst.constraints().front().predicate.arity();
  for (std::size_t c = 0; c < inst.size(); ++c) {
    const auto& con = inst.constraints()[c];
    require(con.predicate.arity() == spec.k, "gadget constraints must share one arity");
    LocalDistribution lifted = lift_distribution(sol.local_for(c), spec.lift, con.vars);
    if (!is_one_wise_uniform(lifted)) throw std::logic_error("lifted distribution is not one-wise uniform");
    for (int r = 0; r < copies; ++r) spec.edges.push_back(GadgetEdge{con.vars, lifted, con.predicate, c});
  }
  return spec;
}

}  // namespace cspgap
