#include "cspgap/basic_lp.hpp"

#include <map>

#include "cspgap/errors.hpp"
#include "cspgap/simplex.hpp"

namespace cspgap {

LocalDistribution::LocalDistribution(int q_, int k_, std::vector<Rational> p)
    : q(q_), k(k_), probs(std::move(p)) {
  require(q >= 1 && k >= 1, "local distribution needs q >= 1, k >= 1");
  require(probs.size() == checked_pow(q, k), "local distribution length != q^k");
  // mpq_class(num, den) does not reduce; comparisons assume canonical form.
  for (auto& x : probs) x.canonicalize();
}

LocalDistribution LocalDistribution::uniform_on(int q, int k, const std::vector<std::uint64_t>& support) {
  require(!support.empty(), "uniform_on needs a nonempty support");
  std::vector<Rational> p(checked_pow(q, k), 0);
  Rational w(1, static_cast<unsigned long>(support.size()));
  w.canonicalize();
  for (auto idx : support) p.at(idx) += w;
  return LocalDistribution(q, k, std::move(p));
}

std::string LocalDistribution::defect() const {
  Rational sum = 0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (probs[i] < 0) return "negative probability at index " + std::to_string(i);
    sum += probs[i];
  }
  if (sum != 1) return "probabilities sum to " + to_string(sum);
  return "";
}

std::vector<Rational> LocalDistribution::marginal(int slot) const {
  require(slot >= 0 && slot < k, "marginal slot out of range");
  std::vector<Rational> out(q, 0);
  for (std::uint64_t i = 0; i < probs.size(); ++i) {
    if (probs[i] == 0) continue;
    out[tuple_of(i, q, k)[slot]] += probs[i];
  }
  return out;
}

Rational LocalDistribution::expectation(const Predicate& f) const {
  require(f.alphabet() == q && f.arity() == k, "predicate shape differs from local distribution");
  Rational e = 0;
  for (std::uint64_t i = 0; i < probs.size(); ++i)
    if (f.at(i)) e += probs[i];
  return e;
}

Integer LocalDistribution::common_denominator() const {
  Integer d = 1;
  for (const auto& p : probs) d = lcm(d, p.get_den());
  return d;
}

namespace {

std::string key_of(const Constraint& c) {
  std::string key = std::to_string(c.predicate.alphabet()) + ":" + c.predicate.bits() + ":";
  for (int v : c.vars) key += std::to_string(v) + ",";
  return key;
}

struct Slot {
  std::size_t key;
  int slot;
};

// Occurrences of each variable among distinct constraints.
std::vector<std::vector<Slot>> occurrences(const Instance& inst, const ConstraintKeys& keys) {
  std::vector<std::vector<Slot>> occ(inst.num_vars());
  for (std::size_t i = 0; i < keys.representative.size(); ++i) {
    const auto& c = inst.constraints()[keys.representative[i]];
    for (int l = 0; l < static_cast<int>(c.vars.size()); ++l) occ[c.vars[l]].push_back({i, l});
  }
  return occ;
}

}  // namespace

ConstraintKeys distinct_constraints(const Instance& inst) {
  ConstraintKeys out;
  std::map<std::string, std::size_t> seen;
  for (std::size_t c = 0; c < inst.size(); ++c) {
    auto [it, fresh] = seen.emplace(key_of(inst.constraints()[c]), out.representative.size());
    if (fresh) {
      out.representative.push_back(c);
      out.multiplicity.push_back(0);
    }
    out.local_of.push_back(it->second);
    ++out.multiplicity[it->second];
  }
  return out;
}

BasicLpModel build_basic_lp(const Instance& inst) {
  require(!inst.empty(), "basic LP needs a nonempty instance");
  BasicLpModel model;
  model.keys = distinct_constraints(inst);
  const auto& keys = model.keys;
  const int q = inst.alphabet();
  const std::size_t nkeys = keys.representative.size();

  model.offset.resize(nkeys + 1, 0);
  for (std::size_t i = 0; i < nkeys; ++i) {
    int k = inst.constraints()[keys.representative[i]].predicate.arity();
    model.offset[i + 1] = model.offset[i] + checked_pow(q, k);
  }
  const std::size_t ncols = model.offset[nkeys];
  model.local_size = nkeys ? model.offset[1] : 0;

  model.c.assign(ncols, 0);
  Rational inv_total(1, static_cast<unsigned long>(inst.size()));
  inv_total.canonicalize();
  for (std::size_t i = 0; i < nkeys; ++i) {
    const auto& f = inst.constraints()[keys.representative[i]].predicate;
    Rational w = inv_total * static_cast<unsigned long>(keys.multiplicity[i]);
    for (std::size_t a = 0; a < model.offset[i + 1] - model.offset[i]; ++a)
      if (f.at(a)) model.c[model.offset[i] + a] = w;
  }

  for (std::size_t i = 0; i < nkeys; ++i) {
    std::vector<Rational> row(ncols, 0);
    for (std::size_t j = model.offset[i]; j < model.offset[i + 1]; ++j) row[j] = 1;
    model.A.push_back(std::move(row));
    model.b.emplace_back(1);
  }

  auto occ = occurrences(inst, keys);
  for (const auto& slots : occ) {
    for (std::size_t s = 1; s < slots.size(); ++s) {
      const Slot& ref = slots[0];
      const Slot& other = slots[s];
      int k_ref = inst.constraints()[keys.representative[ref.key]].predicate.arity();
      int k_other = inst.constraints()[keys.representative[other.key]].predicate.arity();
      for (int bsym = 0; bsym < q; ++bsym) {
        std::vector<Rational> row(ncols, 0);
        for (std::size_t a = 0; a < model.offset[ref.key + 1] - model.offset[ref.key]; ++a)
          if (tuple_of(a, q, k_ref)[ref.slot] == bsym) row[model.offset[ref.key] + a] += 1;
        for (std::size_t a = 0; a < model.offset[other.key + 1] - model.offset[other.key]; ++a)
          if (tuple_of(a, q, k_other)[other.slot] == bsym) row[model.offset[other.key] + a] -= 1;
        model.A.push_back(std::move(row));
        model.b.emplace_back(0);
      }
    }
  }
  return model;
}

LpSolution solution_from_columns(const Instance& inst, const BasicLpModel& model,
                                 const std::vector<Rational>& x) {
  require(x.size() == model.c.size(), "column vector length mismatch");
  LpSolution sol;
  const std::size_t nkeys = model.keys.representative.size();
  for (std::size_t i = 0; i < nkeys; ++i) {
    int k = inst.constraints()[model.keys.representative[i]].predicate.arity();
    std::vector<Rational> p(x.begin() + static_cast<std::ptrdiff_t>(model.offset[i]),
                            x.begin() + static_cast<std::ptrdiff_t>(model.offset[i + 1]));
    sol.locals.emplace_back(inst.alphabet(), k, std::move(p));
  }
  sol.local_of = model.keys.local_of;
  sol.objective = 0;
  for (std::size_t j = 0; j < x.size(); ++j) sol.objective += model.c[j] * x[j];
  return sol;
}

LpSolution solve_basic_lp(const Instance& inst) {
  BasicLpModel model = build_basic_lp(inst);
  SimplexResult res = maximize(model.A, model.b, model.c);
  // Product of uniform marginals is always feasible and the objective is bounded by 1.
  if (res.status != SimplexStatus::Optimal) throw std::logic_error("basic LP solver did not reach optimality");
  return solution_from_columns(inst, model, res.x);
}

FeasibilityReport check_feasible(const Instance& inst, const LpSolution& sol) {
  require(!inst.empty(), "feasibility check needs a nonempty instance");
  ConstraintKeys keys = distinct_constraints(inst);
  require(sol.locals.size() == keys.representative.size(),
          "solution has " + std::to_string(sol.locals.size()) + " locals, instance has " +
              std::to_string(keys.representative.size()) + " distinct constraints");
  require(sol.local_of == keys.local_of, "solution constraint-to-local map does not match the instance");
  for (std::size_t i = 0; i < sol.locals.size(); ++i) {
    const auto& f = inst.constraints()[keys.representative[i]].predicate;
    const auto& y = sol.locals[i];
    require(y.q == inst.alphabet() && y.k == f.arity() && y.probs.size() == f.table().size(),
            "local " + std::to_string(i) + " has the wrong shape");
  }

  for (std::size_t i = 0; i < sol.locals.size(); ++i) {
    std::string d = sol.locals[i].defect();
    if (!d.empty()) return {false, "simplex constraint of local " + std::to_string(i) + ": " + d};
  }
  auto occ = occurrences(inst, keys);
  for (int v = 0; v < inst.num_vars(); ++v) {
    const auto& slots = occ[v];
    for (std::size_t s = 0; s < slots.size(); ++s) {
      auto ms = sol.locals[slots[s].key].marginal(slots[s].slot);
      for (std::size_t t = s + 1; t < slots.size(); ++t) {
        auto mt = sol.locals[slots[t].key].marginal(slots[t].slot);
        for (int bsym = 0; bsym < inst.alphabet(); ++bsym)
          if (ms[bsym] != mt[bsym])
            return {false, "marginal of variable " + std::to_string(v) + " at symbol " +
                               std::to_string(bsym) + ": local " + std::to_string(slots[s].key) +
                               " slot " + std::to_string(slots[s].slot) + " gives " +
                               to_string(ms[bsym]) + ", local " + std::to_string(slots[t].key) +
                               " slot " + std::to_string(slots[t].slot) + " gives " +
                               to_string(mt[bsym])};
      }
    }
  }
  return {};
}

Rational lp_value(const Instance& inst, const LpSolution& sol) {
  auto rep = check_feasible(inst, sol);
  if (!rep.feasible) throw InvalidInput("infeasible LP solution: " + rep.violation);
  Rational total = 0;
  for (std::size_t c = 0; c < inst.size(); ++c)
    total += sol.local_for(c).expectation(inst.constraints()[c].predicate);
  return total / static_cast<unsigned long>(inst.size());
}

LpSolution translated_line_solution(const Instance& inst) {
  require(!inst.empty(), "translated-line solution needs a nonempty instance");
  ConstraintKeys keys = distinct_constraints(inst);
  const int q = inst.alphabet();
  LpSolution sol;
  sol.local_of = keys.local_of;
  for (std::size_t i = 0; i < keys.representative.size(); ++i) {
    const auto& f = inst.constraints()[keys.representative[i]].predicate;
    const int k = f.arity();
    std::vector<std::uint64_t> best_line;
    int best_hits = -1;
    std::vector<int> shifted(k);
    for (std::uint64_t yi = 0; yi < f.table().size(); ++yi) {
      auto y = tuple_of(yi, q, k);
      std::vector<std::uint64_t> line;
      int hits = 0;
      for (int bsym = 0; bsym < q; ++bsym) {
        for (int l = 0; l < k; ++l) shifted[l] = (y[l] + bsym) % q;
        line.push_back(index_of(shifted, q));
        hits += f(shifted);
      }
      if (hits > best_hits) {
        best_hits = hits;
        best_line = line;
      }
    }
    sol.locals.push_back(LocalDistribution::uniform_on(q, k, best_line));
  }
  sol.objective = lp_value(inst, sol);
  return sol;
}

GapCertificate find_gap_certificate(const Instance& inst, std::uint64_t cap) {
  auto opt = opt_brute(inst, cap);
  auto sol = solve_basic_lp(inst);
  Rational gamma = sol.objective;
  return GapCertificate{gamma, opt.value, inst, std::move(sol), std::move(opt.argmax)};
}

}  // namespace cspgap
