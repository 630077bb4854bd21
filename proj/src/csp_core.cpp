#include "cspgap/csp_core.hpp"

#include <algorithm>
#include <set>

#include "cspgap/errors.hpp"

namespace cspgap {

std::uint64_t checked_pow(std::uint64_t base, unsigned exp) {
  std::uint64_t out = 1;
  for (unsigned i = 0; i < exp; ++i) {
    if (base != 0 && out > UINT64_MAX / base) throw ResourceError("integer power overflows 64 bits");
    out *= base;
  }
  return out;
}

std::vector<int> tuple_of(std::uint64_t index, int q, int k) {
  std::vector<int> t(k);
  for (int i = k - 1; i >= 0; --i) {
    t[i] = static_cast<int>(index % q);
    index /= q;
  }
  return t;
}

std::uint64_t index_of(std::span<const int> tuple, int q) {
  std::uint64_t idx = 0;
  for (int v : tuple) idx = idx * q + static_cast<std::uint64_t>(v);
  return idx;
}

Predicate::Predicate(int arity, int alphabet, std::vector<std::uint8_t> table, std::string name)
    : arity_(arity), alphabet_(alphabet), table_(std::move(table)), name_(std::move(name)) {
  require(arity >= 1, "predicate arity must be positive");
  require(alphabet >= 2, "predicate alphabet must be at least 2");
  require(table_.size() == checked_pow(alphabet, arity),
          "predicate table length " + std::to_string(table_.size()) + " != q0^k");
  for (auto& v : table_) v = v ? 1 : 0;
}

Predicate Predicate::from_function(int arity, int alphabet,
                                   const std::function<bool(std::span<const int>)>& f,
                                   std::string name) {
  require(arity >= 1 && alphabet >= 2, "bad predicate shape");
  std::uint64_t size = checked_pow(alphabet, arity);
  std::vector<std::uint8_t> table(size);
  for (std::uint64_t i = 0; i < size; ++i) table[i] = f(tuple_of(i, alphabet, arity)) ? 1 : 0;
  return Predicate(arity, alphabet, std::move(table), std::move(name));
}

Predicate Predicate::from_bits(int arity, int alphabet, const std::string& bits, std::string name) {
  std::vector<std::uint8_t> table;
  table.reserve(bits.size());
  for (char c : bits) {
    require(c == '0' || c == '1', "predicate table must be a 0/1 string");
    table.push_back(c == '1');
  }
  return Predicate(arity, alphabet, std::move(table), std::move(name));
}

std::string Predicate::bits() const {
  std::string s;
  s.reserve(table_.size());
  for (auto v : table_) s.push_back(v ? '1' : '0');
  return s;
}

std::size_t Predicate::support_size() const {
  return static_cast<std::size_t>(std::count(table_.begin(), table_.end(), 1));
}

PredicateFamily::PredicateFamily(std::vector<Predicate> members) : members_(std::move(members)) {
  require(!members_.empty(), "predicate family must be nonempty");
  for (const auto& p : members_)
    require(p.arity() == arity() && p.alphabet() == alphabet(),
            "family members must share arity and alphabet");
}

Constraint::Constraint(Predicate p, std::vector<int> v) : predicate(std::move(p)), vars(std::move(v)) {
  require(static_cast<int>(vars.size()) == predicate.arity(),
          "constraint has " + std::to_string(vars.size()) + " vars but arity " +
              std::to_string(predicate.arity()));
  std::set<int> seen(vars.begin(), vars.end());
  require(seen.size() == vars.size(), "constraint variables must be distinct");
}

Instance::Instance(int num_vars, int alphabet, std::vector<Constraint> constraints)
    : num_vars_(num_vars), alphabet_(alphabet) {
  require(num_vars >= 1, "num_vars must be positive");
  require(alphabet >= 2, "alphabet must be at least 2");
  constraints_.reserve(constraints.size());
  for (auto& c : constraints) add(std::move(c));
}

void Instance::add(Constraint c) {
  require(c.predicate.alphabet() == alphabet_, "constraint alphabet differs from instance alphabet");
  for (int v : c.vars)
    require(v >= 0 && v < num_vars_, "variable id " + std::to_string(v) + " out of range");
  constraints_.push_back(std::move(c));
}

namespace {

void check_assignment(const Instance& inst, const Assignment& x) {
  require(static_cast<int>(x.size()) == inst.num_vars(),
          "assignment length " + std::to_string(x.size()) + " != num_vars " +
              std::to_string(inst.num_vars()));
  for (int v : x) require(v >= 0 && v < inst.alphabet(), "assignment entry outside alphabet");
}

std::size_t count_satisfied(const Instance& inst, const Assignment& x, std::vector<int>& scratch) {
  std::size_t sat = 0;
  for (const auto& c : inst.constraints()) {
    scratch.resize(c.vars.size());
    for (std::size_t l = 0; l < c.vars.size(); ++l) scratch[l] = x[c.vars[l]];
    sat += c.predicate(scratch);
  }
  return sat;
}

}  // namespace

Rational value(const Instance& inst, const Assignment& x) {
  require(!inst.empty(), "value of an empty instance is undefined");
  check_assignment(inst, x);
  std::vector<int> scratch;
  Rational r(static_cast<unsigned long>(count_satisfied(inst, x, scratch)),
             static_cast<unsigned long>(inst.size()));
  r.canonicalize();
  return r;
}

OptResult opt_brute(const Instance& inst, std::uint64_t cap) {
  require(!inst.empty(), "opt of an empty instance is undefined");
  std::uint64_t total;
  try {
    total = checked_pow(inst.alphabet(), inst.num_vars());
  } catch (const ResourceError&) {
    throw ResourceError("assignment space exceeds enumeration cap " + std::to_string(cap));
  }
  if (total > cap)
    throw ResourceError("assignment space " + std::to_string(total) + " exceeds enumeration cap " +
                        std::to_string(cap));
  Assignment x(inst.num_vars(), 0), best = x;
  std::size_t best_sat = 0;
  std::vector<int> scratch;
  for (std::uint64_t i = 0; i < total; ++i) {
    if (i > 0) {
      // Odometer increment, last variable fastest.
      for (int v = inst.num_vars() - 1; v >= 0; --v) {
        if (++x[v] < inst.alphabet()) break;
        x[v] = 0;
      }
    }
    std::size_t sat = count_satisfied(inst, x, scratch);
    if (i == 0 || sat > best_sat) {
      best_sat = sat;
      best = x;
      if (best_sat == inst.size()) break;
    }
  }
  Rational r(static_cast<unsigned long>(best_sat), static_cast<unsigned long>(inst.size()));
  r.canonicalize();
  return {r, best};
}

Rational width(const Predicate& f) {
  const int q = f.alphabet(), k = f.arity();
  std::uint64_t size = f.table().size();
  int best = 0;
  std::vector<int> shifted(k);
  for (std::uint64_t i = 0; i < size; ++i) {
    auto y = tuple_of(i, q, k);
    int hits = 0;
    for (int b = 0; b < q; ++b) {
      for (int l = 0; l < k; ++l) shifted[l] = (y[l] + b) % q;
      hits += f(shifted);
    }
    best = std::max(best, hits);
  }
  Rational r(best, q);
  r.canonicalize();
  return r;
}

Rational width(const PredicateFamily& family) {
  Rational w = width(family.members().front());
  for (const auto& f : family.members()) w = std::min(w, width(f));
  return w;
}

Rational rho_exactly(int ell, int k) {
  require(k >= 1, "rho_exactly needs k >= 1");
  require(ell >= 0 && ell <= k, "rho_exactly needs 0 <= ell <= k");
  Rational p(ell, k), r(k - ell, k);
  p.canonicalize();
  r.canonicalize();
  return Rational(binomial(k, ell)) * pow(p, ell) * pow(r, k - ell);
}

Predicate cut_predicate() {
  return Predicate::from_function(2, 2, [](auto x) { return x[0] != x[1]; }, "cut");
}

Predicate dicut_predicate() {
  return Predicate::from_function(2, 2, [](auto x) { return x[0] == 1 && x[1] == 0; }, "dicut");
}

PredicateFamily cut_family() { return PredicateFamily({cut_predicate()}); }
PredicateFamily dicut_family() { return PredicateFamily({dicut_predicate()}); }

PredicateFamily two_and_family() {
  std::vector<Predicate> members;
  for (int b1 = 0; b1 < 2; ++b1)
    for (int b2 = 0; b2 < 2; ++b2)
      members.push_back(Predicate::from_function(
          2, 2, [=](auto x) { return ((x[0] ^ b1) & (x[1] ^ b2)) != 0; },
          "2and_" + std::to_string(b1) + std::to_string(b2)));
  return PredicateFamily(std::move(members));
}

PredicateFamily kxor_family(int k) {
  require(k >= 1, "kXOR needs k >= 1");
  std::vector<Predicate> members;
  for (int b = 0; b < 2; ++b)
    members.push_back(Predicate::from_function(
        k, 2,
        [=](auto x) {
          int s = b;
          for (int v : x) s ^= v;
          return s == 1;
        },
        std::to_string(k) + "xor_" + std::to_string(b)));
  return PredicateFamily(std::move(members));
}

PredicateFamily exactly_family(int ell, int k) {
  require(k >= 1 && ell >= 0 && ell <= k, "Exactly-l-of-k needs 0 <= l <= k");
  return PredicateFamily({Predicate::from_function(
      k, 2, [=](auto x) { return std::count(x.begin(), x.end(), 1) == ell; },
      "exactly_" + std::to_string(ell) + "_of_" + std::to_string(k))});
}

PredicateFamily ltf_family(const std::vector<double>& weights) {
  const int k = static_cast<int>(weights.size());
  require(k >= 1, "LTF needs at least one weight");
  std::vector<Rational> w;
  for (double d : weights) w.emplace_back(d);  // exact binary value of the double
  std::uint64_t size = checked_pow(2, k);
  // The multiset of signed sums does not depend on b, so one sweep finds every tie.
  for (std::uint64_t i = 0; i < size; ++i) {
    auto x = tuple_of(i, 2, k);
    Rational s = 0;
    for (int l = 0; l < k; ++l) s += x[l] ? -w[l] : w[l];
    if (s == 0) throw InvalidInput("LTF weights admit a point with signed sum exactly 0");
  }
  std::vector<Predicate> members;
  for (std::uint64_t bi = 0; bi < size; ++bi) {
    auto b = tuple_of(bi, 2, k);
    std::string tag = "ltf_";
    for (int v : b) tag.push_back(static_cast<char>('0' + v));
    members.push_back(Predicate::from_function(
        k, 2,
        [&](auto x) {
          Rational s = 0;
          for (int l = 0; l < k; ++l) s += ((x[l] + b[l]) % 2) ? -w[l] : w[l];
          return s > 0;
        },
        tag));
  }
  return PredicateFamily(std::move(members));
}

std::map<std::string, PredicateFamily> predicate_zoo() {
  std::map<std::string, PredicateFamily> zoo;
  zoo.emplace("cut", cut_family());
  zoo.emplace("dicut", dicut_family());
  zoo.emplace("2and", two_and_family());
  zoo.emplace("3xor", kxor_family(3));
  zoo.emplace("exactly_2_of_3", exactly_family(2, 3));
  zoo.emplace("ltf_majority3", ltf_family({1.0, 1.0, 1.0}));
  return zoo;
}

Predicate lookup_predicate(const std::string& name, int alphabet, int arity) {
  auto check = [&](Predicate p) {
    require(p.alphabet() == alphabet && p.arity() == arity,
            "predicate '" + name + "' does not have the requested shape");
    return p;
  };
  if (name == "cut") return check(cut_predicate());
  if (name == "dicut") return check(dicut_predicate());
  // Keep each family alive for the whole loop.
  const auto two_and = two_and_family();
  for (const auto& p : two_and.members())
    if (p.name() == name) return check(p);
  if (name.size() > 5 && name.find("xor_") != std::string::npos) {
    const auto xors = kxor_family(arity);
    for (const auto& p : xors.members())
      if (p.name() == name) return check(p);
  }
  if (name.rfind("exactly_", 0) == 0) {
    for (int ell = 0; ell <= arity; ++ell) {
      auto fam = exactly_family(ell, arity);
      if (fam.members().front().name() == name) return check(fam.members().front());
    }
  }
  throw InvalidInput("unknown predicate name '" + name + "'");
}

}  // namespace cspgap
