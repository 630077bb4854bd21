#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "cspgap/rational.hpp"

namespace cspgap {

inline constexpr std::uint64_t kDefaultEnumerationCap = std::uint64_t{1} << 24;

// Integer power with overflow reported as ResourceError.
std::uint64_t checked_pow(std::uint64_t base, unsigned exp);

// Row-major tuple <-> index over [q]^k (first coordinate most significant).
std::vector<int> tuple_of(std::uint64_t index, int q, int k);
std::uint64_t index_of(std::span<const int> tuple, int q);

// Boolean predicate f : [q0]^k -> {0,1}.
class Predicate {
 public:
  Predicate(int arity, int alphabet, std::vector<std::uint8_t> table, std::string name = "");
  static Predicate from_function(int arity, int alphabet,
                                 const std::function<bool(std::span<const int>)>& f,
                                 std::string name = "");
  // Parses a 0/1 string of length q0^k.
  static Predicate from_bits(int arity, int alphabet, const std::string& bits, std::string name = "");

  int arity() const { return arity_; }
  int alphabet() const { return alphabet_; }
  const std::string& name() const { return name_; }
  const std::vector<std::uint8_t>& table() const { return table_; }
  std::string bits() const;

  bool operator()(std::span<const int> x) const { return table_[index_of(x, alphabet_)] != 0; }
  bool at(std::uint64_t index) const { return table_[index] != 0; }
  std::size_t support_size() const;

  // Identity is the truth table; the name is only a tag.
  bool same_function(const Predicate& o) const {
    return arity_ == o.arity_ && alphabet_ == o.alphabet_ && table_ == o.table_;
  }

 private:
  int arity_;
  int alphabet_;
  std::vector<std::uint8_t> table_;
  std::string name_;
};

class PredicateFamily {
 public:
  explicit PredicateFamily(std::vector<Predicate> members);
  const std::vector<Predicate>& members() const { return members_; }
  int arity() const { return members_.front().arity(); }
  int alphabet() const { return members_.front().alphabet(); }
  std::size_t size() const { return members_.size(); }

 private:
  std::vector<Predicate> members_;
};

struct Constraint {
  Predicate predicate;
  std::vector<int> vars;

  Constraint(Predicate p, std::vector<int> v);
};

// Multiset of constraints. The list may be empty only for emitted DIHP instances;
// value/opt/LP reject empty instances.
class Instance {
 public:
  Instance(int num_vars, int alphabet, std::vector<Constraint> constraints);

  int num_vars() const { return num_vars_; }
  int alphabet() const { return alphabet_; }
  const std::vector<Constraint>& constraints() const { return constraints_; }
  std::size_t size() const { return constraints_.size(); }
  bool empty() const { return constraints_.empty(); }
  void add(Constraint c);

 private:
  int num_vars_;
  int alphabet_;
  std::vector<Constraint> constraints_;
};

using Assignment = std::vector<int>;

Rational value(const Instance& inst, const Assignment& x);

struct OptResult {
  Rational value;
  Assignment argmax;
};
// First maximizer in row-major enumeration order.
OptResult opt_brute(const Instance& inst, std::uint64_t cap = kDefaultEnumerationCap);

Rational width(const Predicate& f);
Rational width(const PredicateFamily& family);

Rational rho_exactly(int ell, int k);

// Zoo members. Literal shifts follow f^b(x) = f(x + b).
Predicate cut_predicate();
Predicate dicut_predicate();
PredicateFamily cut_family();
PredicateFamily dicut_family();
PredicateFamily two_and_family();
PredicateFamily kxor_family(int k);
PredicateFamily exactly_family(int ell, int k);
// f^{w,b}(x) = 1 iff sum_i (-1)^{x_i + b_i} w_i > 0; a zero sum anywhere is rejected.
PredicateFamily ltf_family(const std::vector<double>& weights);

// Default parameters: kXOR with k=3, Exactly-2-of-3, LTF with weights (1,1,1).
std::map<std::string, PredicateFamily> predicate_zoo();

// Resolves a predicate name such as "cut", "dicut", "2and_01", "3xor_1",
// "exactly_2_of_3". Throws InvalidInput for unknown names or a shape mismatch.
Predicate lookup_predicate(const std::string& name, int alphabet, int arity);

}  // namespace cspgap
