#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>
#include <vector>

namespace cspgap {

using Rational = mpq_class;
using Integer = mpz_class;

// "num/den" with den > 0, always in lowest terms; integers keep the "/1".
std::string to_string(const Rational& r);
// Accepts "a/b", "a" or "-a/b"; throws InvalidInput on garbage or zero denominators.
Rational parse_rational(const std::string& s);

Integer lcm(const Integer& a, const Integer& b);
Rational pow(const Rational& base, unsigned exp);
Integer binomial(unsigned n, unsigned k);

// Fits in 64 bits or throws ResourceError.
std::uint64_t to_u64(const Integer& z, const char* what);

}  // namespace cspgap
