#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <optional>
#include <stdexcept>
#include <string>

namespace lcdiag {

// Exact rational arithmetic. cpp_rational keeps values in lowest terms with
// positive denominator, which is exactly the canonical form we need.
using Rat = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

inline Rat make_rat(long num, long den = 1) {
  if (den == 0) throw std::domain_error("rational with zero denominator");
  return Rat(num, den);
}

/// Parses "n", "-n", or "n/d". Returns nullopt on malformed input.
std::optional<Rat> parse_rat(const std::string& s);

/// Canonical "num/den" form ("3", "-1/2", ...). Denominator printed only
/// when it is not 1.
std::string rat_to_string(const Rat& r);

double rat_to_double(const Rat& r);

bool is_integer(const Rat& r);

/// r^e for integer e (negative allowed when r != 0).
Rat rat_pow(const Rat& r, long e);

/// Exact r^(1/k) when r is a perfect k-th power of a rational; nullopt
/// otherwise. k >= 1.
std::optional<Rat> rat_root(const Rat& r, unsigned long k);

/// Exact r^(p/q); defined only when the q-th root exists exactly.
std::optional<Rat> rat_pow_exact(const Rat& r, const Rat& e);

}  // namespace lcdiag
