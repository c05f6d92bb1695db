#include "lcdiag/rat.hpp"

#include <cmath>

namespace lcdiag {

std::optional<Rat> parse_rat(const std::string& s) {
  if (s.empty()) return std::nullopt;
  auto slash = s.find('/');
  try {
    if (slash == std::string::npos) {
      return Rat(BigInt(s));
    }
    BigInt num(s.substr(0, slash));
    BigInt den(s.substr(slash + 1));
    if (den == 0) return std::nullopt;
    return Rat(num, den);
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

std::string rat_to_string(const Rat& r) {
  const BigInt num = numerator(r);
  const BigInt den = denominator(r);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

double rat_to_double(const Rat& r) { return r.convert_to<double>(); }

bool is_integer(const Rat& r) { return denominator(r) == 1; }

Rat rat_pow(const Rat& r, long e) {
  if (e == 0) return Rat(1);
  if (r == 0) {
    if (e < 0) throw std::domain_error("0 raised to negative power");
    return Rat(0);
  }
  const unsigned long k = static_cast<unsigned long>(e < 0 ? -e : e);
  Rat p(pow(numerator(r), k), pow(denominator(r), k));
  if (e < 0) p = Rat(1) / p;
  return p;
}

namespace {

// Integer k-th root when exact; nullopt otherwise. n >= 0.
std::optional<BigInt> int_root(const BigInt& n, unsigned long k) {
  if (n == 0 || n == 1 || k == 1) return n;
  BigInt lo = 1, hi = n;
  while (lo < hi) {
    BigInt mid = (lo + hi + 1) / 2;
    if (pow(mid, k) <= n)
      lo = mid;
    else
      hi = mid - 1;
  }
  if (pow(lo, k) == n) return lo;
  return std::nullopt;
}

}  // namespace

std::optional<Rat> rat_root(const Rat& r, unsigned long k) {
  if (k == 0) throw std::domain_error("0-th root");
  if (r < 0) {
    if (k % 2 == 0) return std::nullopt;
    auto pos = rat_root(-r, k);
    if (!pos) return std::nullopt;
    return -*pos;
  }
  auto num = int_root(numerator(r), k);
  if (!num) return std::nullopt;
  auto den = int_root(denominator(r), k);
  if (!den) return std::nullopt;
  return Rat(*num, *den);
}

std::optional<Rat> rat_pow_exact(const Rat& r, const Rat& e) {
  if (!is_integer(e)) {
    auto root = rat_root(r, denominator(e).convert_to<unsigned long>());
    if (!root) return std::nullopt;
    return rat_pow(*root, numerator(e).convert_to<long>());
  }
  return rat_pow(r, numerator(e).convert_to<long>());
}

}  // namespace lcdiag
