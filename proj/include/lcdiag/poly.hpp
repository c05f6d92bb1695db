#pragma once

#include <map>
#include <optional>
#include <vector>

#include "lcdiag/rat.hpp"

namespace lcdiag {

using Expo = std::vector<unsigned>;

// Sparse multivariate polynomial over the rationals, optionally truncated:
// when trunc is set, terms of total degree > *trunc are discarded on every
// operation and understood as a dropped tail.
class TruncPoly {
 public:
  TruncPoly() = default;
  explicit TruncPoly(std::size_t arity,
                     std::optional<unsigned> trunc = std::nullopt)
      : arity_(arity), trunc_(trunc) {}

  static TruncPoly constant(std::size_t arity, const Rat& c,
                            std::optional<unsigned> trunc = std::nullopt);
  static TruncPoly monomial(std::size_t arity, const Expo& e, const Rat& c,
                            std::optional<unsigned> trunc = std::nullopt);
  /// x_i as a polynomial.
  static TruncPoly var(std::size_t arity, std::size_t i,
                       std::optional<unsigned> trunc = std::nullopt);

  std::size_t arity() const { return arity_; }
  std::optional<unsigned> trunc() const { return trunc_; }
  const std::map<Expo, Rat>& terms() const { return coeffs_; }

  bool is_zero() const { return coeffs_.empty(); }
  unsigned total_degree() const;  // 0 for the zero polynomial

  /// Adds c·x^e, dropping the term if it exceeds the truncation degree or
  /// cancels to zero.
  void add_term(const Expo& e, const Rat& c);

  TruncPoly operator+(const TruncPoly& o) const;
  TruncPoly operator-(const TruncPoly& o) const;
  TruncPoly operator*(const TruncPoly& o) const;
  TruncPoly operator-() const;
  TruncPoly scaled(const Rat& c) const;
  TruncPoly pow(unsigned e) const;
  bool operator==(const TruncPoly& o) const { return coeffs_ == o.coeffs_; }

  Rat evaluate(const std::vector<Rat>& pt) const;
  double evaluate_double(const std::vector<double>& pt) const;

  /// Substitutes exact values for the variables where vals[i] is set; the
  /// result is a polynomial in the same arity with those variables absent.
  TruncPoly substitute(const std::vector<std::optional<Rat>>& vals) const;

  /// Reinterprets the polynomial in a larger variable universe; old variable
  /// i becomes variable where[i].
  TruncPoly embed(std::size_t new_arity,
                  const std::vector<std::size_t>& where) const;

 private:
  std::size_t arity_ = 0;
  std::optional<unsigned> trunc_;
  std::map<Expo, Rat> coeffs_;
};

}  // namespace lcdiag
