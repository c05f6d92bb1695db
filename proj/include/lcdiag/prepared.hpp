#pragma once

#include <optional>
#include <string>

#include "lcdiag/poly.hpp"

namespace lcdiag {

// Polynomial coefficient in the variables x_1..x_m, log x_1..log x_m,
// y_1..y_n, log y_1..log y_n, and finitely many formal symbols log p for
// primes p. Logs of rational constants are expanded over the prime
// factorization, so rational linear relations between them (log 4 = 2 log 2)
// are exact; beyond that the log symbols are treated as transcendental in
// all exact decisions, and evaluated in floating point only by the oracle
// layer.
class CoeffFn {
 public:
  CoeffFn() = default;
  CoeffFn(std::size_t m, std::size_t n)
      : m_(m), n_(n), poly_(2 * m + 2 * n) {}

  static CoeffFn constant(std::size_t m, std::size_t n, const Rat& c);

  std::size_t m() const { return m_; }
  std::size_t n() const { return n_; }
  const TruncPoly& poly() const { return poly_; }
  const std::vector<unsigned long>& log_primes() const { return log_primes_; }

  std::size_t x_var(std::size_t i) const;
  std::size_t logx_var(std::size_t i) const;
  std::size_t y_var(std::size_t j) const;
  std::size_t logy_var(std::size_t j) const;

  void add_term(const Expo& e, const Rat& c) { poly_.add_term(e, c); }
  bool is_zero() const { return poly_.is_zero(); }

  CoeffFn operator+(const CoeffFn& o) const;
  CoeffFn operator-(const CoeffFn& o) const;
  CoeffFn operator*(const CoeffFn& o) const;
  CoeffFn squared() const { return *this * *this; }
  bool operator==(const CoeffFn& o) const;

  /// log c for a positive rational constant c, expanded over the prime
  /// factorization of c (registers log p symbols as needed).
  static CoeffFn log_const(std::size_t m, std::size_t n, const Rat& c);

  /// True iff the polynomial mentions y_j or log y_j for some j > l.
  bool depends_on_tail(std::size_t l) const;

  /// Substitutes exact x values and the first y_prefix.size() y values.
  /// Each log variable of a substituted coordinate becomes 0 when the value
  /// is 1 and stays formal otherwise (log of a rational other than 1 is
  /// transcendental, so this keeps zero tests exact).
  CoeffFn at_point(const std::vector<Rat>& x,
                   const std::vector<Rat>& y_prefix = {}) const;

  double evaluate(const std::vector<double>& x,
                  const std::vector<double>& y) const;

  /// The x-part coefficients of the expansion in (y, log y)-monomials:
  /// one CoeffFn (free of y and log y variables) per distinct monomial.
  std::vector<CoeffFn> x_coefficients() const;

 private:
  std::size_t logp_var(std::size_t t) const { return 2 * m_ + 2 * n_ + t; }
  void ensure_prime(unsigned long p);
  static void align(CoeffFn& a, CoeffFn& b);

  std::size_t m_ = 0, n_ = 0;
  std::vector<unsigned long> log_primes_;
  TruncPoly poly_{0};
};

// One prepared log-monomial group on an l-rectilinear cell:
//   coeff(x, y) * prod_j y_j^r_j * prod_i (log prod_j y_j^beta_ij)^s_i
// with a unit certified to lie in [unit_lo, unit_hi]. For critical groups
// the coefficient depends only on (x, y_<=l).
struct Group {
  std::string label;
  std::vector<Rat> r;
  std::vector<unsigned> s;
  bool critical = true;
  CoeffFn coeff;
  std::vector<std::vector<Rat>> beta;  // empty means the identity matrix
  Rat unit_lo{1}, unit_hi{1};
};

struct PreparedSum {
  std::size_t m = 0;  // base arity
  std::size_t n = 0;  // fiber arity
  std::size_t l = 0;  // rectilinearity index
  std::vector<Group> groups;
};

enum class CrMode { Generic, Sampled };

/// Validates arities, the critical-coefficient restriction, and the
/// CR-domination condition (in the declared mode; sampled mode checks the
/// supplied (x, y_<=l) points). Throws std::invalid_argument on violation.
void validate_prepared(const PreparedSum& sum, CrMode mode,
                       const std::vector<std::vector<Rat>>& pts = {});

/// Labels of critical groups whose coefficient is not identically zero,
/// generically or after substituting the given base point.
std::vector<std::string> critical_delta(const PreparedSum& sum);
std::vector<std::string> critical_delta(const PreparedSum& sum,
                                        const std::vector<Rat>& x);

struct CriticalProfile {
  // Indexed by i in {l+1..n}, stored from 0. nullopt means +infinity (the
  // empty-set convention, which forces sbar = 0).
  std::vector<std::optional<Rat>> rbar;
  std::vector<unsigned> sbar;
  bool empty() const;
};

/// Componentwise min of r over the groups and max of s among the groups
/// attaining that min, over the tail indices {l+1..n}.
CriticalProfile profile(const PreparedSum& sum,
                        const std::vector<std::string>& labels);

/// Sum of squares of every x-coefficient polynomial appearing in the
/// (y, log y)-expansion of the critical groups: a single function of x
/// whose zero locus is the fiberwise-vanishing locus.
CoeffFn fiber_vanishing_witness(const PreparedSum& sum);

/// Floating evaluation of the sum at an interior point (all y_j in (0,1));
/// unit factors are evaluated as 1 (trivial-unit convention). Throws
/// std::domain_error on boundary points.
double evaluate(const PreparedSum& sum, const std::vector<double>& x,
                const std::vector<double>& y);

}  // namespace lcdiag
