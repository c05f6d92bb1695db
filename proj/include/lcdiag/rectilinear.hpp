#pragma once

#include <stdexcept>
#include <vector>

#include "lcdiag/rat.hpp"

namespace lcdiag {

// A pullback step whose precondition fails, named after the violated clause.
struct StepRejected : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Positive real of the form base^(1/root) with rational base. Closed under
// products and rational powers, with exact comparisons; this is exactly the
// coefficient arithmetic the power substitutions need (a rational constant
// acquires a p-th root when y |-> y^p is inverted through a bound).
struct RootRat {
  Rat base{0};
  unsigned long root = 1;

  RootRat() = default;
  RootRat(Rat b, unsigned long r = 1);
  static RootRat one() { return RootRat(Rat(1)); }

  bool is_zero() const { return base == 0; }
  bool is_one() const { return base == 1; }

  RootRat operator*(const RootRat& o) const;
  /// this^e for rational e (e < 0 requires a nonzero value).
  RootRat pow(const Rat& e) const;
  /// -1, 0, +1 comparison of the real values.
  int cmp(const RootRat& o) const;
  double to_double() const;
  /// The exact rational value, when root == 1 after normalization.
  std::optional<Rat> as_rat() const;
};

// coeff * prod_j y_j^{expo_j}. The zero monomial has coeff 0.
struct Monomial {
  RootRat coeff;
  std::vector<Rat> expo;  // arity n, rational exponents

  static Monomial zero(std::size_t n) {
    Monomial m;
    m.expo.assign(n, Rat(0));
    return m;
  }
  static Monomial constant(std::size_t n, RootRat c) {
    Monomial m = zero(n);
    m.coeff = std::move(c);
    return m;
  }

  bool is_zero() const { return coeff.is_zero(); }
  bool is_const() const;
  /// True iff every referenced coordinate has index < j.
  bool supported_below(std::size_t j) const;
  double evaluate(const std::vector<double>& y) const;
};

// Cell over a (suppressed, fixed) base point: for each coordinate j,
// lower_j(y_<j) < y_j < upper_j(y_<j) with monomial bounds. Coordinates
// before l form the rectilinear prefix; an l-rectilinear cell has every
// coordinate from l on bounded by (0, 1).
struct MonCell {
  std::size_t n = 0;
  std::vector<Monomial> lower, upper;
  std::size_t l = 0;

  static MonCell unit_box(std::size_t n);
  bool coordinate_free(std::size_t j) const;
  bool contains(const std::vector<double>& y) const;
};

/// Throws std::invalid_argument unless each bound is supported below its
/// coordinate and lower < upper is plausible (coefficient signs).
void validate_cell(const MonCell& c);

// Bounded map with monomial components c_i * y^{gamma_i}.
struct MonomialMap {
  std::size_t n = 0;
  std::vector<Monomial> comps;
};

struct PullbackStep {
  enum class Kind { Adjustment, Restriction, PowerSub, Blowup, Flip, Swap };
  Kind kind = Kind::Adjustment;
  std::size_t i = 0, j = 0;  // coordinates (0-based); Swap uses both
  unsigned long p = 1;       // PowerSub exponent, >= 1
  Monomial blow;             // Blowup factor, supported below j
  MonCell restricted;        // Restriction target

  static PullbackStep adjustment();
  static PullbackStep restriction(MonCell sub);
  static PullbackStep power_sub(std::size_t j, unsigned long p);
  static PullbackStep blowup(std::size_t j, Monomial b);
  static PullbackStep flip(std::size_t j);
  static PullbackStep swap(std::size_t i, std::size_t j);
};

/// Applies one pullback construction to a cell and map, returning the
/// transformed pair. Throws StepRejected when a precondition fails.
std::pair<MonCell, MonomialMap> apply_step(const MonCell& cell,
                                           const MonomialMap& phi,
                                           const PullbackStep& step);

// |det DF| = |coeff| * y^gamma on the target cell; negative records the
// sign of the determinant itself.
struct Jacobian {
  bool negative = false;
  RootRat coeff = RootRat::one();
  std::vector<Rat> gamma;
};

/// Exact monomial Jacobian of the composed map F (target -> source) defined
/// by the step list.
Jacobian jacobian_of(const std::vector<PullbackStep>& steps, std::size_t n);

/// Evaluates the composed map F at a point of the target cell.
std::vector<double> forward_point(const std::vector<PullbackStep>& steps,
                                  std::vector<double> y);

/// Evaluates F^-1 pointwise (every step is invertible off a null set).
std::vector<double> inverse_point(const std::vector<PullbackStep>& steps,
                                  std::vector<double> y);

struct RectPiece {
  MonCell cell;  // l-rectilinear target
  std::vector<PullbackStep> steps;
  std::size_t l = 0;
  Jacobian jac;
};

/// Decomposes the cell into rectilinear pieces by the six pullback
/// constructions. The piece images are disjoint and cover each fiber up to
/// a null set. Throws StepRejected on unsupported input and ResourceError
/// (from lclass) is not used here; a depth guard throws std::runtime_error.
std::vector<RectPiece> rectilinearize(const MonCell& cell,
                                      const MonomialMap& phi);

/// Forward map of a flip-free piece in closed monomial form: component j is
/// H_j * y^{Gamma row j}. Throws StepRejected when the piece contains a
/// flip.
std::vector<Monomial> monomial_map_of(const RectPiece& piece);

/// Inverse of a monomial coordinate change (square, invertible exponent
/// matrix). Throws std::invalid_argument when the matrix is singular.
std::vector<Monomial> invert_monomial_map(const std::vector<Monomial>& comps);

// c * prod_j y_j^{r_j} (log y_j)^{s_j} with an exact rational coefficient.
struct LogTerm {
  Rat c;
  std::vector<Rat> r;
  std::vector<unsigned> s;
};

// Term produced by composing through a monomial map: the coefficient picks
// up log-constant factors, so it is carried numerically.
struct PushedTerm {
  double c = 0;
  std::vector<Rat> r;
  std::vector<unsigned> s;
  double evaluate(const std::vector<double>& y) const;
};

/// term o (map inverse): expresses a term living on the piece's target cell
/// in the source coordinates. Flip-free pieces only.
std::vector<PushedTerm> pushforward_term(const LogTerm& term,
                                         const RectPiece& piece);

/// term o F: pulls a term on the source cell back to the target cell.
std::vector<PushedTerm> pullback_term(const LogTerm& term,
                                      const RectPiece& piece);

double log_term_evaluate(const LogTerm& t, const std::vector<double>& y);

}  // namespace lcdiag
