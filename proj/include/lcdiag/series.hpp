#pragma once

#include <map>
#include <tuple>

#include "lcdiag/dickson.hpp"
#include "lcdiag/poly.hpp"

namespace lcdiag {

// f(x,y,z) = sum over z-exponents alpha of f_alpha(x,y)·z^alpha, with
// finitely many nonzero coefficient polynomials.
struct CoeffFamily {
  std::size_t xy_arity = 0;
  std::size_t k = 0;  // z-block arity
  std::map<MultiIndex, TruncPoly> coeffs;

  const TruncPoly* find(const MultiIndex& a) const {
    auto it = coeffs.find(a);
    return it == coeffs.end() ? nullptr : &it->second;
  }
  /// The whole family as one polynomial in (x,y,z), z-variables appended.
  TruncPoly combined() const;
};

struct NcTail {
  MultiIndex beta;
  UpsetPart part;
  // Tail series in (x,y,z): sum over alpha in the part of
  // f_alpha(x,y)·z^(alpha-beta).
  TruncPoly tail;
};

struct SplitResult {
  std::vector<std::pair<MultiIndex, TruncPoly>> critical;  // (alpha, f_alpha)
  std::vector<NcTail> noncritical;
};

enum class FamilyMode { Generic, Sampled };

/// Minimal antichain of {alpha : f_alpha(pt) != 0}, by exact evaluation.
std::vector<MultiIndex> pointwise_min_support(const CoeffFamily& fam,
                                              const std::vector<Rat>& pt);

/// Generic mode: min_antichain of {alpha : f_alpha not identically 0}.
/// Sampled mode: deduplicated union of pointwise minimal supports over the
/// given points (not re-minimized: the union of fiberwise minimal supports
/// is generally not an antichain, and downstream splitting wants all of it).
std::vector<MultiIndex> dickson_union(const CoeffFamily& fam, FamilyMode mode,
                                      const std::vector<std::vector<Rat>>& pts = {});

/// Splits the family into critical terms indexed by m_cr and noncritical
/// tails indexed by the minimal members of partition_complement(m_cr).
/// m_cr is taken literally and need not be an antichain (the union of
/// fiberwise minimal supports usually is not one); it must support the
/// family: every nonzero coefficient's exponent lies in [m_cr].
SplitResult critical_split(const CoeffFamily& fam,
                           const std::vector<MultiIndex>& m_cr);

// Collapsed coefficients of sum g_i(x, x^t, x^(1-t))·(log x)^i: the exponent
// of x^(k+lt) collects all monomial exponents gamma with gamma1+gamma3 = k
// and gamma2-gamma3 = l.
using CollapsedTable = std::map<std::tuple<unsigned, long, long>, Rat>;

CollapsedTable collapse_series(const std::map<unsigned, TruncPoly>& g);

struct LeadingAsym {
  long p = 0;
  long q = 0;
  unsigned r = 0;
  Rat a;
  Rat eps;
};

/// Lexicographic-minimum admissible exponent (k+l >= 0, nonzero entry),
/// largest log power there, its coefficient, and eps = 1/(p+q+1).
/// Throws std::domain_error when no admissible entry exists.
LeadingAsym leading_asymptotics(const CollapsedTable& table);

}  // namespace lcdiag
