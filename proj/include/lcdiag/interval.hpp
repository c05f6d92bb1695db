#pragma once

#include <string>

#include "lcdiag/rat.hpp"

namespace lcdiag {

// a + b·q for a fixed positive rational parameter q. Interval endpoints live
// in this span, so we keep the decomposition around instead of collapsing to
// a plain rational.
struct QLin {
  Rat a;
  Rat b;

  QLin() = default;
  QLin(Rat a_, Rat b_) : a(std::move(a_)), b(std::move(b_)) {}

  bool operator==(const QLin& o) const { return a == o.a && b == o.b; }
};

/// Exact value of a + b·q. Throws on q <= 0.
Rat qlin_eval(const QLin& v, const Rat& q);

// Endpoint of a p-interval: a finite span element or +infinity.
struct ExtValue {
  bool infinite = false;
  QLin finite;  // meaningful only when !infinite

  static ExtValue plus_infinity() {
    ExtValue e;
    e.infinite = true;
    return e;
  }
  static ExtValue of(QLin v) {
    ExtValue e;
    e.finite = std::move(v);
    return e;
  }
  static ExtValue of_rat(Rat r) { return of(QLin(std::move(r), Rat(0))); }

  bool operator==(const ExtValue& o) const {
    if (infinite != o.infinite) return false;
    return infinite || finite == o.finite;
  }
};

/// Total order on endpoints once q > 0 is fixed: finite values compare by
/// evaluation, +infinity dominates.
int ext_compare(const ExtValue& x, const ExtValue& y, const Rat& q);

// Open subinterval (lo, hi) of (0,∞), plus an isolated {∞} when flagged.
// Half-closed intervals are deliberately unrepresentable: the finite part of
// every integrability locus we compute is open.
struct PInterval {
  ExtValue lo = ExtValue::of_rat(Rat(0));
  ExtValue hi = ExtValue::of_rat(Rat(0));
  bool includes_infinity = false;

  // Canonical empty: (0, 0), no infinity. All empty finite parts with the
  // flag clear normalize to this.
  static PInterval empty() { return PInterval{}; }
  static PInterval full_with_infinity() {
    PInterval r;
    r.hi = ExtValue::plus_infinity();
    r.includes_infinity = true;
    return r;
  }
  static PInterval finite_full() {
    PInterval r;
    r.hi = ExtValue::plus_infinity();
    return r;
  }

  bool operator==(const PInterval& o) const {
    return lo == o.lo && hi == o.hi && includes_infinity == o.includes_infinity;
  }
};

/// Clamps lo below at 0 and collapses empty finite parts to the canonical
/// form, keeping the infinity flag.
PInterval interval_normalize(PInterval v, const Rat& q);

/// {p ∈ (0,∞) : r·p + c(q) > −1}, with includes_infinity = false. Finite
/// endpoints produced by the division by r carry their span decomposition.
PInterval solve_halfline(const Rat& r, const QLin& c, const Rat& q);

PInterval interval_intersect(const PInterval& i, const PInterval& j,
                             const Rat& q);

bool interval_is_empty(const PInterval& v, const Rat& q);
bool interval_contains(const PInterval& v, const Rat& p, const Rat& q);
bool interval_contains_infinity(const PInterval& v);

std::string ext_to_string(const ExtValue& v);
std::string interval_to_string(const PInterval& v);

}  // namespace lcdiag
