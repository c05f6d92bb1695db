#include "lcdiag/interval.hpp"

#include <tuple>

namespace lcdiag {

Rat qlin_eval(const QLin& v, const Rat& q) {
  if (q <= 0) throw std::domain_error("qlin_eval: q must be positive");
  return v.a + v.b * q;
}

int ext_compare(const ExtValue& x, const ExtValue& y, const Rat& q) {
  if (x.infinite && y.infinite) return 0;
  if (x.infinite) return 1;
  if (y.infinite) return -1;
  const Rat xv = qlin_eval(x.finite, q);
  const Rat yv = qlin_eval(y.finite, q);
  if (xv < yv) return -1;
  if (xv > yv) return 1;
  return 0;
}

PInterval interval_normalize(PInterval v, const Rat& q) {
  // A vacuous lower constraint canonicalizes to the plain 0 decomposition.
  if (!v.lo.infinite && qlin_eval(v.lo.finite, q) <= 0)
    v.lo = ExtValue::of_rat(Rat(0));
  if (v.lo.infinite || ext_compare(v.lo, v.hi, q) >= 0) {
    v.lo = ExtValue::of_rat(Rat(0));
    v.hi = v.lo;
  }
  return v;
}

PInterval solve_halfline(const Rat& r, const QLin& c, const Rat& q) {
  // r·p + c(q) > −1 on p ∈ (0,∞).
  const Rat cv = qlin_eval(c, q);
  PInterval out;
  if (r == 0) {
    if (cv > -1) return PInterval::finite_full();
    return PInterval::empty();
  }
  // Threshold p0 = (−1 − c)/r, decomposed in the span: (−1−a)/r + (−b/r)·q.
  const QLin p0((Rat(-1) - c.a) / r, -c.b / r);
  if (r > 0) {
    out.lo = ExtValue::of(p0);
    out.hi = ExtValue::plus_infinity();
  } else {
    out.lo = ExtValue::of_rat(Rat(0));
    out.hi = ExtValue::of(p0);
  }
  return interval_normalize(out, q);
}

namespace {
// Deterministic choice between endpoints that evaluate equal but carry
// different span decompositions, so that intersection is commutative on the
// nose and not just up to evaluation.
const ExtValue& pick_tie(const ExtValue& x, const ExtValue& y) {
  if (x.infinite || y.infinite) return x;
  if (std::tie(x.finite.a, x.finite.b) <= std::tie(y.finite.a, y.finite.b))
    return x;
  return y;
}
}  // namespace

PInterval interval_intersect(const PInterval& i, const PInterval& j,
                             const Rat& q) {
  PInterval out;
  const int lc = ext_compare(i.lo, j.lo, q);
  out.lo = lc > 0 ? i.lo : lc < 0 ? j.lo : pick_tie(i.lo, j.lo);
  const int hc = ext_compare(i.hi, j.hi, q);
  out.hi = hc < 0 ? i.hi : hc > 0 ? j.hi : pick_tie(i.hi, j.hi);
  out.includes_infinity = i.includes_infinity && j.includes_infinity;
  return interval_normalize(out, q);
}

bool interval_is_empty(const PInterval& v, const Rat& q) {
  if (v.includes_infinity) return false;
  return ext_compare(v.lo, v.hi, q) >= 0;
}

bool interval_contains(const PInterval& v, const Rat& p, const Rat& q) {
  if (p <= 0) return false;
  const ExtValue pv = ExtValue::of_rat(p);
  return ext_compare(v.lo, pv, q) < 0 && ext_compare(pv, v.hi, q) < 0;
}

bool interval_contains_infinity(const PInterval& v) {
  return v.includes_infinity;
}

std::string ext_to_string(const ExtValue& v) {
  if (v.infinite) return "inf";
  if (v.finite.b == 0) return rat_to_string(v.finite.a);
  return rat_to_string(v.finite.a) + " + " + rat_to_string(v.finite.b) + "*q";
}

std::string interval_to_string(const PInterval& v) {
  std::string s = "(" + ext_to_string(v.lo) + ", " + ext_to_string(v.hi) + ")";
  if (v.includes_infinity) s += " u {inf}";
  return s;
}

}  // namespace lcdiag
