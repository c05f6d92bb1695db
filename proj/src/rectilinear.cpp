#include "lcdiag/rectilinear.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

namespace lcdiag {

RootRat::RootRat(Rat b, unsigned long r) : base(std::move(b)), root(r) {
  if (root == 0) throw std::invalid_argument("RootRat with zero root index");
  if (base < 0) throw std::invalid_argument("RootRat of a negative base");
  if (base == 0 || base == 1) {
    root = 1;
    return;
  }
  if (root > 1) {
    if (auto exact = rat_root(base, root)) {
      base = *exact;
      root = 1;
    }
  }
}

RootRat RootRat::operator*(const RootRat& o) const {
  if (is_zero() || o.is_zero()) return RootRat(Rat(0));
  const unsigned long L = std::lcm(root, o.root);
  return RootRat(rat_pow(base, long(L / root)) *
                     rat_pow(o.base, long(L / o.root)),
                 L);
}

RootRat RootRat::pow(const Rat& e) const {
  if (e == 0) return one();
  if (is_zero()) {
    if (e > 0) return RootRat(Rat(0));
    throw std::domain_error("negative power of zero");
  }
  const long num = numerator(e).convert_to<long>();
  const unsigned long den = denominator(e).convert_to<unsigned long>();
  return RootRat(rat_pow(base, num), root * den);
}

int RootRat::cmp(const RootRat& o) const {
  const unsigned long L = std::lcm(root, o.root);
  const Rat a = rat_pow(base, long(L / root));
  const Rat b = rat_pow(o.base, long(L / o.root));
  if (a < b) return -1;
  if (a > b) return 1;
  return 0;
}

double RootRat::to_double() const {
  if (is_zero()) return 0.0;
  return std::pow(rat_to_double(base), 1.0 / double(root));
}

std::optional<Rat> RootRat::as_rat() const {
  if (root == 1) return base;
  return std::nullopt;
}

bool Monomial::is_const() const {
  for (const auto& e : expo)
    if (e != 0) return false;
  return true;
}

bool Monomial::supported_below(std::size_t j) const {
  for (std::size_t i = j; i < expo.size(); ++i)
    if (expo[i] != 0) return false;
  return true;
}

double Monomial::evaluate(const std::vector<double>& y) const {
  double v = coeff.to_double();
  for (std::size_t i = 0; i < expo.size(); ++i)
    if (expo[i] != 0) v *= std::pow(y[i], rat_to_double(expo[i]));
  return v;
}

MonCell MonCell::unit_box(std::size_t n) {
  MonCell c;
  c.n = n;
  c.lower.assign(n, Monomial::zero(n));
  c.upper.assign(n, Monomial::constant(n, RootRat::one()));
  return c;
}

bool MonCell::coordinate_free(std::size_t j) const {
  return lower[j].is_zero() && upper[j].is_const() && upper[j].coeff.is_one();
}

bool MonCell::contains(const std::vector<double>& y) const {
  for (std::size_t j = 0; j < n; ++j) {
    const double lo = lower[j].is_zero() ? 0.0 : lower[j].evaluate(y);
    if (!(lo < y[j] && y[j] < upper[j].evaluate(y))) return false;
  }
  return true;
}

void validate_cell(const MonCell& c) {
  if (c.lower.size() != c.n || c.upper.size() != c.n)
    throw std::invalid_argument("cell bound arity mismatch");
  for (std::size_t j = 0; j < c.n; ++j) {
    if (!c.lower[j].supported_below(j) || !c.upper[j].supported_below(j))
      throw std::invalid_argument("cell bound references a later coordinate");
    if (c.upper[j].is_zero())
      throw std::invalid_argument("upper bound is zero");
  }
}

PullbackStep PullbackStep::adjustment() { return {}; }

PullbackStep PullbackStep::restriction(MonCell sub) {
  PullbackStep s;
  s.kind = Kind::Restriction;
  s.restricted = std::move(sub);
  return s;
}

PullbackStep PullbackStep::power_sub(std::size_t j, unsigned long p) {
  PullbackStep s;
  s.kind = Kind::PowerSub;
  s.j = j;
  s.p = p;
  return s;
}

PullbackStep PullbackStep::blowup(std::size_t j, Monomial b) {
  PullbackStep s;
  s.kind = Kind::Blowup;
  s.j = j;
  s.blow = std::move(b);
  return s;
}

PullbackStep PullbackStep::flip(std::size_t j) {
  PullbackStep s;
  s.kind = Kind::Flip;
  s.j = j;
  return s;
}

PullbackStep PullbackStep::swap(std::size_t i, std::size_t j) {
  PullbackStep s;
  s.kind = Kind::Swap;
  s.i = std::min(i, j);
  s.j = std::max(i, j);
  return s;
}

namespace {

// m * b^e, used when substituting y_j |-> y_j * b into a factor y_j^e.
void scale_by_power(Monomial& m, const Monomial& b, const Rat& e) {
  if (e == 0 || m.is_zero()) return;
  m.coeff = m.coeff * b.coeff.pow(e);
  for (std::size_t i = 0; i < m.expo.size(); ++i) m.expo[i] += e * b.expo[i];
}

void blow_coordinate(Monomial& m, std::size_t j, const Monomial& b) {
  scale_by_power(m, b, m.expo[j]);
}

bool references(const Monomial& m, std::size_t j) {
  return !m.is_zero() && m.expo[j] != 0;
}

bool cell_valid(const MonCell& c) {
  for (std::size_t j = 0; j < c.n; ++j)
    if (!c.lower[j].supported_below(j) || !c.upper[j].supported_below(j))
      return false;
  return true;
}

}  // namespace

std::pair<MonCell, MonomialMap> apply_step(const MonCell& cell,
                                           const MonomialMap& phi,
                                           const PullbackStep& step) {
  MonCell c = cell;
  MonomialMap m = phi;
  using K = PullbackStep::Kind;
  switch (step.kind) {
    case K::Adjustment:
      break;
    case K::Restriction:
      if (step.restricted.n != c.n)
        throw StepRejected("restriction changes the fiber arity");
      validate_cell(step.restricted);
      c = step.restricted;
      break;
    case K::PowerSub: {
      if (step.p < 1) throw StepRejected("power substitution exponent < 1");
      const std::size_t j = step.j;
      const Rat inv(1, long(step.p));
      for (auto* b : {&c.lower[j], &c.upper[j]}) {
        if (b->is_zero()) continue;
        b->coeff = b->coeff.pow(inv);
        for (auto& e : b->expo) e *= inv;
      }
      for (std::size_t k = j + 1; k < c.n; ++k) {
        c.lower[k].expo[j] *= long(step.p);
        c.upper[k].expo[j] *= long(step.p);
      }
      for (auto& comp : m.comps) comp.expo[j] *= long(step.p);
      break;
    }
    case K::Blowup: {
      const std::size_t j = step.j;
      const Monomial& b = step.blow;
      if (b.is_zero() || !b.supported_below(j))
        throw StepRejected("blowup factor must be supported below its "
                           "coordinate and nonzero");
      // bounds of j divide by b; later bounds and comps substitute.
      for (auto* bd : {&c.lower[j], &c.upper[j]}) scale_by_power(*bd, b, -1);
      for (std::size_t k = j + 1; k < c.n; ++k) {
        blow_coordinate(c.lower[k], j, b);
        blow_coordinate(c.upper[k], j, b);
      }
      for (auto& comp : m.comps) blow_coordinate(comp, j, b);
      break;
    }
    case K::Flip: {
      const std::size_t j = step.j;
      if (!(c.upper[j].is_const() && c.upper[j].coeff.is_one()))
        throw StepRejected("flip requires upper bound 1");
      if (!c.lower[j].is_const())
        throw StepRejected("flip requires a constant lower bound");
      auto a = c.lower[j].coeff.as_rat();
      if (!a || !(*a >= 0 && *a < 1))
        throw StepRejected("flip requires a rational lower bound in [0,1)");
      for (std::size_t k = j + 1; k < c.n; ++k)
        if (references(c.lower[k], j) || references(c.upper[k], j))
          throw StepRejected("flip of a coordinate referenced by a later "
                             "bound");
      for (const auto& comp : m.comps)
        if (references(comp, j))
          throw StepRejected("flip of a coordinate referenced by the map");
      c.lower[j] = Monomial::zero(c.n);
      c.upper[j] = Monomial::constant(c.n, RootRat(1 - *a));
      break;
    }
    case K::Swap: {
      const std::size_t i = step.i, j = step.j;
      if (i == j) break;
      const bool pattern = c.coordinate_free(i) && c.upper[j].is_const() &&
                           c.upper[j].coeff.is_one() &&
                           !c.lower[j].is_zero() &&
                           c.lower[j].coeff.is_one() &&
                           [&] {
                             for (std::size_t t = 0; t < c.n; ++t)
                               if (c.lower[j].expo[t] != (t == i ? 1 : 0))
                                 return false;
                             return true;
                           }();
      std::swap(c.lower[i], c.lower[j]);
      std::swap(c.upper[i], c.upper[j]);
      for (auto* v : {&c.lower, &c.upper})
        for (auto& b : *v) std::swap(b.expo[i], b.expo[j]);
      for (auto& comp : m.comps) std::swap(comp.expo[i], comp.expo[j]);
      if (!cell_valid(c)) {
        if (!pattern) throw StepRejected("swap image is not a cell");
        // {0 < y_i < 1, y_i < y_j < 1} pulls back to {0 < y_i < 1,
        // 0 < y_j < y_i} under the swap.
        c.lower[i] = Monomial::zero(c.n);
        c.upper[i] = Monomial::constant(c.n, RootRat::one());
        c.lower[j] = Monomial::zero(c.n);
        c.upper[j] = Monomial::constant(c.n, RootRat::one());
        c.upper[j].expo[i] = 1;
        if (!cell_valid(c)) throw StepRejected("swap image is not a cell");
      }
      break;
    }
  }
  return {std::move(c), std::move(m)};
}

Jacobian jacobian_of(const std::vector<PullbackStep>& steps, std::size_t n) {
  Jacobian jac;
  jac.gamma.assign(n, Rat(0));
  using K = PullbackStep::Kind;
  for (const auto& s : steps) {
    switch (s.kind) {
      case K::Adjustment:
      case K::Restriction:
        break;
      case K::PowerSub:
        jac.gamma[s.j] *= long(s.p);
        jac.coeff = jac.coeff * RootRat(Rat(long(s.p)));
        jac.gamma[s.j] += long(s.p) - 1;
        break;
      case K::Blowup: {
        const Rat g = jac.gamma[s.j];
        jac.coeff = jac.coeff * s.blow.coeff.pow(g) * s.blow.coeff;
        for (std::size_t i = 0; i < n; ++i)
          jac.gamma[i] += (g + 1) * s.blow.expo[i];
        break;
      }
      case K::Flip:
        if (jac.gamma[s.j] != 0)
          throw StepRejected("flip after a step whose Jacobian references "
                             "the flipped coordinate");
        jac.negative = !jac.negative;
        break;
      case K::Swap:
        if (s.i != s.j) {
          std::swap(jac.gamma[s.i], jac.gamma[s.j]);
          jac.negative = !jac.negative;
        }
        break;
    }
  }
  return jac;
}

std::vector<double> forward_point(const std::vector<PullbackStep>& steps,
                                  std::vector<double> y) {
  using K = PullbackStep::Kind;
  for (auto it = steps.rbegin(); it != steps.rend(); ++it) {
    switch (it->kind) {
      case K::Adjustment:
      case K::Restriction:
        break;
      case K::PowerSub:
        y[it->j] = std::pow(y[it->j], double(it->p));
        break;
      case K::Blowup:
        y[it->j] *= it->blow.evaluate(y);
        break;
      case K::Flip:
        y[it->j] = 1.0 - y[it->j];
        break;
      case K::Swap:
        std::swap(y[it->i], y[it->j]);
        break;
    }
  }
  return y;
}

std::vector<double> inverse_point(const std::vector<PullbackStep>& steps,
                                  std::vector<double> y) {
  using K = PullbackStep::Kind;
  for (const auto& s : steps) {
    switch (s.kind) {
      case K::Adjustment:
      case K::Restriction:
        break;
      case K::PowerSub:
        y[s.j] = std::pow(y[s.j], 1.0 / double(s.p));
        break;
      case K::Blowup:
        y[s.j] /= s.blow.evaluate(y);
        break;
      case K::Flip:
        y[s.j] = 1.0 - y[s.j];
        break;
      case K::Swap:
        std::swap(y[s.i], y[s.j]);
        break;
    }
  }
  return y;
}

namespace {

// The comparison constant of the proof's case splits: any rational greater
// than the supremum of the (trivial) unit range works, and 3/2 keeps the
// split nondegenerate for lower bounds as large as 2/3.
const Rat kCnum(3, 2);
const Rat kCinv(2, 3);

struct DriverState {
  MonCell cell;
  MonomialMap phi;
  std::vector<PullbackStep> steps;
  std::size_t l = 0;
};

void push(DriverState& st, PullbackStep step) {
  auto [c, m] = apply_step(st.cell, st.phi, step);
  st.cell = std::move(c);
  st.phi = std::move(m);
  st.steps.push_back(std::move(step));
}

class Driver {
 public:
  explicit Driver(std::vector<RectPiece>& out) : out_(out) {}

  void process(DriverState st, std::size_t d, int depth, int subdiv) {
    if (depth > 400)
      throw std::runtime_error("rectilinearization recursion depth exceeded");
    const std::size_t n = st.cell.n;
    if (d == n) {
      RectPiece piece;
      piece.l = st.l;
      st.cell.l = st.l;
      piece.jac = jacobian_of(st.steps, n);
      piece.cell = std::move(st.cell);
      piece.steps = std::move(st.steps);
      out_.push_back(std::move(piece));
      return;
    }
    // Normalize b_d = 1 by a blowup.
    if (!(st.cell.upper[d].is_const() && st.cell.upper[d].coeff.is_one()))
      push(st, PullbackStep::blowup(d, st.cell.upper[d]));

    if (st.cell.lower[d].is_zero()) {  // Case a_d = 0: free coordinate
      process(std::move(st), d + 1, depth + 1, subdiv);
      return;
    }

    // Naturalize the free-coordinate exponents of a_d by power
    // substitutions.
    for (std::size_t j = st.l; j < d; ++j) {
      const Rat e = st.cell.lower[d].expo[j];
      if (e < 0)
        throw StepRejected("negative free-coordinate exponent in a lower "
                           "bound");
      if (!is_integer(e))
        push(st, PullbackStep::power_sub(
                     j, denominator(e).convert_to<unsigned long>()));
    }

    std::vector<std::size_t> supp;
    for (std::size_t j = st.l; j < d; ++j)
      if (st.cell.lower[d].expo[j] > 0) supp.push_back(j);

    if (supp.empty()) {
      supp_empty(std::move(st), d, depth, subdiv);
      return;
    }

    // Nonempty support: swap a supporting coordinate to position l, make
    // its exponent 1 by a power substitution in y_d, then the three-set
    // split of the proof.
    if (st.cell.lower[d].expo[st.l] == 0)
      push(st, PullbackStep::swap(st.l, supp.front()));
    const Rat p = st.cell.lower[d].expo[st.l];
    if (p > 1)
      push(st, PullbackStep::power_sub(
                   d, numerator(p).convert_to<unsigned long>()));

    const std::size_t l = st.l;
    const Monomial a = st.cell.lower[d];
    Monomial cyl = Monomial::zero(n);  // C * y_l
    cyl.coeff = RootRat(kCnum);
    cyl.expo[l] = 1;

    {  // set 1: C^-1 < y_l < 1 -- coordinate l joins the prefix
      DriverState s1 = st;
      MonCell r = s1.cell;
      r.lower[l] = Monomial::constant(n, RootRat(kCinv));
      push(s1, PullbackStep::restriction(std::move(r)));
      s1.l = l + 1;
      process(std::move(s1), d, depth + 1, subdiv);
    }
    {  // set 2: y_l < C^-1 and a < y_d < C y_l
      DriverState s2 = st;
      MonCell r = s2.cell;
      r.upper[l] = Monomial::constant(n, RootRat(kCinv));
      r.upper[d] = cyl;
      push(s2, PullbackStep::restriction(std::move(r)));
      push(s2, PullbackStep::blowup(
                   l, Monomial::constant(n, RootRat(kCinv))));
      process(std::move(s2), d, depth + 1, subdiv);
    }
    {  // set 3: y_l < C^-1 and C y_l < y_d < 1
      DriverState s3 = st;
      MonCell r = s3.cell;
      r.upper[l] = Monomial::constant(n, RootRat(kCinv));
      r.lower[d] = cyl;
      push(s3, PullbackStep::restriction(std::move(r)));
      push(s3, PullbackStep::blowup(
                   l, Monomial::constant(n, RootRat(kCinv))));
      push(s3, PullbackStep::swap(l, d));
      process(std::move(s3), d, depth + 1, subdiv);
    }
  }

 private:
  // a_d > 0 references only prefix coordinates. Either the fiber values of
  // y_d stay away from 0 (Case 2: flip or swap into the prefix), or we
  // split at the comparison monomial M = C * a_d.
  void supp_empty(DriverState st, std::size_t d, int depth, int subdiv) {
    const std::size_t n = st.cell.n;
    const Monomial a = st.cell.lower[d];

    if (a.is_const()) {
      if (a.coeff.cmp(RootRat(kCinv)) >= 0) {
        case2(std::move(st), d, depth);
        return;
      }
      Monomial m = a;
      m.coeff = m.coeff * RootRat(kCnum);
      split_at(std::move(st), d, m, depth, subdiv);
      return;
    }

    // range bounds of a over the prefix region via constant coordinate
    // bounds; exponents must be >= 0 so the bounds are monotone.
    for (std::size_t i = 0; i < st.l; ++i)
      if (a.expo[i] < 0)
        throw StepRejected("negative prefix exponent in a lower bound");
    RootRat sup = a.coeff, inf = a.coeff;
    bool sup_known = true, inf_known = true;
    for (std::size_t i = 0; i < st.l; ++i) {
      if (a.expo[i] == 0) continue;
      const Monomial& hi = st.cell.upper[i];
      if (hi.is_const())
        sup = sup * hi.coeff.pow(a.expo[i]);
      else
        sup_known = false;
      const Monomial& lo = st.cell.lower[i];
      if (!lo.is_zero() && lo.is_const())
        inf = inf * lo.coeff.pow(a.expo[i]);
      else
        inf_known = false;
    }
    if (sup_known && sup.cmp(RootRat(kCinv)) <= 0) {  // C * a < 1 uniformly
      Monomial m = a;
      m.coeff = m.coeff * RootRat(kCnum);
      split_at(std::move(st), d, m, depth, subdiv);
      return;
    }
    if (inf_known && inf.cmp(RootRat(kCinv)) >= 0) {
      case2(std::move(st), d, depth);
      return;
    }
    // Subdivide a prefix coordinate with constant bounds at its midpoint
    // until the comparison is uniform.
    if (subdiv >= 12)
      throw StepRejected("comparison subdivision depth exceeded");
    for (std::size_t i = 0; i < st.l; ++i) {
      if (a.expo[i] == 0) continue;
      const Monomial &lo = st.cell.lower[i], &hi = st.cell.upper[i];
      if (!hi.is_const() || !(lo.is_zero() || lo.is_const())) continue;
      auto lo_r = lo.is_zero() ? Rat(0) : lo.coeff.as_rat().value_or(Rat(-1));
      auto hi_r = hi.coeff.as_rat().value_or(Rat(-1));
      if (lo_r < 0 || hi_r <= lo_r) continue;
      const Rat mid = (lo_r + hi_r) / 2;
      for (int side = 0; side < 2; ++side) {
        DriverState s = st;
        MonCell r = s.cell;
        (side == 0 ? r.upper[i] : r.lower[i]) =
            Monomial::constant(n, RootRat(mid));
        push(s, PullbackStep::restriction(std::move(r)));
        process(std::move(s), d, depth + 1, subdiv + 1);
      }
      return;
    }
    throw StepRejected("cannot decide the lower-bound comparison");
  }

  void split_at(DriverState st, std::size_t d, const Monomial& m, int depth,
                int subdiv) {
    const std::size_t n = st.cell.n;
    {  // a_d < y_d < M: blow up by M; the new lower bound is the constant
       // 1/C, so the fiber values stay away from 0.
      DriverState s = st;
      MonCell r = s.cell;
      r.upper[d] = m;
      push(s, PullbackStep::restriction(std::move(r)));
      push(s, PullbackStep::blowup(d, m));
      case2(std::move(s), d, depth);
    }
    {  // M < y_d < 1: swap straight into the prefix
      DriverState s = st;
      MonCell r = s.cell;
      r.lower[d] = m;
      push(s, PullbackStep::restriction(std::move(r)));
      swap_into_prefix(std::move(s), d, depth);
    }
    (void)n;
    (void)subdiv;
  }

  // Closure of the y_d fiber values lies in (0,1]: flip when the bound is a
  // rational constant and nothing downstream references y_d, otherwise the
  // coordinate joins the prefix.
  void case2(DriverState st, std::size_t d, int depth) {
    const std::size_t n = st.cell.n;
    const Monomial& a = st.cell.lower[d];
    bool flip_ok = a.is_const() && a.coeff.as_rat().has_value() &&
                   *a.coeff.as_rat() < 1;
    for (std::size_t k = d + 1; k < n && flip_ok; ++k)
      flip_ok = !references(st.cell.lower[k], d) &&
                !references(st.cell.upper[k], d);
    for (const auto& comp : st.phi.comps)
      if (references(comp, d)) flip_ok = false;
    // A flip cannot be pulled through a Jacobian factor in y_d (left by a
    // power substitution in y_d).
    if (flip_ok && jacobian_of(st.steps, n).gamma[d] != 0) flip_ok = false;
    if (flip_ok) {
      const Rat one_minus = 1 - *a.coeff.as_rat();
      push(st, PullbackStep::flip(d));
      push(st, PullbackStep::blowup(
                   d, Monomial::constant(n, RootRat(one_minus))));
      process(std::move(st), d + 1, depth + 1, 0);
      return;
    }
    swap_into_prefix(std::move(st), d, depth);
  }

  void swap_into_prefix(DriverState st, std::size_t d, int depth) {
    if (st.l < d) push(st, PullbackStep::swap(st.l, d));
    st.l += 1;
    process(std::move(st), d + 1, depth + 1, 0);
  }

  std::vector<RectPiece>& out_;
};

}  // namespace

std::vector<RectPiece> rectilinearize(const MonCell& cell,
                                      const MonomialMap& phi) {
  validate_cell(cell);
  if (phi.n != cell.n) throw std::invalid_argument("map arity mismatch");
  for (const auto& comp : phi.comps)
    if (comp.expo.size() != cell.n)
      throw std::invalid_argument("map component arity mismatch");
  std::vector<RectPiece> out;
  Driver driver(out);
  DriverState st{cell, phi, {}, cell.l};
  driver.process(std::move(st), cell.l, 0, 0);
  return out;
}

std::vector<Monomial> monomial_map_of(const RectPiece& piece) {
  const std::size_t n = piece.cell.n;
  std::vector<Monomial> comps;
  for (std::size_t j = 0; j < n; ++j) {
    Monomial id = Monomial::zero(n);
    id.coeff = RootRat::one();
    id.expo[j] = 1;
    comps.push_back(std::move(id));
  }
  using K = PullbackStep::Kind;
  for (const auto& s : piece.steps) {
    switch (s.kind) {
      case K::Adjustment:
      case K::Restriction:
        break;
      case K::PowerSub:
        for (auto& c : comps) c.expo[s.j] *= long(s.p);
        break;
      case K::Blowup:
        for (auto& c : comps) blow_coordinate(c, s.j, s.blow);
        break;
      case K::Flip:
        throw StepRejected("piece with a flip has no monomial forward map");
      case K::Swap:
        for (auto& c : comps) std::swap(c.expo[s.i], c.expo[s.j]);
        break;
    }
  }
  return comps;
}

std::vector<Monomial> invert_monomial_map(
    const std::vector<Monomial>& comps) {
  const std::size_t n = comps.size();
  // Invert the exponent matrix over Q by Gauss-Jordan elimination.
  std::vector<std::vector<Rat>> g(n, std::vector<Rat>(2 * n, Rat(0)));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) g[i][j] = comps[i].expo[j];
    g[i][n + i] = 1;
  }
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    while (piv < n && g[piv][col] == 0) ++piv;
    if (piv == n)
      throw std::invalid_argument("monomial map is not invertible");
    std::swap(g[col], g[piv]);
    const Rat d = g[col][col];
    for (auto& v : g[col]) v /= d;
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col || g[r][col] == 0) continue;
      const Rat f = g[r][col];
      for (std::size_t c = 0; c < 2 * n; ++c) g[r][c] -= f * g[col][c];
    }
  }
  // y_j (source) = H'_j * prod_i y_i^{Inv_ji} with
  // H'_j = prod_i H_i^{-Inv_ji}.
  std::vector<Monomial> inv;
  for (std::size_t j = 0; j < n; ++j) {
    Monomial c = Monomial::zero(n);
    c.coeff = RootRat::one();
    for (std::size_t i = 0; i < n; ++i) {
      // Inv_ji = entry (j, n+i)? Careful: rows of Inv act on (y - log H).
      const Rat w = g[j][n + i];
      c.expo[i] = w;
      c.coeff = c.coeff * comps[i].coeff.pow(-w);
    }
    inv.push_back(std::move(c));
  }
  return inv;
}

double PushedTerm::evaluate(const std::vector<double>& y) const {
  double v = c;
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (r[i] != 0) v *= std::pow(y[i], rat_to_double(r[i]));
    for (unsigned k = 0; k < s[i]; ++k) v *= std::log(y[i]);
  }
  return v;
}

double log_term_evaluate(const LogTerm& t, const std::vector<double>& y) {
  double v = rat_to_double(t.c);
  for (std::size_t i = 0; i < t.r.size(); ++i) {
    if (t.r[i] != 0) v *= std::pow(y[i], rat_to_double(t.r[i]));
    for (unsigned k = 0; k < t.s[i]; ++k) v *= std::log(y[i]);
  }
  return v;
}

namespace {

// Sparse polynomial in the n formal variables log y_1 .. log y_n with
// numeric coefficients, used for the multinomial log expansions.
using LogPoly = std::map<std::vector<unsigned>, double>;

LogPoly log_poly_mul(const LogPoly& a, const LogPoly& b) {
  LogPoly out;
  for (const auto& [ea, ca] : a)
    for (const auto& [eb, cb] : b) {
      std::vector<unsigned> e = ea;
      for (std::size_t i = 0; i < e.size(); ++i) e[i] += eb[i];
      out[e] += ca * cb;
    }
  return out;
}

std::vector<PushedTerm> compose_term(const LogTerm& term,
                                     const std::vector<Monomial>& comps) {
  const std::size_t n = comps.size();
  if (term.r.size() != n || term.s.size() != n)
    throw std::invalid_argument("term arity mismatch");
  // Monomial part: prod_j (H_j y^{gamma_j})^{r_j}.
  std::vector<Rat> r_out(n, Rat(0));
  double c_out = rat_to_double(term.c);
  for (std::size_t j = 0; j < n; ++j) {
    if (term.r[j] == 0) continue;
    c_out *= comps[j].coeff.pow(term.r[j]).to_double();
    for (std::size_t i = 0; i < n; ++i)
      r_out[i] += term.r[j] * comps[j].expo[i];
  }
  // Log part: prod_j (log H_j + sum_i gamma_ji log y_i)^{s_j}.
  LogPoly acc{{std::vector<unsigned>(n, 0), 1.0}};
  for (std::size_t j = 0; j < n; ++j) {
    if (term.s[j] == 0) continue;
    LogPoly lin;
    lin[std::vector<unsigned>(n, 0)] = std::log(comps[j].coeff.to_double());
    for (std::size_t i = 0; i < n; ++i) {
      if (comps[j].expo[i] == 0) continue;
      std::vector<unsigned> e(n, 0);
      e[i] = 1;
      lin[e] += rat_to_double(comps[j].expo[i]);
    }
    for (unsigned k = 0; k < term.s[j]; ++k) acc = log_poly_mul(acc, lin);
  }
  std::vector<PushedTerm> out;
  for (const auto& [e, coef] : acc) {
    if (coef == 0) continue;
    PushedTerm t;
    t.c = c_out * coef;
    t.r = r_out;
    t.s = e;
    out.push_back(std::move(t));
  }
  return out;
}

}  // namespace

std::vector<PushedTerm> pushforward_term(const LogTerm& term,
                                         const RectPiece& piece) {
  return compose_term(term, invert_monomial_map(monomial_map_of(piece)));
}

std::vector<PushedTerm> pullback_term(const LogTerm& term,
                                      const RectPiece& piece) {
  return compose_term(term, monomial_map_of(piece));
}

}  // namespace lcdiag
