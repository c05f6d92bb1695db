#include "lcdiag/prepared.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace lcdiag {

std::size_t CoeffFn::x_var(std::size_t i) const {
  if (i >= m_) throw std::out_of_range("x variable index");
  return i;
}
std::size_t CoeffFn::logx_var(std::size_t i) const {
  if (i >= m_) throw std::out_of_range("log x variable index");
  return m_ + i;
}
std::size_t CoeffFn::y_var(std::size_t j) const {
  if (j >= n_) throw std::out_of_range("y variable index");
  return 2 * m_ + j;
}
std::size_t CoeffFn::logy_var(std::size_t j) const {
  if (j >= n_) throw std::out_of_range("log y variable index");
  return 2 * m_ + n_ + j;
}

CoeffFn CoeffFn::constant(std::size_t m, std::size_t n, const Rat& c) {
  CoeffFn f(m, n);
  f.add_term(Expo(2 * m + 2 * n, 0), c);
  return f;
}

void CoeffFn::ensure_prime(unsigned long p) {
  if (std::find(log_primes_.begin(), log_primes_.end(), p) !=
      log_primes_.end())
    return;
  log_primes_.push_back(p);
  std::vector<std::size_t> where(poly_.arity());
  for (std::size_t i = 0; i < where.size(); ++i) where[i] = i;
  poly_ = poly_.embed(poly_.arity() + 1, where);
}

void CoeffFn::align(CoeffFn& a, CoeffFn& b) {
  if (a.m_ != b.m_ || a.n_ != b.n_)
    throw std::invalid_argument("coefficient universes differ");
  for (unsigned long p : b.log_primes_) a.ensure_prime(p);
  // Re-embed b into a's (now superset) prime ordering.
  std::vector<std::size_t> where(b.poly_.arity());
  for (std::size_t i = 0; i < 2 * b.m_ + 2 * b.n_; ++i) where[i] = i;
  for (std::size_t t = 0; t < b.log_primes_.size(); ++t) {
    auto it = std::find(a.log_primes_.begin(), a.log_primes_.end(),
                        b.log_primes_[t]);
    where[2 * b.m_ + 2 * b.n_ + t] =
        2 * a.m_ + 2 * a.n_ + std::size_t(it - a.log_primes_.begin());
  }
  b.poly_ = b.poly_.embed(a.poly_.arity(), where);
  b.log_primes_ = a.log_primes_;
}

CoeffFn CoeffFn::operator+(const CoeffFn& o) const {
  CoeffFn a = *this, b = o;
  align(a, b);
  a.poly_ = a.poly_ + b.poly_;
  return a;
}

CoeffFn CoeffFn::operator-(const CoeffFn& o) const {
  CoeffFn a = *this, b = o;
  align(a, b);
  a.poly_ = a.poly_ - b.poly_;
  return a;
}

CoeffFn CoeffFn::operator*(const CoeffFn& o) const {
  CoeffFn a = *this, b = o;
  align(a, b);
  a.poly_ = a.poly_ * b.poly_;
  return a;
}

bool CoeffFn::operator==(const CoeffFn& o) const {
  CoeffFn a = *this, b = o;
  align(a, b);
  return a.poly_ == b.poly_;
}

namespace {
// Trial-division prime factorization; coefficients are desk-scale.
std::map<unsigned long, long> factor(BigInt v) {
  if (v <= 0) throw std::domain_error("factor: positive integers only");
  std::map<unsigned long, long> out;
  for (unsigned long p = 2; BigInt(p) * p <= v; p += (p == 2 ? 1 : 2)) {
    while (v % p == 0) {
      ++out[p];
      v /= p;
    }
  }
  if (v > 1) out[v.convert_to<unsigned long>()] += 1;
  return out;
}
}  // namespace

CoeffFn CoeffFn::log_const(std::size_t m, std::size_t n, const Rat& c) {
  if (c <= 0) throw std::domain_error("log_const: positive constants only");
  CoeffFn f(m, n);
  std::map<unsigned long, long> exps;
  for (const auto& [p, e] : factor(numerator(c))) exps[p] += e;
  for (const auto& [p, e] : factor(denominator(c))) exps[p] -= e;
  for (const auto& [p, e] : exps) {
    if (e == 0) continue;
    f.ensure_prime(p);
    Expo expo(f.poly_.arity(), 0);
    auto it = std::find(f.log_primes_.begin(), f.log_primes_.end(), p);
    expo[f.logp_var(std::size_t(it - f.log_primes_.begin()))] = 1;
    f.add_term(expo, Rat(e));
  }
  return f;
}

bool CoeffFn::depends_on_tail(std::size_t l) const {
  for (const auto& [e, c] : poly_.terms())
    for (std::size_t j = l; j < n_; ++j)
      if (e[y_var(j)] || e[logy_var(j)]) return true;
  return false;
}

CoeffFn CoeffFn::at_point(const std::vector<Rat>& x,
                          const std::vector<Rat>& y_prefix) const {
  if (x.size() != m_) throw std::invalid_argument("at_point: x arity");
  if (y_prefix.size() > n_) throw std::invalid_argument("at_point: y arity");
  std::vector<std::optional<Rat>> vals(poly_.arity());
  for (std::size_t i = 0; i < m_; ++i) {
    vals[x_var(i)] = x[i];
    if (x[i] == 1) vals[logx_var(i)] = Rat(0);
  }
  for (std::size_t j = 0; j < y_prefix.size(); ++j) {
    vals[y_var(j)] = y_prefix[j];
    if (y_prefix[j] == 1) vals[logy_var(j)] = Rat(0);
  }
  CoeffFn out = *this;
  out.poly_ = poly_.substitute(vals);
  return out;
}

double CoeffFn::evaluate(const std::vector<double>& x,
                         const std::vector<double>& y) const {
  if (x.size() != m_ || y.size() != n_)
    throw std::invalid_argument("evaluate: arity");
  std::vector<double> pt(poly_.arity());
  for (std::size_t i = 0; i < m_; ++i) {
    pt[x_var(i)] = x[i];
    pt[logx_var(i)] = std::log(x[i]);
  }
  for (std::size_t j = 0; j < n_; ++j) {
    pt[y_var(j)] = y[j];
    pt[logy_var(j)] = std::log(y[j]);
  }
  for (std::size_t t = 0; t < log_primes_.size(); ++t)
    pt[logp_var(t)] = std::log(double(log_primes_[t]));
  return poly_.evaluate_double(pt);
}

namespace {

// (r_{>l}, s_{>l}) with rationals, for grouping and domination comparisons.
struct TailKey {
  std::vector<Rat> r;
  std::vector<unsigned> s;
  bool operator<(const TailKey& o) const {
    if (r != o.r) return std::lexicographical_compare(r.begin(), r.end(),
                                                      o.r.begin(), o.r.end());
    return s < o.s;
  }
};

TailKey tail_key(const PreparedSum& sum, const Group& g) {
  TailKey k;
  k.r.assign(g.r.begin() + sum.l, g.r.end());
  k.s.assign(g.s.begin() + sum.l, g.s.end());
  return k;
}

bool r_leq(const std::vector<Rat>& a, const std::vector<Rat>& b) {
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] > b[i]) return false;
  return true;
}

void check_arities(const PreparedSum& sum) {
  for (const auto& g : sum.groups) {
    if (g.r.size() != sum.n || g.s.size() != sum.n)
      throw std::invalid_argument("group arity mismatch");
    if (g.coeff.m() != sum.m || g.coeff.n() != sum.n)
      throw std::invalid_argument("coefficient universe mismatch");
    if (!g.beta.empty()) {
      if (g.beta.size() != sum.n)
        throw std::invalid_argument("beta matrix shape");
      for (const auto& row : g.beta)
        if (row.size() != sum.n)
          throw std::invalid_argument("beta matrix shape");
    }
    if (g.unit_lo <= 0 || g.unit_lo > g.unit_hi)
      throw std::invalid_argument("unit certificate must satisfy 0 < lo <= hi");
    if (g.critical && g.coeff.depends_on_tail(sum.l))
      throw std::invalid_argument(
          "critical group coefficient depends on y_{>l}");
  }
}

}  // namespace

void validate_prepared(const PreparedSum& sum, CrMode mode,
                       const std::vector<std::vector<Rat>>& pts) {
  check_arities(sum);
  // Group by s_{>l}; within a bucket no r may appear as both critical and
  // noncritical, and every noncritical r' needs a dominating critical r.
  std::map<std::vector<unsigned>, std::vector<const Group*>> buckets;
  for (const auto& g : sum.groups)
    buckets[tail_key(sum, g).s].push_back(&g);
  for (const auto& [s, gs] : buckets) {
    for (const Group* nc : gs) {
      if (nc->critical) continue;
      for (const Group* cr : gs) {
        if (!cr->critical) continue;
        if (tail_key(sum, *cr).r == tail_key(sum, *nc).r)
          throw std::invalid_argument(
              "exponent listed as both critical and noncritical");
      }
    }
    for (const Group* nc : gs) {
      if (nc->critical || nc->coeff.is_zero()) continue;
      auto dominated = [&](const std::vector<Rat>& x,
                           const std::vector<Rat>& yl,
                           bool pointwise) {
        if (pointwise && nc->coeff.at_point(x, yl).is_zero()) return true;
        for (const Group* cr : gs) {
          if (!cr->critical || !r_leq(tail_key(sum, *cr).r,
                                      tail_key(sum, *nc).r))
            continue;
          const bool nonzero = pointwise
                                   ? !cr->coeff.at_point(x, yl).is_zero()
                                   : !cr->coeff.is_zero();
          if (nonzero) return true;
        }
        return false;
      };
      if (mode == CrMode::Generic) {
        if (!dominated({}, {}, false))
          throw std::invalid_argument(
              "CR-domination fails generically for group " + nc->label);
      } else {
        for (const auto& pt : pts) {
          if (pt.size() != sum.m + sum.l)
            throw std::invalid_argument("sample point arity");
          std::vector<Rat> x(pt.begin(), pt.begin() + sum.m);
          std::vector<Rat> yl(pt.begin() + sum.m, pt.end());
          if (!dominated(x, yl, true))
            throw std::invalid_argument(
                "CR-domination fails at a sample point for group " +
                nc->label);
        }
      }
    }
  }
}

std::vector<std::string> critical_delta(const PreparedSum& sum) {
  std::vector<std::string> out;
  for (const auto& g : sum.groups)
    if (g.critical && !g.coeff.is_zero()) out.push_back(g.label);
  return out;
}

std::vector<std::string> critical_delta(const PreparedSum& sum,
                                        const std::vector<Rat>& x) {
  std::vector<std::string> out;
  for (const auto& g : sum.groups)
    if (g.critical && !g.coeff.at_point(x).is_zero()) out.push_back(g.label);
  return out;
}

bool CriticalProfile::empty() const {
  for (const auto& r : rbar)
    if (r) return false;
  return true;
}

CriticalProfile profile(const PreparedSum& sum,
                        const std::vector<std::string>& labels) {
  const std::size_t tail = sum.n - sum.l;
  CriticalProfile p;
  p.rbar.assign(tail, std::nullopt);
  p.sbar.assign(tail, 0);
  for (const auto& g : sum.groups) {
    if (!g.critical) continue;
    if (std::find(labels.begin(), labels.end(), g.label) == labels.end())
      continue;
    for (std::size_t i = 0; i < tail; ++i) {
      const Rat& ri = g.r[sum.l + i];
      const unsigned si = g.s[sum.l + i];
      if (!p.rbar[i] || ri < *p.rbar[i]) {
        p.rbar[i] = ri;
        p.sbar[i] = si;
      } else if (ri == *p.rbar[i]) {
        p.sbar[i] = std::max(p.sbar[i], si);
      }
    }
  }
  return p;
}

std::vector<CoeffFn> CoeffFn::x_coefficients() const {
  std::map<Expo, CoeffFn> by_y_monomial;
  for (const auto& [e, coef] : poly_.terms()) {
    Expo ypart(2 * n_, 0);
    Expo xpart = e;
    for (std::size_t j = 0; j < n_; ++j) {
      ypart[j] = e[y_var(j)];
      ypart[n_ + j] = e[logy_var(j)];
      xpart[y_var(j)] = 0;
      xpart[logy_var(j)] = 0;
    }
    auto it = by_y_monomial.find(ypart);
    if (it == by_y_monomial.end()) {
      CoeffFn f(m_, n_);
      f.log_primes_ = log_primes_;
      f.poly_ = TruncPoly(poly_.arity());
      it = by_y_monomial.emplace(ypart, std::move(f)).first;
    }
    it->second.poly_.add_term(xpart, coef);
  }
  std::vector<CoeffFn> out;
  for (auto& [ypart, f] : by_y_monomial) out.push_back(std::move(f));
  return out;
}

CoeffFn fiber_vanishing_witness(const PreparedSum& sum) {
  check_arities(sum);
  // The log-prime symbols count as x-part: they are constants.
  CoeffFn g = CoeffFn::constant(sum.m, sum.n, Rat(0));
  for (const auto& grp : sum.groups) {
    if (!grp.critical) continue;
    for (const auto& xcoef : grp.coeff.x_coefficients())
      g = g + xcoef.squared();
  }
  return g;
}

double evaluate(const PreparedSum& sum, const std::vector<double>& x,
                const std::vector<double>& y) {
  if (y.size() != sum.n) throw std::invalid_argument("evaluate: fiber arity");
  for (double v : y)
    if (v <= 0.0 || v >= 1.0)
      throw std::domain_error("evaluate: point on or outside the boundary");
  double acc = 0;
  for (const auto& g : sum.groups) {
    double t = g.coeff.evaluate(x, y);
    for (std::size_t j = 0; j < sum.n; ++j)
      t *= std::pow(y[j], rat_to_double(g.r[j]));
    for (std::size_t i = 0; i < sum.n; ++i) {
      if (g.s[i] == 0) continue;
      double arg = 0;
      if (g.beta.empty()) {
        arg = std::log(y[i]);
      } else {
        for (std::size_t j = 0; j < sum.n; ++j)
          arg += rat_to_double(g.beta[i][j]) * std::log(y[j]);
      }
      t *= std::pow(arg, double(g.s[i]));
    }
    acc += t;
  }
  return acc;
}

}  // namespace lcdiag
