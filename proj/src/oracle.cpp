#include "lcdiag/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace lcdiag {

namespace {

// 8-point Gauss-Legendre rule on [-1, 1].
constexpr double kNode[8] = {
    -0.9602898564975363, -0.7966664774136267, -0.5255324099163290,
    -0.1834346424956498, 0.1834346424956498,  0.5255324099163290,
    0.7966664774136267,  0.9602898564975363};
constexpr double kWeight[8] = {
    0.1012285362903763, 0.2223810344533745, 0.3137066458778873,
    0.3626837833783620, 0.3626837833783620, 0.3137066458778873,
    0.2223810344533745, 0.1012285362903763};

constexpr std::uint64_t kBudget = std::uint64_t(1) << 22;

// Rung width of the cutoff ladder in t = -log y.
const double kRung = 4.0 * std::log(2.0);

// Integral of g(e^-t) e^-(t1+...+tn) over the box prod [lo_i, hi_i], with
// roughly one panel per unit rung width per dimension, scaled by mult.
double tensor_gl_box(const FiberFn& g, std::size_t n,
                     const std::vector<double>& lo,
                     const std::vector<double>& hi, std::size_t mult,
                     std::uint64_t& evals) {
  std::vector<std::vector<double>> ynode(n), wnode(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t panels =
        mult * std::max<std::size_t>(
                   1, std::size_t(std::ceil((hi[i] - lo[i]) / kRung)));
    const double h = (hi[i] - lo[i]) / double(panels), half = h / 2;
    for (std::size_t p = 0; p < panels; ++p)
      for (std::size_t j = 0; j < 8; ++j) {
        const double t = lo[i] + double(p) * h + half * (kNode[j] + 1.0);
        ynode[i].push_back(std::exp(-t));
        wnode[i].push_back(kWeight[j] * half * std::exp(-t));
      }
  }
  std::vector<std::size_t> idx(n, 0);
  std::vector<double> y(n);
  double sum = 0;
  for (;;) {
    double w = 1;
    for (std::size_t i = 0; i < n; ++i) {
      y[i] = ynode[i][idx[i]];
      w *= wnode[i][idx[i]];
    }
    sum += w * g(y);
    ++evals;
    std::size_t d = 0;
    while (d < n && ++idx[d] == ynode[d].size()) idx[d++] = 0;
    if (d == n) break;
  }
  return sum;
}

// One box integral with panel doubling until two passes agree (1e-8
// relative to the larger of the result and scale) or the budget is spent.
double refine_box(const FiberFn& g, std::size_t n,
                  const std::vector<double>& lo, const std::vector<double>& hi,
                  double scale, std::uint64_t& evals) {
  const std::uint64_t start = evals;
  std::size_t mult = 1;
  double prev = tensor_gl_box(g, n, lo, hi, mult, evals);
  double cur = prev;
  for (;;) {
    mult *= 2;
    double next_cost = 1;
    for (std::size_t i = 0; i < n; ++i)
      next_cost *= 8.0 * double(mult) *
                   std::max(1.0, std::ceil((hi[i] - lo[i]) / kRung));
    if (evals - start + next_cost > double(kBudget)) break;
    cur = tensor_gl_box(g, n, lo, hi, mult, evals);
    if (std::abs(cur - prev) <= 1e-8 * std::max(std::abs(cur), scale)) break;
    prev = cur;
  }
  return cur;
}

}  // namespace

ConvergenceVerdict integrate_ladder(const FiberFn& g, std::size_t n) {
  if (n == 0) throw std::invalid_argument("integrate_ladder: zero arity");
  ConvergenceVerdict out;
  // The increments are integrated directly over the slabs between
  // consecutive cutoffs (instead of differencing whole-box integrals whose
  // independent quadrature errors would swamp small increments): the box
  // [0,T']^n minus [0,T]^n splits into n product slabs.
  std::vector<double> ladder;
  double total = refine_box(g, n, std::vector<double>(n, 0.0),
                            std::vector<double>(n, kRung), 1e-6,
                            out.evaluations);
  ladder.push_back(total);
  for (int k = 1; k < 10; ++k) {
    const double T = kRung * k, Tnext = kRung * (k + 1);
    double inc = 0;
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<double> lo(n, 0.0), hi;
      for (std::size_t j = 0; j < n; ++j)
        hi.push_back(j < i ? Tnext : (j == i ? Tnext : T));
      lo[i] = T;
      inc += refine_box(g, n, lo, hi, 1e-9 * std::max(1.0, std::abs(total)),
                        out.evaluations);
    }
    total += inc;
    ladder.push_back(total);
  }

  const double scale = std::max(1.0, std::abs(ladder.back()));
  std::vector<double> inc;
  for (std::size_t k = 0; k + 1 < ladder.size(); ++k)
    inc.push_back(ladder[k + 1] - ladder[k]);

  // Tail already resolved at quadrature precision: nothing left to grow.
  if (std::abs(inc[inc.size() - 1]) < 1e-9 * scale &&
      std::abs(inc[inc.size() - 2]) < 1e-9 * scale) {
    out.verdict = Verdict::Converges;
    out.estimate = ladder.back();
    out.growth_exponent = -10;
    return out;
  }

  // Fit the geometric rate of the increments from the last few ratios.
  double prod = 1;
  int m = 0;
  for (std::size_t k = inc.size() - 4; k + 1 < inc.size(); ++k)
    if (inc[k] > 0 && inc[k + 1] > 0) {
      prod *= inc[k + 1] / inc[k];
      ++m;
    }
  if (m == 0) {
    out.verdict = Verdict::Inconclusive;
    out.estimate = ladder.back();
    return out;
  }
  const double rbar = std::pow(prod, 1.0 / m);
  // Each rung shrinks the cutoff by 2^-4, so the local exponent of the
  // increments in the cutoff is log2(rbar)/4; negative means the truncated
  // integrals form a convergent geometric tail.
  const double e = std::log2(rbar) / 4.0;
  out.growth_exponent = e;
  if (rbar >= 0.999) {
    out.verdict = Verdict::Diverges;
    out.estimate = ladder.back();
  } else if (e <= -0.05) {
    out.verdict = Verdict::Converges;
    out.estimate = ladder.back() + inc.back() * rbar / (1.0 - rbar);
  } else {
    out.verdict = Verdict::Inconclusive;
    out.estimate = ladder.back();
  }
  return out;
}

namespace {

// Doubles-only compiled form of a prepared sum at a fixed base point: the
// quadrature calls the integrand millions of times, and converting exact
// rationals on every call dominates the runtime otherwise.
struct FastSum {
  struct Term {
    double c;
    std::vector<std::pair<std::size_t, unsigned>> powers;  // pt-slot, expo
  };
  struct Grp {
    std::vector<Term> terms;
    std::vector<double> r;
    std::vector<unsigned> s;
    std::vector<std::vector<double>> beta;  // empty = identity
  };
  std::size_t n = 0;
  std::vector<Grp> groups;
  std::vector<double> pt;                  // shared slot values
  std::vector<std::size_t> y_slot, ly_slot;  // per coordinate

  FastSum(const PreparedSum& s, const std::vector<double>& x) : n(s.n) {
    // All groups share one slot layout: x, log x, y, log y, then the union
    // of the groups' log-prime symbols.
    std::vector<unsigned long> primes;
    for (const auto& g : s.groups)
      for (unsigned long pr : g.coeff.log_primes())
        if (std::find(primes.begin(), primes.end(), pr) == primes.end())
          primes.push_back(pr);
    const std::size_t m = s.m;
    pt.assign(2 * m + 2 * n + primes.size(), 0);
    for (std::size_t i = 0; i < m; ++i) {
      pt[i] = x[i];
      pt[m + i] = std::log(x[i]);
    }
    for (std::size_t t = 0; t < primes.size(); ++t)
      pt[2 * m + 2 * n + t] = std::log(double(primes[t]));
    for (std::size_t j = 0; j < n; ++j) {
      y_slot.push_back(2 * m + j);
      ly_slot.push_back(2 * m + n + j);
    }
    for (const auto& g : s.groups) {
      Grp fg;
      const auto& c = g.coeff;
      for (const auto& [e, k] : c.poly().terms()) {
        Term t{rat_to_double(k), {}};
        for (std::size_t i = 0; i < c.m(); ++i) {
          if (e[c.x_var(i)]) t.powers.push_back({i, e[c.x_var(i)]});
          if (e[c.logx_var(i)]) t.powers.push_back({m + i, e[c.logx_var(i)]});
        }
        for (std::size_t j = 0; j < c.n(); ++j) {
          if (e[c.y_var(j)]) t.powers.push_back({y_slot[j], e[c.y_var(j)]});
          if (e[c.logy_var(j)])
            t.powers.push_back({ly_slot[j], e[c.logy_var(j)]});
        }
        for (std::size_t u = 0; u < c.log_primes().size(); ++u)
          if (e[2 * c.m() + 2 * c.n() + u]) {
            const auto slot =
                2 * m + 2 * n +
                std::size_t(std::find(primes.begin(), primes.end(),
                                      c.log_primes()[u]) -
                            primes.begin());
            t.powers.push_back({slot, e[2 * c.m() + 2 * c.n() + u]});
          }
        fg.terms.push_back(std::move(t));
      }
      for (const auto& rr : g.r) fg.r.push_back(rat_to_double(rr));
      fg.s = g.s;
      for (const auto& row : g.beta) {
        std::vector<double> rd;
        for (const auto& b : row) rd.push_back(rat_to_double(b));
        fg.beta.push_back(std::move(rd));
      }
      groups.push_back(std::move(fg));
    }
  }

  double operator()(const std::vector<double>& y) {
    for (std::size_t j = 0; j < n; ++j) {
      pt[y_slot[j]] = y[j];
      pt[ly_slot[j]] = std::log(y[j]);
    }
    double acc = 0;
    for (const auto& g : groups) {
      double coef = 0;
      for (const auto& t : g.terms) {
        double v = t.c;
        for (const auto& [slot, e] : t.powers)
          for (unsigned k = 0; k < e; ++k) v *= pt[slot];
        coef += v;
      }
      double expo = 0;
      for (std::size_t j = 0; j < n; ++j) expo += g.r[j] * pt[ly_slot[j]];
      double v = coef * std::exp(expo);
      for (std::size_t i = 0; i < n; ++i) {
        if (g.s[i] == 0) continue;
        double arg = 0;
        if (g.beta.empty()) {
          arg = pt[ly_slot[i]];
        } else {
          for (std::size_t j = 0; j < n; ++j)
            arg += g.beta[i][j] * pt[ly_slot[j]];
        }
        for (unsigned k = 0; k < g.s[i]; ++k) v *= arg;
      }
      acc += v;
    }
    return acc;
  }
};

}  // namespace

ConvergenceVerdict fiber_integral(const PreparedSum& f, const PreparedSum& mu,
                                  const std::vector<Rat>& gamma, double p,
                                  double q, const std::vector<double>& x) {
  if (f.n != mu.n || f.m != mu.m)
    throw std::invalid_argument("fiber_integral: arity mismatch");
  if (gamma.size() > f.n)
    throw std::invalid_argument("fiber_integral: too many weight exponents");
  std::vector<double> gd;
  for (const auto& g : gamma) gd.push_back(rat_to_double(g));
  FastSum ff(f, x), fm(mu, x);
  FiberFn integrand = [&ff, &fm, gd, p, q](const std::vector<double>& y) {
    double v = std::pow(std::abs(ff(y)), p) * std::pow(std::abs(fm(y)), q);
    for (std::size_t i = 0; i < gd.size(); ++i) v *= std::pow(y[i], gd[i]);
    return v;
  };
  return integrate_ladder(integrand, f.n);
}

SupEstimate sup_estimate_fn(const FiberFn& f, std::size_t n, double eps) {
  if (n == 0 || !(eps > 0) || eps >= 0.5)
    throw std::invalid_argument("sup_estimate: bad arguments");
  // Additive quasi-random (Weyl) shifts, one irrational per coordinate.
  static const double kPrime[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29};
  std::vector<double> alpha(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double s = std::sqrt(kPrime[i % 10]);
    alpha[i] = s - std::floor(s);
  }
  auto level_sup = [&](double e) {
    double best = 0;
    std::vector<double> y(n);
    for (int s = 0; s < 2048; ++s) {
      for (std::size_t i = 0; i < n; ++i) {
        double u = (s + 1) * alpha[i];
        u -= std::floor(u);
        y[i] = e + u * (1 - 2 * e);
      }
      best = std::max(best, std::abs(f(y)));
    }
    // Corners and single-coordinate extremes.
    std::fill(y.begin(), y.end(), e);
    best = std::max(best, std::abs(f(y)));
    std::fill(y.begin(), y.end(), 1 - e);
    best = std::max(best, std::abs(f(y)));
    for (std::size_t i = 0; i < n; ++i) {
      std::fill(y.begin(), y.end(), 0.5);
      y[i] = e;
      best = std::max(best, std::abs(f(y)));
      y[i] = 1 - e;
      best = std::max(best, std::abs(f(y)));
    }
    return best;
  };
  double sup[4];
  for (int j = 0; j < 4; ++j) sup[j] = level_sup(eps / double(1 << j));
  SupEstimate out;
  out.sup = *std::max_element(sup, sup + 4);
  // Steady growth as the margin halves signals a boundary blow-up.
  out.bounded = (sup[3] - sup[0]) <= 0.1 * std::max(1.0, sup[3]);
  return out;
}

SupEstimate sup_estimate(const PreparedSum& f, const std::vector<double>& x,
                         double eps) {
  return sup_estimate_fn(
      [&](const std::vector<double>& y) { return evaluate(f, x, y); }, f.n,
      eps);
}

TriangleCheck check_triangle(const std::vector<FiberFn>& fs,
                             const std::vector<FiberFn>& gs, double p,
                             double q, std::size_t n) {
  if (fs.empty() || gs.empty() || n == 0)
    throw std::invalid_argument("check_triangle: empty family");
  // Shared quadrature nodes for every integral, over [2^-20, 1]^n: both
  // sides are truncated identically, so the comparison is meaningful.
  const double T = 20.0 * std::log(2.0);
  const std::size_t panels = n == 1 ? 64 : (n == 2 ? 24 : 8);
  const std::size_t pts = panels * 8;
  std::vector<double> ynode(pts), wnode(pts);
  const double h = T / double(panels), half = h / 2;
  for (std::size_t pa = 0; pa < panels; ++pa)
    for (std::size_t j = 0; j < 8; ++j) {
      const double t = double(pa) * h + half * (kNode[j] + 1.0);
      ynode[pa * 8 + j] = std::exp(-t);
      wnode[pa * 8 + j] = kWeight[j] * half * std::exp(-t);
    }

  const double M = std::max(p, q);
  std::vector<std::vector<double>> pair_sum(fs.size(),
                                            std::vector<double>(gs.size(), 0));
  double lhs = 0;
  std::vector<std::size_t> idx(n, 0);
  std::vector<double> y(n);
  for (;;) {
    double w = 1;
    for (std::size_t i = 0; i < n; ++i) {
      y[i] = ynode[idx[i]];
      w *= wnode[idx[i]];
    }
    std::vector<double> fv(fs.size()), gv(gs.size());
    double fsum = 0, gsum = 0;
    for (std::size_t i = 0; i < fs.size(); ++i) {
      fv[i] = fs[i](y);
      fsum += fv[i];
    }
    for (std::size_t j = 0; j < gs.size(); ++j) {
      gv[j] = gs[j](y);
      gsum += gv[j];
    }
    lhs += w * std::pow(std::abs(fsum), p) * std::pow(std::abs(gsum), q);
    for (std::size_t i = 0; i < fs.size(); ++i)
      for (std::size_t j = 0; j < gs.size(); ++j)
        pair_sum[i][j] +=
            w * std::pow(std::abs(fv[i]), p) * std::pow(std::abs(gv[j]), q);
    std::size_t d = 0;
    while (d < n && ++idx[d] == pts) idx[d++] = 0;
    if (d == n) break;
  }

  double rhs = 0;
  if (M <= 1) {
    for (const auto& row : pair_sum)
      for (double v : row) rhs += v;
  } else {
    for (const auto& row : pair_sum)
      for (double v : row) rhs += std::pow(v, 1.0 / M);
    rhs = std::pow(rhs, M);
  }
  TriangleCheck out;
  out.lhs = lhs;
  out.rhs = rhs;
  out.slack = rhs - lhs;
  out.holds = lhs <= rhs + 1e-12 * std::abs(rhs) + 1e-300;
  return out;
}

double limit_along_curve(const CollapsedTable& table, const LeadingAsym& asym,
                         double t, const std::vector<double>& xgrid) {
  const double eps = rat_to_double(asym.eps);
  if (!(t > 0) || !(t < eps))
    throw std::invalid_argument("limit_along_curve: t outside (0, eps)");
  if (xgrid.size() < 3)
    throw std::invalid_argument("limit_along_curve: need at least 3 grid points");
  std::vector<double> v;
  for (double x : xgrid) {
    const double lx = std::log(x);
    double num = 0;
    for (const auto& [key, c] : table) {
      const auto& [i, k, l] = key;
      num += rat_to_double(c) * std::pow(x, double(k) + double(l) * t) *
             std::pow(lx, double(i));
    }
    const double den = std::pow(x, double(asym.p) + double(asym.q) * t) *
                       std::pow(lx, double(asym.r));
    v.push_back(num / den);
  }
  // Aitken acceleration on the last three grid values; the correction term
  // degenerates exactly when the sequence has already flattened out.
  const double v1 = v[v.size() - 3], v2 = v[v.size() - 2], v3 = v.back();
  const double d = (v3 - v2) - (v2 - v1);
  if (std::abs(d) < 1e-14 * std::max(1.0, std::abs(v3))) return v3;
  return v3 - (v3 - v2) * (v3 - v2) / d;
}

}  // namespace lcdiag
