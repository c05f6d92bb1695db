#include "lcdiag/lclass.hpp"

#include <algorithm>
#include <random>

namespace lcdiag {

Verdict1D classify_monomial_1d(const Rat& alpha, unsigned beta) {
  Verdict1D v;
  v.integrable = alpha > -1;
  v.bounded = alpha > 0 || (alpha == 0 && beta == 0);
  return v;
}

Verdict1D classify_rect(const std::vector<Rat>& alpha,
                        const std::vector<unsigned>& beta, std::size_t l) {
  if (alpha.size() != beta.size() || l > alpha.size())
    throw std::invalid_argument("classify_rect: arity");
  Verdict1D v{true, true};
  for (std::size_t i = l; i < alpha.size(); ++i) {
    const auto vi = classify_monomial_1d(alpha[i], beta[i]);
    v.integrable = v.integrable && vi.integrable;
    v.bounded = v.bounded && vi.bounded;
  }
  return v;
}

PInterval lc_interval(const CriticalProfile& pf, const CriticalProfile& pmu,
                      const std::vector<Rat>& gamma, const Rat& q,
                      bool f_empty, bool mu_empty) {
  if (f_empty || mu_empty) return PInterval::full_with_infinity();
  const std::size_t tail = pf.rbar.size();
  if (pmu.rbar.size() != tail || gamma.size() != tail)
    throw std::invalid_argument("lc_interval: profile arity");
  PInterval out = PInterval::finite_full();
  bool infinity = true;
  for (std::size_t i = 0; i < tail; ++i) {
    if (!pf.rbar[i] || !pmu.rbar[i])
      throw std::invalid_argument(
          "lc_interval: infinite profile component without the empty flag");
    out = interval_intersect(
        out, solve_halfline(*pf.rbar[i], QLin(gamma[i], *pmu.rbar[i]), q), q);
    const bool bounded_i =
        *pf.rbar[i] > 0 || (*pf.rbar[i] == 0 && pf.sbar[i] == 0);
    infinity = infinity && bounded_i;
  }
  out.includes_infinity = infinity;
  return interval_normalize(out, q);
}

bool VanishConfig::operator==(const VanishConfig& o) const {
  if (pieces.size() != o.pieces.size()) return false;
  for (std::size_t i = 0; i < pieces.size(); ++i)
    if (pieces[i].f_vanish != o.pieces[i].f_vanish ||
        pieces[i].mu_vanish != o.pieces[i].mu_vanish)
      return false;
  return true;
}

namespace {

std::vector<std::string> subset_of(const std::vector<std::string>& labels,
                                   std::uint64_t mask) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (mask >> i & 1) out.push_back(labels[i]);
  return out;
}

std::vector<std::string> complement(const std::vector<std::string>& all,
                                    const std::vector<std::string>& gone) {
  std::vector<std::string> out;
  for (const auto& s : all)
    if (std::find(gone.begin(), gone.end(), s) == gone.end())
      out.push_back(s);
  return out;
}

// Does the piece's critical-group label vanish identically at x?
bool label_vanishes_at(const PreparedSum& sum, const std::string& label,
                       const std::vector<Rat>& x) {
  for (const auto& g : sum.groups)
    if (g.label == label) return g.coeff.at_point(x).is_zero();
  throw std::invalid_argument("unknown group label " + label);
}

}  // namespace

Diagram assemble_diagram(const std::vector<DiagramPiece>& pieces, const Rat& q,
                         std::size_t config_cap, unsigned seed) {
  if (q <= 0) throw std::invalid_argument("assemble_diagram: q must be > 0");
  Diagram d;
  d.q = q;
  d.config_cap = config_cap;

  std::vector<std::vector<std::string>> f_labels, mu_labels;
  double log_count = 0;
  for (const auto& pc : pieces) {
    validate_prepared(pc.f, CrMode::Generic);
    validate_prepared(pc.mu, CrMode::Generic);
    if (pc.gamma.size() != pc.f.n)
      throw std::invalid_argument("gamma arity mismatch");
    f_labels.push_back(critical_delta(pc.f));
    mu_labels.push_back(critical_delta(pc.mu));
    log_count += double(f_labels.back().size() + mu_labels.back().size());
    if (f_labels.back().size() + mu_labels.back().size() > 62)
      throw ResourceError("too many critical groups in one piece");
  }
  if (log_count > 62 || (std::uint64_t(1) << unsigned(log_count)) > config_cap)
    throw ResourceError("configuration count 2^" +
                        std::to_string(unsigned(log_count)) +
                        " exceeds the cap of " + std::to_string(config_cap));

  // Enumerate configurations as one combined bitmask over all piece labels.
  std::vector<std::size_t> offsets;  // per piece: offset of f block, mu block
  std::size_t bits = 0;
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    offsets.push_back(bits);
    bits += f_labels[i].size() + mu_labels[i].size();
  }

  // Base sample points for feasibility probing.
  const std::size_t m = pieces.empty() ? 0 : pieces.front().f.m;
  std::mt19937 rng(seed);
  std::uniform_int_distribution<int> num(0, 1000);
  std::vector<std::vector<Rat>> xs;
  for (int t = 0; t < 200; ++t) {
    std::vector<Rat> x;
    for (std::size_t i = 0; i < m; ++i) x.emplace_back(num(rng), 1000);
    xs.push_back(x);
  }
  // Include a few structured points likely to hit vanishing loci.
  for (int k = 0; k <= 4; ++k)
    xs.push_back(std::vector<Rat>(m, Rat(k, 4)));

  for (std::uint64_t mask = 0; mask < (std::uint64_t(1) << bits); ++mask) {
    VanishConfig cfg;
    PInterval interval = PInterval::full_with_infinity();
    for (std::size_t i = 0; i < pieces.size(); ++i) {
      VanishConfig::PerPiece pp;
      const std::uint64_t fm = mask >> offsets[i];
      pp.f_vanish = subset_of(f_labels[i], fm);
      pp.mu_vanish = subset_of(mu_labels[i], fm >> f_labels[i].size());
      auto f_live = complement(f_labels[i], pp.f_vanish);
      auto mu_live = complement(mu_labels[i], pp.mu_vanish);
      std::vector<Rat> gamma_tail(pieces[i].gamma.begin() + pieces[i].f.l,
                                  pieces[i].gamma.end());
      interval = interval_intersect(
          interval,
          lc_interval(profile(pieces[i].f, f_live),
                      profile(pieces[i].mu, mu_live), gamma_tail, q,
                      f_live.empty(), mu_live.empty()),
          q);
      cfg.pieces.push_back(std::move(pp));
    }

    // Feasibility: some sampled x realizes every literal of the config.
    bool feasible = false;
    for (const auto& x : xs) {
      bool ok = true;
      for (std::size_t i = 0; i < pieces.size() && ok; ++i) {
        for (const auto& lab : f_labels[i]) {
          const bool declared =
              std::find(cfg.pieces[i].f_vanish.begin(),
                        cfg.pieces[i].f_vanish.end(),
                        lab) != cfg.pieces[i].f_vanish.end();
          if (label_vanishes_at(pieces[i].f, lab, x) != declared) ok = false;
        }
        for (const auto& lab : mu_labels[i]) {
          const bool declared =
              std::find(cfg.pieces[i].mu_vanish.begin(),
                        cfg.pieces[i].mu_vanish.end(),
                        lab) != cfg.pieces[i].mu_vanish.end();
          if (label_vanishes_at(pieces[i].mu, lab, x) != declared) ok = false;
        }
      }
      if (ok) {
        feasible = true;
        break;
      }
    }

    // The configuration's conjunction over all atoms.
    Conj conj;
    for (std::size_t i = 0; i < pieces.size(); ++i) {
      for (const auto& lab : f_labels[i]) {
        const bool declared =
            std::find(cfg.pieces[i].f_vanish.begin(),
                      cfg.pieces[i].f_vanish.end(),
                      lab) != cfg.pieces[i].f_vanish.end();
        conj.lits.push_back({Atom{i, false, lab}, declared});
      }
      for (const auto& lab : mu_labels[i]) {
        const bool declared =
            std::find(cfg.pieces[i].mu_vanish.begin(),
                      cfg.pieces[i].mu_vanish.end(),
                      lab) != cfg.pieces[i].mu_vanish.end();
        conj.lits.push_back({Atom{i, true, lab}, declared});
      }
    }

    auto same = [&](const PInterval& u, const PInterval& v) {
      return ext_compare(u.lo, v.lo, q) == 0 &&
             ext_compare(u.hi, v.hi, q) == 0 &&
             u.includes_infinity == v.includes_infinity;
    };
    DiagramEntry* entry = nullptr;
    for (auto& e : d.entries)
      if (same(e.interval, interval)) entry = &e;
    if (!entry) {
      d.entries.push_back(DiagramEntry{interval, {}, {}, {}});
      entry = &d.entries.back();
    }
    entry->configs.push_back(std::move(cfg));
    entry->feasible.push_back(feasible);
    entry->locus.disjuncts.push_back(std::move(conj));
  }
  return d;
}

Formula int_p_locus(const Diagram& d, const Rat& p, bool infinite) {
  if (!infinite && p <= 0)
    throw std::invalid_argument("int_p_locus: p must be > 0");
  Formula out;
  for (const auto& e : d.entries) {
    const bool hit = infinite ? e.interval.includes_infinity
                              : interval_contains(e.interval, p, d.q);
    if (!hit) continue;
    for (const auto& c : e.locus.disjuncts) out.disjuncts.push_back(c);
  }
  return out;
}

PInterval lebesgue_set_at(const Diagram& d, const VanishConfig& config) {
  for (const auto& e : d.entries)
    for (const auto& c : e.configs)
      if (c == config) return e.interval;
  throw std::invalid_argument("lebesgue_set_at: unknown configuration");
}

PreparedSum prepared_product(const PreparedSum& a, const PreparedSum& b) {
  if (a.m != b.m || a.n != b.n || a.l != b.l)
    throw std::invalid_argument("prepared_product: cell mismatch");
  PreparedSum out;
  out.m = a.m;
  out.n = a.n;
  out.l = a.l;
  for (const auto& ga : a.groups) {
    for (const auto& gb : b.groups) {
      if (!ga.beta.empty() || !gb.beta.empty())
        throw std::invalid_argument(
            "prepared_product: identity beta only");
      Group g;
      g.label = ga.label + "*" + gb.label;
      g.coeff = ga.coeff * gb.coeff;
      if (g.coeff.is_zero()) continue;
      for (std::size_t j = 0; j < a.n; ++j) {
        g.r.push_back(ga.r[j] + gb.r[j]);
        g.s.push_back(ga.s[j] + gb.s[j]);
      }
      g.critical = ga.critical && gb.critical;
      g.unit_lo = ga.unit_lo * gb.unit_lo;
      g.unit_hi = ga.unit_hi * gb.unit_hi;
      out.groups.push_back(std::move(g));
    }
  }
  return out;
}

ComplexReduction complex_reduce(const PreparedSum& f_re,
                                const PreparedSum& f_im,
                                const PreparedSum& mu_re,
                                const PreparedSum& mu_im) {
  ComplexReduction out;
  auto square_sum = [](const PreparedSum& re, const PreparedSum& im) {
    PreparedSum sq = prepared_product(re, re);
    PreparedSum sq2 = prepared_product(im, im);
    sq.groups.insert(sq.groups.end(), sq2.groups.begin(), sq2.groups.end());
    return sq;
  };
  out.f_squared = square_sum(f_re, f_im);
  out.mu_squared = square_sum(mu_re, mu_im);
  return out;
}

}  // namespace lcdiag
