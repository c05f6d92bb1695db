#include "lcdiag/series.hpp"

#include <algorithm>

namespace lcdiag {

TruncPoly CoeffFamily::combined() const {
  const std::size_t n = xy_arity + k;
  TruncPoly out(n);
  std::vector<std::size_t> where(xy_arity);
  for (std::size_t i = 0; i < xy_arity; ++i) where[i] = i;
  for (const auto& [alpha, f] : coeffs) {
    TruncPoly part = f.embed(n, where);
    Expo ze(n, 0);
    for (std::size_t i = 0; i < k; ++i) ze[xy_arity + i] = alpha[i];
    out = out + part * TruncPoly::monomial(n, ze, Rat(1));
  }
  return out;
}

std::vector<MultiIndex> pointwise_min_support(const CoeffFamily& fam,
                                              const std::vector<Rat>& pt) {
  std::vector<MultiIndex> support;
  for (const auto& [alpha, f] : fam.coeffs)
    if (f.evaluate(pt) != 0) support.push_back(alpha);
  return min_antichain(std::move(support));
}

std::vector<MultiIndex> dickson_union(
    const CoeffFamily& fam, FamilyMode mode,
    const std::vector<std::vector<Rat>>& pts) {
  std::vector<MultiIndex> out;
  if (mode == FamilyMode::Generic) {
    for (const auto& [alpha, f] : fam.coeffs)
      if (!f.is_zero()) out.push_back(alpha);
    return min_antichain(std::move(out));
  }
  if (pts.empty())
    throw std::invalid_argument("dickson_union: sampled mode needs points");
  for (const auto& pt : pts) {
    auto ms = pointwise_min_support(fam, pt);
    out.insert(out.end(), ms.begin(), ms.end());
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

SplitResult critical_split(const CoeffFamily& fam,
                           const std::vector<MultiIndex>& m_cr) {
  for (const auto& [alpha, f] : fam.coeffs) {
    if (!f.is_zero() && !upward_closure_contains(m_cr, alpha))
      throw std::invalid_argument(
          "critical_split: family exponent outside the closure of the "
          "critical set");
  }
  SplitResult out;
  std::vector<MultiIndex> cr = m_cr;
  std::sort(cr.begin(), cr.end());
  cr.erase(std::unique(cr.begin(), cr.end()), cr.end());
  for (const auto& alpha : cr) {
    const TruncPoly* f = fam.find(alpha);
    out.critical.emplace_back(
        alpha, f ? *f : TruncPoly(fam.xy_arity));
  }

  const std::size_t n = fam.xy_arity + fam.k;
  std::vector<std::size_t> where(fam.xy_arity);
  for (std::size_t i = 0; i < fam.xy_arity; ++i) where[i] = i;
  for (auto& part : partition_complement(cr)) {
    NcTail t;
    t.beta = part.minimal_member();
    t.tail = TruncPoly(n);
    for (const auto& [alpha, f] : fam.coeffs) {
      if (f.is_zero() || !part.contains(alpha)) continue;
      Expo ze(n, 0);
      for (std::size_t i = 0; i < fam.k; ++i)
        ze[fam.xy_arity + i] = alpha[i] - t.beta[i];
      t.tail = t.tail + f.embed(n, where) *
                            TruncPoly::monomial(n, ze, Rat(1));
    }
    t.part = std::move(part);
    out.noncritical.push_back(std::move(t));
  }
  return out;
}

CollapsedTable collapse_series(const std::map<unsigned, TruncPoly>& g) {
  CollapsedTable table;
  for (const auto& [i, poly] : g) {
    if (poly.arity() != 3)
      throw std::invalid_argument("collapse_series: expected 3 variables");
    for (const auto& [gamma, c] : poly.terms()) {
      const long k = long(gamma[0]) + long(gamma[2]);
      const long l = long(gamma[1]) - long(gamma[2]);
      table[{i, k, l}] += c;
    }
  }
  for (auto it = table.begin(); it != table.end();)
    it = it->second == 0 ? table.erase(it) : std::next(it);
  return table;
}

LeadingAsym leading_asymptotics(const CollapsedTable& table) {
  bool found = false;
  std::pair<long, long> best;
  for (const auto& [key, value] : table) {
    const auto [i, k, l] = key;
    if (k + l < 0 || value == 0) continue;
    if (!found || std::pair(k, l) < best) {
      best = {k, l};
      found = true;
    }
  }
  if (!found)
    throw std::domain_error("leading_asymptotics: no admissible entry");
  LeadingAsym out;
  out.p = best.first;
  out.q = best.second;
  for (const auto& [key, value] : table) {
    const auto [i, k, l] = key;
    if (k == out.p && l == out.q && value != 0 && i >= out.r) {
      out.r = i;
      out.a = value;
    }
  }
  out.eps = Rat(1, out.p + out.q + 1);
  return out;
}

}  // namespace lcdiag
