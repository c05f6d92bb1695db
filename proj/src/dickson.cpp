#include "lcdiag/dickson.hpp"

#include <algorithm>

namespace lcdiag {

MultiIndex UpsetPart::minimal_member() const {
  MultiIndex m = base;
  for (std::size_t i = 0; i < free_coords.size(); ++i)
    m[free_coords[i]] = thresholds[i] + 1;
  return m;
}

bool UpsetPart::contains(const MultiIndex& alpha) const {
  if (alpha.size() != base.size()) return false;
  std::size_t fi = 0;
  for (std::size_t j = 0; j < alpha.size(); ++j) {
    if (fi < free_coords.size() && free_coords[fi] == j) {
      if (alpha[j] <= thresholds[fi]) return false;
      ++fi;
    } else if (alpha[j] != base[j]) {
      return false;
    }
  }
  return true;
}

bool mi_leq(const MultiIndex& a, const MultiIndex& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] > b[i]) return false;
  return true;
}

std::vector<MultiIndex> min_antichain(std::vector<MultiIndex> s) {
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
  std::vector<MultiIndex> out;
  for (const auto& a : s) {
    bool dominated = false;
    for (const auto& b : s) {
      if (b != a && mi_leq(b, a)) {
        dominated = true;
        break;
      }
    }
    if (!dominated) out.push_back(a);
  }
  return out;
}

bool upward_closure_contains(const std::vector<MultiIndex>& m,
                             const MultiIndex& alpha) {
  for (const auto& b : m)
    if (mi_leq(b, alpha)) return true;
  return false;
}

std::vector<UpsetPart> partition_complement(std::vector<MultiIndex> m) {
  std::sort(m.begin(), m.end());
  m.erase(std::unique(m.begin(), m.end()), m.end());
  std::vector<UpsetPart> parts;
  if (m.empty()) return parts;
  const std::size_t k = m.front().size();

  // Componentwise max over M; no coordinate of any member exceeds it, so
  // "alpha_i > eps_i" forces alpha off M in coordinate i.
  std::vector<unsigned> eps(k, 0);
  for (const auto& a : m)
    for (std::size_t i = 0; i < k; ++i) eps[i] = std::max(eps[i], a[i]);

  // Lattice points of the box prod {0..eps_i} that lie in [M].
  std::vector<MultiIndex> box_points;
  MultiIndex cur(k, 0);
  for (;;) {
    if (upward_closure_contains(m, cur)) box_points.push_back(cur);
    std::size_t j = 0;
    while (j < k && cur[j] == eps[j]) cur[j++] = 0;
    if (j == k) break;
    ++cur[j];
  }

  // Singleton parts: box points in [M] but not in M itself.
  for (const auto& b : box_points) {
    if (!std::binary_search(m.begin(), m.end(), b))
      parts.push_back(UpsetPart{b, {}, {}});
  }

  // For each nonempty coordinate set N and each box point beta in [M], the
  // part pins beta outside N and runs above eps inside N. Distinct betas
  // agreeing outside N give the same part; dedupe below.
  if (k > 64) throw std::invalid_argument("partition_complement: k too large");
  for (std::uint64_t mask = 1; mask < (std::uint64_t(1) << k); ++mask) {
    std::vector<std::size_t> free_coords;
    std::vector<unsigned> thresholds;
    for (std::size_t i = 0; i < k; ++i) {
      if (mask >> i & 1) {
        free_coords.push_back(i);
        thresholds.push_back(eps[i]);
      }
    }
    for (const auto& beta : box_points) {
      UpsetPart p{beta, free_coords, thresholds};
      for (std::size_t i : free_coords) p.base[i] = 0;  // canonical base
      if (std::find(parts.begin(), parts.end(), p) == parts.end())
        parts.push_back(p);
    }
  }

  std::sort(parts.begin(), parts.end(),
            [](const UpsetPart& a, const UpsetPart& b) {
              return a.minimal_member() < b.minimal_member();
            });
  return parts;
}

}  // namespace lcdiag
