#pragma once

#include <vector>

#include "lcdiag/rat.hpp"

namespace lcdiag {

// Point of N^k under the componentwise partial order.
using MultiIndex = std::vector<unsigned>;

// A part of the partition of [M]\M: coordinates in free_coords range over
// everything strictly above their threshold, the rest are pinned to base.
// free_coords empty means a singleton {base}.
struct UpsetPart {
  MultiIndex base;
  std::vector<std::size_t> free_coords;  // sorted, 0-based
  std::vector<unsigned> thresholds;      // parallel to free_coords

  /// The part's unique minimal member: threshold+1 on free coordinates,
  /// base elsewhere.
  MultiIndex minimal_member() const;

  bool contains(const MultiIndex& alpha) const;
  bool operator==(const UpsetPart& o) const {
    return base == o.base && free_coords == o.free_coords &&
           thresholds == o.thresholds;
  }
};

bool mi_leq(const MultiIndex& a, const MultiIndex& b);

/// Minimal members of S. The result is an antichain with the same upward
/// closure as S, sorted lexicographically.
std::vector<MultiIndex> min_antichain(std::vector<MultiIndex> s);

/// True iff some member of M is componentwise <= alpha.
bool upward_closure_contains(const std::vector<MultiIndex>& m,
                             const MultiIndex& alpha);

/// Partitions [M]\M into parts with unique minimal members, each contained
/// in or disjoint from every [alpha], alpha in M. M is taken literally (only
/// exact duplicates are dropped, no minimization): members of M are excluded
/// from the partition even when they dominate other members.
std::vector<UpsetPart> partition_complement(std::vector<MultiIndex> m);

}  // namespace lcdiag
