#pragma once

#include <cstddef>
#include <vector>

#include "lottery/error.hpp"

namespace lottery {

// Multiset of positive sizes, grouped by distinct value.
struct SizeMultiset {
  std::vector<int> sizes;   // distinct, ascending
  std::vector<int> counts;  // parallel to sizes
  long long total() const;
  long long elements() const;
};

SizeMultiset to_multiset(const std::vector<int>& sizes);

// One-based index at which the cumulative sizes of a sequence first reach
// `budget`. Throws INSUFFICIENT_TOTAL when the whole sequence falls short.
int hitting_index(long long budget, const std::vector<int>& sizes_in_order);

// Same, but returns len+1 when the total falls short and 0 when budget <= 0.
int hitting_index_clamped(long long budget, const std::vector<int>& sizes_in_order);

// E[hitting index] under a uniform random order of the multiset, by dynamic
// programming over (elements drawn per size class). The remaining budget is
// implied by the drawn counts, so the memo key is the draw vector alone.
// clamp_short: return N+1 instead of throwing when total < budget.
double expected_hitting_index(const SizeMultiset& ms, long long budget, bool clamp_short,
                              std::size_t state_cap = 4000000);

}  // namespace lottery
