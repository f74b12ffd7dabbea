#include "lottery/hitting.hpp"

#include <algorithm>
#include <map>
#include <string>
#include <unordered_map>

namespace lottery {

long long SizeMultiset::total() const {
  long long t = 0;
  for (std::size_t i = 0; i < sizes.size(); ++i) t += (long long)sizes[i] * counts[i];
  return t;
}

long long SizeMultiset::elements() const {
  long long t = 0;
  for (int c : counts) t += c;
  return t;
}

SizeMultiset to_multiset(const std::vector<int>& sizes) {
  std::map<int, int> by_size;
  for (int s : sizes) by_size[s]++;
  SizeMultiset ms;
  for (auto& [s, c] : by_size) {
    ms.sizes.push_back(s);
    ms.counts.push_back(c);
  }
  return ms;
}

int hitting_index(long long budget, const std::vector<int>& sizes_in_order) {
  long long acc = 0;
  for (std::size_t t = 0; t < sizes_in_order.size(); ++t) {
    acc += sizes_in_order[t];
    if (acc >= budget) return int(t) + 1;
  }
  fail(Err::InsufficientTotal, "cumulative sizes total " + std::to_string(acc) +
                                   " never reach " + std::to_string(budget));
}

int hitting_index_clamped(long long budget, const std::vector<int>& sizes_in_order) {
  if (budget <= 0) return 0;
  long long acc = 0;
  for (std::size_t t = 0; t < sizes_in_order.size(); ++t) {
    acc += sizes_in_order[t];
    if (acc >= budget) return int(t) + 1;
  }
  return int(sizes_in_order.size()) + 1;
}

namespace {

struct DrawKeyHash {
  std::size_t operator()(const std::vector<int>& v) const {
    std::size_t h = 0x9E3779B97F4A7C15ULL;
    for (int x : v) h = (h ^ std::size_t(x)) * 0x100000001B3ULL;
    return h;
  }
};

struct TauDp {
  const SizeMultiset& ms;
  long long budget;
  std::size_t cap;
  std::unordered_map<std::vector<int>, double, DrawKeyHash> memo;

  // drawn[j] elements of class j already consumed; budget_left implied.
  double eval(std::vector<int>& drawn, long long budget_left, long long elems_left) {
    if (budget_left <= 0) return 0.0;
    auto it = memo.find(drawn);
    if (it != memo.end()) return it->second;
    if (memo.size() > cap)
      fail(Err::StateSpaceTooLarge,
           "hitting-time state count exceeded " + std::to_string(cap));
    double e = 1.0;
    for (std::size_t j = 0; j < ms.sizes.size(); ++j) {
      int avail = ms.counts[j] - drawn[j];
      if (avail <= 0) continue;
      drawn[j]++;
      e += double(avail) / double(elems_left) *
           eval(drawn, budget_left - ms.sizes[j], elems_left - 1);
      drawn[j]--;
    }
    memo.emplace(drawn, e);
    return e;
  }
};

}  // namespace

double expected_hitting_index(const SizeMultiset& ms, long long budget, bool clamp_short,
                              std::size_t state_cap) {
  if (budget <= 0) return 0.0;
  const long long total = ms.total();
  const long long elems = ms.elements();
  if (total < budget) {
    if (clamp_short) return double(elems + 1);
    fail(Err::InsufficientTotal, "multiset total " + std::to_string(total) +
                                     " below budget " + std::to_string(budget));
  }
  TauDp dp{ms, budget, state_cap, {}};
  std::vector<int> drawn(ms.sizes.size(), 0);
  return dp.eval(drawn, budget, elems);
}

}  // namespace lottery
