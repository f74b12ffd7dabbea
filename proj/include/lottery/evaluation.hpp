#pragma once

#include <cstdint>
#include <vector>

#include "lottery/instance.hpp"
#include "lottery/mechanisms.hpp"

namespace lottery {

enum class EvalMethod { ExactEnum, ExactDp, MonteCarlo };
const char* eval_method_token(EvalMethod method);

// Per-true-group success probabilities. Members of a group share the value
// (success is group-level), so the vector has one entry per group.
struct UtilityVector {
  std::vector<double> u;
  std::vector<double> se;  // zero for exact methods
  EvalMethod method = EvalMethod::ExactEnum;
  long long replicas = 0;
  std::uint64_t seed = 0;
  bool pooled = false;  // entries of equal-size groups share one pooled estimate
};

inline constexpr int kMaxEnumGroups = 8;
inline constexpr int kMaxEnumAgents = 8;

// Exact law by enumeration: group-order permutations (GL), agent-order
// permutations with uniform or request-weighted law (IL/IW), a state-space
// sweep over (budget used, groups served) for the replacement variant, and
// the decomposition support for the fair lottery.
UtilityVector exact_enumerate(Mechanism mech, const Instance& inst, const ActionProfile& profile,
                              int limit = 0);

// Exact group-request Group Lottery utilities per size class via the
// expected-hitting-index identity u = E[tau(k-s+1, rest)]/m; runs where
// enumeration cannot.
UtilityVector exact_gl_dp(const Instance& inst);

// R independent replicas; replica r draws from a stream derived from
// (master_seed, r), so the result does not depend on worker count.
// pool_size_classes merges counts across groups of equal size (valid for
// exchangeable profiles such as the group request).
UtilityVector monte_carlo(Mechanism mech, const Instance& inst, const ActionProfile& profile,
                          long long replicas, std::uint64_t master_seed, int workers = 1,
                          int limit = 0, bool pool_size_classes = false);

double utilization(const UtilityVector& util, const Instance& inst);

// min/max success probability; all-zero vectors count as fair (ratio 1),
// a zero entry against a positive max gives 0.
double fairness_ratio(const UtilityVector& util);

struct EnvyMatrix {
  int m = 0;
  std::vector<double> p;  // row-major: P(tickets of column group >= size of row group)
  double margin = 0;      // max over (g,h) of p[g][h] - p[g][g]
  double at(int g, int h) const { return p[std::size_t(g) * m + h]; }
};

EnvyMatrix envy_matrix(Mechanism mech, const Instance& inst, const ActionProfile& profile,
                       long long replicas, std::uint64_t master_seed, int workers = 1,
                       int limit = 0);

// Envy matrix of an explicit lottery over per-group ticket vectors.
EnvyMatrix envy_matrix_of_lottery(const Instance& inst,
                                  const std::vector<std::pair<std::vector<int>, double>>& lottery);

}  // namespace lottery
