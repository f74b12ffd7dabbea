#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "lottery/evaluation.hpp"
#include "lottery/instance.hpp"

namespace lottery {

// g(x) = (1 - e^{-x})/x, the multiplicative loss from duplicate winners;
// decreasing on (0,1) with 1 - x/2 <= g(x) <= 1.
double g_of(double x);

struct BoundRecord {
  double kappa = 0;
  double alpha = 0;
  double g_alpha = 1;
  // Raw worst-case guarantees; may fall below 0 on extreme instances.
  double gl_eff_raw = 0, gl_fair_raw = 0;
  double iw_eff_raw = 0, iw_fair_raw = 0;
  double benchmark_eff_raw = 0;  // fairness benchmark is exactly 1
  bool il_limit_applicable = false;
  int ell = 0;
  double il_limit_raw = 0;  // 1/ell when all sizes <= ell

  double gl_eff() const;
  double gl_fair() const;
  double iw_eff() const;
  double iw_fair() const;
  double benchmark_eff() const;
  double il_limit() const;
};

BoundRecord bounds(const Instance& inst, std::optional<int> ell = std::nullopt);

enum class HittingMethod { Exact, MonteCarlo };

struct HittingCheck {
  double e_tau = 0;
  double lower = 0, upper = 0;  // 1 + (k-a_max)/mu and (k+a_max-1)/mu
  bool within = false;
  struct Pair {
    int k1 = 0, k2 = 0;
    double lhs = 0, rhs = 0;  // E[tau(k1)] + E[tau(k2)] vs E[tau(k1+k2)]
    bool holds = false;
  };
  std::vector<Pair> subadditivity;  // k paired with every k' such that k+k' fits
};

HittingCheck hitting_time_check(const std::vector<int>& sizes, int k, HittingMethod method,
                                std::uint64_t seed, long long mc_samples = 100000);

// Extended-real threshold. plus_infinity means outsiders can never exhaust
// the budget; an impossible group (budget below zero) gets value 0, which
// empties the success set since scores are positive.
struct ExtendedReal {
  double value = 0;
  bool plus_infinity = false;
};

struct WeightedScore {
  int request = 0;
  double score = 0;
};

// Infimum t such that outsider requests with score below t exceed k - |G|.
ExtendedReal threshold_cutoff(int k, int group_size, std::vector<WeightedScore> outsiders);

// A group wins exactly when its members below the cutoff carry total
// requests of at least the group size.
bool threshold_success(const std::vector<WeightedScore>& members, int group_size,
                       const ExtendedReal& threshold);

// Request multisets (sorted ascending, entries in {1..s}) where every r
// requests sum below s and every r+1 reach s. Each satisfies
// sum(1/a_i) <= r+1.
std::vector<std::vector<int>> enumerate_br(int s, int r);

// Exact check of sum(1/a_i) <= r+1 in integer arithmetic (entries <= 6).
bool reciprocal_sum_within(const std::vector<int>& requests, int r);

struct ConjectureProbe {
  double p_success = 0;
  double se = 0;
  double p_group_request = 0;  // 1 - e^{-T}, the group-request value
};

// Monte Carlo over member scores only; outsiders enter through the cutoff.
ConjectureProbe conjecture_probe(int s, const std::vector<int>& strategy, double threshold,
                                 long long replicas, std::uint64_t seed);

// 1 - e^{-lambda/x}, valid for x >= lambda >= 0, x > 0.
double poisson_tail_bound(double lambda, double x);

struct Example1ClosedForms {
  double u_group_request = 0;  // 1 - 1/m
  double u_all_twos = 0;       // triple-product sum, compensated summation
};

Example1ClosedForms example1_closed_forms(int m);

// (1/alpha) * (1 - prod_{i<alpha*m} (1 - 1/(m - i/s))); alpha*m must be
// integral. Tends to g(alpha) as m,s grow at comparable rates.
double spl_tight_closed_form(long long m, long long s, const Rational& alpha);

// One candidate joint action for a target group's members (canonical member
// order). Request vectors for the request mechanisms, declaration blocks for
// the group lottery.
struct GroupAction {
  std::vector<int> requests;
  std::vector<std::vector<int>> declarations;
};

struct BestResponseResult {
  double best_utility = 0;
  double group_request_utility = 0;
  std::vector<GroupAction> maximizers;
};

// Exhaustive maximization of the target group's exact utility over the given
// universe, opponents fixed. Enumeration limits apply (TOO_LARGE otherwise).
BestResponseResult best_response_search(Mechanism mech, const Instance& inst, int target_group,
                                        const ActionProfile& opponents,
                                        const std::vector<GroupAction>& universe, int limit = 0);

// Request multisets {1..cap}^size up to permutation.
std::vector<GroupAction> request_action_universe(int group_size, int cap);

// Partitions of the target group's members, each block declared by its
// members, plus variants extending one block by a single outsider.
std::vector<GroupAction> gl_action_universe(const Instance& inst, int target_group);

}  // namespace lottery
