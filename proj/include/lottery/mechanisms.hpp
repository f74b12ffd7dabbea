#pragma once

#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include "lottery/hitting.hpp"
#include "lottery/instance.hpp"
#include "lottery/rng.hpp"

namespace lottery {

enum class Mechanism {
  GroupLottery,               // uniform order over valid groups, served whole
  IndividualLottery,          // uniform order over agents, Eq-style min(request, remaining)
  IndividualLotteryLimit,     // same with requests capped at a designer limit
  WeightedIndividualLottery,  // agent order biased inversely to request size
  GroupLotteryReplacement,    // groups drawn i.i.d. with replacement (proof device)
  FairGroupLottery,           // lottery over feasible group subsets with equal marginals
};

const char* mechanism_token(Mechanism mech);
std::optional<Mechanism> mechanism_from_token(std::string_view token);
bool mechanism_uses_requests(Mechanism mech);

struct ActionProfile {
  enum class Kind { GroupDeclaration, TicketRequest };
  Kind kind = Kind::TicketRequest;
  // GroupDeclaration: per agent, the declared subset of agents (sorted ids).
  std::vector<std::vector<int>> declarations;
  // TicketRequest: per agent, requested ticket count.
  std::vector<int> requests;

  // Truthful play: declare one's own group / request its size. Requests are
  // clamped into the action set ({1..k}, or {1..limit} under a limit).
  static ActionProfile group_declarations(const Instance& inst);
  static ActionProfile group_requests(const Instance& inst, int cap);
};

ActionProfile default_profile(Mechanism mech, const Instance& inst, int limit = 0);

struct DrawOrder {
  enum class Law { UniformPerm, WeightedPerm, WithReplacement };
  Law law = Law::UniformPerm;
  std::vector<int> elements;
  std::vector<double> scores;  // WeightedPerm: score of elements[t], ascending
};

struct Allocation {
  std::vector<int> x;  // tickets per agent
  long long total() const;
};

// Group-level views of an allocation.
std::vector<int> group_ticket_counts(const Instance& inst, const Allocation& a);
std::vector<char> group_success(const Instance& inst, const std::vector<int>& group_tickets);

// A subset S of agents is a valid group iff every member of S declared
// exactly S. Returned in deterministic (lexicographic) order.
std::vector<std::vector<int>> valid_groups(const ActionProfile& profile, int n_agents);

// Serve groups whole, in order, until the next one no longer fits; that
// group gets nothing and the lottery ends. Repeats in the sequence are
// served again (replacement variant feeds repeated groups through here).
Allocation allocate_group_lottery(const std::vector<std::vector<int>>& groups_in_order, int k,
                                  int n_agents);

// min(request, remaining-after-predecessor-requests); the budget term uses
// predecessors' full requests verbatim, which coincides with remaining
// tickets because clamping only happens once the budget hits zero.
Allocation allocate_individual(const std::vector<int>& agents_in_order,
                               const std::vector<int>& requests, int k);

DrawOrder sample_uniform_order(int count, SeedStream& stream);

// Insertion decomposition of a uniform order: order the subset, order the
// rest, choose the subset's positions uniformly, then interleave. Same law
// as sample_uniform_order; exposed for the coupling tests.
DrawOrder sample_uniform_order_split(int count, const std::vector<int>& subset,
                                     SeedStream& stream);

// Draw i.i.d. unit exponentials X_i and sort ascending by request_i * X_i
// (ties, a measure-zero event realized by floating point, break by index).
DrawOrder sample_weighted_order(const std::vector<int>& requests, SeedStream& stream);

struct FairLottery {
  struct Entry {
    std::vector<int> groups;  // true-group indices, possibly empty
    double weight = 0;
  };
  std::vector<Entry> support;
  double u_star = 0;
  std::vector<double> marginals(int m) const;
};

// Greedy decomposition with exact per-group marginal (k - s_max + 1)/n.
// Packs by descending residual; each step takes the largest weight that
// keeps residuals nonnegative, total weight <= 1, and every group's
// remaining marginal coverable by the remaining weight. Stalls surface as
// DECOMPOSITION_FAILED, never as a silent approximation.
FairLottery build_fair_lottery(const Instance& inst);

// Master sequence: agents drawn i.i.d. with probability inversely
// proportional to group size, until every agent has appeared. The three
// projections are the replacement-group sequence, the deduplicated agent
// order, and the deduplicated group order.
struct CoupledTriple {
  std::vector<int> master_agents;
  std::vector<int> glr_group_sequence;
  std::vector<int> iw_agent_order;
  std::vector<int> gl_group_order;
};

// Pure projection of a master agent sequence into the three coupled orders.
CoupledTriple project_master_sequence(const Instance& inst, std::vector<int> master);

CoupledTriple sample_coupled_triple(const Instance& inst, SeedStream& stream);

struct CoupledSuccess {
  std::vector<char> glr, iw, gl;  // per true group
};

// Group-request success indicators of the three coupled mechanisms on one
// master sequence; pointwise glr <= iw <= gl is the dominance invariant.
CoupledSuccess coupled_success(const Instance& inst, const CoupledTriple& triple);

// One-shot sampled outcome of a mechanism (the readable reference path).
Allocation run_mechanism(Mechanism mech, const Instance& inst, const ActionProfile& profile,
                         SeedStream& stream, int limit = 0);

// Monte-Carlo fast path. Validates the profile once, then emits per-true-
// group ticket counts per replica. Given the same stream position this
// produces exactly the same outcome as run_mechanism (both consume draws in
// the same pattern; the fast path just stops shuffling early).
class MechanismSampler {
 public:
  struct Scratch {
    std::vector<int> pool;
    std::vector<std::pair<int, int>> undo;
    std::vector<double> key;
    std::vector<int> order;
  };

  MechanismSampler(Mechanism mech, const Instance& inst, const ActionProfile& profile,
                   int limit = 0);

  const Instance& instance() const { return *inst_; }
  Mechanism mechanism() const { return mech_; }
  const FairLottery& fair_lottery() const { return fair_; }

  void sample_group_tickets(SeedStream& stream, Scratch& scratch,
                            std::vector<int>& group_tickets) const;

 private:
  friend Allocation run_mechanism(Mechanism, const Instance&, const ActionProfile&, SeedStream&,
                                  int);

  Mechanism mech_;
  const Instance* inst_;
  int limit_ = 0;
  std::vector<int> requests_;
  std::vector<int> agent_group_;
  std::vector<std::vector<int>> valid_;  // member lists
  std::vector<int> valid_size_;
  std::vector<std::vector<std::pair<int, int>>> valid_comp_;  // (true group, member count)
  FairLottery fair_;
  std::vector<double> fair_cdf_;

  Allocation sample_allocation(SeedStream& stream) const;
};

}  // namespace lottery
