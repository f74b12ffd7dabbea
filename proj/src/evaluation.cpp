#include "lottery/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <thread>

namespace lottery {

const char* eval_method_token(EvalMethod method) {
  switch (method) {
    case EvalMethod::ExactEnum: return "exact_enum";
    case EvalMethod::ExactDp: return "exact_dp";
    case EvalMethod::MonteCarlo: return "monte_carlo";
  }
  return "?";
}

namespace {

void validate_requests(const Instance& inst, const ActionProfile& profile, Mechanism mech,
                       int limit) {
  require(profile.kind == ActionProfile::Kind::TicketRequest, Err::Config,
          "request mechanisms need a ticket-request profile");
  require(int(profile.requests.size()) == inst.n, Err::Config,
          "request profile must cover every agent");
  int cap = inst.k;
  if (mech == Mechanism::IndividualLotteryLimit) {
    require(limit >= 1, Err::Config, "il_limit needs a positive limit");
    cap = std::min(limit, inst.k);
  }
  for (int r : profile.requests)
    require(r >= 1 && r <= cap, Err::ActionOutOfRange,
            "request " + std::to_string(r) + " outside {1.." + std::to_string(cap) + "}");
}

UtilityVector exact_from_counts(const Instance& inst, const std::vector<double>& success_prob) {
  UtilityVector util;
  util.u = success_prob;
  util.se.assign(std::size_t(inst.m), 0.0);
  util.method = EvalMethod::ExactEnum;
  return util;
}

UtilityVector enumerate_group_orders(const Instance& inst, const ActionProfile& profile) {
  auto valid = valid_groups(profile, inst.n);
  require(int(valid.size()) <= kMaxEnumGroups, Err::TooLarge,
          "group-order enumeration is limited to " + std::to_string(kMaxEnumGroups) +
              " valid groups (got " + std::to_string(valid.size()) + ")");
  std::vector<double> prob(std::size_t(inst.m), 0.0);
  if (valid.empty()) return exact_from_counts(inst, prob);

  std::vector<int> idx(valid.size());
  std::iota(idx.begin(), idx.end(), 0);
  long long perms = 0;
  std::vector<std::vector<int>> seq(valid.size());
  do {
    for (std::size_t t = 0; t < idx.size(); ++t) seq[t] = valid[std::size_t(idx[t])];
    Allocation a = allocate_group_lottery(seq, inst.k, inst.n);
    auto ok = group_success(inst, group_ticket_counts(inst, a));
    for (int g = 0; g < inst.m; ++g) prob[std::size_t(g)] += ok[std::size_t(g)];
    ++perms;
  } while (std::next_permutation(idx.begin(), idx.end()));
  for (auto& p : prob) p /= double(perms);
  return exact_from_counts(inst, prob);
}

UtilityVector enumerate_agent_orders(const Instance& inst, const ActionProfile& profile,
                                     Mechanism mech, int limit) {
  validate_requests(inst, profile, mech, limit);
  require(inst.n <= kMaxEnumAgents, Err::TooLarge,
          "agent-order enumeration is limited to " + std::to_string(kMaxEnumAgents) +
              " agents (got " + std::to_string(inst.n) + ")");
  const bool weighted = mech == Mechanism::WeightedIndividualLottery;
  const auto& req = profile.requests;

  std::vector<int> order(std::size_t(inst.n));
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> prob(std::size_t(inst.m), 0.0);
  double total_weight = 0;
  long long perms = 0;
  double inv_sum_all = 0;
  for (int r : req) inv_sum_all += 1.0 / double(r);
  do {
    double w;
    if (weighted) {
      w = 1.0;
      double rem = inv_sum_all;
      for (int id : order) {
        double inv = 1.0 / double(req[std::size_t(id)]);
        w *= inv / rem;
        rem -= inv;
      }
    } else {
      w = 1.0;  // normalized by perms below
    }
    Allocation a = allocate_individual(order, req, inst.k);
    auto ok = group_success(inst, group_ticket_counts(inst, a));
    for (int g = 0; g < inst.m; ++g)
      if (ok[std::size_t(g)]) prob[std::size_t(g)] += w;
    total_weight += w;
    ++perms;
  } while (std::next_permutation(order.begin(), order.end()));

  if (weighted) {
    require(std::abs(total_weight - 1.0) <= 1e-12, Err::Internal,
            "weighted-order probabilities summed to " + std::to_string(total_weight));
  } else {
    for (auto& p : prob) p /= double(perms);
  }
  return exact_from_counts(inst, prob);
}

// Forward sweep over (tickets used, set of served valid groups); a draw that
// does not fit absorbs the state.
UtilityVector enumerate_replacement(const Instance& inst, const ActionProfile& profile) {
  auto valid = valid_groups(profile, inst.n);
  require(int(valid.size()) <= kMaxEnumGroups, Err::TooLarge,
          "replacement enumeration is limited to " + std::to_string(kMaxEnumGroups) +
              " valid groups (got " + std::to_string(valid.size()) + ")");
  std::vector<double> prob(std::size_t(inst.m), 0.0);
  if (valid.empty()) return exact_from_counts(inst, prob);

  // Success bookkeeping via a served-set mask needs each valid group to be a
  // whole true group (the replacement variant is a group-request device).
  auto ag = inst.agent_group();
  std::vector<int> valid_true(valid.size(), -1);
  for (std::size_t v = 0; v < valid.size(); ++v) {
    int g = ag[std::size_t(valid[v][0])];
    require(int(valid[v].size()) == inst.group_sizes[std::size_t(g)], Err::ParamViolation,
            "replacement evaluation needs group-request declarations");
    for (int i : valid[v])
      require(ag[std::size_t(i)] == g, Err::ParamViolation,
              "replacement evaluation needs group-request declarations");
    valid_true[v] = g;
  }

  const int v = int(valid.size());
  const int k = inst.k;
  const std::size_t masks = std::size_t(1) << v;
  std::vector<double> dist((std::size_t(k) + 1) * masks, 0.0);
  dist[0] = 1.0;
  const double step = 1.0 / double(v);
  for (int used = 0; used <= k; ++used) {
    for (std::size_t mask = 0; mask < masks; ++mask) {
      double p = dist[std::size_t(used) * masks + mask];
      if (p == 0.0) continue;
      for (int j = 0; j < v; ++j) {
        int nu = used + int(valid[std::size_t(j)].size());
        if (nu <= k) {
          dist[std::size_t(nu) * masks + (mask | (std::size_t(1) << j))] += p * step;
        } else {
          // absorbed: groups served so far are the successes
          for (int t = 0; t < v; ++t)
            if (mask & (std::size_t(1) << t))
              prob[std::size_t(valid_true[std::size_t(t)])] += p * step;
        }
      }
      dist[std::size_t(used) * masks + mask] = 0.0;
    }
  }
  return exact_from_counts(inst, prob);
}

}  // namespace

UtilityVector exact_enumerate(Mechanism mech, const Instance& inst, const ActionProfile& profile,
                              int limit) {
  switch (mech) {
    case Mechanism::GroupLottery:
      return enumerate_group_orders(inst, profile);
    case Mechanism::IndividualLottery:
    case Mechanism::IndividualLotteryLimit:
    case Mechanism::WeightedIndividualLottery:
      return enumerate_agent_orders(inst, profile, mech, limit);
    case Mechanism::GroupLotteryReplacement:
      return enumerate_replacement(inst, profile);
    case Mechanism::FairGroupLottery: {
      FairLottery lot = build_fair_lottery(inst);
      UtilityVector util = exact_from_counts(inst, lot.marginals(inst.m));
      return util;
    }
  }
  fail(Err::Internal, "unhandled mechanism");
}

UtilityVector exact_gl_dp(const Instance& inst) {
  SizeMultiset all = to_multiset(inst.group_sizes);
  UtilityVector util;
  util.method = EvalMethod::ExactDp;
  util.u.resize(std::size_t(inst.m));
  util.se.assign(std::size_t(inst.m), 0.0);

  std::vector<double> class_u(all.sizes.size(), 0.0);
  for (std::size_t c = 0; c < all.sizes.size(); ++c) {
    const int s = all.sizes[c];
    SizeMultiset rest = all;
    rest.counts[c] -= 1;
    if (rest.counts[c] == 0) {
      rest.sizes.erase(rest.sizes.begin() + long(c));
      rest.counts.erase(rest.counts.begin() + long(c));
    }
    const long long budget = (long long)inst.k - s + 1;
    double e_tau = expected_hitting_index(rest, budget, /*clamp_short=*/true);
    class_u[c] = budget <= 0 ? 0.0 : e_tau / double(inst.m);
  }
  for (int g = 0; g < inst.m; ++g) {
    std::size_t c = std::size_t(
        std::lower_bound(all.sizes.begin(), all.sizes.end(), inst.group_sizes[std::size_t(g)]) -
        all.sizes.begin());
    util.u[std::size_t(g)] = class_u[c];
  }
  return util;
}

namespace {

struct GroupCounts {
  std::vector<long long> success;
};

void run_replicas(const MechanismSampler& sampler, long long first, long long last,
                  std::uint64_t master_seed, GroupCounts& out) {
  const Instance& inst = sampler.instance();
  MechanismSampler::Scratch scratch;
  std::vector<int> tickets;
  out.success.assign(std::size_t(inst.m), 0);
  for (long long r = first; r < last; ++r) {
    SeedStream stream = SeedStream::for_replica(master_seed, std::uint64_t(r));
    sampler.sample_group_tickets(stream, scratch, tickets);
    for (int g = 0; g < inst.m; ++g)
      if (tickets[std::size_t(g)] >= inst.group_sizes[std::size_t(g)]) out.success[std::size_t(g)]++;
  }
}

}  // namespace

UtilityVector monte_carlo(Mechanism mech, const Instance& inst, const ActionProfile& profile,
                          long long replicas, std::uint64_t master_seed, int workers, int limit,
                          bool pool_size_classes) {
  require(replicas >= 1, Err::Config, "need at least one replica");
  MechanismSampler sampler(mech, inst, profile, limit);

  int w = std::clamp(workers, 1, 64);
  if ((long long)w > replicas) w = int(replicas);
  std::vector<GroupCounts> parts(static_cast<std::size_t>(w));
  if (w == 1) {
    run_replicas(sampler, 0, replicas, master_seed, parts[0]);
  } else {
    std::vector<std::thread> threads;
    for (int i = 0; i < w; ++i) {
      long long first = replicas * i / w;
      long long last = replicas * (i + 1) / w;
      threads.emplace_back(run_replicas, std::cref(sampler), first, last, master_seed,
                           std::ref(parts[std::size_t(i)]));
    }
    for (auto& t : threads) t.join();
  }

  std::vector<long long> success(std::size_t(inst.m), 0);
  for (const auto& part : parts)
    for (int g = 0; g < inst.m; ++g) success[std::size_t(g)] += part.success[std::size_t(g)];

  UtilityVector util;
  util.method = EvalMethod::MonteCarlo;
  util.replicas = replicas;
  util.seed = master_seed;
  util.u.resize(std::size_t(inst.m));
  util.se.resize(std::size_t(inst.m));
  if (!pool_size_classes) {
    for (int g = 0; g < inst.m; ++g) {
      double p = double(success[std::size_t(g)]) / double(replicas);
      util.u[std::size_t(g)] = p;
      util.se[std::size_t(g)] = std::sqrt(p * (1.0 - p) / double(replicas));
    }
    return util;
  }

  // Groups of equal size are exchangeable under the group request, so their
  // counts pool into one estimate with a correspondingly smaller error.
  util.pooled = true;
  SizeMultiset classes = to_multiset(inst.group_sizes);
  std::vector<long long> class_success(classes.sizes.size(), 0);
  for (int g = 0; g < inst.m; ++g) {
    std::size_t c = std::size_t(std::lower_bound(classes.sizes.begin(), classes.sizes.end(),
                                                 inst.group_sizes[std::size_t(g)]) -
                                classes.sizes.begin());
    class_success[c] += success[std::size_t(g)];
  }
  for (int g = 0; g < inst.m; ++g) {
    std::size_t c = std::size_t(std::lower_bound(classes.sizes.begin(), classes.sizes.end(),
                                                 inst.group_sizes[std::size_t(g)]) -
                                classes.sizes.begin());
    double denom = double(replicas) * double(classes.counts[c]);
    double p = double(class_success[c]) / denom;
    util.u[std::size_t(g)] = p;
    util.se[std::size_t(g)] = std::sqrt(p * (1.0 - p) / denom);
  }
  return util;
}

double utilization(const UtilityVector& util, const Instance& inst) {
  require(int(util.u.size()) == inst.m, Err::Config, "utility vector does not match instance");
  double acc = 0;
  for (int g = 0; g < inst.m; ++g)
    acc += double(inst.group_sizes[std::size_t(g)]) * util.u[std::size_t(g)];
  return acc / double(inst.k);
}

double fairness_ratio(const UtilityVector& util) {
  require(!util.u.empty(), Err::Config, "fairness of an empty utility vector");
  double lo = *std::min_element(util.u.begin(), util.u.end());
  double hi = *std::max_element(util.u.begin(), util.u.end());
  if (hi <= 0.0) return 1.0;  // nobody ever wins: vacuously fair
  if (lo <= 0.0) return 0.0;
  return lo / hi;
}

namespace {

void run_envy_replicas(const MechanismSampler& sampler, long long first, long long last,
                       std::uint64_t master_seed, std::vector<long long>& pair_counts) {
  const Instance& inst = sampler.instance();
  const int m = inst.m;
  MechanismSampler::Scratch scratch;
  std::vector<int> tickets;
  pair_counts.assign(std::size_t(m) * std::size_t(m), 0);
  for (long long r = first; r < last; ++r) {
    SeedStream stream = SeedStream::for_replica(master_seed, std::uint64_t(r));
    sampler.sample_group_tickets(stream, scratch, tickets);
    for (int g = 0; g < m; ++g) {
      const int need = inst.group_sizes[std::size_t(g)];
      for (int h = 0; h < m; ++h)
        if (tickets[std::size_t(h)] >= need) pair_counts[std::size_t(g) * std::size_t(m) + std::size_t(h)]++;
    }
  }
}

}  // namespace

EnvyMatrix envy_matrix(Mechanism mech, const Instance& inst, const ActionProfile& profile,
                       long long replicas, std::uint64_t master_seed, int workers, int limit) {
  require(replicas >= 1, Err::Config, "need at least one replica");
  MechanismSampler sampler(mech, inst, profile, limit);
  int w = std::clamp(workers, 1, 64);
  if ((long long)w > replicas) w = int(replicas);

  std::vector<std::vector<long long>> parts(static_cast<std::size_t>(w));
  if (w == 1) {
    run_envy_replicas(sampler, 0, replicas, master_seed, parts[0]);
  } else {
    std::vector<std::thread> threads;
    for (int i = 0; i < w; ++i) {
      long long first = replicas * i / w;
      long long last = replicas * (i + 1) / w;
      threads.emplace_back(run_envy_replicas, std::cref(sampler), first, last, master_seed,
                           std::ref(parts[std::size_t(i)]));
    }
    for (auto& t : threads) t.join();
  }

  EnvyMatrix env;
  env.m = inst.m;
  env.p.assign(std::size_t(inst.m) * std::size_t(inst.m), 0.0);
  for (const auto& part : parts)
    for (std::size_t i = 0; i < env.p.size(); ++i) env.p[i] += double(part[i]);
  for (auto& v : env.p) v /= double(replicas);
  env.margin = 0;
  bool first_pair = true;
  for (int g = 0; g < inst.m; ++g)
    for (int h = 0; h < inst.m; ++h) {
      double d = env.at(g, h) - env.at(g, g);
      if (first_pair || d > env.margin) env.margin = d;
      first_pair = false;
    }
  return env;
}

EnvyMatrix envy_matrix_of_lottery(
    const Instance& inst, const std::vector<std::pair<std::vector<int>, double>>& lottery) {
  EnvyMatrix env;
  env.m = inst.m;
  env.p.assign(std::size_t(inst.m) * std::size_t(inst.m), 0.0);
  for (const auto& [tickets, weight] : lottery) {
    require(int(tickets.size()) == inst.m, Err::Config, "lottery entry does not match instance");
    for (int g = 0; g < inst.m; ++g)
      for (int h = 0; h < inst.m; ++h)
        if (tickets[std::size_t(h)] >= inst.group_sizes[std::size_t(g)])
          env.p[std::size_t(g) * std::size_t(inst.m) + std::size_t(h)] += weight;
  }
  env.margin = 0;
  bool first_pair = true;
  for (int g = 0; g < inst.m; ++g)
    for (int h = 0; h < inst.m; ++h) {
      double d = env.at(g, h) - env.at(g, g);
      if (first_pair || d > env.margin) env.margin = d;
      first_pair = false;
    }
  return env;
}

}  // namespace lottery
